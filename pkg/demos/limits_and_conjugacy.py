"""Closed-form limit functions versus iterate ratios, and the linearising map.

Run: python3 demos/limits_and_conjugacy.py
"""

import numpy as np

from henon_fatou.dynamics import Params, apply_F, iterate
from henon_fatou.limits import conjugacy_phi, estimate_h, harmonic_diagnostic, linear_model
from henon_fatou.sphere import chordal_distance, ratio

p = Params(3, 3.0)
pt = (1.5 + 0.3j, 2.0 - 0.4j)

est = estimate_h(pt, p)
print(f"h1 = {est.h1:.15g}\nh2 = {est.h2:.15g}")
print(f"h1*h2 - a = {abs(est.h1 * est.h2 - p.a):.2e}  ({est.terms_used} series terms)")

# z_{2n}/w_{2n} approaches h1 geometrically
orbit = iterate(pt, 30, p)
for n in (2, 5, 10, 15):
    r = ratio(orbit.z[2 * n], orbit.w[2 * n])
    print(f"  n={n:2d}  chordal gap to h1 = {chordal_distance(r, est.h1):.2e}")

# phi(F(P)) equals L(phi(P)) with L(z, w) = (a w, z)
lhs = np.array(conjugacy_phi(apply_F(pt, p), p))
rhs = np.array(linear_model(conjugacy_phi(pt, p), 1, p))
print(f"\n|phi(F(P)) - L(phi(P))| = {np.max(np.abs(lhs - rhs)):.2e}")

print("\nu_n = -Re(z_n^m)/n runs off to -infinity:")
for n in (10, 11, 12, 13, 20, 21):
    print(f"  n={n:2d}  u_n = {harmonic_diagnostic(pt, n, p).value:.4g}")
