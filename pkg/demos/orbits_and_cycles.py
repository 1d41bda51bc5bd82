"""Walk one orbit through the sector cycles and print the combinatorics.

Run: python3 demos/orbits_and_cycles.py
"""

from henon_fatou.cycles import cycle_decomposition, format_cycle, format_slice_table
from henon_fatou.dynamics import Params, iterate
from henon_fatou.sets import WSchedule, sample_A, sector_pair

p = Params(5, 3.0)
dec = cycle_decomposition(p.m)

print(f"m={p.m}: {len(dec.cycles)} cycles with periods {dec.periods}")
for c in dec.cycles:
    print(" ", format_cycle(c, p.m), " limits in slices", c.slices)

# a point far out on the bisectors of S_0 x S_2 follows the cycle of (0, 2)
sched = WSchedule.from_params(p)
pt = sample_A((0, 2), 10 * sched.R0, 1, 0, p.m)[0]
orbit = iterate(pt, 6, p)
print("\nsector pairs along an orbit started in A_02:")
for n, q in enumerate(orbit.points):
    print(f"  n={n}  pair={sector_pair(q, p.m).label(p.m)}  |z|={abs(q[0]):.4g}")

print("\nslice of z/w along the short cycle:")
print(format_slice_table(dec.cycles[-1], p.m))
