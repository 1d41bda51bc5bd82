"""Self-checks of the library's invariants on seeded samples.

Each suite takes a :class:`~henon_fatou.dynamics.Params` and returns a list
of :class:`Check` records carrying the measured value and the tolerance it
was compared against, so reports are machine readable and reproducible.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .cycles import cycle_decomposition, gamma, gamma_power, limit_slice_map, ratio_slice
from .dynamics import apply_F, iterate
from .errors import OrbitLeftS
from .limits import (
    DEFAULT_TOL,
    chebyshev_T,
    conjugacy_phi,
    estimate_h,
    harmonic_diagnostic,
    limit_arrays,
    linear_model,
    rank_probe,
    ratio_gap_arrays,
)
from .sets import (
    WSchedule,
    _rotations,
    in_W_n,
    sample_A,
    sample_S,
    sample_W_n,
    sector_pair,
    slice_index,
)

SUITES = ("combinatorics", "cycling", "growth", "limits", "conjugacy", "diagnostic")


@dataclass(frozen=True)
class Check:
    """One verified property.

    ``relation`` says how ``measured`` was compared with ``tolerance``:
    ``"<"`` (strict upper bound), ``">"`` (strict lower bound) or ``"=="``.
    """

    name: str
    passed: bool
    measured: float
    tolerance: float
    relation: str = "<"
    detail: str = ""

    def to_dict(self):
        return asdict(self)


def _below(name, measured, tol, detail=""):
    return Check(name, bool(measured < tol), float(measured), float(tol), "<", detail)


def _above(name, measured, tol, detail=""):
    return Check(name, bool(measured > tol), float(measured), float(tol), ">", detail)


def _equal(name, measured, expected, detail=""):
    return Check(name, bool(measured == expected), float(measured), float(expected), "==", detail)


def ray_base(sched):
    """Default base radius ``10 * R0`` for samples on the rays ``A_ab``."""
    return 10.0 * sched.R0


# --- combinatorics ----------------------------------------------------------


def check_combinatorics(p, **_):
    m = p.m
    dec = cycle_decomposition(m)
    expected = m // 2 if m % 2 == 0 else (m - 1) // 2 + 1
    out = [_equal("cycle-count", len(dec.cycles), expected)]

    bad_period = sum(
        1 for c in dec.cycles if c.period != 2 * m and not (m % 2 and c.period == m)
    )
    out.append(_equal("cycle-periods", bad_period, 0, "periods outside {2m} (and {m} for odd m)"))

    covered = sorted(pair for c in dec.cycles for pair in c.members)
    out.append(_equal("partition", int(covered != [(a, b) for a in range(m) for b in range(m)]), 0))

    # even members carry z/w in the h1 slice, odd members in the h2 slice
    bad_slice = 0
    for c in dec.cycles:
        j1, j2 = limit_slice_map(c.representative.b, m)
        for i, pair in enumerate(c.members):
            bad_slice += ratio_slice(pair, m) != (j2 if i % 2 else j1)
        bad_slice += gamma_power(c.representative, c.period, m) != c.representative
    out.append(_equal("slice-map", bad_slice, 0))
    return out


# --- cycling and invariance -------------------------------------------------


def check_cycling(p, samples=50, seed=0, R0=None, n_max=100, **_):
    m = p.m
    sched = WSchedule.from_params(p, R0)
    M = ray_base(sched)
    bad = trials = 0
    for a in range(m):
        for b in range(m):
            for pt in sample_A((a, b), M, samples, seed + a * m + b, m):
                trials += 1
                bad += sector_pair(apply_F(pt, p), m) != gamma((a, b), m)
    out = [_equal("A-cycling-violations", bad, 0, f"{trials} trials")]

    bad = trials = 0
    steps = sorted(set(range(0, min(n_max, 2 * m + 2) + 1)) | {n_max // 2, n_max})
    per = max(1, samples // 10)
    for b in range(m):
        for n in steps:
            for pt in sample_W_n(n, b, sched, per, seed + 1000 * n + b, edge=True):
                trials += 1
                bad += not in_W_n(apply_F(pt, p), n + 1, b, sched)
    out.append(_equal("W-invariance-violations", bad, 0, f"{trials} trials, n <= {n_max}"))
    return out


# --- growth -----------------------------------------------------------------


def growth_margin(p, pt, margin=1e-6):
    """``lambda = (delta - 1) * M0 - 1 - margin`` for the smallest rotated real part ``M0``."""
    return (p.delta - 1.0) * _m0(pt, p.m) - 1.0 - margin


def _m0(pt, m):
    pair = sector_pair(pt, m)
    rz = complex(pt[0]) * _rotations(m)[pair.a]
    rw = complex(pt[1]) * _rotations(m)[pair.b]
    return min(rz.real, rw.real)


def growth_violations(pt, p, n_max=40, margin=1e-6):
    """Count steps where a rotated real part fails to exceed its linear lower bound.

    ``z_{2n}`` sits in sector ``a + n`` and ``z_{2n-1}`` in sector ``b + n``;
    after rotating those sectors onto the positive axis the real parts must
    exceed ``Re z0 + n*lambda`` and ``Re w0 + n*lambda`` respectively.
    """
    m = p.m
    a, b = sector_pair(pt, m)
    lam = growth_margin(p, pt, margin)
    rot = _rotations(m)
    x0 = (complex(pt[0]) * rot[a]).real
    y0 = (complex(pt[1]) * rot[b]).real
    orbit = iterate(pt, 2 * n_max, p)
    bad = 0
    for n in range(1, n_max + 1):
        if 2 * n >= len(orbit):
            bad += 1
            continue
        even = (complex(orbit.z[2 * n]) * rot[(a + n) % m]).real
        odd = (complex(orbit.z[2 * n - 1]) * rot[(b + n) % m]).real
        bad += not even > x0 + n * lam
        bad += not odd > y0 + n * lam
    return bad


def check_growth(p, samples=50, seed=0, R0=None, n_max=40, **_):
    m = p.m
    sched = WSchedule.from_params(p, R0)
    M = ray_base(sched)
    bad = trials = 0
    for a in range(m):
        for b in range(m):
            for pt in sample_A((a, b), M, max(1, samples // m), seed + a * m + b, m):
                trials += 1
                bad += growth_violations(pt, p, n_max)
    return [_equal("growth-violations", bad, 0, f"{trials} orbits, n <= {n_max}")]


# --- limits -----------------------------------------------------------------


def check_limits(p, samples=50, seed=0, R0=None, tol=DEFAULT_TOL, **_):
    m = p.m
    sched = WSchedule.from_params(p, R0)
    M = ray_base(sched)
    pts = [
        pt
        for a in range(m)
        for b in range(m)
        for pt in sample_A((a, b), M, samples, seed + a * m + b, m)
    ]
    z0 = np.array([q[0] for q in pts])
    w0 = np.array([q[1] for q in pts])
    lim = limit_arrays(z0, w0, p, tol, min_steps=51)
    out = [_equal("A-left-S", int(np.count_nonzero(~lim.in_S)), 0)]
    gap = float(np.nanmax(ratio_gap_arrays(lim, 25)))
    out.append(_below("ratio-gap-n25", gap, 1e-8))
    out.append(_below("product-h1h2-minus-a", float(np.nanmax(np.abs(lim.h1 * lim.h2 - p.a))), 1e-9))

    # closed form and ratio route agree on a subsample
    worst = 0.0
    for pt in pts[:: max(1, len(pts) // 20)]:
        worst = max(worst, estimate_h(pt, p, tol).ratio_gap)
    out.append(_below("closed-form-vs-ratio", worst, 1e-12))

    sp = sample_S(samples * m, seed, m)
    lim = limit_arrays(np.array([q[0] for q in sp]), np.array([q[1] for q in sp]), p, tol)
    kept = lim.in_S
    big = max(float(np.max(np.abs(lim.delta1[kept]), initial=0.0)), float(np.max(np.abs(lim.delta2[kept]), initial=0.0)))
    out.append(_below("series-bound", big, p.big_delta, f"{int(kept.sum())} orbits stayed in S"))

    bad = 0
    dec = cycle_decomposition(m)
    for c in dec.cycles:
        b = c.representative.b
        j1, j2 = c.slices
        for pt in sample_W_n(0, b, sched, max(2, samples // 5), seed + b):
            est = estimate_h(pt, p, tol)
            bad += slice_index(est.h1, m) != j1 or slice_index(est.h2, m) != j2
    out.append(_equal("slice-containment-violations", bad, 0))

    spread = min(
        rank_probe((0, 0), p, 16, seed, which="h1"),
        rank_probe((0, 0), p, 16, seed, which="h2"),
    )
    out.append(_above("rank-spread", spread, 0.0, "min over h1, h2 on pair 00"))
    return out


# --- conjugacy --------------------------------------------------------------


def conjugacy_error(pt, p, tol=DEFAULT_TOL):
    """``(relative functional-equation error, |phi - Id|)`` at ``pt``."""
    phi = conjugacy_phi(pt, p, tol)
    lhs = conjugacy_phi(apply_F(pt, p), p, tol)
    rhs = linear_model(phi, 1, p)
    num = math.hypot(abs(lhs[0] - rhs[0]), abs(lhs[1] - rhs[1]))
    rel = num / max(math.hypot(abs(rhs[0]), abs(rhs[1])), 1.0)
    shift = math.hypot(abs(phi[0] - pt[0]), abs(phi[1] - pt[1]))
    return rel, shift


def conjugacy_samples(p, count, seed, r_max=3.0):
    """Points of ``S`` near the origin, where ``f`` is far from negligible,
    whose orbits stay in ``S`` over the series horizon."""
    out = []
    for pt in sample_S(count, seed, p.m, r_min=1.0, r_max=r_max):
        try:
            conjugacy_phi(apply_F(pt, p), p)
        except (OrbitLeftS, OverflowError):
            continue
        out.append(pt)
    return out


def check_conjugacy(p, samples=50, seed=0, tol=DEFAULT_TOL, **_):
    m = p.m
    rel = shift = 0.0
    pts = conjugacy_samples(p, samples, seed)
    for pt in pts:
        r, s = conjugacy_error(pt, p, tol)
        rel, shift = max(rel, r), max(shift, s)
    out = [
        _below("functional-equation", rel, 1e-8, f"{len(pts)} points"),
        _below("phi-minus-identity", shift, math.sqrt(2.0)),
    ]
    # L^2m is multiplication by delta^m
    pt = (1.25 - 0.5j, -0.75 + 2j)
    q = pt
    for _ in range(2 * m):
        q = linear_model(q, 1, p)
    scale = p.delta**m
    err = max(abs(q[0] - scale * pt[0]), abs(q[1] - scale * pt[1])) / scale
    out.append(_below("linear-model-period", err, 1e-12))
    return out


# --- diagnostic -------------------------------------------------------------


def check_diagnostic(p, samples=50, seed=0, R0=None, n_max=40, **_):
    m = p.m
    sched = WSchedule.from_params(p, R0)
    above = not_parity = saturated = 0
    worst = -math.inf
    for b in range(m):
        for pt in sample_W_n(0, b, sched, max(1, samples // m), seed + b):
            u = [harmonic_diagnostic(pt, n, p) for n in range(1, n_max + 1)]
            saturated += any(v.saturated for v in u)
            vals = [v.value for v in u]
            tail = vals[9:]
            worst = max(worst, max(tail))
            above += any(v >= -1.0 for v in tail)
            # iterates alternate between the two coordinates' growth, so
            # monotonicity is checked along each parity class
            not_parity += any(vals[n + 2] >= vals[n] for n in range(9, n_max - 2))
    out = [
        _below("u_n-below-minus-one", worst, -1.0, f"max u_n over 10 <= n <= {n_max}"),
        _equal("u_n-parity-decrease-violations", not_parity, 0),
        _equal("u_n-saturated", saturated, 0),
    ]
    alpha = np.linspace(0.0, 2.0 * math.pi, 1000)
    err = max(
        float(np.max(np.abs(np.cos(k * alpha) - chebyshev_T(k, np.cos(alpha))))) for k in range(0, 17)
    )
    out.append(_below("chebyshev-identity", err, 1e-12))
    return out


_RUNNERS = {
    "combinatorics": check_combinatorics,
    "cycling": check_cycling,
    "growth": check_growth,
    "limits": check_limits,
    "conjugacy": check_conjugacy,
    "diagnostic": check_diagnostic,
}


def run_suite(name, p, **kw):
    """Run one suite, or every suite for ``name == "all"``; returns ``[(suite, Check), ...]``."""
    names = SUITES if name == "all" else (name,)
    for n in names:
        if n not in _RUNNERS:
            raise ValueError(f"unknown suite {n!r}; choose from {SUITES + ('all',)}")
    return [(n, c) for n in names for c in _RUNNERS[n](p, **kw)]
