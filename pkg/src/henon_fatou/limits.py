"""Limit functions, the linearising conjugacy and related diagnostics.

For an orbit that stays in ``S`` the corrections

    delta1 = sum_{j>=1} a^-j f(z_{2j-1}),   delta2 = sum_{j>=1} a^-j f(z_{2j-2})

converge geometrically (``|f| < 1`` on ``S``), and

    h1 = lim z_{2n}/w_{2n} = (z0 + delta1)/(w0 + delta2),   h2 = a/h1,
    phi(z, w) = (z + delta1, w + delta2)   with   phi o F = L o phi,

where ``L(z, w) = (a w, z)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dynamics import ComplexPair, f_array, iterate, iterate_arrays, power_real
from .errors import DisagreementError, OrbitLeftS
from .sets import (
    WSchedule,
    _rotations,
    mu_schedule,
    sector_index,
    sector_index_array,
)
from .sphere import INFINITY, chordal_distance, chordal_distance_array, is_infinite, ratio

DEFAULT_TOL = 1e-16
# binary64 rounding accumulated over ~2*terms multiplications by ``a``
# puts the ratio route a few 1e-15 away from the closed form
RATIO_AGREEMENT_FLOOR = 1e-12
SATURATION = 1e300


def series_terms(delta, tol=DEFAULT_TOL):
    """Number of series terms ``ceil(ln(1/tol)/ln(delta))`` so that ``delta**-J <= tol``."""
    if not 0.0 < tol < 1.0:
        raise ValueError("tol must lie in (0, 1)")
    return max(1, math.ceil(math.log(1.0 / tol) / math.log(delta)))


def _series_orbit(pt, p, terms):
    # iterates 0..2*terms+1, all required to lie in S
    # an overflow needs Re(z**m) < 0, so the S test reports it first
    orbit = iterate(pt, 2 * terms + 1, p)
    m = p.m
    if sector_index(orbit.w[0], m) is None:
        raise OrbitLeftS(0)
    for k, z in enumerate(orbit.z):
        if sector_index(z, m) is None:
            raise OrbitLeftS(k)
    if orbit.overflowed:
        raise OverflowError("orbit overflowed inside the series horizon")
    return orbit


def _sums(f, p, terms):
    d1 = d2 = 0j
    for j in range(1, terms + 1):
        c = p.a_pow(-j)
        d1 += c * f[2 * j - 1]
        d2 += c * f[2 * j - 2]
    return complex(d1), complex(d2)


def delta_series(pt, p, tol=DEFAULT_TOL):
    """Return ``(delta1, delta2, terms)``.

    Raises :class:`OrbitLeftS` when an iterate inside the truncation horizon
    is outside ``S``.
    """
    terms = series_terms(p.delta, tol)
    orbit = _series_orbit(pt, p, terms)
    d1, d2 = _sums(orbit.f, p, terms)
    return d1, d2, terms


@dataclass(frozen=True)
class LimitEstimate:
    """Closed-form limits ``h1``, ``h2`` at one point.

    ``residual`` is the modulus of the last series term kept; ``ratio_gap``
    is the chordal distance between the closed form and the iterate ratios
    at the end of the horizon.
    """

    h1: complex
    h2: complex
    delta1: complex
    delta2: complex
    terms_used: int
    residual: float
    ratio_gap: float


def _a_over(h, a):
    if is_infinite(h):
        return 0j
    if h == 0:
        return INFINITY
    return a / h


def estimate_h(pt, p, tol=DEFAULT_TOL):
    """Closed-form ``h1 = (z0 + delta1)/(w0 + delta2)`` and ``h2 = a/h1``.

    Cross-checked against ``z_{2J}/w_{2J}`` and ``z_{2J+1}/w_{2J+1}``;
    raises :class:`DisagreementError` when the two routes are further apart
    than ``max(100*tol, 1e-12)`` in the chordal metric.
    """
    z0, w0 = complex(pt[0]), complex(pt[1])
    terms = series_terms(p.delta, tol)
    orbit = _series_orbit((z0, w0), p, terms)
    f = orbit.f
    d1, d2 = _sums(f, p, terms)
    h1 = ratio(z0 + d1, w0 + d2)
    h2 = _a_over(h1, p.a)
    n = 2 * terms
    gap = max(
        chordal_distance(h1, ratio(orbit.z[n], orbit.w[n])),
        chordal_distance(h2, ratio(orbit.z[n + 1], orbit.w[n + 1])),
    )
    if gap > max(100.0 * tol, RATIO_AGREEMENT_FLOOR):
        raise DisagreementError(f"closed form and iterate ratio differ by {gap:.3g}")
    last = abs(p.a_pow(-terms)) * max(abs(f[2 * terms - 1]), abs(f[2 * terms - 2]))
    return LimitEstimate(h1, h2, d1, d2, terms, float(last), float(gap))


def ratio_sequence(pt, p, n_max, parity=0):
    """``z_k/w_k`` for ``k = parity, parity + 2, ...`` up to ``k <= n_max``."""
    orbit = iterate(pt, n_max, p)
    return [ratio(z, w) for z, w in zip(orbit.z[parity::2], orbit.w[parity::2])]


def linear_model(pt, n, p, direction="forward"):
    """``L^n`` or ``L^-n`` in closed form, ``L(z, w) = (a w, z)``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    z, w = complex(pt[0]), complex(pt[1])
    k, odd = divmod(n, 2)
    if direction == "forward":
        if odd:
            return ComplexPair(p.a_pow(k + 1) * w, p.a_pow(k) * z)
        return ComplexPair(p.a_pow(k) * z, p.a_pow(k) * w)
    if direction == "backward":
        if odd:
            return ComplexPair(w / p.a_pow(k), z / p.a_pow(k + 1))
        return ComplexPair(z / p.a_pow(k), w / p.a_pow(k))
    raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")


def conjugacy_phi(pt, p, tol=DEFAULT_TOL):
    """``phi(z, w) = (z + delta1, w + delta2)``."""
    d1, d2, _ = delta_series(pt, p, tol)
    return ComplexPair(complex(pt[0]) + d1, complex(pt[1]) + d2)


class HarmonicValue(NamedTuple):
    value: float
    saturated: bool


def harmonic_diagnostic(pt, n, p):
    """``u_n = -Re(z_n**m)/n``, clamped to ``+-1e300``.

    If the orbit overflows before step ``n`` the value saturates with the
    sign of ``-Re(z**m)`` at the last representable iterate.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    orbit = iterate(pt, n, p)
    re = power_real(complex(orbit.z[-1]), p.m)
    if len(orbit) < n + 1:
        return HarmonicValue(-math.copysign(SATURATION, re), True)
    u = -re / n
    if not abs(u) <= SATURATION:
        return HarmonicValue(-math.copysign(SATURATION, re), True)
    return HarmonicValue(u, False)


def chebyshev_T(m, x):
    """Chebyshev polynomial of the first kind by ``T_{k+1} = 2x T_k - T_{k-1}``."""
    if m < 0:
        raise ValueError("degree must be >= 0")
    t_prev, t = np.ones_like(x, dtype=float), np.asarray(x, dtype=float)
    if m == 0:
        return t_prev if np.ndim(x) else float(t_prev)
    for _ in range(m - 1):
        t_prev, t = t, 2.0 * x * t - t_prev
    return t if np.ndim(x) else float(t)


def _first_visit(pair, m):
    # smallest n and representative b with mu(n, b) == pair
    for n in range(2 * m):
        for b in range(m):
            if mu_schedule(n, b, m) == tuple(pair):
                return n, b
    raise ValueError(f"pair {pair} not reachable")


def rank_probe(pair, p, samples, seed, which="h1", ratio_span=1.0, tol=DEFAULT_TOL):
    """Largest pairwise chordal distance between values of ``h1`` (or ``h2``)
    over a seeded family of points of ``W`` in sectors ``pair``.

    The family varies ``z/w`` in both argument and modulus; ``ratio_span``
    scales that variation (``0`` gives a degenerate family sharing one
    ratio). A positive spread certifies that the limit map is not constant.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    m = p.m
    sched = WSchedule.from_params(p)
    n, _ = _first_visit(pair, m)
    sigma = sched.sigma(n)
    rng = np.random.default_rng(seed)
    theta_max = 0.9 * math.atan(sigma) * ratio_span
    theta = rng.uniform(-1.0, 1.0, samples) * theta_max
    rho = 1.0 + ratio_span * rng.random(samples)
    X = 4.0 * max(sched.radius(n), sched.radius(n - 1))
    ua = _rotations(m)[pair[0] % m].conjugate()
    ub = _rotations(m)[pair[1] % m].conjugate()
    values = []
    for th, r in zip(theta, rho):
        pt = (X * r * complex(math.cos(th), math.sin(th)) * ua, X * ub)
        est = estimate_h(pt, p, tol)
        values.append(est.h1 if which == "h1" else est.h2)
    return max(chordal_distance(u, v) for u, v in itertools.combinations(values, 2))


# --- array path -----------------------------------------------------------


class LimitArrays(NamedTuple):
    """Batch limits. ``in_S`` marks lanes whose orbit stayed in ``S`` over the
    horizon; other lanes hold NaN."""

    h1: np.ndarray
    h2: np.ndarray
    delta1: np.ndarray
    delta2: np.ndarray
    in_S: np.ndarray
    Z: np.ndarray
    W: np.ndarray


def limit_arrays(z0, w0, p, tol=DEFAULT_TOL, min_steps=0):
    """Vectorised :func:`estimate_h` without the cross-check.

    ``Z, W`` hold the orbit to ``max(2*terms + 1, min_steps)``.
    """
    terms = series_terms(p.delta, tol)
    n = max(2 * terms + 1, min_steps)
    Z, W, _, over = iterate_arrays(z0, w0, n, p)
    m = p.m
    in_S = (sector_index_array(W[0], m) >= 0) & ~over.any(axis=0)
    in_S &= (sector_index_array(Z[: 2 * terms + 2], m) >= 0).all(axis=0)

    f, _, _ = f_array(Z[: 2 * terms], m)
    d1 = np.zeros(Z.shape[1], dtype=complex)
    d2 = np.zeros_like(d1)
    for j in range(1, terms + 1):
        c = p.a_pow(-j)
        d1 += c * f[2 * j - 1]
        d2 += c * f[2 * j - 2]
    with np.errstate(all="ignore"):
        h1 = (Z[0] + d1) / (W[0] + d2)
        h2 = p.a / h1
    nan = complex(np.nan, np.nan)
    return LimitArrays(
        np.where(in_S, h1, nan),
        np.where(in_S, h2, nan),
        np.where(in_S, d1, nan),
        np.where(in_S, d2, nan),
        in_S,
        Z,
        W,
    )


def ratio_gap_arrays(lim, n):
    """Chordal distance from ``z_{2n}/w_{2n}`` to ``h1`` for every lane of ``lim``."""
    with np.errstate(all="ignore"):
        r = lim.Z[2 * n] / lim.W[2 * n]
    return chordal_distance_array(r, lim.h1)
