"""Membership tests and seeded samplers for the sets built around the dynamics.

Sectors ``S_k`` are the open cones of half-angle ``pi/(2m)`` around the
directions ``exp(2*pi*i*k/m)``. Every set here is open, so all comparisons
are strict and boundary points are non-members.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass

import numpy as np

from .cycles import SectorPair, gamma_power
from .dynamics import ComplexPair, iterate, power_parts_array, power_real
from .errors import ParamError
from .sphere import is_infinite

_TWO_PI = 2.0 * math.pi


@functools.lru_cache(maxsize=None)
def _rotations(m):
    # rotations[k] = exp(-2*pi*i*k/m) carries sector k onto sector 0
    return tuple(cmath.rect(1.0, -_TWO_PI * k / m) for k in range(m))


def sector_half_tan(m):
    """``tan(pi/(2m))``: the slope bound defining every sector."""
    return math.tan(math.pi / (2 * m))


def rotate_to_sector0(z, k, m):
    """``z * exp(-2*pi*i*k/m)``: coordinates of ``z`` relative to the bisector of ``S_k``."""
    return complex(z) * _rotations(m)[k % m]


def sector_index(z, m):
    """The ``k`` with ``z`` in ``S_k``, or ``None``."""
    z = complex(z)
    if z == 0 or not cmath.isfinite(z):
        return None
    k = round(cmath.phase(z) * m / _TWO_PI) % m
    r = z * _rotations(m)[k]
    return k if abs(r.imag) < sector_half_tan(m) * r.real else None


def sector_index_array(z, m):
    """Vectorised :func:`sector_index`; ``-1`` marks points outside ``S``."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(invalid="ignore"):
        k = np.mod(np.rint(np.angle(z) * m / _TWO_PI).astype(np.int64), m)
        r = z * np.asarray(_rotations(m))[k]
        inside = np.abs(r.imag) < sector_half_tan(m) * r.real
    inside &= np.isfinite(z)
    return np.where(inside, k, -1)


def sector_pair(pt, m):
    """Componentwise sector indices as a :class:`SectorPair`, or ``None``."""
    a = sector_index(pt[0], m)
    if a is None:
        return None
    b = sector_index(pt[1], m)
    if b is None:
        return None
    return SectorPair(a, b)


def in_W(z, k, sigma, R, m):
    """Membership in the narrowed, truncated sector ``(W_{sigma,R})_k``.

    After rotating ``S_k`` onto ``S_0``: ``|Im| < sigma*Re`` and ``Re > R``.
    """
    if not 0.0 < sigma < sector_half_tan(m):
        raise ParamError(f"sigma must lie in (0, tan(pi/2m)), got {sigma}")
    r = rotate_to_sector0(z, k, m)
    return abs(r.imag) < sigma * r.real and r.real > R


def default_r0(m, delta):
    """Base radius for the invariant schedule.

    ``1.1 * max(2, sup_n (2/delta)^((n+1)/2) (n+2)(n+3) / tan(pi/2m))``.
    The bound makes the step from ``W_n`` to ``W_{n+1}`` keep the slope
    below ``sigma_{n+1}``; the supremum is attained at
    ``n ~ 4/ln(delta/2)``.
    """
    c = math.log(delta / 2.0)
    n = np.arange(0, int(8.0 / c) + 16, dtype=float)
    log_terms = -(n + 1) / 2 * c + np.log(n + 2) + np.log(n + 3)
    sup = math.exp(float(log_terms.max())) / sector_half_tan(m)
    return 1.1 * max(2.0, sup)


@dataclass(frozen=True)
class WSchedule:
    """Slopes ``sigma_n = (n+1)/(n+2) tan(pi/2m)`` and radii ``R_n = (delta/2)^(n/2) R0``."""

    m: int
    delta: float
    R0: float

    @classmethod
    def from_params(cls, p, R0=None):
        return cls(p.m, p.delta, default_r0(p.m, p.delta) if R0 is None else float(R0))

    def sigma(self, n):
        return (n + 1) / (n + 2) * sector_half_tan(self.m)

    def radius(self, n):
        """``R_n``; ``R_{-1}`` is taken as ``R0``."""
        if n < 0:
            return self.R0
        return (self.delta / 2.0) ** (n / 2.0) * self.R0


def mu_schedule(n, b, m):
    """Sector pair visited at step ``n`` by the cycle through ``(0, b)``."""
    if not 0 <= b < m:
        raise ValueError(f"b must lie in [0, {m}), got {b}")
    return gamma_power((0, b), n, m)


def in_W_n(pt, n, b, sched, m=None):
    """Membership in ``W_n``: first factor radius ``R_n``, second ``R_{n-1}``, pair ``mu(n)``."""
    m = sched.m if m is None else m
    pair = mu_schedule(n, b, m)
    sigma = sched.sigma(n)
    return in_W(pt[0], pair.a, sigma, sched.radius(n), m) and in_W(
        pt[1], pair.b, sigma, sched.radius(n - 1), m
    )


def in_I(z, C, m):
    """``Re(z**m) > C**m`` with the overflow-safe power."""
    return power_real(complex(z), m) > C**m


def in_I_array(z, C, m):
    re, _ = power_parts_array(z, m)
    with np.errstate(invalid="ignore"):
        return re > C**m


def absorbed_horizon(pt, C, N, p):
    """``F^n(pt)`` lies in ``I(C) x I(C)`` for every ``0 <= n <= N``.

    A finite-horizon stand-in for membership in the absorbing set. An orbit
    that overflows within the horizon fails.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    orbit = iterate(pt, N, p)
    if orbit.overflowed or len(orbit) < N + 1:
        return False
    return all(in_I(z, C, p.m) and in_I(w, C, p.m) for z, w in zip(orbit.z, orbit.w))


def _open_unit(rng, size):
    # uniform on (0, 1]
    return 1.0 - rng.random(size)


def sample_A(pair, M, count, rng_seed, m):
    """Seeded points on the bisector rays of ``S_a x S_b`` with radii in ``(M, 4M]``."""
    if M <= 0 or count < 1:
        raise ValueError("need M > 0 and count >= 1")
    a, b = pair
    rng = np.random.default_rng(rng_seed)
    r = M * (1.0 + 3.0 * _open_unit(rng, (count, 2)))
    ua = _rotations(m)[a % m].conjugate()
    ub = _rotations(m)[b % m].conjugate()
    return [ComplexPair(float(r1) * ua, float(r2) * ub) for r1, r2 in r]


def _sector_points(k, sigma, R, spread, rng, count, m, edge):
    t = _open_unit(rng, count)
    s = 2.0 * _open_unit(rng, count) - 1.0
    if edge:
        # push mass toward the radius floor and the slope boundary
        t = t**6
        s = np.sign(s) * (1.0 - (1.0 - np.abs(s)) ** 6)
    x = R * (1.0 + spread * t)
    y = sigma * x * s
    return (x + 1j * y) * _rotations(m)[k % m].conjugate()


def sample_W_n(n, b, sched, count, rng_seed, spread=3.0, edge=False):
    """Seeded points of ``W_n`` for the cycle through ``(0, b)``.

    Draws are rejected until ``count`` points pass :func:`in_W_n`, so every
    returned point is a member after rounding.
    """
    m = sched.m
    pair = mu_schedule(n, b, m)
    sigma = sched.sigma(n)
    rng = np.random.default_rng(rng_seed)
    out = []
    while len(out) < count:
        need = count - len(out)
        z = _sector_points(pair.a, sigma, sched.radius(n), spread, rng, need, m, edge)
        w = _sector_points(pair.b, sigma, sched.radius(n - 1), spread, rng, need, m, edge)
        out.extend(
            ComplexPair(complex(zz), complex(ww))
            for zz, ww in zip(z, w)
            if in_W_n((zz, ww), n, b, sched)
        )
    return out[:count]


def sample_S(count, rng_seed, m, r_min=1.0, r_max=50.0, fill=0.999):
    """Seeded points of ``S``: random sectors, angles within ``fill`` of the half-width,
    log-uniform radii in ``[r_min, r_max]``."""
    rng = np.random.default_rng(rng_seed)
    half = fill * math.pi / (2 * m)
    k = rng.integers(0, m, size=(count, 2))
    theta = rng.uniform(-half, half, size=(count, 2)) + _TWO_PI * k / m
    r = np.exp(rng.uniform(math.log(r_min), math.log(r_max), size=(count, 2)))
    pts = r * np.exp(1j * theta)
    return [ComplexPair(complex(z), complex(w)) for z, w in pts]


def slice_index(v, m):
    """The ``j`` with ``arg v`` in the open arc ``U_j`` centred at ``2*pi*j/m``.

    ``0``, ``inf`` and arc endpoints return ``None``.
    """
    v = complex(v)
    if v == 0 or is_infinite(v) or not cmath.isfinite(v):
        return None
    theta = cmath.phase(v)
    j = round(theta * m / _TWO_PI) % m
    d = math.remainder(theta - _TWO_PI * j / m, _TWO_PI)
    return j if abs(d) < math.pi / m else None


def slice_index_array(v, m):
    """Vectorised :func:`slice_index`; ``-1`` where undefined."""
    v = np.asarray(v, dtype=complex)
    theta = np.angle(v)
    j = np.mod(np.rint(theta * m / _TWO_PI).astype(np.int64), m)
    d = np.remainder(theta - _TWO_PI * j / m + math.pi, _TWO_PI) - math.pi
    ok = (np.abs(d) < math.pi / m) & np.isfinite(v) & (v != 0)
    return np.where(ok, j, -1)
