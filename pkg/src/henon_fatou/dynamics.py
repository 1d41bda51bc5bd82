"""Evaluation and iteration of the map ``F(z, w) = (exp(-z**m) + a*w, z)``.

The family is fixed by an integer exponent ``m >= 2`` and a real ``delta > 2``;
the linear coefficient is ``a = delta * exp(2*pi*i/m)``.

Two evaluation paths are provided. The scalar path (``eval_f``, ``apply_F``,
``iterate``...) works on Python complex numbers and records per-step status
flags. The array path (``f_array``, ``step_arrays``, ``iterate_arrays``) is a
numpy transcription of the same arithmetic used by batch estimators and the
renderer.

``z**m`` is computed by repeated squaring while ``m*ln|z| <= 700``; beyond
that it goes through :class:`LogComplex` so that ``Re(z**m)`` is never a
spurious ``inf``. ``exp(-z**m)`` is returned as an exact zero once
``Re(z**m) > 745`` (below every binary64 subnormal).
"""

from __future__ import annotations

import cmath
import enum
import math
import sys
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ParamError

LOG_DOMAIN_THRESHOLD = 700.0
UNDERFLOW_RE = 745.0
OVERFLOW_RE = -709.0
COORD_LIMIT = 1e300

_LOG_MAX = math.log(sys.float_info.max)
_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Params:
    """Parameters ``(m, delta)`` of one family member plus derived constants.

    Attributes
    ----------
    m : int
        Exponent in ``exp(-z**m)``, at least 2.
    delta : float
        Modulus of the Jacobian, strictly greater than 2.
    a : complex
        ``delta * exp(2*pi*i/m)`` (derived).
    big_delta : float
        ``sum_j delta**-j = 1/(delta - 1)``, the bound on both series
        corrections (derived, always < 1).
    """

    m: int
    delta: float
    a: complex = field(init=False, repr=False)
    big_delta: float = field(init=False, repr=False)

    def __post_init__(self):
        m, delta = self.m, self.delta
        if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 2:
            raise ParamError(f"m must be an integer >= 2, got {m!r}")
        try:
            delta = float(delta)
        except (TypeError, ValueError) as exc:
            raise ParamError(f"delta must be a real number, got {delta!r}") from exc
        if not (math.isfinite(delta) and delta > 2.0):
            raise ParamError(f"delta must be a finite real > 2, got {delta!r}")
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "a", cmath.rect(delta, _TWO_PI / m))
        object.__setattr__(self, "big_delta", 1.0 / (delta - 1.0))

    def a_pow(self, k):
        """``a**k`` for any integer ``k``; the phase is reduced mod ``2*pi`` exactly.

        Raises ``OverflowError`` when ``delta**k`` leaves binary64 range.
        """
        k = int(k)
        return cmath.rect(math.pow(self.delta, k), _TWO_PI * (k % self.m) / self.m)


class ComplexPair(NamedTuple):
    """A point ``(z, w)`` of C^2."""

    z: complex
    w: complex


class Step(enum.IntEnum):
    """Status of one application of ``F`` along an orbit."""

    OK = 0
    F_UNDERFLOW = 1
    OVERFLOW = 2


def _wrap_phase(x):
    r = math.remainder(x, _TWO_PI)
    return math.pi if r == -math.pi else r


class LogComplex(NamedTuple):
    """Nonzero complex number stored as ``(ln|v|, arg v)`` with arg in (-pi, pi]."""

    log_mag: float
    phase: float

    @classmethod
    def from_complex(cls, v):
        if v == 0:
            raise ValueError("LogComplex cannot represent 0")
        return cls(math.log(abs(v)), _wrap_phase(cmath.phase(v)))

    def __pow__(self, k):
        return LogComplex(k * self.log_mag, _wrap_phase(k * self.phase))

    def __mul__(self, other):
        return LogComplex(self.log_mag + other.log_mag, _wrap_phase(self.phase + other.phase))

    def _scaled(self, c):
        # sign(c) * exp(log_mag) * |c| without overflowing on the way
        if c == 0.0:
            return 0.0
        lg = self.log_mag + math.log(abs(c))
        if lg > _LOG_MAX:
            return math.copysign(math.inf, c)
        return math.copysign(math.exp(lg), c)

    @property
    def real(self):
        return self._scaled(math.cos(self.phase))

    @property
    def imag(self):
        return self._scaled(math.sin(self.phase))

    def to_complex(self):
        """Convert back; components may be infinite."""
        return complex(self.real, self.imag)


def _ipow(z, m):
    result = 1.0 + 0.0j
    base = z
    while m:
        if m & 1:
            result *= base
        m >>= 1
        if m:
            base *= base
    return result


def power_parts(z, m):
    """Return ``(Re(z**m), Im(z**m))`` with the log-domain guard.

    Components may be ``+-inf`` when the true value is outside binary64
    range; they are never NaN for finite ``z``.
    """
    if z == 0:
        return 0.0, 0.0
    if m * math.log(abs(z)) <= LOG_DOMAIN_THRESHOLD:
        zm = _ipow(z, m)
        return zm.real, zm.imag
    lc = LogComplex.from_complex(z) ** m
    return lc.real, lc.imag


def power_real(z, m):
    """``Re(z**m)``, overflow-safe."""
    return power_parts(z, m)[0]


def _f_with_flag(z, m):
    re, im = power_parts(z, m)
    if re > UNDERFLOW_RE:
        return 0j, True
    if re < OVERFLOW_RE:
        raise OverflowError(f"|exp(-z**m)| exceeds binary64 range (Re z**m = {re:.6g})")
    if not math.isfinite(im):
        raise OverflowError("phase of exp(-z**m) is not representable")
    mag = math.exp(-re)
    return complex(mag * math.cos(im), -mag * math.sin(im)), False


def eval_f(z, p):
    """``exp(-z**m)`` for the exponent of ``p``.

    Returns an exact ``0j`` when ``Re(z**m) > 745``. Raises ``OverflowError``
    when ``Re(z**m) < -709``.
    """
    return _f_with_flag(complex(z), p.m)[0]


def _step(z, w, p):
    f, under = _f_with_flag(z, p.m)
    z1 = f + p.a * w
    if not (cmath.isfinite(z1)):
        raise OverflowError("a*w overflowed")
    return z1, f, under


def apply_F(pt, p):
    """One forward step ``(z, w) -> (exp(-z**m) + a*w, z)``."""
    z, w = complex(pt[0]), complex(pt[1])
    z1, _, _ = _step(z, w, p)
    return ComplexPair(z1, z)


def apply_F_inverse(pt, p):
    """One backward step ``(Z, W) -> (W, (Z - exp(-W**m))/a)``."""
    Z, W = complex(pt[0]), complex(pt[1])
    return ComplexPair(W, (Z - eval_f(W, p)) / p.a)


@dataclass(frozen=True)
class Orbit:
    """A finite forward orbit.

    ``z[n], w[n]`` are the coordinates of ``F^n(P)``. ``f[n]`` and
    ``flags[n]`` describe the step from iterate ``n`` to ``n + 1``: for a
    complete orbit ``len(flags) == len(z) - 1``; an orbit truncated by
    overflow carries one extra trailing ``Step.OVERFLOW`` flag for the step
    that could not be taken.
    """

    params: Params
    z: np.ndarray
    w: np.ndarray
    f: np.ndarray
    flags: np.ndarray

    def __len__(self):
        return len(self.z)

    @property
    def points(self):
        return [ComplexPair(complex(z), complex(w)) for z, w in zip(self.z, self.w)]

    @property
    def overflowed(self):
        return len(self.flags) > 0 and self.flags[-1] == Step.OVERFLOW

    def __getitem__(self, n):
        return ComplexPair(complex(self.z[n]), complex(self.w[n]))


def iterate(pt, n_max, p):
    """Forward orbit ``P, F(P), ..., F^{n_max}(P)``.

    The orbit is cut short, with a trailing ``Step.OVERFLOW`` flag, as soon
    as a coordinate would exceed ``1e300`` in modulus or ``exp(-z**m)``
    overflows.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    z, w = complex(pt[0]), complex(pt[1])
    zs, ws, fs, flags = [z], [w], [], []
    for _ in range(n_max):
        try:
            z1, f, under = _step(z, w, p)
        except OverflowError:
            flags.append(Step.OVERFLOW)
            break
        if abs(z1) > COORD_LIMIT:
            flags.append(Step.OVERFLOW)
            break
        fs.append(f)
        flags.append(Step.F_UNDERFLOW if under else Step.OK)
        z, w = z1, z
        zs.append(z)
        ws.append(w)
    return Orbit(
        params=p,
        z=np.array(zs, dtype=complex),
        w=np.array(ws, dtype=complex),
        f=np.array(fs, dtype=complex),
        flags=np.array(flags, dtype=np.int8),
    )


def closed_form_iterate(pt, n, p):
    """``F^n(P)`` assembled from the explicit even/odd iterate formulas.

    With ``f_k = exp(-z_k**m)`` along the orbit and ``n = 2k``::

        F^{2k}   = (a^k (z0 + sum_{j<=k} a^-j f_{2j-1}), a^k (w0 + sum_{j<=k} a^-j f_{2j-2}))
        F^{2k+1} = (a^{k+1} (w0 + sum_{j<=k+1} a^-j f_{2j-2}), a^k (z0 + sum_{j<=k} a^-j f_{2j-1}))

    The ``f_k`` come from a fresh orbit, so this is an independent check of
    :func:`iterate` only up to the shared evaluation of ``f``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    z0, w0 = complex(pt[0]), complex(pt[1])
    if n == 0:
        return ComplexPair(z0, w0)
    orbit = iterate((z0, w0), n, p)
    if orbit.overflowed:
        raise OverflowError(f"orbit overflowed before step {n}")
    f = orbit.f
    k, odd = divmod(n, 2)
    s_odd = sum((p.a_pow(-j) * f[2 * j - 1] for j in range(1, k + 1)), 0j)
    s_even = sum((p.a_pow(-j) * f[2 * j - 2] for j in range(1, k + 1 + odd)), 0j)
    if odd:
        return ComplexPair(p.a_pow(k + 1) * (w0 + s_even), p.a_pow(k) * (z0 + s_odd))
    ak = p.a_pow(k)
    return ComplexPair(ak * (z0 + s_odd), ak * (w0 + s_even))


# --- array path -----------------------------------------------------------


def _ipow_array(z, m):
    result = np.ones_like(z)
    base = z.copy()
    while m:
        if m & 1:
            result = result * base
        m >>= 1
        if m:
            base = base * base
    return result


def _scaled_array(log_mag, c):
    with np.errstate(over="ignore", divide="ignore"):
        return np.sign(c) * np.exp(log_mag + np.log(np.abs(c)))


def power_parts_array(z, m):
    """Array version of :func:`power_parts`."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(all="ignore"):
        lm = m * np.log(np.abs(z))
        big = lm > LOG_DOMAIN_THRESHOLD
        zm = _ipow_array(z, m)
        if not big.any():
            return zm.real, zm.imag
        ph = m * np.angle(z)
        re = np.where(big, _scaled_array(lm, np.cos(ph)), zm.real)
        im = np.where(big, _scaled_array(lm, np.sin(ph)), zm.imag)
    return re, im


def f_array(z, m):
    """Array ``exp(-z**m)``.

    Returns ``(f, underflow, overflow)``; ``f`` is exactly 0 where
    ``underflow`` and NaN where ``overflow``.
    """
    re, im = power_parts_array(z, m)
    under = re > UNDERFLOW_RE
    over = ~under & ((re < OVERFLOW_RE) | ~np.isfinite(im) | np.isnan(re))
    live = ~(under | over)
    with np.errstate(all="ignore"):
        mag = np.exp(-np.where(live, re, 0.0))
        phase = np.where(live, im, 0.0)
        f = mag * np.cos(phase) - 1j * (mag * np.sin(phase))
    f = np.where(live, f, 0.0)
    f = np.where(over, np.nan, f)
    return f, under, over


def step_arrays(z, w, p):
    """Array ``F``: returns ``(z1, w1, underflow, overflow)``.

    ``overflow`` marks lanes where ``f`` overflowed or ``|z1| > 1e300``;
    their ``z1`` is NaN.
    """
    f, under, over = f_array(z, p.m)
    with np.errstate(all="ignore"):
        z1 = f + p.a * w
        over = over | ~(np.abs(z1) <= COORD_LIMIT)
    z1 = np.where(over, np.nan, z1)
    return z1, np.asarray(z, dtype=complex), under, over


def iterate_arrays(z0, w0, n, p):
    """Iterate many starting points at once.

    Returns ``(Z, W, under, over)`` where ``Z[k], W[k]`` hold ``F^k`` of every
    lane (shape ``(n + 1, N)``), and ``under[k], over[k]`` flag the step from
    ``k`` to ``k + 1`` (shape ``(n, N)``). Once a lane overflows every later
    coordinate is NaN and flagged as overflow.
    """
    z = np.array(z0, dtype=complex).ravel()
    w = np.array(w0, dtype=complex).ravel()
    Z = np.empty((n + 1, z.size), dtype=complex)
    W = np.empty_like(Z)
    under = np.zeros((n, z.size), dtype=bool)
    over = np.zeros((n, z.size), dtype=bool)
    Z[0], W[0] = z, w
    dead = ~(np.isfinite(z) & np.isfinite(w))
    for k in range(n):
        z1, w1, u, o = step_arrays(Z[k], W[k], p)
        dead = dead | o
        Z[k + 1] = np.where(dead, np.nan, z1)
        W[k + 1] = np.where(dead, np.nan, w1)
        under[k] = u & ~dead
        over[k] = dead
    return Z, W, under, over
