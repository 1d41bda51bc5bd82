"""Points of the Riemann sphere and the chordal metric.

A sphere value is a Python ``complex``; any value with an infinite component
stands for the point at infinity. The chordal distance is normalised so the
sphere has diameter 2.
"""

import cmath
import math

import numpy as np

INFINITY = complex(math.inf, 0.0)

# default tolerance for calling two sphere values equal
SPHERE_ATOL = 1e-9


def is_infinite(v):
    return cmath.isinf(v)


def ratio(num, den):
    """``num/den`` on the sphere: a nonzero over zero gives ``INFINITY``."""
    num, den = complex(num), complex(den)
    if is_infinite(num) or is_infinite(den):
        raise ValueError("ratio of non-finite values")
    if den == 0:
        if num == 0:
            raise ZeroDivisionError("0/0 has no value on the sphere")
        return INFINITY
    return num / den


def chordal_distance(u, v):
    """Chordal distance ``2|u - v| / sqrt((1 + |u|^2)(1 + |v|^2))``.

    Symmetric, bounded by 2, and zero only for equal points. Large
    arguments are handled through the isometry ``z -> 1/z`` so nothing
    overflows.
    """
    u, v = complex(u), complex(v)
    u_inf, v_inf = is_infinite(u), is_infinite(v)
    if u_inf and v_inf:
        return 0.0
    if u_inf or v_inf:
        x = abs(v if u_inf else u)
        return 2.0 / math.hypot(1.0, x)
    if abs(u) > 1.0 and abs(v) > 1.0:
        u, v = 1.0 / u, 1.0 / v
    return 2.0 * abs(u - v) / (math.hypot(1.0, abs(u)) * math.hypot(1.0, abs(v)))


def chordal_distance_array(u, v):
    """Vectorised :func:`chordal_distance` for finite or infinite entries."""
    u, v = np.broadcast_arrays(np.asarray(u, dtype=complex), np.asarray(v, dtype=complex))
    u_inf, v_inf = np.isinf(u), np.isinf(v)
    with np.errstate(all="ignore"):
        flip = (np.abs(u) > 1.0) & (np.abs(v) > 1.0) & ~u_inf & ~v_inf
        uu = np.where(flip, 1.0 / u, u)
        vv = np.where(flip, 1.0 / v, v)
        d = 2.0 * np.abs(uu - vv) / (np.hypot(1.0, np.abs(uu)) * np.hypot(1.0, np.abs(vv)))
        d = np.where(u_inf & ~v_inf, 2.0 / np.hypot(1.0, np.abs(v)), d)
        d = np.where(v_inf & ~u_inf, 2.0 / np.hypot(1.0, np.abs(u)), d)
    return np.where(u_inf & v_inf, 0.0, d)
