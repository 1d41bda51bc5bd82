import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from henon_fatou.dynamics import (
    LogComplex,
    Params,
    Step,
    apply_F,
    apply_F_inverse,
    closed_form_iterate,
    eval_f,
    f_array,
    iterate,
    iterate_arrays,
    power_parts,
)
from henon_fatou.errors import ParamError
from henon_fatou.sets import sample_A, sample_S, sector_index

mpmath.mp.dps = 40

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
small_complex = st.builds(complex, finite, finite)
ms = st.integers(2, 8)
deltas = st.floats(2.05, 6.0)


def mp_f(z, m):
    return complex(mpmath.exp(-mpmath.mpc(z) ** m))


def rel_close(u, v, tol):
    return abs(u - v) <= tol * max(abs(u), abs(v), 1e-300)


# --- Params -------------------------------------------------------------------


@pytest.mark.parametrize("m, delta", [(1, 3.0), (0, 3.0), (3, 2.0), (3, 1.5), (3, math.nan), (3, math.inf), (True, 3.0), (2.5, 3.0)])
def test_params_rejects_invalid(m, delta):
    with pytest.raises(ParamError):
        Params(m, delta)


@given(ms, deltas)
def test_params_derived(m, delta):
    p = Params(m, delta)
    assert abs(abs(p.a) - delta) <= 4 * math.ulp(delta)
    assert cmath.phase(p.a) == pytest.approx(math.remainder(2 * math.pi / m, 2 * math.pi))
    assert p.big_delta == pytest.approx(1 / (delta - 1)) and p.big_delta < 1


@given(ms, deltas, st.integers(-30, 30))
def test_a_pow_matches_repeated_product(m, delta, k):
    p = Params(m, delta)
    ref = p.a ** k
    assert abs(p.a_pow(k) - ref) <= 1e-12 * abs(ref)


# --- f ------------------------------------------------------------------------


def test_f_at_origin(p33):
    assert eval_f(0, p33) == 1


def test_f_underflows_to_exact_zero():
    # z**2 = 800 exactly on the real axis
    p = Params(2, 3.0)
    z = math.sqrt(800.0)
    assert power_parts(z, 2)[0] > 745
    assert eval_f(z, p) == 0j


def test_f_overflow_raises(p23):
    with pytest.raises(OverflowError):
        eval_f(30j, p23)


def test_f_frozen_value(p23):
    # z**2 = 2i, so exp(-2i); digits from a 40-digit evaluation
    v = eval_f(1 + 1j, p23)
    assert v.real == pytest.approx(-0.41614683654714238700, rel=1e-14)
    assert v.imag == pytest.approx(-0.90929742682568169540, rel=1e-14)


@given(small_complex, ms)
def test_f_matches_high_precision(z, m):
    re = power_parts(z, m)[0]
    assume(-700 < re < 700 and abs(z) ** m < 1e6)
    p = Params(m, 3.0)
    ref = mp_f(z, m)
    # the phase Im(z**m) carries |z|**m * eps absolute error
    tol = 1e-13 * max(1.0, abs(z) ** m)
    assert abs(eval_f(z, p) - ref) <= tol * abs(ref) + 1e-300


@given(st.floats(50, 1e200), st.floats(-math.pi, math.pi), ms)
def test_log_domain_power_matches_high_precision(r, theta, m):
    z = cmath.rect(r, theta)
    assume(math.isfinite(z.real) and math.isfinite(z.imag) and z != 0)
    ref = mpmath.mpc(z) ** m
    re, im = power_parts(z, m)
    for got, want in ((re, ref.real), (im, ref.imag)):
        if abs(want) > 1e307:
            assert math.isinf(got) or abs(got) > 1e300
            assert math.copysign(1, got) == mpmath.sign(want) or want == 0
        elif abs(want) > 1e-300 * abs(ref):
            # the phase m*arg z is known to m*|arg z|*eps absolute
            assert abs(got - float(want)) <= 1e-12 * float(abs(ref)) * m


def test_logcomplex_roundtrip_and_power():
    v = 3 - 4j
    lc = LogComplex.from_complex(v)
    assert lc.to_complex() == pytest.approx(v, rel=1e-15)
    assert (lc**3).to_complex() == pytest.approx(v**3, rel=1e-14)
    assert (lc * lc).to_complex() == pytest.approx(v * v, rel=1e-14)
    assert -math.pi < (lc**7).phase <= math.pi
    with pytest.raises(ValueError):
        LogComplex.from_complex(0)


def test_lemma_f_bounded_by_one_on_S():
    for m in (2, 3, 5, 8):
        p = Params(m, 3.0)
        for z, w in sample_S(500, m, m, r_min=0.1, r_max=100):
            assert abs(eval_f(z, p)) < 1
            assert abs(eval_f(w, p)) < 1


def test_f_array_matches_scalar():
    rng = np.random.default_rng(0)
    z = rng.normal(size=400) * 3 + 1j * rng.normal(size=400) * 3
    for m in (2, 3, 5):
        p = Params(m, 3.0)
        f, under, over = f_array(z, m)
        for k in range(z.size):
            try:
                ref = eval_f(z[k], p)
            except OverflowError:
                assert over[k]
                continue
            assert not over[k]
            assert under[k] == (ref == 0 and power_parts(z[k], m)[0] > 745)
            tol = 1e-13 * max(1.0, abs(z[k]) ** m)
            assert abs(f[k] - ref) <= tol * max(abs(ref), 1e-300)


# --- F and its inverse ----------------------------------------------------------


def test_apply_F_origin(p53):
    assert apply_F((0, 0), p53) == (1, 0)


def test_apply_F_frozen_value(p23):
    # exp(-100) ~ 3.7e-44 is far below one ulp of 30
    z1, w1 = apply_F((10, 10), p23)
    assert z1.real == -30.0
    assert abs(z1.imag) < 1e-14
    assert w1 == 10


def test_apply_F_in_underflow_is_linear(p33):
    z, w = 20.0 + 0j, 5 - 2j
    assert apply_F((z, w), p33) == (p33.a * w, z)


def test_inverse_examples():
    p = Params(3, 2.5)
    assert apply_F_inverse((1, 0), p) == pytest.approx((0, 0), abs=1e-15)
    pt = (2 + 1j, 3 - 2j)
    back = apply_F_inverse(apply_F(pt, p), p)
    assert abs(back[0] - pt[0]) < 1e-12 and abs(back[1] - pt[1]) < 1e-12
    # far in the underflow regime F^-1 is the inverse linear map
    z, w = 4 + 1j, 40.0 + 0j
    assert apply_F_inverse((p.a * w, z), p) == pytest.approx((z, w), rel=1e-15)


@given(small_complex, small_complex, ms, deltas)
def test_roundtrip(z, w, m, delta):
    p = Params(m, delta)
    # cancellation in Z - f(W) costs |f| * eps, so keep f moderate
    assume(power_parts(z, m)[0] > -5)
    pt = (z, w)
    back = apply_F_inverse(apply_F(pt, p), p)
    norm = math.hypot(abs(z), abs(w))
    assert math.hypot(abs(back[0] - z), abs(back[1] - w)) < 1e-12 * (1 + norm)


# --- orbits -----------------------------------------------------------------


def test_iterate_origin():
    for m, delta in ((2, 3.0), (5, 2.5)):
        orbit = iterate((0, 0), 2, Params(m, delta))
        assert orbit.points == [(0, 0), (1, 0), (math.exp(-1), 1)]
        assert list(orbit.flags) == [Step.OK, Step.OK]


def test_iterate_growth_rate(p23):
    # z_50 = a^25 (z0 + delta1_partial) with |delta1| < 1/2
    orbit = iterate((5, 5), 50, p23)
    scaled = abs(orbit.z[50]) / 3.0**25
    assert 0.95 * 4.5 < scaled < 1.05 * 5.5


def test_iterate_replays_gamma_schedule():
    p = Params(6, 3.0)
    (pt,) = sample_A((0, 0), 400.0, 1, 0, 6)
    orbit = iterate(pt, 12, p)
    assert (sector_index(orbit.z[12], 6), sector_index(orbit.w[12], 6)) == (0, 0)


@given(small_complex, small_complex, st.integers(0, 30))
def test_shift_property_bit_equal(z, w, n):
    orbit = iterate((z, w), n, Params(3, 3.0))
    assert np.array_equal(orbit.w[1:], orbit.z[:-1])


def test_underflow_consistency(p33):
    (pt,) = sample_A((1, 2), 50.0, 1, 3, 3)
    orbit = iterate(pt, 20, p33)
    assert (orbit.flags == Step.F_UNDERFLOW).all()
    for n in range(20):
        assert orbit.z[n + 1] - p33.a * orbit.w[n] == 0


def test_overflow_truncates(p23):
    orbit = iterate((30j, 0), 5, p23)
    assert orbit.overflowed and len(orbit) == 1
    assert list(orbit.flags) == [Step.OVERFLOW]


def test_coordinate_guard():
    p = Params(2, 5.0)
    orbit = iterate((1e299, 1e299), 10, p)
    assert orbit.overflowed
    assert np.all(np.abs(orbit.z) <= 1e300)


def test_closed_form_small_cases(p33):
    pt = (1.5 + 2j, -3 + 0.5j)
    assert closed_form_iterate(pt, 0, p33) == pt
    assert closed_form_iterate((0, 0), 1, p33) == pytest.approx((1, 0))


def test_closed_form_on_ray(p33):
    (pt,) = sample_A((0, 1), 5.0, 1, 11, 3)
    want = iterate(pt, 6, p33)[6]
    got = closed_form_iterate(pt, 6, p33)
    assert rel_close(got[0], want[0], 1e-10) and rel_close(got[1], want[1], 1e-10)


def _stays_in_S(pt, n, p):
    orbit = iterate(pt, n, p)
    return len(orbit) == n + 1 and all(sector_index(z, p.m) is not None for z in orbit.z)


@given(st.integers(0, 10_000), st.integers(0, 40), ms)
def test_closed_form_matches_iterate(seed, n, m):
    p = Params(m, 3.0)
    (pt,) = sample_S(1, seed, m, r_min=1.0, r_max=20.0)
    assume(sector_index(pt[1], m) is not None and _stays_in_S(pt, n, p))
    got = closed_form_iterate(pt, n, p)
    want = iterate(pt, n, p)[n]
    assert rel_close(got[0], want[0], 1e-9) and rel_close(got[1], want[1], 1e-9)


def test_iterate_arrays_matches_scalar():
    p = Params(4, 2.5)
    pts = sample_S(200, 7, 4, r_min=0.5, r_max=30)
    z0 = np.array([q[0] for q in pts])
    w0 = np.array([q[1] for q in pts])
    Z, W, under, over = iterate_arrays(z0, w0, 30, p)
    for k, pt in enumerate(pts):
        orbit = iterate(pt, 30, p)
        if orbit.overflowed:
            assert over[:, k].any()
            continue
        assert not over[:, k].any()
        assert np.allclose(Z[:, k], orbit.z, rtol=1e-12, atol=0)
        assert np.array_equal(W[1:, k], Z[:-1, k])
