import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from c_errors import DomainError, NotHyperbolic
from GEOM.hyperbolic import (
    ScaledIsometry, collar_crossing_length, collar_params, collar_plus_linear, collar_width, compose,
    compose_word, hp_acosh, hp_word_trace, intersection_ceiling_for_length, length_floor_from_intersections,
    min_collar_plus_linear, minimal_filling_closed_form, numeric_min_collar_plus_linear, trace_to_length,
    winding_difference_bound, winding_length,
)

positive = st.floats(min_value=1e-3, max_value=15.0, allow_nan=False, allow_infinity=False)


def test_collar_width_known_values():
    assert collar_width(1.0) == pytest.approx(math.asinh(1.0 / math.sinh(1.0)), rel=1e-14)
    assert collar_params(2.0).width == pytest.approx(collar_width(1.0), rel=1e-14)


def test_collar_width_large_argument_no_overflow():
    assert 0.0 <= collar_width(800.0) < 1e-300
    assert collar_width(30.0) == pytest.approx(2.0 * math.exp(-30.0), rel=1e-10)


@pytest.mark.parametrize("x", [0.0, -1.0, math.nan, math.inf])
def test_collar_width_rejects_bad_input(x):
    with pytest.raises(DomainError):
        collar_width(x)


@given(positive, positive)
@settings(max_examples=200, deadline=None)
def test_collar_width_decreasing(x, y):
    lo, hi = min(x, y), max(x, y)
    if hi - lo > 1e-9:
        assert collar_width(lo) >= collar_width(hi)


def test_winding_length_m0_is_collar_crossing():
    x = 0.7
    assert winding_length(0, x) == pytest.approx(2.0 * collar_width(x / 2.0), rel=1e-13)


def test_winding_length_matches_mpmath():
    for m, x in [(1, 0.5), (3, 0.2), (20, 0.05), (5, 2.0)]:
        with mpmath.workdps(40):
            ref = 2 * mpmath.acosh(mpmath.coth(mpmath.mpf(x) / 2) * mpmath.cosh(m * mpmath.mpf(x) / 2))
        assert winding_length(m, x) == pytest.approx(float(ref), rel=1e-12)


def test_winding_length_log_branch_for_huge_arguments():
    # m x / 2 = 2000: прямая формула переполняется
    value = winding_length(4000, 1.0)
    assert math.isfinite(value)
    with mpmath.workdps(60):
        ref = 2 * mpmath.acosh(mpmath.coth(mpmath.mpf(0.5)) * mpmath.cosh(mpmath.mpf(2000)))
    assert value == pytest.approx(float(ref), rel=1e-12)


@pytest.mark.parametrize("m", [-1, 1.5])
def test_winding_length_rejects_bad_m(m):
    with pytest.raises(DomainError):
        winding_length(m, 1.0)


@given(st.integers(min_value=0, max_value=60), st.integers(min_value=0, max_value=10),
       st.floats(min_value=1e-3, max_value=1.0), st.floats(min_value=0.0, max_value=1.0))
@settings(max_examples=300, deadline=None)
def test_winding_difference_bound_holds(m, s, x_max, frac):
    x = max(x_max * frac, 1e-4)
    diff = winding_length(m + s, x) - winding_length(m, x)
    assert diff <= winding_difference_bound(m, s, x_max) + 1e-9


@given(st.integers(min_value=0, max_value=40), st.floats(min_value=1e-3, max_value=5.0))
@settings(max_examples=200, deadline=None)
def test_winding_length_increasing_in_m(m, x):
    assert winding_length(m + 1, x) >= winding_length(m, x) - 1e-12


def test_collar_crossing_length_zero_displacement():
    core = 1.3
    assert collar_crossing_length(core, 0.0) == pytest.approx(2.0 * collar_width(core / 2.0), rel=1e-12)
    with pytest.raises(DomainError):
        collar_crossing_length(core, -0.1)


@given(st.floats(min_value=0.05, max_value=20.0))
@settings(max_examples=100, deadline=None)
def test_min_collar_plus_linear_closed_form(b):
    x_star, f_star = min_collar_plus_linear(b)
    assert f_star == pytest.approx(collar_plus_linear(b, x_star), rel=1e-12)
    for shift in (0.9, 1.1):
        assert collar_plus_linear(b, x_star * shift) >= f_star - 1e-12


@pytest.mark.parametrize("b", [0.1, 1.0, 7.5])
def test_min_collar_plus_linear_agrees_with_numeric(b):
    x_star, f_star = min_collar_plus_linear(b)
    x_num, f_num = numeric_min_collar_plus_linear(b)
    assert abs(f_num - f_star) <= 1e-8
    assert abs(x_num - x_star) <= 1e-5


def test_minimal_filling_closed_form_genus2():
    # 6 arccosh(1 + sqrt 3)
    assert minimal_filling_closed_form(2) == pytest.approx(6.0 * math.acosh(1.0 + math.sqrt(3.0)), rel=1e-14)
    assert minimal_filling_closed_form(2) == pytest.approx(9.97731535, abs=1e-7)
    with pytest.raises(DomainError):
        minimal_filling_closed_form(1)


def test_length_floor_and_ceiling_are_inverse():
    L = 3.0
    ceiling = intersection_ceiling_for_length(L)
    assert length_floor_from_intersections(ceiling) == pytest.approx(L, rel=1e-12)
    with pytest.raises(DomainError):
        length_floor_from_intersections(0)


def test_trace_to_length_small_and_large():
    assert trace_to_length(2.0 * math.cosh(1.5)) == pytest.approx(3.0, rel=1e-13)
    # e^{800} |tr| -- только в лог-форме
    assert trace_to_length(1.0, 800.0) == pytest.approx(1600.0, rel=1e-12)
    with pytest.raises(NotHyperbolic):
        trace_to_length(1.5)


def test_trace_to_length_mpf_uses_its_context():
    ctx = mpmath.MPContext()
    ctx.dps = 50
    tr = 2 * ctx.cosh(ctx.mpf("0.25"))
    assert trace_to_length(tr) == pytest.approx(0.5, rel=1e-14)


def _hyperbolic(l: float):
    e = math.exp(l / 2.0)
    return ScaledIsometry.from_matrix(e, 0.0, 0.0, 1.0 / e)


def test_compose_renormalizes_and_keeps_length():
    m = _hyperbolic(40.0)
    prod = compose_word([m] * 20)
    assert prod.log_scale > 0.0
    assert prod.length() == pytest.approx(800.0, rel=1e-12)


def test_inverse_composes_to_identity():
    m = ScaledIsometry.from_matrix(2.0, 1.0, 1.0, 1.0)
    ident = compose(m, m.inverse())
    a, b, c, d = ident.matrix()
    assert (a, b, c, d) == pytest.approx((1.0, 0.0, 0.0, 1.0), abs=1e-12)


def test_hp_word_trace_matches_float():
    mats = [(2.0, 1.0, 1.0, 1.0), (1.0, 1.0, 0.0, 1.0), (3.0, 2.0, 1.0, 1.0)]
    prod = compose_word([ScaledIsometry.from_matrix(*m) for m in mats])
    a, _, _, d = prod.matrix()
    assert float(hp_word_trace(mats)) == pytest.approx(a + d, rel=1e-14)
    assert float(hp_acosh(1.0)) == 0.0


INVOLUTION_GRID = [10.0 ** (-4.0 + 5.3 * i / 199) for i in range(200)]


@pytest.mark.parametrize("x", INVOLUTION_GRID[::7] + [20.0])
def test_collar_width_is_involution(x):
    assert collar_width(collar_width(x)) == pytest.approx(x, rel=1e-12)


def test_collar_width_fixed_point():
    x = math.log(1.0 + math.sqrt(2.0))
    assert collar_width(x) == pytest.approx(x, rel=1e-14)


@pytest.mark.parametrize("core", [1e-4, 0.01, 0.3, 1.0, 4.0, 15.0])
def test_collar_identity(core):
    r = collar_width(core / 2.0)
    assert math.sinh(r) * math.sinh(core / 2.0) == pytest.approx(1.0, rel=1e-12)
    assert math.cosh(r) == pytest.approx(1.0 / math.tanh(core / 2.0), rel=1e-12)


@given(st.floats(min_value=0.01, max_value=6.0), st.floats(min_value=0.0, max_value=12.0))
@settings(max_examples=150, deadline=None)
def test_crossing_length_right_triangles(core, displacement):
    # cosh(a/2) = cosh(h/2) cosh(x/2), h -- ширина воротника в обе стороны
    with mpmath.workdps(40):
        h = 2 * mpmath.asinh(1 / mpmath.sinh(mpmath.mpf(core) / 2))
        ref = 2 * mpmath.acosh(mpmath.cosh(h / 2) * mpmath.cosh(mpmath.mpf(displacement) / 2))
    assert collar_crossing_length(core, displacement) == pytest.approx(float(ref), rel=1e-12, abs=1e-12)


def test_winding_length_sandwich_grid():
    band = 4.0 * math.log(2.0)
    for i in range(200):
        x = 0.01 + (2.0 - 0.01) * i / 199
        base = 2.0 * collar_width(x / 2.0)
        for m in range(1, 101):
            f = winding_length(m, x)
            assert base + x * m - band <= f <= base + x * m + band, (m, x)


@given(st.integers(min_value=0, max_value=40), st.floats(min_value=0.01, max_value=2.0),
       st.floats(min_value=0.0, max_value=1.0))
@settings(max_examples=200, deadline=None)
def test_crossing_with_m_turns_between_winding_lengths(m, core, frac):
    arc = collar_crossing_length(core, (m + frac) * core)
    assert winding_length(m, core) * (1 - 1e-12) <= arc <= winding_length(m + 1, core) * (1 + 1e-12)


def _schottky_pair(L: float):
    c, s = math.cosh(L / 2.0), math.sinh(L / 2.0)
    e = math.exp(L / 2.0)
    a = (e, 0.0, 0.0, 1.0 / e)
    b = (c, s, s, c)
    inv = lambda m: (m[3], -m[1], -m[2], m[0])
    return {1: a, -1: inv(a), 2: b, -2: inv(b)}


def test_long_word_trace_matches_extended_precision():
    gens = _schottky_pair(4.0)
    rng = np.random.default_rng(17)
    letters = [1]
    while len(letters) < 2000:
        x = int(rng.choice([1, -1, 2, -2]))
        if x != -letters[-1]:
            letters.append(x)
    mats = [gens[x] for x in letters]
    prod = compose_word([ScaledIsometry.from_matrix(*m) for m in mats])
    value = prod.length()
    ref = 2 * hp_acosh(abs(hp_word_trace(mats, dps=40)) / 2, dps=40)
    assert math.isfinite(value)
    assert value == pytest.approx(float(ref), rel=1e-6)
