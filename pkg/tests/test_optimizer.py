import math

import numpy as np
import pytest

from a_config import OPT_PENALTY
from b_context import RunContext
from c_errors import BoundaryEscape, DomainError, NonConvergence
from c_utils import make_rng
from e_optimizer import (
    LengthObjective, LengthOptimizer, OptOptions, inf_invariant, minimize_length, optimality_certificate,
)
from GEOM.hyperbolic import length_floor_from_intersections, minimal_filling_closed_form
from GEOM.representation import FNCoords, build_representation, geodesic_length, random_fn_coords
from WORDS.family import apply_dehn_twist, eta, family_word, gamma0
from WORDS.intersect import self_intersection_oracle
from WORDS.words import parse_word

FAST = OptOptions(starts=3, max_evals=3000, tol=1e-3, systole_depth=6)


def test_options_validation_and_context():
    with pytest.raises(DomainError):
        OptOptions(starts=0)
    with pytest.raises(DomainError):
        OptOptions(max_evals=5)
    ctx = RunContext().apply_flags({"seed": 9, "optimizer.starts": 2, "optimizer.tol": 1e-3})
    opts = OptOptions.from_context(ctx)
    assert (opts.seed, opts.starts, opts.tol) == (9, 2, 1e-3)


def test_objective_penalty_and_identity():
    objective = LengthObjective(gamma0(2))
    assert objective(np.array([math.log(1e-12), 0.0, 0.0, 0.0, 0.0, 0.0])) == OPT_PENALTY
    assert objective(np.array([math.log(80.0), 0.0, 0.0, 0.0, 0.0, 0.0])) == OPT_PENALTY
    value = objective(FNCoords.symmetric(2).to_vector())
    assert math.isfinite(value) and objective.best == value
    with pytest.raises(DomainError):
        LengthObjective(parse_word("a1 b1 A1 B1 a2 b2 A2 B2"))


def test_start_points_reproducible():
    a = LengthOptimizer(FAST).start_points(2)
    b = LengthOptimizer(FAST).start_points(2)
    assert len(a) == FAST.starts
    for x, y in zip(a, b):
        assert np.array_equal(x, y)
    assert np.allclose(a[0], FNCoords.symmetric(2, FAST.thick_length).to_vector())


def test_inf_invariant_rejects_nonfilling():
    with pytest.raises(DomainError):
        inf_invariant(eta(2), FAST)


@pytest.mark.slow
def test_gamma0_matches_closed_form():
    result = minimize_length(gamma0(2), opts=FAST)
    ref = minimal_filling_closed_form(2)
    assert result.converged
    assert abs(result.m_gamma - ref) / ref <= 1e-2
    assert result.m_gamma == pytest.approx(geodesic_length(build_representation(result.x_gamma), gamma0(2)), rel=1e-12)
    record = result.to_record()
    assert record["m_gamma"] == result.m_gamma
    assert len(record["twist_residues"]) == 3
    assert FNCoords.from_record(record["x_gamma"]) == result.x_gamma


@pytest.mark.slow
def test_certificate_at_optimum():
    result = minimize_length(gamma0(2), opts=FAST)
    cert = optimality_certificate(result, FAST)
    assert cert.grad_norm < 1e-3
    assert min(cert.hessian_diag) > -1e-3


@pytest.mark.slow
def test_family_member_optimum():
    result = minimize_length(family_word(2, 2, 1), opts=FAST)
    # пилотное значение m_gamma(2,1) = 17.5791, l_eta = 2.59
    assert result.m_gamma == pytest.approx(17.5791, rel=1e-2)
    assert result.sys_side1.value > 0.0 and result.sys_side2.value > 0.0


@pytest.mark.slow
def test_simple_curve_escapes_to_boundary():
    with pytest.raises(BoundaryEscape) as info:
        minimize_length(parse_word("a1"), opts=FAST)
    assert info.value.length < FAST.escape_threshold


@pytest.mark.slow
def test_nonconvergence_carries_result():
    opts = OptOptions(starts=2, max_evals=60, tol=1e-15, systole_depth=6)
    with pytest.raises(NonConvergence) as info:
        minimize_length(gamma0(2), opts=opts)
    assert info.value.result.spread > 1e-15
    with pytest.raises(DomainError):
        LengthOptimizer(opts).optimality_certificate(info.value.result)


@pytest.mark.slow
@pytest.mark.parametrize("axis", ["a2", "b1", "a1 b1 A1 B1"])
def test_twisted_word_keeps_inf_invariant(axis):
    base = minimize_length(gamma0(2), opts=FAST).m_gamma
    twisted = apply_dehn_twist(gamma0(2), parse_word(axis), 1)
    assert twisted != gamma0(2)
    assert minimize_length(twisted, opts=FAST).m_gamma == pytest.approx(base, rel=1e-3)


@pytest.mark.slow
@pytest.mark.parametrize("word", ["a1 a2 b1 b2", "a1 a1 b1 a2 a2 b2", "a1 b1 A1 B1 a1 a2 b1 b2"])
def test_inf_invariant_above_intersection_floor(word):
    w = parse_word(word)
    value = inf_invariant(w, FAST)
    assert value >= length_floor_from_intersections(self_intersection_oracle(w))


def test_lengths_above_intersection_floor():
    # inf по структурам не меньше пола, значит и любая длина
    rng = make_rng(11)
    words = [gamma0(2), family_word(2, 1, 1), family_word(2, 3, 2)]
    floors = [length_floor_from_intersections(self_intersection_oracle(w)) for w in words]
    for _ in range(20):
        rep = build_representation(random_fn_coords(2, rng))
        for w, floor in zip(words, floors):
            assert geodesic_length(rep, w) >= floor
