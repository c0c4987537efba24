import numpy as np
import pytest

from lexgp import (GPStage, LexMode, OracleStatus, Posynomial, SamplerExhausted,
                   Term, build_dual, build_stage, evaluate,
                   penalty_value_and_gradient, sample_feasible_points,
                   solve_dual, solve_primal_log_space, stage_program)
from conftest import two_priority_problem


@pytest.fixture(scope="module")
def stage1():
    return build_stage(two_priority_problem(), 0)


@pytest.fixture(scope="module")
def stage2():
    return build_stage(two_priority_problem(), 1)


def test_first_stage_descent(stage1):
    r = solve_primal_log_space(stage1)
    assert r.status is OracleStatus.CONVERGED
    assert r.value == pytest.approx(0.15, rel=1e-3)
    assert max(r.constraint_margins) <= 1e-6
    assert np.allclose(r.x, np.exp(r.z))


def test_second_stage_descent(stage2):
    r = solve_primal_log_space(stage2)
    assert r.status is OracleStatus.CONVERGED
    assert r.value == pytest.approx(0.0431647, rel=1e-3)
    assert max(r.constraint_margins) <= 1e-6


def test_strict_second_stage_descent():
    s = stage_program(two_priority_problem(), 1, mode=LexMode.STRICT)
    r = solve_primal_log_space(s)
    assert r.status is OracleStatus.CONVERGED
    assert max(r.constraint_margins) <= 1e-6
    dual = solve_dual(build_dual(s))
    assert abs(r.value - dual.value) / max(1.0, dual.value) <= 1e-3


def test_descent_is_deterministic(stage2):
    a = solve_primal_log_space(stage2)
    b = solve_primal_log_space(stage2)
    assert np.array_equal(a.z, b.z)
    assert a.value == b.value
    assert a.iterations == b.iterations


def test_objective_value_is_evaluated_at_the_returned_point(stage1):
    r = solve_primal_log_space(stage1)
    assert r.value == pytest.approx(evaluate(stage1.objective, r.x),
                                    rel=1e-12)


def test_unbounded_objective_is_suspected():
    s = GPStage(objective=Posynomial((Term(1.0, (1.0,)),)),
                constraints=(), n=1)
    r = solve_primal_log_space(s)
    assert r.status is OracleStatus.UNBOUNDED_SUSPECTED


def test_penalty_gradient_matches_finite_differences(stage2):
    rng = np.random.default_rng(31)
    h = 1e-6
    for _ in range(25):
        z = rng.uniform(-1.0, 1.0, stage2.n)
        _, grad = penalty_value_and_gradient(stage2, z, rho=100.0)
        for j in range(stage2.n):
            zp, zm = z.copy(), z.copy()
            zp[j] += h
            zm[j] -= h
            fd = (penalty_value_and_gradient(stage2, zp, 100.0)[0]
                  - penalty_value_and_gradient(stage2, zm, 100.0)[0]) / (2 * h)
            assert grad[j] == pytest.approx(fd, rel=1e-5, abs=1e-7)


# ---------------------------------------------------------------------------
# feasible-point sampling


def test_sampler_returns_feasible_points(stage1):
    pts = sample_feasible_points(stage1, 10, seed=42)
    assert pts.shape == (10, 3)
    for x in pts:
        for g in stage1.constraints:
            assert evaluate(g, x) <= 1.0


def test_sampler_is_seed_deterministic(stage1):
    a = sample_feasible_points(stage1, 25, seed=7)
    b = sample_feasible_points(stage1, 25, seed=7)
    c = sample_feasible_points(stage1, 25, seed=8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_unconstrained_stage_accepts_every_draw():
    s = GPStage(objective=Posynomial((Term(1.0, (-1.0,)),)),
                constraints=(), n=1)
    pts = sample_feasible_points(s, 200, seed=0)
    assert pts.shape == (200, 1)
    assert np.all(pts > 0.0)
    assert np.all(np.abs(np.log(pts)) <= 3.0)


def test_empty_feasible_set_exhausts_the_sampler():
    s = GPStage(objective=Posynomial((Term(1.0, (1.0,)),)),
                constraints=(Posynomial((Term(2.0, (1.0,)),)),
                             Posynomial((Term(2.0, (-1.0,)),))), n=1)
    with pytest.raises(SamplerExhausted):
        sample_feasible_points(s, 1, seed=5)


def test_sampler_rejects_silly_counts(stage1):
    with pytest.raises(ValueError):
        sample_feasible_points(stage1, 0, seed=1)
