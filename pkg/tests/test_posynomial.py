import numpy as np
import pytest

from lexgp import (Constraint, EmptyObjectives, ExponentLengthMismatch,
                   GPStage, LexGPProblem, LexOrdering, NonpositiveBound,
                   NonpositiveCoefficient, Posynomial, Term,
                   degree_of_difficulty, evaluate, evaluate_log,
                   exponent_matrix, lex_compare, normalize, rank)
from conftest import two_priority_problem


def monomial(coeff, *exponents):
    return Posynomial((Term(coeff, tuple(float(e) for e in exponents)),))


# ---------------------------------------------------------------------------
# construction and validation


@pytest.mark.parametrize("coeff", [0.0, -1.0, -1e-300, float("nan"),
                                   float("inf")])
def test_term_rejects_bad_coefficients(coeff):
    with pytest.raises(NonpositiveCoefficient):
        Term(coeff, (1.0,))


def test_term_exponents_are_frozen():
    t = Term(2.0, (1.0, -2.0))
    with pytest.raises(ValueError):
        t.exponents[0] = 5.0


def test_posynomial_needs_matching_term_lengths():
    with pytest.raises(ExponentLengthMismatch):
        Posynomial((Term(1.0, (1.0,)), Term(1.0, (1.0, 2.0))))
    with pytest.raises(ExponentLengthMismatch):
        Posynomial.from_data([1.0, 2.0], [(1.0,)])


def test_posynomial_needs_at_least_one_term():
    with pytest.raises(ExponentLengthMismatch):
        Posynomial(())


@pytest.mark.parametrize("bound", [0.0, -3.0])
def test_constraint_rejects_nonpositive_bound(bound):
    with pytest.raises(NonpositiveBound):
        Constraint(lhs=monomial(1.0, 1.0), bound=bound)


def test_problem_needs_objectives():
    with pytest.raises(EmptyObjectives):
        LexGPProblem(variable_names=("x",), objectives=(), constraints=())


def test_problem_rejects_duplicate_names():
    with pytest.raises(ValueError):
        LexGPProblem(variable_names=("x", "x"),
                     objectives=(monomial(1.0, 1.0, 0.0),), constraints=())


def test_stage_needs_at_least_one_variable():
    with pytest.raises(ExponentLengthMismatch):
        GPStage(objective=Posynomial((Term(1.0, ()),)), constraints=(), n=0)


def test_stage_blocks_order():
    s = GPStage(objective=monomial(1.0, 1.0),
                constraints=(monomial(2.0, -1.0), monomial(3.0, 2.0)), n=1)
    got = [(i, g.coeff_vector()[0]) for i, g in s.blocks()]
    assert got == [(0, 1.0), (1, 2.0), (2, 3.0)]
    assert s.num_terms == 3


# ---------------------------------------------------------------------------
# evaluation


def test_eval_constant_term():
    p = monomial(7.0, 0.0, 0.0)
    assert evaluate(p, (12.3, 0.001)) == pytest.approx(7.0)


def test_eval_at_worked_stage_points():
    problem = two_priority_problem()
    g10 = problem.objectives[0]
    assert evaluate(g10, (0.9086967, 1.514494, 2.200954)) == pytest.approx(
        0.15, abs=1e-6)
    assert evaluate(g10, (3.020273, 23.01163, 0.2483217)) == pytest.approx(
        0.233333, abs=1e-5)


def test_eval_rejects_nonpositive_points():
    p = monomial(1.0, -1.0)
    with pytest.raises(ValueError):
        evaluate(p, (0.0,))
    with pytest.raises(ValueError):
        evaluate(p, (-2.0,))


def test_eval_log_at_zero_is_coefficient_sum():
    p = Posynomial.from_data([2.0, 3.5], [(1.0, -2.0), (0.5, 4.0)])
    value, grad = evaluate_log(p, np.zeros(2))
    assert value == pytest.approx(5.5, rel=1e-12)
    expected = p.coeff_vector() @ p.exponent_rows()
    assert np.allclose(grad, expected, rtol=1e-12)


def test_eval_log_matches_eval_on_random_points():
    rng = np.random.default_rng(7)
    for _ in range(100):
        tcount, n = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        p = Posynomial.from_data(rng.uniform(0.1, 10.0, tcount),
                                 rng.uniform(-3.0, 3.0, (tcount, n)))
        x = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), n))
        value, _ = evaluate_log(p, np.log(x))
        assert value == pytest.approx(evaluate(p, x), rel=1e-12)


def test_eval_log_survives_inner_products_past_float_range():
    # the term value 1e-300 * e^750 is representable, but a naive
    # exp(750) inside the sum is not
    p = Posynomial.from_data([1e-300], [(250.0,)])
    value, grad = evaluate_log(p, np.array([3.0]))
    expected = np.exp(750.0 + np.log(1e-300))
    assert value == pytest.approx(expected, rel=1e-12)
    assert grad[0] == pytest.approx(250.0 * expected, rel=1e-12)


def test_eval_log_gradient_matches_finite_differences():
    rng = np.random.default_rng(11)
    h = 1e-6
    for _ in range(100):
        tcount, n = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        p = Posynomial.from_data(rng.uniform(0.1, 10.0, tcount),
                                 rng.uniform(-3.0, 3.0, (tcount, n)))
        z = rng.uniform(-1.5, 1.5, n)
        _, grad = evaluate_log(p, z)
        for j in range(n):
            zp, zm = z.copy(), z.copy()
            zp[j] += h
            zm[j] -= h
            fd = (evaluate_log(p, zp)[0] - evaluate_log(p, zm)[0]) / (2 * h)
            assert grad[j] == pytest.approx(fd, rel=1e-5, abs=1e-9)


# ---------------------------------------------------------------------------
# normalization


def test_normalize_divides_coefficients():
    problem = two_priority_problem()
    first, second = problem.constraints
    assert np.allclose(normalize(first).coeff_vector(), [0.1, 0.1])
    assert np.allclose(normalize(second).coeff_vector(), [0.5])
    unit = Constraint(lhs=first.lhs, bound=1.0)
    assert np.allclose(normalize(unit).coeff_vector(),
                       first.lhs.coeff_vector())


def test_normalize_preserves_the_inequality():
    rng = np.random.default_rng(3)
    c = Constraint(lhs=Posynomial.from_data([2.0, 0.3],
                                            [(1.0, -1.0), (0.5, 2.0)]),
                   bound=7.0)
    g = normalize(c)
    for _ in range(200):
        x = np.exp(rng.uniform(-2.0, 2.0, 2))
        lhs = evaluate(c.lhs, x)
        assert (lhs <= 7.0) == (evaluate(g, x) <= 1.0)
        assert (lhs < 7.0) == (evaluate(g, x) < 1.0)


# ---------------------------------------------------------------------------
# exponent matrix, rank, degree of difficulty


def test_exponent_matrix_of_first_stage():
    problem = two_priority_problem()
    s = GPStage(objective=problem.objectives[0],
                constraints=tuple(normalize(c) for c in problem.constraints),
                n=3)
    expected = [[-1, -1, -2], [1, 1, 2], [0, 1, 1], [1, 0, 1]]
    assert np.array_equal(exponent_matrix(s), expected)
    assert rank(exponent_matrix(s)) == 2
    assert degree_of_difficulty(s) == 0


def test_exponent_matrix_of_second_stage():
    problem = two_priority_problem()
    s = GPStage(objective=problem.objectives[1],
                constraints=tuple(normalize(c) for c in problem.constraints),
                n=3)
    expected = [[-1, -3, -5], [-1, -1, 0], [1, 1, 2], [0, 1, 1], [1, 0, 1]]
    assert np.array_equal(exponent_matrix(s), expected)
    assert rank(exponent_matrix(s)) == 3
    assert degree_of_difficulty(s) == 1


def test_exponent_matrix_objective_only():
    s = GPStage(objective=monomial(1.0, 1.0, 1.0), constraints=(), n=2)
    assert np.array_equal(exponent_matrix(s), [[1.0, 1.0]])


def test_rank_basics():
    assert rank(np.eye(3)) == 3
    assert rank(np.zeros((4, 2))) == 0
    assert rank(np.empty((0, 3))) == 0
    m = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])
    assert rank(m) == 1
    assert rank(np.array([[1.0, 0.0], [0.0, 1e-12]])) == 1


def test_rank_invariances():
    rng = np.random.default_rng(19)
    for _ in range(25):
        m = rng.standard_normal((int(rng.integers(2, 6)),
                                 int(rng.integers(2, 5))))
        r = rank(m)
        assert r <= min(m.shape)
        perm = rng.permutation(m.shape[0])
        assert rank(m[perm]) == r
        scaled = m.copy()
        scaled[0] *= float(rng.uniform(0.5, 50.0))
        assert rank(scaled) == r


def test_negative_degree_of_difficulty_warns():
    s = GPStage(objective=monomial(1.0, 1.0, 1.0), constraints=(), n=2)
    with pytest.warns(RuntimeWarning):
        assert degree_of_difficulty(s) == -2


# ---------------------------------------------------------------------------
# lexicographic comparison


def test_lex_compare_first_difference_decides():
    assert lex_compare((0, 1, -5), (0, 0, 100)) is LexOrdering.GREATER
    assert lex_compare((1.0, 2.0), (1.0, 2.0)) is LexOrdering.EQUAL
    assert lex_compare((0.15, 0.0431647), (0.15, 0.20)) is LexOrdering.LESS


def test_lex_compare_tolerance_ties():
    assert lex_compare((1.0, 2.0), (1.0 + 1e-12, 2.0)) is LexOrdering.EQUAL
    assert lex_compare((1.0, 2.0), (1.0 + 1e-12, 3.0)) is LexOrdering.LESS
    assert lex_compare((1.0,), (1.5,), tol=1.0) is LexOrdering.EQUAL


def test_lex_compare_rejects_length_mismatch():
    with pytest.raises(ValueError):
        lex_compare((1.0, 2.0), (1.0,))
