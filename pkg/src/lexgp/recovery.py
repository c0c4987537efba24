"""Primal recovery from a dual maximizer.

At a maximizer of the dual, every term carrying positive weight pins a
linear combination of the log-variables:

* objective term t:        a_t . z = log(w_t V / c_t)
* term t of constraint i:  a_t . z = log(w_t / (c_t u_i))   (u_i > 0)

with V the dual optimum and z = log x.  Stacking the active rows gives
a linear system whose solutions are exactly the primal minimizers; full
column rank means the minimizer is unique, and any rank deficiency
leaves an affine family whose dimension is reported.  The returned
point is the minimum-norm solution in z.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .duality import DualSolution
from .errors import DegenerateDual, InconsistentSystem, InfeasibleRecovery
from .posynomial import GPStage, evaluate, rank


def _freeze(a, dtype=float):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class LogLinearSystem:
    """Active rows of the recovery system: ``matrix @ z = rhs``.

    ``active_constraints`` lists the constraints whose weight sums made
    the activity cut; ``row_terms`` names each row's origin as
    (block, term-within-block), block 0 being the objective.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    active_constraints: tuple[int, ...]
    row_terms: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class PrimalReport:
    """A recovered primal point plus the checks run on it.

    ``feasibility_margin`` is the worst value of g_i(x) - 1 over the
    stage constraints (negative when strictly inside, 0.0 when there
    are no constraints).  ``consistency_residual`` compares the weights
    rebuilt from x against the dual maximizer, and ``duality_gap`` is
    the relative mismatch of objective value and dual optimum.
    """

    x: np.ndarray
    z: np.ndarray
    unique: bool
    optimal_set_dimension: int
    consistency_residual: float
    duality_gap: float
    feasibility_margin: float


def build_log_linear_system(s: GPStage, sol: DualSolution,
                            activity_tol: float = 1e-8) -> LogLinearSystem:
    """Collect the recovery rows for all terms whose weight exceeds
    ``activity_tol`` (inside constraints, only when the block's weight
    sum does too)."""
    w = np.asarray(sol.w)
    if w.shape != (s.num_terms,):
        raise ValueError(
            f"dual solution has {w.shape[0]} weights, stage has "
            f"{s.num_terms} terms")
    if not np.isfinite(sol.value) or sol.value <= 0.0:
        raise ValueError(f"dual value must be positive, got {sol.value!r}")
    rows = []
    rhs = []
    row_terms = []
    active = []
    for t, term in enumerate(s.objective.terms):
        if w[t] > activity_tol:
            rows.append(term.exponents)
            rhs.append(np.log(w[t] * sol.value / term.coeff))
            row_terms.append((0, t))
    offset = s.objective.num_terms
    for i, gi in enumerate(s.constraints):
        u = float(sol.activity[i])
        if u > activity_tol:
            active.append(i)
            for t, term in enumerate(gi.terms):
                wt = w[offset + t]
                if wt > activity_tol:
                    rows.append(term.exponents)
                    rhs.append(np.log(wt / (term.coeff * u)))
                    row_terms.append((i + 1, t))
        offset += gi.num_terms
    if not rows:
        raise DegenerateDual(
            "every dual weight sits at or below the activity threshold "
            f"({activity_tol:g}); nothing to recover from")
    return LogLinearSystem(matrix=_freeze(np.array(rows)),
                           rhs=_freeze(np.array(rhs)),
                           active_constraints=tuple(active),
                           row_terms=tuple(row_terms))


def recover_primal(system: LogLinearSystem, s: GPStage, sol: DualSolution,
                   residual_tol: float = 1e-6,
                   feasibility_tol: float = 1e-8,
                   rank_tol: float = 1e-9) -> PrimalReport:
    """Solve the recovery system and vet the point it produces.

    Raises InconsistentSystem when the least-squares residual exceeds
    ``residual_tol`` (the dual maximizer does not admit a primal point,
    which for a true maximizer should not happen) and
    InfeasibleRecovery when the point violates a stage constraint by
    more than ``feasibility_tol``.
    """
    M = np.asarray(system.matrix)
    z, *_ = np.linalg.lstsq(M, np.asarray(system.rhs), rcond=None)
    fit = M @ z - system.rhs
    fit_resid = float(np.abs(fit).max())
    if fit_resid > residual_tol:
        raise InconsistentSystem(
            f"active log-linear system is inconsistent: residual "
            f"{fit_resid:.3e} exceeds {residual_tol:g}")
    rnk = rank(M, rank_tol)
    dim = s.n - rnk
    x = np.exp(z)
    margin = 0.0
    if s.constraints:
        margin = max(evaluate(g, x) - 1.0 for g in s.constraints)
    if margin > feasibility_tol:
        raise InfeasibleRecovery(
            f"recovered point violates a constraint by {margin:.3e} "
            f"(tolerance {feasibility_tol:g})")
    obj = evaluate(s.objective, x)
    gap = abs(obj - sol.value) / max(1.0, abs(sol.value))
    rebuilt = weights_from_primal(s, x, activity=sol.activity)
    consistency = float(np.abs(rebuilt - sol.w).max())
    return PrimalReport(x=_freeze(x), z=_freeze(z), unique=(dim == 0),
                        optimal_set_dimension=dim,
                        consistency_residual=consistency,
                        duality_gap=gap, feasibility_margin=margin)


def weights_from_primal(s: GPStage, x, activity=None) -> np.ndarray:
    """Dual weights implied by a primal point, in flat layout order.

    Objective terms get their share of the objective value; terms of
    constraint i get their share of g_i(x), scaled by ``activity[i]``
    when given (and left as plain shares otherwise, i.e. with every
    constraint treated as if its weight sum were one).
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (s.n,) or not np.all(x > 0.0):
        raise ValueError("need a strictly positive point of the right length")
    parts = []
    g0 = s.objective
    total = evaluate(g0, x)
    parts.append([evaluate_term(term, x) / total for term in g0.terms])
    for i, gi in enumerate(s.constraints):
        gval = evaluate(gi, x)
        scale = 1.0 if activity is None else float(activity[i])
        parts.append([scale * evaluate_term(term, x) / gval
                      for term in gi.terms])
    return np.concatenate([np.asarray(p) for p in parts])


def evaluate_term(term, x) -> float:
    """Value of a single monomial term at a positive point."""
    return float(term.coeff * np.prod(np.asarray(x, dtype=float)
                                      ** term.exponents))


def witness_direction(system: LogLinearSystem,
                      rank_tol: float = 1e-9) -> np.ndarray | None:
    """A unit direction in z along which the active system stays solved,
    or None when the system pins z completely.

    Moving the recovered log-point along this direction sweeps the
    optimal set, which is how non-uniqueness is exhibited concretely.
    """
    M = np.asarray(system.matrix)
    _, svals, vt = np.linalg.svd(M)
    cutoff = rank_tol * (svals[0] if svals.size else 0.0)
    rnk = int(np.sum(svals > cutoff))
    if rnk >= M.shape[1]:
        return None
    return _freeze(vt[rnk])
