"""The product-form dual of a posynomial program.

For a stage with terms c_t * prod x_j**a_tj (objective terms first),
the dual variables are one nonnegative weight per term.  Feasible
weights satisfy the normality condition (objective weights sum to one)
and one orthogonality condition per variable (exponent-weighted sums
vanish).  The dual function is

    V(w) = prod_t (c_t / w_t)**w_t * prod_i u_i**u_i

with u_i the weight sum of constraint block i and the 0**0 convention.
Its log is concave on the nonnegative orthant, so maximizing it over
the feasible polytope is a smooth concave problem; the maximum equals
the primal infimum.

``solve_dual`` picks between an exact linear solve (zero degree of
difficulty makes the equality system square) and projected gradient
ascent on the log dual over the feasible polytope.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np
import scipy.optimize

from . import _kernels
from .errors import DualInfeasible, DualUnbounded, IterationLimit, SolverError
from .posynomial import GPStage, exponent_matrix


class DualMethod(enum.Enum):
    LINEAR_EXACT = "linear-exact"
    CONCAVE_MAX = "concave-max"


def _freeze(a, dtype=float):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DualProgram:
    """The dual of one stage, in solver-ready arrays.

    ``weight_layout`` maps (block, term-within-block) to the flat weight
    index; block 0 is the objective, block i >= 1 is constraint i - 1.
    ``equality_matrix`` stacks the normality row over the orthogonality
    rows, so it is (n + 1) x T with right side (1, 0, ..., 0).
    """

    stage: GPStage
    weight_layout: Mapping[tuple[int, int], int]
    equality_matrix: np.ndarray
    equality_rhs: np.ndarray
    coeffs: np.ndarray
    block_index: np.ndarray
    log_coeffs: np.ndarray

    @property
    def num_terms(self) -> int:
        return self.coeffs.shape[0]

    @property
    def num_blocks(self) -> int:
        return len(self.stage.constraints) + 1


def build_dual(s: GPStage) -> DualProgram:
    """Assemble the dual program of a stage."""
    layout = {}
    blocks = []
    coeffs = []
    flat = 0
    for b, g in s.blocks():
        for t in range(g.num_terms):
            layout[(b, t)] = flat
            blocks.append(b)
            coeffs.append(g.terms[t].coeff)
            flat += 1
    T = flat
    E = np.zeros((s.n + 1, T))
    E[0, :s.objective.num_terms] = 1.0
    E[1:, :] = exponent_matrix(s).T
    rhs = np.zeros(s.n + 1)
    rhs[0] = 1.0
    coeffs = np.array(coeffs)
    return DualProgram(
        stage=s,
        weight_layout=MappingProxyType(layout),
        equality_matrix=_freeze(E),
        equality_rhs=_freeze(rhs),
        coeffs=_freeze(coeffs),
        block_index=_freeze(blocks, dtype=np.int32),
        log_coeffs=_freeze(np.log(coeffs)),
    )


def weight_labels(d: DualProgram) -> tuple[str, ...]:
    """Human-readable name of each flat weight, in flat order."""
    labels = [""] * d.num_terms
    for (b, t), flat in d.weight_layout.items():
        labels[flat] = f"objective[{t}]" if b == 0 else f"constraint[{b - 1}][{t}]"
    return tuple(labels)


@dataclass(frozen=True)
class DualSolution:
    """A point in the dual: weights, the dual value there, the
    per-constraint weight sums (``activity``), the worst violation of
    the equality system, and which path produced it."""

    w: np.ndarray
    value: float
    activity: np.ndarray
    residual: float
    method: DualMethod
    iterations: int = 0


def _check_weights(d: DualProgram, w) -> np.ndarray:
    w = np.ascontiguousarray(w, dtype=float)
    if w.shape != (d.num_terms,):
        raise ValueError(
            f"weights have shape {w.shape}, expected ({d.num_terms},)")
    return w


def eval_log_dual(d: DualProgram, w) -> float:
    """Log of the dual function at nonnegative weights, with the
    0 * log(0) -> 0 convention."""
    w = _check_weights(d, w)
    if np.any(w < 0.0):
        raise ValueError("dual weights must be nonnegative")
    return float(_kernels.dual_objective(d.log_coeffs, d.block_index,
                                         d.num_blocks, w))


def eval_dual(d: DualProgram, w) -> float:
    """The dual function itself; see :func:`eval_log_dual`."""
    return float(np.exp(eval_log_dual(d, w)))


def eval_log_dual_gradient(d: DualProgram, w) -> np.ndarray:
    """Gradient of the log dual at strictly positive weights.

    Component t is log(c_t / w_t) - 1 for objective terms and
    log(c_t * u_i / w_t) for terms of constraint i.
    """
    w = _check_weights(d, w)
    if np.any(w <= 0.0):
        raise ValueError("the log dual gradient needs strictly positive weights")
    g = _kernels.dual_gradient(d.log_coeffs, d.block_index, d.num_blocks, w)
    return np.asarray(g)


def _activity(d: DualProgram, w) -> np.ndarray:
    u = np.bincount(d.block_index, weights=w, minlength=d.num_blocks)
    return u[1:]


def _residual(d: DualProgram, w) -> float:
    r = d.equality_matrix @ w - d.equality_rhs
    return float(np.abs(r).max()) if r.size else 0.0


def _nullspace(M: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the right nullspace, columns."""
    u, s, vt = np.linalg.svd(M)
    if s.size:
        cutoff = max(M.shape) * np.finfo(float).eps * s[0]
        rk = int(np.sum(s > cutoff))
    else:
        rk = 0
    return np.ascontiguousarray(vt[rk:].T)


def _phase1(E: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """A nonnegative solution of E w = rhs with the most uniform slack
    available, via a max-min linear program.  Raises DualInfeasible when
    none exists."""
    T = E.shape[1]
    cost = np.zeros(T + 1)
    cost[-1] = -1.0
    A_ub = np.hstack([-np.eye(T), np.ones((T, 1))])
    b_ub = np.zeros(T)
    A_eq = np.hstack([E, np.zeros((E.shape[0], 1))])
    bounds = [(None, None)] * T + [(None, 1.0)]
    res = scipy.optimize.linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq,
                                 b_eq=rhs, bounds=bounds, method="highs")
    if res.status == 2:
        raise DualInfeasible(
            "the normality and orthogonality conditions have no solution")
    if not res.success:
        raise SolverError(f"feasible-weight search failed: {res.message}")
    if res.x[-1] < -1e-9:
        raise DualInfeasible(
            "every solution of the normality and orthogonality conditions "
            "has a negative component")
    w = np.clip(res.x[:T], 0.0, None)
    # tighten the equality residual the LP solver left behind
    w = w + np.linalg.pinv(E) @ (rhs - E @ w)
    return np.clip(w, 0.0, None)


class _AscentState:
    """Bookkeeping for projected gradient ascent on the log dual:
    caches a nullspace basis per active set."""

    def __init__(self, E: np.ndarray):
        self.E = E
        self.T = E.shape[1]
        self._bases: dict[frozenset, np.ndarray] = {}

    def basis(self, active: frozenset) -> np.ndarray:
        hit = self._bases.get(active)
        if hit is None:
            if active:
                pins = np.zeros((len(active), self.T))
                for row, t in enumerate(sorted(active)):
                    pins[row, t] = 1.0
                M = np.vstack([self.E, pins])
            else:
                M = self.E
            hit = _nullspace(M)
            self._bases[active] = hit
        return hit

    def direction(self, g: np.ndarray, w: np.ndarray):
        """Project g onto the tangent space, pinning zero weights whose
        projected component points outward.  Returns (direction, active)."""
        zero = w <= 0.0
        active: frozenset = frozenset()
        while True:
            N = self.basis(active)
            if N.shape[1] == 0:
                d_vec = np.zeros(self.T)
            else:
                d_vec = N @ (N.T @ g)
            if active:
                d_vec[list(active)] = 0.0
            bad = zero & (d_vec < 0.0)
            newly = [int(t) for t in np.flatnonzero(bad) if t not in active]
            if not newly:
                return d_vec, active
            active = active | frozenset(newly)


def _ascend(d: DualProgram, w0: np.ndarray, tol: float, max_iter: int):
    """Maximize the log dual over the feasible polytope by projected
    gradient ascent with an adaptively grown pin set for weights that
    reach zero.  Initial step lengths are spectral (Barzilai-Borwein).

    Returns (w, projected_gradient_norm, iterations, converged).
    """
    logc, block, nb = d.log_coeffs, d.block_index, d.num_blocks
    state = _AscentState(np.asarray(d.equality_matrix))
    w = np.array(w0, dtype=float)
    w[w <= 1e-15] = 0.0
    phi = _kernels.dual_objective(logc, block, nb, w)
    step = 1.0
    pg = np.inf
    it = 0
    while it < max_iter:
        it += 1
        if float(w.sum()) > 1e8 or phi > 700.0:
            # the ascent is monotone, so a log value past float range
            # (or runaway weights) certifies divergence
            raise DualUnbounded(
                "the dual is diverging; the primal constraint set is "
                "very likely empty")
        g = np.asarray(_kernels.dual_gradient(logc, block, nb, w))
        d_vec, _active = state.direction(g, w)
        pg = float(np.linalg.norm(d_vec))
        if pg <= tol:
            return w, pg, it, True
        neg = d_vec < 0.0
        if neg.any():
            amax = float(np.min(w[neg] / -d_vec[neg]))
        else:
            amax = np.inf
        alpha = min(max(step, 1e-14), 1e8, amax)
        slope = pg * pg
        accepted = False
        for _ in range(60):
            if alpha <= 0.0:
                break
            w_try = np.clip(w + alpha * d_vec, 0.0, None)
            w_try[w_try <= 1e-15] = 0.0
            phi_try = _kernels.dual_objective(logc, block, nb, w_try)
            if phi_try >= phi + 1e-4 * alpha * slope:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            # no float64-visible improvement along the projected
            # direction; accept near-stationary iterates
            return w, pg, it, pg <= max(tol, 1e-5)
        g_new = np.asarray(_kernels.dual_gradient(logc, block, nb, w_try))
        svec = w_try - w
        yvec = g - g_new
        sty = float(svec @ yvec)
        step = float(svec @ svec) / sty if sty > 1e-300 else alpha * 2.0
        w, phi = w_try, phi_try
    return w, pg, max_iter, False


def solve_dual(d: DualProgram, tol: float = 1e-8, max_iter: int = 10000,
               method: DualMethod | None = None) -> DualSolution:
    """Maximize the dual.

    With zero degree of difficulty the equality system is square and is
    solved exactly (``LinearExact``); otherwise, or when the square
    system is singular, a feasible point from a max-slack linear program
    seeds projected gradient ascent (``ConcaveMax``) that stops when the
    projected gradient norm falls to ``tol`` or after ``max_iter``
    iterations.  ``method`` forces a path, mainly so the two can be
    cross-checked on zero-degree problems.

    Raises DualInfeasible when no nonnegative feasible weights exist,
    DualUnbounded when the dual diverges (empty primal), and
    IterationLimit (best iterate attached) when the cap is hit.
    """
    E = np.asarray(d.equality_matrix)
    rhs = np.asarray(d.equality_rhs)
    square = E.shape[0] == E.shape[1]
    if method is None:
        method = DualMethod.LINEAR_EXACT if square else DualMethod.CONCAVE_MAX
    if method is DualMethod.LINEAR_EXACT:
        if not square:
            raise ValueError(
                "the exact linear path needs a square equality system "
                f"(got {E.shape[0]}x{E.shape[1]}); use the concave path")
        try:
            w = np.linalg.solve(E, rhs)
        except np.linalg.LinAlgError:
            method = DualMethod.CONCAVE_MAX
        else:
            if np.any(w < -1e-10):
                raise DualInfeasible(
                    "the unique solution of the normality and orthogonality "
                    "conditions has negative components")
            w = np.clip(w, 0.0, None)
            return DualSolution(w=_freeze(w), value=eval_dual(d, w),
                                activity=_freeze(_activity(d, w)),
                                residual=_residual(d, w),
                                method=DualMethod.LINEAR_EXACT)
    w0 = _phase1(E, rhs)
    w, pg, iters, converged = _ascend(d, w0, tol, max_iter)
    sol = DualSolution(w=_freeze(w), value=eval_dual(d, w),
                       activity=_freeze(_activity(d, w)),
                       residual=_residual(d, w),
                       method=DualMethod.CONCAVE_MAX, iterations=iters)
    if not converged:
        raise IterationLimit(
            f"dual ascent stopped after {iters} iterations with projected "
            f"gradient norm {pg:.3e} (tol {tol:.1e})", best=sol)
    return sol
