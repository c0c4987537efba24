"""Independent primal solver used to cross-check the dual route.

Works entirely in z = log x, where a posynomial program is convex:
minimize log g0(e^z) plus an exterior quadratic penalty
rho * sum_i max(0, log g_i(e^z))**2, for an increasing ladder of
penalty weights with warm starts.  Each rung runs nonmonotone
backtracking gradient descent with spectral initial steps (the
``oracle_stage`` kernel).  After the fixed ramp the penalty weight is
raised once more, sized from the implied multipliers, so the final
constraint margins land inside 1e-6.

This module deliberately shares no evaluation or gradient code with the
dual-based solver; agreement between the two routes is evidence, not
tautology.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import _pykernels
from .errors import SamplerExhausted
from .posynomial import GPStage


class OracleStatus(enum.Enum):
    CONVERGED = "converged"
    ITERATION_LIMIT = "iteration-limit"
    UNBOUNDED_SUSPECTED = "unbounded-suspected"


@dataclass(frozen=True)
class OracleResult:
    """Outcome of a penalty-descent solve.

    ``constraint_margins[i]`` is g_i(x) - 1.  CONVERGED means the final
    scaled gradient test passed and every margin is at most 1e-6;
    UNBOUNDED_SUSPECTED means some |z_j| ran past 50 while the
    objective was still falling.
    """

    z: np.ndarray
    x: np.ndarray
    value: float
    status: OracleStatus
    constraint_margins: np.ndarray
    gradient_norm: float
    iterations: int


_RHO_RAMP = (1e1, 1e2, 1e3, 1e4, 1e5, 1e6)
_Z_CAP = 50.0
_MARGIN_GOAL = 1e-6
# allowance for float64 rounding in the penalty gradient, which scales
# with the penalty weight; stages stop at max(tol * scale, rho * this).
# Calibrated on fifth-power exponent rows, where cancellation in the
# penalty terms leaves a plateau near 2e-12 per unit of penalty weight.
_NOISE_FLOOR = 2e-12


def _stage_arrays(s: GPStage):
    obj_logc = np.log(s.objective.coeff_vector())
    obj_A = np.ascontiguousarray(s.objective.exponent_rows())
    if s.constraints:
        con_logc = np.concatenate(
            [np.log(g.coeff_vector()) for g in s.constraints])
        con_A = np.ascontiguousarray(
            np.vstack([g.exponent_rows() for g in s.constraints]))
        counts = [g.num_terms for g in s.constraints]
    else:
        con_logc = np.empty(0)
        con_A = np.empty((0, s.n))
        counts = []
    con_ptr = np.zeros(len(counts) + 1, dtype=np.int32)
    for i, c in enumerate(counts):
        con_ptr[i + 1] = con_ptr[i] + c
    return obj_logc, obj_A, con_logc, con_A, con_ptr


def _log_value(logc, A, z) -> float:
    sv = A @ z + logc
    m = float(sv.max())
    return m + float(np.log(np.exp(sv - m).sum()))


def _log_constraints(con_logc, con_A, con_ptr, z) -> np.ndarray:
    vals = []
    for i in range(len(con_ptr) - 1):
        lo, hi = con_ptr[i], con_ptr[i + 1]
        vals.append(_log_value(con_logc[lo:hi], con_A[lo:hi], z))
    return np.array(vals)


def penalty_value_and_gradient(s: GPStage, z, rho: float):
    """The penalized log-space objective and its gradient at z.

    Runs the reference (pure python) evaluation path; exposed so the
    analytic gradient can be checked against finite differences without
    reaching into the kernels.
    """
    z = np.asarray(z, dtype=float)
    if z.shape != (s.n,):
        raise ValueError(f"point has shape {z.shape}, expected ({s.n},)")
    obj_logc, obj_A, con_logc, con_A, con_ptr = _stage_arrays(s)
    value, grad, _ = _pykernels._penalty_vg(obj_logc, obj_A, con_logc,
                                            con_A, con_ptr, z, rho, True)
    return value, grad


def solve_primal_log_space(s: GPStage, tol: float = 1e-8,
                           max_iter: int = 50000) -> OracleResult:
    """Minimize the stage objective by the penalty ladder.

    ``tol`` is applied to the gradient norm relative to the size of the
    stacked gradient pieces (objective plus weighted penalty terms), a
    scaling without which the last rungs would chase float64 rounding
    noise in the penalty.  ``max_iter`` is the total descent budget
    across all rungs.
    """
    arrays = _stage_arrays(s)
    obj_logc, obj_A, con_logc, con_A, con_ptr = arrays
    ncon = len(con_ptr) - 1
    z = np.zeros(s.n)
    budget = int(max_iter)
    used_total = 0
    flag = 0
    gnorm = np.inf
    rho = _RHO_RAMP[0]
    for rho in _RHO_RAMP:
        if budget <= 0:
            flag = 1
            break
        z, _, gnorm, _, used, flag = _kernels.oracle_stage(
            obj_logc, obj_A, con_logc, con_A, con_ptr, z, rho, tol,
            budget, 1.0, _Z_CAP, rho * _NOISE_FLOOR)
        z = np.asarray(z)
        budget -= used
        used_total += used
        if flag == 2:
            break
    if flag != 2 and ncon:
        # one multiplier-sized escalation (repeated if the margins are
        # still out) to push margins under the goal
        for _ in range(3):
            viols = np.clip(_log_constraints(con_logc, con_A, con_ptr, z),
                            0.0, None)
            lam_max = 2.0 * rho * float(viols.max()) if viols.size else 0.0
            needed = min(max(1e6, 2e6 * lam_max), 1e9)
            margins_ok = float(viols.max()) <= _MARGIN_GOAL if viols.size else True
            if (margins_ok and flag == 0) or needed <= rho or budget <= 0:
                break
            rho = needed
            z, _, gnorm, _, used, flag = _kernels.oracle_stage(
                obj_logc, obj_A, con_logc, con_A, con_ptr, z, rho, tol,
                budget, 1.0, _Z_CAP, rho * _NOISE_FLOOR)
            z = np.asarray(z)
            budget -= used
            used_total += used
            if flag == 2:
                break
    margins = np.expm1(_log_constraints(con_logc, con_A, con_ptr, z))
    value = float(np.exp(_log_value(obj_logc, obj_A, z)))
    if flag == 2:
        status = OracleStatus.UNBOUNDED_SUSPECTED
    elif flag == 0 and (margins.size == 0 or margins.max() <= _MARGIN_GOAL):
        status = OracleStatus.CONVERGED
    else:
        status = OracleStatus.ITERATION_LIMIT
    z = np.asarray(z, dtype=float)
    z.setflags(write=False)
    x = np.exp(z)
    x.setflags(write=False)
    margins.setflags(write=False)
    return OracleResult(z=z, x=x, value=value, status=status,
                        constraint_margins=margins,
                        gradient_norm=float(gnorm), iterations=used_total)


def sample_feasible_points(s: GPStage, count: int, seed: int) -> np.ndarray:
    """Rejection-sample ``count`` feasible points of the stage.

    Log-points are drawn uniformly from [-3, 3]^n; at most one million
    draws are spent before SamplerExhausted.  Returns an array of shape
    (count, n) of strictly positive points, deterministic in ``seed``.
    """
    if count <= 0:
        raise ValueError(f"count must be positive, got {count}")
    _, _, con_logc, con_A, con_ptr = _stage_arrays(s)
    ncon = len(con_ptr) - 1
    rng = np.random.default_rng(seed)
    kept = []
    total = 0
    budget = 1_000_000
    while len(kept) < count and total < budget:
        batch = min(8192, budget - total)
        Z = rng.uniform(-3.0, 3.0, size=(batch, s.n))
        total += batch
        ok = np.ones(batch, dtype=bool)
        for i in range(ncon):
            lo, hi = con_ptr[i], con_ptr[i + 1]
            S = Z @ con_A[lo:hi].T + con_logc[lo:hi]
            m = S.max(axis=1)
            vals = m + np.log(np.exp(S - m[:, None]).sum(axis=1))
            ok &= vals <= 0.0
        for row in Z[ok]:
            kept.append(np.exp(row))
            if len(kept) == count:
                break
    if len(kept) < count:
        raise SamplerExhausted(
            f"found {len(kept)} of {count} feasible points in {total} draws")
    return np.array(kept)
