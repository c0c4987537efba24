"""Sequential solver for preemptive lexicographic objectives.

Objectives are minimized one at a time, most important first.  After a
stage is solved its objective either becomes a carried constraint
``g_k(x) <= v_k * (1 + eps)`` for all later stages (Strict mode, the
default) or is simply dropped (Independent mode, which minimizes each
objective subject to the original constraints alone).  Independent mode
is cheaper and occasionally what is wanted, but its later stages are
free to trade away earlier gains; Strict mode is the one whose final
point actually attains the lexicographic optimum up to the carry
tolerance.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .duality import DualSolution, build_dual, solve_dual
from .errors import LexGPError, StageFailure
from .posynomial import (Constraint, GPStage, LexGPProblem, Posynomial,
                         degree_of_difficulty, evaluate, normalize)
from .recovery import PrimalReport, build_log_linear_system, recover_primal


class LexMode(enum.Enum):
    STRICT = "strict"
    INDEPENDENT = "independent"


@dataclass(frozen=True)
class SolveOptions:
    """Tolerances and caps shared by all stages of a solve."""

    dual_tol: float = 1e-8
    dual_max_iter: int = 10000
    activity_tol: float = 1e-8
    residual_tol: float = 1e-6
    feasibility_tol: float = 1e-8
    rank_tol: float = 1e-9
    oracle_tol: float = 1e-8
    oracle_max_iter: int = 50000


@dataclass(frozen=True)
class StageSolution:
    """Everything one stage produced: the stage as posed, the dual
    maximizer, the recovered primal, the achieved objective value, the
    bound carried forward (None in Independent mode and for the last
    stage), and the stage's degree of difficulty."""

    stage_index: int
    stage: GPStage
    dual: DualSolution
    primal: PrimalReport
    objective_value: float
    carried_bound: float | None
    degree_of_difficulty: int


@dataclass(frozen=True)
class LexSolution:
    stages: tuple[StageSolution, ...]
    final_x: np.ndarray
    objective_vector: np.ndarray
    mode: LexMode


def carry_constraint(g: Posynomial, bound: float,
                     eps: float = 1e-6) -> Constraint:
    """The constraint a solved objective turns into: g <= bound*(1+eps).

    The relaxation keeps the previous stage's own minimizer strictly
    feasible, so the next stage never starts from an empty set for
    purely numerical reasons.
    """
    if eps < 0.0:
        raise ValueError(f"carry tolerance must be nonnegative, got {eps}")
    if bound <= 0.0:
        raise ValueError(f"carried bound must be positive, got {bound}")
    return Constraint(lhs=g, bound=bound * (1.0 + eps))


def build_stage(problem: LexGPProblem, index: int,
                carried=()) -> GPStage:
    """Stage ``index`` of a problem: that objective, the problem
    constraints normalized to unit bounds, then any carried constraints
    in the order given."""
    if not 0 <= index < len(problem.objectives):
        raise ValueError(
            f"objective index {index} out of range [0, {len(problem.objectives)})")
    gs = [normalize(c) for c in problem.constraints]
    gs.extend(normalize(c) for c in carried)
    return GPStage(objective=problem.objectives[index],
                   constraints=tuple(gs), n=problem.n)


def solve_stage(s: GPStage, opts: SolveOptions | None = None):
    """Dual-solve one stage and recover its primal point."""
    opts = opts or SolveOptions()
    dual = solve_dual(build_dual(s), tol=opts.dual_tol,
                      max_iter=opts.dual_max_iter)
    system = build_log_linear_system(s, dual, activity_tol=opts.activity_tol)
    primal = recover_primal(system, s, dual, residual_tol=opts.residual_tol,
                            feasibility_tol=opts.feasibility_tol,
                            rank_tol=opts.rank_tol)
    return dual, primal


def solve_lexicographic(problem: LexGPProblem,
                        mode: LexMode = LexMode.STRICT,
                        carry_eps: float = 1e-6,
                        options: SolveOptions | None = None) -> LexSolution:
    """Run the stagewise procedure over all objectives.

    Any error inside a stage is re-raised as StageFailure carrying the
    stage index and the solutions already completed.
    """
    opts = options or SolveOptions()
    carried: list[Constraint] = []
    stages: list[StageSolution] = []
    last = len(problem.objectives) - 1
    for k, obj in enumerate(problem.objectives):
        try:
            s = build_stage(problem, k,
                            carried if mode is LexMode.STRICT else ())
            dod = degree_of_difficulty(s)
            dual, primal = solve_stage(s, opts)
            value = evaluate(obj, primal.x)
        except LexGPError as exc:
            raise StageFailure(k, str(exc), partial=stages) from exc
        bound = None
        if mode is LexMode.STRICT and k < last:
            carried.append(carry_constraint(obj, value, carry_eps))
            bound = value * (1.0 + carry_eps)
        stages.append(StageSolution(
            stage_index=k, stage=s, dual=dual, primal=primal,
            objective_value=value, carried_bound=bound,
            degree_of_difficulty=dod))
    final_x = stages[-1].primal.x
    return LexSolution(stages=tuple(stages), final_x=final_x,
                       objective_vector=evaluate_objective_vector(
                           problem, final_x),
                       mode=mode)


def stage_program(problem: LexGPProblem, index: int,
                  mode: LexMode = LexMode.STRICT, carry_eps: float = 1e-6,
                  options: SolveOptions | None = None) -> GPStage:
    """The stage exactly as :func:`solve_lexicographic` would pose it,
    solving the earlier stages first when their carried bounds are
    needed (Strict mode with index > 0)."""
    if mode is LexMode.INDEPENDENT or index == 0:
        return build_stage(problem, index, ())
    opts = options or SolveOptions()
    carried: list[Constraint] = []
    for k in range(index):
        try:
            s = build_stage(problem, k, carried)
            _, primal = solve_stage(s, opts)
            value = evaluate(problem.objectives[k], primal.x)
        except LexGPError as exc:
            raise StageFailure(k, str(exc)) from exc
        carried.append(carry_constraint(problem.objectives[k], value,
                                        carry_eps))
    return build_stage(problem, index, carried)


def evaluate_objective_vector(problem: LexGPProblem, x) -> np.ndarray:
    """All objective values at one point, in priority order."""
    vec = np.array([evaluate(g, x) for g in problem.objectives])
    vec.setflags(write=False)
    return vec
