"""lexgp: posynomial geometric programming with lexicographic objectives.

The model lives in :mod:`lexgp.posynomial`, the product-form dual and
its maximizer in :mod:`lexgp.duality`, primal recovery in
:mod:`lexgp.recovery`, the stagewise multi-objective driver in
:mod:`lexgp.lexicographic`, and an independent penalty-descent
cross-check in :mod:`lexgp.oracle`.  ``lexgp.cli`` is the command-line
front end (installed as ``lexgp``).
"""

from ._kernels import BACKEND as kernel_backend
from ._kernels import available_backends
from .cli import parse_problem
from .duality import (DualMethod, DualProgram, DualSolution, build_dual,
                      eval_dual, eval_log_dual, eval_log_dual_gradient,
                      solve_dual, weight_labels)
from .errors import (DegenerateDual, DualInfeasible, DualUnbounded,
                     EmptyObjectives, ExponentLengthMismatch,
                     InconsistentSystem, InfeasibleRecovery, InputError,
                     IterationLimit, LexGPError, MalformedDocument,
                     NonpositiveBound, NonpositiveCoefficient,
                     SamplerExhausted, SolverError, StageFailure)
from .lexicographic import (LexMode, LexSolution, SolveOptions,
                            StageSolution, build_stage, carry_constraint,
                            evaluate_objective_vector, solve_lexicographic,
                            solve_stage, stage_program)
from .oracle import (OracleResult, OracleStatus, penalty_value_and_gradient,
                     sample_feasible_points, solve_primal_log_space)
from .posynomial import (Constraint, GPStage, LexGPProblem, LexOrdering,
                         Posynomial, Term, degree_of_difficulty, evaluate,
                         evaluate_log, exponent_matrix, lex_compare,
                         normalize, rank)
from .recovery import (LogLinearSystem, PrimalReport, build_log_linear_system,
                       recover_primal, weights_from_primal, witness_direction)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
