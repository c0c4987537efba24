"""Exception hierarchy.

Two families: ``InputError`` for problems with the data handed to us
(bad documents, nonpositive coefficients, shape mismatches) and
``SolverError`` for runs that start from valid data but cannot finish.
The CLI maps the first family to exit status 2 and the second to 1.
"""

from __future__ import annotations


class LexGPError(Exception):
    """Base class for everything raised by this package on purpose."""


class InputError(LexGPError, ValueError):
    """The problem description itself is invalid."""


class MalformedDocument(InputError):
    """A problem file could not be parsed or fails schema validation."""


class NonpositiveCoefficient(InputError):
    """A posynomial term carries a coefficient that is not > 0."""


class ExponentLengthMismatch(InputError):
    """An exponent row does not match the declared variable count."""


class EmptyObjectives(InputError):
    """A problem declares no objectives at all."""


class NonpositiveBound(InputError):
    """A constraint upper bound that is not > 0."""


class SolverError(LexGPError, RuntimeError):
    """A solve that started from valid data did not produce an answer."""


class DualInfeasible(SolverError):
    """No nonnegative solution of the dual equality system exists.

    Signals that the primal infimum is not attained in the usual way.
    """


class DualUnbounded(SolverError):
    """The dual objective increases without limit; the primal
    constraint set is very likely empty."""


class IterationLimit(SolverError):
    """An iterative solve hit its iteration cap before converging.

    The best iterate found so far is attached as ``best`` so callers can
    still inspect it.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class InconsistentSystem(SolverError):
    """The active log-linear system has no solution within tolerance."""


class InfeasibleRecovery(SolverError):
    """A recovered primal point violates a constraint beyond tolerance."""


class DegenerateDual(SolverError):
    """Every dual weight sits below the activity threshold, leaving no
    rows to recover a primal point from."""


class SamplerExhausted(SolverError):
    """Feasible-point sampling used up its draw budget."""


class StageFailure(SolverError):
    """A stage of a lexicographic solve failed.

    Carries ``stage_index`` and, in ``partial``, the stage solutions
    completed before the failure.
    """

    def __init__(self, stage_index: int, message: str, partial=()):
        super().__init__(f"stage {stage_index}: {message}")
        self.stage_index = stage_index
        self.partial = tuple(partial)
