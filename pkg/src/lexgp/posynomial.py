"""Posynomial algebra and the problem model.

A posynomial is a sum of terms c * x1**a1 * ... * xn**an with strictly
positive coefficients and arbitrary real exponents, over strictly
positive variables.  Everything downstream (the product-form dual, the
log-linear primal recovery, the lexicographic driver) is built on the
types here.

Term order is meaningful: dual weights, exponent-matrix rows and report
labels all follow declaration order, objective terms first.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (EmptyObjectives, ExponentLengthMismatch,
                     NonpositiveBound, NonpositiveCoefficient)


class LexOrdering(enum.Enum):
    """Outcome of a lexicographic comparison of two real vectors."""

    LESS = -1
    EQUAL = 0
    GREATER = 1


def _freeze(array):
    array = np.asarray(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Term:
    """One monomial term: ``coeff * prod_j x_j ** exponents[j]``."""

    coeff: float
    exponents: np.ndarray

    def __post_init__(self):
        coeff = float(self.coeff)
        if not np.isfinite(coeff) or coeff <= 0.0:
            raise NonpositiveCoefficient(
                f"term coefficient must be a positive finite number, got {self.coeff!r}")
        exps = _freeze(self.exponents)
        if exps.ndim != 1:
            raise ExponentLengthMismatch(
                f"exponents must be a flat vector, got shape {exps.shape}")
        if not np.all(np.isfinite(exps)):
            raise ExponentLengthMismatch("exponents must be finite")
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "exponents", exps)

    @property
    def n(self) -> int:
        return self.exponents.shape[0]


@dataclass(frozen=True)
class Posynomial:
    """A nonempty sum of terms over a common variable vector."""

    terms: tuple[Term, ...]

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ExponentLengthMismatch("a posynomial needs at least one term")
        n = terms[0].n
        for t in terms[1:]:
            if t.n != n:
                raise ExponentLengthMismatch(
                    f"term exponent lengths disagree: {t.n} vs {n}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_data(cls, coeffs, exponents) -> "Posynomial":
        """Build from a coefficient sequence and a matching list of
        exponent rows."""
        coeffs = list(coeffs)
        exponents = list(exponents)
        if len(coeffs) != len(exponents):
            raise ExponentLengthMismatch(
                f"{len(coeffs)} coefficients but {len(exponents)} exponent rows")
        return cls(tuple(Term(c, e) for c, e in zip(coeffs, exponents)))

    @property
    def n(self) -> int:
        return self.terms[0].n

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    def coeff_vector(self) -> np.ndarray:
        return np.array([t.coeff for t in self.terms])

    def exponent_rows(self) -> np.ndarray:
        """Term-by-variable exponent matrix, one row per term."""
        return np.array([t.exponents for t in self.terms])

    def scaled(self, factor: float) -> "Posynomial":
        """Same posynomial with every coefficient multiplied by factor > 0."""
        if factor <= 0.0:
            raise ValueError(f"scale factor must be positive, got {factor}")
        return Posynomial(tuple(Term(t.coeff * factor, t.exponents)
                                for t in self.terms))


@dataclass(frozen=True)
class Constraint:
    """An inequality ``lhs(x) <= bound`` with a positive upper bound."""

    lhs: Posynomial
    bound: float

    def __post_init__(self):
        bound = float(self.bound)
        if not np.isfinite(bound) or bound <= 0.0:
            raise NonpositiveBound(
                f"constraint bound must be a positive finite number, got {self.bound!r}")
        object.__setattr__(self, "bound", bound)


@dataclass(frozen=True)
class LexGPProblem:
    """Ordered objectives, shared constraints, named variables.

    Objectives are listed most important first; the solver treats the
    ordering as preemptive.
    """

    variable_names: tuple[str, ...]
    objectives: tuple[Posynomial, ...]
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        names = tuple(str(s) for s in self.variable_names)
        if not names:
            raise ExponentLengthMismatch("a problem needs at least one variable")
        if len(set(names)) != len(names):
            raise ExponentLengthMismatch("variable names must be distinct")
        objectives = tuple(self.objectives)
        if not objectives:
            raise EmptyObjectives("a problem needs at least one objective")
        n = len(names)
        for k, g in enumerate(objectives):
            if g.n != n:
                raise ExponentLengthMismatch(
                    f"objective {k} has {g.n} exponents per term, expected {n}")
        constraints = tuple(self.constraints)
        for i, c in enumerate(constraints):
            if c.lhs.n != n:
                raise ExponentLengthMismatch(
                    f"constraint {i} has {c.lhs.n} exponents per term, expected {n}")
        object.__setattr__(self, "variable_names", names)
        object.__setattr__(self, "objectives", objectives)
        object.__setattr__(self, "constraints", constraints)

    @property
    def n(self) -> int:
        return len(self.variable_names)


@dataclass(frozen=True)
class GPStage:
    """A single-objective program in standard form.

    The objective is minimized subject to ``g_i(x) <= 1`` for each
    entry of ``constraints`` (already normalized to unit bounds).
    """

    objective: Posynomial
    constraints: tuple[Posynomial, ...]
    n: int

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ExponentLengthMismatch(
                f"a stage needs at least one variable, got n={n}")
        if self.objective.n != n:
            raise ExponentLengthMismatch(
                f"objective has {self.objective.n} exponents per term, expected {n}")
        constraints = tuple(self.constraints)
        for i, g in enumerate(constraints):
            if g.n != n:
                raise ExponentLengthMismatch(
                    f"constraint {i} has {g.n} exponents per term, expected {n}")
        object.__setattr__(self, "constraints", constraints)
        object.__setattr__(self, "n", n)

    @property
    def num_terms(self) -> int:
        """Total term count, objective plus all constraints."""
        return self.objective.num_terms + sum(g.num_terms
                                              for g in self.constraints)

    def blocks(self):
        """Yield (block_index, posynomial): 0 is the objective, then
        constraints in declaration order."""
        yield 0, self.objective
        for i, g in enumerate(self.constraints, start=1):
            yield i, g


def evaluate(p: Posynomial, x) -> float:
    """Value of ``p`` at a strictly positive point, by direct powers."""
    x = np.asarray(x, dtype=float)
    if x.shape != (p.n,):
        raise ValueError(f"point has shape {x.shape}, expected ({p.n},)")
    if not np.all(x > 0.0):
        raise ValueError("posynomials are defined for strictly positive x only")
    powers = np.prod(x[None, :] ** p.exponent_rows(), axis=1)
    return float(p.coeff_vector() @ powers)


def evaluate_log(p: Posynomial, z):
    """Value of ``p`` at ``x = exp(z)`` and the gradient of that value
    with respect to z.

    Runs through a max-shifted sum of exponentials, so it stays finite
    where the direct power form of :func:`evaluate` would overflow.
    Returns ``(value, grad)`` with ``grad[j] = d value / d z_j``.
    """
    z = np.asarray(z, dtype=float)
    if z.shape != (p.n,):
        raise ValueError(f"point has shape {z.shape}, expected ({p.n},)")
    logc = np.log(p.coeff_vector())
    A = np.ascontiguousarray(p.exponent_rows())
    value, grad = _kernels.posy_eval_log(logc, A, z)
    return float(value), np.asarray(grad)


def normalize(c: Constraint) -> Posynomial:
    """Rewrite ``lhs <= bound`` as ``lhs/bound <= 1`` and return the
    scaled left side."""
    return c.lhs.scaled(1.0 / c.bound)


def exponent_matrix(s: GPStage) -> np.ndarray:
    """Stacked exponent rows of a stage: objective terms first, then
    each constraint's terms in declaration order."""
    rows = [s.objective.exponent_rows()]
    rows.extend(g.exponent_rows() for g in s.constraints)
    return np.vstack(rows)


def rank(m, tol: float = 1e-9) -> int:
    """Numerical rank by Gaussian elimination with partial pivoting.

    A pivot counts as zero when its magnitude is at most ``tol`` times
    the largest absolute entry of the input.  The empty matrix has rank
    zero.
    """
    a = np.array(m, dtype=float, copy=True)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={a.ndim}")
    if a.size == 0:
        return 0
    biggest = float(np.abs(a).max())
    if biggest == 0.0:
        return 0
    thresh = tol * biggest
    nrows, ncols = a.shape
    r = 0
    for col in range(ncols):
        if r == nrows:
            break
        piv = r + int(np.argmax(np.abs(a[r:, col])))
        if abs(a[piv, col]) <= thresh:
            continue
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] / a[r, col]
        below = a[r + 1:, col].copy()
        a[r + 1:] -= np.outer(below, a[r])
        r += 1
    return r


def degree_of_difficulty(s: GPStage) -> int:
    """Term count minus variable count minus one.

    Zero means the dual weights are pinned by the equality conditions
    alone; positive values leave that many dual degrees of freedom.  A
    negative value (fewer terms than variables plus one) is legal input
    but usually signals a modeling mistake, so it draws a warning.
    """
    d = s.num_terms - s.n - 1
    if d < 0:
        warnings.warn(
            f"degree of difficulty is negative ({d}): the stage has fewer "
            "terms than variables plus one", RuntimeWarning, stacklevel=2)
    return d


def lex_compare(u, v, tol: float = 1e-9) -> LexOrdering:
    """Compare two vectors lexicographically with a per-entry absolute
    tolerance: entries closer than ``tol`` are treated as ties."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(
            f"lex_compare needs two equal-length vectors, got {u.shape} and {v.shape}")
    for a, b in zip(u, v):
        d = a - b
        if abs(d) > tol:
            return LexOrdering.LESS if d < 0 else LexOrdering.GREATER
    return LexOrdering.EQUAL
