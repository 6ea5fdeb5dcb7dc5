"""
Desk-scale semivaluations: monomial valuations, iterated lexicographic orders,
ideal values and normalization, the pi map and the skeleton retraction.

All arithmetic is exact: values are Fractions, with ``math.inf`` standing for +inf.
"""

import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import total_ordering
from typing import Protocol

from app.analyzers.polynomial import Polynomial
from app.core.errors import (
    ArityMismatchError,
    CenterNotMaximalError,
    EmptyIdealError,
    InvalidWeightsError,
    NormalizationError,
    NotNormalizableError,
    VariableIndexError,
)

logger = logging.getLogger(__name__)

INFINITY = math.inf
Value = Fraction | float


@dataclass(frozen=True)
class Weights:
    """Nonnegative rational weights beta_1..beta_d of the coordinates"""

    beta: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        beta = tuple(Fraction(b) for b in self.beta)
        if not beta:
            raise InvalidWeightsError("weights must not be empty")
        if any(b < 0 for b in beta):
            raise InvalidWeightsError(f"weights must be nonnegative: {[str(b) for b in beta]}")
        object.__setattr__(self, "beta", beta)

    @classmethod
    def of(cls, *values: Fraction | int | str) -> "Weights":
        return cls(tuple(Fraction(v) for v in values))

    @property
    def arity(self) -> int:
        return len(self.beta)

    def scaled(self, factor: Fraction) -> "Weights":
        return Weights(tuple(b * factor for b in self.beta))

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.beta)

    def __str__(self) -> str:
        return "(" + ", ".join(str(b) for b in self.beta) + ")"


@total_ordering
@dataclass(frozen=True)
class LexValue:
    """Value in Z^k under lexicographic order; ``digits is None`` is +inf"""

    digits: tuple[int, ...] | None
    length: int

    @classmethod
    def infinite(cls, length: int) -> "LexValue":
        return cls(None, length)

    @classmethod
    def of(cls, *digits: int) -> "LexValue":
        return cls(tuple(digits), len(digits))

    @property
    def is_infinite(self) -> bool:
        return self.digits is None

    def _check(self, other: "LexValue") -> None:
        if other.length != self.length:
            raise ArityMismatchError(f"lex values of length {self.length} and {other.length}")

    def __add__(self, other: "LexValue") -> "LexValue":
        self._check(other)
        if self.digits is None or other.digits is None:
            return LexValue.infinite(self.length)
        return LexValue(tuple(a + b for a, b in zip(self.digits, other.digits, strict=True)), self.length)

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, LexValue):
            return NotImplemented
        self._check(other)
        if self.digits is None:
            return False
        if other.digits is None:
            return True
        return self.digits < other.digits

    def __str__(self) -> str:
        return "+inf" if self.digits is None else "(" + ", ".join(map(str, self.digits)) + ")"


@dataclass(frozen=True)
class IteratedOrderSpec:
    """Stage order of variables (0-based indices) for an iterated lexicographic valuation"""

    order: tuple[int, ...]
    arity: int

    def __post_init__(self) -> None:
        if len(set(self.order)) != len(self.order):
            raise VariableIndexError(f"stage variables must be distinct: {self.order}")
        for i in self.order:
            if not 0 <= i < self.arity:
                raise VariableIndexError(f"variable index {i} out of range for arity {self.arity}")

    @property
    def covers_all(self) -> bool:
        return len(self.order) == self.arity


class Valuation(Protocol):
    def evaluate(self, f: Polynomial) -> Value | LexValue: ...


@dataclass(frozen=True)
class MonomialValuation:
    weights: Weights

    def evaluate(self, f: Polynomial) -> Value:
        return eval_monomial(self.weights, f)


@dataclass(frozen=True)
class IteratedValuation:
    spec: IteratedOrderSpec

    def evaluate(self, f: Polynomial) -> LexValue:
        return eval_iterated(self.spec, f)


class MonomialOrder(str, Enum):
    EQUAL = "equal"
    LESS_EQUAL = "<="
    GREATER_EQUAL = ">="
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class MonomialComparison:
    """``witnesses`` = (f, g) with nu(f) < nu'(f) and nu(g) > nu'(g), set when incomparable"""

    relation: MonomialOrder
    witnesses: tuple[Polynomial, Polynomial] | None = None


def maximal_ideal(arity: int) -> list[Polynomial]:
    return [Polynomial.variable(i, arity) for i in range(arity)]


def ord_var(f: Polynomial, i: int) -> int | float:
    """Largest power of x_{i+1} dividing f; +inf for f = 0"""
    if not 0 <= i < f.arity:
        raise VariableIndexError(f"variable index {i} out of range for arity {f.arity}")
    if f.is_zero:
        return INFINITY
    return min(e[i] for e in f.exponents())


def eval_monomial(beta: Weights, f: Polynomial) -> Value:
    """min over the monomials of f of sum beta_i alpha_i; +inf for f = 0"""
    if beta.arity != f.arity:
        raise ArityMismatchError(f"weights of arity {beta.arity} for a polynomial of arity {f.arity}")
    if f.is_zero:
        return INFINITY
    return min(sum((b * a for b, a in zip(beta.beta, e, strict=True)), Fraction(0)) for e in f.exponents())


def eval_iterated(spec: IteratedOrderSpec, f: Polynomial) -> LexValue:
    """
    Stage by stage: take the order at the stage variable, divide it out, set it to 0.

    After dividing, the stage variable no longer divides the polynomial, so
    setting it to 0 never turns a nonzero polynomial into 0.
    """
    if f.arity != spec.arity:
        raise ArityMismatchError(f"spec of arity {spec.arity} for a polynomial of arity {f.arity}")
    if f.is_zero:
        return LexValue.infinite(len(spec.order))
    digits = []
    current = f
    for i in spec.order:
        a = int(ord_var(current, i))
        digits.append(a)
        current = current.divide_by_power(i, a).substitute_zero(i)
    return LexValue(tuple(digits), len(digits))


def _as_valuation(v: Valuation | Weights) -> Valuation:
    return MonomialValuation(v) if isinstance(v, Weights) else v


def value_on_ideal(v: Valuation | Weights, gens: Sequence[Polynomial]) -> Value | LexValue:
    """nu(I) = min of nu over a generating set of I"""
    if not gens:
        raise EmptyIdealError("an ideal needs at least one generator")
    valuation = _as_valuation(v)
    return min(valuation.evaluate(g) for g in gens)  # type: ignore[type-var]


def _ideal_scale(beta: Weights, gens: Sequence[Polynomial]) -> Fraction:
    value = value_on_ideal(beta, gens)
    if value == 0 or value == INFINITY:
        raise NotNormalizableError(
            f"value {value} on the ideal: weights {beta} do not give a point of L(A,m)"
        )
    return Fraction(value)  # type: ignore[arg-type]


def normalize(beta: Weights, gens: Sequence[Polynomial]) -> Weights:
    """Scale beta so that its value on the ideal is exactly 1"""
    return beta.scaled(1 / _ideal_scale(beta, gens))


def pi_of_monomial(beta: Weights, f: Polynomial, gens: Sequence[Polynomial]) -> Value:
    scale = _ideal_scale(beta, gens)
    value = eval_monomial(beta, f)
    return INFINITY if value == INFINITY else Fraction(value) / scale


def pi_of_iterated(spec: IteratedOrderSpec, f: Polynomial) -> int | float:
    """
    Image under pi of the iterated valuation with maximal center.

    +inf when one of the first d-1 stage values is nonzero (f lies in the ideal
    of the first d-1 stage variables); otherwise the last stage value, already
    normalized because the last variable has value 1 on the maximal ideal.
    """
    if not spec.covers_all:
        raise CenterNotMaximalError(
            f"stage order {spec.order} does not cover all {spec.arity} variables"
        )
    value = eval_iterated(spec, f)
    if value.digits is None or any(value.digits[:-1]):
        return INFINITY
    return value.digits[-1]


def retract_to_skeleton(b1: int, b2: int, s1: Fraction, s2: Fraction) -> Fraction:
    """
    Skeleton parameter t of the point matching the coordinate values (s1, s2).

    Requires b1*s1 + b2*s2 = 1; then t/b1 = s1 and (1-t)/b2 = s2.
    """
    if b1 < 1 or b2 < 1:
        raise NormalizationError(f"multiplicities must be positive, got ({b1}, {b2})")
    s1, s2 = Fraction(s1), Fraction(s2)
    if s1 < 0 or s2 < 0:
        raise NormalizationError(f"values must be nonnegative, got ({s1}, {s2})")
    if b1 * s1 + b2 * s2 != 1:
        raise NormalizationError(f"{b1}*{s1} + {b2}*{s2} = {b1 * s1 + b2 * s2}, expected 1")
    return b1 * s1


def compare_monomial(beta: Weights, other: Weights) -> MonomialComparison:
    """Componentwise comparison, which is exactly the pointwise order of the valuations"""
    if beta.arity != other.arity:
        raise ArityMismatchError(f"arity {beta.arity} vs {other.arity}")
    if beta == other:
        return MonomialComparison(MonomialOrder.EQUAL)
    below = [i for i, (b, c) in enumerate(zip(beta, other, strict=True)) if b < c]
    above = [i for i, (b, c) in enumerate(zip(beta, other, strict=True)) if b > c]
    if not above:
        return MonomialComparison(MonomialOrder.LESS_EQUAL)
    if not below:
        return MonomialComparison(MonomialOrder.GREATER_EQUAL)
    return MonomialComparison(
        MonomialOrder.INCOMPARABLE,
        (Polynomial.variable(below[0], beta.arity), Polynomial.variable(above[0], beta.arity)),
    )
