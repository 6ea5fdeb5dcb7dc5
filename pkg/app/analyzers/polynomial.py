"""
Exact sparse multivariate polynomials over the rationals (sympy Poly over QQ)
"""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import QQ, Poly, Rational, Symbol, symbols

from app.core.errors import ArityMismatchError, NotDivisibleError, VariableIndexError

Exponent = tuple[int, ...]


@lru_cache(maxsize=32)
def generators(arity: int) -> tuple[Symbol, ...]:
    """The variables x1..x_arity"""
    if arity < 1:
        raise ArityMismatchError(f"arity must be at least 1, got {arity}")
    return tuple(symbols(f"x1:{arity + 1}"))


def _to_rational(c: Fraction | int) -> Rational:
    c = Fraction(c)
    return Rational(c.numerator, c.denominator)


def _to_fraction(c: object) -> Fraction:
    r = Rational(c)
    return Fraction(int(r.p), int(r.q))


@dataclass(frozen=True)
class Polynomial:
    """Polynomial in a fixed number of variables; the zero polynomial has no terms"""

    poly: Poly

    @classmethod
    def from_terms(cls, terms: Mapping[Exponent, Fraction | int], arity: int) -> "Polynomial":
        data = {}
        for exponent, coeff in terms.items():
            if len(exponent) != arity:
                raise ArityMismatchError(f"exponent {exponent} does not have length {arity}")
            if coeff:
                data[tuple(exponent)] = _to_rational(coeff)
        if not data:
            return cls.zero(arity)
        return cls(Poly.from_dict(data, *generators(arity), domain=QQ))

    @classmethod
    def zero(cls, arity: int) -> "Polynomial":
        return cls(Poly(0, *generators(arity), domain=QQ))

    @classmethod
    def constant(cls, c: Fraction | int, arity: int) -> "Polynomial":
        return cls.from_terms({(0,) * arity: c}, arity)

    @classmethod
    def variable(cls, i: int, arity: int) -> "Polynomial":
        """The coordinate x_{i+1} (0-based index)"""
        if not 0 <= i < arity:
            raise VariableIndexError(f"variable index {i} out of range for arity {arity}")
        return cls.from_terms({tuple(int(j == i) for j in range(arity)): 1}, arity)

    @classmethod
    def monomial(cls, exponent: Sequence[int], coeff: Fraction | int = 1) -> "Polynomial":
        return cls.from_terms({tuple(exponent): coeff}, len(exponent))

    @property
    def arity(self) -> int:
        return len(self.poly.gens)

    @property
    def is_zero(self) -> bool:
        return bool(self.poly.is_zero)

    def terms(self) -> dict[Exponent, Fraction]:
        if self.is_zero:
            return {}
        return {tuple(m): _to_fraction(c) for m, c in self.poly.terms()}

    def exponents(self) -> list[Exponent]:
        return [] if self.is_zero else [tuple(m) for m in self.poly.monoms()]

    def _check(self, other: "Polynomial") -> None:
        if other.arity != self.arity:
            raise ArityMismatchError(f"arity {self.arity} vs {other.arity}")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        return Polynomial(self.poly + other.poly)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        return Polynomial(self.poly - other.poly)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        return Polynomial(self.poly * other.poly)

    def divide_by_power(self, i: int, a: int) -> "Polynomial":
        """Exact division by x_{i+1}^a; every term must be divisible"""
        shifted = {}
        for exponent, coeff in self.terms().items():
            if exponent[i] < a:
                raise NotDivisibleError(f"term {exponent} is not divisible by x{i + 1}^{a}")
            shifted[exponent[:i] + (exponent[i] - a,) + exponent[i + 1:]] = coeff
        return Polynomial.from_terms(shifted, self.arity)

    def substitute_zero(self, i: int) -> "Polynomial":
        """Set x_{i+1} := 0, keeping the arity"""
        kept = {e: c for e, c in self.terms().items() if e[i] == 0}
        return Polynomial.from_terms(kept, self.arity)

    def compose(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute x_j := images[j] simultaneously; result has the images' arity"""
        if len(images) != self.arity:
            raise ArityMismatchError(f"need {self.arity} images, got {len(images)}")
        target = images[0].arity
        for image in images:
            if image.arity != target:
                raise ArityMismatchError("images have different arities")
        expr = self.poly.as_expr().subs(
            {x: image.poly.as_expr() for x, image in zip(self.poly.gens, images, strict=True)},
            simultaneous=True,
        )
        return Polynomial(Poly(expr, *generators(target), domain=QQ))

    def __str__(self) -> str:
        return str(self.poly.as_expr())
