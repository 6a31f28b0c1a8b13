"""Sparse multivariate polynomials over the Gaussian rationals.

Monomials are stored sparsely as sorted tuples of ``(variable, exponent)``
pairs with 0-based variable indices, so polynomials in different numbers of
variables mix freely.  The constant monomial is the empty tuple.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .scalar import Scalar, ScalarLike

Monomial = tuple[tuple[int, int], ...]
PolyLike = Union["Poly", Scalar, int, Fraction]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps: dict[int, int] = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


class Poly:
    """An immutable polynomial; the zero polynomial has no terms."""

    __slots__ = ("terms", "_hash")

    terms: Mapping[Monomial, Scalar]

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None) -> None:
        clean: dict[Monomial, Scalar] = {}
        if terms:
            for mono, c in terms.items():
                c = Scalar.coerce(c)
                if not c.is_zero():
                    clean[mono] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name: str, value: object) -> None:  # pragma: no cover - guard
        raise AttributeError("Poly is immutable")

    # -- constructors ----------------------------------------------------
    @staticmethod
    def const(c: ScalarLike) -> "Poly":
        return Poly({(): Scalar.coerce(c)})

    @staticmethod
    def var(index: int, power: int = 1) -> "Poly":
        """The coordinate ``x_{index+1}`` (0-based index) raised to ``power``."""
        if power == 0:
            return Poly.const(1)
        return Poly({((index, power),): Scalar(1)})

    @staticmethod
    def coerce(value: PolyLike) -> "Poly":
        if isinstance(value, Poly):
            return value
        return Poly.const(Scalar.coerce(value))

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other: PolyLike) -> "Poly":
        try:
            o = Poly.coerce(other)
        except TypeError:
            return NotImplemented
        if not o.terms:
            return self
        if not self.terms:
            return o
        out = dict(self.terms)
        for mono, c in o.terms.items():
            out[mono] = out[mono] + c if mono in out else c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: PolyLike) -> "Poly":
        try:
            o = Poly.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: PolyLike) -> "Poly":
        return Poly.coerce(other) - self

    def __mul__(self, other: PolyLike) -> "Poly":
        if isinstance(other, Poly):
            if not self.terms or not other.terms:
                return ZERO_POLY
            out: dict[Monomial, Scalar] = {}
            for ma, ca in self.terms.items():
                for mb, cb in other.terms.items():
                    m = _mono_mul(ma, mb)
                    p = ca * cb
                    out[m] = out[m] + p if m in out else p
            return Poly(out)
        try:
            s = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        if s.is_zero():
            return ZERO_POLY
        return Poly({m: c * s for m, c in self.terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, other: ScalarLike) -> "Poly":
        s = Scalar.coerce(other)
        return self * s.inverse()

    def __pow__(self, k: int) -> "Poly":
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = Poly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def conjugate(self) -> "Poly":
        """Conjugate the coefficients (coordinates are real)."""
        return Poly({m: c.conjugate() for m, c in self.terms.items()})

    def real_part(self) -> "Poly":
        return Poly({m: Scalar(c.re) for m, c in self.terms.items()})

    def imag_part(self) -> "Poly":
        return Poly({m: Scalar(c.im) for m, c in self.terms.items()})

    # -- calculus -------------------------------------------------------
    def diff(self, index: int) -> "Poly":
        """Partial derivative with respect to the coordinate with 0-based ``index``."""
        out: dict[Monomial, Scalar] = {}
        for mono, c in self.terms.items():
            exps = dict(mono)
            e = exps.get(index, 0)
            if e == 0:
                continue
            if e == 1:
                del exps[index]
            else:
                exps[index] = e - 1
            m = tuple(sorted(exps.items()))
            v = c * e
            out[m] = out[m] + v if m in out else v
        return Poly(out)

    def evaluate(self, point: Sequence[ScalarLike]) -> Scalar:
        """Evaluate at a point; variables beyond ``len(point)`` must not occur."""
        pts = [Scalar.coerce(p) for p in point]
        total = Scalar(0)
        for mono, c in self.terms.items():
            term = c
            for v, e in mono:
                if v >= len(pts):
                    raise ValueError(f"point has {len(pts)} coordinates but x{v + 1} occurs")
                term = term * pts[v] ** e
            total = total + term
        return total

    def substitute(self, values: Mapping[int, "Poly"]) -> "Poly":
        """Substitute polynomials for some variables."""
        out = ZERO_POLY
        for mono, c in self.terms.items():
            term = Poly.const(c)
            for v, e in mono:
                term = term * (values[v] ** e if v in values else Poly.var(v, e))
            out = out + term
        return out

    # -- inspection -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant_value(self) -> Scalar:
        """The value of a constant polynomial (raises otherwise)."""
        if not self.is_constant():
            raise ValueError(f"polynomial {self} is not constant")
        return self.terms.get((), Scalar(0))

    def constant_term(self) -> Scalar:
        return self.terms.get((), Scalar(0))

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        if not self.terms:
            return -1
        return max(sum(e for _, e in m) for m in self.terms)

    def variables(self) -> set[int]:
        return {v for m in self.terms for v, _ in m}

    def monomials(self) -> Iterable[Monomial]:
        return self.terms.keys()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (Scalar, int, Fraction)):
            return self.terms == Poly.const(Scalar.coerce(other)).terms
        return NotImplemented

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash(frozenset(self.terms.items()))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, key=lambda m: (sum(e for _, e in m), m)):
            c = self.terms[mono]
            name = "*".join(f"x{v + 1}" + (f"^{e}" if e > 1 else "") for v, e in mono)
            if not name:
                parts.append(str(c))
            elif c == 1:
                parts.append(name)
            elif c == -1:
                parts.append("-" + name)
            else:
                parts.append(f"{c}*{name}")
        return " + ".join(parts).replace("+ -", "- ")


ZERO_POLY = Poly()


def monomials_up_to(nvars: int, degree: int) -> list[Monomial]:
    """All monomials in ``nvars`` variables of total degree at most ``degree``."""
    out: list[Monomial] = [()]
    if degree <= 0 or nvars == 0:
        return out

    def rec(start: int, remaining: int, current: dict[int, int]) -> None:
        for v in range(start, nvars):
            current[v] = current.get(v, 0) + 1
            out.append(tuple(sorted(current.items())))
            if remaining > 1:
                rec(v, remaining - 1, current)
            current[v] -= 1
            if current[v] == 0:
                del current[v]

    rec(0, degree, {})
    return out
