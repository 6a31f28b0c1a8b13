"""Sections ``X + xi`` of ``(T + T*) (x) C`` and their pairings."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .forms import Form
from .poly import Poly, PolyLike, ZERO_POLY
from .scalar import Scalar, ScalarLike

HALF = Scalar(Fraction(1, 2))


class GenVector:
    """An immutable generalized vector with polynomial components.

    ``vec[k]`` is the coefficient of ``d_k`` and ``cov[k]`` that of ``e^k``.
    """

    __slots__ = ("vec", "cov")

    vec: tuple[Poly, ...]
    cov: tuple[Poly, ...]

    def __init__(self, vec: Sequence[PolyLike], cov: Sequence[PolyLike]) -> None:
        if len(vec) != len(cov):
            raise ValueError("vector and covector parts must have the same length")
        object.__setattr__(self, "vec", tuple(Poly.coerce(v) for v in vec))
        object.__setattr__(self, "cov", tuple(Poly.coerce(v) for v in cov))

    def __setattr__(self, name: str, value: object) -> None:  # pragma: no cover - guard
        raise AttributeError("GenVector is immutable")

    @property
    def dim(self) -> int:
        return len(self.vec)

    # -- constructors ----------------------------------------------------
    @staticmethod
    def zero(dim: int) -> "GenVector":
        return GenVector([ZERO_POLY] * dim, [ZERO_POLY] * dim)

    @staticmethod
    def d(dim: int, k: int, c: PolyLike = 1) -> "GenVector":
        """``c * d_k`` for a 1-based index ``k``."""
        v = [ZERO_POLY] * dim
        v[k - 1] = Poly.coerce(c)
        return GenVector(v, [ZERO_POLY] * dim)

    @staticmethod
    def e(dim: int, k: int, c: PolyLike = 1) -> "GenVector":
        """``c * e^k`` for a 1-based index ``k``."""
        v = [ZERO_POLY] * dim
        v[k - 1] = Poly.coerce(c)
        return GenVector([ZERO_POLY] * dim, v)

    @staticmethod
    def from_vector(vec: Sequence[PolyLike]) -> "GenVector":
        return GenVector(vec, [ZERO_POLY] * len(vec))

    @staticmethod
    def from_form(xi: Form) -> "GenVector":
        """Embed a 1-form as a section with zero vector part."""
        if xi.degrees() - {1}:
            raise ValueError("only 1-forms embed as generalized vectors")
        cov = [xi.terms.get(1 << k, ZERO_POLY) for k in range(xi.dim)]
        return GenVector([ZERO_POLY] * xi.dim, cov)

    @staticmethod
    def from_scalars(values: Sequence[ScalarLike]) -> "GenVector":
        """From the concatenated coordinates ``(X^1..X^m, xi_1..xi_m)``."""
        n = len(values) // 2
        return GenVector([Poly.const(v) for v in values[:n]], [Poly.const(v) for v in values[n:]])

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other: "GenVector") -> "GenVector":
        return GenVector([a + b for a, b in zip(self.vec, other.vec)], [a + b for a, b in zip(self.cov, other.cov)])

    def __sub__(self, other: "GenVector") -> "GenVector":
        return GenVector([a - b for a, b in zip(self.vec, other.vec)], [a - b for a, b in zip(self.cov, other.cov)])

    def __neg__(self) -> "GenVector":
        return GenVector([-a for a in self.vec], [-a for a in self.cov])

    def scale(self, c: PolyLike) -> "GenVector":
        p = Poly.coerce(c)
        return GenVector([a * p for a in self.vec], [a * p for a in self.cov])

    def __mul__(self, c: PolyLike) -> "GenVector":
        return self.scale(c)

    __rmul__ = __mul__

    def conjugate(self) -> "GenVector":
        return GenVector([a.conjugate() for a in self.vec], [a.conjugate() for a in self.cov])

    # -- views ---------------------------------------------------------
    def covector_form(self) -> Form:
        return Form.covector(self.dim, list(self.cov))

    def is_zero(self) -> bool:
        return not any(self.vec) and not any(self.cov)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_constant(self) -> bool:
        return all(c.is_constant() for c in (*self.vec, *self.cov))

    def to_scalars(self) -> list[Scalar]:
        return [c.constant_value() for c in (*self.vec, *self.cov)]

    def eval_at(self, point: Sequence[ScalarLike]) -> "GenVector":
        return GenVector([Poly.const(c.evaluate(point)) for c in self.vec],
                         [Poly.const(c.evaluate(point)) for c in self.cov])

    def max_degree(self) -> int:
        return max((c.degree() for c in (*self.vec, *self.cov)), default=-1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GenVector):
            return NotImplemented
        return self.vec == other.vec and self.cov == other.cov

    def __hash__(self) -> int:
        return hash((self.vec, self.cov))

    def __repr__(self) -> str:
        return f"GenVector({self})"

    def __str__(self) -> str:
        parts = []
        for k, c in enumerate(self.vec):
            if c:
                parts.append(_term(c, f"E{k + 1}"))
        for k, c in enumerate(self.cov):
            if c:
                parts.append(_term(c, f"e{k + 1}"))
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"


def _term(c: Poly, name: str) -> str:
    s = str(c)
    if s == "1":
        return name
    if s == "-1":
        return "-" + name
    if len(c.terms) > 1:
        return f"({s})*{name}"
    return f"{s}*{name}"


def inner(a: GenVector, b: GenVector, sign: int = 1) -> Poly:
    """``<X+xi, Y+eta>_{+/-} = 1/2 (xi(Y) +/- eta(X))``."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    xi_y = sum((x * y for x, y in zip(a.cov, b.vec)), ZERO_POLY)
    eta_x = sum((x * y for x, y in zip(b.cov, a.vec)), ZERO_POLY)
    return (xi_y + eta_x) * HALF if sign >= 0 else (xi_y - eta_x) * HALF


def clifford(v: GenVector, phi: Form) -> Form:
    """``(X + xi) . phi = i_X phi + xi ^ phi``."""
    if v.dim != phi.dim:
        raise ValueError("dimension mismatch")
    return phi.contract(list(v.vec)) + v.covector_form().wedge(phi)
