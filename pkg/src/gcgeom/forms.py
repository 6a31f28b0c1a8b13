"""Exterior forms on a fixed coframe ``e^1, ..., e^m``.

A basis monomial ``e^{i1} ^ ... ^ e^{ik}`` with ``i1 < ... < ik`` is encoded by
the bitmask with bits ``i1-1, ..., ik-1`` set.  Every sign in the package comes
from counting transpositions between such canonically ordered monomials.

Forms double as spinors for ``V + V*``: the Clifford action, the Mukai
pairing and the spin lifts of orthogonal transformations all act on them.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .poly import Poly, PolyLike, ZERO_POLY
from .scalar import Scalar, ScalarLike

MAX_DIM = 16

Coef = Union[Poly, Scalar, int, Fraction]


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_indices(mask: int) -> list[int]:
    """0-based indices of the set bits, increasing."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def indices_mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def wedge_sign(a: int, b: int) -> int:
    """Sign of ``e^a ^ e^b`` relative to the canonical monomial ``e^(a|b)``.

    Returns 0 when the monomials share a factor.
    """
    if a & b:
        return 0
    swaps = 0
    bb = b
    while bb:
        low = bb & -bb
        # factors of a with larger index than this factor of b must pass it
        swaps += popcount(a & ~((low << 1) - 1))
        bb ^= low
    return -1 if swaps & 1 else 1


def contract_sign(k: int, mask: int) -> int:
    """Sign of ``i_{d_k}`` on the monomial ``mask`` (0-based ``k``), or 0."""
    if not (mask >> k) & 1:
        return 0
    return -1 if popcount(mask & ((1 << k) - 1)) & 1 else 1


class Form:
    """An immutable exterior form with polynomial (or constant) coefficients."""

    __slots__ = ("dim", "terms", "_hash")

    dim: int
    terms: Mapping[int, Poly]

    def __init__(self, dim: int, terms: Mapping[int, Coef] | None = None) -> None:
        if not 0 <= dim <= MAX_DIM:
            raise ValueError(f"dimension must be between 0 and {MAX_DIM}, got {dim}")
        clean: dict[int, Poly] = {}
        if terms:
            limit = 1 << dim
            for mask, c in terms.items():
                if not 0 <= mask < limit:
                    raise ValueError(f"basis mask {mask} out of range for dimension {dim}")
                p = Poly.coerce(c)
                if p:
                    clean[mask] = p
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name: str, value: object) -> None:  # pragma: no cover - guard
        raise AttributeError("Form is immutable")

    # -- constructors ----------------------------------------------------
    @staticmethod
    def zero(dim: int) -> "Form":
        return Form(dim)

    @staticmethod
    def one(dim: int, c: Coef = 1) -> "Form":
        return Form(dim, {0: c})

    @staticmethod
    def basis(dim: int, *indices: int) -> "Form":
        """The monomial ``e^{i1} ^ ... ^ e^{ik}`` for 1-based indices in any order."""
        f = Form.one(dim)
        for i in indices:
            if not 1 <= i <= dim:
                raise ValueError(f"generator e{i} out of range for dimension {dim}")
            f = f.wedge(Form(dim, {1 << (i - 1): 1}))
        return f

    @staticmethod
    def covector(dim: int, coeffs: Sequence[Coef]) -> "Form":
        if len(coeffs) != dim:
            raise ValueError("covector length must equal the dimension")
        return Form(dim, {1 << k: c for k, c in enumerate(coeffs)})

    @staticmethod
    def from_bivector_matrix(matrix: Sequence[Sequence[Coef]]) -> "Form":
        """The 2-form with ``F(e_i, e_j) = matrix[i][j]`` (matrix must be skew)."""
        dim = len(matrix)
        terms: dict[int, Coef] = {}
        for i in range(dim):
            for j in range(dim):
                a, b = Poly.coerce(matrix[i][j]), Poly.coerce(matrix[j][i])
                if a + b:
                    raise ValueError("component matrix of a 2-form must be skew")
            for j in range(i + 1, dim):
                terms[(1 << i) | (1 << j)] = matrix[i][j]
        return Form(dim, terms)

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "Form") -> None:
        if not isinstance(other, Form):
            raise TypeError(f"expected a Form, got {type(other).__name__}")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "Form") -> "Form":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return Form(self.dim, out)

    def __neg__(self) -> "Form":
        return Form(self.dim, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def scale(self, c: Coef) -> "Form":
        p = Poly.coerce(c)
        return Form(self.dim, {m: v * p for m, v in self.terms.items()})

    def __mul__(self, c: Coef) -> "Form":
        if isinstance(c, Form):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def wedge(self, other: "Form") -> "Form":
        self._check(other)
        out: dict[int, Poly] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                s = wedge_sign(ma, mb)
                if not s:
                    continue
                m = ma | mb
                v = ca * cb if s > 0 else -(ca * cb)
                out[m] = out[m] + v if m in out else v
        return Form(self.dim, out)

    def contract(self, vec: Sequence[Coef]) -> "Form":
        """Interior product ``i_X`` with ``X = sum vec[k] d_k``."""
        if len(vec) != self.dim:
            raise ValueError("vector length must equal the dimension")
        out: dict[int, Poly] = {}
        comps = [(k, Poly.coerce(x)) for k, x in enumerate(vec)]
        comps = [(k, x) for k, x in comps if x]
        for mask, c in self.terms.items():
            for k, x in comps:
                s = contract_sign(k, mask)
                if not s:
                    continue
                m = mask ^ (1 << k)
                v = c * x if s > 0 else -(c * x)
                out[m] = out[m] + v if m in out else v
        return Form(self.dim, out)

    def contract_basis(self, k: int) -> "Form":
        """Interior product with the 0-based frame vector ``d_k``."""
        out: dict[int, Poly] = {}
        for mask, c in self.terms.items():
            s = contract_sign(k, mask)
            if s:
                out[mask ^ (1 << k)] = c if s > 0 else -c
        return Form(self.dim, out)

    def evaluate(self, *vectors: Sequence[Coef]) -> "Form":
        """``a(X1, ..., Xk) = i_{Xk} ... i_{X1} a`` (a 0-form)."""
        f = self
        for v in vectors:
            f = f.contract(v)
        return f

    def value(self, *vectors: Sequence[Coef]) -> Poly:
        """The coefficient of ``a(X1, ..., Xk)`` as a polynomial."""
        return self.evaluate(*vectors).part(0).terms.get(0, ZERO_POLY)

    def reversal(self) -> "Form":
        """The main antiautomorphism: ``(-1)^{k(k-1)/2}`` on degree ``k``."""
        out = {}
        for m, c in self.terms.items():
            k = popcount(m)
            out[m] = -c if (k * (k - 1) // 2) & 1 else c
        return Form(self.dim, out)

    def parity_operator(self) -> "Form":
        """The grading automorphism: ``(-1)^k`` on degree ``k``."""
        return Form(self.dim, {m: -c if popcount(m) & 1 else c for m, c in self.terms.items()})

    def conjugate(self) -> "Form":
        return Form(self.dim, {m: c.conjugate() for m, c in self.terms.items()})

    def real_part(self) -> "Form":
        return Form(self.dim, {m: c.real_part() for m, c in self.terms.items()})

    def imag_part(self) -> "Form":
        return Form(self.dim, {m: c.imag_part() for m, c in self.terms.items()})

    def map_coefficients(self, fn) -> "Form":
        return Form(self.dim, {m: fn(c) for m, c in self.terms.items()})

    # -- grading --------------------------------------------------------
    def part(self, k: int) -> "Form":
        """The degree-``k`` component."""
        return Form(self.dim, {m: c for m, c in self.terms.items() if popcount(m) == k})

    def degrees(self) -> set[int]:
        return {popcount(m) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def parity(self) -> int | None:
        """0 for even, 1 for odd, ``None`` for mixed (the zero form is even)."""
        ps = {popcount(m) & 1 for m in self.terms}
        if not ps:
            return 0
        return ps.pop() if len(ps) == 1 else None

    def top_coefficient(self) -> Poly:
        return self.terms.get((1 << self.dim) - 1, ZERO_POLY)

    def top(self) -> "Form":
        return self.part(self.dim)

    # -- exponential ------------------------------------------------------
    def exp(self) -> "Form":
        """``exp`` of an even form without degree-0 part; the series is finite."""
        if self.terms.get(0):
            raise ValueError("exp requires a form with zero degree-0 part")
        if any(popcount(m) & 1 for m in self.terms):
            raise ValueError("exp is only defined for even forms")
        out = Form.one(self.dim)
        power = Form.one(self.dim)
        for k in range(1, self.dim // 2 + 1):
            power = power.wedge(self)
            if not power:
                break
            out = out + power.scale(Scalar(Fraction(1, factorial(k))))
        return out

    # -- coefficients ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(c.is_constant() for c in self.terms.values())

    def coefficient(self, *indices: int) -> Poly:
        """Coefficient of ``e^{i1...ik}`` for increasing 1-based indices."""
        return self.terms.get(indices_mask(i - 1 for i in indices), ZERO_POLY)

    def max_coefficient_degree(self) -> int:
        return max((c.degree() for c in self.terms.values()), default=-1)

    def eval_at(self, point: Sequence[ScalarLike]) -> "Form":
        """Evaluate polynomial coefficients at a point of the flat coordinate space."""
        if len(point) != self.dim:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.dim}")
        return Form(self.dim, {m: Poly.const(c.evaluate(point)) for m, c in self.terms.items()})

    def scalar_items(self) -> Iterator[tuple[int, Scalar]]:
        for m, c in self.terms.items():
            yield m, c.constant_value()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.dim, frozenset(self.terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        return f"Form({self.dim}, {self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (popcount(m), mask_indices(m))):
            c = self.terms[m]
            name = "e" + "".join(str(i + 1) for i in mask_indices(m)) if m else ""
            if self.dim >= 10 and m:
                name = "e" + "_".join(str(i + 1) for i in mask_indices(m))
            cs = str(c)
            if not name:
                parts.append(cs)
            elif cs == "1":
                parts.append(name)
            elif cs == "-1":
                parts.append("-" + name)
            elif len(c.terms) > 1:
                parts.append(f"({cs})*{name}")
            else:
                parts.append(f"{cs}*{name}")
        return " + ".join(parts).replace("+ -", "- ")


def two_form_matrix(form: Form) -> list[list[Poly]]:
    """Component matrix ``F[i][j] = F(e_i, e_j)`` of the degree-2 part."""
    m = form.dim
    mat = [[ZERO_POLY] * m for _ in range(m)]
    for mask, c in form.part(2).terms.items():
        i, j = mask_indices(mask)
        mat[i][j] = c
        mat[j][i] = -c
    return mat


def three_form_value(form: Form, i: int, j: int, k: int) -> Poly:
    """``H(e_i, e_j, e_k)`` for 0-based indices."""
    if len({i, j, k}) < 3:
        return ZERO_POLY
    mask = (1 << i) | (1 << j) | (1 << k)
    c = form.terms.get(mask)
    if c is None:
        return ZERO_POLY
    order = [i, j, k]
    # sign of the permutation sorting (i, j, k)
    inversions = sum(1 for a in range(3) for b in range(a + 1, 3) if order[a] > order[b])
    return -c if inversions & 1 else c


def wedge_all(forms: Iterable[Form], dim: int) -> Form:
    out = Form.one(dim)
    for f in forms:
        out = out.wedge(f)
    return out


def pullback_linear(form: Form, matrix: Sequence[Sequence[ScalarLike]]) -> Form:
    """Apply the algebra map induced by ``e^i -> sum_j matrix[i][j] e^j``."""
    m = form.dim
    images = [Form.covector(m, [Scalar.coerce(x) for x in row]) for row in matrix]
    out = Form.zero(m)
    for mask, c in form.terms.items():
        piece = Form.one(m, c)
        for i in mask_indices(mask):
            piece = piece.wedge(images[i])
        out = out + piece
    return out


def as_poly(c: PolyLike) -> Poly:
    return Poly.coerce(c)
