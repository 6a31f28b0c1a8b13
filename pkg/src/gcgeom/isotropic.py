"""Constant isotropic subspaces of ``(V + V*) (x) C`` and orthogonal block matrices.

Elements of ``V + V*`` are column vectors ``(X; xi)`` of length ``2m``.  A
2-form ``B`` acts as the map ``X -> i_X B``; with that reading the B-field
transform is ``exp(B) = [[1, 0], [B, 1]]`` and the beta-transform of a
bivector is ``exp(beta) = [[1, beta], [0, 1]]`` with ``xi -> i_xi beta``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from . import linalg as la
from .errors import ValidationError
from .forms import Form, two_form_matrix
from .genvector import GenVector
from .linalg import Matrix, Vector
from .scalar import Scalar, ScalarLike

HALF = Scalar(Fraction(1, 2))


def pairing_matrix(m: int) -> Matrix:
    """Gram matrix ``Q`` of ``<,>``: ``<u, v> = u^T Q v``."""
    q = la.zeros(2 * m, 2 * m)
    for i in range(m):
        q[i][m + i] = HALF
        q[m + i][i] = HALF
    return q


def pair(u: Sequence[Scalar], v: Sequence[Scalar]) -> Scalar:
    m = len(u) // 2
    s = Scalar(0)
    for i in range(m):
        if u[i] and v[m + i]:
            s = s + u[i] * v[m + i]
        if u[m + i] and v[i]:
            s = s + u[m + i] * v[i]
    return s * HALF


def two_form_map(form: Form) -> Matrix:
    """Matrix of ``X -> i_X B`` for a constant 2-form."""
    comp = two_form_matrix(form)
    return [[comp[i][j].constant_value() for i in range(form.dim)] for j in range(form.dim)]


def map_to_two_form(matrix: Matrix) -> Form:
    """Inverse of :func:`two_form_map` (matrix must be skew)."""
    m = len(matrix)
    return Form.from_bivector_matrix([[matrix[j][i] for j in range(m)] for i in range(m)])


def bivector_map(beta: Sequence[Sequence[ScalarLike]]) -> Matrix:
    """Matrix of ``xi -> i_xi beta`` for ``beta`` given by its skew component matrix."""
    b = la.as_matrix(beta)
    m = len(b)
    for i in range(m):
        for j in range(m):
            if b[i][j] + b[j][i]:
                raise ValidationError("bivector component matrix must be skew")
    return la.transpose(b)


def b_field_matrix(form: Form) -> Matrix:
    m = form.dim
    return la.block([[la.identity(m), la.zeros(m, m)], [two_form_map(form), la.identity(m)]])


def beta_matrix(beta: Sequence[Sequence[ScalarLike]]) -> Matrix:
    m = len(beta)
    return la.block([[la.identity(m), bivector_map(beta)], [la.zeros(m, m), la.identity(m)]])


def gl_matrix(g: Sequence[Sequence[ScalarLike]]) -> Matrix:
    """``X + xi -> g X + xi o g^{-1}``."""
    gm = la.as_matrix(g)
    m = len(gm)
    ginv_t = la.transpose(la.inverse(gm))
    return la.block([[gm, la.zeros(m, m)], [la.zeros(m, m), ginv_t]])


def is_orthogonal(t: Matrix) -> bool:
    m = len(t) // 2
    q = pairing_matrix(m)
    return la.equal(la.matmul(la.matmul(la.transpose(t), q), t), q)


def adjoint_skew(t: Matrix) -> bool:
    """``<T u, v> + <u, T v> = 0`` for all u, v (T in so(V+V*))."""
    m = len(t) // 2
    q = pairing_matrix(m)
    qt = la.matmul(q, t)
    return la.is_zero_matrix(la.add(qt, la.transpose(qt)))


class Isotropic:
    """An isotropic subspace presented by an independent isotropic basis."""

    def __init__(self, basis: Iterable[Sequence[ScalarLike]], dim: int, *, check: bool = True) -> None:
        self.dim = dim
        rows = [la.as_vector(v) for v in basis]
        for r in rows:
            if len(r) != 2 * dim:
                raise ValidationError(f"basis vectors must have length {2 * dim}")
        if check:
            for i, u in enumerate(rows):
                for v in rows[i:]:
                    if pair(u, v):
                        raise ValidationError("basis is not isotropic")
        self.rows: list[Vector] = la.row_basis(rows)
        if check and len(self.rows) != len(rows):
            raise ValidationError("basis vectors are linearly dependent")

    # -- constructors ----------------------------------------------------
    @staticmethod
    def from_genvectors(vectors: Iterable[GenVector], dim: int | None = None) -> "Isotropic":
        vs = list(vectors)
        if dim is None:
            if not vs:
                raise ValueError("dimension required for an empty basis")
            dim = vs[0].dim
        return Isotropic([v.to_scalars() for v in vs], dim)

    @staticmethod
    def tangent(dim: int) -> "Isotropic":
        """``V`` itself."""
        return Isotropic([[Scalar(1) if i == k else Scalar(0) for i in range(2 * dim)] for k in range(dim)], dim)

    @staticmethod
    def cotangent(dim: int) -> "Isotropic":
        """``V*``."""
        return Isotropic([[Scalar(1) if i == dim + k else Scalar(0) for i in range(2 * dim)] for k in range(dim)],
                         dim)

    @staticmethod
    def from_span(vectors: Sequence[Sequence[ScalarLike]], dim: int) -> "Isotropic":
        """From a possibly dependent spanning set (reduced to a basis)."""
        rows = la.row_basis([la.as_vector(v) for v in vectors])
        return Isotropic(rows, dim)

    # -- views ---------------------------------------------------------
    @property
    def rank(self) -> int:
        return len(self.rows)

    def is_maximal(self) -> bool:
        return self.rank == self.dim

    def genvectors(self) -> list[GenVector]:
        return [GenVector.from_scalars(r) for r in self.rows]

    def vector_parts(self) -> list[Vector]:
        return [r[: self.dim] for r in self.rows]

    def covector_parts(self) -> list[Vector]:
        return [r[self.dim:] for r in self.rows]

    def conjugate(self) -> "Isotropic":
        return Isotropic([[x.conjugate() for x in r] for r in self.rows], self.dim, check=False)

    def transform(self, t: Matrix) -> "Isotropic":
        """Image under a linear map of ``V + V*`` (must preserve isotropy)."""
        return Isotropic([la.matvec(t, r) for r in self.rows], self.dim)

    def contains(self, v: Sequence[Scalar]) -> bool:
        return la.in_span(list(v), self.rows)

    def intersection_dim(self, other: "Isotropic") -> int:
        return la.intersection_dim(self.rows, other.rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Isotropic):
            return NotImplemented
        return self.dim == other.dim and la.same_span(self.rows, other.rows)

    def __hash__(self) -> int:  # pragma: no cover - spans are compared, not hashed
        return hash(self.dim)

    def __repr__(self) -> str:
        return f"Isotropic(dim={self.dim}, rank={self.rank}, basis=[{', '.join(map(str, self.genvectors()))}])"
