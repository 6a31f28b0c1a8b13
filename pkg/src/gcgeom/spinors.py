"""Spinors for ``V + V*``: the exterior algebra with its Clifford action.

Conventions (all checked in the test-suite):

* ``(X + xi) . phi = i_X phi + xi ^ phi`` so ``v . v . phi = <v, v> phi``.
* Mukai pairing ``(s, t) = (alpha(s) ^ t)_top`` with the reversal ``alpha``.
* The B-field ``exp(B)`` (``X + xi -> X + xi + i_X B``) acts on spinors by
  ``exp(-B) ^``.
* For a bivector ``beta = 1/2 beta^{ab} d_a ^ d_b`` the contraction is
  ``i_beta = 1/2 beta^{ab} i_{d_b} i_{d_a}``; on ``R^2`` with
  ``beta = d_1 ^ d_2`` this gives ``i_beta(e^1 ^ e^2) = 1``.  The matching
  orthogonal map is ``xi -> xi + i_xi beta`` with ``(i_xi beta)^b = xi_a beta^{ab}``.
* An element ``T`` of ``so(V + V*)`` acts by ``1/4 sum_a (T u_a) . u^a . phi``
  where ``u^a`` is the ``<,>``-dual basis; on the three blocks this is
  ``-B ^``, ``i_beta`` and ``-A^* + 1/2 tr(A)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg as la
from .errors import InputError, ValidationError
from .forms import Form, pullback_linear, wedge_all
from .genvector import GenVector, clifford
from .isotropic import Isotropic
from .linalg import Matrix
from .poly import Poly
from .scalar import Scalar, ScalarLike, rational_sqrt

__all__ = [
    "clifford_act",
    "mukai_pairing",
    "mukai_value",
    "annihilator",
    "is_pure",
    "PurityReport",
    "b_transform_spinor",
    "beta_transform_spinor",
    "bivector_contract",
    "gl_spinor_action",
    "spinor_of_isotropic",
    "spin_action",
    "spin_action_matrix",
    "form_to_vector",
    "vector_to_form",
    "same_line",
]


def clifford_act(v: GenVector, phi: Form) -> Form:
    """Clifford action of a generalized vector on a form."""
    return clifford(v, phi)


def mukai_pairing(s: Form, t: Form) -> Form:
    """The top-degree form ``(alpha(s) ^ t)_top``."""
    if s.dim != t.dim:
        raise ValueError("dimension mismatch")
    return s.reversal().wedge(t).top()


def mukai_value(s: Form, t: Form) -> Poly:
    """The coefficient of ``e^1 ^ ... ^ e^m`` in the Mukai pairing."""
    return mukai_pairing(s, t).top_coefficient()


# -- linear-algebra views of spinors -----------------------------------------------

def form_to_vector(phi: Form) -> list[Scalar]:
    """Coordinates of a constant form in the monomial basis ordered by mask."""
    out = [Scalar(0)] * (1 << phi.dim)
    for mask, c in phi.scalar_items():
        out[mask] = c
    return out


def vector_to_form(values: Sequence[Scalar], dim: int) -> Form:
    return Form(dim, {mask: v for mask, v in enumerate(values) if v})


def _constant(phi: Form, what: str) -> None:
    if not phi.is_constant():
        raise InputError(f"{what} needs constant coefficients; evaluate at a point first")


def _clifford_columns(phi: Form) -> tuple[list[list[Scalar]], list[int]]:
    """Columns ``u_a . phi`` for the standard basis ``d_1..d_m, e^1..e^m``."""
    m = phi.dim
    images = []
    for k in range(m):
        images.append(phi.contract_basis(k))
    for k in range(m):
        images.append(Form(m, {1 << k: 1}).wedge(phi))
    masks = sorted({mask for f in images for mask in f.terms})
    cols = [[f.terms[mask].constant_value() if mask in f.terms else Scalar(0) for mask in masks] for f in images]
    return cols, masks


def annihilator(phi: Form) -> Isotropic:
    """``L_phi = {v : v . phi = 0}`` for a nonzero constant form."""
    _constant(phi, "annihilator")
    if not phi:
        raise InputError("the zero spinor has no annihilator")
    cols, masks = _clifford_columns(phi)
    m = phi.dim
    if not masks:
        basis = [[Scalar(1) if i == j else Scalar(0) for i in range(2 * m)] for j in range(2 * m)]
        return Isotropic(basis, m, check=False)
    matrix = la.transpose(cols)  # rows index monomials, columns the generators
    null = la.nullspace(matrix)
    return Isotropic(null, m)


@dataclass(frozen=True)
class PurityReport:
    pure: bool
    annihilator_dim: int
    type: int | None

    def __bool__(self) -> bool:
        return self.pure


def is_pure(phi: Form) -> PurityReport:
    """Pure iff the annihilator is maximal; the type is ``m - rank pi_V(L)``."""
    ann = annihilator(phi)
    if not ann.is_maximal():
        return PurityReport(False, ann.rank, None)
    k = phi.dim - la.span_rank(ann.vector_parts())
    return PurityReport(True, ann.rank, k)


def same_line(a: Form, b: Form) -> bool:
    """Whether two nonzero forms span the same line over constants."""
    if a.dim != b.dim or not a or not b or set(a.terms) != set(b.terms):
        return False
    for mask in a.terms:
        ca, cb = a.terms[mask], b.terms[mask]
        if ca.is_constant() and cb.is_constant():
            return a.scale(cb) == b.scale(ca)
    return False


# -- transforms -----------------------------------------------------------------

def b_transform_spinor(b: Form, phi: Form) -> Form:
    """Spinor lift of ``exp(B)``: ``phi -> exp(-B) ^ phi``."""
    if b.degrees() - {2}:
        raise InputError("B-field must be a 2-form")
    return (-b).exp().wedge(phi)


def _bivector_matrix(beta: Sequence[Sequence[ScalarLike | Poly]]) -> list[list[Poly]]:
    mat = [[Poly.coerce(x) for x in row] for row in beta]  # type: ignore[arg-type]
    n = len(mat)
    for i in range(n):
        if len(mat[i]) != n:
            raise InputError("bivector must be a square matrix")
        for j in range(n):
            if mat[i][j] + mat[j][i]:
                raise InputError("bivector component matrix must be skew")
    return mat


def bivector_contract(beta: Sequence[Sequence[ScalarLike | Poly]], phi: Form) -> Form:
    """``i_beta phi = 1/2 beta^{ab} i_{d_b} i_{d_a} phi = sum_{a<b} beta^{ab} i_b i_a phi``."""
    mat = _bivector_matrix(beta)
    if len(mat) != phi.dim:
        raise InputError("bivector dimension does not match the form")
    out = Form.zero(phi.dim)
    for a in range(phi.dim):
        ia = phi.contract_basis(a)
        if not ia:
            continue
        for b in range(a + 1, phi.dim):
            c = mat[a][b]
            if c:
                out = out + ia.contract_basis(b).scale(c)
    return out


def beta_transform_spinor(beta: Sequence[Sequence[ScalarLike | Poly]], phi: Form) -> Form:
    """``exp(beta) phi = (1 + i_beta + 1/2 i_beta^2 + ...) phi``."""
    out = phi
    term = phi
    k = 1
    while True:
        term = bivector_contract(beta, term).scale(Scalar(Fraction(1, k)))
        if not term:
            return out
        out = out + term
        k += 1


def gl_spinor_action(g: Sequence[Sequence[ScalarLike]], branch: int, phi: Form) -> Form:
    """Spin lift of ``g in GL(V)`` acting by ``g + (g^*)^{-1}`` on ``V + V*``.

    For ``det g > 0``: ``g . phi = sqrt(det g) (g^*)^{-1} phi`` (the branch is
    ignored).  For ``det g < 0`` branch 1 is ``-(-det g)^{1/2} (g^*)^{-1} phi``
    and branch 2 is ``+(-det g)^{1/2} (g^*)^{-1} phi``.  The square root must
    be rational.
    """
    gm = la.as_matrix(g)
    if len(gm) != phi.dim:
        raise InputError("matrix size does not match the form")
    if not la.is_real(gm):
        raise InputError("GL action needs a real matrix")
    d = la.det(gm)
    if d.is_zero():
        raise InputError("matrix is not invertible")
    root = rational_sqrt(abs(d.re))
    if root is None:
        raise InputError(f"|det g| = {abs(d.re)} has no rational square root")
    ginv = la.inverse(gm)
    # (g^*)^{-1} e^i = e^i o g^{-1} = sum_j (g^{-1})_{ij} e^j
    moved = pullback_linear(phi, ginv)
    if d.re > 0:
        factor = Scalar(root)
    elif branch == 1:
        factor = Scalar(-root)
    elif branch == 2:
        factor = Scalar(root)
    else:
        raise InputError("branch must be 1 or 2")
    return moved.scale(factor)


# -- spinors of L(E, eps) --------------------------------------------------------

def annihilator_of_subspace(e_basis: Sequence[Sequence[Scalar]], dim: int) -> list[list[Scalar]]:
    """A basis of ``Ann(E)`` in ``V*`` (rows are covector coefficients)."""
    if not e_basis:
        return [[Scalar(1) if i == k else Scalar(0) for i in range(dim)] for k in range(dim)]
    return la.nullspace([list(v) for v in e_basis])


def spinor_of_isotropic(e_basis: Sequence[Sequence[ScalarLike]], eps: Form,
                        extension: Form | None = None) -> Form:
    """A pure spinor for ``L(E, eps) = {X + xi : X in E, xi|_E = i_X eps|_E}``.

    ``eps`` and ``extension`` are 2-forms on ``V`` whose restrictions to ``E``
    must agree; the spinor is ``exp(-extension) ^ theta_1 ^ ... ^ theta_k`` for
    a basis ``theta`` of ``Ann(E)``.
    """
    dim = eps.dim
    ext = eps if extension is None else extension
    if ext.degrees() - {2} or eps.degrees() - {2}:
        raise InputError("eps and its extension must be 2-forms")
    basis = [la.as_vector(v) for v in e_basis]
    for u in basis:
        for v in basis:
            if eps.value(u, v) != ext.value(u, v):
                raise ValidationError("extension does not restrict to eps on E")
    thetas = [Form.covector(dim, row) for row in annihilator_of_subspace(basis, dim)]
    return (-ext).exp().wedge(wedge_all(thetas, dim))


# -- infinitesimal spin action ----------------------------------------------------

def _dual_basis(m: int) -> list[GenVector]:
    """``<,>``-dual of ``d_1..d_m, e^1..e^m``: ``2 e^k`` and ``2 d_k``."""
    return [GenVector.e(m, k + 1, 2) for k in range(m)] + [GenVector.d(m, k + 1, 2) for k in range(m)]


def spin_action(t: Sequence[Sequence[ScalarLike | Poly]], phi: Form) -> Form:
    """Action of ``T in so(V + V*)`` on a form: ``1/4 sum_a (T u_a) . u^a . phi``."""
    m = phi.dim
    tm = [[Poly.coerce(x) for x in row] for row in t]  # type: ignore[arg-type]
    if len(tm) != 2 * m:
        raise InputError("so element must be a 2m x 2m matrix")
    duals = _dual_basis(m)
    out = Form.zero(m)
    quarter = Scalar(Fraction(1, 4))
    for a in range(2 * m):
        col = [tm[r][a] for r in range(2 * m)]
        if not any(col):
            continue
        tu = GenVector(col[:m], col[m:])
        out = out + clifford(tu, clifford(duals[a], phi))
    return out.scale(quarter)


def spin_action_matrix(t: Matrix, dim: int, masks: Sequence[int] | None = None) -> tuple[Matrix, list[int]]:
    """Matrix of :func:`spin_action` on the monomials ``masks`` (default: all)."""
    ms = list(range(1 << dim)) if masks is None else list(masks)
    index = {mk: i for i, mk in enumerate(ms)}
    mat = la.zeros(len(ms), len(ms))
    for j, mk in enumerate(ms):
        img = spin_action(t, Form(dim, {mk: 1}))
        for mask, c in img.terms.items():
            if mask not in index:
                raise ValidationError("spin action leaves the chosen monomials")
            mat[index[mask]][j] = c.constant_value()
    return mat, ms
