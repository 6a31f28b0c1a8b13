"""Generalized complex structures.

A generalized complex structure is presented by the frame of its ``+i``
eigenbundle ``L``; when that frame is constant the endomorphism ``J`` of
``V + V*`` is available as an exact matrix (column vectors ``(X; xi)``).

Standard structures::

    J_omega = [[0, -omega^{-1}], [omega, 0]]      (spinor exp(i omega))
    J_J     = [[-J, 0], [0, J^*]]                (spinor Omega^{n,0})

where ``omega`` is the map ``X -> i_X omega`` and ``J^*`` acts on covectors by
``xi -> xi o J``.

The spin action of ``J`` splits forms as ``U_0 + ... + U_{2n}`` with ``U_k`` the
``i(n - k)`` eigenspace and ``U_0`` the canonical line.  Deformations are
described by ``eps`` in ``wedge^2 L^*``, identified with ``wedge^2 conj(L)``
through ``2 <,>``: for the frame ``l_a`` of ``L`` with dual frame ``u^a`` of
``conj(L)`` (``2 <u^a, l_b> = delta``), ``eps(l_a) = sum_b eps_ab u^b`` and
``L_eps = {l + eps(l)}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Sequence

from . import linalg as la
from .dirac import (Classification, DiracFrame, InvolutivityReport, classify, courant, extract_e_eps,
                    is_involutive)
from .errors import InputError, UnsupportedError, ValidationError
from .forms import Form, mask_indices, popcount
from .genvector import GenVector, inner
from .isotropic import Isotropic, adjoint_skew, b_field_matrix, pairing_matrix, two_form_map
from .linalg import Matrix
from .model import FlatModel, LieAlgebraModel, Model
from .poly import Poly, PolyLike, ZERO_POLY
from .scalar import I, Scalar
from .spinors import annihilator, mukai_value, same_line, spin_action, spinor_of_isotropic

__all__ = [
    "GCStructure",
    "j_symplectic",
    "j_complex",
    "from_spinor",
    "from_matrix",
    "from_frame",
    "IntegrabilityReport",
    "check_integrable",
    "parity",
    "DarbouxData",
    "algebraic_darboux",
    "Grading",
    "grading",
    "DelDelbar",
    "del_delbar_split",
    "d_j",
    "deform",
    "deformation_matrix",
    "d_lie_algebroid",
    "schouten",
    "mc_residual",
    "eps_form",
    "dual_frame",
    "invariant_cohomology_dim",
    "hyperkahler_interpolation",
]


# -- standard matrices --------------------------------------------------------------

def j_symplectic(omega: Form) -> Matrix:
    """``J_omega`` for a constant nondegenerate real 2-form."""
    w = two_form_map(omega)
    m = omega.dim
    try:
        winv = la.inverse(w)
    except ZeroDivisionError:
        raise ValidationError("symplectic form is degenerate") from None
    return la.block([[la.zeros(m, m), la.neg(winv)], [w, la.zeros(m, m)]])


def j_complex(jmat: Sequence[Sequence[object]]) -> Matrix:
    """``J_J = [[-J, 0], [0, J^*]]`` for a complex structure ``J`` on ``V``."""
    j = la.as_matrix(jmat)  # type: ignore[arg-type]
    m = len(j)
    if not la.equal(la.matmul(j, j), la.neg(la.identity(m))):
        raise ValidationError("J^2 != -1")
    return la.block([[la.neg(j), la.zeros(m, m)], [la.zeros(m, m), la.transpose(j)]])


# -- the structure ---------------------------------------------------------------

@dataclass
class GCStructure:
    """A generalized (almost) complex structure given by the frame of ``L``."""

    model: Model
    frame: DiracFrame
    matrix: Matrix | None = None
    _spinor: Form | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.model.dim

    @property
    def sections(self) -> list[GenVector]:
        return self.frame.sections

    def is_constant(self) -> bool:
        return all(s.is_constant() for s in self.sections)

    def isotropic(self, point: Sequence[object] | None = None) -> Isotropic:
        if self.is_constant():
            return Isotropic([s.to_scalars() for s in self.sections], self.dim)
        if point is None:
            raise InputError("a point is required for a structure with non-constant frame")
        return self.frame.eval_at(point)  # type: ignore[arg-type]

    def spinor(self) -> Form:
        """A representing pure spinor (polynomial coefficients on flat models)."""
        if self._spinor is None:
            self._spinor = self.frame.representing_spinor()
        return self._spinor

    def classify(self, point: Sequence[object] | None = None) -> Classification:
        return classify(self.isotropic(point))

    def require_matrix(self) -> Matrix:
        if self.matrix is None:
            raise UnsupportedError("the structure has no constant matrix (non-constant frame)")
        return self.matrix

    def conjugate_frame(self) -> list[GenVector]:
        return [s.conjugate() for s in self.sections]

    def with_model(self, model: Model) -> "GCStructure":
        return GCStructure(model, DiracFrame(model, list(self.sections)), self.matrix, self._spinor)


def _matrix_from_rows(rows: Sequence[Sequence[Scalar]], m: int) -> Matrix:
    """``J`` with ``+i`` on ``L`` (rows) and ``-i`` on the conjugate."""
    cols = [list(r) for r in rows] + [[x.conjugate() for x in r] for r in rows]
    p = la.transpose(cols)
    d = la.zeros(2 * m, 2 * m)
    for k in range(m):
        d[k][k] = I
        d[m + k][m + k] = -I
    try:
        pinv = la.inverse(p)
    except ZeroDivisionError:
        raise ValidationError("L and its conjugate intersect: real index is not zero") from None
    j = la.matmul(la.matmul(p, d), pinv)
    if not la.is_real(j):  # pragma: no cover - conjugate-symmetric construction
        raise ValidationError("J is not real")
    return j


def _real_index_zero(L: Isotropic) -> bool:
    return L.intersection_dim(L.conjugate()) == 0


def from_frame(model: Model, sections: Sequence[GenVector], spinor: Form | None = None) -> GCStructure:
    frame = DiracFrame(model, list(sections))
    if not frame.is_maximal():
        raise ValidationError(f"frame has rank {frame.rank}, expected {model.dim}")
    matrix = None
    if all(s.is_constant() for s in sections):
        L = Isotropic([s.to_scalars() for s in sections], model.dim)
        if not _real_index_zero(L):
            raise ValidationError("real index is not zero")
        matrix = _matrix_from_rows(L.rows, model.dim)
    else:
        _check_real_index_generic(frame)
    return GCStructure(model, frame, matrix, spinor)


def _check_real_index_generic(frame: DiracFrame) -> None:
    from .dirac import _generic_point  # local import keeps the helper private
    pt = _generic_point(frame.model.dim)
    L = frame.eval_at(pt)
    if not L.is_maximal() or not _real_index_zero(L):
        raise ValidationError("frame does not have real index zero at a generic point")


def from_spinor(model: Model, phi: Form, degree_bound: int | None = None) -> GCStructure:
    """The structure whose ``+i`` eigenbundle annihilates ``phi``.

    For constant ``phi``: requires purity and ``(phi, conj(phi)) != 0``.  For
    polynomial ``phi`` on a flat model the frame is found by a bounded-degree
    solve and real index zero is checked through the Mukai pairing.
    """
    if phi.dim != model.dim:
        raise InputError("spinor dimension does not match the model")
    if not phi:
        raise InputError("the zero spinor does not define a structure")
    if phi.is_constant():
        L = annihilator(phi)
        if not L.is_maximal():
            raise ValidationError(f"spinor is not pure (annihilator has dimension {L.rank})")
        r = L.intersection_dim(L.conjugate())
        if r:
            raise ValidationError(f"real index {r} != 0: Mukai pairing (phi, conj phi) vanishes")
        sections = [GenVector.from_scalars(row) for row in L.rows]
        return GCStructure(model, DiracFrame(model, sections), _matrix_from_rows(L.rows, model.dim), phi)
    if not isinstance(model, FlatModel):
        raise InputError("invariant models take constant-coefficient spinors only")
    pairing = mukai_value(phi, phi.conjugate())
    if not pairing:
        raise ValidationError("Mukai pairing (phi, conj phi) vanishes identically: real index is not zero")
    frame = DiracFrame.from_spinor(model, phi, degree_bound)
    if not frame.is_maximal():
        raise ValidationError("spinor is not pure at a generic point")
    return GCStructure(model, frame, None, phi)


def from_matrix(model: Model, j: Sequence[Sequence[object]]) -> GCStructure:
    """Validate ``J^2 = -1`` and orthogonality, then compute the ``+i`` eigenframe."""
    jm = la.as_matrix(j)  # type: ignore[arg-type]
    m = model.dim
    if len(jm) != 2 * m or any(len(r) != 2 * m for r in jm):
        raise InputError(f"J must be {2 * m} x {2 * m}")
    if not la.is_real(jm):
        raise ValidationError("J must be real")
    if not la.equal(la.matmul(jm, jm), la.neg(la.identity(2 * m))):
        raise ValidationError("J^2 != -1")
    if not adjoint_skew(jm):
        raise ValidationError("J is not orthogonal (J^* != -J)")
    shifted = [[jm[r][c] - (I if r == c else Scalar(0)) for c in range(2 * m)] for r in range(2 * m)]
    rows = la.nullspace(shifted)
    L = Isotropic(rows, m)
    sections = [GenVector.from_scalars(r) for r in L.rows]
    return GCStructure(model, DiracFrame(model, sections), jm)


# -- integrability ----------------------------------------------------------------

@dataclass
class IntegrabilityReport:
    integrable: bool
    involutivity: InvolutivityReport
    regular: bool | None
    detail: list[str]

    @property
    def agree(self) -> bool:
        inv = self.involutivity
        routes = [inv.nij_route] + ([inv.spinor_route] if inv.spinor_route is not None else [])
        if self.regular is not None:
            routes.append(self.regular)
        return len(set(routes)) == 1


def _regular_check(gcs: GCStructure, twisted: bool) -> tuple[bool, list[str]]:
    """``L = L(E, eps)`` is involutive iff ``E`` is involutive and ``(dF - H)|_E = 0``.

    Here ``F`` is a constant extension of ``eps`` (the spinor is ``exp(-F) ^ theta``).
    """
    model = gcs.model
    ee = extract_e_eps(gcs.isotropic())
    notes = []
    basis = ee.e_basis
    ok_e = True
    for a in range(len(basis)):
        for b in range(a + 1, len(basis)):
            br = model.bracket(tuple(Poly.const(x) for x in basis[a]), tuple(Poly.const(x) for x in basis[b]))
            vals = [c.constant_value() for c in br]
            if not la.in_span(vals, basis):
                ok_e = False
    if not ok_e:
        notes.append("E is not involutive")
    three = model.d(ee.extension)
    if twisted and model.twist is not None:
        three = three - model.twist
    ok_f = True
    for a in range(len(basis)):
        for b in range(a + 1, len(basis)):
            for c in range(b + 1, len(basis)):
                if three.value(basis[a], basis[b], basis[c]):
                    ok_f = False
    if not ok_f:
        notes.append("(dF - H) does not vanish on E")
    return ok_e and ok_f, notes


def check_integrable(gcs: GCStructure, twisted: bool = False, degree_bound: int | None = None
                     ) -> IntegrabilityReport:
    """Courant involutivity of ``L`` (two routes) plus, for constant frames, the ``L(E, eps)`` test."""
    inv = is_involutive(gcs.frame, twisted=twisted, degree_bound=degree_bound)
    detail = [f"Nij({i},{j},{k}) = {v}" for i, j, k, v in inv.failures[:5]]
    regular = None
    if gcs.is_constant():
        regular, notes = _regular_check(gcs, twisted)
        detail.extend(notes)
    if inv.spinor_route is False:
        detail.append("no witness X + xi with d rho = (X + xi) . rho within the degree bound")
    integrable = inv.nij_route and inv.spinor_route is not False
    return IntegrabilityReport(integrable, inv, regular, detail)


# -- parity via the Pfaffian ---------------------------------------------------------

def _pfaffian_sign(j: Matrix) -> int:
    m = len(j) // 2
    s = la.matmul(la.transpose(j), pairing_matrix(m))  # S(u, v) = <J u, v>
    pf = la.pfaffian(s)
    if pf.is_zero() or not pf.is_real():  # pragma: no cover - J orthogonal complex
        raise ValidationError("degenerate Pfaffian")
    return 1 if pf.re > 0 else -1


def _reference_sign(m: int) -> int:
    omega = Form.zero(m)
    for k in range(0, m - 1, 2):
        omega = omega + Form.basis(m, k + 1, k + 2)
    return _pfaffian_sign(j_symplectic(omega))


def parity(gcs: GCStructure) -> str:
    """Parity from the sign of the Pfaffian of ``<J ., .>``.

    The orientation of ``V + V*`` is normalised so that the standard symplectic
    structure is even; agreement with the parity of the representing spinor is
    a tested property.
    """
    j = gcs.require_matrix()
    m = len(j) // 2
    if m % 2:
        raise ValidationError("generalized complex structures need even dimension")
    return "even" if _pfaffian_sign(j) == _reference_sign(m) else "odd"


# -- algebraic Darboux decomposition -------------------------------------------------

@dataclass(frozen=True)
class DarbouxData:
    """``phi = c exp(B + i omega) ^ Omega`` with real ``B, omega`` and decomposable ``Omega``."""

    k: int
    b: Form
    omega: Form
    big_omega: Form
    c: Scalar

    def spinor(self) -> Form:
        return (self.b + self.omega.scale(I)).exp().wedge(self.big_omega).scale(self.c)


def algebraic_darboux(phi: Form) -> DarbouxData:
    """Split a constant pure spinor of real index zero as ``c exp(B + i omega) Omega``."""
    if not phi.is_constant():
        raise InputError("algebraic Darboux decomposition needs constant coefficients")
    L = annihilator(phi)
    if not L.is_maximal():
        raise ValidationError("spinor is not pure")
    if L.intersection_dim(L.conjugate()):
        raise ValidationError("real index is not zero")
    m = phi.dim
    ee = extract_e_eps(L)
    e_basis = ee.e_basis
    conj = [[x.conjugate() for x in v] for v in e_basis]
    full = la.complete_basis(e_basis, m, candidates=conj)
    p = la.transpose(full)
    pinv = la.inverse(p)
    kdim = len(e_basis)
    eps_full = la.zeros(m, m)
    for a in range(kdim):
        for b in range(kdim):
            eps_full[a][b] = ee.eps_matrix[a][b]
    f = Form.from_bivector_matrix(la.matmul(la.matmul(la.transpose(pinv), eps_full), pinv))
    thetas = la.nullspace([list(v) for v in e_basis], ncols=m) if e_basis else la.identity(m)
    big_omega = Form.one(m)
    for t in thetas:
        big_omega = big_omega.wedge(Form.covector(m, t))
    psi = (-f).exp().wedge(big_omega)
    mask, coef = next(iter(phi.scalar_items()))
    ref = psi.terms.get(mask)
    if ref is None or not same_line(phi, psi):  # pragma: no cover - guaranteed by purity
        raise ValidationError("internal error: decomposition does not reproduce the spinor line")
    c = coef / ref.constant_value()
    return DarbouxData(len(thetas), (-f).real_part(), (-f).imag_part(), big_omega, c)


# -- the U_k grading -----------------------------------------------------------------

@dataclass
class Grading:
    components: list[Form]

    def total(self) -> Form:
        out = Form.zero(self.components[0].dim)
        for c in self.components:
            out = out + c
        return out

    def support(self) -> list[int]:
        return [k for k, c in enumerate(self.components) if c]


def _eigenvalue(n: int, k: int) -> Scalar:
    return I * (n - k)


def _apply(j: Matrix, phi: Form) -> Form:
    return spin_action(j, phi)


def _projector(j: Matrix, phi: Form, k: int) -> Form:
    m = len(j) // 2
    n = m // 2
    out = phi
    denom = Scalar(1)
    for other in range(m + 1):
        if other == k:
            continue
        lam = _eigenvalue(n, other)
        out = _apply(j, out) - out.scale(lam)
        denom = denom * (_eigenvalue(n, k) - lam)
        if not out:
            return out
    return out.scale(denom.inverse())


def grading(gcs: GCStructure, phi: Form) -> Grading:
    """Components of ``phi`` in ``U_0, ..., U_m`` (``U_k``: ``i(n-k)`` eigenspace of the spin action)."""
    j = gcs.require_matrix()
    if phi.dim != gcs.dim:
        raise InputError("form dimension does not match the structure")
    return Grading([_projector(j, phi, k) for k in range(gcs.dim + 1)])


def _homogeneous_degree(gcs: GCStructure, phi: Form) -> int:
    g = grading(gcs, phi)
    supp = g.support()
    if len(supp) != 1:
        raise InputError(f"form is not homogeneous for the grading (components in U_{supp})")
    return supp[0]


@dataclass
class DelDelbar:
    k: int
    del_part: Form
    delbar_part: Form
    residual: Form


def del_delbar_split(gcs: GCStructure, phi: Form, twisted: bool = False) -> DelDelbar:
    """``d phi`` projected to ``U_{k-1}`` and ``U_{k+1}``; the rest is the residual."""
    zero = Form.zero(gcs.dim)
    if not phi:
        return DelDelbar(0, zero, zero, zero)
    k = _homogeneous_degree(gcs, phi)
    j = gcs.require_matrix()
    dphi = gcs.model.d_maybe_twisted(phi, twisted)
    down = _projector(j, dphi, k - 1) if k >= 1 else zero
    up = _projector(j, dphi, k + 1) if k + 1 <= gcs.dim else zero
    return DelDelbar(k, down, up, dphi - down - up)


def d_j(gcs: GCStructure, phi: Form, twisted: bool = False) -> Form:
    """``d^J = i(delbar - del)`` applied componentwise."""
    out = Form.zero(gcs.dim)
    for comp in grading(gcs, phi).components:
        if comp:
            s = del_delbar_split(gcs, comp, twisted)
            out = out + (s.delbar_part - s.del_part).scale(I)
    return out


# -- deformations --------------------------------------------------------------------

def _constant_rows(gcs: GCStructure) -> list[list[Scalar]]:
    if not gcs.is_constant():
        raise UnsupportedError("deformation calculus needs a constant frame")
    return [s.to_scalars() for s in gcs.sections]


def dual_frame(gcs: GCStructure) -> list[GenVector]:
    """``u^a`` in ``conj(L)`` with ``2 <u^a, l_b> = delta_ab``."""
    rows = _constant_rows(gcs)
    m = gcs.dim
    lbar = [[x.conjugate() for x in r] for r in rows]
    gram = [[inner(GenVector.from_scalars(rows[a]), GenVector.from_scalars(lbar[b])).constant_value() * 2
             for b in range(m)] for a in range(m)]
    c = la.inverse(la.transpose(gram))
    out = []
    for a in range(m):
        v = [sum((c[a][b] * lbar[b][t] for b in range(m)), Scalar(0)) for t in range(2 * m)]
        out.append(GenVector.from_scalars(v))
    return out


def _eps_matrix(eps: Sequence[Sequence[PolyLike]] | Form, m: int) -> list[list[Poly]]:
    if isinstance(eps, Form):
        if eps.dim != m or eps.degrees() - {2}:
            raise InputError("eps must be a 2-form in the frame generators")
        mat = [[ZERO_POLY] * m for _ in range(m)]
        for mask, c in eps.terms.items():
            a, b = mask_indices(mask)
            mat[a][b] = c
            mat[b][a] = -c
        return mat
    mat = [[Poly.coerce(x) for x in row] for row in eps]
    if len(mat) != m or any(len(r) != m for r in mat):
        raise InputError(f"eps must be {m} x {m}")
    for a in range(m):
        for b in range(m):
            if mat[a][b] + mat[b][a]:
                raise InputError("eps must be skew")
    return mat


def eps_form(eps: Sequence[Sequence[PolyLike]] | Form, m: int) -> Form:
    """``eps`` as a 2-form ``sum_{a<b} eps_ab l^a ^ l^b`` in the frame generators."""
    mat = _eps_matrix(eps, m)
    return Form(m, {(1 << a) | (1 << b): mat[a][b] for a in range(m) for b in range(a + 1, m) if mat[a][b]})


def deformation_matrix(gcs: GCStructure, eps: Sequence[Sequence[PolyLike]] | Form) -> list[list[Poly]]:
    """``A_eps = 1 + eps + conj(eps)`` in the basis ``(l_a, conj(l_a))``."""
    m = gcs.dim
    mat = _eps_matrix(eps, m)
    rows = _constant_rows(gcs)
    lbar = [[x.conjugate() for x in r] for r in rows]
    u = dual_frame(gcs)
    # coefficients of u^b in the conj(l) basis
    coeff = []
    for ub in u:
        sol = la.solve(la.transpose(lbar), ub.to_scalars())
        assert sol is not None
        coeff.append(sol)
    a = [[Poly.const(1) if r == c else ZERO_POLY for c in range(2 * m)] for r in range(2 * m)]
    for col in range(m):
        for b in range(m):
            if not mat[col][b]:
                continue
            for t in range(m):
                if coeff[b][t]:
                    a[m + t][col] = a[m + t][col] + mat[col][b] * coeff[b][t]
                    a[t][m + col] = a[t][m + col] + mat[col][b].conjugate() * coeff[b][t].conjugate()
    return a


def deform(gcs: GCStructure, eps: Sequence[Sequence[PolyLike]] | Form) -> GCStructure:
    """``L_eps = (1 + eps) L``; requires ``det A_eps`` to be a nonzero polynomial."""
    m = gcs.dim
    mat = _eps_matrix(eps, m)
    if not any(any(r) for r in mat):
        return gcs
    det = la.poly_det(deformation_matrix(gcs, mat))
    if not det:
        raise ValidationError("A_eps is singular: deformation leaves the real-index-zero locus")
    if det.is_constant() and det.constant_value().is_zero():  # pragma: no cover - covered by the line above
        raise ValidationError("A_eps is singular")
    u = dual_frame(gcs)
    new = []
    for a, l in enumerate(gcs.sections):
        s = l
        for b in range(m):
            if mat[a][b]:
                s = s + u[b].scale(mat[a][b])
        new.append(s)
    return from_frame(gcs.model, new)


def _structure_constants(model: Model, frame: Sequence[GenVector]) -> dict[tuple[int, int], list[Scalar]]:
    """``[f_a, f_b] = sum_c c_ab^c f_c`` for a constant frame closed under the Courant bracket."""
    m = len(frame)
    cols = la.transpose([f.to_scalars() for f in frame])
    out = {}
    for a in range(m):
        for b in range(a + 1, m):
            br = courant(model, frame[a], frame[b])
            if not br.is_constant():
                raise UnsupportedError("frame brackets are not constant")
            vals = br.to_scalars()
            if not any(vals):
                continue
            sol = la.solve(cols, vals)
            if sol is None:
                raise ValidationError("frame is not closed under the Courant bracket (structure not integrable)")
            out[(a, b)] = sol
    return out


def _generator_differentials(m: int, consts: dict[tuple[int, int], list[Scalar]]) -> list[Form]:
    """``d f^c = -sum_{a<b} c_ab^c f^a ^ f^b`` for the dual coframe."""
    out = []
    for c in range(m):
        terms = {}
        for (a, b), sol in consts.items():
            if sol[c]:
                terms[(1 << a) | (1 << b)] = -sol[c]
        out.append(Form(m, terms))
    return out


def _idx1(mask: int) -> list[int]:
    return [i + 1 for i in mask_indices(mask)]


def _derivation_on_monomial(mask: int, gens: list[Form], m: int) -> Form:
    """Extend ``e^c -> gens[c]`` as a graded derivation to ``e^mask``."""
    idx = _idx1(mask)
    out = Form.zero(m)
    for pos, c in enumerate(idx):
        left = Form.basis(m, *idx[:pos]) if pos else Form.one(m)
        right = Form.basis(m, *idx[pos + 1:]) if pos + 1 < len(idx) else Form.one(m)
        term = left.wedge(gens[c - 1]).wedge(right)
        out = out + (term if pos % 2 == 0 else -term)
    return out


def _anchor_derive(model: Model, vec: GenVector, f: Poly) -> Poly:
    return model.derive(vec.vec, f)


def d_lie_algebroid(gcs: GCStructure, mu: Form) -> Form:
    """``d_L`` on ``wedge^k L^*``, elements written in the dual generators of the frame of ``L``."""
    m = gcs.dim
    frame = gcs.sections
    _constant_rows(gcs)
    gens = _generator_differentials(m, _structure_constants(gcs.model, frame))
    out = Form.zero(m)
    for mask, coef in mu.terms.items():
        mono = Form(m, {mask: Poly.const(1)})
        dm = _derivation_on_monomial(mask, gens, m)
        if dm:
            out = out + dm.scale(coef)
        if not coef.is_constant():
            for a in range(m):
                df = _anchor_derive(gcs.model, frame[a], coef)
                if df:
                    out = out + Form.basis(m, a + 1).wedge(mono).scale(df)
    return out


class _Algebroid:
    """Frame data of a Lie algebroid with constant frame: anchors and structure constants."""

    def __init__(self, model: Model, frame: Sequence[GenVector]) -> None:
        self.model = model
        self.frame = list(frame)
        self.m = len(frame)
        self.consts = _structure_constants(model, self.frame)

    def bracket_gen(self, a: int, b: int) -> Form:
        if a == b:
            return Form.zero(self.m)
        sign = 1
        if a > b:
            a, b, sign = b, a, -1
        sol = self.consts.get((a, b))
        if sol is None:
            return Form.zero(self.m)
        f = Form(self.m, {1 << c: sol[c] for c in range(self.m) if sol[c]})
        return f if sign > 0 else -f

    def anchor(self, a: int, f: Poly) -> Poly:
        return _anchor_derive(self.model, self.frame[a], f)


def _mono(m: int, idx: Sequence[int]) -> Form:
    return Form.basis(m, *idx) if idx else Form.one(m)


def _bracket_fun_mono(alg: _Algebroid, g: Poly, idx: list[int]) -> Form:
    """``[g, u_I] = -sum_s (-1)^s (pi(u_{i_s}) g) u_{I - i_s}``."""
    m = alg.m
    out = Form.zero(m)
    for pos, c in enumerate(idx):
        dg = alg.anchor(c - 1, g)
        if dg:
            sign = -1 if pos % 2 == 0 else 1
            out = out + _mono(m, idx[:pos] + idx[pos + 1:]).scale(dg * sign)
    return out


def _bracket_gen_mono(alg: _Algebroid, j: int, idx: list[int]) -> Form:
    """``[u_j, u_I]``: ``[u_j, .]`` is an even derivation of the wedge product."""
    m = alg.m
    out = Form.zero(m)
    for pos, c in enumerate(idx):
        br = alg.bracket_gen(j, c - 1)
        if br:
            out = out + _mono(m, idx[:pos]).wedge(br).wedge(_mono(m, idx[pos + 1:]))
    return out


def _bracket_terms(alg: _Algebroid, f: Poly, idx: list[int], g: Poly, jdx: list[int]) -> Form:
    """``[f u_I, g u_J]`` from the graded Leibniz rule in the second slot."""
    m = alg.m
    p = len(idx)
    out = Form.zero(m)
    # [P, g] u_J with [P, g] = (-1)^p f [g, u_I]
    pg = _bracket_fun_mono(alg, g, idx).scale(f)
    if pg:
        out = out + pg.wedge(_mono(m, jdx)).scale(-1 if p % 2 else 1)
    # g [P, u_J] = g sum_s (-1)^{(p-1) s} u_{j<s} ^ [P, u_{j_s}] ^ u_{j>s},  [P, u_j] = -[u_j, P]
    for pos, j in enumerate(jdx):
        pu = _mono(m, idx).scale(alg.anchor(j - 1, f)) + _bracket_gen_mono(alg, j - 1, idx).scale(f)
        if not pu:
            continue
        sign = -1 if ((p - 1) * pos) % 2 else 1
        term = _mono(m, jdx[:pos]).wedge(pu).wedge(_mono(m, jdx[pos + 1:]))
        out = out - term.scale(g * sign)
    return out


def schouten_with(alg: _Algebroid, p: Form, q: Form) -> Form:
    out = Form.zero(alg.m)
    for pm, f in p.terms.items():
        for qm, g in q.terms.items():
            out = out + _bracket_terms(alg, f, _idx1(pm), g, _idx1(qm))
    return out


def schouten(gcs: GCStructure, p: Form, q: Form) -> Form:
    """Schouten bracket on ``wedge conj(L) = wedge L^*`` in the dual frame generators ``u^a``."""
    alg = _Algebroid(gcs.model, dual_frame(gcs))
    return schouten_with(alg, p, q)


def mc_residual(gcs: GCStructure, eps: Sequence[Sequence[PolyLike]] | Form) -> Form:
    """``d_L eps + 1/2 [eps, eps]`` as a 3-form in the frame generators."""
    e = eps_form(eps, gcs.dim)
    return d_lie_algebroid(gcs, e) + schouten(gcs, e, e).scale(Scalar(1) / 2)


def invariant_cohomology_dim(gcs: GCStructure, k: int) -> int:
    """``dim H^k`` of the invariant complex ``(wedge L^*, d_L)``."""
    if not isinstance(gcs.model, LieAlgebraModel):
        raise InputError("invariant cohomology needs a Lie-algebra model")
    m = gcs.dim
    if k < 0 or k > m:
        return 0

    def d_matrix(deg: int) -> Matrix:
        src = [mask for mask in range(1 << m) if popcount(mask) == deg]
        dst = [mask for mask in range(1 << m) if popcount(mask) == deg + 1]
        index = {mask: i for i, mask in enumerate(dst)}
        mat = la.zeros(len(dst), len(src))
        for col, mask in enumerate(src):
            img = d_lie_algebroid(gcs, Form(m, {mask: Poly.const(1)}))
            for mk, c in img.terms.items():
                mat[index[mk]][col] = c.constant_value()
        return mat

    dk = la.rank(d_matrix(k)) if k < m else 0
    dk1 = la.rank(d_matrix(k - 1)) if k > 0 else 0
    return comb(m, k) - dk - dk1


# -- hyperkaehler interpolation ---------------------------------------------------

@dataclass
class Interpolation:
    j_t: Matrix
    b: Form
    conjugated: Matrix
    symplectic: Matrix

    @property
    def identity_holds(self) -> bool:
        return la.equal(self.conjugated, self.symplectic)


def hyperkahler_interpolation(i_mat: Sequence[Sequence[object]], omega_j: Form, omega_k: Form,
                              s: object, c: object) -> Interpolation:
    """``J_t = s J_I + c J_{omega_J}`` at a rational point ``s^2 + c^2 = 1`` of the circle.

    With ``B = (s/c) omega_K`` the family is a B-field transform of a symplectic
    structure: ``J_t = exp(B) J_{omega_J / c} exp(-B)``.  ``conjugated`` is
    ``exp(-B) J_t exp(B)`` and ``symplectic`` is ``J_{omega_J / c}``.
    """
    ss, cc = Scalar.coerce(s), Scalar.coerce(c)  # type: ignore[arg-type]
    if ss * ss + cc * cc != Scalar(1):
        raise InputError("(s, c) must lie on the unit circle")
    if cc.is_zero():
        raise InputError("c must be nonzero for the B-field comparison")
    jt = la.add(la.scale(j_complex(i_mat), ss), la.scale(j_symplectic(omega_j), cc))
    b = omega_k.scale(ss / cc)
    conj = la.matmul(la.matmul(b_field_matrix(-b), jt), b_field_matrix(b))
    symp = j_symplectic(omega_j.scale(cc.inverse()))
    return Interpolation(jt, b, conj, symp)
