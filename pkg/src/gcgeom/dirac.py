"""Linear and integrable Dirac structures.

The Courant bracket of sections of ``(T + T*) (x) C`` is::

    [X + xi, Y + eta] = [X, Y] + L_X eta - L_Y xi - 1/2 d(i_X eta - i_Y xi)

and the Dorfman bracket ``(X + xi) o (Y + eta) = [X, Y] + L_X eta - i_Y d xi``
is its non-skew companion (``A o B - B o A = 2 [A, B]``).  With a closed
twisting 3-form ``H`` both brackets gain the term ``-i_Y i_X H`` (that is,
``-H(X, Y, .)``), which is the sign making ``{X + i_X B}`` involutive when
``H = dB``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import linalg as la
from .errors import InputError, ValidationError
from .forms import Form
from .genvector import GenVector, clifford, inner
from .isotropic import Isotropic
from .linalg import Matrix, Vector
from .model import FlatModel, Model, VectorField
from .poly import Poly, ZERO_POLY
from .scalar import Scalar, ScalarLike
from . import solver
from .spinors import annihilator, spinor_of_isotropic

__all__ = [
    "inner_product",
    "anchor",
    "exact_section",
    "courant",
    "dorfman",
    "nij",
    "jacobiator",
    "Classification",
    "classify",
    "real_index",
    "EEps",
    "extract_e_eps",
    "pushforward",
    "pullback",
    "DiracFrame",
    "InvolutivityReport",
    "is_involutive",
    "find_witness",
    "schouten_bivector",
]


def inner_product(a: GenVector, b: GenVector, sign: int = 1) -> Poly:
    """``<,>_+`` (``sign = 1``) or ``<,>_-`` (``sign = -1``)."""
    return inner(a, b, sign)


def anchor(a: GenVector) -> VectorField:
    return a.vec


def exact_section(model: Model, f: Poly) -> GenVector:
    """``df`` as a section with zero vector part."""
    df = model.d(Form.one(model.dim, f))
    return GenVector.from_form(df) if df else GenVector.zero(model.dim)


def _twist(model: Model, twisted: bool) -> Form | None:
    if twisted and model.twist is not None and model.twist:
        return model.twist
    return None


def _twist_term(h: Form, x: VectorField, y: VectorField) -> Form:
    """``-i_Y i_X H``."""
    return -h.contract(x).contract(y)


def _check(model: Model, *sections: GenVector) -> None:
    for s in sections:
        if s.dim != model.dim:
            raise InputError(f"section has dimension {s.dim}, model has {model.dim}")


def courant(model: Model, a: GenVector, b: GenVector, twisted: bool = False) -> GenVector:
    """The (optionally twisted) Courant bracket."""
    _check(model, a, b)
    x, y = a.vec, b.vec
    xi, eta = a.covector_form(), b.covector_form()
    vec = model.bracket(x, y)
    half = Scalar(1, 0) / 2
    pairing = _function(eta.contract(x) - xi.contract(y))
    cov = (model.lie_derivative(x, eta) - model.lie_derivative(y, xi)
           - model.d(Form.one(model.dim, pairing)).scale(half))
    h = _twist(model, twisted)
    if h is not None:
        cov = cov + _twist_term(h, x, y)
    return GenVector(vec, _covector_list(cov, model.dim))


def _function(f: Form) -> Poly:
    """The degree-0 coefficient of a form that is known to be a function."""
    return f.terms.get(0, ZERO_POLY)


def _covector_list(form: Form, dim: int) -> list[Poly]:
    if form.degrees() - {1}:
        raise ValidationError("bracket produced a non-1-form covector part")  # pragma: no cover
    return [form.terms.get(1 << k, ZERO_POLY) for k in range(dim)]


def dorfman(model: Model, a: GenVector, b: GenVector, twisted: bool = False) -> GenVector:
    """``(X + xi) o (Y + eta) = [X, Y] + L_X eta - i_Y d xi`` (plus ``-i_Y i_X H``)."""
    _check(model, a, b)
    x, y = a.vec, b.vec
    xi, eta = a.covector_form(), b.covector_form()
    vec = model.bracket(x, y)
    cov = model.lie_derivative(x, eta) - model.d(xi).contract(y)
    h = _twist(model, twisted)
    if h is not None:
        cov = cov + _twist_term(h, x, y)
    return GenVector(vec, _covector_list(cov, model.dim))


def nij(model: Model, a: GenVector, b: GenVector, c: GenVector, twisted: bool = False) -> Poly:
    """``1/3 (<[A,B],C> + <[B,C],A> + <[C,A],B>)``."""
    third = Scalar(1) / 3
    total = (inner(courant(model, a, b, twisted), c) + inner(courant(model, b, c, twisted), a)
             + inner(courant(model, c, a, twisted), b))
    return total * third


def jacobiator(model: Model, a: GenVector, b: GenVector, c: GenVector, twisted: bool = False) -> GenVector:
    """``[[A,B],C] + [[B,C],A] + [[C,A],B]``."""
    return (courant(model, courant(model, a, b, twisted), c, twisted)
            + courant(model, courant(model, b, c, twisted), a, twisted)
            + courant(model, courant(model, c, a, twisted), b, twisted))


# -- linear algebra of maximal isotropics ------------------------------------------

@dataclass(frozen=True)
class Classification:
    type: int
    parity: str
    real_index: int

    def as_dict(self) -> dict[str, object]:
        return {"type": self.type, "parity": self.parity, "realIndex": self.real_index}


def real_index(L: Isotropic) -> int:
    """``dim_C (L cap conj(L))``."""
    return L.intersection_dim(L.conjugate())


def _require_maximal(L: Isotropic) -> None:
    if not L.is_maximal():
        raise ValidationError(f"isotropic subspace has dimension {L.rank}, expected {L.dim}")


def classify(L: Isotropic) -> Classification:
    """Type, parity and real index of a maximal isotropic subspace."""
    _require_maximal(L)
    k = L.dim - la.span_rank(L.vector_parts())
    ee = extract_e_eps(L)
    parity = ee.spinor().parity()
    if parity is None or parity != k % 2:  # pragma: no cover - guarded by the structure theorem
        raise ValidationError("representing spinor has unexpected parity")
    return Classification(k, "even" if parity == 0 else "odd", real_index(L))


@dataclass(frozen=True)
class EEps:
    """``L = L(E, eps)``: ``E`` by a basis of ``V (x) C``, ``eps`` by its values on that basis."""

    dim: int
    e_basis: list[Vector]
    eps_matrix: Matrix
    extension: Form

    def spinor(self) -> Form:
        return spinor_of_isotropic(self.e_basis, self.extension)

    def isotropic(self) -> Isotropic:
        """Rebuild ``L(E, eps)``."""
        m = self.dim
        rows: list[list[Scalar]] = []
        for e in self.e_basis:
            rows.append(list(e) + [c.constant_value() for c in _covector_list(self.extension.contract(e), m)])
        ann = la.nullspace([list(e) for e in self.e_basis], ncols=m) if self.e_basis else la.identity(m)
        for theta in ann:
            rows.append([Scalar(0)] * m + list(theta))
        return Isotropic(rows, m)


def extract_e_eps(L: Isotropic) -> EEps:
    """Write a maximal isotropic subspace as ``L(E, eps)``.

    ``E = pi_V(L)`` and ``eps(e) = pi_{V*}(l)|_E`` for any ``l in L`` over ``e``.
    The returned extension is the 2-form on ``V`` agreeing with ``eps`` on
    ``E x E`` and vanishing on a chosen complement.
    """
    _require_maximal(L)
    m = L.dim
    xs, xis = L.vector_parts(), L.covector_parts()
    e_basis = la.row_basis(xs)
    lifts: list[Vector] = []
    cols = la.transpose(xs) if xs else []
    for e in e_basis:
        c = la.solve(cols, e)
        assert c is not None
        xi = [Scalar(0)] * m
        for ci, row in zip(c, xis):
            if ci:
                xi = [a + ci * b for a, b in zip(xi, row)]
        lifts.append(xi)
    kdim = len(e_basis)
    eps = [[sum((lifts[a][t] * e_basis[b][t] for t in range(m)), Scalar(0)) for b in range(kdim)]
           for a in range(kdim)]
    # Extension: F(b_a, b_b) = eps_ab on E, 0 on a complement; F_comp = P^{-T} eps_full P^{-1}
    full = la.complete_basis(e_basis, m)
    p = la.transpose(full)  # columns are the basis vectors
    pinv = la.inverse(p)
    eps_full = la.zeros(m, m)
    for a in range(kdim):
        for b in range(kdim):
            eps_full[a][b] = eps[a][b]
    comp = la.matmul(la.matmul(la.transpose(pinv), eps_full), pinv)
    return EEps(m, e_basis, eps, Form.from_bivector_matrix(comp))


def pushforward(f: Sequence[Sequence[ScalarLike]], L: Isotropic) -> Isotropic:
    """``f_* L = {f X + eta : X + f^* eta in L}`` for ``f: V -> W`` given as an ``n x m`` matrix."""
    fm = la.as_matrix(f)
    n, m = len(fm), L.dim
    if any(len(r) != m for r in fm):
        raise InputError("map has the wrong number of columns")
    rows = L.rows
    ft = la.transpose(fm) if n else [[] for _ in range(m)]
    # unknowns (c_1..c_r, eta_1..eta_n):  sum c_i xi_i - f^T eta = 0
    r = len(rows)
    system = [[rows[i][m + t] for i in range(r)] + [-ft[t][j] for j in range(n)] for t in range(m)]
    out = []
    for sol in la.nullspace(system, ncols=r + n):
        c, eta = sol[:r], sol[r:]
        x = [sum((c[i] * rows[i][t] for i in range(r)), Scalar(0)) for t in range(m)]
        out.append(la.matvec(fm, x) + eta)
    return Isotropic.from_span(out, n)


def pullback(f: Sequence[Sequence[ScalarLike]], M: Isotropic) -> Isotropic:
    """``f^* M = {X + f^* eta : f X + eta in M}`` for ``f: V -> W`` given as an ``n x m`` matrix."""
    fm = la.as_matrix(f)
    n = M.dim
    if len(fm) != n:
        raise InputError("map has the wrong number of rows")
    m = len(fm[0]) if fm else 0
    rows = M.rows
    r = len(rows)
    # unknowns (X_1..X_m, d_1..d_r):  f X - sum d_j Y_j = 0
    system = [list(fm[t]) + [-rows[j][t] for j in range(r)] for t in range(n)]
    out = []
    for sol in la.nullspace(system, ncols=m + r):
        x, d = sol[:m], sol[m:]
        eta = [sum((d[j] * rows[j][n + t] for j in range(r)), Scalar(0)) for t in range(n)]
        out.append(list(x) + la.matvec(la.transpose(fm), eta))
    return Isotropic.from_span(out, m)


# -- frames ------------------------------------------------------------------------

def _nvars(model: Model) -> int:
    return model.dim if isinstance(model, FlatModel) else 0


@dataclass
class DiracFrame:
    """A frame of an isotropic sub-bundle of ``(T + T*) (x) C`` over a model."""

    model: Model
    sections: list[GenVector]
    _spinor: Form | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        for s in self.sections:
            if s.dim != self.model.dim:
                raise InputError("frame section dimension does not match the model")
            if not isinstance(self.model, FlatModel) and not s.is_constant():
                raise InputError("invariant models take constant-coefficient sections only")
        for i, a in enumerate(self.sections):
            for b in self.sections[i:]:
                if inner(a, b):
                    raise ValidationError(f"frame is not isotropic: <{a}, {b}> = {inner(a, b)}")

    @property
    def rank(self) -> int:
        return len(self.sections)

    def is_maximal(self) -> bool:
        return self.rank == self.model.dim

    # constructors ------------------------------------------------------
    @staticmethod
    def from_isotropic(model: Model, L: Isotropic) -> "DiracFrame":
        return DiracFrame(model, L.genvectors())

    @staticmethod
    def b_field(model: Model, b: Form) -> "DiracFrame":
        """``exp(B)(T) = {X + i_X B}``."""
        m = model.dim
        secs = []
        for k in range(m):
            e = [Poly.const(1) if i == k else ZERO_POLY for i in range(m)]
            secs.append(GenVector(e, _covector_list(b.contract(e), m) if b else [ZERO_POLY] * m))
        return DiracFrame(model, secs)

    @staticmethod
    def bivector_graph(model: Model, beta: Sequence[Sequence[object]]) -> "DiracFrame":
        """``exp(beta)(T*) = {xi + i_xi beta}`` with ``(i_xi beta)^b = xi_a beta^{ab}``."""
        m = model.dim
        mat = [[Poly.coerce(x) for x in row] for row in beta]  # type: ignore[arg-type]
        secs = []
        for a in range(m):
            cov = [Poly.const(1) if i == a else ZERO_POLY for i in range(m)]
            secs.append(GenVector(mat[a], cov))
        return DiracFrame(model, secs)

    @staticmethod
    def from_spinor(model: Model, rho: Form, degree_bound: int | None = None,
                    point: Sequence[ScalarLike] | None = None) -> "DiracFrame":
        """Sections annihilating ``rho`` with coefficient degree bounded by ``degree_bound``.

        A spanning subset is chosen at ``point`` (default: a fixed generic
        rational point), so the frame spans ``L_rho`` away from a proper
        algebraic subset.
        """
        m = model.dim
        nv = _nvars(model)
        if not rho.is_constant() and nv == 0:
            raise InputError("invariant models take constant-coefficient spinors only")
        bound = rho.max_coefficient_degree() if degree_bound is None else degree_bound
        bound = max(bound, 0)
        cands = solver.kernel_genvectors(lambda v: clifford(v, rho), m, nv, bound)
        pt = list(point) if point is not None else _generic_point(nv)
        chosen: list[GenVector] = []
        vals: list[list[Scalar]] = []
        for c in sorted(cands, key=lambda v: v.max_degree()):
            val = c.eval_at(pt + [0] * (m - len(pt))).to_scalars() if nv else c.to_scalars()
            if la.span_rank(vals + [val]) > len(vals):
                vals.append(val)
                chosen.append(c)
        frame = DiracFrame(model, chosen)
        frame._spinor = rho
        return frame

    # views -------------------------------------------------------------
    def eval_at(self, point: Sequence[ScalarLike]) -> Isotropic:
        if isinstance(self.model, FlatModel):
            vals = [s.eval_at(point).to_scalars() for s in self.sections]
        else:
            vals = [s.to_scalars() for s in self.sections]
        return Isotropic.from_span(vals, self.model.dim)

    def representing_spinor(self, degree_bound: int | None = None) -> Form:
        """A polynomial spinor annihilated by every section, of minimal coefficient degree."""
        if self._spinor is not None:
            return self._spinor
        m = self.model.dim
        nv = _nvars(self.model)
        top = degree_bound if degree_bound is not None else max(
            [max(s.max_degree(), 0) for s in self.sections] + [0]) * m
        for deg in range(0, top + 1):
            basis = solver.form_ansatz(m, nv, deg)
            images = []
            for b in basis:
                img: dict = {}
                for k, s in enumerate(self.sections):
                    for key, c in solver.form_coordinates(clifford(s, b)).items():
                        img[(k, key)] = c
                images.append(img)
            kernel = solver.kernel_combinations(images)
            if kernel:
                rho = solver.combine_forms(basis, kernel[0], m)
                self._spinor = rho
                return rho
            if nv == 0:
                break
        raise ValidationError("no representing spinor within the degree bound")


def _generic_point(nvars: int) -> list[ScalarLike]:
    primes = [Scalar(p, 0) / 7 for p in (3, 5, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61)]
    return primes[:nvars]


@dataclass
class InvolutivityReport:
    involutive: bool
    nij_route: bool
    spinor_route: bool | None
    witness: GenVector | None
    spinor: Form | None
    failures: list[tuple[int, int, int, Poly]]

    @property
    def routes_agree(self) -> bool:
        return self.spinor_route is None or self.spinor_route == self.nij_route


def find_witness(model: Model, rho: Form, twisted: bool = False,
                 degree_bound: int | None = None) -> GenVector | None:
    """A section ``v`` with ``d_(H) rho = v . rho`` and coefficient degree at most the bound."""
    target = model.d_maybe_twisted(rho, twisted and model.twist is not None)
    if not target:
        return GenVector.zero(model.dim)
    bound = target.max_coefficient_degree() if degree_bound is None else degree_bound
    return solver.solve_for_genvector(lambda v: clifford(v, rho), target, model.dim, _nvars(model), max(bound, 0))


def is_involutive(frame: DiracFrame, twisted: bool = False, degree_bound: int | None = None) -> InvolutivityReport:
    """Courant involutivity by two independent routes.

    (a) ``<[A_i, A_j], A_k> = 0`` on the frame (the restriction of ``Nij``);
    (b) for maximal frames, a bounded-degree search for ``v`` with
    ``d_(H) rho = v . rho`` for a representing spinor ``rho``.
    """
    model = frame.model
    secs = frame.sections
    failures: list[tuple[int, int, int, Poly]] = []
    for i in range(len(secs)):
        for j in range(i + 1, len(secs)):
            br = courant(model, secs[i], secs[j], twisted)
            for k in range(len(secs)):
                val = inner(br, secs[k])
                if val:
                    failures.append((i, j, k, val))
    nij_ok = not failures
    spinor_ok: bool | None = None
    witness = None
    rho = None
    if frame.is_maximal():
        rho = frame.representing_spinor()
        witness = find_witness(model, rho, twisted, degree_bound)
        spinor_ok = witness is not None
    involutive = nij_ok if spinor_ok is None else (nij_ok and spinor_ok)
    return InvolutivityReport(involutive, nij_ok, spinor_ok, witness, rho, failures)


def schouten_bivector(model: FlatModel, beta: Sequence[Sequence[object]]) -> dict[tuple[int, int, int], Poly]:
    """Nonzero components ``S^{abc}`` (``a < b < c``) of the Jacobi tensor of ``beta``.

    ``S^{abc} = sum_l (beta^{la} d_l beta^{bc} + beta^{lb} d_l beta^{ca} + beta^{lc} d_l beta^{ab})``,
    which is ``[beta, beta]`` up to a constant factor; it vanishes iff
    ``beta`` is Poisson.
    """
    m = model.dim
    mat = [[Poly.coerce(x) for x in row] for row in beta]  # type: ignore[arg-type]
    out: dict[tuple[int, int, int], Poly] = {}
    for a in range(m):
        for b in range(a + 1, m):
            for c in range(b + 1, m):
                s = ZERO_POLY
                for l in range(m):
                    s = s + mat[l][a] * mat[b][c].diff(l) + mat[l][b] * mat[c][a].diff(l) + mat[l][c] * mat[a][b].diff(l)
                if s:
                    out[(a, b, c)] = s
    return out
