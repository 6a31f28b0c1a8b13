"""Generalized Kähler pairs and their bi-Hermitian description.

A pair ``(J1, J2)`` of commuting generalized complex structures is
generalized Kähler when ``G = -J1 J2`` is a positive definite metric on
``V + V*`` (the bilinear form ``<G u, v>``).  Such a pair is the same thing as
bi-Hermitian data ``(g, b, J+, J-)``: ``C+-``, the ``+-1`` eigenspaces of ``G``,
are graphs over ``V`` and ``J1``/``J2`` restrict to ``J+`` on ``C+`` and to
``+J-``/``-J-`` on ``C-``.

Convention for 2-forms.  Inside this module a 2-form ``beta`` acts on vectors
through its component matrix, ``(beta Y)_i = beta(e_i, Y)``.  So
``omega+- = g J+-`` means ``omega(X, Y) = g(X, J Y)``, ``C+- = {X + (b +- g) X}``
with ``(b X)_i = b(e_i, X)``, and the Bismut connections are
``nabla+-_X Y = nabla_X Y +- 1/2 g^{-1} h(X, ., Y)``.  With this reading the
torsion identities ``dc- omega- = -dc+ omega+ = h`` (``h = db``, or ``H + db``
with a twist) agree with Courant involutivity for the package's twisted bracket.
The B-field shear is ``[[1, 0], [b, 1]]`` with the same reading; in the
``X -> i_X B`` convention of :mod:`gcgeom.isotropic` it is ``exp(-b)``.

Everything here uses constant matrices: the structures must have constant
frames.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import linalg as la
from .errors import InputError, UnsupportedError, ValidationError
from .forms import Form, three_form_value, two_form_matrix
from .gcs import GCStructure, from_spinor
from .isotropic import pairing_matrix
from .linalg import Matrix, Vector
from .model import FlatModel, LieAlgebraModel, Model
from .poly import Poly, ZERO_POLY
from .scalar import Scalar
from .spinors import is_pure, mukai_value

__all__ = [
    "GKPair",
    "GKCheck",
    "gk_check",
    "metric_of",
    "BiHermitianData",
    "extract_bihermitian",
    "reconstruct",
    "b_shear",
    "b_transform",
    "direct_sum",
    "nijenhuis",
    "dc",
    "TorsionReport",
    "torsion",
    "torsion_condition_check",
    "BismutReport",
    "bismut_check",
    "torsion_type_check",
    "StrongBiHermitianReport",
    "strong_bihermitian_4d",
    "GCYReport",
    "gcy_metric_check",
]


# -- small matrix helpers -----------------------------------------------------

def _component_matrix(beta: Form) -> Matrix:
    if beta.degrees() - {2}:
        raise InputError("expected a 2-form")
    if not beta.is_constant():
        raise UnsupportedError("2-form must have constant coefficients")
    return [[c.constant_value() for c in row] for row in two_form_matrix(beta)]


def _skew_to_form(mat: Matrix) -> Form:
    if not la.is_zero_matrix(la.add(mat, la.transpose(mat))):
        raise ValidationError("matrix is not skew, so it is not a 2-form")
    return Form.from_bivector_matrix(mat)


def b_shear(b: Form) -> Matrix:
    """``[[1, 0], [b, 1]]`` with ``b`` acting through its component matrix."""
    m = b.dim
    return la.block([[la.identity(m), la.zeros(m, m)], [_component_matrix(b), la.identity(m)]])


def b_transform(j: Matrix, b: Form) -> Matrix:
    """Conjugate a structure by the shear of ``b``."""
    s = b_shear(b)
    return la.matmul(la.matmul(s, j), b_shear(-b))


def direct_sum(ja: Matrix, jb: Matrix) -> Matrix:
    """``Ja (+) Jb`` on ``(V_a + V_b) + (V_a + V_b)*`` in the ordering ``(X_a, X_b, xi_a, xi_b)``."""
    ma, mb = len(ja) // 2, len(jb) // 2
    m = ma + mb
    out = la.zeros(2 * m, 2 * m)
    pos_a = list(range(ma)) + [m + k for k in range(ma)]
    pos_b = [ma + k for k in range(mb)] + [m + ma + k for k in range(mb)]
    for src, pos in ((ja, pos_a), (jb, pos_b)):
        for r, pr in enumerate(pos):
            for c, pc in enumerate(pos):
                out[pr][pc] = src[r][c]
    return out


def _as_matrix(j: GCStructure | Matrix) -> Matrix:
    if isinstance(j, GCStructure):
        return j.require_matrix()
    return la.as_matrix(j)


def metric_of(j1: GCStructure | Matrix, j2: GCStructure | Matrix) -> Matrix:
    """``G = -J1 J2``."""
    return la.neg(la.matmul(_as_matrix(j1), _as_matrix(j2)))


# -- the pair ---------------------------------------------------------------

@dataclass
class GKPair:
    j1: Matrix
    j2: Matrix
    metric: Matrix
    c_plus: list[Vector]
    c_minus: list[Vector]

    @property
    def dim(self) -> int:
        return len(self.j1) // 2


@dataclass
class GKCheck:
    """Outcome of :func:`gk_check`: the pair, or the first failing invariant."""

    valid: bool
    reason: str | None
    pair: GKPair | None = None

    def __bool__(self) -> bool:
        return self.valid


def _eigenspace(g: Matrix, value: int) -> list[Vector]:
    n = len(g)
    shifted = [[g[r][c] - (Scalar(value) if r == c else Scalar(0)) for c in range(n)] for r in range(n)]
    return la.nullspace(shifted)


def gk_check(j1: GCStructure | Matrix, j2: GCStructure | Matrix) -> GKCheck:
    """Check the generalized Kähler invariants in order, naming the first failure.

    Order: same model, ``J1 J2 = J2 J1``, ``G^2 = 1``, ``G`` symmetric,
    ``rank C- = m``, ``rank C+ = m``, ``<G., .>`` positive definite.
    """
    if isinstance(j1, GCStructure) and isinstance(j2, GCStructure) and j1.model.dim != j2.model.dim:
        return GKCheck(False, "structures live on different models")
    a, b = _as_matrix(j1), _as_matrix(j2)
    if len(a) != len(b):
        return GKCheck(False, "structures live on different models")
    n = len(a)
    m = n // 2
    if not la.equal(la.matmul(a, b), la.matmul(b, a)):
        return GKCheck(False, "J1 J2 != J2 J1")
    g = metric_of(a, b)
    if not la.equal(la.matmul(g, g), la.identity(n)):
        return GKCheck(False, "G^2 != 1")
    form = la.scale(la.matmul(pairing_matrix(m), g), 2)  # 2 <G u, v>
    if not la.is_symmetric(form):
        return GKCheck(False, "G is not symmetric")
    c_plus, c_minus = _eigenspace(g, 1), _eigenspace(g, -1)
    if len(c_minus) != m:
        return GKCheck(False, "C- rank != m")
    if len(c_plus) != m:
        return GKCheck(False, "C+ rank != m")
    if not la.is_real(form) or not la.leading_minors_positive(form):
        return GKCheck(False, "G is not positive definite")
    return GKCheck(True, None, GKPair(a, b, g, c_plus, c_minus))


# -- bi-Hermitian data ------------------------------------------------------

@dataclass
class BiHermitianData:
    """``(g, b, J+, J-)`` with ``omega+- = g J+-`` (component matrices)."""

    g: Matrix
    b: Form
    j_plus: Matrix
    j_minus: Matrix
    omega_plus: Form = field(init=False)
    omega_minus: Form = field(init=False)
    h: Form | None = None

    def __post_init__(self) -> None:
        m = len(self.g)
        if not la.is_symmetric(self.g) or not la.leading_minors_positive(self.g):
            raise ValidationError("g must be a positive definite symmetric matrix")
        if self.b.dim != m:
            raise ValidationError("b has the wrong dimension")
        for name, j in (("J+", self.j_plus), ("J-", self.j_minus)):
            if not la.equal(la.matmul(j, j), la.neg(la.identity(m))):
                raise ValidationError(f"{name}^2 != -1")
            gj = la.matmul(self.g, j)
            if not la.is_zero_matrix(la.add(gj, la.transpose(gj))):
                raise ValidationError(f"{name} is not g-Hermitian (g J != -J^* g)")
        if self.b.degrees() - {2}:
            raise ValidationError("b must be a 2-form")
        self.omega_plus = _skew_to_form(la.matmul(self.g, self.j_plus))
        self.omega_minus = _skew_to_form(la.matmul(self.g, self.j_minus))

    @property
    def dim(self) -> int:
        return len(self.g)

    def b_matrix(self) -> Matrix:
        return _component_matrix(self.b) if self.b else la.zeros(self.dim, self.dim)

    def graph(self, sign: int) -> Matrix:
        """Columns ``X -> X + (b +- g) X`` parametrising ``C+-``."""
        m = self.dim
        lower = la.add(self.b_matrix(), la.scale(self.g, sign))
        return la.block([[la.identity(m)], [lower]])

    def c_plus(self) -> list[Vector]:
        return la.transpose(self.graph(1))

    def c_minus(self) -> list[Vector]:
        return la.transpose(self.graph(-1))


def _transport(j: Matrix, graph: Matrix) -> Matrix:
    """``pi o J o s`` for the section ``s`` of ``pi`` given by ``graph``."""
    m = len(graph[0])
    return la.sub_block(la.matmul(j, graph), 0, m, 0, m)


def extract_bihermitian(pair: GKPair | GKCheck) -> BiHermitianData:
    """``g`` from the upper-right block ``g^{-1}`` of ``G``, ``b = -g A``, ``J+-`` by transport."""
    if isinstance(pair, GKCheck):
        if pair.pair is None:
            raise ValidationError(f"not a generalized Kähler pair: {pair.reason}")
        pair = pair.pair
    m = pair.dim
    gm = pair.metric
    ginv = la.sub_block(gm, 0, m, m, 2 * m)
    a = la.sub_block(gm, 0, m, 0, m)
    g = la.inverse(ginv)
    bmat = la.neg(la.matmul(g, a))
    b = _skew_to_form(bmat)
    blocks = []
    for sign in (1, -1):
        lower = la.add(bmat, la.scale(g, sign))
        blocks.append(la.block([[la.identity(m)], [lower]]))
    j_plus = _transport(pair.j1, blocks[0])
    j_minus = _transport(pair.j1, blocks[1])
    if not la.equal(_transport(pair.j2, blocks[0]), j_plus):
        raise ValidationError("J2 does not restrict to J+ on C+")  # pragma: no cover - theorem
    if not la.equal(_transport(pair.j2, blocks[1]), la.neg(j_minus)):
        raise ValidationError("J2 does not restrict to -J- on C-")  # pragma: no cover - theorem
    return BiHermitianData(g, b, j_plus, j_minus)


def reconstruct(data: BiHermitianData) -> tuple[Matrix, Matrix]:
    """``J1/2 = s+ J+ pi P+ +- s- J- pi P-`` with ``P+- = (1 +- G)/2``."""
    m = data.dim
    g = data.g
    ginv = la.inverse(g)
    half_g = la.block([[la.zeros(m, m), ginv], [g, la.zeros(m, m)]])
    metric = la.matmul(la.matmul(b_shear(data.b), half_g), b_shear(-data.b))
    n = 2 * m
    half = Scalar(1) / 2
    p_plus = la.scale(la.add(la.identity(n), metric), half)
    p_minus = la.scale(la.sub(la.identity(n), metric), half)
    pi = la.block([[la.identity(m), la.zeros(m, m)]])
    plus = la.matmul(la.matmul(la.matmul(data.graph(1), data.j_plus), pi), p_plus)
    minus = la.matmul(la.matmul(la.matmul(data.graph(-1), data.j_minus), pi), p_minus)
    return la.add(plus, minus), la.sub(plus, minus)


# -- torsion identities --------------------------------------------------------

def _columns(j: Matrix) -> list[list[Scalar]]:
    return la.transpose(j)


def nijenhuis(model: Model, j: Matrix) -> list[tuple[int, int, list[Poly]]]:
    """Nonzero values ``N(e_a, e_b) = [Ja, Jb] - J[Ja, b] - J[a, Jb] - [a, b]`` for constant ``J``."""
    m = model.dim
    cols = _columns(j)
    frame = model.frame()

    def const(v: Sequence[Scalar]) -> tuple[Poly, ...]:
        return tuple(Poly.const(x) for x in v)

    def apply(v: Sequence[Poly]) -> list[Poly]:
        return [sum((v[c] * j[r][c] for c in range(m)), ZERO_POLY) for r in range(m)]

    out = []
    for a in range(m):
        for b in range(a + 1, m):
            ja, jb = const(cols[a]), const(cols[b])
            t1 = model.bracket(ja, jb)
            t2 = apply(model.bracket(ja, frame[b]))
            t3 = apply(model.bracket(frame[a], jb))
            t4 = model.bracket(frame[a], frame[b])
            val = [t1[k] - t2[k] - t3[k] - t4[k] for k in range(m)]
            if any(val):
                out.append((a, b, val))
    return out


def dc(model: Model, j: Matrix, omega: Form) -> Form:
    """``d^c omega (X, Y, Z) = -d omega (J X, J Y, J Z)`` on the frame."""
    m = model.dim
    domega = model.d(omega)
    cols = _columns(j)
    terms: dict[int, Poly] = {}
    for a in range(m):
        for b in range(a + 1, m):
            for c in range(b + 1, m):
                v = -domega.value(cols[a], cols[b], cols[c])
                if v:
                    terms[(1 << a) | (1 << b) | (1 << c)] = v
    return Form(m, terms)


def torsion(model: Model, b: Form, twisted: bool = False) -> Form:
    """``h = db``, or ``H + db`` with the model twist."""
    h = model.d(b)
    if twisted and model.twist is not None:
        h = model.twist + h
    return h


@dataclass
class TorsionReport:
    passed: bool
    h: Form
    dc_plus: Form
    dc_minus: Form
    integrable_plus: bool
    integrable_minus: bool
    detail: list[str]

    def __bool__(self) -> bool:
        return self.passed


def torsion_condition_check(model: Model, data: BiHermitianData, twisted: bool = False,
                            model_minus: Model | None = None) -> TorsionReport:
    """Check ``d^c_- omega_- = -d^c_+ omega_+ = h`` exactly.

    ``model_minus`` is the backend in which ``J-`` has constant coefficients
    when that differs from ``model`` (on a group: the right-invariant frame,
    which agrees with the left-invariant one at the identity).  Forms are
    compared through their components in the respective frames.
    """
    mm = model_minus or model
    h = torsion(model, data.b, twisted)
    dp = dc(model, data.j_plus, data.omega_plus)
    dm = dc(mm, data.j_minus, data.omega_minus)
    detail = []
    ok_minus = dm == h
    ok_plus = -dp == h
    if not ok_minus:
        detail.append(f"d^c_- omega_- = {dm} but h = {h}")
    if not ok_plus:
        detail.append(f"-d^c_+ omega_+ = {-dp} but h = {h}")
    int_p = not nijenhuis(model, data.j_plus)
    int_m = not nijenhuis(mm, data.j_minus)
    if not int_p:
        detail.append("J+ is not integrable")
    if not int_m:
        detail.append("J- is not integrable")
    return TorsionReport(ok_minus and ok_plus and int_p and int_m, h, dp, dm, int_p, int_m, detail)


def torsion_type_check(h: Form, j: Matrix) -> bool:
    """``h(X,Y,Z) = h(X,JY,JZ) + h(JX,Y,JZ) + h(JX,JY,Z)`` on all basis triples."""
    m = h.dim
    basis = la.identity(m)
    cols = _columns(j)
    for a in range(m):
        for b in range(m):
            for c in range(m):
                x, y, z = basis[a], basis[b], basis[c]
                jx, jy, jz = cols[a], cols[b], cols[c]
                lhs = h.value(x, y, z)
                rhs = h.value(x, jy, jz) + h.value(jx, y, jz) + h.value(jx, jy, z)
                if lhs != rhs:
                    return False
    return True


# -- Bismut connections ---------------------------------------------------------

@dataclass
class BismutReport:
    passed: bool
    parallel_plus: bool
    parallel_minus: bool
    type_plus: bool
    type_minus: bool
    violations: list[tuple[str, int, int, int, Poly]]
    max_violation: Scalar | None

    def __bool__(self) -> bool:
        return self.passed


def _levi_civita(model: Model, g: Matrix):
    """``nabla_{e_a} Y`` for constant ``Y`` on the supported backends."""
    m = model.dim
    if isinstance(model, FlatModel):
        return lambda a, y: [ZERO_POLY] * m
    if isinstance(model, LieAlgebraModel):
        c = model.structure_constants()
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    # g([e_i, e_j], e_k) + g(e_j, [e_i, e_k]) = 0
                    s = sum((c[i][j][t] * g[t][k] + g[j][t] * c[i][k][t] for t in range(m)), Scalar(0))
                    if s:
                        raise UnsupportedError("metric is not bi-invariant: Levi-Civita is not 1/2 [X, Y]")
        half = Scalar(1) / 2

        def nabla(a: int, y: Sequence[Scalar]) -> list[Poly]:
            return [Poly.const(sum((c[a][j][k] * y[j] for j in range(m)), Scalar(0)) * half) for k in range(m)]

        return nabla
    raise UnsupportedError(f"no exact Levi-Civita connection on {model!r}")  # pragma: no cover


def _parallel_violations(model: Model, g: Matrix, h: Form, j: Matrix, sign: int, label: str
                         ) -> list[tuple[str, int, int, int, Poly]]:
    """Entries of ``(nabla^sign_{e_a} J) e_b`` that do not vanish."""
    m = model.dim
    nabla = _levi_civita(model, g)
    ginv = la.inverse(g)
    half = Scalar(sign) / 2
    cols = _columns(j)

    def conn(a: int, y: Sequence[Scalar]) -> list[Poly]:
        base = nabla(a, y)
        cov = [sum((three_form_value(h, a, i, k) * y[k] for k in range(m)), ZERO_POLY) for i in range(m)]
        return [base[r] + sum((cov[i] * ginv[r][i] for i in range(m)), ZERO_POLY) * half for r in range(m)]

    out = []
    for a in range(m):
        for b in range(m):
            first = conn(a, cols[b])
            moved = conn(a, la.identity(m)[b])
            second = [sum((moved[c] * j[r][c] for c in range(m)), ZERO_POLY) for r in range(m)]
            for r in range(m):
                v = first[r] - second[r]
                if v:
                    out.append((label, a, b, r, v))
    return out


def bismut_check(model: Model, data: BiHermitianData, twisted: bool = False,
                 model_minus: Model | None = None) -> BismutReport:
    """``nabla+- J+- = 0`` with ``nabla+- = nabla +- 1/2 g^{-1} h`` and the type of ``h``.

    Supported backends: flat models with the constant metric ``data.g`` (the
    Levi-Civita connection kills constant fields) and Lie algebras with a
    bi-invariant metric (``nabla_X Y = 1/2 [X, Y]``).  ``model_minus`` plays the
    same role as in :func:`torsion_condition_check`.
    """
    mm = model_minus or model
    h = torsion(model, data.b, twisted)
    vp = _parallel_violations(model, data.g, h, data.j_plus, 1, "+")
    vm = _parallel_violations(mm, data.g, h, data.j_minus, -1, "-")
    tp = torsion_type_check(h, data.j_plus)
    tm = torsion_type_check(h, data.j_minus)
    violations = vp + vm
    consts = [abs(v[4].constant_value().re) for v in violations
              if v[4].is_constant() and v[4].constant_value().is_real()]
    worst = Scalar(max(consts)) if consts else None
    return BismutReport(not violations and tp and tm, not vp, not vm, tp, tm, violations, worst)


# -- four-dimensional strongly bi-Hermitian relations -----------------------------

@dataclass
class StrongBiHermitianReport:
    passed: bool
    checks: dict[str, bool]
    lam: Scalar | None
    closed: bool | None

    def __bool__(self) -> bool:
        return self.passed


def strong_bihermitian_4d(b: Form, omega1: Form, omega2: Form, model: Model | None = None
                          ) -> StrongBiHermitianReport:
    """``B w1 = B w2 = w1 w2 = w1^2 + w2^2 - 4 B^2 = 0`` and ``w1^2 = lam w2^2`` with ``lam > 0``."""
    if not b.dim == omega1.dim == omega2.dim == 4:
        raise InputError("the strongly bi-Hermitian relations are four-dimensional")
    checks = {
        "B^w1 = 0": not b.wedge(omega1),
        "B^w2 = 0": not b.wedge(omega2),
        "w1^w2 = 0": not omega1.wedge(omega2),
        "w1^2 + w2^2 - 4B^2 = 0": not (omega1.wedge(omega1) + omega2.wedge(omega2) - b.wedge(b).scale(4)),
    }
    top1 = omega1.wedge(omega1).top_coefficient()
    top2 = omega2.wedge(omega2).top_coefficient()
    lam = None
    if top2 and top1.is_constant() and top2.is_constant():
        lam = top1.constant_value() / top2.constant_value()
    checks["w1^2 = lam w2^2, lam > 0"] = lam is not None and lam.is_real() and lam.re > 0
    closed = None
    if model is not None:
        closed = not (model.d(b) or model.d(omega1) or model.d(omega2))
        checks["closed"] = closed
    return StrongBiHermitianReport(all(checks.values()), checks, lam, closed)


# -- generalized Calabi-Yau metrics ----------------------------------------------------

@dataclass
class GCYReport:
    passed: bool
    c: Scalar | None
    detail: list[str]

    def __bool__(self) -> bool:
        return self.passed


def _sample_point(model: Model) -> list[Scalar]:
    return [Scalar(3 + 2 * k) / 7 for k in range(model.dim)]


def gcy_metric_check(rho1: Form, rho2: Form, model: Model, twisted: bool = False) -> GCYReport:
    """``(rho1, conj rho1) = c (rho2, conj rho2)`` for a constant ``c``.

    Also checks that both spinors are closed (``d`` or ``d_H``) and pure with
    real index zero, and that their structures form a generalized Kähler pair.
    The proportionality is tested as an exact polynomial identity.
    """
    detail: list[str] = []
    for name, rho in (("rho1", rho1), ("rho2", rho2)):
        if model.d_maybe_twisted(rho, twisted):
            detail.append(f"{name} is not closed")
    structures = []
    for name, rho in (("rho1", rho1), ("rho2", rho2)):
        probe = rho if rho.is_constant() else rho.eval_at(_sample_point(model))
        if not is_pure(probe):
            detail.append(f"{name} is not pure")
            continue
        try:
            structures.append(from_spinor(model, probe))
        except ValidationError as exc:
            detail.append(f"{name}: {exc}")
    if len(structures) == 2:
        check = gk_check(*structures)
        if not check:
            detail.append(f"not a generalized Kähler pair: {check.reason}")
    p1 = mukai_value(rho1, rho1.conjugate())
    p2 = mukai_value(rho2, rho2.conjugate())
    if not p2:
        raise InputError("(rho2, conj rho2) vanishes identically")
    point = _sample_point(model)
    v2 = p2.evaluate(point)
    if v2.is_zero():  # pragma: no cover - the sample point is generic for the fixtures
        raise InputError("(rho2, conj rho2) vanishes at the sample point")
    c = p1.evaluate(point) / v2
    if p1 != p2 * c:
        detail.append("the ratio of the Mukai lengths is not constant")
        c_out = None
    else:
        c_out = c
    return GCYReport(not detail, c_out, detail)
