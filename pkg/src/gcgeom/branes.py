"""Generalized submanifolds (branes) at the linear level.

A brane is a coordinate-aligned subspace ``M`` (given by the 1-based indices
of the coordinates it spans; the other coordinates vanish on it) together with
a 2-form ``F`` on ``M``.  Its generalized tangent space is

    tau_M^F = {X + xi : X in T_M, xi|_M = i_X F},

spanned by ``d_k + i_{d_k} F`` for ``k`` in ``M`` and the conormal covectors
``e^j`` for ``j`` not in ``M``.  A B-field moves ``(M, F)`` to ``(M, F + B|_M)``.

A generalized complex structure ``J`` is read off as a matrix: the complex
kind is ``[[A, 0], [0, -A^*]]`` and the symplectic kind is
``[[0, -W^{-1}], [W, 0]]`` with ``W`` the map ``X -> i_X omega``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from . import linalg as la
from .errors import InputError, UnsupportedError, ValidationError
from .forms import Form, indices_mask
from .gcs import GCStructure, _matrix_from_rows
from .genvector import GenVector, clifford
from .isotropic import Isotropic, map_to_two_form
from .linalg import Matrix, Vector
from .model import FlatModel, Model
from .poly import ZERO_POLY
from .scalar import Scalar, ScalarLike

__all__ = [
    "BraneData",
    "restrict",
    "gen_submanifold_check",
    "gen_tangent",
    "structure_matrix",
    "brane_stability",
    "ClauseReport",
    "brane_classify",
    "calibration_check",
    "space_filling_search",
]


@dataclass(frozen=True)
class BraneData:
    """A coordinate subspace ``M`` of ``R^m`` with a 2-form ``F`` on it."""

    dim: int
    subspace: tuple[int, ...]
    f: Form

    def __post_init__(self) -> None:
        idx = tuple(sorted(set(self.subspace)))
        if idx != tuple(sorted(self.subspace)):
            raise InputError("subspace indices must be distinct")
        if any(not 1 <= k <= self.dim for k in idx):
            raise InputError(f"subspace indices must lie in 1..{self.dim}")
        object.__setattr__(self, "subspace", idx)
        if self.f.dim != self.dim:
            raise InputError("F has the wrong dimension")
        if self.f.degrees() - {2}:
            raise InputError("F must be a 2-form")
        mask = self.mask
        for term_mask, c in self.f.terms.items():
            if term_mask & ~mask:
                raise ValidationError("F has legs transverse to M")
            if any(v + 1 not in idx for v in c.variables()):
                raise ValidationError("F depends on coordinates transverse to M")

    @property
    def mask(self) -> int:
        return indices_mask(k - 1 for k in self.subspace)

    @property
    def normal(self) -> tuple[int, ...]:
        return tuple(k for k in range(1, self.dim + 1) if k not in self.subspace)

    def shifted(self, b: Form) -> "BraneData":
        """``e^B (M, F) = (M, F + B|_M)``."""
        return BraneData(self.dim, self.subspace, self.f + restrict(b, self.subspace))

    def tangent_vectors(self) -> list[Vector]:
        return [la.identity(self.dim)[k - 1] for k in self.subspace]


def restrict(form: Form, subspace: Iterable[int]) -> Form:
    """Pull back to the coordinate subspace: drop transverse legs, set transverse coordinates to 0."""
    idx = set(subspace)
    mask = indices_mask(k - 1 for k in idx)
    dim = form.dim
    transverse = {v: ZERO_POLY for v in range(dim) if v + 1 not in idx}
    out = {}
    for term_mask, c in form.terms.items():
        if term_mask & ~mask:
            continue
        if c.variables() & transverse.keys():
            c = c.substitute(transverse)
        if c:
            out[term_mask] = c
    return Form(dim, out)


def gen_submanifold_check(model: Model, brane: BraneData) -> bool:
    """``d F = H|_M`` exactly (``H = 0`` without a twist)."""
    if not isinstance(model, FlatModel):
        raise UnsupportedError("coordinate subspaces need a flat model")
    if model.dim != brane.dim:
        raise InputError("brane and model dimensions differ")
    h = model.twist if model.twist is not None else Form.zero(model.dim)
    return restrict(model.d(brane.f), brane.subspace) == restrict(h, brane.subspace)


def _check_point(brane: BraneData, point: Sequence[ScalarLike] | None) -> list[Scalar]:
    if point is None:
        return [Scalar(0)] * brane.dim
    pt = [Scalar.coerce(x) for x in point]
    if len(pt) != brane.dim:
        raise InputError("point has the wrong dimension")
    if any(pt[k - 1] for k in brane.normal):
        raise InputError("point does not lie on M")
    return pt


def gen_tangent(brane: BraneData, point: Sequence[ScalarLike] | None = None) -> Isotropic:
    """Basis ``d_k + i_{d_k} F`` (``k`` in ``M``) and ``e^j`` (``j`` normal) at a point of ``M``."""
    pt = _check_point(brane, point)
    f = brane.f.eval_at(pt) if not brane.f.is_constant() else brane.f
    m = brane.dim
    rows = []
    for k in brane.subspace:
        x = la.identity(m)[k - 1]
        xi = f.contract(x)
        cov = [xi.terms[1 << j].constant_value() if (1 << j) in xi.terms else Scalar(0) for j in range(m)]
        rows.append(x + cov)
    for j in brane.normal:
        rows.append([Scalar(0)] * m + la.identity(m)[j - 1])
    return Isotropic(rows, m)


def structure_matrix(j: GCStructure | Matrix, point: Sequence[ScalarLike] | None = None) -> Matrix:
    """The matrix of ``J``, evaluated at ``point`` for non-constant frames."""
    if not isinstance(j, GCStructure):
        return la.as_matrix(j)
    if j.matrix is not None:
        return j.matrix
    if point is None:
        raise InputError("a point is required for a structure with non-constant frame")
    return _matrix_from_rows(j.isotropic(point).rows, j.dim)


def _stable(j: Matrix, rows: Sequence[Vector]) -> bool:
    return all(la.in_span(la.matvec(j, r), rows) for r in rows)


def brane_stability(j: GCStructure | Matrix, brane: BraneData, point: Sequence[ScalarLike] | None = None) -> bool:
    """Whether ``J tau_M^F`` lies in ``tau_M^F`` at the point."""
    jm = structure_matrix(j, point)
    if len(jm) != 2 * brane.dim:
        raise InputError("structure and brane dimensions differ")
    return _stable(jm, gen_tangent(brane, point).rows)


# -- clause-level diagnostics ---------------------------------------------------------

@dataclass
class ClauseReport:
    kind: str
    clauses: dict[str, bool]
    stable: bool
    k: int | None = None

    @property
    def holds(self) -> bool:
        return all(self.clauses.values())

    @property
    def agrees(self) -> bool:
        """The conjunction of the clauses matches the direct stability test."""
        return self.holds == self.stable


def _kind_of(jm: Matrix) -> str | None:
    m = len(jm) // 2
    off = la.sub_block(jm, 0, m, m, 2 * m), la.sub_block(jm, m, 2 * m, 0, m)
    diag = la.sub_block(jm, 0, m, 0, m), la.sub_block(jm, m, 2 * m, m, 2 * m)
    if all(la.is_zero_matrix(b) for b in off):
        return "complex"
    if all(la.is_zero_matrix(b) for b in diag):
        return "symplectic"
    return None


def _in_annihilator(cov: Sequence[Scalar], tangent: Sequence[Vector]) -> bool:
    return all(not sum((c * x for c, x in zip(cov, v)), Scalar(0)) for v in tangent)


def _complex_clauses(jm: Matrix, brane: BraneData, f: Form) -> dict[str, bool]:
    m = brane.dim
    a = la.sub_block(jm, 0, m, 0, m)
    tangent = brane.tangent_vectors()
    closed = all(la.in_span(la.matvec(a, v), tangent) for v in tangent) if tangent else True
    at = la.transpose(a)  # xi -> xi o A on column covectors
    type11 = True
    for v in tangent:
        ixf = [f.contract(v).terms.get(1 << k) for k in range(m)]
        ixf_s = [c.constant_value() if c is not None else Scalar(0) for c in ixf]
        jv = la.matvec(a, v)
        ijf = [f.contract(jv).terms.get(1 << k) for k in range(m)]
        ijf_s = [c.constant_value() if c is not None else Scalar(0) for c in ijf]
        total = [x + y for x, y in zip(la.matvec(at, ixf_s), ijf_s)]
        if not _in_annihilator(total, tangent):
            type11 = False
    return {"T_M is J-invariant": closed, "F is of type (1,1) on M": type11}


def _symplectic_clauses(jm: Matrix, brane: BraneData, f: Form) -> tuple[dict[str, bool], int | None]:
    m = brane.dim
    w = la.sub_block(jm, m, 2 * m, 0, m)
    winv = la.inverse(w)
    omega = map_to_two_form(w)
    tangent = brane.tangent_vectors()
    conormal = [la.identity(m)[j - 1] for j in brane.normal]
    coiso = all(la.in_span(la.matvec(winv, xi), tangent) for xi in conormal) if conormal else True
    # symplectic orthogonal of T_M inside T_M
    gram_w = [[omega.value(u, v).constant_value() for v in tangent] for u in tangent]
    perp_coeffs = la.nullspace(gram_w, ncols=len(tangent)) if tangent else []
    perp = [[sum((c[i] * tangent[i][r] for i in range(len(tangent))), Scalar(0)) for r in range(m)]
            for c in perp_coeffs]
    descends = all(not f.contract(x) for x in perp)
    complement = la.complete_basis(perp, m, tangent)[len(perp):] if tangent else []
    complement = [v for v in complement if la.in_span(v, tangent)]
    gram_q = [[omega.value(u, v).constant_value() for v in complement] for u in complement]
    gram_f = [[f.value(u, v).constant_value() for v in complement] for u in complement]
    acs = True
    if complement:
        try:
            a = la.matmul(la.inverse(gram_q), gram_f)
            acs = la.equal(la.matmul(a, a), la.neg(la.identity(len(a))))
        except ZeroDivisionError:
            acs = False
    n = m // 2
    dm = len(tangent)
    k = (dm - n) // 2 if (dm - n) % 2 == 0 and dm >= n else None
    clauses = {
        "M is coisotropic": coiso,
        "F descends to T_M/T_M^perp": descends,
        "(omega|_M)^{-1} F is an almost complex structure": acs,
    }
    return clauses, k


def brane_classify(kind: str, j: GCStructure | Matrix, brane: BraneData,
                   point: Sequence[ScalarLike] | None = None) -> ClauseReport:
    """Evaluate the complex or symplectic clauses separately and cross-check stability."""
    jm = structure_matrix(j, point)
    actual = _kind_of(jm)
    if kind not in ("complex", "symplectic"):
        raise InputError("kind must be 'complex' or 'symplectic'")
    if actual != kind:
        raise InputError(f"structure is not of {kind} kind")
    pt = _check_point(brane, point)
    f = brane.f.eval_at(pt) if not brane.f.is_constant() else brane.f
    stable = brane_stability(jm, brane, point)
    if kind == "complex":
        return ClauseReport(kind, _complex_clauses(jm, brane, f), stable)
    clauses, k = _symplectic_clauses(jm, brane, f)
    return ClauseReport(kind, clauses, stable, k)


def calibration_check(tau: Isotropic, rho2: Form) -> bool:
    """``tau . Im(rho2) = 0`` for every basis element of ``tau``."""
    if not rho2.is_constant():
        raise InputError("calibration is checked pointwise: evaluate rho2 at a point first")
    im = rho2.imag_part()
    return all(not clifford(GenVector.from_scalars(r), im) for r in tau.rows)


def space_filling_search(j: GCStructure | Matrix, entries: Sequence[int] = (-1, 0, 1)) -> list[Form]:
    """All 2-forms with components in ``entries`` making ``(R^m, F)`` a stable brane.

    A finite fixture generator for coisotropic branes, not a general solver.
    """
    jm = structure_matrix(j)
    m = len(jm) // 2
    pairs = [(a, b) for a in range(m) for b in range(a + 1, m)]
    full = tuple(range(1, m + 1))
    found = []
    for values in product(entries, repeat=len(pairs)):
        f = Form(m, {(1 << a) | (1 << b): v for (a, b), v in zip(pairs, values) if v})
        if brane_stability(jm, BraneData(m, full, f)):
            found.append(f)
    return found
