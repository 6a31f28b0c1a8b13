"""Bounded-degree linear solves with polynomial unknowns.

Many questions ("is there ``X + xi`` with ``d rho = (X + xi) . rho``?", "which
sections annihilate ``rho``?") are linear in an unknown whose components are
polynomials.  Bounding the total degree turns them into finite linear systems
over the Gaussian rationals: each unknown coefficient contributes one column,
obtained by applying the (linear) operator to the corresponding basis element.
"""

from __future__ import annotations

from typing import Callable, Hashable, Iterable, Mapping, Sequence

from . import linalg as la
from .forms import Form
from .genvector import GenVector
from .poly import Monomial, Poly, monomials_up_to
from .scalar import Scalar

Coordinates = Mapping[Hashable, Scalar]


def form_coordinates(form: Form) -> dict[tuple[int, Monomial], Scalar]:
    """Flatten a form into ``(mask, monomial) -> coefficient``."""
    return {(mask, mono): c for mask, p in form.terms.items() for mono, c in p.terms.items()}


def genvector_coordinates(v: GenVector) -> dict[tuple[int, Monomial], Scalar]:
    out: dict[tuple[int, Monomial], Scalar] = {}
    for k, p in enumerate((*v.vec, *v.cov)):
        for mono, c in p.terms.items():
            out[(k, mono)] = c
    return out


def _matrix(images: Sequence[Coordinates], target: Coordinates | None = None
            ) -> tuple[la.Matrix, list[Scalar]]:
    keys: dict[Hashable, int] = {}
    for img in images:
        for key in img:
            keys.setdefault(key, len(keys))
    if target is not None:
        for key in target:
            keys.setdefault(key, len(keys))
    mat = la.zeros(len(keys), len(images))
    for j, img in enumerate(images):
        for key, c in img.items():
            mat[keys[key]][j] = c
    rhs = [Scalar(0)] * len(keys)
    if target is not None:
        for key, c in target.items():
            rhs[keys[key]] = c
    return mat, rhs


def solve_combination(images: Sequence[Coordinates], target: Coordinates) -> list[Scalar] | None:
    """Coefficients ``c`` with ``sum c_j images[j] = target``, or ``None``."""
    if not images:
        return [] if not any(target.values()) else None
    mat, rhs = _matrix(images, target)
    if not mat:
        return [Scalar(0)] * len(images)
    return la.solve(mat, rhs)


def kernel_combinations(images: Sequence[Coordinates]) -> list[list[Scalar]]:
    """A basis of the linear relations ``sum c_j images[j] = 0``."""
    if not images:
        return []
    mat, _ = _matrix(images)
    if not mat:
        return [[Scalar(1) if i == j else Scalar(0) for i in range(len(images))] for j in range(len(images))]
    return la.nullspace(mat, ncols=len(images))


def genvector_ansatz(dim: int, nvars: int, degree: int) -> list[GenVector]:
    """Basis ``x^a d_k`` and ``x^a e^k`` of sections with coefficients of degree <= ``degree``."""
    monos = monomials_up_to(nvars, degree) if degree >= 0 else []
    out = []
    for k in range(2 * dim):
        for mono in monos:
            comps = [Poly()] * (2 * dim)
            comps[k] = Poly({mono: Scalar(1)})
            out.append(GenVector(comps[:dim], comps[dim:]))
    return out


def form_ansatz(dim: int, nvars: int, degree: int, masks: Iterable[int] | None = None) -> list[Form]:
    """Basis ``x^a e^I`` of forms with coefficients of degree <= ``degree``."""
    ms = list(range(1 << dim)) if masks is None else list(masks)
    monos = monomials_up_to(nvars, degree)
    return [Form(dim, {mask: Poly({mono: Scalar(1)})}) for mask in ms for mono in monos]


def combine_genvectors(basis: Sequence[GenVector], coeffs: Sequence[Scalar], dim: int) -> GenVector:
    out = GenVector.zero(dim)
    for b, c in zip(basis, coeffs):
        if c:
            out = out + b.scale(c)
    return out


def combine_forms(basis: Sequence[Form], coeffs: Sequence[Scalar], dim: int) -> Form:
    out = Form.zero(dim)
    for b, c in zip(basis, coeffs):
        if c:
            out = out + b.scale(c)
    return out


def solve_for_genvector(op: Callable[[GenVector], Form], target: Form, dim: int, nvars: int,
                        degree: int) -> GenVector | None:
    """A section ``v`` of bounded coefficient degree with ``op(v) = target`` (``op`` linear)."""
    basis = genvector_ansatz(dim, nvars, degree)
    images = [form_coordinates(op(b)) for b in basis]
    coeffs = solve_combination(images, form_coordinates(target))
    if coeffs is None:
        return None
    return combine_genvectors(basis, coeffs, dim)


def kernel_genvectors(op: Callable[[GenVector], Form], dim: int, nvars: int, degree: int) -> list[GenVector]:
    """A basis (over constants) of bounded-degree sections killed by a linear ``op``."""
    basis = genvector_ansatz(dim, nvars, degree)
    images = [form_coordinates(op(b)) for b in basis]
    return [combine_genvectors(basis, c, dim) for c in kernel_combinations(images)]
