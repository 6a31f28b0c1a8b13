"""Hypothesis strategies and sympy conversions shared by the test-suite."""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations

import sympy as sp
from sympy.combinatorics import Permutation
from hypothesis import strategies as st

from gcgeom.forms import Form, mask_indices
from gcgeom.genvector import GenVector
from gcgeom.poly import Poly
from gcgeom.scalar import Scalar

SYMBOLS = sp.symbols("x1:17")


# -- strategies -----------------------------------------------------------------------

def rationals(bound: int = 3, denominators: tuple[int, ...] = (1, 2, 3)):
    return st.builds(Fraction, st.integers(-bound, bound), st.sampled_from(denominators))


def scalars(complex_: bool = True, bound: int = 3):
    if not complex_:
        return st.builds(Scalar, rationals(bound))
    return st.builds(Scalar, rationals(bound), rationals(bound))


@st.composite
def polys(draw, nvars: int, degree: int = 2, max_terms: int = 3, complex_: bool = True) -> Poly:
    total = Poly()
    for _ in range(draw(st.integers(0, max_terms))):
        deg = draw(st.integers(0, degree))
        mono = Poly.const(draw(scalars(complex_)))
        for _ in range(deg):
            mono = mono * Poly.var(draw(st.integers(0, nvars - 1)))
        total = total + mono
    return total


@st.composite
def genvectors(draw, dim: int, degree: int = 2, nvars: int | None = None, complex_: bool = True) -> GenVector:
    nv = dim if nvars is None else nvars
    if nv == 0:
        coeff = st.builds(Poly.const, scalars(complex_))
    else:
        coeff = polys(nv, degree, complex_=complex_)
    vec = [draw(coeff) for _ in range(dim)]
    cov = [draw(coeff) for _ in range(dim)]
    return GenVector(vec, cov)


@st.composite
def const_forms(draw, dim: int, max_terms: int = 4, complex_: bool = True, degrees: tuple[int, ...] | None = None
                ) -> Form:
    masks = [mk for mk in range(1 << dim) if degrees is None or bin(mk).count("1") in degrees]
    terms = {}
    for _ in range(draw(st.integers(1, max_terms))):
        terms[draw(st.sampled_from(masks))] = draw(scalars(complex_))
    return Form(dim, terms)


@st.composite
def poly_forms(draw, dim: int, degree: int = 2, max_terms: int = 3, degrees: tuple[int, ...] | None = None) -> Form:
    masks = [mk for mk in range(1 << dim) if degrees is None or bin(mk).count("1") in degrees]
    terms: dict[int, Poly] = {}
    for _ in range(draw(st.integers(1, max_terms))):
        mk = draw(st.sampled_from(masks))
        terms[mk] = terms.get(mk, Poly()) + draw(polys(dim, degree))
    return Form(dim, terms)


# -- sympy conversions -----------------------------------------------------------------

def scalar_to_sympy(c: Scalar) -> sp.Expr:
    return sp.Rational(c.re.numerator, c.re.denominator) + sp.I * sp.Rational(c.im.numerator, c.im.denominator)


def sympy_to_scalar(e: sp.Expr) -> Scalar:
    re, im = sp.nsimplify(sp.re(e)), sp.nsimplify(sp.im(e))
    return Scalar(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))


def poly_to_sympy(p: Poly) -> sp.Expr:
    total = sp.Integer(0)
    for mono, c in p.terms.items():
        term = scalar_to_sympy(c)
        for v, e in mono:
            term *= SYMBOLS[v] ** e
        total += term
    return sp.expand(total)


def matrix_to_sympy(a) -> sp.Matrix:
    return sp.Matrix([[scalar_to_sympy(Scalar.coerce(x)) for x in row] for row in a])


def form_components(form: Form) -> dict[tuple[int, ...], sp.Expr]:
    """Fully antisymmetric component tensor ``w(e_i1, ..., e_ip)`` (0-based indices)."""
    out: dict[tuple[int, ...], sp.Expr] = {}
    for mask, c in form.terms.items():
        idx = mask_indices(mask)
        base = poly_to_sympy(c)
        for perm in permutations(range(len(idx))):
            sign = Permutation(list(perm)).signature()
            key = tuple(idx[k] for k in perm)
            out[key] = out.get(key, 0) + sign * base
    return out


def sympy_wedge(a: Form, b: Form) -> dict[tuple[int, ...], sp.Expr]:
    """Wedge product by the antisymmetrised tensor formula, returned on sorted index tuples."""
    ca, cb = form_components(a), form_components(b)
    result: dict[tuple[int, ...], sp.Expr] = {}
    m = a.dim
    for pa in {len(k) for k in ca} or {0}:
        for pb in {len(k) for k in cb} or {0}:
            n = pa + pb
            if n > m:
                continue
            for sorted_idx in _increasing(m, n):
                total = sp.Integer(0)
                for perm in permutations(range(n)):
                    sign = Permutation(list(perm)).signature()
                    idx = [sorted_idx[k] for k in perm]
                    total += sign * ca.get(tuple(idx[:pa]), 0) * cb.get(tuple(idx[pa:]), 0)
                total = sp.expand(total / (sp.factorial(pa) * sp.factorial(pb)))
                if total != 0:
                    result[sorted_idx] = result.get(sorted_idx, 0) + total
    return {k: v for k, v in result.items() if sp.expand(v) != 0}


def _increasing(m: int, n: int) -> list[tuple[int, ...]]:
    from itertools import combinations
    return list(combinations(range(m), n))


def form_sorted_components(form: Form) -> dict[tuple[int, ...], sp.Expr]:
    return {tuple(mask_indices(mk)): poly_to_sympy(c) for mk, c in form.terms.items() if c}


# -- independent coordinate formulas for the flat brackets ----------------------------

def sympy_bracket(m: int, a: tuple[list, list], b: tuple[list, list], h: Form | None = None,
                  dorfman: bool = False) -> tuple[list[sp.Expr], list[sp.Expr]]:
    """Courant (or Dorfman) bracket on flat ``R^m`` from the coordinate formulas.

    Sections are ``(vector components, covector components)`` as sympy lists.
    ``[X,Y]^k = X^j d_j Y^k - Y^j d_j X^k``, ``(L_X eta)_k = X^j d_j eta_k + eta_j d_k X^j``;
    the twist contributes ``-H(X, Y, e_k)``.
    """
    xs = SYMBOLS[:m]
    (X, xi), (Y, eta) = a, b

    def lie(u, w):
        return [sum(u[j] * sp.diff(w[k], xs[j]) + w[j] * sp.diff(u[j], xs[k]) for j in range(m)) for k in range(m)]

    vec = [sp.expand(sum(X[j] * sp.diff(Y[k], xs[j]) - Y[j] * sp.diff(X[k], xs[j]) for j in range(m)))
           for k in range(m)]
    lx_eta = lie(X, eta)
    if dorfman:
        dxi = [[sp.diff(xi[j], xs[i]) - sp.diff(xi[i], xs[j]) for j in range(m)] for i in range(m)]  # (d xi)_{ij}
        cov = [lx_eta[k] - sum(Y[i] * dxi[i][k] for i in range(m)) for k in range(m)]
    else:
        ly_xi = lie(Y, xi)
        f = sum(eta[k] * X[k] - xi[k] * Y[k] for k in range(m))
        cov = [lx_eta[k] - ly_xi[k] - sp.Rational(1, 2) * sp.diff(f, xs[k]) for k in range(m)]
    if h is not None:
        comps = form_components(h)
        for k in range(m):
            cov[k] -= sum(comps.get((i, j, k), 0) * X[i] * Y[j] for i in range(m) for j in range(m))
    return vec, [sp.expand(c) for c in cov]


def sympy_courant(a: GenVector, b: GenVector, h: Form | None = None, dorfman: bool = False
                  ) -> tuple[list[sp.Expr], list[sp.Expr]]:
    return sympy_bracket(a.dim, section_to_sympy(a), section_to_sympy(b), h, dorfman)


def sympy_pairing(a: tuple[list, list], b: tuple[list, list]) -> sp.Expr:
    """``<X + xi, Y + eta> = 1/2 (xi(Y) + eta(X))``."""
    return sp.expand(sum(a[1][k] * b[0][k] + b[1][k] * a[0][k] for k in range(len(a[0]))) / 2)


def section_to_sympy(v: GenVector) -> tuple[list[sp.Expr], list[sp.Expr]]:
    return [poly_to_sympy(c) for c in v.vec], [poly_to_sympy(c) for c in v.cov]


# -- seeded random data for the acceptance loops --------------------------------------------

def random_poly(rng, nvars: int, degree: int = 2, terms: int = 3) -> Poly:
    total = Poly()
    for _ in range(rng.randint(0, terms)):
        mono = Poly.const(Scalar(Fraction(rng.randint(-3, 3), rng.choice((1, 2))), rng.choice((0, 0, 1, -1))))
        for _ in range(rng.randint(0, degree)):
            mono = mono * Poly.var(rng.randrange(nvars))
        total = total + mono
    return total


def random_section(rng, dim: int, degree: int = 2) -> GenVector:
    return GenVector([random_poly(rng, dim, degree) for _ in range(dim)],
                     [random_poly(rng, dim, degree) for _ in range(dim)])


def random_three_form(rng, dim: int, degree: int = 2) -> Form:
    from itertools import combinations
    terms = {}
    for idx in combinations(range(dim), 3):
        p = random_poly(rng, dim, degree, terms=2)
        if p:
            terms[sum(1 << i for i in idx)] = p
    return Form(dim, terms)
