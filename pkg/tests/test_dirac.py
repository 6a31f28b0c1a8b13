"""Pairings, brackets, Dirac structures and their involutivity.

The coordinate formulas in ``helpers.sympy_bracket`` serve as the independent
oracle for the flat brackets; the Courant-algebroid identities are checked as
properties on random polynomial sections of degree at most two.
"""

from __future__ import annotations

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from gcgeom.dirac import (
    DiracFrame,
    classify,
    courant,
    dorfman,
    exact_section,
    extract_e_eps,
    inner_product,
    is_involutive,
    jacobiator,
    nij,
    pullback,
    pushforward,
    schouten_bivector,
)
from gcgeom.errors import ValidationError
from gcgeom.forms import Form
from gcgeom.genvector import GenVector
from gcgeom.isotropic import Isotropic, b_field_matrix, beta_matrix
from gcgeom.model import FlatModel, su2_u1_model
from gcgeom.poly import Poly
from gcgeom.scalar import I, Scalar
from gcgeom.spinors import annihilator, clifford_act, same_line
from fixtures import PURE_SPINORS, dz
from helpers import (
    SYMBOLS,
    const_forms,
    genvectors,
    poly_forms,
    poly_to_sympy,
    polys,
    section_to_sympy,
    sympy_bracket,
    sympy_courant,
    sympy_pairing,
)

E = Form.basis
d = GenVector.d
e = GenVector.e
x = Poly.var
HALF = Scalar(1) / 2

CRITERION_EXAMPLES = settings(max_examples=200)


def sections(dim: int):
    return genvectors(dim, degree=2)


dims = st.integers(1, 4)


# -- pairings and classification --------------------------------------------------------

def test_inner_product_examples() -> None:
    assert inner_product(d(2, 1), e(2, 1)) == Poly.const(HALF)
    assert inner_product(d(2, 1), d(2, 2)) == Poly()
    assert inner_product(d(2, 1) + e(2, 2), d(2, 2) + e(2, 1)) == Poly.const(1)
    assert inner_product(d(2, 1), e(2, 1), sign=-1) == Poly.const(-HALF)


def test_classify_examples() -> None:
    c = classify(Isotropic.tangent(4))
    assert (c.type, c.parity, c.real_index) == (0, "even", 4)
    w = E(4, 1, 2) + E(4, 3, 4)
    c = classify(annihilator(w.scale(I).exp()))
    assert (c.type, c.parity, c.real_index) == (0, "even", 0)
    c = classify(annihilator(dz(4, 1).wedge(dz(4, 2))))
    assert (c.type, c.parity, c.real_index) == (2, "even", 0)
    c = classify(annihilator(E(3, 1)))
    assert (c.type, c.parity) == (1, "odd")
    with pytest.raises(ValidationError):
        classify(Isotropic([d(2, 1).to_scalars()], 2))


@pytest.mark.parametrize("name, phi", PURE_SPINORS, ids=[n for n, _ in PURE_SPINORS])
def test_real_index_parity(name: str, phi: Form) -> None:
    c = classify(annihilator(phi))
    assert (c.real_index - phi.dim) % 2 == 0


@given(st.sampled_from([p for _, p in PURE_SPINORS if p.dim == 4]), const_forms(4, complex_=False, degrees=(2,)))
def test_b_transforms_preserve_type(phi: Form, b: Form) -> None:
    L = annihilator(phi)
    assert classify(L.transform(b_field_matrix(b))).type == classify(L).type


BETAS = [
    [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
    [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]],
    [[0, 0, 2, 0], [0, 0, 0, -1], [-2, 0, 0, 0], [0, 1, 0, 0]],
]


@pytest.mark.parametrize("beta", BETAS)
@pytest.mark.parametrize("name, phi", [(n, p) for n, p in PURE_SPINORS if p.dim == 4])
def test_beta_transforms_change_type_by_even(beta, name: str, phi: Form) -> None:
    L = annihilator(phi)
    assert (classify(L.transform(beta_matrix(beta))).type - classify(L).type) % 2 == 0


# -- L(E, eps) and functoriality ------------------------------------------------------------

def test_extract_e_eps_examples() -> None:
    ee = extract_e_eps(Isotropic.tangent(3))
    assert len(ee.e_basis) == 3 and ee.extension == Form.zero(3)
    w = E(4, 1, 2) + E(4, 3, 4)
    ee = extract_e_eps(annihilator(w.scale(I).exp()))
    assert len(ee.e_basis) == 4 and ee.extension == w.scale(-I)
    ee = extract_e_eps(Isotropic.cotangent(3))
    assert ee.e_basis == [] and ee.extension == Form.zero(3)


@pytest.mark.parametrize("name, phi", PURE_SPINORS, ids=[n for n, _ in PURE_SPINORS])
def test_extract_e_eps_round_trip(name: str, phi: Form) -> None:
    L = annihilator(phi)
    ee = extract_e_eps(L)
    assert ee.isotropic() == L
    assert same_line(ee.spinor(), phi)


PROJECTION = [[1, 0]]  # R^2 -> R, (x1, x2) -> x1


def test_pushforward_examples() -> None:
    L = annihilator(dz(4, 1).wedge(dz(4, 2)))
    assert pushforward([[1 if i == j else 0 for j in range(4)] for i in range(4)], L) == L
    assert pushforward(PROJECTION, Isotropic.tangent(2)) == Isotropic.tangent(1)
    assert pushforward(PROJECTION, Isotropic.cotangent(2)) == Isotropic.cotangent(1)


def test_pullback_examples() -> None:
    L = annihilator((E(2, 1, 2)).scale(I).exp())
    assert pullback([[1, 0], [0, 1]], L) == L
    assert pullback(PROJECTION, Isotropic.cotangent(1)) == Isotropic([d(2, 2).to_scalars(), e(2, 1).to_scalars()], 2)
    assert pullback(PROJECTION, Isotropic.tangent(1)) == Isotropic.tangent(2)


@given(st.sampled_from([p for _, p in PURE_SPINORS if p.dim == 4]),
       st.lists(st.lists(st.integers(-2, 2), min_size=4, max_size=4), min_size=2, max_size=2))
def test_push_and_pull_stay_maximal_isotropic(phi: Form, f) -> None:
    L = annihilator(phi)
    assert pushforward(f, L).is_maximal()
    assert pullback(f, annihilator(Form.one(2))).is_maximal()


# -- Courant and Dorfman brackets ---------------------------------------------------------------

def test_courant_examples() -> None:
    m = FlatModel(2)
    assert courant(m, d(2, 1), d(2, 2)) == GenVector.zero(2)
    a = d(2, 1) + e(2, 1, x(1))
    assert courant(m, a, d(2, 2)) == -e(2, 1)
    su2 = su2_u1_model(with_twist=False)
    assert courant(su2, d(4, 1), d(4, 2)) == d(4, 3)
    assert courant(su2, d(4, 4), d(4, 1)) == GenVector.zero(4)


def test_dorfman_examples() -> None:
    m = FlatModel(2)
    assert dorfman(m, d(2, 1), e(2, 1)) == GenVector.zero(2)
    assert dorfman(m, d(2, 1), e(2, 2, x(0))) == e(2, 2)
    df = exact_section(m, x(0) * x(1) + x(1) * x(1))
    c = d(2, 1, x(1)) + e(2, 2, x(0) * x(0))
    assert dorfman(m, df, c) == GenVector.zero(2)


@given(dims.flatmap(lambda n: st.tuples(st.just(n), sections(n), sections(n))))
def test_courant_matches_coordinate_formula(data) -> None:
    m, a, b = data
    assert section_to_sympy(courant(FlatModel(m), a, b)) == sympy_courant(a, b)
    assert section_to_sympy(dorfman(FlatModel(m), a, b)) == sympy_courant(a, b, dorfman=True)


@given(st.integers(3, 4).flatmap(lambda n: st.tuples(st.just(n), sections(n), sections(n),
                                                      poly_forms(n, degree=1, degrees=(3,)))))
def test_twisted_courant_matches_coordinate_formula(data) -> None:
    m, a, b, h = data
    model = FlatModel(m).with_twist(h, require_closed=False)
    assert section_to_sympy(courant(model, a, b, twisted=True)) == sympy_courant(a, b, h)
    assert section_to_sympy(dorfman(model, a, b, twisted=True)) == sympy_courant(a, b, h, dorfman=True)


def test_courant_vanishes_on_closed_one_forms() -> None:
    m = FlatModel(3)
    f, g = x(0) * x(1) - x(2), x(2) * x(2) * x(0)
    assert courant(m, exact_section(m, f), exact_section(m, g)) == GenVector.zero(3)
    assert courant(m, e(3, 1), e(3, 2, 5)) == GenVector.zero(3)


# -- Nijenhuis operator and Jacobiator --------------------------------------------------------------

def _sheared_frame(model: FlatModel, b: Form) -> list[GenVector]:
    return DiracFrame.b_field(model, b).sections


def test_nij_examples() -> None:
    m = FlatModel(3)
    assert nij(m, d(3, 1), d(3, 2), d(3, 3)) == Poly()
    assert nij(m, e(3, 1), e(3, 2, 3), e(3, 3)) == Poly()
    # frame of exp(B)(T) with B = x3 e12, dB = e123; the oracle evaluates the
    # defining formula on the coordinate brackets
    frame = _sheared_frame(m, E(3, 1, 2).scale(x(2)))
    oracle_secs = [section_to_sympy(s) for s in frame]
    a, b, c = oracle_secs
    expected = sp.Rational(1, 3) * (sympy_pairing(sympy_bracket(3, a, b), c)
                                    + sympy_pairing(sympy_bracket(3, b, c), a)
                                    + sympy_pairing(sympy_bracket(3, c, a), b))
    assert sp.expand(expected) == sp.Rational(1, 2)
    assert nij(m, *frame) == Poly.const(HALF)


def _sympy_jacobiator(m: int, a, b, c, h: Form | None = None):
    def br(u, v):
        return sympy_bracket(m, u, v, h)

    terms = [br(br(a, b), c), br(br(b, c), a), br(br(c, a), b)]
    return ([sp.expand(sum(t[0][k] for t in terms)) for k in range(m)],
            [sp.expand(sum(t[1][k] for t in terms)) for k in range(m)])


def test_jacobiator_example() -> None:
    m = FlatModel(3)
    a, b, c = d(3, 1) + e(3, 3, x(1)), d(3, 2), d(3, 3)
    lhs = jacobiator(m, a, b, c)
    rhs = exact_section(m, nij(m, a, b, c))
    assert lhs == rhs
    oracle = _sympy_jacobiator(3, section_to_sympy(a), section_to_sympy(b), section_to_sympy(c))
    assert section_to_sympy(lhs) == oracle
    assert jacobiator(m, d(3, 1, x(2)), d(3, 2), d(3, 3, x(0))) == GenVector.zero(3)


# -- Courant-algebroid identities on random sections ------------------------------------------------

@CRITERION_EXAMPLES
@given(dims.flatmap(lambda n: st.tuples(st.just(n), sections(n), sections(n))))
def test_anchor_is_a_bracket_homomorphism(data) -> None:
    m, a, b = data
    model = FlatModel(m)
    assert courant(model, a, b).vec == model.bracket(a.vec, b.vec)
    assert courant(model, a, b) == -courant(model, b, a)


@CRITERION_EXAMPLES
@given(dims.flatmap(lambda n: st.tuples(st.just(n), sections(n), sections(n), polys(n, 2))))
def test_courant_leibniz_rule(data) -> None:
    m, a, b, f = data
    model = FlatModel(m)
    lhs = courant(model, a, b.scale(f))
    rhs = (courant(model, a, b).scale(f) + b.scale(model.derive(a.vec, f))
           - exact_section(model, f).scale(inner_product(a, b)))
    assert lhs == rhs


@CRITERION_EXAMPLES
@given(dims.flatmap(lambda n: st.tuples(st.just(n), sections(n), sections(n), sections(n))))
def test_derivative_of_the_pairing(data) -> None:
    m, a, b, c = data
    model = FlatModel(m)
    lhs = model.derive(a.vec, inner_product(b, c))
    assert lhs == inner_product(dorfman(model, a, b), c) + inner_product(b, dorfman(model, a, c))


@CRITERION_EXAMPLES
@given(dims.flatmap(lambda n: st.tuples(st.just(n), sections(n), sections(n), sections(n))))
def test_jacobiator_is_exact(data) -> None:
    m, a, b, c = data
    model = FlatModel(m)
    assert jacobiator(model, a, b, c) == exact_section(model, nij(model, a, b, c))


@CRITERION_EXAMPLES
@given(dims.flatmap(lambda n: st.tuples(st.just(n), sections(n), sections(n), sections(n))))
def test_dorfman_leibniz_identity(data) -> None:
    m, a, b, c = data
    model = FlatModel(m)
    assert dorfman(model, a, dorfman(model, b, c)) == (dorfman(model, dorfman(model, a, b), c)
                                                      + dorfman(model, b, dorfman(model, a, c)))
    assert dorfman(model, a, b) - dorfman(model, b, a) == courant(model, a, b).scale(2)


@CRITERION_EXAMPLES
@given(st.tuples(sections(4), sections(4), sections(4), poly_forms(4, degree=2, degrees=(3,))))
def test_twisted_jacobiator_anomaly(data) -> None:
    a, b, c, h = data
    model = FlatModel(4).with_twist(h, require_closed=False)
    dh = model.d(h)
    anomaly = dh.contract(a.vec).contract(b.vec).contract(c.vec)
    lhs = jacobiator(model, a, b, c, twisted=True) - exact_section(model, nij(model, a, b, c, twisted=True))
    assert lhs == (GenVector.from_form(anomaly) if anomaly else GenVector.zero(4))


@given(sections(4), sections(4), sections(4), const_forms(4, complex_=False, degrees=(3,)))
def test_twisted_jacobiator_is_exact_for_closed_twist(a, b, c, h) -> None:
    model = FlatModel(4).with_twist(h)
    assert jacobiator(model, a, b, c, True) == exact_section(model, nij(model, a, b, c, True))


# -- involutivity ------------------------------------------------------------------------------

def test_b_field_graph_involutivity() -> None:
    m = FlatModel(3)
    closed = E(3, 1, 2).scale(x(0) + x(1)) + E(3, 1, 3).scale(Scalar(2))
    report = is_involutive(DiracFrame.b_field(m, closed))
    assert report.involutive and report.routes_agree
    b = E(3, 1, 2).scale(x(2))
    report = is_involutive(DiracFrame.b_field(m, b))
    assert not report.involutive and report.routes_agree and report.failures
    twisted = m.with_twist(m.d(b))
    report = is_involutive(DiracFrame.b_field(twisted, b), twisted=True)
    assert report.involutive and report.routes_agree


def test_witness_for_z1_plus_dz1_dz2() -> None:
    m = FlatModel(4)
    z1 = x(0) + x(1) * I
    rho = Form.one(4, z1) + dz(4, 1).wedge(dz(4, 2))
    report = is_involutive(DiracFrame.from_spinor(m, rho), degree_bound=0)
    assert report.involutive and report.routes_agree
    w = report.witness
    assert w is not None and clifford_act(w, rho) == m.d(rho)
    # the witness is -d/dz2 = -(1/2)(d3 - i d4) modulo sections of L
    del_z2 = d(4, 3, HALF) + d(4, 4, -HALF * I)
    assert clifford_act(w + del_z2, rho) == Form.zero(4)


def test_non_isotropic_frame_is_rejected() -> None:
    with pytest.raises(ValidationError):
        DiracFrame(FlatModel(2), [d(2, 1) + e(2, 1)])


POISSON_FIXTURES = [
    ("constant", [[0, 1, 0], [-1, 0, 2], [0, -2, 0]]),
    ("x3 d1^d2", [[0, x(2), 0], [-x(2), 0, 0], [0, 0, 0]]),
    ("linear su(2)*", [[0, x(2), -x(1)], [-x(2), 0, x(0)], [x(1), -x(0), 0]]),
    ("d1^d2 + x2 d2^d3", [[0, 1, 0], [-1, 0, x(1)], [0, -x(1), 0]]),
    ("x1 d1^d2 + x1 d2^d3", [[0, x(0), 0], [-x(0), 0, x(0)], [0, -x(0), 0]]),
    ("x1 d2^d3 + d1^d3", [[0, 0, 1], [0, 0, x(0)], [-1, -x(0), 0]]),
]


def _sympy_jacobi_of_coordinates(beta) -> bool:
    """``{x_a, {x_b, x_c}} + cyclic`` for ``{f, g} = beta^{ij} d_i f d_j g``."""
    b = [[poly_to_sympy(Poly.coerce(v)) for v in row] for row in beta]
    xs = SYMBOLS[:3]

    def bracket(f, g):
        return sum(b[i][j] * sp.diff(f, xs[i]) * sp.diff(g, xs[j]) for i in range(3) for j in range(3))

    xa, xb, xc = xs
    jac = bracket(xa, bracket(xb, xc)) + bracket(xb, bracket(xc, xa)) + bracket(xc, bracket(xa, xb))
    return sp.expand(jac) == 0


@pytest.mark.parametrize("name, beta", POISSON_FIXTURES, ids=[n for n, _ in POISSON_FIXTURES])
def test_poisson_criterion(name: str, beta) -> None:
    m = FlatModel(3)
    poisson = _sympy_jacobi_of_coordinates(beta)
    report = is_involutive(DiracFrame.bivector_graph(m, beta))
    assert report.routes_agree
    assert report.involutive == poisson == (not schouten_bivector(m, beta))


def test_poisson_fixtures_cover_both_outcomes() -> None:
    outcomes = {_sympy_jacobi_of_coordinates(beta) for _, beta in POISSON_FIXTURES}
    assert outcomes == {True, False}
