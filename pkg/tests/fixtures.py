"""Fixture data shared by the unit, property and acceptance tests."""

from __future__ import annotations

from fractions import Fraction

from gcgeom import linalg as la
from gcgeom.forms import Form
from gcgeom.scalar import I, Scalar
from gcgeom.spinors import b_transform_spinor, beta_transform_spinor

E = Form.basis


def dz(m: int, k: int) -> Form:
    """``dz_k = e^{2k-1} + i e^{2k}``."""
    return E(m, 2 * k - 1) + E(m, 2 * k).scale(I)


def dzbar(m: int, k: int) -> Form:
    return E(m, 2 * k - 1) - E(m, 2 * k).scale(I)


def _q(a: int, b: int = 1) -> Scalar:
    return Scalar(Fraction(a, b))


def _pure_spinors() -> list[tuple[str, Form]]:
    out: list[tuple[str, Form]] = []
    for m in (2, 4):
        om = E(m, 1, 2) if m == 2 else E(m, 1, 2) + E(m, 3, 4)
        out += [
            (f"1 (m={m})", Form.one(m)),
            (f"e1 (m={m})", E(m, 1)),
            (f"top (m={m})", Form.basis(m, *range(1, m + 1))),
            (f"exp(i w) (m={m})", om.scale(I).exp()),
            (f"exp(-i w) (m={m})", om.scale(-I).exp()),
            (f"dz1 (m={m})", dz(m, 1)),
            (f"exp(e12) (m={m})", E(m, 1, 2).exp()),
            (f"e2 - 2 e1 (m={m})", E(m, 2) - E(m, 1).scale(2)),
        ]
    m = 4
    out += [
        ("e12", E(m, 1, 2)),
        ("e13 + i e14 (= e1 ^ dz2)", E(m, 1).wedge(dz(m, 2))),
        ("dz1 ^ dz2", dz(m, 1).wedge(dz(m, 2))),
        ("dzbar1 ^ dzbar2", dzbar(m, 1).wedge(dzbar(m, 2))),
        ("dz1 ^ exp(i e34)", dz(m, 1).wedge(E(m, 3, 4).scale(I).exp())),
        ("B-shift of dz1 ^ dz2", b_transform_spinor(E(m, 1, 3).scale(_q(1, 2)) - E(m, 2, 4),
                                                    dz(m, 1).wedge(dz(m, 2)))),
        ("beta-shift of exp(i w)", beta_transform_spinor(
            [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 2], [0, 0, -2, 0]],
            (E(m, 1, 3) + E(m, 2, 4)).scale(I).exp())),
        ("exp(e14 + i(e12 + e34))", (E(m, 1, 4) + (E(m, 1, 2) + E(m, 3, 4)).scale(I)).exp()),
        ("e1 ^ e3 + e1 ^ e4 ^ ... (decomposable)", E(m, 1).wedge(E(m, 3) + E(m, 4))),
    ]
    return out


PURE_SPINORS = _pure_spinors()

# Exotic nilmanifolds: (Salamon string, B, omega, Omega-generators, type)
E6 = lambda *i: E(6, *i)  # noqa: E731
NILMANIFOLDS = [
    ("nil 6: 0,0,12,13,14+23,34+52", E6(2, 6) - E6(3, 5) + E6(3, 6) - E6(4, 5), E6(3, 6) + E6(4, 5), 1),
    ("nil 6: 0,0,12,13,14,34+52", E6(3, 6) - E6(4, 5), E6(3, 6) + E6(4, 5), 1),
    ("nil 6: 0,0,0,12,13,14+35", Form.zero(6), E6(3, 6) + E6(4, 5), 1),
    ("nil 6: 0,0,0,12,23,14+35", -E6(3, 6) + E6(4, 5), E6(3, 6) + E6(4, 5), 1),
    ("nil 6: 0,0,0,0,12,15+34", Form.zero(6), E6(5, 6), 2),
]


def nil_spinor(b: Form, omega: Form, k: int) -> Form:
    big = dz(6, 1) if k == 1 else dz(6, 1).wedge(dz(6, 2))
    return (b + omega.scale(I)).exp().wedge(big)


# Quaternionic structures on R^4 (matrices act on columns; I: d1 -> d2, d3 -> d4)
def _mat(cols: list[list[tuple[int, int]]]) -> la.Matrix:
    m = [[0] * 4 for _ in range(4)]
    for j, img in enumerate(cols):
        for i, v in img:
            m[i][j] = v
    return la.as_matrix(m)


QI = _mat([[(1, 1)], [(0, -1)], [(3, 1)], [(2, -1)]])
QJ = _mat([[(2, 1)], [(3, -1)], [(0, -1)], [(1, 1)]])
QK = la.matmul(QI, QJ)
OMEGA_I = E(4, 1, 2) + E(4, 3, 4)
OMEGA_J = E(4, 1, 3) - E(4, 2, 4)
OMEGA_K = E(4, 1, 4) + E(4, 2, 3)

# generalized Kähler spinor pairs on flat R^4
FLAT_KAHLER = (dzbar(4, 1).wedge(dzbar(4, 2)), OMEGA_I.scale(I).exp())
HYPERKAHLER = ((-OMEGA_K + (OMEGA_I - OMEGA_J).scale(I)).exp(),
               (OMEGA_K + (OMEGA_I + OMEGA_J).scale(I)).exp())

# complex structure on su(2) + u(1): e1 -> e2, e3 -> e4
SU2U1_J = _mat([[(1, 1)], [(0, -1)], [(3, 1)], [(2, -1)]])
