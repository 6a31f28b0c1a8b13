"""Exact dense linear algebra over the Gaussian rationals.

Matrices are plain ``list[list[Scalar]]`` (row major); vectors are
``list[Scalar]``.  Everything is decided by exact row reduction, so ranks,
nullspaces and span comparisons carry no tolerance.
"""

from __future__ import annotations

from typing import Sequence

from .poly import Poly
from .scalar import Scalar, ScalarLike

Matrix = list[list[Scalar]]
Vector = list[Scalar]


def as_matrix(rows: Sequence[Sequence[ScalarLike]]) -> Matrix:
    return [[Scalar.coerce(x) for x in row] for row in rows]


def as_vector(vals: Sequence[ScalarLike]) -> Vector:
    return [Scalar.coerce(x) for x in vals]


def zeros(rows: int, cols: int) -> Matrix:
    return [[Scalar(0) for _ in range(cols)] for _ in range(rows)]


def identity(n: int) -> Matrix:
    return [[Scalar(1) if i == j else Scalar(0) for j in range(n)] for i in range(n)]


def shape(a: Matrix) -> tuple[int, int]:
    return len(a), (len(a[0]) if a else 0)


def transpose(a: Sequence[Sequence[Scalar]]) -> Matrix:
    if not a:
        return []
    return [list(col) for col in zip(*a)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if a and len(a[0]) != len(b):
        raise ValueError(f"shape mismatch {shape(a)} x {shape(b)}")
    bt = transpose(b)
    out = []
    for row in a:
        nz = [(k, x) for k, x in enumerate(row) if x]
        out_row = []
        for col in bt:
            s = Scalar(0)
            for k, x in nz:
                y = col[k]
                if y:
                    s = s + x * y
            out_row.append(s)
        out.append(out_row)
    return out


def matvec(a: Matrix, v: Sequence[Scalar]) -> Vector:
    out = []
    for row in a:
        s = Scalar(0)
        for x, y in zip(row, v):
            if x and y:
                s = s + x * y
        out.append(s)
    return out


def add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(a: Matrix, c: ScalarLike) -> Matrix:
    s = Scalar.coerce(c)
    return [[x * s for x in row] for row in a]


def neg(a: Matrix) -> Matrix:
    return [[-x for x in row] for row in a]


def conj(a: Matrix) -> Matrix:
    return [[x.conjugate() for x in row] for row in a]


def is_zero_matrix(a: Matrix) -> bool:
    return all(not x for row in a for x in row)


def equal(a: Matrix, b: Matrix) -> bool:
    return shape(a) == shape(b) and all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def is_real(a: Matrix) -> bool:
    return all(x.is_real() for row in a for x in row)


def block(blocks: Sequence[Sequence[Matrix]]) -> Matrix:
    """Assemble a block matrix from a grid of equally sized blocks per row."""
    out: Matrix = []
    for brow in blocks:
        nrows = len(brow[0])
        for i in range(nrows):
            row: list[Scalar] = []
            for b in brow:
                row.extend(b[i])
            out.append(row)
    return out


def sub_block(a: Matrix, r0: int, r1: int, c0: int, c1: int) -> Matrix:
    return [row[c0:c1] for row in a[r0:r1]]


def rref(a: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(row) for row in a]
    nrows, ncols = shape(m)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        pivot_row = m[r]
        nz = [(k, x) for k, x in enumerate(pivot_row) if x]
        for i in range(nrows):
            if i != r:
                f = m[i][c]
                if f:
                    row = m[i]
                    for k, x in nz:
                        row[k] = row[k] - f * x
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: Matrix) -> int:
    if not a:
        return 0
    return len(rref(a)[1])


def nullspace(a: Matrix, ncols: int | None = None) -> list[Vector]:
    """A basis of ``{x : a x = 0}`` (free variables set to unit vectors)."""
    if not a:
        n = ncols or 0
        return [[Scalar(1) if i == j else Scalar(0) for i in range(n)] for j in range(n)]
    r, pivots = rref(a)
    n = len(a[0])
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Scalar(0)] * n
        v[f] = Scalar(1)
        for row_idx, pc in enumerate(pivots):
            v[pc] = -r[row_idx][f]
        basis.append(v)
    return basis


def solve(a: Matrix, b: Sequence[Scalar]) -> Vector | None:
    """A particular solution of ``a x = b`` with free variables zero, or ``None``."""
    nrows, ncols = shape(a)
    if nrows == 0:
        return [Scalar(0)] * ncols
    aug = [list(row) + [Scalar.coerce(bi)] for row, bi in zip(a, b)]
    r, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Scalar(0)] * ncols
    for row_idx, pc in enumerate(pivots):
        x[pc] = r[row_idx][ncols]
    return x


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(row) + e for row, e in zip(a, identity(n))]
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in r]


def det(a: Matrix) -> Scalar:
    m = [list(row) for row in a]
    n = len(m)
    d = Scalar(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c]), None)
        if p is None:
            return Scalar(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        d = d * m[c][c]
        inv = m[c][c].inverse()
        for i in range(c + 1, n):
            f = m[i][c] * inv
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return d


def row_basis(vectors: Sequence[Sequence[Scalar]]) -> list[Vector]:
    """A reduced basis of the span of the given vectors."""
    vs = [list(v) for v in vectors]
    if not vs:
        return []
    r, pivots = rref(vs)
    return [r[i] for i in range(len(pivots))]


def span_rank(vectors: Sequence[Sequence[Scalar]]) -> int:
    return rank([list(v) for v in vectors]) if vectors else 0


def in_span(v: Sequence[Scalar], vectors: Sequence[Sequence[Scalar]]) -> bool:
    return span_rank(list(vectors) + [list(v)]) == span_rank(vectors)


def same_span(u: Sequence[Sequence[Scalar]], w: Sequence[Sequence[Scalar]]) -> bool:
    ru, rw = span_rank(u), span_rank(w)
    return ru == rw and span_rank(list(u) + list(w)) == ru


def intersection_dim(u: Sequence[Sequence[Scalar]], w: Sequence[Sequence[Scalar]]) -> int:
    return span_rank(u) + span_rank(w) - span_rank(list(u) + list(w))


def leading_minors_positive(a: Matrix) -> bool:
    """Sylvester's criterion for a real symmetric matrix."""
    n = len(a)
    for k in range(1, n + 1):
        d = det([row[:k] for row in a[:k]])
        if not d.is_real() or d.re <= 0:
            return False
    return True


def is_symmetric(a: Matrix) -> bool:
    n = len(a)
    return all(a[i][j] == a[j][i] for i in range(n) for j in range(n))


def complete_basis(vectors: Sequence[Sequence[Scalar]], n: int,
                   candidates: Sequence[Sequence[Scalar]] | None = None) -> list[Vector]:
    """Extend independent vectors to a basis, trying ``candidates`` before unit vectors."""
    basis = [list(v) for v in vectors]
    units = [[Scalar(1) if i == k else Scalar(0) for i in range(n)] for k in range(n)]
    for e in list(candidates or []) + units:
        if len(basis) == n:
            break
        if not in_span(e, basis):
            basis.append(list(e))
    return basis


def intersection_basis(u: Sequence[Sequence[Scalar]], w: Sequence[Sequence[Scalar]]) -> list[Vector]:
    """A basis of ``span(u) cap span(w)``."""
    if not u or not w:
        return []
    n = len(u[0])
    # sum a_i u_i = sum b_j w_j
    system = [[u[i][t] for i in range(len(u))] + [-w[j][t] for j in range(len(w))] for t in range(n)]
    out = []
    for sol in nullspace(system, ncols=len(u) + len(w)):
        out.append([sum((sol[i] * u[i][t] for i in range(len(u))), Scalar(0)) for t in range(n)])
    return row_basis(out)


def pfaffian(a: Matrix) -> Scalar:
    """Pfaffian of a skew-symmetric matrix (elimination preserving skew symmetry)."""
    m = [list(row) for row in a]
    n = len(m)
    if n % 2:
        return Scalar(0)
    result = Scalar(1)
    for k in range(0, n - 1, 2):
        # bring a nonzero entry into position (k, k+1)
        p = next((j for j in range(k + 1, n) if m[k][j]), None)
        if p is None:
            return Scalar(0)
        if p != k + 1:
            m[k + 1], m[p] = m[p], m[k + 1]
            for row in m:
                row[k + 1], row[p] = row[p], row[k + 1]
            result = -result
        piv = m[k][k + 1]
        result = result * piv
        inv = piv.inverse()
        # eliminate rows/cols i > k+1 using rows k and k+1 (congruence keeps skewness)
        for i in range(k + 2, n):
            f = m[k][i] * inv  # uses row k+1 to clear entry (k, i)
            g = m[k + 1][i] * inv  # uses row k to clear entry (k+1, i)
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[k + 1])]
                for row in m:
                    row[i] = row[i] - f * row[k + 1]
            if g:
                m[i] = [x + g * y for x, y in zip(m[i], m[k])]
                for row in m:
                    row[i] = row[i] + g * row[k]
    return result


def charpoly_berkowitz(a: Sequence[Sequence[Poly]]) -> list[Poly]:
    """Characteristic polynomial coefficients over a commutative ring (Berkowitz).

    Returns ``[c0, c1, ..., cn]`` with ``det(t*1 - a) = c0 t^n + ... + cn``;
    division free, so it works for polynomial entries.
    """
    n = len(a)
    if n == 0:
        return [Poly.const(1)]
    vect = [Poly.const(1), -a[0][0]]
    for r in range(1, n):
        # partition the (r+1) leading block as [[A, R], [C, a_rr]]
        row = [a[r][j] for j in range(r)]
        col = [a[i][r] for i in range(r)]
        sub = [list(a[i][:r]) for i in range(r)]
        coeffs = [Poly.const(1), -a[r][r]]
        # Toeplitz column: 1, -a_rr, -R C, -R A C, -R A^2 C, ...
        current = col
        for _ in range(r):
            val = Poly()
            for x, y in zip(row, current):
                val = val + x * y
            coeffs.append(-val)
            current = [sum((sub[i][j] * current[j] for j in range(r)), Poly()) for i in range(r)]
        # multiply Toeplitz matrix (size (r+2) x (r+1)) with vect
        new = []
        for i in range(r + 2):
            s = Poly()
            for j in range(len(vect)):
                if i - j >= 0 and i - j < len(coeffs):
                    s = s + coeffs[i - j] * vect[j]
            new.append(s)
        vect = new
    return vect


def poly_det(a: Sequence[Sequence[Poly]]) -> Poly:
    """Determinant of a matrix with polynomial entries."""
    n = len(a)
    cp = charpoly_berkowitz(a)
    d = cp[n]
    return d if n % 2 == 0 else -d
