"""Differential backends: invariant forms on a Lie algebra, and flat coordinates.

A model fixes the dimension ``m``, the exterior derivative, the bracket of
vector fields and the action of vector fields on coefficient functions.  It can
also carry a closed twisting 3-form ``H`` and a constant metric.

* :class:`LieAlgebraModel` works with invariant (constant coefficient) forms
  on a Lie algebra.  ``d`` is the Chevalley-Eilenberg differential given by
  the differentials of the coframe, e.g. the nilmanifold ``(0,0,0,12,13,14+35)``.
  Frame vector fields satisfy ``d e^k (X, Y) = -e^k([X, Y])``.
* :class:`FlatModel` works with polynomial coefficients in coordinates
  ``x1..xm`` and the coordinate exterior derivative.
"""

from __future__ import annotations

import re
from abc import ABC, abstractmethod
from typing import Mapping, Sequence

from .errors import InputError, UnsupportedError, ValidationError
from .forms import Form, mask_indices
from .linalg import Matrix, as_matrix, is_symmetric, rank
from .poly import Poly, ZERO_POLY
from .scalar import Scalar

VectorField = tuple[Poly, ...]


def vector(dim: int, coeffs: Sequence[object]) -> VectorField:
    if len(coeffs) != dim:
        raise ValueError(f"vector needs {dim} components, got {len(coeffs)}")
    return tuple(Poly.coerce(c) for c in coeffs)  # type: ignore[arg-type]


def basis_vector(dim: int, k: int) -> VectorField:
    """The 0-based frame vector ``d_k``."""
    return tuple(Poly.const(1) if i == k else ZERO_POLY for i in range(dim))


class Model(ABC):
    """Common interface of the two backends."""

    kind: str = "abstract"

    def __init__(self, dim: int, twist: Form | None = None, metric: Sequence[Sequence[object]] | None = None,
                 name: str | None = None) -> None:
        self.dim = dim
        self.name = name or f"{self.kind}{dim}"
        self.metric: Matrix | None = None
        if metric is not None:
            g = as_matrix(metric)  # type: ignore[arg-type]
            if len(g) != dim or any(len(r) != dim for r in g):
                raise ValidationError("metric must be an m x m matrix")
            if not is_symmetric(g):
                raise ValidationError("metric must be symmetric")
            self.metric = g
        self.twist: Form | None = None
        if twist is not None:
            self._validate_twist(twist)
            self.twist = twist

    def _validate_twist(self, twist: Form, require_closed: bool = True) -> None:
        if twist.dim != self.dim:
            raise ValidationError("twist dimension does not match the model")
        if twist.degrees() - {3}:
            raise ValidationError("twist must be a 3-form")
        if require_closed and self.d(twist):
            raise ValidationError(f"twist is not closed: dH = {self.d(twist)}")

    # -- backend specific -------------------------------------------------
    @abstractmethod
    def d(self, form: Form) -> Form:
        """Exterior derivative."""

    @abstractmethod
    def bracket(self, x: VectorField, y: VectorField) -> VectorField:
        """Lie bracket of vector fields."""

    @abstractmethod
    def derive(self, x: VectorField, f: Poly) -> Poly:
        """Action of a vector field on a coefficient function."""

    @abstractmethod
    def check_coefficients(self, form: Form) -> None:
        """Raise if the coefficients are not admissible on this backend."""

    # -- shared ------------------------------------------------------------
    def with_twist(self, twist: Form | None, require_closed: bool = True) -> "Model":
        """A copy of this model carrying a different twist.

        ``require_closed=False`` admits a non-closed 3-form; the bracket then
        fails to be a Courant algebroid, which is how the anomaly
        ``i_Z i_Y i_X dH`` of the Jacobiator is exercised.
        """
        clone = self._clone()
        clone.twist = None
        if twist is not None:
            clone._validate_twist(twist, require_closed)
            clone.twist = twist
        return clone

    def with_metric(self, metric: Sequence[Sequence[object]] | None) -> "Model":
        clone = self._clone()
        clone.metric = None if metric is None else as_matrix(metric)  # type: ignore[arg-type]
        return clone

    @abstractmethod
    def _clone(self) -> "Model":
        ...

    def twisted_d(self, form: Form, twist: Form | None = None) -> Form:
        """``d_H a = d a + H ^ a`` (uses the model twist unless one is given)."""
        h = twist if twist is not None else self.twist
        if h is None:
            raise ValidationError("twisted differential requested but no twist is present")
        return self.d(form) + h.wedge(form)

    def d_maybe_twisted(self, form: Form, twisted: bool) -> Form:
        if twisted and self.twist is not None:
            return self.twisted_d(form)
        return self.d(form)

    def lie_derivative(self, x: VectorField, form: Form) -> Form:
        """Cartan's formula ``L_X = i_X d + d i_X``."""
        return self.d(form).contract(x) + self.d(form.contract(x))

    def zero_vector(self) -> VectorField:
        return tuple(ZERO_POLY for _ in range(self.dim))

    def frame(self) -> list[VectorField]:
        return [basis_vector(self.dim, k) for k in range(self.dim)]

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


class FlatModel(Model):
    """Flat ``R^m`` with coordinates ``x1..xm`` and polynomial coefficients."""

    kind = "flat"

    def __init__(self, dim: int, twist: Form | None = None, metric: Sequence[Sequence[object]] | None = None,
                 name: str | None = None) -> None:
        super().__init__(dim, twist=twist, metric=metric, name=name or f"flat{dim}")

    def _clone(self) -> "FlatModel":
        clone = FlatModel.__new__(FlatModel)
        clone.__dict__.update(self.__dict__)
        return clone

    def d(self, form: Form) -> Form:
        if form.dim != self.dim:
            raise ValueError("form dimension does not match the model")
        out: dict[int, Poly] = {}
        for mask, c in form.terms.items():
            for v in c.variables():
                if v >= self.dim:
                    raise InputError(f"coefficient uses x{v + 1}, beyond dimension {self.dim}")
                bit = 1 << v
                if mask & bit:
                    continue
                dc = c.diff(v)
                if not dc:
                    continue
                # dx^v ^ e^mask: move dx^v past the factors of lower index
                sign = -1 if bin(mask & (bit - 1)).count("1") & 1 else 1
                m = mask | bit
                val = dc if sign > 0 else -dc
                out[m] = out[m] + val if m in out else val
        return Form(self.dim, out)

    def bracket(self, x: VectorField, y: VectorField) -> VectorField:
        return tuple(self.derive(x, y[k]) - self.derive(y, x[k]) for k in range(self.dim))

    def derive(self, x: VectorField, f: Poly) -> Poly:
        out = ZERO_POLY
        for v in f.variables():
            if v >= self.dim:
                raise InputError(f"coefficient uses x{v + 1}, beyond dimension {self.dim}")
            if x[v]:
                out = out + x[v] * f.diff(v)
        return out

    def check_coefficients(self, form: Form) -> None:
        for c in form.terms.values():
            if any(v >= self.dim for v in c.variables()):
                raise InputError("coefficient uses a coordinate beyond the model dimension")


class LieAlgebraModel(Model):
    """Invariant forms on a Lie algebra given by the differentials of a coframe.

    ``structure[k]`` is the 2-form ``d e^{k+1}``.  ``d`` squares to zero on every
    generator (checked); this is the Jacobi identity of the dual bracket.
    """

    kind = "invariant"

    def __init__(self, structure: Sequence[Form], twist: Form | None = None,
                 metric: Sequence[Sequence[object]] | None = None, name: str | None = None) -> None:
        dim = len(structure)
        for k, f in enumerate(structure):
            if f.dim != dim:
                raise ValidationError(f"differential of e{k + 1} has wrong dimension")
            if f.degrees() - {2}:
                raise ValidationError(f"differential of e{k + 1} must be a 2-form")
            if not f.is_constant():
                raise ValidationError("structure differentials must have constant coefficients")
        self.structure = tuple(structure)
        self._dcache: dict[int, Form] = {}
        for k in range(dim):
            dd = self.d(structure[k])
            if dd:
                raise ValidationError(f"d^2 e{k + 1} = {dd} != 0: not a Lie algebra")
        super().__init__(dim, twist=twist, metric=metric, name=name or "lie")

    def _clone(self) -> "LieAlgebraModel":
        clone = LieAlgebraModel.__new__(LieAlgebraModel)
        clone.__dict__.update(self.__dict__)
        return clone

    @staticmethod
    def from_brackets(dim: int, brackets: Mapping[tuple[int, int], Mapping[int, object]],
                      **kwargs: object) -> "LieAlgebraModel":
        """Build from ``[e_i, e_j] = sum_k c^k_ij e_k`` (1-based indices)."""
        coeffs: list[dict[int, Poly]] = [dict() for _ in range(dim)]
        for (i, j), out in brackets.items():
            if i == j:
                raise InputError("bracket of a generator with itself is zero")
            a, b = sorted((i, j))
            sgn = 1 if (i, j) == (a, b) else -1
            mask = (1 << (a - 1)) | (1 << (b - 1))
            for k, c in out.items():
                val = Poly.coerce(c) * (-sgn)  # type: ignore[arg-type]
                d = coeffs[k - 1]
                d[mask] = d[mask] + val if mask in d else val
        return LieAlgebraModel([Form(dim, c) for c in coeffs], **kwargs)  # type: ignore[arg-type]

    def _d_monomial(self, mask: int) -> Form:
        cached = self._dcache.get(mask)
        if cached is not None:
            return cached
        idx = mask_indices(mask)
        dim = len(self.structure)
        if not idx:
            out = Form.zero(dim)
        else:
            first = idx[0]
            rest_mask = mask ^ (1 << first)
            rest = Form(dim, {rest_mask: 1})
            out = self.structure[first].wedge(rest) - Form(dim, {1 << first: 1}).wedge(self._d_monomial(rest_mask))
        self._dcache[mask] = out
        return out

    def d(self, form: Form) -> Form:
        if form.dim != len(self.structure):
            raise ValueError("form dimension does not match the model")
        out = Form.zero(form.dim)
        for mask, c in form.terms.items():
            if not c.is_constant():
                raise UnsupportedError("invariant models only carry constant coefficients")
            dm = self._d_monomial(mask)
            if dm:
                out = out + dm.scale(c)
        return out

    def bracket(self, x: VectorField, y: VectorField) -> VectorField:
        for c in (*x, *y):
            if not c.is_constant():
                raise UnsupportedError("invariant models only carry constant coefficients")
        return tuple(-self.structure[k].value(x, y) for k in range(self.dim))

    def derive(self, x: VectorField, f: Poly) -> Poly:
        if not f.is_constant():
            raise UnsupportedError("invariant models only carry constant coefficients")
        return ZERO_POLY

    def check_coefficients(self, form: Form) -> None:
        if not form.is_constant():
            raise UnsupportedError("invariant models only carry constant coefficients")

    def structure_constants(self) -> list[list[list[Scalar]]]:
        """``c[i][j][k]`` with ``[e_i, e_j] = sum_k c[i][j][k] e_k`` (0-based)."""
        m = self.dim
        frame = self.frame()
        return [[[c.constant_value() for c in self.bracket(frame[i], frame[j])] for j in range(m)]
                for i in range(m)]

    def is_nilpotent(self) -> bool:
        """Lower central series reaches zero."""
        c = self.structure_constants()
        m = self.dim
        current = [[Scalar(1) if i == j else Scalar(0) for i in range(m)] for j in range(m)]
        for _ in range(m + 1):
            images = []
            for i in range(m):
                for v in current:
                    images.append([sum((c[i][j][k] * v[j] for j in range(m)), Scalar(0)) for k in range(m)])
            r = rank(images) if images else 0
            if r == 0:
                return True
            if r == len(current):
                return False
            from .linalg import row_basis

            current = row_basis(images)
        return False


_SALAMON_RE = re.compile(r"^\s*nil\s+(\d+)\s*:\s*(.*)$", re.IGNORECASE)


def parse_salamon(text: str) -> LieAlgebraModel:
    """Parse ``nil <m>: entry,entry,...`` into a :class:`LieAlgebraModel`.

    Each entry is ``0`` or ``+``-separated two-digit tokens ``ab`` meaning
    ``e_a ^ e_b``; so ``52`` is ``e5 ^ e2 = -e25``.
    """
    match = _SALAMON_RE.match(text)
    if not match:
        raise InputError(f"expected 'nil <m>: entry,...', got {text!r}")
    dim = int(match.group(1))
    if not 1 <= dim <= 9:
        raise InputError("Salamon notation supports dimensions 1..9")
    entries = [e.strip() for e in match.group(2).split(",")]
    if len(entries) != dim:
        raise InputError(f"expected {dim} entries, got {len(entries)}")
    structure = []
    for k, entry in enumerate(entries):
        form = Form.zero(dim)
        if entry != "0":
            if not entry:
                raise InputError(f"empty entry for e{k + 1}")
            for tok in entry.split("+"):
                tok = tok.strip()
                if not re.fullmatch(r"\d\d", tok):
                    raise InputError(f"bad token {tok!r} in entry {entry!r}")
                a, b = int(tok[0]), int(tok[1])
                if not (1 <= a <= dim and 1 <= b <= dim):
                    raise InputError(f"index out of range in token {tok!r}")
                if a == b:
                    raise InputError(f"degenerate token {tok!r}: e{a}^e{a} = 0")
                form = form + Form.basis(dim, a, b)
        structure.append(form)
    try:
        return LieAlgebraModel(structure, name=f"nil {dim}: " + ",".join(entries))
    except ValidationError as exc:
        raise InputError(str(exc)) from exc


def su2_u1_model(with_twist: bool = True) -> LieAlgebraModel:
    """``su(2) + u(1)`` with ``[e1,e2]=e3`` cyclic, ``e4`` central, identity metric.

    The twist is the Cartan 3-form ``H(X,Y,Z) = <[X,Y], Z>``.
    """
    base = LieAlgebraModel.from_brackets(
        4, {(1, 2): {3: 1}, (2, 3): {1: 1}, (3, 1): {2: 1}}, name="su(2)+u(1)",
    )
    metric = [[1 if i == j else 0 for j in range(4)] for i in range(4)]
    twist = cartan_three_form(base, metric) if with_twist else None
    return LieAlgebraModel(base.structure, twist=twist, metric=metric, name="su(2)+u(1)")


def cartan_three_form(model: LieAlgebraModel, metric: Sequence[Sequence[object]]) -> Form:
    """``H(X, Y, Z) = g([X, Y], Z)`` on the frame."""
    g = as_matrix(metric)  # type: ignore[arg-type]
    m = model.dim
    c = model.structure_constants()
    terms = {}
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(j + 1, m):
                val = sum((c[i][j][a] * g[a][k] for a in range(m)), Scalar(0))
                if val:
                    terms[(1 << i) | (1 << j) | (1 << k)] = val
    return Form(m, terms)
