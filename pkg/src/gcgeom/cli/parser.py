"""Parsers for the command-line interface.

Form expressions follow the grammar::

    expr   := [sign] term (('+' | '-') term)*
    term   := factor ('^' factor | '*' factor)*
    factor := RAT | 'i' | 'e' INT | 'dx' INT | 'x' INT | 'dz' INT | 'z' INT
            | 'E' INT | '(' expr ')' | 'exp' '(' expr ')'

``e<k>`` and ``dx<k>`` are the coframe, ``x<k>`` the coordinates and ``E<k>``
the frame vector ``d_k``.  On flat models ``dz<k> = dx<2k-1> + i dx<2k>`` and
``z<k> = x<2k-1> + i x<2k>``.  ``^`` and ``*`` bind equally and associate to
the left; both multiply (a function times anything is scaling).  A leading
sign on an expression is accepted as a convenience.

Expressions evaluate to a :class:`Value`: a vector part plus a form, from
which forms and generalized vectors are extracted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from ..errors import InputError
from ..forms import Form, mask_indices, popcount
from ..genvector import GenVector
from ..model import FlatModel, LieAlgebraModel, Model, parse_salamon, su2_u1_model
from ..poly import Poly, ZERO_POLY
from ..scalar import I, Scalar

__all__ = [
    "Value",
    "parse_expression",
    "parse_form",
    "parse_genvector",
    "format_form",
    "format_poly",
    "parse_model",
    "parse_point",
    "parse_grid",
    "parse_subspace",
]

_TOKEN = re.compile(r"\s*(?:(?P<rat>\d+(?:/\d+)?)|(?P<exp>exp)(?=\s*\()|(?P<name>dz|dx|e|x|z|E)(?P<idx>\d+)"
                    r"|(?P<i>i)|(?P<op>[-+^*()]))")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    index: int = 0
    pos: int = 0


def _tokenize(text: str) -> list[_Tok]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match or match.end() == pos:
            raise InputError(f"unexpected character {text[pos:].lstrip()[:1]!r} at position {pos} in {text!r}")
        start = match.start(match.lastgroup) if match.lastgroup else pos
        if match.group("rat"):
            out.append(_Tok("rat", match.group("rat"), pos=start))
        elif match.group("exp"):
            out.append(_Tok("exp", "exp", pos=start))
        elif match.group("name"):
            out.append(_Tok(match.group("name"), match.group(0).strip(), int(match.group("idx")), start))
        elif match.group("i"):
            out.append(_Tok("i", "i", pos=start))
        else:
            out.append(_Tok(match.group("op"), match.group("op"), pos=start))
        pos = match.end()
    return out


@dataclass(frozen=True)
class Value:
    """``vec`` (components of ``sum f_k d_k``) plus a form."""

    vec: tuple[Poly, ...]
    form: Form

    @property
    def dim(self) -> int:
        return self.form.dim

    def has_vector(self) -> bool:
        return any(self.vec)

    def function(self) -> Poly | None:
        """The value as a function, if it is one."""
        if self.has_vector() or self.form.degrees() - {0}:
            return None
        return self.form.terms.get(0, ZERO_POLY)

    def __add__(self, other: "Value") -> "Value":
        return Value(tuple(a + b for a, b in zip(self.vec, other.vec)), self.form + other.form)

    def __neg__(self) -> "Value":
        return Value(tuple(-a for a in self.vec), -self.form)

    def __sub__(self, other: "Value") -> "Value":
        return self + (-other)

    def times(self, other: "Value") -> "Value":
        f, g = self.function(), other.function()
        if self.has_vector() or other.has_vector():
            if f is None and g is None:
                raise InputError("cannot multiply two non-function quantities when a vector is involved")
            if f is not None:
                return Value(tuple(f * c for c in other.vec), other.form.scale(f))
            return Value(tuple(g * c for c in self.vec), self.form.scale(g))  # type: ignore[operator]
        return Value(self.vec, self.form.wedge(other.form))


class _Parser:
    def __init__(self, text: str, dim: int, complex_sugar: bool) -> None:
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0
        self.dim = dim
        self.complex_sugar = complex_sugar

    # -- helpers -------------------------------------------------------
    def _peek(self) -> _Tok | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def _take(self, kind: str | None = None) -> _Tok:
        tok = self._peek()
        if tok is None:
            raise InputError(f"unexpected end of input in {self.text!r}")
        if kind is not None and tok.kind != kind:
            raise InputError(f"expected {kind!r} at position {tok.pos} in {self.text!r}, got {tok.text!r}")
        self.pos += 1
        return tok

    def _zero_vec(self) -> tuple[Poly, ...]:
        return tuple(ZERO_POLY for _ in range(self.dim))

    def _const(self, c: Scalar | Poly) -> Value:
        return Value(self._zero_vec(), Form.one(self.dim, c))

    def _check_index(self, tok: _Tok, limit: int) -> int:
        if not 1 <= tok.index <= limit:
            raise InputError(f"{tok.text}: index out of range 1..{limit}")
        return tok.index

    # -- grammar -------------------------------------------------------
    def parse(self) -> Value:
        value = self.expr()
        tok = self._peek()
        if tok is not None:
            raise InputError(f"unexpected {tok.text!r} at position {tok.pos} in {self.text!r}")
        return value

    def expr(self) -> Value:
        sign = 1
        tok = self._peek()
        if tok is not None and tok.kind in "+-" and len(tok.kind) == 1:
            self._take()
            sign = -1 if tok.kind == "-" else 1
        value = self.term()
        if sign < 0:
            value = -value
        while (tok := self._peek()) is not None and tok.kind in ("+", "-"):
            self._take()
            rhs = self.term()
            value = value + rhs if tok.kind == "+" else value - rhs
        return value

    def term(self) -> Value:
        value = self.factor()
        while (tok := self._peek()) is not None and tok.kind in ("^", "*"):
            self._take()
            value = value.times(self.factor())
        return value

    def factor(self) -> Value:
        tok = self._take()
        m = self.dim
        if tok.kind == "rat":
            return self._const(Scalar(Fraction(tok.text)))
        if tok.kind == "i":
            return self._const(I)
        if tok.kind in ("e", "dx"):
            k = self._check_index(tok, m)
            return Value(self._zero_vec(), Form(m, {1 << (k - 1): 1}))
        if tok.kind == "x":
            k = self._check_index(tok, m)
            return self._const(Poly.var(k - 1))
        if tok.kind in ("dz", "z"):
            if not self.complex_sugar:
                raise InputError(f"{tok.text}: complex coordinates need an even-dimensional flat model")
            k = self._check_index(tok, m // 2)
            a, b = 2 * k - 2, 2 * k - 1
            if tok.kind == "dz":
                return Value(self._zero_vec(), Form(m, {1 << a: 1, 1 << b: I}))
            return self._const(Poly.var(a) + Poly.var(b) * I)
        if tok.kind == "E":
            k = self._check_index(tok, m)
            vec = [ZERO_POLY] * m
            vec[k - 1] = Poly.const(1)
            return Value(tuple(vec), Form.zero(m))
        if tok.kind == "(":
            value = self.expr()
            self._take(")")
            return value
        if tok.kind == "exp":
            self._take("(")
            arg = self.expr()
            self._take(")")
            if arg.has_vector():
                raise InputError("exp of a vector")
            if arg.form.terms.get(0):
                raise InputError("exp of an argument with a degree-0 part")
            if any(popcount(mask) & 1 for mask in arg.form.terms):
                raise InputError("exp of an odd form")
            return Value(self._zero_vec(), arg.form.exp())
        raise InputError(f"unexpected {tok.text!r} at position {tok.pos} in {self.text!r}")


def _complex_sugar(model: Model | int) -> bool:
    if isinstance(model, int):
        return model % 2 == 0
    return isinstance(model, FlatModel) and model.dim % 2 == 0


def parse_expression(text: str, model: Model | int) -> Value:
    dim = model if isinstance(model, int) else model.dim
    if not text.strip():
        raise InputError("empty expression")
    return _Parser(text, dim, _complex_sugar(model)).parse()


def parse_form(text: str, model: Model | int) -> Form:
    """Parse a differential form; coefficients are checked against the model."""
    value = parse_expression(text, model)
    if value.has_vector():
        raise InputError(f"{text!r} contains a vector (E<k>) where a form was expected")
    if isinstance(model, Model):
        model.check_coefficients(value.form)
    return value.form


def parse_genvector(text: str, model: Model | int) -> GenVector:
    """Parse ``X + xi`` with ``E<k>`` for ``d_k`` and a 1-form part."""
    value = parse_expression(text, model)
    if value.form.degrees() - {1}:
        raise InputError(f"{text!r}: a section needs a vector plus a 1-form")
    dim = value.dim
    cov = [value.form.terms.get(1 << k, ZERO_POLY) for k in range(dim)]
    vec = GenVector(list(value.vec), cov)
    if isinstance(model, LieAlgebraModel) and not vec.is_constant():
        raise InputError("invariant models only carry constant coefficients")
    return vec


# -- printing ---------------------------------------------------------------------

def _format_scalar(c: Scalar) -> str:
    def q(x: Fraction) -> str:
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    re_, im = c.re, c.im
    if not im:
        return q(re_) if re_ >= 0 else f"-{q(-re_)}"
    im_abs = "i" if abs(im) == 1 else f"{q(abs(im))}*i"
    if not re_:
        return im_abs if im > 0 else f"-{im_abs}"
    sign = "+" if im > 0 else "-"
    head = q(re_) if re_ >= 0 else f"-{q(-re_)}"
    return f"({head} {sign} {im_abs})"


def format_poly(p: Poly) -> str:
    """A parseable rendering such as ``(2 x1*x1 - 1/2)`` written with ``*``."""
    if not p:
        return "0"
    parts = []
    for mono in sorted(p.terms, key=lambda mo: (sum(e for _, e in mo), mo)):
        c = p.terms[mono]
        names = "*".join(f"x{v + 1}" for v, e in mono for _ in range(e))
        cs = _format_scalar(c)
        if not names:
            parts.append(cs)
        elif c == Scalar(1):
            parts.append(names)
        elif c == Scalar(-1):
            parts.append(f"-{names}")
        else:
            parts.append(f"{cs}*{names}")
    out = parts[0]
    for part in parts[1:]:
        out += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
    return out


def format_form(form: Form) -> str:
    """Canonical parseable text, e.g. ``x1 + e1^e2 - i*e1^e3``."""
    if not form:
        return "0"
    parts = []
    for mask in sorted(form.terms, key=lambda mk: (popcount(mk), mask_indices(mk))):
        c = form.terms[mask]
        basis = "^".join(f"e{k + 1}" for k in mask_indices(mask))
        if not basis:
            text = format_poly(c)
            parts.append(text if len(c.terms) == 1 else f"({text})")
            continue
        if len(c.terms) == 1:
            coef = format_poly(c)
            if coef == "1":
                parts.append(basis)
            elif coef == "-1":
                parts.append(f"-{basis}")
            else:
                parts.append(f"{coef}*{basis}")
        else:
            parts.append(f"({format_poly(c)})*{basis}")
    out = parts[0]
    for part in parts[1:]:
        out += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
    return out


# -- models, points and grids -------------------------------------------------------

_FLAT = re.compile(r"^\s*flat\s*(\d+)\s*$", re.IGNORECASE)


def parse_model(text: str) -> Model:
    """``flat<m>``, ``nil <m>: ...`` (Salamon notation) or ``su2u1``."""
    match = _FLAT.match(text)
    if match:
        dim = int(match.group(1))
        if dim < 1:
            raise InputError("flat models need dimension >= 1")
        return FlatModel(dim)
    if text.strip().lower() in ("su2u1", "su(2)+u(1)"):
        return su2_u1_model(with_twist=False)
    return parse_salamon(text)


_ASSIGN = re.compile(r"^\s*x(\d+)\s*=\s*(.+?)\s*$")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a rational number: {text!r}") from None


def _split(spec: str) -> Iterator[tuple[int, str]]:
    for item in spec.split(","):
        if not item.strip():
            continue
        match = _ASSIGN.match(item)
        if not match:
            raise InputError(f"expected 'x<k>=...', got {item.strip()!r}")
        yield int(match.group(1)), match.group(2)


def parse_point(spec: str, dim: int) -> list[Scalar]:
    """``x1=1/2,x3=-1`` (unspecified coordinates are 0), or a plain list ``1/2,0,-1``."""
    if "=" not in spec:
        values = [_rational(v) for v in spec.split(",") if v.strip()]
        if len(values) != dim:
            raise InputError(f"point needs {dim} coordinates")
        return [Scalar(v) for v in values]
    point = [Scalar(0)] * dim
    for k, val in _split(spec):
        if not 1 <= k <= dim:
            raise InputError(f"x{k} out of range 1..{dim}")
        point[k - 1] = Scalar(_rational(val))
    return point


def parse_grid(spec: str, dim: int) -> list[list[Scalar]]:
    """``xk=lo:hi:step`` (comma separated) -> points in lexicographic order."""
    axes: dict[int, list[Fraction]] = {}
    for k, rng in _split(spec):
        if not 1 <= k <= dim:
            raise InputError(f"x{k} out of range 1..{dim}")
        pieces = rng.split(":")
        if len(pieces) == 1:
            axes[k] = [_rational(pieces[0])]
            continue
        if len(pieces) != 3:
            raise InputError(f"grid range must be lo:hi:step, got {rng!r}")
        lo, hi, step = (_rational(p) for p in pieces)
        if step <= 0:
            raise InputError("grid step must be positive")
        if hi < lo:
            raise InputError("grid range is empty")
        count = int((hi - lo) / step)
        axes[k] = [lo + step * j for j in range(count + 1)]
    points: list[list[Scalar]] = [[]]
    for k in range(1, dim + 1):
        values = axes.get(k, [Fraction(0)])
        points = [p + [Scalar(v)] for p in points for v in values]
    return sorted(points, key=lambda p: [x.re for x in p])


def parse_subspace(spec: str, dim: int) -> tuple[int, ...]:
    """``1,2`` -> ``(1, 2)`` (1-based coordinate indices)."""
    try:
        idx = tuple(int(t) for t in spec.replace(" ", "").split(",") if t)
    except ValueError:
        raise InputError(f"subspace must be a comma-separated index list, got {spec!r}") from None
    if any(not 1 <= k <= dim for k in idx):
        raise InputError(f"subspace indices must lie in 1..{dim}")
    return idx


def point_label(point: Sequence[Scalar]) -> list[str]:
    return [_format_scalar(x) for x in point]
