"""``gcgeom`` command-line entry point.

Every subcommand builds a :class:`Report` from direct library calls and
prints it as text, JSON (``--format machine``) or CSV.  Exit status: 0 for
pass/complete, 1 for a fail verdict, 2 for input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .. import __version__
from ..branes import BraneData, brane_classify, brane_stability, calibration_check, gen_submanifold_check, gen_tangent
from ..branes import _kind_of, structure_matrix
from ..dirac import classify as classify_isotropic
from ..dirac import courant
from ..errors import InputError, UnsupportedError, ValidationError
from ..forms import Form
from ..gcs import check_integrable, from_spinor, invariant_cohomology_dim
from ..kahler import bismut_check, extract_bihermitian, gcy_metric_check, gk_check, torsion_condition_check
from ..model import FlatModel, Model
from ..spinors import annihilator
from .parser import format_form, format_poly, parse_form, parse_genvector, parse_grid, parse_model, parse_point
from .parser import parse_subspace, point_label

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


@dataclass
class Report:
    """Outcome of one invocation; ``verdict`` is ``pass``, ``fail`` or ``error``."""

    command: str
    inputs: dict[str, Any]
    verdict: str = "pass"
    reason: str = ""
    details: dict[str, Any] = field(default_factory=dict)
    counterexample: str | None = None
    rows: list[dict[str, Any]] | None = None

    def fail(self, reason: str) -> "Report":
        if self.verdict == "pass":
            self.verdict, self.reason = "fail", reason
        return self

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"command": self.command, "inputs": self.inputs, "verdict": self.verdict,
                               "reason": self.reason, "details": self.details}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        if self.rows is not None:
            out["rows"] = self.rows
        return out

    @property
    def exit_code(self) -> int:
        return {"pass": EXIT_PASS, "fail": EXIT_FAIL}.get(self.verdict, EXIT_INPUT)


# -- shared helpers ----------------------------------------------------------------

def _model(args: argparse.Namespace) -> Model:
    model = parse_model(args.model)
    twist = getattr(args, "twist", None)
    if twist:
        model = model.with_twist(parse_form(twist, model))
    return model


def _point(args: argparse.Namespace, model: Model) -> list | None:
    at = getattr(args, "at", None)
    return parse_point(at, model.dim) if at else None


def _evaluate(phi: Form, point: Sequence | None, what: str) -> Form:
    if phi.is_constant():
        return phi
    if point is None:
        raise InputError(f"{what} has non-constant coefficients: pass --at")
    return phi.eval_at(point)


def _classify_constant(phi: Form) -> dict[str, Any]:
    """Purity, type, parity and real index of a constant spinor."""
    if not phi:
        raise InputError("the zero form is not a spinor")
    L = annihilator(phi)
    if not L.is_maximal():
        return {"pure": False, "annihilatorDim": L.rank}
    c = classify_isotropic(L)
    return {"pure": True, **c.as_dict()}


# -- commands -----------------------------------------------------------------------

def cmd_classify(args: argparse.Namespace, report: Report) -> None:
    model = parse_model(args.model)
    phi = parse_form(args.spinor, model)
    info = _classify_constant(_evaluate(phi, _point(args, model), "spinor"))
    report.details.update(info)
    if not info["pure"]:
        report.fail("spinor is not pure")


def cmd_check(args: argparse.Namespace, report: Report) -> None:
    model = _model(args)
    phi = parse_form(args.spinor, model)
    gcs = from_spinor(model, phi)
    probe = phi if phi.is_constant() else phi.eval_at(_generic(model))
    report.details.update(_classify_constant(probe))
    result = check_integrable(gcs, twisted=model.twist is not None, degree_bound=args.degree_bound)
    inv = result.involutivity
    report.details["nijRoute"] = inv.nij_route
    report.details["spinorRoute"] = inv.spinor_route
    if inv.witness is not None:
        report.details["witness"] = str(inv.witness)
    if result.regular is not None:
        report.details["regularCheck"] = result.regular
    if result.detail:
        report.details["notes"] = result.detail
    if not result.integrable:
        report.fail("not integrable")
        if inv.failures:
            i, j, k, v = inv.failures[0]
            report.counterexample = f"<[A{i + 1}, A{j + 1}], A{k + 1}> = {v}"


def _generic(model: Model) -> list:
    from ..dirac import _generic_point
    return _generic_point(model.dim)


def cmd_courant(args: argparse.Namespace, report: Report) -> None:
    model = _model(args)
    a = parse_genvector(args.a, model)
    b = parse_genvector(args.b, model)
    result = courant(model, a, b, twisted=model.twist is not None)
    report.details["bracket"] = str(result)
    report.details["vector"] = [format_poly(c) for c in result.vec]
    report.details["covector"] = [format_poly(c) for c in result.cov]


def cmd_cohomology(args: argparse.Namespace, report: Report) -> None:
    model = parse_model(args.model)
    gcs = from_spinor(model, parse_form(args.spinor, model))
    report.details["degree"] = args.degree
    report.details["dim"] = invariant_cohomology_dim(gcs, args.degree)


def _type_row(phi: Form, point: list) -> dict[str, Any]:
    info = _classify_constant(phi.eval_at(point))
    row: dict[str, Any] = {f"x{k + 1}": lab for k, lab in enumerate(point_label(point))}
    row["type"] = info.get("type", "nonpure")
    row["realIndex"] = info.get("realIndex", "")
    return row


def cmd_type_map(args: argparse.Namespace, report: Report) -> None:
    model = parse_model(args.model)
    if not isinstance(model, FlatModel):
        raise InputError("type-map needs a flat model")
    phi = parse_form(args.spinor, model)
    points = parse_grid(args.grid, model.dim)
    report.rows = [_type_row(phi, p) for p in points]
    report.details["points"] = len(points)
    report.details["types"] = sorted({r["type"] for r in report.rows}, key=str)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(_csv(report.rows, model.dim))
        report.details["out"] = args.out


def cmd_kahler_check(args: argparse.Namespace, report: Report) -> None:
    model = _model(args)
    twisted = model.twist is not None
    rho1 = parse_form(args.spinor1, model)
    rho2 = parse_form(args.spinor2, model)
    j1 = from_spinor(model, rho1)
    j2 = from_spinor(model, rho2)
    check = gk_check(j1, j2)
    report.details["gkCheck"] = check.valid
    if not check:
        report.fail(check.reason)
        return
    data = extract_bihermitian(check)
    report.details["b"] = format_form(data.b)
    report.details["g"] = [[str(x) for x in row] for row in data.g]
    tor = torsion_condition_check(model, data, twisted)
    report.details["h"] = format_form(tor.h)
    report.details["torsion"] = tor.passed
    if tor.detail:
        report.details["torsionNotes"] = tor.detail
    try:
        bis = bismut_check(model, data, twisted)
        report.details["bismut"] = bis.passed
        if bis.passed != tor.passed:
            report.details["bismutDisagrees"] = True
    except UnsupportedError as exc:
        report.details["bismut"] = f"unsupported: {exc}"
    gcy = gcy_metric_check(rho1, rho2, model, twisted)
    report.details["gcy"] = gcy.passed
    report.details["gcyRatio"] = None if gcy.c is None else str(gcy.c)
    if not tor.passed:
        report.fail("torsion condition fails")


def cmd_brane_check(args: argparse.Namespace, report: Report) -> None:
    model = _model(args)
    sub = parse_subspace(args.subspace, model.dim)
    brane = BraneData(model.dim, sub, parse_form(args.f, model))
    point = _point(args, model)
    try:
        gen = gen_submanifold_check(model, brane)
    except UnsupportedError as exc:
        raise InputError(str(exc)) from None
    report.details["generalizedSubmanifold"] = gen
    if not gen:
        report.fail("dF != H restricted to M")
    if not args.spinor:
        return
    gcs = from_spinor(model, parse_form(args.spinor, model))
    stable = brane_stability(gcs, brane, point)
    report.details["stable"] = stable
    kind = _kind_of(structure_matrix(gcs, point))
    if kind is not None:
        clauses = brane_classify(kind, gcs, brane, point)
        report.details["kind"] = kind
        report.details["clauses"] = clauses.clauses
        if clauses.k is not None:
            report.details["k"] = clauses.k
        report.details["clausesAgree"] = clauses.agrees
    if args.calibrate:
        rho2 = _evaluate(parse_form(args.calibrate, model), point, "calibrating spinor")
        tau = gen_tangent(brane, point)
        cal = calibration_check(tau, rho2)
        report.details["calibrated"] = cal
        if not cal:
            report.fail("brane is not calibrated")
    if not stable:
        report.fail("brane is not stable")


COMMANDS: dict[str, Callable[[argparse.Namespace, Report], None]] = {
    "classify": cmd_classify,
    "check": cmd_check,
    "courant": cmd_courant,
    "cohomology": cmd_cohomology,
    "type-map": cmd_type_map,
    "kahler-check": cmd_kahler_check,
    "brane-check": cmd_brane_check,
}


# -- output -------------------------------------------------------------------------

def _csv(rows: list[dict[str, Any]], dim: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = [f"x{k + 1}" for k in range(dim)] + ["type", "realIndex"]
    writer.writerow(cols)
    for row in rows:
        writer.writerow([row[c] for c in cols])
    return buf.getvalue()


def _flat_details(details: dict[str, Any]) -> list[tuple[str, Any]]:
    out = []
    for key, val in details.items():
        if isinstance(val, dict):
            out.extend((f"{key}.{k}", v) for k, v in val.items())
        else:
            out.append((key, val))
    return out


def render(report: Report, fmt: str) -> str:
    if fmt == "machine":
        return json.dumps(report.as_dict(), indent=2, default=str)
    if fmt == "csv":
        if report.rows is not None:
            return _csv(report.rows, model_dim(report.rows)).rstrip("\n")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        writer.writerow(["verdict", report.verdict])
        writer.writerow(["reason", report.reason])
        for key, val in _flat_details(report.details):
            writer.writerow([key, val])
        return buf.getvalue().rstrip("\n")
    lines = [f"{report.command}: {report.verdict}" + (f" ({report.reason})" if report.reason else "")]
    for key, val in report.inputs.items():
        lines.append(f"  input {key} = {val}")
    for key, val in _flat_details(report.details):
        lines.append(f"  {key}: {val}")
    if report.counterexample:
        lines.append(f"  counterexample: {report.counterexample}")
    if report.rows is not None:
        lines.extend("  " + line for line in _csv(report.rows, model_dim(report.rows)).splitlines())
    return "\n".join(lines)


def model_dim(rows: list[dict[str, Any]]) -> int:
    return sum(1 for k in rows[0] if k.startswith("x")) if rows else 0


# -- argument parsing -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", required=True, help="flat<m>, su2u1 or 'nil <m>: ...' (Salamon notation)")
    common.add_argument("--format", choices=("text", "machine", "csv"), default="text")
    common.add_argument("--degree-bound", type=int, default=None,
                        help="coefficient degree bound for frame and witness searches")
    common.add_argument("--out", default=None, help="write the CSV table to this file")

    parser = argparse.ArgumentParser(prog="gcgeom", description="Exact generalized complex geometry checks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="purity, type, parity and real index")
    p.add_argument("--spinor", required=True)
    p.add_argument("--at", default=None, help="point, e.g. x1=1/2,x2=0")

    p = sub.add_parser("check", parents=[common], help="integrability of the structure of a pure spinor")
    p.add_argument("--spinor", required=True)
    p.add_argument("--twist", default=None, help="closed 3-form H")

    p = sub.add_parser("courant", parents=[common], help="Courant bracket of two sections")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--twist", default=None)

    p = sub.add_parser("cohomology", parents=[common], help="invariant Lie algebroid cohomology dimension")
    p.add_argument("--spinor", required=True)
    p.add_argument("--degree", type=int, required=True)

    p = sub.add_parser("type-map", parents=[common], help="type and real index over a rational grid")
    p.add_argument("--spinor", required=True)
    p.add_argument("--grid", required=True, help="xk=lo:hi:step,...")

    p = sub.add_parser("kahler-check", parents=[common], help="generalized Kähler pipeline")
    p.add_argument("--spinor1", required=True)
    p.add_argument("--spinor2", required=True)
    p.add_argument("--twist", default=None)

    p = sub.add_parser("brane-check", parents=[common], help="generalized submanifold, stability and clauses")
    p.add_argument("--subspace", required=True, help="comma-separated coordinate indices spanning M")
    p.add_argument("--f", required=True, help="2-form F on M")
    p.add_argument("--spinor", default=None)
    p.add_argument("--calibrate", default=None, help="spinor rho2 for the calibration test")
    p.add_argument("--twist", default=None)
    p.add_argument("--at", default=None)
    return parser


def _inputs(args: argparse.Namespace) -> dict[str, Any]:
    skip = {"command", "format", "func"}
    return {k.replace("_", "-"): v for k, v in vars(args).items() if k not in skip and v is not None}


def run(argv: Sequence[str] | None = None) -> tuple[Report, str]:
    """Parse ``argv``, run the command and return the report with its rendering."""
    parser = build_parser()
    args = parser.parse_args(argv)
    report = Report(args.command, _inputs(args))
    try:
        COMMANDS[args.command](args, report)
    except ValidationError as exc:
        report.verdict = "fail"
        report.reason = str(exc)
    except (InputError, UnsupportedError, ValueError, ZeroDivisionError, OSError) as exc:
        report.verdict = "error"
        report.reason = f"{type(exc).__name__}: {exc}"
    return report, render(report, args.format)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        report, text = run(argv)
    except SystemExit as exc:  # argparse usage errors
        return 0 if exc.code == 0 else EXIT_INPUT
    print(text)
    return report.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
