"""Command-line front end: ``gearkin analyze | emit-matrices | validate``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import Sequence

from .crosscheck import reconcile
from .digraph import format_matrices, graph_matrices
from .errors import GearkinError
from .exact import UnboundSymbolError, format_scalar, rank
from .matroid import coefficient_matrix, solve_transfer, solve_transfer_ratios
from .mechanism import Mechanism, MechanismError, load_mechanism_file
from .oracle import brute_force_transfer
from .transfer import TransferMatrix
from .tt import assign_meshes, solve_tt

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_MISMATCH = 3


def _parse_bindings(text: str | None) -> dict[str, Fraction]:
    out: dict[str, Fraction] = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise GearkinError(f"--bind: expected name=value, got {item!r}")
        try:
            out[name.strip()] = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise GearkinError(f"--bind: {name.strip()} is not a rational number: {value!r}") from None
    return out


def _parse_inputs(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise GearkinError(f"--inputs: expected comma-separated joint ids, got {text!r}") from None


def _load(args) -> Mechanism:
    try:
        m = load_mechanism_file(args.file)
    except OSError as exc:
        raise GearkinError(f"{args.file}: {exc.strerror}") from None
    if getattr(args, "inputs", None):
        m = m.with_inputs(_parse_inputs(args.inputs))
    return m


def _sample_bindings(m: Mechanism, fixed: dict[str, Fraction]) -> dict[str, Fraction]:
    """Given bindings plus a deterministic value (index + 2) for every other symbol."""
    out = dict(fixed)
    for i, s in enumerate(m.symbols):
        out.setdefault(s, Fraction(i + 2))
    return out


def _difference(diff, ref: TransferMatrix) -> dict:
    i, j, a, b = diff
    if i == "shape":
        return {"row": "shape", "col": "shape", "expected": str(a), "got": str(b)}
    return {
        "row": ref.row_labels[i],
        "col": ref.col_labels[j],
        "expected": format_scalar(a),
        "got": format_scalar(b),
    }


def _matrix_dict(tm: TransferMatrix, form: str) -> dict:
    d = tm.to_dict()
    d["form"] = form
    return d


def build_report(m: Mechanism, args) -> tuple[dict, int]:
    """Run the requested analyses; returns (report, exit code)."""
    bindings = _parse_bindings(args.bind)
    unknown = sorted(set(bindings) - set(m.symbols))
    if unknown:
        raise GearkinError(f"--bind: unknown symbol(s): {', '.join(unknown)}")
    work = m.bind(bindings) if bindings else m
    if not args.symbolic:
        left = sorted(work.used_symbols())
        if left:
            raise UnboundSymbolError(left)

    symbolic = args.symbolic and work.has_symbols()
    ratios = args.ratios
    gm = graph_matrices(work)
    r = rank(coefficient_matrix(work, gm.T).entries) if work.c else 0
    report: dict = {
        "mechanism": m.name,
        "links": work.n + 1,
        "turning_joints": work.t,
        "gear_meshes": work.c,
        "dof": work.t - r,
        "rank": r,
        "inputs": list(work.inputs),
        "outputs": list(work.outputs),
        "mode": "symbolic" if symbolic else "numeric",
        "bindings": {k: str(v) for k, v in sorted(bindings.items(), key=lambda kv: m.symbols.index(kv[0]))},
    }
    if args.matrices:
        report["graph_matrices"] = format_matrices(gm)

    run_matroid = args.method in ("matroid", "both")
    run_tt = args.method in ("tt", "both")
    code = EXIT_OK
    methods: dict = {}
    mat = tt = None
    if run_matroid:
        if ratios:
            mat, form = solve_transfer_ratios(work), "ratios"
        else:
            mat, form = solve_transfer(work), "diameters" if symbolic else "numeric"
        methods["matroid"] = _matrix_dict(mat, form)
    if run_tt:
        assignments = assign_meshes(work, symbolic_ratios=symbolic or ratios)
        report["carriers"] = [
            {
                "mesh": a.mesh,
                "tail": a.tail,
                "head": a.head,
                "carrier": a.carrier,
                "axes": [a.tail_axis_label, a.head_axis_label],
                "sign": a.sign,
            }
            for a in assignments
        ]
        tt = solve_tt(work, symbolic_ratios=symbolic or ratios, assignments=assignments)
        methods["tt"] = _matrix_dict(tt, "n-ratios" if (symbolic or ratios) else "numeric")
    report["methods"] = methods

    if mat is not None and tt is not None:
        rec = reconcile(work, tt, mat, ratios) if (symbolic or ratios) else tt.aligned(mat.row_joints, mat.col_joints)
        report["tt_reconciled"] = _matrix_dict(rec, methods["matroid"]["form"])
        diff = mat.first_difference(rec)
        if diff is None:
            report["verdict"] = "matched"
        else:
            report["verdict"] = {"mismatched": _difference(diff, mat)}
            code = EXIT_MISMATCH

    if args.verify:
        sample = _sample_bindings(m, bindings)
        oracle = brute_force_transfer(m, sample)
        checks = {}
        if mat is not None:
            checks["matroid"] = solve_transfer(work).evaluate(sample)
        if tt is not None:
            num = solve_tt(work.bind(sample), symbolic_ratios=False)
            checks["tt"] = num.aligned(oracle.row_joints, oracle.col_joints)
        results = {}
        for name, tm in checks.items():
            diff = oracle.first_difference(tm.aligned(oracle.row_joints, oracle.col_joints))
            if diff is None:
                results[name] = "matched"
            else:
                results[name] = {"mismatched": _difference(diff, oracle)}
                code = EXIT_MISMATCH
        report["oracle"] = {
            "bindings": {s: str(sample[s]) for s in m.symbols},
            "matrix": _matrix_dict(oracle, "numeric"),
            "results": results,
        }
    return report, code


def _table(d: dict) -> list[str]:
    header = [""] + d["cols"]
    body = [[label] + row for label, row in zip(d["rows"], d["entries"])]
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    fmt = lambda row: "  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(row, widths)))  # noqa: E731
    return ["  " + fmt(header).rstrip()] + ["  " + fmt(r).rstrip() for r in body]


def _verdict_text(v) -> str:
    if v == "matched":
        return "matched"
    d = v["mismatched"]
    return f"mismatched at ({d['row']}, {d['col']}): expected {d['expected']}, got {d['got']}"


def render_text(report: dict) -> str:
    out = [
        f"mechanism: {report['mechanism']}",
        f"links: {report['links']}  turning joints: {report['turning_joints']}  "
        f"gear meshes: {report['gear_meshes']}",
        f"dof: {report['dof']} (t = {report['turning_joints']}, r = {report['rank']})",
        "inputs: " + " ".join(map(str, report["inputs"])),
        "outputs: " + " ".join(map(str, report["outputs"])),
        f"mode: {report['mode']}",
    ]
    if report["bindings"]:
        out.append("bindings: " + ", ".join(f"{k}={v}" for k, v in report["bindings"].items()))
    if "graph_matrices" in report:
        out.append("")
        out.extend(report["graph_matrices"].rstrip("\n").splitlines())
    if "carriers" in report:
        out.append("")
        out.append("carriers:")
        for c in report["carriers"]:
            sign = "+" if c["sign"] > 0 else "-"
            out.append(
                f"  mesh {c['mesh']} ({c['tail']},{c['head']})({c['carrier']})  "
                f"axes {c['axes'][0]}/{c['axes'][1]}  sign {sign}"
            )
    for name, title in (("matroid", "matroid"), ("tt", "T-T")):
        if name in report["methods"]:
            d = report["methods"][name]
            out.append("")
            out.append(f"{title} transfer matrix [{d['form']}]:")
            out.extend(_table(d))
    if "tt_reconciled" in report:
        out.append("")
        out.append(f"T-T after renaming and row permutation [{report['tt_reconciled']['form']}]:")
        out.extend(_table(report["tt_reconciled"]))
        out.append("")
        out.append(f"verdict: {_verdict_text(report['verdict'])}")
    if "oracle" in report:
        o = report["oracle"]
        out.append("")
        out.append("oracle bindings: " + ", ".join(f"{k}={v}" for k, v in o["bindings"].items()))
        out.extend(_table(o["matrix"]))
        for name, res in o["results"].items():
            out.append(f"oracle vs {name}: {_verdict_text(res)}")
    return "\n".join(out) + "\n"


def _cmd_analyze(args) -> int:
    start = time.perf_counter()
    m = _load(args)
    report, code = build_report(m, args)
    elapsed = time.perf_counter() - start
    if args.format == "json":
        report["timing_s"] = round(elapsed, 6)
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    else:
        sys.stdout.write(render_text(report))
        sys.stdout.write(f"timing: {elapsed:.3f} s\n")
    return code


def _cmd_emit(args) -> int:
    m = _load(args)
    gm = graph_matrices(m)
    if args.format == "json":
        doc = {
            "links": list(gm.link_ids),
            "joints": list(gm.joint_ids),
            "gamma0": gm.gamma0,
            "gamma": gm.gamma,
            "Z": gm.Z,
            "T": gm.T,
            "C": gm.C,
        }
        sys.stdout.write(json.dumps(doc) + "\n")
    else:
        sys.stdout.write(format_matrices(gm))
    return EXIT_OK


def _cmd_validate(args) -> int:
    m = _load(args)
    r = rank(coefficient_matrix(m).entries) if m.c else 0
    notes = []
    try:
        carriers = {a.mesh: a.carrier for a in assign_meshes(m)}
    except GearkinError as exc:
        carriers = {}
        notes.append(f"T-T method unavailable: {exc}")
    doc = {
        "valid": True,
        "mechanism": m.name,
        "links": m.n + 1,
        "turning_joints": m.t,
        "gear_meshes": m.c,
        "dof": m.t - r,
        "carriers": {str(k): v for k, v in carriers.items()},
        "notes": notes,
    }
    if args.format == "json":
        sys.stdout.write(json.dumps(doc) + "\n")
    else:
        lines = [
            f"valid: {m.name}",
            f"links {m.n + 1}, turning joints {m.t}, gear meshes {m.c}, dof {m.t - r}",
        ]
        if carriers:
            lines.append("carriers: " + ", ".join(f"mesh {k} -> {v}" for k, v in carriers.items()))
        lines.extend(f"note: {n}" for n in notes)
        sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gearkin", description="Gear-train velocity analysis.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="mechanism description (JSON)")
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("analyze", help="transfer matrices from one or both methods")
    common(p)
    p.add_argument("--method", choices=("matroid", "tt", "both"), default="both")
    p.add_argument("--symbolic", action="store_true", help="keep unbound symbols in results")
    p.add_argument("--bind", metavar="K=V,...", help="rational values for symbols")
    p.add_argument("--ratios", action="store_true", help="express results in gear ratios i<mesh>")
    p.add_argument("--verify", action="store_true", help="cross-check against the brute-force oracle")
    p.add_argument("--inputs", metavar="I,J,...", help="override the input turning joints")
    p.add_argument("--matrices", action="store_true", help="include graph matrices in the report")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("emit-matrices", help="incidence, path and cycle-basis matrices")
    common(p)
    p.set_defaults(func=_cmd_emit)

    p = sub.add_parser("validate", help="check a mechanism file")
    common(p)
    p.add_argument("--inputs", metavar="I,J,...", help="override the input turning joints")
    p.set_defaults(func=_cmd_validate)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except MechanismError as exc:
        where = f"{args.file}: {exc.location}: " if exc.location else f"{args.file}: "
        print(f"error: {where}{exc.message}", file=sys.stderr)
    except (GearkinError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_INVALID


def main() -> None:
    sys.exit(run())
