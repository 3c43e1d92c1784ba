"""Command-line entry point.

    qregsim run FILE [--param k=v ...] [--format text|json] [--out PATH]
    qregsim sweep FILE PARAM FROM TO STEPS [--detector NAME ...] [--param k=v ...]
    qregsim check FILE [--param k=v ...]
    qregsim table

FILE is a path or the name of a bundled experiment.  Exit codes: 0 success,
1 parse or validation error, 2 final norm outside tolerance, 3 a stage failed
the isometry check.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

import numpy as np

from . import corpus
from .algebra import format_table
from .dsl import Diagnostic, DSLError, EvalError, eval_expr, parse_document, parse_expr
from .errors import QRegError
from .register import format_ket
from .rewrite import RunReport, check_program, run_program

EXIT_OK, EXIT_PARSE, EXIT_NORM, EXIT_CHECK = 0, 1, 2, 3


def _sig(x: float) -> float:
    return float(f"{x:.12g}")


def report_dict(report: RunReport) -> dict:
    rank = report.rank
    return {
        "norm": _sig(report.norm),
        "rank": {"ranks": list(rank.ranks) if rank else [],
                 "homogeneous": rank.homogeneous if rank else False},
        "state": [{"bits": format_ket(a, report.state.rank)[1:-1], "index": a,
                   "amp": [_sig(amp.real), _sig(amp.imag)]}
                  for a, amp in report.state.items()],
        "detectors": {k: _sig(v) for k, v in report.detectors.items()},
        "marginals": {f"q{k}": _sig(v) for k, v in report.marginals.items()},
        "warnings": list(report.warnings),
    }


def report_json(report: RunReport) -> str:
    return json.dumps(report_dict(report), sort_keys=True, indent=2) + "\n"


def _table(rows: list[list[str]]) -> list[str]:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]


def report_text(report: RunReport) -> str:
    d = report_dict(report)
    out = [f"norm  {d['norm']:.12g}",
           f"rank  {d['rank']['ranks']} ({'homogeneous' if d['rank']['homogeneous'] else 'mixed'})", ""]
    rows = [["ket", "index", "re", "im", "prob"]]
    for t, amp in zip(d["state"], report.state.terms.values()):
        re_, im_ = t["amp"]
        rows.append([f"|{t['bits']})", str(t["index"]), f"{re_:.12g}", f"{im_:.12g}",
                     f"{abs(amp) ** 2:.12g}"])
    out += _table(rows)
    if d["detectors"]:
        out += [""] + _table([["detector", "probability"]] +
                             [[k, f"{v:.12g}"] for k, v in d["detectors"].items()])
    out += [""] + _table([["qubit", "marginal"]] + [[k, f"{v:.12g}"] for k, v in d["marginals"].items()])
    for w in d["warnings"]:
        out.append(f"warning: {w}")
    return "\n".join(out) + "\n"


def _params(pairs: Sequence[str]) -> dict[str, str]:
    out = {}
    for p in pairs or ():
        name, sep, value = p.partition("=")
        if not sep or not name.strip():
            raise ValueError(f"--param expects NAME=VALUE, got {p!r}")
        out[name.strip()] = value.strip()
    return out


def _real(text: str) -> float:
    v = eval_expr(parse_expr(text), {})
    if v.imag != 0:
        raise ValueError(f"{text!r} is not real")
    return v.real


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    doc = parse_document(corpus.read_text(args.file), _params(args.param))
    report = run_program(doc.program)
    _emit(report_json(report) if args.format == "json" else report_text(report), args.out)
    return EXIT_OK if report.ok else EXIT_NORM


def sweep_rows(text: str, param: str, start: float, stop: float, steps: int,
               detectors: Sequence[str] | None = None, overrides=None) -> tuple[list[str], list[list[float]], bool]:
    """Grid points and probabilities for a parameter sweep.

    Column names are detector names, or ``q<k>`` for the marginal of qubit k.
    Returns (header, rows, all_normalized).
    """
    if steps < 2:
        raise ValueError("steps must be at least 2")
    overrides = dict(overrides or {})
    base = parse_document(text, overrides)
    if param not in base.params:
        raise DSLError([_diag(f"unknown parameter {param!r}")])
    names = list(detectors) if detectors else list(base.program.detectors)
    for n in names:
        if n not in base.program.detectors and not (n[:1] == "q" and n[1:].isdigit()
                                                    and int(n[1:]) < base.program.rank):
            raise DSLError([_diag(f"unknown detector {n!r}")])
    rows, ok = [], True
    for x in np.linspace(start, stop, steps):
        report = run_program(parse_document(text, {**overrides, param: float(x)}).program)
        ok &= report.ok
        rows.append([float(x)] + [report.detectors[n] if n in report.detectors else report.marginals[int(n[1:])]
                                  for n in names])
    return ["param"] + names, rows, ok


def _diag(message: str) -> Diagnostic:
    return Diagnostic(0, 0, message)


def cmd_sweep(args) -> int:
    header, rows, ok = sweep_rows(corpus.read_text(args.file), args.name, _real(args.start), _real(args.stop),
                                  args.steps, args.detector, _params(args.param))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) for v in row])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK if ok else EXIT_NORM


def cmd_check(args) -> int:
    doc = parse_document(corpus.read_text(args.file), _params(args.param))
    results = check_program(doc.program)
    rows = [["stage", "max_deviation", "result"]]
    for name, rep in results:
        rows.append([name, f"{rep.max_deviation:.3e}", "pass" if rep.passed else "FAIL"])
    text = "\n".join(_table(rows)) + "\n"
    if not results:
        text += "no stages: vacuous pass\n"
    _emit(text, args.out)
    return EXIT_OK if all(rep.passed for _, rep in results) else EXIT_CHECK


def cmd_table(args) -> int:
    _emit(format_table(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qregsim", description="Quantum register experiment simulator.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, fmt=False):
        p.add_argument("file", help="experiment file or bundled name (%s)" % ", ".join(corpus.NAMES))
        p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                       help="override a declared parameter; VALUE is an expression")
        p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
        if fmt:
            p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("run", help="run an experiment and report probabilities")
    common(p, fmt=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="sweep one parameter over a uniform grid, CSV output")
    common(p)
    p.add_argument("name", metavar="PARAM")
    p.add_argument("start", metavar="FROM")
    p.add_argument("stop", metavar="TO")
    p.add_argument("steps", type=int, metavar="STEPS")
    p.add_argument("--detector", action="append", metavar="NAME",
                   help="column to report (detector name or q<k>); default all detectors")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", help="per-stage isometry check")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("table", help="print the single-qubit operator product table")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_table)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DSLError, EvalError, FileNotFoundError, ValueError, QRegError) as exc:
        print(f"qregsim: error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    raise SystemExit(main())
