"""Command-line entry point: ``jtentangle {sweep-eb, sweep-ee, bifurcation, verify}``.

Exit codes: 0 clean, 1 usage error, 2 some rows did not converge,
3 a verification suite failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import sweeps, verify

EXIT_OK, EXIT_USAGE, EXIT_UNCONVERGED, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def fmt(v) -> str:
    """Locale-free text form with 12 significant digits."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v) + 0.0, ".12g")
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        x = float(v)
        return float(format(x + 0.0, ".12g")) if np.isfinite(x) else None
    return v


def render(columns, rows: list[dict], fmt_name: str, spec: dict) -> str:
    if fmt_name == "json":
        body = {"spec": spec, "rows": [{c: _json_value(r.get(c)) for c in columns} for r in rows]}
        return json.dumps(body, indent=1, sort_keys=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_common(sp):
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out", default=None, help="output path (default: standard output)")
    sp.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")


def _add_sweep(sp):
    sp.add_argument("--figure", choices=sorted(sweeps.FIGURES), default=None,
                    help="preset grid for one of the standard figure datasets")
    sp.add_argument("--sweep", choices=sweeps.VARIABLES, default=None, help="swept variable")
    sp.add_argument("--min", type=float, default=None)
    sp.add_argument("--max", type=float, default=None)
    sp.add_argument("--count", type=int, default=None)
    sp.add_argument("--coupling", type=float, default=None, help="fixed L when not swept")
    sp.add_argument("--delta", type=float, default=None)
    sp.add_argument("--omega", type=float, default=None)
    sp.add_argument("--c1", type=float, default=None)
    sp.add_argument("--gamma", type=float, default=None)
    sp.add_argument("--fock", type=int, default=None, help="initial Fock cutoff per mode")
    _add_common(sp)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="jtentangle", description="Ground-state entanglement of E x beta and E x epsilon models")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    _add_sweep(sub.add_parser("sweep-eb", help="qubit entropy of the one-mode model"))
    _add_sweep(sub.add_parser("sweep-ee", help="exact and ansatz entropies of the two-mode model"))
    bif = sub.add_parser("bifurcation", help="classical fixed-point branches")
    bif.add_argument("--model", choices=("eb", "ee"), default="eb")
    bif.add_argument("--delta", type=float, default=1.0)
    bif.add_argument("--omega", type=float, default=1.0)
    bif.add_argument("--min", type=float, default=0.0)
    bif.add_argument("--max", type=float, default=3.0)
    bif.add_argument("--count", type=int, default=31)
    _add_common(bif)
    ver = sub.add_parser("verify", help="run a self-check suite and print a JSON report")
    ver.add_argument("suite", choices=(*verify.SUITES, "all"))
    ver.add_argument("--out", default=None)
    return ap


def _sweep_spec(model: str, a) -> sweeps.SweepSpec:
    fixed = {"coupling": a.coupling, "delta": a.delta, "omega": a.omega, "c1": a.c1, "gamma": a.gamma,
             "fock": a.fock}
    if a.figure:
        preset = sweeps.FIGURES[a.figure]
        if preset["model"] != model:
            raise UsageError(f"figure {a.figure!r} belongs to sweep-{preset['model']}")
        lo, hi, count = preset["grid"]
        grid = (lo if a.min is None else a.min, hi if a.max is None else a.max,
                count if a.count is None else a.count)
        kw = {k: v for k, v in fixed.items() if v is not None}
        if a.sweep is not None:
            kw["variable"] = a.sweep
        return sweeps.figure_spec(a.figure, grid=grid, **kw)
    if a.sweep is None or a.min is None or a.max is None or a.count is None:
        raise UsageError("--sweep, --min, --max and --count are required without --figure")
    kw = {k: v for k, v in fixed.items() if v is not None}
    return sweeps.SweepSpec(model=model, variable=a.sweep, grid=(a.min, a.max, a.count), **kw)


def _run_sweep(model: str, a) -> int:
    spec = _sweep_spec(model, a)
    records = sweeps.run_sweep(spec, a.threads)
    columns = sweeps.EB_COLUMNS if model == "eb" else sweeps.EE_COLUMNS
    _emit(render(columns, [r.values for r in records], a.format, spec.as_dict()), a.out)
    bad = sum(not r.converged for r in records)
    if bad:
        print(f"{bad} of {len(records)} rows hit the truncation cap without converging", file=sys.stderr)
        return EXIT_UNCONVERGED
    return EXIT_OK


def _run_bifurcation(a) -> int:
    if a.count < 2 or not a.min < a.max:
        raise UsageError("bifurcation grid needs count >= 2 and min < max")
    grid = np.linspace(a.min, a.max, a.count)
    columns, rows, meta = sweeps.bifurcation_rows(a.model, grid, a.delta, a.omega)
    spec = {"command": "bifurcation", "grid": [a.min, a.max, a.count], **meta}
    _emit(render(columns, rows, a.format, spec), a.out)
    return EXIT_OK


def _run_verify(a) -> int:
    report = verify.run_suite(a.suite)
    _emit(json.dumps(report, indent=1) + "\n", a.out)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def main(argv=None) -> int:
    try:
        a = build_parser().parse_args(argv)
        if a.command == "verify":
            return _run_verify(a)
        if getattr(a, "threads", None) is not None and a.threads < 1:
            raise UsageError("--threads must be at least 1")
        if a.command == "bifurcation":
            return _run_bifurcation(a)
        return _run_sweep("eb" if a.command == "sweep-eb" else "ee", a)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # invalid parameter combinations surface from the library as ValueError
        print(f"jtentangle: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # --help exits through argparse
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
