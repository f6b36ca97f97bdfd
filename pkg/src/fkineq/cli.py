"""Command-line front end: single checks, full suites, falsification
searches and the Gaussian-entropy demo, with machine-readable reports
(JSON lines by default, CSV on request). Numeric reports only; plotting
is left to external tools.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace

from . import matio
from .errors import SpecificationError
from .linalg import DEFAULT_TOL, ToleranceConfig
from .opfuncs import parse_function
from .registry import REGISTRY, get_entry, run_trials
from .sampling import SamplerConfig, falsify, trial_rng
from .subalgebra import BlockPartition, PositiveMapSpec
from .verifiers import INEQ_IDS, InequalityReport, v_gaussian_entropy

CORE_FIELDS = (
    "ineq_id",
    "trial",
    "lhs",
    "rhs",
    "gap",
    "holds",
    "equality_detected",
    "equality_expected",
    "seed",
)

DEFAULT_GRID_NS = (2, 3, 4, 8)
MONOTONE_FN_GRID = ("power:0.5", "inv_perturb", "shift:log:0.5", "rep:[0,0;(1,1)]")
CONVEX_FN_GRID = ("square",)
LOGCONVEX_FN_GRID = ("one_plus_inv", "reciprocal")


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_records(reports: list[InequalityReport], fmt: str, header: bool) -> str:
    if fmt == "csv":
        lines = [",".join(CORE_FIELDS)] if header else []
        for r in reports:
            rec = r.to_record()
            lines.append(",".join(_csv_cell(rec[f]) for f in CORE_FIELDS))
        return "\n".join(lines) + ("\n" if lines else "")
    return "".join(
        json.dumps(r.to_record(), separators=(",", ":")) + "\n" for r in reports
    )


class _Output:
    def __init__(self, path: str | None, fmt: str):
        self.path = path
        self.fmt = fmt
        self.header_written = False
        self._fh = open(path, "w") if path else sys.stdout

    def emit(self, reports: list[InequalityReport]) -> None:
        text = format_records(reports, self.fmt, header=not self.header_written)
        if self.fmt == "csv":
            self.header_written = True
        self._fh.write(text)

    def close(self) -> None:
        if self.path:
            self._fh.close()
        else:
            self._fh.flush()


def _summary(reports: list[InequalityReport]) -> str:
    trials = len(reports)
    holds = sum(r.holds for r in reports)
    min_gap = min((r.gap for r in reports), default=float("nan"))
    eq_det = sum(r.equality_detected for r in reports)
    eq_exp = sum(1 for r in reports if r.equality_expected)
    return (
        f"records={trials} holds={holds}/{trials} min_gap={min_gap:.6e} "
        f"equality_detected={eq_det} equality_expected={eq_exp}"
    )


def _confusion(reports: list[InequalityReport]) -> dict:
    counts = {"tt": 0, "tf": 0, "ft": 0, "ff": 0, "none": 0}
    for r in reports:
        if r.equality_expected is None:
            counts["none"] += 1
        else:
            key = ("t" if r.equality_expected else "f") + (
                "t" if r.equality_detected else "f"
            )
            counts[key] += 1
    return counts


def _env_seed() -> int:
    raw = os.environ.get("FKINEQ_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fkineq",
        description="Verify determinant and operator inequalities on sampled matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (env FKINEQ_SEED fallback)")
    common.add_argument("--tol-psd", type=float, default=None, help="relative PSD tolerance")
    common.add_argument("--tol-eq", type=float, default=None, help="relative equality tolerance")
    common.add_argument("--out", default=None, help="write records here instead of stdout")
    common.add_argument(
        "--format", choices=("json-lines", "jsonl", "csv"), default="json-lines"
    )
    common.add_argument("--jobs", type=int, default=1, help="parallel trial workers")

    instance = argparse.ArgumentParser(add_help=False)
    instance.add_argument("--n", type=int, default=4, help="matrix dimension")
    instance.add_argument("--partition", default=None, help="block sizes, e.g. 2,2 | diag | full")
    instance.add_argument("--fn", default=None, help="scalar function, e.g. power:0.5")
    instance.add_argument(
        "--map", default=None, help="positive map: pinch | mix:<file> | trace"
    )
    instance.add_argument("--matrix", default=None, help="read A from this file")
    instance.add_argument("--matrix-b", default=None, help="read B from this file")
    instance.add_argument("--dump", default=None, help="write sampled matrices to this directory")

    p_check = sub.add_parser("check", parents=[common, instance], help="run one inequality")
    p_check.add_argument("--ineq", required=True, help="inequality id")
    p_check.add_argument("--trials", type=int, default=100)

    p_suite = sub.add_parser("suite", parents=[common], help="run every inequality over a grid")
    p_suite.add_argument("--n-grid", default=",".join(map(str, DEFAULT_GRID_NS)))
    p_suite.add_argument("--trials", type=int, default=200, help="trials per grid cell")
    p_suite.add_argument(
        "--instances",
        choices=("random", "equal", "unequal"),
        default="random",
        help="equal/unequal restrict to ids with an equality clause",
    )

    p_falsify = sub.add_parser(
        "falsify", parents=[common, instance], help="search for a violation"
    )
    p_falsify.add_argument("--ineq", required=True)
    p_falsify.add_argument("--budget", type=int, default=1000, help="evaluation budget")

    p_demo = sub.add_parser(
        "demo", parents=[common], help="Gaussian entropy subadditivity demo"
    )
    p_demo.add_argument("--n", type=int, default=4)
    p_demo.add_argument("--partition", default=None)
    p_demo.add_argument("--trials", type=int, default=20)

    return parser


def _tolerances(args) -> ToleranceConfig:
    kwargs = {}
    if args.tol_psd is not None:
        kwargs["psd_tol"] = args.tol_psd
    if args.tol_eq is not None:
        kwargs["equality_tol"] = args.tol_eq
    return replace(DEFAULT_TOL, **kwargs) if kwargs else DEFAULT_TOL


def _partition_for(args, ineq_id: str, n: int) -> BlockPartition:
    if ineq_id == "hadamard":
        return BlockPartition.diagonal(n)
    if args.partition:
        return BlockPartition.parse(args.partition, n)
    return BlockPartition.halves(n)


def _mapspec_for(args, n: int, part: BlockPartition) -> PositiveMapSpec | None:
    if args.map is None:
        return None
    text = args.map.strip()
    if text == "pinch":
        return PositiveMapSpec.pinching(part)
    if text == "trace":
        return PositiveMapSpec.trace_map(n)
    if text.startswith("mix:"):
        return PositiveMapSpec.unitary_mixing(matio.read_mixing(text[4:]))
    raise SpecificationError(f"unknown map {text!r}")


def _exit_code(reports_by_id: dict[str, list[InequalityReport]]) -> int:
    for ineq_id, reports in reports_by_id.items():
        entry = get_entry(ineq_id)
        if entry.guaranteed and any(not r.holds for r in reports):
            return 1
        if ineq_id == "matic_var_counterexample" and reports and all(
            r.holds for r in reports
        ):
            return 1
    return 0


def _cmd_check(args) -> int:
    tol = _tolerances(args)
    entry = get_entry(args.ineq)
    fixed = None
    n = args.n
    if args.matrix:
        A = matio.read_matrix(args.matrix)
        n = A.shape[0]
        fixed = {"A": A}
        if args.matrix_b:
            fixed["B"] = matio.read_matrix(args.matrix_b)
    elif args.matrix_b:
        fixed_b = matio.read_matrix(args.matrix_b)
        n = fixed_b.shape[0]
        fixed = {"B": fixed_b}
    part = _partition_for(args, args.ineq, n)
    seed = args.seed if args.seed is not None else _env_seed()
    trials = 1 if fixed is not None else args.trials
    cfg = SamplerConfig(n=n, partition=part, seed=seed, trials=trials)
    mapspec = _mapspec_for(args, n, part)
    reports = run_trials(
        args.ineq,
        cfg,
        tol,
        fn_text=args.fn,
        mapspec=mapspec,
        fixed_inputs=fixed,
        jobs=args.jobs,
        dump_dir=args.dump,
    )
    out = _Output(args.out, "csv" if args.format == "csv" else "jsonl")
    out.emit(reports)
    out.close()
    print(f"[{args.ineq}] {_summary(reports)}", file=sys.stderr)
    return _exit_code({args.ineq: reports})


def _suite_cells(entry, ns: list[int]) -> list[dict]:
    cells = []
    for n in ns:
        parts = [BlockPartition.diagonal(n)]
        halves = BlockPartition.halves(n)
        if halves.sizes != parts[0].sizes:
            parts.append(halves)
        if entry.ineq_id == "hadamard":
            parts = [BlockPartition.diagonal(n)]
        for part in parts:
            if entry.ineq_id == "op_monotone" or entry.ineq_id == "det_monotone":
                fns = MONOTONE_FN_GRID
            elif entry.ineq_id == "op_convex" or entry.ineq_id == "trace_jensen":
                fns = CONVEX_FN_GRID
            elif entry.ineq_id == "logconvex_det":
                fns = LOGCONVEX_FN_GRID
            else:
                fns = (None,)
            for fn in fns:
                cells.append({"n": n, "part": part, "fn": fn})
    return cells


def _cmd_suite(args) -> int:
    tol = _tolerances(args)
    try:
        ns = [int(tok) for tok in args.n_grid.split(",") if tok.strip()]
    except ValueError:
        print(f"bad --n-grid {args.n_grid!r}", file=sys.stderr)
        return 2
    if not ns:
        print("empty grid", file=sys.stderr)
        return 2
    seed = args.seed if args.seed is not None else _env_seed()
    out = _Output(args.out, "csv" if args.format == "csv" else "jsonl")
    reports_by_id: dict[str, list[InequalityReport]] = {}
    for ineq_id, entry in REGISTRY.items():
        if args.instances != "random" and not entry.has_iff:
            continue
        collected: list[InequalityReport] = []
        for cell_index, cell in enumerate(_suite_cells(entry, ns)):
            cfg = SamplerConfig(
                n=cell["n"],
                partition=cell["part"],
                seed=seed + 1000 * cell_index,
                trials=args.trials,
            )
            reports = run_trials(
                ineq_id,
                cfg,
                tol,
                fn_text=cell["fn"],
                instances=args.instances,
                jobs=args.jobs,
            )
            out.emit(reports)
            collected.extend(reports)
        reports_by_id[ineq_id] = collected
        conf = _confusion(collected)
        print(
            f"[{ineq_id}] {_summary(collected)} confusion(tt,tf,ft,ff,none)="
            f"{conf['tt']},{conf['tf']},{conf['ft']},{conf['ff']},{conf['none']}",
            file=sys.stderr,
        )
    out.close()
    return _exit_code(reports_by_id)


def _cmd_falsify(args) -> int:
    tol = _tolerances(args)
    entry = get_entry(args.ineq)
    n = args.n
    part = _partition_for(args, args.ineq, n)
    seed = args.seed if args.seed is not None else _env_seed()
    cfg = SamplerConfig(n=n, partition=part, seed=seed)
    mapspec = _mapspec_for(args, n, part)
    report = falsify(args.ineq, cfg, args.budget, tol, fn_text=args.fn, mapspec=mapspec)
    if args.dump:
        os.makedirs(args.dump, exist_ok=True)
        for key, value in list(report.witness.items()):
            if key.endswith("_text"):
                path = os.path.join(args.dump, f"{args.ineq}_witness_{key[:-5]}.txt")
                with open(path, "w") as fh:
                    fh.write(value)
    out = _Output(args.out, "csv" if args.format == "csv" else "jsonl")
    out.emit([report])
    out.close()
    print(f"[falsify {args.ineq}] min_gap={report.gap:.6e} holds={report.holds}", file=sys.stderr)
    if entry.guaranteed:
        return 1 if not report.holds else 0
    return 0 if not report.holds else 1


def _cmd_demo(args) -> int:
    tol = _tolerances(args)
    seed = args.seed if args.seed is not None else _env_seed()
    n = args.n
    part = (
        BlockPartition.parse(args.partition, n)
        if args.partition
        else BlockPartition.halves(n)
    )
    cfg = SamplerConfig(n=n, partition=part, seed=seed, trials=args.trials)
    reports = run_trials("gaussian_entropy", cfg, tol, jobs=args.jobs)
    out = _Output(args.out, "csv" if args.format == "csv" else "jsonl")
    out.emit(reports)

    rho_part = BlockPartition.diagonal(2)
    rho_reports = []
    print("# 2x2 correlation sweep: deficit = 0.5*ln(1/(1-rho^2))", file=sys.stderr)
    worst = 0.0
    for i, rho in enumerate((0.1, 0.3, 0.5, 0.7, 0.9)):
        sigma = [[1.0, rho], [rho, 1.0]]
        rep = v_gaussian_entropy(sigma, rho_part, tol)
        rep = replace(rep, trial=i, seed=seed)
        rho_reports.append(rep)
        expected = 0.5 * math.log(1.0 / (1.0 - rho * rho))
        err = abs(rep.gap - expected)
        worst = max(worst, err)
        print(
            f"rho={rho:.1f} deficit={rep.gap:.6f} closed_form={expected:.6f} |err|={err:.2e}",
            file=sys.stderr,
        )
    out.emit(rho_reports)
    out.close()
    print(
        f"[demo] {_summary(reports + rho_reports)} closed_form_max_err={worst:.2e}",
        file=sys.stderr,
    )
    ok = _exit_code({"gaussian_entropy": reports + rho_reports}) == 0 and worst <= 1e-9
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "suite":
            return _cmd_suite(args)
        if args.command == "falsify":
            return _cmd_falsify(args)
        if args.command == "demo":
            return _cmd_demo(args)
    except (KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
