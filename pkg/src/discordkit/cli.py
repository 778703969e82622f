"""Command-line front end.

Subcommands:
  compute   correlation report (entropies, I, J, D, discord distance) for a
            state loaded from JSON or generated from a named family
  verify    run named verification suites over a seeded state family
  example   reproduce a bundled worked example with reference values
  hunt      sweep Werner states and report the non-certifying upper estimate
            of the purified discord against the environment entropy

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
Outputs are deterministic for a fixed seed (no timestamps), so repeated runs
produce byte-identical report files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .correlations import (
    DiscordBoundError,
    OptimizerConfig,
    REPORT_CSV_COLUMNS,
    classical_correlation,
    correlation_report,
    discord,
)
from .entanglement import eof_2qubit
from .qstate import (
    InvalidStateError,
    QState,
    partial_trace,
    purify,
    purity,
    state_from_json,
    von_neumann_entropy,
)
from .states import FAMILIES, StateFamilySpec, haar_random_pure
from .verify import RELATIONS, run_suite, suite_csv_rows

HUNT_LABEL = "non-certifying upper estimate of D_A"

_EPILOG = f"""\
compute CSV column order:
  {', '.join(REPORT_CSV_COLUMNS)}
verify CSV column order:
  suite, sample, relation, lhs, rhs, slack, tolerance, holds, skipped, seed
known suites: {', '.join(sorted(RELATIONS))}
known families: {', '.join(FAMILIES)}
"""


def _add_optimizer_args(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0, help="64-bit RNG seed")
    p.add_argument("--restarts", type=int, default=None, help="local-search restarts")
    p.add_argument("--tol", type=float, default=None, help="objective tolerance")
    p.add_argument("--max-iter", type=int, default=None, help="local-search iteration cap")


def _add_output_args(p: argparse.ArgumentParser, formats=("json", "csv", "human")):
    p.add_argument("--format", choices=formats, default=formats[0], help="output format")
    p.add_argument("--out", default=None, help="write output to this path instead of stdout")


def _add_family_args(p: argparse.ArgumentParser):
    p.add_argument("--family", choices=FAMILIES, default=None, help="named state family")
    p.add_argument("--dims", default=None, help="subsystem dimensions, e.g. 2x2x2")
    p.add_argument("--rank", type=int, default=None, help="rank for random_mixed states")
    p.add_argument("-d", "--d", type=int, default=None, dest="d", help="local dimension for werner_qudit")
    p.add_argument("--x", default=None, help="flip expectation for werner_qudit")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discordkit",
        description="Quantum-correlation measures and verification suites.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_compute = sub.add_parser("compute", help="correlation report for one state")
    p_compute.add_argument("--state", default=None, help="path to a state JSON file")
    _add_family_args(p_compute)
    _add_optimizer_args(p_compute)
    _add_output_args(p_compute, formats=("human", "json", "csv"))

    p_verify = sub.add_parser("verify", help="run verification suites")
    p_verify.add_argument("--suite", required=True, help="comma-separated relation names")
    p_verify.add_argument("--samples", type=int, default=20, help="samples per suite")
    _add_family_args(p_verify)
    _add_optimizer_args(p_verify)
    _add_output_args(p_verify, formats=("json", "csv"))

    p_example = sub.add_parser("example", help="reproduce a bundled worked example")
    p_example.add_argument("name", choices=("example2", "example3", "example4"))
    _add_optimizer_args(p_example)
    _add_output_args(p_example, formats=("human", "json"))

    p_hunt = sub.add_parser("hunt", help="sweep Werner states for the discord gap")
    p_hunt.add_argument("-d", "--d", type=int, required=True, dest="d", help="local dimension (>= 2)")
    p_hunt.add_argument("--x", required=True, help="inclusive sweep start:end:count")
    _add_optimizer_args(p_hunt)
    _add_output_args(p_hunt, formats=("json", "csv", "human"))
    return parser


def _config_from_args(args) -> OptimizerConfig:
    kwargs = {"seed": args.seed}
    if args.restarts is not None:
        kwargs["restarts"] = args.restarts
    if args.tol is not None:
        kwargs["tol"] = args.tol
    if getattr(args, "max_iter", None) is not None:
        kwargs["max_iter"] = args.max_iter
    return OptimizerConfig(**kwargs)


def _parse_dims(text: str) -> tuple:
    try:
        dims = tuple(int(part) for part in text.lower().split("x"))
    except ValueError:
        raise ValueError(f"bad --dims value {text!r}; expected e.g. 2x2x2") from None
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"bad --dims value {text!r}; dimensions must be positive")
    return dims


def _parse_range(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"bad range {text!r}; expected start:end:count")
    start, end = float(parts[0]), float(parts[1])
    count = int(parts[2])
    if count < 1:
        raise ValueError("range count must be >= 1")
    return np.linspace(start, end, count)


def _family_spec_from_args(args) -> StateFamilySpec:
    family = args.family
    if family is None:
        raise ValueError("either --state or --family is required")
    params: dict = {}
    if family == "werner_qudit":
        if args.d is None or args.x is None:
            raise ValueError("werner_qudit requires --d and --x")
        params = {"d": args.d, "x": float(args.x)}
    elif family in ("haar_pure", "random_mixed", "classical_quantum"):
        if args.dims is None:
            raise ValueError(f"{family} requires --dims")
        dims = _parse_dims(args.dims)
        if family == "haar_pure":
            params = {"dims": dims}
        elif family == "random_mixed":
            rank = args.rank if args.rank is not None else int(np.prod(dims))
            params = {"dims": dims, "rank": rank}
        else:
            params = {
                "k": dims[0],
                "dims": dims[1:] if len(dims) > 1 else (2,),
                "rank": args.rank if args.rank is not None else 1,
            }
    return StateFamilySpec(family, params, args.seed)


def _load_state(args) -> QState:
    if args.state is not None:
        with open(args.state, "r", encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidStateError(
                    f"malformed state JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
                ) from None
        return state_from_json(obj)
    sample = _family_spec_from_args(args).sample(0)
    return sample.to_density() if hasattr(sample, "to_density") else sample


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def _human_table(rows, header) -> str:
    cells = [tuple(_fmt(c) for c in row) for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(header))]
    lines.append("  ".join("-" * w for w in widths))
    for row in cells:
        lines.append("  ".join(row[i].ljust(widths[i]) for i in range(len(header))))
    return "\n".join(lines) + "\n"


def _cmd_compute(args) -> int:
    try:
        state = _load_state(args)
        cfg = _config_from_args(args)
        report = correlation_report(state, cfg)
    except (InvalidStateError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.format == "json":
        _emit(json.dumps(report.to_json(), indent=2) + "\n", args.out)
    elif args.format == "csv":
        _emit(_csv_text([list(REPORT_CSV_COLUMNS), report.to_csv_row()]), args.out)
    else:
        rows = [
            ("S(A)", report.s_a),
            ("S(B)", report.s_b),
            ("S(AB)", report.s_ab),
            ("I(A:B)", report.mutual_information),
            ("J_A", report.j_a),
            ("J_B", report.j_b),
            ("D_A", report.d_a),
            ("D_B", report.d_b),
            ("discord distance", report.discord_distance),
        ]
        text = _human_table(rows, ("quantity", "value"))
        text += f"measurement class: {report.measurement_class}\n"
        text += f"note: {report.estimator_bias}\n"
        _emit(text, args.out)
    return 0


def _cmd_verify(args) -> int:
    relations = tuple(name.strip() for name in args.suite.split(",") if name.strip())
    unknown = [r for r in relations if r not in RELATIONS]
    if not relations or unknown:
        print(f"error: unknown suite names {unknown or relations}", file=sys.stderr)
        return 2
    try:
        spec = _family_spec_from_args(args)
        cfg = _config_from_args(args)
        report = run_suite(spec, relations, args.samples, cfg)
    except (InvalidStateError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out or args.format == "csv":
        if args.format == "json":
            _emit(json.dumps(report.to_json(), indent=2) + "\n", args.out)
        else:
            _emit(_csv_text(suite_csv_rows(report)), args.out)
    for name, counts in report.relation_summary().items():
        line = f"{name}: {counts['pass']} pass, {counts['fail']} fail, {counts['skip']} skip"
        if counts["recorded_violations"]:
            line += f" ({counts['recorded_violations']} recorded violations)"
        print(line)
    return 0 if report.all_pass else 1


def _example_rows(name: str, cfg: OptimizerConfig):
    if name == "example3":
        from .states import example3_state

        state = example3_state()
        abc = purify(state).to_density()
        rho_bc = partial_trace(abc, (1, 2))
        ef_bc = eof_2qubit(rho_bc).value
        d_a = discord(state, 0, cfg)
        return [
            ("S(A)", 2.0, von_neumann_entropy(partial_trace(state, (0,)))),
            ("S(B)", 1.0, von_neumann_entropy(partial_trace(state, (1,)))),
            ("S(AB)", 1.0, von_neumann_entropy(state)),
            ("purity", 0.5, purity(state)),
            ("E_F(BC)", 0.0, ef_bc),
            ("D_A", 1.0, d_a.value),
            ("S(A)-S(AB)-S(B)", 0.0, 2.0 - 1.0 - 1.0),
        ], {"d_a": d_a.diagnostics()}
    if name == "example4":
        from .states import werner_2qubit_example4

        state = werner_2qubit_example4()
        report = correlation_report(state, cfg)
        return [
            ("S(AB)", 0.5 * math.log2(6.0) + 0.5, report.s_ab),
            ("I(A:B)", 2.0 - (0.5 * math.log2(6.0) + 0.5), report.mutual_information),
            ("D_A", 0.126, report.d_a),
            ("J_A", 0.082, report.j_a),
        ], {"diagnostics": report.diagnostics}
    # example2: a seeded random pure state; D_A = D_B = S(B) for pure states.
    vec = haar_random_pure((2, 2), cfg.seed)
    state = vec.to_density()
    report = correlation_report(state, cfg)
    return [
        ("S(B)", report.s_b, report.s_b),
        ("D_A", report.s_b, report.d_a),
        ("D_B", report.s_b, report.d_b),
        ("discord distance", 0.0, report.discord_distance),
    ], {"diagnostics": report.diagnostics}


def _cmd_example(args) -> int:
    cfg = _config_from_args(args)
    rows, extras = _example_rows(args.name, cfg)
    table = [(q, ref, got, abs(got - ref)) for q, ref, got in rows]
    if args.format == "json":
        payload = {
            "example": args.name,
            "rows": [
                {"quantity": q, "reference": ref, "computed": got, "delta": delta}
                for q, ref, got, delta in table
            ],
            **extras,
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        _emit(_human_table(table, ("quantity", "reference", "computed", "delta")), args.out)
    return 0


def _cmd_hunt(args) -> int:
    try:
        grid = _parse_range(args.x)
        if args.d < 2:
            raise ValueError("hunt requires d >= 2")
        if np.any(grid <= -1.0) or np.any(grid >= 1.0):
            raise ValueError("hunt requires x values inside (-1, 1)")
        cfg = _config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    from .states import werner_qudit

    rows = []
    for x in grid:
        print(f"hunt: d={args.d} x={x:.6g} ...", file=sys.stderr, flush=True)
        state = werner_qudit(args.d, float(x))
        s_a = von_neumann_entropy(partial_trace(state, (0,)))
        s_other = von_neumann_entropy(partial_trace(state, (1,)))
        s_env = von_neumann_entropy(state)
        opt = classical_correlation(state, 0, cfg)
        running = np.minimum.accumulate(np.array(opt.restart_values))
        trajectory = [float(s_a - s_other + v) for v in running]
        d_upper = s_a - opt.value
        rows.append(
            {
                "x": float(x),
                "s_measured": s_a,
                "s_env": s_env,
                "j_classical": opt.value,
                "d_upper": d_upper,
                "gap": d_upper - s_env,
                "trajectory": trajectory,
                "converged": opt.converged,
                "spread": opt.spread,
            }
        )
    payload = {"mode": "hunt", "d": args.d, "label": HUNT_LABEL, "rows": rows}
    if args.format == "json":
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    elif args.format == "csv":
        table = [["x", "s_measured", "s_env", "j_classical", "d_upper", "gap", "label"]]
        for r in rows:
            table.append(
                [r["x"], r["s_measured"], r["s_env"], r["j_classical"], r["d_upper"], r["gap"], HUNT_LABEL]
            )
        _emit(_csv_text(table), args.out)
    else:
        table = [
            (r["x"], r["s_env"], r["d_upper"], r["gap"]) for r in rows
        ]
        text = _human_table(table, ("x", "S(B)", "D_A upper", "gap"))
        text += f"label: {HUNT_LABEL}\n"
        _emit(text, args.out)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        if args.command == "compute":
            return _cmd_compute(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "example":
            return _cmd_example(args)
        return _cmd_hunt(args)
    except DiscordBoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
