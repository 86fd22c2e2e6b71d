"""Command line: ``chaincomplexity analyze|table1|table2|simulate``.

Exit status is 0 when everything passes, 1 when a golden comparison fails
and 2 on bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import replace
from pathlib import Path

from .nxt import NxtConstants, nxt_complexity
from .pow import CurrencyParams, Protocol, pow_complexity
from .reporting import (DatasetError, analyze_dataset, bundled_dataset,
                        load_currency_dataset, render_table)
from .scenarios import KINDS, load_scenario, run_scenario, scenario_constants
from .sim import (EmptyReportError, NoForgerError, SimulationConfigError, SimulationReport,
                  empirical_complexity)

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2
FORMATS = ("text", "csv", "json")


def _table(dataset, fmt, golden, out) -> int:
    rows = analyze_dataset(dataset)
    if not golden:
        rows = [replace(r, c_mu_printed=None) for r in rows]
    out.write(render_table(rows, fmt, dataset.source_date, dataset.source_note))
    failed = any(r.error for r in rows) or any(r.golden_pass is False for r in rows)
    return EXIT_MISMATCH if failed else EXIT_OK


def _analytic(kind: str, config: dict) -> float | None:
    if kind == "pow":
        return pow_complexity(CurrencyParams("pow", Protocol.POW, config["block_time"],
                                             config["hashrate"]))
    if kind == "nxt":
        constants = scenario_constants(config) or NxtConstants()
        return nxt_complexity(constants.block_time)
    return None


def summarize(report: SimulationReport, analytic: float | None = None) -> list[tuple[str, str, str]]:
    """``(section, key, value)`` triples describing a run."""
    items = [
        ("run", "kind", report.kind),
        ("run", "seed", str(report.seed)),
        ("run", "duration_s", str(report.duration)),
        ("run", "blocks", str(report.blocks)),
        ("run", "fork_events", str(report.fork_events)),
    ]
    if report.blocks:
        items.append(("run", "mean_interval_s", repr(report.mean_interval())))
    for state, seconds in report.state_occupancy.items():
        items.append(("occupancy", state, str(seconds)))
    try:
        items.append(("complexity", "empirical_bits", repr(empirical_complexity(report))))
    except EmptyReportError:
        pass
    if analytic is not None:
        items.append(("complexity", "analytic_bits", repr(analytic)))
    for label, wins in report.wins_per_account.items():
        items.append(("wins", label, str(wins)))
    return items


def render_report(report: SimulationReport, fmt: str, analytic: float | None = None) -> str:
    if fmt == "json":
        return report.to_json(indent=2) + "\n"
    items = summarize(report, analytic)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("section", "key", "value"))
        writer.writerows(items)
        return buf.getvalue()
    width = max(len(f"{s}.{k}") for s, k, _ in items)
    return "".join(f"{f'{s}.{k}':<{width}}  {v}\n" for s, k, v in items)


def _simulate(args, out) -> int:
    config = load_scenario(args.config)
    report = run_scenario(config, args.kind, args.seed, args.duration)
    analytic = _analytic(args.kind, config)
    out.write(render_report(report, "text", analytic))
    if args.report:
        path = Path(args.report)
        fmt = args.format or {".json": "json", ".csv": "csv"}.get(path.suffix, "text")
        path.write_text(render_report(report, fmt, analytic), encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chaincomplexity",
        description="Statistical complexity of PoW, PoS and hybrid consensus.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="compute C_mu for every row of a dataset")
    p.add_argument("dataset")
    p.add_argument("--format", choices=FORMATS, default="text")
    p.add_argument("--golden", action="store_true",
                   help="compare with expected_c_mu and fail on mismatch")

    for name, doc in (("table1", "PoW currencies"), ("table2", "PoS and hybrid currencies")):
        p = sub.add_parser(name, help=f"bundled golden table of {doc}")
        p.add_argument("--format", choices=FORMATS, default="text")

    p = sub.add_parser("simulate", help="run a seeded block-production simulation")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--config", required=True, help="JSON scenario file")
    p.add_argument("--seed", type=int)
    p.add_argument("--duration", type=int, help="simulated seconds")
    p.add_argument("--report", help="write the report here (.json, .csv or text)")
    p.add_argument("--format", choices=FORMATS, help="report format (default from extension)")
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            return _table(load_currency_dataset(args.dataset), args.format, args.golden, out)
        if args.command in ("table1", "table2"):
            return _table(bundled_dataset(args.command), args.format, True, out)
        return _simulate(args, out)
    except (DatasetError, SimulationConfigError, NoForgerError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
