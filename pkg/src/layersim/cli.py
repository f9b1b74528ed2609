"""Command-line entry point.

    layersim run <scenario> --out <dir> [--figures]
    layersim energy <trace.csv> --windows <w.csv> [--max-gap-s 5]
    layersim compare <scenario> --nodes 1,2,3 [--out <file>] [--figure <png>]

``<scenario>`` is a JSON scenario path or a bundled preset name (aes,
pagerank). Standard output carries CSV only; diagnostics go to stderr.
Exit codes: 0 success, 1 invalid input, 2 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from typing import Dict, List, Optional, Sequence, Tuple

from . import report, sim
from .energy import EnergyError, windows_energy
from .model import Layer, US_PER_S
from .telemetry import ParseError, dump_csv, dump_events_csv, load_csv

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2
WINDOW_HEADER = ["task_id", "node_id", "start_us", "end_us"]


def _err(message: str) -> None:
    print(f"layersim: {message}", file=sys.stderr)


def _load(spec: str) -> sim.Scenario:
    if not os.path.exists(spec) and spec in sim.PRESETS:
        return sim.load_preset(spec)
    return sim.load_scenario(spec)


def cmd_run(scenario_path: str, out_dir: str, figures: bool = False) -> int:
    try:
        scenario = _load(scenario_path)
        result = sim.run(scenario)
    except sim.ScenarioInvalid as exc:
        _err(f"invalid scenario {scenario_path}: {exc}")
        return EXIT_INVALID
    except OSError as exc:
        _err(f"cannot read {scenario_path}: {exc.strerror or exc}")
        return EXIT_IO
    try:
        os.makedirs(out_dir, exist_ok=True)
        dump_events_csv(result.event_log, os.path.join(out_dir, "events.csv"))
        dump_csv(result.traces, os.path.join(out_dir, "traces.csv"))
        with open(os.path.join(out_dir, "report.csv"), "w", encoding="utf-8", newline="") as fh:
            fh.write(report.to_csv(report.report_rows(result), report.ReportRow))
        if figures:
            from .plotting import plot_power_traces

            plot_power_traces(result.traces, os.path.join(out_dir, "power.png"))
    except OSError as exc:
        _err(f"cannot write to {out_dir}: {exc.strerror or exc}")
        return EXIT_IO
    return EXIT_OK


def _read_windows(path: str) -> Dict[str, List[Tuple[str, int, int]]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = csv.reader(fh)
        if next(rows, None) != WINDOW_HEADER:
            raise ParseError(1, f"expected header {','.join(WINDOW_HEADER)}")
        tasks: Dict[str, List[Tuple[str, int, int]]] = {}
        for lineno, row in enumerate(rows, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ParseError(lineno, f"expected 4 fields, got {len(row)}")
            try:
                start, end = int(row[2]), int(row[3])
            except ValueError:
                raise ParseError(lineno, "start_us and end_us must be integers") from None
            if end < start:
                raise ParseError(lineno, "end_us precedes start_us")
            tasks.setdefault(row[0], []).append((row[1], start, end))
    return tasks


def cmd_energy(trace_path: str, windows_path: str, max_gap_s: Optional[float] = 5.0, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        traces = load_csv(trace_path)
        tasks = _read_windows(windows_path)
        gap = None if max_gap_s is None or max_gap_s <= 0 else int(round(max_gap_s * US_PER_S))
        rows: List[report.EnergyRow] = []
        for task_id in sorted(tasks):
            rep = windows_energy(task_id, tasks[task_id], traces, gap)
            for node_id, joules in rep.per_node.items():
                rows.append(report.EnergyRow(task_id, node_id, joules, joules / 3600.0))
            rows.append(report.EnergyRow(task_id, report.TOTAL, rep.total, rep.total_wh))
    except (ParseError, EnergyError) as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return EXIT_INVALID
    except OSError as exc:
        _err(f"cannot read {exc.filename}: {exc.strerror or exc}")
        return EXIT_IO
    out.write(report.to_csv(rows, report.EnergyRow))
    return EXIT_OK


def _parse_counts(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValueError(f"bad node count list {text!r}") from None


def compare_rows(scenario: sim.Scenario, counts: Sequence[int]) -> List[report.CompareRow]:
    fog = sum(1 for n in scenario.nodes if n.layer is Layer.FOG)
    if not counts:
        raise ValueError("no node counts given")
    for n in counts:
        if n < 1 or n > fog:
            raise ValueError(f"node count {n} outside 1..{fog} (fog nodes available)")
    rows = []
    for n in counts:
        result = sim.run(scenario.pinned(n), pinned_width=n)
        rows.append(report.compare_row(n, result))
    return rows


def cmd_compare(
    scenario_path: str,
    node_counts: Sequence[int],
    out_path: Optional[str] = None,
    figure: Optional[str] = None,
    out=None,
) -> int:
    out = sys.stdout if out is None else out
    try:
        scenario = _load(scenario_path)
        rows = compare_rows(scenario, node_counts)
    except sim.ScenarioInvalid as exc:
        _err(f"invalid scenario {scenario_path}: {exc}")
        return EXIT_INVALID
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INVALID
    except OSError as exc:
        _err(f"cannot read {scenario_path}: {exc.strerror or exc}")
        return EXIT_IO
    text = report.to_csv(rows, report.CompareRow)
    try:
        if out_path:
            with open(out_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            out.write(text)
        if figure:
            from .plotting import plot_tradeoff

            plot_tradeoff(rows, figure, title=os.path.basename(scenario_path))
    except OSError as exc:
        _err(f"cannot write output: {exc.strerror or exc}")
        return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="layersim", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a scenario and write events/traces/report CSVs")
    p.add_argument("scenario")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--figures", action="store_true", help="also render power.png")

    p = sub.add_parser("energy", help="integrate measured traces over task windows")
    p.add_argument("traces")
    p.add_argument("--windows", required=True, help="CSV of task_id,node_id,start_us,end_us")
    p.add_argument("--max-gap-s", type=float, default=5.0, help="largest tolerated sample gap; 0 disables")

    p = sub.add_parser("compare", help="sweep node counts and emit runtime/energy rows")
    p.add_argument("scenario")
    p.add_argument("--nodes", default="1,2,3", help="comma-separated node counts")
    p.add_argument("--out", help="CSV output file (default: stdout)")
    p.add_argument("--figure", help="render a runtime/energy figure to this path")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args.scenario, args.out, args.figures)
    if args.command == "energy":
        return cmd_energy(args.traces, args.windows, args.max_gap_s)
    try:
        counts = _parse_counts(args.nodes)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INVALID
    return cmd_compare(args.scenario, counts, args.out, args.figure)


if __name__ == "__main__":
    sys.exit(main())
