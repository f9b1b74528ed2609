"""Delimited report rows emitted by the CLI, with matching parsers."""

from __future__ import annotations

import csv
import io
from dataclasses import astuple, dataclass, fields
from typing import Iterable, List, Type, TypeVar

from .sim import SimulationResult
from .telemetry import ParseError

R = TypeVar("R")


@dataclass(frozen=True)
class ReportRow:
    task_id: str
    node_count: int
    runtime_s: float
    energy_j: float
    energy_wh: float
    objective: str
    migrations: int


@dataclass(frozen=True)
class CompareRow:
    n: int
    runtime_s: float
    energy_j: float
    energy_wh: float
    task_energy_j: float


@dataclass(frozen=True)
class EnergyRow:
    task_id: str
    node_id: str
    energy_j: float
    energy_wh: float


TOTAL = "TOTAL"


def _fmt(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def to_csv(rows: Iterable, cls: Type) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f.name for f in fields(cls)])
    for row in rows:
        writer.writerow([_fmt(v) for v in astuple(row)])
    return buf.getvalue()


def from_csv(text: str, cls: Type[R]) -> List[R]:
    names = [f.name for f in fields(cls)]
    types = [f.type for f in fields(cls)]
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != names:
        raise ParseError(1, f"expected header {','.join(names)}")
    out = []
    for lineno, raw in enumerate(reader, start=2):
        if not raw:
            continue
        if len(raw) != len(names):
            raise ParseError(lineno, f"expected {len(names)} fields, got {len(raw)}")
        values = []
        for value, typ in zip(raw, types):
            conv = {"int": int, "float": float}.get(typ if isinstance(typ, str) else typ.__name__, str)
            try:
                values.append(conv(value))
            except ValueError:
                raise ParseError(lineno, f"bad value {value!r}") from None
        out.append(cls(*values))
    return out


def report_rows(result: SimulationResult) -> List[ReportRow]:
    rows = []
    for task_id in sorted(result.records):
        record = result.records[task_id]
        report = result.reports[task_id]
        width = record.placement.width if record.placement is not None else 0
        rows.append(ReportRow(
            task_id=task_id,
            node_count=width,
            runtime_s=result.makespans[task_id],
            energy_j=report.total,
            energy_wh=report.total / 3600.0,
            objective=record.objective.value,
            migrations=record.migrations,
        ))
    return rows


def compare_row(n: int, result: SimulationResult) -> CompareRow:
    energy = result.total_energy()
    return CompareRow(
        n=n,
        runtime_s=result.overall_makespan(),
        energy_j=energy,
        energy_wh=energy / 3600.0,
        task_energy_j=sum(r.total for r in result.reports.values()),
    )
