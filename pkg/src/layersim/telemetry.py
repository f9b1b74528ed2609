"""Metrics probe storage: per-node power and resource logs plus lifecycle events.

CSV formats
-----------
Power traces: header ``node_id,timestamp_us,watts``; integer timestamps and
watts with at most 6 fraction digits.

Lifecycle events: header ``timestamp_us,task_id,kind,node_ids`` with node ids
joined by ``;``.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
import os
import threading
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Tuple, Union

from .energy import PowerSample, PowerTrace
from .model import UnknownNode

TRACE_HEADER = ("node_id", "timestamp_us", "watts")
EVENT_HEADER = ("timestamp_us", "task_id", "kind", "node_ids")


class TelemetryError(ValueError):
    pass


class NonMonotonicTimestamp(TelemetryError):
    pass


class ParseError(TelemetryError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EventKind(Enum):
    PLACED = "placed"
    STARTED = "started"
    MIGRATION_STARTED = "migration_started"
    MIGRATION_FINISHED = "migration_finished"
    FINISHED = "finished"
    FAILED = "failed"


@dataclass(frozen=True)
class ResourceMetrics:
    timestamp: int
    cpu_busy_cores: float
    memory_used: float
    net_bytes_per_sec: float = 0.0

    def __post_init__(self) -> None:
        for name in ("cpu_busy_cores", "memory_used", "net_bytes_per_sec"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise TelemetryError(f"{name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class LifecycleEvent:
    timestamp: int
    task_id: str
    kind: EventKind
    node_ids: Tuple[str, ...] = ()


def format_watts(watts: float) -> str:
    text = f"{watts:.6f}".rstrip("0")
    return text + "0" if text.endswith(".") else text


class MetricsStore:
    """Append-only per-node logs.

    Appends to one node are serialised by a per-node lock; readers copy a
    consistent prefix under the same lock.
    """

    def __init__(self, node_ids: Iterable[str] = ()):
        self._power: Dict[str, List[PowerSample]] = {}
        self._resources: Dict[str, List[ResourceMetrics]] = {}
        self._locks: Dict[str, threading.Lock] = {}
        self._events: List[LifecycleEvent] = []
        self._events_lock = threading.Lock()
        for node_id in node_ids:
            self.add_node(node_id)

    def add_node(self, node_id: str) -> None:
        if node_id not in self._power:
            self._power[node_id] = []
            self._resources[node_id] = []
            self._locks[node_id] = threading.Lock()

    @property
    def node_ids(self) -> List[str]:
        return sorted(self._power)

    def _lock(self, node_id: str) -> threading.Lock:
        try:
            return self._locks[node_id]
        except KeyError:
            raise UnknownNode(f"unknown node {node_id!r}") from None

    def append_sample(self, node_id: str, sample: PowerSample) -> None:
        sample = PowerSample(int(sample[0]), float(sample[1]))
        if not math.isfinite(sample.watts) or sample.watts < 0:
            raise TelemetryError(f"invalid watts {sample.watts!r}")
        with self._lock(node_id):
            log = self._power[node_id]
            if log and sample.timestamp <= log[-1].timestamp:
                raise NonMonotonicTimestamp(
                    f"{node_id}: timestamp {sample.timestamp} not after {log[-1].timestamp}"
                )
            log.append(sample)

    def append_metrics(self, node_id: str, metrics: ResourceMetrics) -> None:
        with self._lock(node_id):
            log = self._resources[node_id]
            if log and metrics.timestamp <= log[-1].timestamp:
                raise NonMonotonicTimestamp(
                    f"{node_id}: timestamp {metrics.timestamp} not after {log[-1].timestamp}"
                )
            log.append(metrics)

    def record_event(self, event: LifecycleEvent) -> None:
        with self._events_lock:
            self._events.append(event)

    @property
    def events(self) -> List[LifecycleEvent]:
        with self._events_lock:
            return list(self._events)

    def trace(self, node_id: str) -> PowerTrace:
        with self._lock(node_id):
            samples = tuple(self._power[node_id])
        return PowerTrace(node_id, samples)

    def traces(self) -> Dict[str, PowerTrace]:
        return {n: self.trace(n) for n in self.node_ids}

    def recent_metrics(self, node_id: str, count: int) -> List[ResourceMetrics]:
        with self._lock(node_id):
            return list(self._resources[node_id][-count:])

    def query_window(self, node_id: str, start: int, end: int) -> PowerTrace:
        """Samples inside ``[start, end]`` plus one bracketing sample per side.

        The bracketing sample is only added when no sample sits exactly on
        that edge, since integration needs it only to interpolate the cut.
        """
        with self._lock(node_id):
            samples = list(self._power[node_id])
        times = [s.timestamp for s in samples]
        lo = bisect.bisect_left(times, start)
        hi = bisect.bisect_right(times, end)
        if lo > 0 and (lo == len(times) or times[lo] != start):
            lo -= 1
        if hi < len(times) and (hi == 0 or times[hi - 1] != end):
            hi += 1
        return PowerTrace(node_id, tuple(samples[lo:hi]))


PathLike = Union[str, "os.PathLike[str]"]


def traces_to_csv(traces: Mapping[str, PowerTrace]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for node_id in sorted(traces):
        for t, w in traces[node_id].samples:
            writer.writerow((node_id, t, format_watts(w)))
    return buf.getvalue()


def parse_traces_csv(text: str) -> Dict[str, PowerTrace]:
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header is None or tuple(header) != TRACE_HEADER:
        raise ParseError(1, f"expected header {','.join(TRACE_HEADER)}")
    samples: Dict[str, List[PowerSample]] = {}
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError(lineno, f"expected 3 fields, got {len(row)}")
        node_id, ts, watts = row
        if not node_id:
            raise ParseError(lineno, "empty node_id")
        try:
            t = int(ts)
        except ValueError:
            raise ParseError(lineno, f"bad timestamp {ts!r}") from None
        try:
            w = float(watts)
        except ValueError:
            raise ParseError(lineno, f"bad watts {watts!r}") from None
        if not math.isfinite(w) or w < 0:
            raise ParseError(lineno, f"watts must be finite and >= 0, got {watts!r}")
        log = samples.setdefault(node_id, [])
        if log and t <= log[-1].timestamp:
            raise ParseError(lineno, f"timestamp {t} not after {log[-1].timestamp} for {node_id}")
        log.append(PowerSample(t, w))
    return {n: PowerTrace(n, tuple(s)) for n, s in samples.items()}


def load_csv(path: PathLike) -> Dict[str, PowerTrace]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_traces_csv(fh.read())


def dump_csv(store: Union[MetricsStore, Mapping[str, PowerTrace]], path: PathLike) -> None:
    traces = store.traces() if isinstance(store, MetricsStore) else store
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(traces_to_csv(traces))


def events_to_csv(events: Iterable[LifecycleEvent]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(EVENT_HEADER)
    for e in events:
        writer.writerow((e.timestamp, e.task_id, e.kind.value, ";".join(e.node_ids)))
    return buf.getvalue()


def parse_events_csv(text: str) -> List[LifecycleEvent]:
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header is None or tuple(header) != EVENT_HEADER:
        raise ParseError(1, f"expected header {','.join(EVENT_HEADER)}")
    events = []
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise ParseError(lineno, f"expected 4 fields, got {len(row)}")
        try:
            t = int(row[0])
            kind = EventKind(row[2])
        except ValueError as exc:
            raise ParseError(lineno, str(exc)) from None
        nodes = tuple(row[3].split(";")) if row[3] else ()
        events.append(LifecycleEvent(t, row[1], kind, nodes))
    return events


def dump_events_csv(events: Iterable[LifecycleEvent], path: PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(events_to_csv(events))


def load_events_csv(path: PathLike) -> List[LifecycleEvent]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_events_csv(fh.read())
