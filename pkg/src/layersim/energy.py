"""Per-node trapezoidal energy accounting over power traces."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from .model import US_PER_S, TaskRecord, us_to_seconds

DEFAULT_MAX_GAP_US = 5 * US_PER_S


class EnergyError(ValueError):
    pass


class WindowNotCovered(EnergyError):
    pass


class MissingTrace(EnergyError):
    def __init__(self, node_id: str):
        super().__init__(f"no power trace for node {node_id!r}")
        self.node_id = node_id


class NoWindows(EnergyError):
    pass


class PowerSample(NamedTuple):
    timestamp: int  # microseconds since scenario epoch
    watts: float


@dataclass(frozen=True)
class PowerTrace:
    node_id: str
    samples: Tuple[PowerSample, ...] = ()

    def __post_init__(self) -> None:
        samples = tuple(PowerSample(int(t), float(w)) for t, w in self.samples)
        for prev, cur in zip(samples, samples[1:]):
            if cur.timestamp <= prev.timestamp:
                raise EnergyError(f"{self.node_id}: timestamps must be strictly increasing")
        for s in samples:
            if not math.isfinite(s.watts) or s.watts < 0:
                raise EnergyError(f"{self.node_id}: invalid watts {s.watts!r} at {s.timestamp}")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def timestamps(self) -> List[int]:
        return [s.timestamp for s in self.samples]

    def span(self) -> Tuple[int, int]:
        if not self.samples:
            raise WindowNotCovered(f"{self.node_id}: empty trace")
        return self.samples[0].timestamp, self.samples[-1].timestamp


@dataclass(frozen=True)
class EnergyReport:
    task_id: str
    per_node: Dict[str, float] = field(default_factory=dict)
    total: float = 0.0

    @classmethod
    def from_per_node(cls, task_id: str, per_node: Mapping[str, float]) -> "EnergyReport":
        ordered = {n: per_node[n] for n in sorted(per_node)}
        return cls(task_id, ordered, sum(ordered.values()))

    @property
    def total_wh(self) -> float:
        return self.total / 3600.0


def _interp(t0: int, w0: float, t1: int, w1: float, t: int) -> float:
    if t == t0:
        return w0
    if t == t1:
        return w1
    return w0 + (w1 - w0) * ((t - t0) / (t1 - t0))


def integrate_trapezoid(
    trace: PowerTrace,
    start: int,
    end: int,
    max_gap_us: Optional[int] = None,
) -> float:
    """Joules drawn by ``trace`` over ``[start, end]`` (microseconds).

    Power between samples is linear; window edges that fall between samples
    are cut at the interpolated value. When ``max_gap_us`` is set, a sample
    gap wider than it inside the window counts as a meter dropout and raises
    WindowNotCovered (pipelines pass DEFAULT_MAX_GAP_US).
    """
    if end < start:
        raise EnergyError(f"window end {end} precedes start {start}")
    if start == end:
        return 0.0
    samples = trace.samples
    if len(samples) < 2 or samples[0].timestamp > start or samples[-1].timestamp < end:
        raise WindowNotCovered(f"{trace.node_id}: trace does not cover [{start}, {end}]")
    times = trace.timestamps
    # segment i spans samples[i]..samples[i+1]
    first = bisect.bisect_right(times, start) - 1
    last = bisect.bisect_left(times, end)
    parts = []
    for i in range(first, last):
        t0, w0 = samples[i]
        t1, w1 = samples[i + 1]
        if max_gap_us is not None and t1 - t0 > max_gap_us:
            raise WindowNotCovered(f"{trace.node_id}: gap of {t1 - t0} us at {t0} exceeds max_gap")
        a, b = max(t0, start), min(t1, end)
        if b <= a:
            continue
        wa = _interp(t0, w0, t1, w1, a)
        wb = _interp(t0, w0, t1, w1, b)
        parts.append((wa + wb) * 0.5 * (b - a))
    return math.fsum(parts) / US_PER_S


def task_energy(
    record: TaskRecord,
    traces: Mapping[str, PowerTrace],
    max_gap_us: Optional[int] = None,
) -> EnergyReport:
    """Sum each node's integrated power over the task's windows on it.

    The whole node draw is attributed to the task, so tasks sharing a node
    are each charged the full power during overlap.
    """
    per_node: Dict[str, float] = {}
    for w in record.windows:
        if w.node_id not in traces:
            raise MissingTrace(w.node_id)
        joules = integrate_trapezoid(traces[w.node_id], w.start, w.end, max_gap_us)
        per_node[w.node_id] = per_node.get(w.node_id, 0.0) + joules
    return EnergyReport.from_per_node(record.task_id, per_node)


def windows_energy(
    task_id: str,
    windows: Iterable[Tuple[str, int, int]],
    traces: Mapping[str, PowerTrace],
    max_gap_us: Optional[int] = None,
) -> EnergyReport:
    """Same as task_energy for bare ``(node_id, start, end)`` tuples."""
    per_node: Dict[str, float] = {}
    for node_id, start, end in windows:
        if node_id not in traces:
            raise MissingTrace(node_id)
        per_node[node_id] = per_node.get(node_id, 0.0) + integrate_trapezoid(
            traces[node_id], start, end, max_gap_us
        )
    return EnergyReport.from_per_node(task_id, per_node)


def makespan(records: Sequence[TaskRecord]) -> float:
    """Seconds from the earliest window start to the latest window end."""
    windows = [w for r in records for w in r.windows]
    if not windows:
        raise NoWindows("no execution windows")
    return us_to_seconds(max(w.end for w in windows) - min(w.start for w in windows))
