"""Runtime/speedup model and probe-rate power synthesis."""

from __future__ import annotations

import bisect
from typing import Optional, Sequence, Tuple

import numpy as np

from .energy import PowerSample, PowerTrace
from .model import US_PER_S, NodeSpec, TaskSpec

# Power samples are quantised to the trace CSV precision so that simulated
# traces survive a dump/load round trip bit for bit.
WATTS_DIGITS = 6


def runtime_model(task: TaskSpec, n: int, cores_per_node: Optional[int] = None) -> float:
    """Seconds to run ``task`` spread over ``n`` nodes (Amdahl plus per-node overhead)."""
    if n < 1:
        raise ValueError("node count must be >= 1")
    cores = task.cores_per_node if cores_per_node is None else cores_per_node
    return (
        task.serial_work / cores
        + task.parallel_work / (n * cores)
        + task.per_node_overhead * (n - 1)
    )


def work_rate(task: TaskSpec, n: int) -> float:
    """Core-seconds of task work completed per wall-clock second on ``n`` nodes."""
    return task.total_work / runtime_model(task, n)


def busy_per_node(task: TaskSpec, n: int) -> float:
    """Average busy cores the task keeps on each of its ``n`` nodes."""
    return work_rate(task, n) / n


def probe_period_us(probe_hz: float) -> int:
    if not probe_hz > 0:
        raise ValueError("probe_hz must be > 0")
    return max(1, int(round(US_PER_S / probe_hz)))


def sample_watts(
    node: NodeSpec,
    busy_cores: float,
    rng: Optional[np.random.Generator] = None,
    noise_watts: float = 0.0,
) -> float:
    watts = node.power_model.power(busy_cores)
    if rng is not None and noise_watts > 0:
        watts = max(0.0, watts + float(rng.normal(0.0, noise_watts)))
    return round(watts, WATTS_DIGITS)


def synthesize_power(
    node: NodeSpec,
    busy_steps: Sequence[Tuple[int, float]],
    probe_hz: float,
    end: int,
    start: int = 0,
    rng: Optional[np.random.Generator] = None,
    noise_watts: float = 0.0,
) -> PowerTrace:
    """Sample a node's power every ``1/probe_hz`` from ``start`` through ``end``.

    ``busy_steps`` is a right-continuous step function given as
    ``(timestamp_us, busy_cores)`` change points; before the first point the
    node is idle. The last sample lands on the first probe tick >= ``end``.
    """
    period = probe_period_us(probe_hz)
    times = [t for t, _ in busy_steps]
    samples = []
    t = start
    while True:
        i = bisect.bisect_right(times, t) - 1
        busy = busy_steps[i][1] if i >= 0 else 0.0
        samples.append(PowerSample(t, sample_watts(node, busy, rng, noise_watts)))
        if t >= end:
            break
        t += period
    return PowerTrace(node.node_id, tuple(samples))
