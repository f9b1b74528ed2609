"""Deterministic discrete-event engine for edge/fog/cloud scenarios.

Events are ordered by ``(time, phase, sequence)``: task events first, then
the controller, then the metrics probe, so a probe tick always observes the
state left by everything else that happened at the same instant.
"""

from __future__ import annotations

import heapq
import itertools
import json
import logging
import math
import os
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from . import control, sched
from .energy import DEFAULT_MAX_GAP_US, EnergyReport, PowerTrace, integrate_trapezoid, makespan, task_energy
from .model import (
    ClusterState,
    Layer,
    ModelError,
    NodeSpec,
    Objective,
    Placement,
    PowerModel,
    SecurityTag,
    TaskRecord,
    TaskSpec,
    TaskState,
    Window,
    seconds_to_us,
    us_to_seconds,
    validate_cluster,
)
from .telemetry import EventKind, LifecycleEvent, MetricsStore, ResourceMetrics, format_watts
from .workload import busy_per_node, probe_period_us, runtime_model, sample_watts, synthesize_power, work_rate

__all__ = [
    "ForcedMigration",
    "Scenario",
    "ScenarioInvalid",
    "SimulationResult",
    "TaskArrival",
    "UnschedulableTask",
    "load_preset",
    "load_scenario",
    "parse_scenario",
    "run",
    "runtime_model",
    "scenario_to_dict",
    "synthesize_power",
]

log = logging.getLogger(__name__)

PRESETS = ("aes", "pagerank")


class ScenarioInvalid(ValueError):
    pass


class UnschedulableTask(Exception):
    def __init__(self, task_id: str, reason: str = ""):
        super().__init__(f"task {task_id!r} cannot be scheduled{': ' + reason if reason else ''}")
        self.task_id = task_id


@dataclass(frozen=True)
class TaskArrival:
    arrival: float  # seconds
    spec: TaskSpec
    objective: Objective = Objective.MIN_RUNTIME


@dataclass
class Scenario:
    nodes: List[NodeSpec]
    layer_strategies: Dict[Layer, sched.Strategy]
    tasks: List[TaskArrival]
    probe_hz: float = 10.0
    seed: int = 0
    controller_period: float = 5.0
    noise_watts: Dict[str, float] = field(default_factory=dict)
    power_model_names: Dict[str, str] = field(default_factory=dict)

    def validate(self) -> ClusterState:
        if not (self.probe_hz > 0 and math.isfinite(self.probe_hz)):
            raise ScenarioInvalid("probe_hz must be > 0")
        if not (self.controller_period > 0 and math.isfinite(self.controller_period)):
            raise ScenarioInvalid("controller_period must be > 0")
        if self.seed < 0:
            raise ScenarioInvalid("seed must be an unsigned integer")
        try:
            cluster = validate_cluster(self.nodes)
        except ModelError as exc:
            raise ScenarioInvalid(str(exc)) from None
        for layer in {n.layer for n in self.nodes}:
            if layer not in self.layer_strategies:
                raise ScenarioInvalid(f"no strategy named for layer {layer.name.lower()}")
        seen = set()
        for t in self.tasks:
            if t.spec.task_id in seen:
                raise ScenarioInvalid(f"duplicate task id {t.spec.task_id!r}")
            seen.add(t.spec.task_id)
            if not (t.arrival >= 0 and math.isfinite(t.arrival)):
                raise ScenarioInvalid(f"{t.spec.task_id}: arrival must be >= 0")
        return cluster

    def pinned(self, width: int) -> "Scenario":
        """Copy with every task's max_nodes set to ``width``."""
        tasks = [replace(t, spec=replace(t.spec, max_nodes=width)) for t in self.tasks]
        return replace(self, tasks=tasks)


@dataclass(frozen=True)
class ForcedMigration:
    """Operator-issued move, applied regardless of the controller's opinion."""

    time: float
    task_id: str
    node_ids: Tuple[str, ...]


@dataclass
class SimulationResult:
    event_log: List[LifecycleEvent]
    traces: Dict[str, PowerTrace]
    reports: Dict[str, EnergyReport]
    makespans: Dict[str, float]
    records: Dict[str, TaskRecord]
    migrations: List[control.MigrationPlan]
    end_time: int
    busy_steps: Dict[str, List[Tuple[int, float]]] = field(default_factory=dict)

    def total_energy(self, node_ids: Optional[Iterable[str]] = None) -> float:
        """Joules drawn by the given nodes (default: all) over the whole run."""
        ids = sorted(self.traces) if node_ids is None else sorted(node_ids)
        total = 0.0
        for n in ids:
            trace = self.traces[n]
            if len(trace) >= 2:
                first, last = trace.span()
                total += integrate_trapezoid(trace, first, last, max_gap_us=None)
        return total

    def overall_makespan(self) -> float:
        records = [r for r in self.records.values() if r.windows]
        return makespan(records) if records else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "end_time_us": self.end_time,
            "events": [
                [e.timestamp, e.task_id, e.kind.value, list(e.node_ids)] for e in self.event_log
            ],
            "traces": {
                n: [[t, format_watts(w)] for t, w in tr.samples] for n, tr in sorted(self.traces.items())
            },
            "reports": {
                k: {"per_node": r.per_node, "total": r.total} for k, r in sorted(self.reports.items())
            },
            "makespans": dict(sorted(self.makespans.items())),
            "windows": {
                k: [[w.node_id, w.start, w.end, w.cores, w.speed, w.transfer] for w in r.windows]
                for k, r in sorted(self.records.items())
            },
            "migrations": [
                [m.task_id, list(m.from_.node_ids), list(m.to.node_ids), m.estimated_gain, m.transfer_seconds]
                for m in self.migrations
            ],
        }

    def serialize(self) -> bytes:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode("utf-8")


# event kinds
_ARRIVAL, _FINISH, _MIGRATION_DONE, _FORCED, _PROBE, _CONTROL = range(6)
_PHASE = {_ARRIVAL: 0, _FINISH: 0, _MIGRATION_DONE: 0, _FORCED: 0, _CONTROL: 1, _PROBE: 2}


class Simulation:
    def __init__(
        self,
        scenario: Scenario,
        horizon_s: float = 0.0,
        pinned_width: Optional[int] = None,
        forced: Sequence[ForcedMigration] = (),
        config: Optional[control.ControlConfig] = None,
    ):
        self.scenario = scenario
        self.cluster = scenario.validate()
        self.empty_cluster = self.cluster.copy()
        self.node_ids = sorted(self.cluster.nodes)
        self.period = probe_period_us(scenario.probe_hz)
        self.horizon = seconds_to_us(horizon_s)
        self.pinned_width = pinned_width
        base = config or control.ControlConfig()
        self.config = replace(base, strategies=dict(scenario.layer_strategies), pinned_width=pinned_width)
        self.controller = control.Controller(self.config)
        self.store = MetricsStore(self.node_ids)
        self.rng = np.random.default_rng(scenario.seed)
        self.records: Dict[str, TaskRecord] = {}
        self.pending: List[str] = []
        self.migrations: List[control.MigrationPlan] = []
        self.busy_steps: Dict[str, List[Tuple[int, float]]] = {n: [(0, 0.0)] for n in self.node_ids}
        self._queue: List[Tuple[int, int, int, int, Any]] = []
        self._seq = itertools.count()
        self._version: Dict[str, int] = {}
        self._segment: Dict[str, Tuple[int, float]] = {}
        self._transfer: Dict[str, Tuple[control.MigrationPlan, int]] = {}
        self._last_task_event = 0
        self.now = 0
        for t in scenario.tasks:
            self.records[t.spec.task_id] = TaskRecord(t.spec, t.objective, seconds_to_us(t.arrival))
            self._push(seconds_to_us(t.arrival), _ARRIVAL, t.spec.task_id)
        for f in forced:
            self._push(seconds_to_us(f.time), _FORCED, f)

    # -- queue -----------------------------------------------------------
    def _push(self, time: int, kind: int, payload: Any) -> None:
        heapq.heappush(self._queue, (time, _PHASE[kind], next(self._seq), kind, payload))

    def _all_terminal(self) -> bool:
        return all(r.state in (TaskState.DONE, TaskState.FAILED) for r in self.records.values())

    def run(self) -> SimulationResult:
        self._push(0, _PROBE, None)
        self._push(0, _CONTROL, None)
        while self._queue:
            time, _, _, kind, payload = heapq.heappop(self._queue)
            self.now = time
            if kind == _PROBE:
                self._probe()
                if not (self._all_terminal() and time >= self._last_task_event and time >= self.horizon):
                    self._push(time + self.period, _PROBE, None)
                else:
                    break
                continue
            if kind == _CONTROL:
                if not self._all_terminal():
                    self._control()
                    self._push(time + seconds_to_us(self.scenario.controller_period), _CONTROL, None)
                continue
            if kind == _FINISH and self._version.get(payload[0]) != payload[1]:
                continue
            self._last_task_event = time
            if kind == _ARRIVAL:
                self._arrive(payload)
            elif kind == _FINISH:
                self._finish(*payload)
            elif kind == _MIGRATION_DONE:
                self._migration_done(*payload)
            elif kind == _FORCED:
                self._force(payload)
            self._record_busy()
        return self._result()

    # -- bookkeeping -----------------------------------------------------
    def _event(self, task_id: str, kind: EventKind, node_ids: Iterable[str] = ()) -> None:
        self.store.record_event(LifecycleEvent(self.now, task_id, kind, tuple(sorted(node_ids))))

    def _record_busy(self) -> None:
        for n in self.node_ids:
            busy = self.cluster.busy(n)
            steps = self.busy_steps[n]
            if steps[-1][0] == self.now:
                steps[-1] = (self.now, busy)
            elif steps[-1][1] != busy:
                steps.append((self.now, busy))

    def _probe(self) -> None:
        for n in self.node_ids:
            node = self.cluster.node(n)
            busy = self.cluster.busy(n)
            watts = sample_watts(node, busy, self.rng, self.scenario.noise_watts.get(n, 0.0))
            self.store.append_sample(n, (self.now, watts))
            net = 0.0
            for plan, transfer_us in self._transfer.values():
                if n in plan.from_.node_ids or n in plan.to.node_ids:
                    spec = self.records[plan.task_id].spec
                    net += spec.state_size / max(us_to_seconds(transfer_us), 1e-9)
            self.store.append_metrics(
                n,
                ResourceMetrics(self.now, min(busy, node.cores), self.cluster.used_memory(n), net),
            )

    def _budget(self, record: TaskRecord) -> Optional[float]:
        if record.spec.deadline is None:
            return None
        return record.spec.deadline - us_to_seconds(self.now - record.arrival)

    # -- task lifecycle --------------------------------------------------
    def _arrive(self, task_id: str) -> None:
        self.pending.append(task_id)
        self._schedule_pending()

    def _place(self, record: TaskRecord, cluster: ClusterState) -> Placement:
        budget = self._budget(record)
        if budget is not None and budget <= 0:
            raise sched.NoCapacity("deadline already passed")
        widths = None if self.pinned_width is None else (self.pinned_width,)
        return sched.place_global(
            record.spec, cluster, record.objective, self.scenario.layer_strategies,
            time_budget=budget, widths=widths,
        )

    def _schedule_pending(self) -> None:
        still = []
        for task_id in self.pending:
            record = self.records[task_id]
            try:
                placement = self._place(record, self.cluster)
            except sched.NoCapacity:
                try:
                    self._place(record, self.empty_cluster)
                except sched.NoCapacity as exc:
                    log.warning("%s", UnschedulableTask(task_id, str(exc)))
                    record.transition(TaskState.FAILED)
                    self._event(task_id, EventKind.FAILED)
                    continue
                still.append(task_id)
                continue
            self.cluster.allocate(record.spec, placement, busy_per_node(record.spec, placement.width))
            record.placement = placement
            record.transition(TaskState.RUNNING)
            self._event(task_id, EventKind.PLACED, placement.node_ids)
            self._event(task_id, EventKind.STARTED, placement.node_ids)
            self.controller.cluster_changed()
            self._start_segment(record)
        self.pending = still

    def _start_segment(self, record: TaskRecord) -> None:
        assert record.placement is not None
        rate = work_rate(record.spec, record.placement.width)
        version = self._version.get(record.task_id, 0) + 1
        self._version[record.task_id] = version
        self._segment[record.task_id] = (self.now, rate)
        left = max(record.spec.total_work - record.work_done, 0.0)
        self._push(self.now + seconds_to_us(left / rate), _FINISH, (record.task_id, version))

    def _close_segment(self, record: TaskRecord) -> None:
        assert record.placement is not None
        start, rate = self._segment.pop(record.task_id)
        n = record.placement.width
        cores = record.spec.cores_per_node
        for node_id in record.placement.node_ids:
            if self.now > start:
                record.add_window(Window(node_id, start, self.now, cores, rate / (n * cores)))
        record.work_done += rate * us_to_seconds(self.now - start)

    def _finish(self, task_id: str, version: int) -> None:
        if self._version.get(task_id) != version:
            return
        record = self.records[task_id]
        if record.state is not TaskState.RUNNING:
            return
        self._close_segment(record)
        record.transition(TaskState.DONE)
        self._event(task_id, EventKind.FINISHED, record.placement.node_ids if record.placement else ())
        self.cluster.release(task_id)
        self.controller.cluster_changed()
        self._schedule_pending()

    # -- migration -------------------------------------------------------
    def _apply(self, plan: control.MigrationPlan) -> None:
        record = self.records[plan.task_id]
        spec = record.spec
        self._close_segment(record)
        self._version[plan.task_id] = self._version.get(plan.task_id, 0) + 1
        record.transition(TaskState.MIGRATING)
        self.cluster.release(spec.task_id)
        for n in plan.to.node_ids:
            self.cluster.reserve(spec.task_id, n, spec.cores_per_node, spec.memory_demand, 1.0)
        for n in set(plan.from_.node_ids) - set(plan.to.node_ids):
            self.cluster.reserve(spec.task_id, n, 1, spec.memory_demand, 1.0)
        transfer_us = seconds_to_us(plan.transfer_seconds)
        if transfer_us > 0:
            for n in sorted(set(plan.from_.node_ids) | set(plan.to.node_ids)):
                record.add_window(Window(n, self.now, self.now + transfer_us, 1.0, 0.0, transfer=True))
        self._transfer[plan.task_id] = (plan, transfer_us)
        self.migrations.append(plan)
        self._event(plan.task_id, EventKind.MIGRATION_STARTED, set(plan.from_.node_ids) | set(plan.to.node_ids))
        self._push(self.now + transfer_us, _MIGRATION_DONE, (plan.task_id, self._version[plan.task_id]))
        self._record_busy()

    def _migration_done(self, task_id: str, version: int) -> None:
        plan, transfer_us = self._transfer.pop(task_id)
        record = self.records[task_id]
        self.cluster.release(task_id, set(plan.from_.node_ids) - set(plan.to.node_ids))
        load = busy_per_node(record.spec, plan.to.width)
        for n in plan.to.node_ids:
            self.cluster.set_busy(task_id, n, load)
        record.placement = plan.to
        record.migrations += 1
        record.transition(TaskState.RUNNING)
        self._event(task_id, EventKind.MIGRATION_FINISHED, plan.to.node_ids)
        self.controller.migration_finished(task_id, self.now, transfer_us)
        self._start_segment(record)
        self._schedule_pending()

    def _force(self, forced: ForcedMigration) -> None:
        record = self.records.get(forced.task_id)
        if record is None or record.state is not TaskState.RUNNING or record.placement is None:
            log.warning("forced migration of %s at %s skipped: task not running", forced.task_id, self.now)
            return
        others = self.cluster.copy()
        others.release(forced.task_id)
        try:
            target = others.placement(record.spec, forced.node_ids)
        except ModelError as exc:
            log.warning("forced migration of %s skipped: %s", forced.task_id, exc)
            return
        if target.node_ids == record.placement.node_ids:
            return
        seconds = control.transfer_seconds(record.spec, record.placement, target, others)
        remaining = record.remaining_fraction
        before = control.estimate_objective(record.placement, record.spec, others, record.objective, remaining)
        after = control.estimate_objective(target, record.spec, others, record.objective, remaining)
        gain = max(0.0, (before - after) / before) if before > 0 else 0.0
        self._apply(control.MigrationPlan(forced.task_id, record.placement, target, gain, seconds))

    def _control(self) -> None:
        snapshot = {n: self.store.recent_metrics(n, self.config.dwell) for n in self.node_ids}
        self.controller.step(self.now, snapshot, self.cluster, list(self.records.values()), self._apply)

    # -- result ----------------------------------------------------------
    def _result(self) -> SimulationResult:
        traces = self.store.traces()
        gap = max(DEFAULT_MAX_GAP_US, 2 * self.period)
        reports: Dict[str, EnergyReport] = {}
        spans: Dict[str, float] = {}
        for task_id in sorted(self.records):
            record = self.records[task_id]
            report = task_energy(record, traces, gap)
            if report.total != sum(report.per_node.values()):
                raise AssertionError(f"{task_id}: energy ledger does not add up")
            reports[task_id] = report
            spans[task_id] = makespan([record]) if record.windows else 0.0
        return SimulationResult(
            event_log=self.store.events,
            traces=traces,
            reports=reports,
            makespans=spans,
            records=self.records,
            migrations=list(self.migrations),
            end_time=self.now,
            busy_steps=self.busy_steps,
        )


def run(
    scenario: Scenario,
    horizon_s: float = 0.0,
    pinned_width: Optional[int] = None,
    forced: Sequence[ForcedMigration] = (),
    config: Optional[control.ControlConfig] = None,
) -> SimulationResult:
    """Simulate ``scenario`` until every task is done or failed.

    The run lasts at least ``horizon_s`` seconds. ``pinned_width`` forces
    every placement and migration to use exactly that many nodes.
    """
    return Simulation(scenario, horizon_s, pinned_width, forced, config).run()


# -- scenario files -------------------------------------------------------

_TOP_KEYS = {"nodes", "strategies", "tasks", "probe_hz", "seed", "controller_period", "power_models"}
_REQUIRED_TOP = {"nodes", "strategies", "tasks", "power_models"}
_POWER_KEYS = {"idle_watts", "per_core_watts", "cap_watts", "noise_watts"}
_NODE_KEYS = {"node_id", "layer", "cores", "memory", "security", "power_model", "net_bandwidth"}
_TASK_KEYS = {
    "task_id", "arrival", "objective", "serial_work", "parallel_work", "per_node_overhead",
    "memory_demand", "cores_per_node", "required_security", "max_nodes", "state_size", "deadline",
}
_TASK_REQUIRED = {"task_id", "serial_work", "parallel_work"}


def _keys(obj: Any, allowed: set, required: set, where: str) -> Mapping[str, Any]:
    if not isinstance(obj, dict):
        raise ScenarioInvalid(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ScenarioInvalid(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ScenarioInvalid(f"{where}: missing keys {sorted(missing)}")
    return obj


def parse_scenario(data: Any) -> Scenario:
    doc = _keys(data, _TOP_KEYS, _REQUIRED_TOP, "scenario")
    try:
        models: Dict[str, PowerModel] = {}
        noise: Dict[str, float] = {}
        for name, pm in doc["power_models"].items():
            pm = _keys(pm, _POWER_KEYS, _POWER_KEYS - {"noise_watts"}, f"power_models.{name}")
            models[name] = PowerModel(float(pm["idle_watts"]), float(pm["per_core_watts"]), float(pm["cap_watts"]))
            noise[name] = float(pm.get("noise_watts", 0.0))
            if noise[name] < 0:
                raise ScenarioInvalid(f"power_models.{name}: noise_watts must be >= 0")
        nodes = []
        node_noise: Dict[str, float] = {}
        model_names: Dict[str, str] = {}
        for i, raw in enumerate(doc["nodes"]):
            nd = _keys(raw, _NODE_KEYS, _NODE_KEYS - {"security"}, f"nodes[{i}]")
            if nd["power_model"] not in models:
                raise ScenarioInvalid(f"nodes[{i}]: unknown power_model {nd['power_model']!r}")
            nodes.append(NodeSpec(
                node_id=str(nd["node_id"]),
                layer=Layer.parse(nd["layer"]),
                cores=int(nd["cores"]),
                memory=int(nd["memory"]),
                security=frozenset(SecurityTag.parse(s) for s in nd.get("security", [])),
                power_model=models[nd["power_model"]],
                net_bandwidth=float(nd["net_bandwidth"]),
            ))
            node_noise[str(nd["node_id"])] = noise[nd["power_model"]]
            model_names[str(nd["node_id"])] = nd["power_model"]
        strategies = {Layer.parse(k): sched.Strategy.parse(v) for k, v in doc["strategies"].items()}
        tasks = []
        for i, raw in enumerate(doc["tasks"]):
            td = _keys(raw, _TASK_KEYS, _TASK_REQUIRED, f"tasks[{i}]")
            spec = TaskSpec(
                task_id=str(td["task_id"]),
                serial_work=float(td["serial_work"]),
                parallel_work=float(td["parallel_work"]),
                per_node_overhead=float(td.get("per_node_overhead", 0.0)),
                memory_demand=int(td.get("memory_demand", 0)),
                cores_per_node=int(td.get("cores_per_node", 1)),
                required_security=frozenset(SecurityTag.parse(s) for s in td.get("required_security", [])),
                max_nodes=int(td.get("max_nodes", 1)),
                state_size=int(td.get("state_size", 0)),
                deadline=None if td.get("deadline") is None else float(td["deadline"]),
            )
            tasks.append(TaskArrival(float(td.get("arrival", 0.0)), spec, Objective.parse(td.get("objective", "min_runtime"))))
        scenario = Scenario(
            nodes=nodes,
            layer_strategies=strategies,
            tasks=tasks,
            probe_hz=float(doc.get("probe_hz", 10.0)),
            seed=int(doc.get("seed", 0)),
            controller_period=float(doc.get("controller_period", 5.0)),
            noise_watts=node_noise,
            power_model_names=model_names,
        )
    except ScenarioInvalid:
        raise
    except (ModelError, ValueError, TypeError, KeyError, AttributeError) as exc:
        raise ScenarioInvalid(str(exc)) from None
    scenario.validate()
    return scenario


def scenario_to_dict(scenario: Scenario) -> Dict[str, Any]:
    models: Dict[str, Dict[str, float]] = {}
    nodes = []
    for node in scenario.nodes:
        name = scenario.power_model_names.get(node.node_id, f"pm_{node.node_id}")
        pm = node.power_model
        models[name] = {
            "idle_watts": pm.idle_watts,
            "per_core_watts": pm.per_core_watts,
            "cap_watts": pm.cap_watts,
            "noise_watts": scenario.noise_watts.get(node.node_id, 0.0),
        }
        nodes.append({
            "node_id": node.node_id,
            "layer": node.layer.name.lower(),
            "cores": node.cores,
            "memory": node.memory,
            "security": sorted(t.value for t in node.security),
            "power_model": name,
            "net_bandwidth": node.net_bandwidth,
        })
    tasks = []
    for t in scenario.tasks:
        s = t.spec
        tasks.append({
            "task_id": s.task_id,
            "arrival": t.arrival,
            "objective": t.objective.value,
            "serial_work": s.serial_work,
            "parallel_work": s.parallel_work,
            "per_node_overhead": s.per_node_overhead,
            "memory_demand": s.memory_demand,
            "cores_per_node": s.cores_per_node,
            "required_security": sorted(x.value for x in s.required_security),
            "max_nodes": s.max_nodes,
            "state_size": s.state_size,
            "deadline": s.deadline,
        })
    return {
        "probe_hz": scenario.probe_hz,
        "seed": scenario.seed,
        "controller_period": scenario.controller_period,
        "power_models": models,
        "nodes": nodes,
        "strategies": {l.name.lower(): s.value for l, s in sorted(scenario.layer_strategies.items())},
        "tasks": tasks,
    }


def load_scenario(path: Union[str, "os.PathLike[str]"]) -> Scenario:
    """Read a JSON scenario file. Raises OSError for I/O, ScenarioInvalid for content."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioInvalid(f"{path}: {exc}") from None
    return parse_scenario(data)


def load_preset(name: str) -> Scenario:
    if name not in PRESETS:
        raise ScenarioInvalid(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    text = resources.files("layersim.presets").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return parse_scenario(json.loads(text))
