"""Metrics analyzer, migration manager and the controller loop state."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from . import sched
from .model import (
    ClusterState,
    Layer,
    ModelError,
    Objective,
    Placement,
    SecurityTag,
    TaskRecord,
    TaskSpec,
    TaskState,
    us_to_seconds,
)
from .telemetry import ResourceMetrics
from .workload import busy_per_node, runtime_model

MAX_TAG_COUNT = len(SecurityTag)
# Weight of one missing security tag in the composite MaxSecurity score.
SECURITY_STEP = 1e12


class InfeasiblePlacement(ModelError):
    pass


class TaskNotRunning(ModelError):
    pass


class TriggerKind(Enum):
    NODE_OVERLOADED = "node_overloaded"
    NODE_IDLE = "node_idle"
    DEADLINE_AT_RISK = "deadline_at_risk"
    BETTER_PLACEMENT_AVAILABLE = "better_placement_available"


_TASK_TRIGGERS = (TriggerKind.DEADLINE_AT_RISK, TriggerKind.BETTER_PLACEMENT_AVAILABLE)


@dataclass(frozen=True)
class Trigger:
    kind: TriggerKind
    timestamp: int
    task_id: Optional[str] = None
    node_id: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind in _TASK_TRIGGERS and self.task_id is None:
            raise ValueError(f"{self.kind.value} trigger needs a task_id")


@dataclass(frozen=True)
class MigrationPlan:
    task_id: str
    from_: Placement
    to: Placement
    estimated_gain: float
    transfer_seconds: float

    def __post_init__(self) -> None:
        if self.to.node_ids == self.from_.node_ids:
            raise ValueError("migration must change the node set")


@dataclass(frozen=True)
class ControlConfig:
    hysteresis: float = 0.10
    cooldown_factor: float = 2.0
    overload_threshold: float = 0.9
    idle_threshold: float = 0.1
    dwell: int = 3
    strategies: Mapping[Layer, "sched.Strategy"] = field(default_factory=dict)
    pinned_width: Optional[int] = None

    @property
    def widths(self) -> Optional[Tuple[int, ...]]:
        return None if self.pinned_width is None else (self.pinned_width,)


def _check_feasible(placement: Placement, task: TaskSpec, cluster: ClusterState) -> None:
    try:
        rebuilt = cluster.placement(task, placement.node_ids)
    except ModelError as exc:
        raise InfeasiblePlacement(str(exc)) from None
    if rebuilt.layer != placement.layer:
        raise InfeasiblePlacement(f"{task.task_id}: placement layer mismatch")


def predicted_energy(placement: Placement, task: TaskSpec, cluster: ClusterState, remaining: float = 1.0) -> float:
    """Constant-power prediction: each node at its busy power for the whole run."""
    n = placement.width
    load = busy_per_node(task, n)
    watts = sum(cluster.node(i).power_model.power(cluster.busy(i) + load) for i in placement.node_ids)
    return watts * remaining * runtime_model(task, n)


def security_deficit(placement: Placement, cluster: ClusterState) -> int:
    common = frozenset.intersection(*(cluster.node(i).security for i in placement.node_ids))
    return MAX_TAG_COUNT - len(common)


def score_parts(
    placement: Placement,
    task: TaskSpec,
    cluster: ClusterState,
    objective: Objective,
    remaining: float = 1.0,
) -> Tuple[float, float]:
    """(security deficit, primary score); the deficit is 0 outside MaxSecurity."""
    _check_feasible(placement, task, cluster)
    if objective is Objective.MIN_RUNTIME:
        return 0.0, remaining * runtime_model(task, placement.width)
    energy = predicted_energy(placement, task, cluster, remaining)
    if objective is Objective.MIN_ENERGY:
        return 0.0, energy
    return float(security_deficit(placement, cluster)), energy


def estimate_objective(
    placement: Placement,
    task: TaskSpec,
    cluster: ClusterState,
    objective: Objective,
    remaining: float = 1.0,
) -> float:
    """Score of ``placement`` (lower is better).

    ``remaining`` is the fraction of the task's work still to do. MaxSecurity
    encodes (missing tags, predicted energy) as ``deficit * SECURITY_STEP + energy``.
    """
    deficit, primary = score_parts(placement, task, cluster, objective, remaining)
    return deficit * SECURITY_STEP + primary


def transfer_seconds(task: TaskSpec, a: Placement, b: Placement, cluster: ClusterState) -> float:
    path = set(a.node_ids) | set(b.node_ids)
    bandwidth = min(cluster.node(n).net_bandwidth for n in path)
    return task.state_size / bandwidth


def _migration_cost(
    task: TaskSpec, a: Placement, b: Placement, cluster: ClusterState, objective: Objective, seconds: float
) -> float:
    if objective is Objective.MIN_RUNTIME:
        return seconds
    # one core busy on every node touched by the copy
    path = sorted(set(a.node_ids) | set(b.node_ids))
    return seconds * sum(cluster.node(n).power_model.power(cluster.busy(n) + 1) for n in path)


def _time_budget(record: TaskRecord, now: int) -> Optional[float]:
    if record.spec.deadline is None:
        return None
    return max(0.0, record.spec.deadline - us_to_seconds(now - record.arrival))


def evaluate_migration(
    record: TaskRecord,
    cluster: ClusterState,
    objective: Objective,
    now: int,
    config: ControlConfig,
    min_layer: Layer = Layer.EDGE,
) -> Tuple[Optional[Placement], float, float]:
    """Best destination for a running task and its net relative gain.

    Returns ``(candidate, gain, transfer_seconds)``; ``candidate`` is None
    when nothing feasible differs from the current placement.
    """
    current = record.placement
    assert current is not None
    task = record.spec
    others = cluster.copy()
    others.release(task.task_id)
    remaining = record.remaining_fraction
    try:
        candidate = sched.place_global(
            task, others, objective, config.strategies,
            min_layer=min_layer, remaining=remaining,
            time_budget=_time_budget(record, now), widths=config.widths,
        )
    except sched.NoCapacity:
        return None, 0.0, 0.0
    if candidate.node_ids == current.node_ids:
        return None, 0.0, 0.0
    base = estimate_objective(current, task, others, objective, remaining)
    if base <= 0:
        return None, 0.0, 0.0
    seconds = transfer_seconds(task, current, candidate, others)
    new = estimate_objective(candidate, task, others, objective, remaining)
    new += _migration_cost(task, current, candidate, others, objective, seconds)
    return candidate, (base - new) / base, seconds


def analyze(
    snapshot: Mapping[str, Sequence[ResourceMetrics]],
    cluster: ClusterState,
    tasks: Sequence[TaskRecord],
    now: int,
    config: ControlConfig = ControlConfig(),
) -> List[Trigger]:
    """Evaluate the four trigger predicates against a metrics snapshot.

    ``snapshot`` maps node ids to their most recent resource samples, oldest
    first; only the last ``config.dwell`` entries are considered.
    """
    triggers: List[Trigger] = []
    running = sorted((r for r in tasks if r.state is TaskState.RUNNING), key=lambda r: r.task_id)
    for node_id in sorted(snapshot):
        recent = list(snapshot[node_id])[-config.dwell:]
        if len(recent) < config.dwell:
            continue
        cores = cluster.node(node_id).cores
        utils = [m.cpu_busy_cores / cores for m in recent]
        if all(u > config.overload_threshold for u in utils):
            triggers.append(Trigger(TriggerKind.NODE_OVERLOADED, now, node_id=node_id))
        elif running and all(u < config.idle_threshold for u in utils):
            triggers.append(Trigger(TriggerKind.NODE_IDLE, now, node_id=node_id))
    for record in running:
        spec = record.spec
        if spec.deadline is not None and record.placement is not None:
            finish = us_to_seconds(now - record.arrival) + record.remaining_fraction * runtime_model(
                spec, record.placement.width
            )
            if finish > spec.deadline:
                triggers.append(Trigger(TriggerKind.DEADLINE_AT_RISK, now, task_id=record.task_id))
        candidate, gain, _ = evaluate_migration(record, cluster, record.objective, now, config)
        if candidate is not None and gain >= config.hysteresis:
            triggers.append(Trigger(TriggerKind.BETTER_PLACEMENT_AVAILABLE, now, task_id=record.task_id))
    return triggers


def plan_migration(
    trigger: Trigger,
    record: TaskRecord,
    cluster: ClusterState,
    objective: Optional[Objective] = None,
    now: int = 0,
    config: ControlConfig = ControlConfig(),
) -> Optional[MigrationPlan]:
    """Propose moving ``record`` if the best destination clears the hysteresis.

    Deadline triggers always optimise runtime. Overload triggers only look at
    the overloaded node's layer and above.
    """
    if record.state is not TaskState.RUNNING or record.placement is None:
        raise TaskNotRunning(f"{record.task_id} is {record.state.value}")
    objective = record.objective if objective is None else objective
    min_layer = Layer.EDGE
    if trigger.kind is TriggerKind.DEADLINE_AT_RISK:
        objective = Objective.MIN_RUNTIME
    elif trigger.kind is TriggerKind.NODE_OVERLOADED and trigger.node_id is not None:
        min_layer = cluster.node(trigger.node_id).layer
    candidate, gain, seconds = evaluate_migration(record, cluster, objective, now, config, min_layer)
    if candidate is None or gain < config.hysteresis:
        return None
    return MigrationPlan(record.task_id, record.placement, candidate, gain, seconds)


_PRIORITY = {
    TriggerKind.DEADLINE_AT_RISK: 0,
    TriggerKind.BETTER_PLACEMENT_AVAILABLE: 1,
    TriggerKind.NODE_OVERLOADED: 2,
}


class Controller:
    """One analyze -> plan cycle at a time, with cooldown and a settle guard.

    A task that has migrated is left alone until the cluster changes again
    (an arrival, departure or someone else's migration), so stationary
    conditions never move a task twice.
    """

    def __init__(self, config: ControlConfig = ControlConfig()):
        self.config = config
        self.epoch = 0
        self._settled_at: Dict[str, int] = {}
        self._cooldown_until: Dict[str, int] = {}

    def cluster_changed(self) -> None:
        self.epoch += 1

    def migration_finished(self, task_id: str, now: int, transfer_us: int) -> None:
        self.cluster_changed()
        self._settled_at[task_id] = self.epoch
        self._cooldown_until[task_id] = now + int(round(self.config.cooldown_factor * transfer_us))

    def eligible(self, task_id: str, now: int) -> bool:
        if self._settled_at.get(task_id) == self.epoch:
            return False
        return now >= self._cooldown_until.get(task_id, 0)

    def step(
        self,
        now: int,
        snapshot: Mapping[str, Sequence[ResourceMetrics]],
        cluster: ClusterState,
        tasks: Sequence[TaskRecord],
        apply: Callable[[MigrationPlan], None],
    ) -> Tuple[List[Trigger], List[MigrationPlan]]:
        """Run one cycle; ``apply`` must commit each plan to ``cluster`` before returning."""
        triggers = analyze(snapshot, cluster, tasks, now, self.config)
        plans: List[MigrationPlan] = []
        for record in sorted(tasks, key=lambda r: r.task_id):
            if record.state is not TaskState.RUNNING or record.placement is None:
                continue
            if not self.eligible(record.task_id, now):
                continue
            mine = [
                t for t in triggers
                if t.task_id == record.task_id
                or (t.kind is TriggerKind.NODE_OVERLOADED and t.node_id in record.placement.node_ids)
            ]
            for trig in sorted(mine, key=lambda t: (_PRIORITY[t.kind], t.node_id or "")):
                plan = plan_migration(trig, record, cluster, now=now, config=self.config)
                if plan is not None:
                    plans.append(plan)
                    apply(plan)
                    break
        return triggers, plans
