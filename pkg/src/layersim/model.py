"""Domain types shared by every other module.

Time is held as integer microseconds throughout; helpers convert to seconds
for reporting.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

US_PER_S = 1_000_000


def seconds_to_us(seconds: float) -> int:
    return int(round(seconds * US_PER_S))


def us_to_seconds(us: int) -> float:
    return us / US_PER_S


class ModelError(ValueError):
    """Base class for invalid domain values."""


class DuplicateNodeId(ModelError):
    pass


class EmptyCluster(ModelError):
    pass


class InvalidPlacement(ModelError):
    pass


class UnknownNode(ModelError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class Layer(IntEnum):
    EDGE = 0
    FOG = 1
    CLOUD = 2

    @classmethod
    def parse(cls, name: str) -> "Layer":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ModelError(f"unknown layer {name!r}") from None


class SecurityTag(Enum):
    SGX = "sgx"
    TRUSTZONE = "trustzone"

    @classmethod
    def parse(cls, name: str) -> "SecurityTag":
        for tag in cls:
            if tag.value == name.lower():
                return tag
        raise ModelError(f"unknown security tag {name!r}")


class Objective(Enum):
    MIN_RUNTIME = "min_runtime"
    MIN_ENERGY = "min_energy"
    MAX_SECURITY = "max_security"

    @classmethod
    def parse(cls, name: str) -> "Objective":
        try:
            return cls(name.lower())
        except ValueError:
            raise ModelError(f"unknown objective {name!r}") from None


class TaskState(Enum):
    PENDING = "pending"
    RUNNING = "running"
    MIGRATING = "migrating"
    DONE = "done"
    FAILED = "failed"


_TRANSITIONS = {
    TaskState.PENDING: {TaskState.RUNNING, TaskState.FAILED},
    TaskState.RUNNING: {TaskState.MIGRATING, TaskState.DONE, TaskState.FAILED},
    TaskState.MIGRATING: {TaskState.RUNNING, TaskState.FAILED},
    TaskState.DONE: set(),
    TaskState.FAILED: set(),
}


def _finite_nonneg(value: float, name: str) -> None:
    if not math.isfinite(value) or value < 0:
        raise ModelError(f"{name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class PowerModel:
    """Linear-in-busy-cores power draw, clamped at a cap (the node TDP)."""

    idle_watts: float
    per_core_watts: float
    cap_watts: float

    def __post_init__(self) -> None:
        _finite_nonneg(self.idle_watts, "idle_watts")
        _finite_nonneg(self.per_core_watts, "per_core_watts")
        _finite_nonneg(self.cap_watts, "cap_watts")
        if self.cap_watts < self.idle_watts:
            raise ModelError("cap_watts must be >= idle_watts")

    def power(self, busy_cores: float) -> float:
        return min(self.idle_watts + self.per_core_watts * busy_cores, self.cap_watts)

    def scaled(self, k: float) -> "PowerModel":
        return PowerModel(self.idle_watts * k, self.per_core_watts * k, self.cap_watts * k)


# Raspberry Pi 3B+ calibration; the 5 W cap is the board TDP.
RPI3B_POWER = PowerModel(idle_watts=1.9, per_core_watts=0.775, cap_watts=5.0)


@dataclass(frozen=True)
class NodeSpec:
    node_id: str
    layer: Layer
    cores: int
    memory: int
    security: FrozenSet[SecurityTag]
    power_model: PowerModel
    net_bandwidth: float  # bytes/s towards the parent layer

    def __post_init__(self) -> None:
        if not self.node_id:
            raise ModelError("node_id must be non-empty")
        if self.cores < 1:
            raise ModelError(f"{self.node_id}: cores must be >= 1")
        if self.memory < 1:
            raise ModelError(f"{self.node_id}: memory must be >= 1")
        if not (self.net_bandwidth > 0 and math.isfinite(self.net_bandwidth)):
            raise ModelError(f"{self.node_id}: net_bandwidth must be > 0")
        object.__setattr__(self, "layer", Layer(self.layer))
        object.__setattr__(self, "security", frozenset(self.security))


@dataclass(frozen=True)
class TaskSpec:
    task_id: str
    serial_work: float  # core-seconds
    parallel_work: float  # core-seconds
    per_node_overhead: float = 0.0  # seconds per extra node
    memory_demand: int = 0  # MiB per node
    cores_per_node: int = 1
    required_security: FrozenSet[SecurityTag] = frozenset()
    max_nodes: int = 1
    state_size: int = 0  # bytes moved on migration
    deadline: Optional[float] = None  # seconds after arrival

    def __post_init__(self) -> None:
        if not self.task_id:
            raise ModelError("task_id must be non-empty")
        _finite_nonneg(self.serial_work, "serial_work")
        _finite_nonneg(self.parallel_work, "parallel_work")
        _finite_nonneg(self.per_node_overhead, "per_node_overhead")
        if self.serial_work + self.parallel_work <= 0:
            raise ModelError(f"{self.task_id}: serial_work + parallel_work must be > 0")
        if self.memory_demand < 0 or self.state_size < 0:
            raise ModelError(f"{self.task_id}: memory_demand and state_size must be >= 0")
        if self.cores_per_node < 1:
            raise ModelError(f"{self.task_id}: cores_per_node must be >= 1")
        if self.max_nodes < 1:
            raise ModelError(f"{self.task_id}: max_nodes must be >= 1")
        if self.deadline is not None and not self.deadline > 0:
            raise ModelError(f"{self.task_id}: deadline must be > 0")
        object.__setattr__(self, "required_security", frozenset(self.required_security))

    @property
    def total_work(self) -> float:
        return self.serial_work + self.parallel_work


@dataclass(frozen=True)
class Placement:
    """A task's node set. Build through ``ClusterState.placement`` to get validation."""

    task_id: str
    node_ids: Tuple[str, ...]
    layer: Layer

    def __post_init__(self) -> None:
        if not self.node_ids:
            raise InvalidPlacement("placement needs at least one node")
        ids = tuple(sorted(set(self.node_ids)))
        if len(ids) != len(self.node_ids):
            raise InvalidPlacement("placement repeats a node")
        object.__setattr__(self, "node_ids", ids)

    @property
    def width(self) -> int:
        return len(self.node_ids)


@dataclass(frozen=True)
class Window:
    """One contiguous stretch of a task on a node.

    ``speed`` is the fraction of a core's throughput each allocated core
    contributes; transfer windows carry speed 0.
    """

    node_id: str
    start: int
    end: int
    cores: float = 0.0
    speed: float = 0.0
    transfer: bool = False

    def __post_init__(self) -> None:
        if self.end < self.start:
            raise ModelError(f"window on {self.node_id} ends before it starts")

    @property
    def work(self) -> float:
        return us_to_seconds(self.end - self.start) * self.cores * self.speed


@dataclass
class TaskRecord:
    spec: TaskSpec
    objective: Objective = Objective.MIN_RUNTIME
    arrival: int = 0
    windows: List[Window] = field(default_factory=list)
    state: TaskState = TaskState.PENDING
    placement: Optional[Placement] = None
    work_done: float = 0.0
    migrations: int = 0

    @property
    def task_id(self) -> str:
        return self.spec.task_id

    @property
    def remaining_fraction(self) -> float:
        left = self.spec.total_work - self.work_done
        return max(left, 0.0) / self.spec.total_work

    def transition(self, new_state: TaskState) -> None:
        if new_state not in _TRANSITIONS[self.state]:
            raise ModelError(f"{self.task_id}: illegal transition {self.state.name} -> {new_state.name}")
        self.state = new_state

    def add_window(self, window: Window) -> None:
        for w in self.windows:
            if w.node_id == window.node_id and w.start < window.end and window.start < w.end:
                raise ModelError(f"{self.task_id}: overlapping windows on {window.node_id}")
        self.windows.append(window)


@dataclass(frozen=True)
class Reservation:
    cores: int
    memory: int
    busy: float


class ClusterState:
    """Node specs plus the live per-task reservations on them."""

    def __init__(self, nodes: Dict[str, NodeSpec]):
        self.nodes = nodes
        self._reservations: Dict[str, Dict[str, Reservation]] = {}

    def copy(self) -> "ClusterState":
        clone = ClusterState(self.nodes)
        clone._reservations = copy.deepcopy(self._reservations)
        return clone

    def node(self, node_id: str) -> NodeSpec:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNode(f"unknown node {node_id!r}") from None

    def nodes_in(self, layer: Layer) -> List[NodeSpec]:
        return sorted((n for n in self.nodes.values() if n.layer == layer), key=lambda n: n.node_id)

    def _sum(self, node_id: str, attr: str) -> float:
        return sum(getattr(r[node_id], attr) for r in self._reservations.values() if node_id in r)

    def used_cores(self, node_id: str) -> int:
        return int(self._sum(node_id, "cores"))

    def used_memory(self, node_id: str) -> int:
        return int(self._sum(node_id, "memory"))

    def busy(self, node_id: str) -> float:
        return self._sum(node_id, "busy")

    def free_cores(self, node_id: str) -> int:
        return self.node(node_id).cores - self.used_cores(node_id)

    def free_memory(self, node_id: str) -> int:
        return self.node(node_id).memory - self.used_memory(node_id)

    def can_host(self, node_id: str, task: TaskSpec) -> bool:
        node = self.node(node_id)
        return (
            self.free_cores(node_id) >= task.cores_per_node
            and self.free_memory(node_id) >= task.memory_demand
            and task.required_security <= node.security
        )

    def placement(self, task: TaskSpec, node_ids: Iterable[str]) -> Placement:
        ids = tuple(node_ids)
        if not ids:
            raise InvalidPlacement(f"{task.task_id}: empty node set")
        if len(set(ids)) > task.max_nodes:
            raise InvalidPlacement(f"{task.task_id}: {len(set(ids))} nodes exceeds max_nodes={task.max_nodes}")
        layers = {self.node(n).layer for n in ids}
        if len(layers) != 1:
            raise InvalidPlacement(f"{task.task_id}: placement spans layers {sorted(l.name for l in layers)}")
        for n in ids:
            if not self.can_host(n, task):
                raise InvalidPlacement(f"{task.task_id}: node {n} cannot host the task")
        return Placement(task.task_id, ids, layers.pop())

    def reserve(self, task_id: str, node_id: str, cores: int, memory: int, busy: float) -> None:
        self.node(node_id)
        self._reservations.setdefault(task_id, {})[node_id] = Reservation(cores, memory, busy)

    def set_busy(self, task_id: str, node_id: str, busy: float) -> None:
        r = self._reservations[task_id][node_id]
        self._reservations[task_id][node_id] = Reservation(r.cores, r.memory, busy)

    def allocate(self, task: TaskSpec, placement: Placement, busy_per_node: float = 0.0) -> None:
        for n in placement.node_ids:
            self.reserve(task.task_id, n, task.cores_per_node, task.memory_demand, busy_per_node)

    def release(self, task_id: str, node_ids: Optional[Iterable[str]] = None) -> None:
        held = self._reservations.get(task_id)
        if held is None:
            return
        for n in list(held) if node_ids is None else node_ids:
            held.pop(n, None)
        if not held:
            del self._reservations[task_id]

    def reserved_nodes(self, task_id: str) -> Tuple[str, ...]:
        return tuple(sorted(self._reservations.get(task_id, {})))


def validate_cluster(nodes: List[NodeSpec]) -> ClusterState:
    if not nodes:
        raise EmptyCluster("cluster needs at least one node")
    index: Dict[str, NodeSpec] = {}
    for node in nodes:
        if node.node_id in index:
            raise DuplicateNodeId(f"duplicate node id {node.node_id!r}")
        index[node.node_id] = node
    return ClusterState(index)
