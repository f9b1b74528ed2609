"""Layer-bounded node selection and the global placement search."""

from __future__ import annotations

import itertools
from enum import Enum
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple

from . import control
from .model import ClusterState, Layer, NodeSpec, Objective, Placement, SecurityTag, TaskSpec
from .workload import busy_per_node, runtime_model

# Relative slack under which two scores count as tied.
TIE_TOLERANCE = 1e-12


class NoCapacity(Exception):
    pass


class Strategy(Enum):
    FIFO = "fifo"
    BEST_FIT_CORES = "best_fit_cores"
    ENERGY_GREEDY = "energy_greedy"

    @classmethod
    def parse(cls, name: str) -> "Strategy":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown strategy {name!r}") from None


def feasible(cluster: ClusterState, node_id: str, task: TaskSpec) -> bool:
    """Free cores, free memory and security tags all satisfy the task."""
    return cluster.can_host(node_id, task)


def _energy_increment(cluster: ClusterState, node: NodeSpec, task: TaskSpec, width: int) -> float:
    pm = node.power_model
    busy = cluster.busy(node.node_id)
    # an unused node is charged its idle draw too; a busy one pays only the delta
    base = pm.power(busy) if cluster.used_cores(node.node_id) > 0 else 0.0
    return pm.power(busy + busy_per_node(task, width)) - base


def place_in_layer(
    task: TaskSpec,
    cluster: ClusterState,
    layer: Layer,
    strategy: Strategy,
    width: int,
) -> Placement:
    if width < 1:
        raise ValueError("width must be >= 1")
    nodes = [n for n in cluster.nodes_in(layer) if feasible(cluster, n.node_id, task)]
    if len(nodes) < width:
        raise NoCapacity(f"{task.task_id}: {len(nodes)} feasible {layer.name} nodes, need {width}")
    if strategy is Strategy.FIFO:
        key = lambda n: n.node_id
    elif strategy is Strategy.BEST_FIT_CORES:
        key = lambda n: (cluster.free_cores(n.node_id) - task.cores_per_node, n.node_id)
    else:
        key = lambda n: (
            _energy_increment(cluster, n, task, width),
            n.power_model.per_core_watts,
            n.node_id,
        )
    chosen = sorted(nodes, key=key)[:width]
    return cluster.placement(task, (n.node_id for n in chosen))


def _cheapest(cluster: ClusterState, nodes: Sequence[NodeSpec], task: TaskSpec, width: int) -> List[str]:
    load = busy_per_node(task, width)
    ranked = sorted(nodes, key=lambda n: (n.power_model.power(cluster.busy(n.node_id) + load), n.node_id))
    return [n.node_id for n in ranked[:width]]


def _better(a: Tuple[float, float], b: Optional[Tuple[float, float]]) -> bool:
    if b is None:
        return True
    if a[0] != b[0]:
        return a[0] < b[0]
    return a[1] < b[1] - TIE_TOLERANCE * abs(b[1])


def _select(
    task: TaskSpec,
    cluster: ClusterState,
    layer: Layer,
    nodes: Sequence[NodeSpec],
    width: int,
    objective: Objective,
    strategy: Strategy,
    remaining: float,
) -> Tuple[Placement, Tuple[float, float]]:
    if objective is Objective.MIN_RUNTIME:
        # every node set of this width ties on runtime; defer to the layer's strategy
        placement = place_in_layer(task, cluster, layer, strategy, width)
        return placement, control.score_parts(placement, task, cluster, objective, remaining)
    if objective is Objective.MIN_ENERGY:
        placement = cluster.placement(task, _cheapest(cluster, nodes, task, width))
        return placement, control.score_parts(placement, task, cluster, objective, remaining)
    best = None
    best_parts = None
    tags = sorted(SecurityTag, key=lambda t: t.value)
    for size in range(len(tags), -1, -1):
        for subset in itertools.combinations(tags, size):
            wanted = frozenset(subset)
            pool = [n for n in nodes if wanted <= n.security]
            if len(pool) < width:
                continue
            placement = cluster.placement(task, _cheapest(cluster, pool, task, width))
            parts = control.score_parts(placement, task, cluster, objective, remaining)
            if _better(parts, best_parts):
                best, best_parts = placement, parts
    assert best is not None and best_parts is not None
    return best, best_parts


def place_global(
    task: TaskSpec,
    cluster: ClusterState,
    objective: Objective,
    strategies: Optional[Mapping[Layer, Strategy]] = None,
    *,
    min_layer: Layer = Layer.EDGE,
    remaining: float = 1.0,
    time_budget: Optional[float] = None,
    widths: Optional[Iterable[int]] = None,
) -> Placement:
    """Best (layer, width) placement for ``task`` under ``objective``.

    Layers are scanned bottom-up and widths smallest-first, so ties resolve
    to the lowest layer and then the narrowest placement. Candidates whose
    predicted remaining runtime exceeds ``time_budget`` seconds are skipped.
    """
    strategies = strategies or {}
    allowed = None if widths is None else set(widths)
    best: Optional[Placement] = None
    best_parts: Optional[Tuple[float, float]] = None
    for layer in Layer:
        if layer < min_layer:
            continue
        nodes = [n for n in cluster.nodes_in(layer) if feasible(cluster, n.node_id, task)]
        for width in range(1, min(task.max_nodes, len(nodes)) + 1):
            if allowed is not None and width not in allowed:
                continue
            if time_budget is not None and remaining * runtime_model(task, width) > time_budget:
                continue
            placement, parts = _select(
                task, cluster, layer, nodes, width, objective,
                strategies.get(layer, Strategy.FIFO), remaining,
            )
            if _better(parts, best_parts):
                best, best_parts = placement, parts
    if best is None:
        raise NoCapacity(f"{task.task_id}: no layer can host the task")
    return best
