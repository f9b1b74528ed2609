"""Builders shared across test modules."""

from layersim.model import RPI3B_POWER, Layer, NodeSpec, TaskSpec


def node(node_id, layer=Layer.FOG, cores=4, memory=1024, security=(), power=RPI3B_POWER, bw=12.5e6):
    return NodeSpec(node_id, layer, cores, memory, frozenset(security), power, bw)


def task(task_id="t", serial=0.0, parallel=300.0, overhead=0.0, memory=0, cores=1,
         security=(), max_nodes=3, state=0, deadline=None):
    return TaskSpec(task_id, serial, parallel, overhead, memory, cores, frozenset(security),
                    max_nodes, state, deadline)


def random_power(rng):
    from layersim.model import PowerModel
    idle = float(rng.uniform(0.5, 5.0))
    per_core = float(rng.uniform(0.1, 2.0))
    return PowerModel(idle, per_core, idle + float(rng.uniform(0.5, 10.0)))


def random_tags(rng):
    from layersim.model import SecurityTag
    return frozenset(t for t in SecurityTag if rng.random() < 0.5)


def random_instance(rng, max_nodes=4):
    """A small random cluster (with some background load) and one task."""
    from layersim.model import Layer, validate_cluster
    count = int(rng.integers(1, max_nodes + 1))
    layers = list(Layer)
    nodes = [
        node(f"n{i}", layer=layers[int(rng.integers(0, 3))], cores=int(rng.integers(1, 9)),
             memory=int(rng.integers(256, 2049)), security=random_tags(rng), power=random_power(rng))
        for i in range(count)
    ]
    cluster = validate_cluster(nodes)
    for n in nodes:
        if rng.random() < 0.4:
            cores = int(rng.integers(0, n.cores))
            cluster.reserve("bg", n.node_id, cores, int(rng.integers(0, 256)), float(rng.uniform(0, cores)))
    t = task(
        serial=float(rng.uniform(0, 100)), parallel=float(rng.uniform(1, 1000)),
        overhead=float(rng.uniform(0, 30)) if rng.random() < 0.5 else 0.0,
        memory=int(rng.integers(0, 512)), cores=int(rng.integers(1, 5)),
        security=random_tags(rng) if rng.random() < 0.3 else (), max_nodes=int(rng.integers(1, 5)),
    )
    return cluster, t


def oracle_score(cluster, t, node_ids, objective):
    """Independent (deficit, primary) score of running ``t`` on ``node_ids``."""
    from layersim.model import Objective
    w = len(node_ids)
    c = t.cores_per_node
    runtime = t.serial_work / c + t.parallel_work / (w * c) + t.per_node_overhead * (w - 1)
    if objective is Objective.MIN_RUNTIME:
        return 0, runtime
    load = (t.serial_work + t.parallel_work) / runtime / w
    watts = 0.0
    for i in node_ids:
        pm = cluster.node(i).power_model
        watts += min(pm.idle_watts + pm.per_core_watts * (cluster.busy(i) + load), pm.cap_watts)
    energy = watts * runtime
    if objective is Objective.MIN_ENERGY:
        return 0, energy
    common = frozenset.intersection(*(cluster.node(i).security for i in node_ids))
    return 2 - len(common), energy


def exhaustive_best(cluster, t, objective):
    """Brute-force optimum over every feasible single-layer node subset, or None."""
    import itertools
    ok = [
        i for i in sorted(cluster.nodes)
        if cluster.free_cores(i) >= t.cores_per_node and cluster.free_memory(i) >= t.memory_demand
        and t.required_security <= cluster.node(i).security
    ]
    best = None
    for w in range(1, min(t.max_nodes, len(ok)) + 1):
        for subset in itertools.combinations(ok, w):
            if len({cluster.node(i).layer for i in subset}) != 1:
                continue
            score = oracle_score(cluster, t, subset, objective)
            if best is None or score < best:
                best = score
    return best


def same_score(a, b, rel=1e-9):
    return a[0] == b[0] and abs(a[1] - b[1]) <= rel * max(abs(a[1]), abs(b[1]), 1e-300)


def scenario(nodes, tasks, strategy="best_fit_cores", **kwargs):
    """Scenario with one strategy for every layer present; ``tasks`` are (arrival, spec, objective)."""
    from layersim.model import Objective
    from layersim.sched import Strategy
    from layersim.sim import Scenario, TaskArrival
    arrivals = []
    for item in tasks:
        arrival, spec, *rest = item
        arrivals.append(TaskArrival(arrival, spec, rest[0] if rest else Objective.MIN_RUNTIME))
    strategies = {n.layer: Strategy(strategy) for n in nodes}
    return Scenario(nodes=list(nodes), layer_strategies=strategies, tasks=arrivals, **kwargs)


def random_scenario(rng, max_nodes=6, max_tasks=5):
    """Mixed-layer scenario with staggered arrivals, for engine-level properties."""
    from layersim.model import Layer, Objective
    layers = list(Layer)
    nodes = [
        node(f"n{i}", layer=layers[int(rng.integers(0, 3))], cores=int(rng.choice([2, 4, 8])),
             memory=int(rng.choice([512, 1024, 4096])), security=random_tags(rng),
             power=random_power(rng), bw=float(rng.choice([1e6, 12.5e6, 1e8])))
        for i in range(int(rng.integers(2, max_nodes + 1)))
    ]
    objectives = list(Objective)
    tasks = []
    for k in range(int(rng.integers(1, max_tasks + 1))):
        spec = task(
            f"t{k}", serial=float(rng.uniform(0, 60)), parallel=float(rng.uniform(10, 400)),
            overhead=float(rng.uniform(0, 5)), memory=int(rng.integers(0, 512)),
            cores=int(rng.choice([1, 2, 4])), security=random_tags(rng) if rng.random() < 0.2 else (),
            max_nodes=int(rng.integers(1, 4)), state=int(rng.choice([0, 10**6, 5 * 10**7])),
            deadline=float(rng.uniform(50, 400)) if rng.random() < 0.2 else None,
        )
        tasks.append((float(rng.integers(0, 60)), spec, objectives[int(rng.integers(0, 3))]))
    strategy = str(rng.choice(["fifo", "best_fit_cores", "energy_greedy"]))
    return scenario(nodes, tasks, strategy, probe_hz=float(rng.choice([1.0, 2.0, 5.0])),
                    seed=int(rng.integers(0, 2**31)), controller_period=float(rng.choice([2.0, 5.0])))
