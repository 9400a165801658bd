"""Precedence-constrained scheduling, unit cost sets.

A candidate family is scheduled layer by layer of the precedence DAG: the
n_l sets of depth l occupy ceil(n_l / m) unit slots on the m machines, idle
slots included, so "scheduled before" is well defined across machines. The
density oracle evaluates d depth-prefix candidates plus one closure
candidate per set and keeps the densest, which is within k^(2/3) of the
optimal precedence-closed density.

The end-to-end driver aligns each greedy iteration at the global maximum
machine end time (an iteration barrier), because a successor on one machine
must wait for predecessors on another. The plain prefix-sum schedule cost
cannot express that idling, so results carry their own barrier-aligned cost.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Optional, Tuple

from .core import (
    Assignment,
    DensityValue,
    ProblemInstance,
    Schedule,
    topological_order,
    validate_instance,
)
from .errors import (
    InvalidIndexError,
    NoCoverageError,
    NotClosedError,
    StalledOracleError,
    UncoverableError,
)


@dataclass(frozen=True)
class PrecedenceDag:
    """DAG over set indices with longest-path depths (depth 1 = source)."""

    num_nodes: int
    edges: Tuple[Tuple[int, int], ...]
    predecessors: Tuple[Tuple[int, ...], ...]
    depth: Tuple[int, ...]
    nodes: Tuple[int, ...]

    @property
    def d(self) -> int:
        return max((self.depth[v] for v in self.nodes), default=0)

    @staticmethod
    def from_edges(num_nodes: int, edges: Iterable[Tuple[int, int]]) -> "PrecedenceDag":
        edges = tuple((int(a), int(b)) for a, b in edges)
        nodes = tuple(range(num_nodes))
        return _build_dag(num_nodes, edges, nodes)

    def induced(self, nodes: Iterable[int]) -> "PrecedenceDag":
        """Sub-DAG on the given nodes, with depths recomputed inside it."""
        keep = frozenset(int(v) for v in nodes)
        for v in keep:
            if not 0 <= v < self.num_nodes:
                raise InvalidIndexError("node %d out of range" % v)
        edges = tuple((a, b) for a, b in self.edges if a in keep and b in keep)
        return _build_dag(self.num_nodes, edges, tuple(sorted(keep)))


def _build_dag(num_nodes, edges, nodes) -> PrecedenceDag:
    order = topological_order(num_nodes, edges)
    node_set = frozenset(nodes)
    preds = [[] for _ in range(num_nodes)]
    for a, b in edges:
        preds[b].append(a)
    depth = [0] * num_nodes
    for v in order:
        if v not in node_set:
            continue
        depth[v] = 1 + max((depth[p] for p in preds[v] if p in node_set), default=0)
    return PrecedenceDag(
        num_nodes=num_nodes,
        edges=edges,
        predecessors=tuple(tuple(sorted(p)) for p in preds),
        depth=tuple(depth),
        nodes=tuple(sorted(nodes)),
    )


def closure(dag: PrecedenceDag, s: int) -> frozenset:
    """All predecessors of s (reflexive-transitive), including s itself."""
    if not 0 <= s < dag.num_nodes:
        raise InvalidIndexError("set index %d out of range" % s)
    node_set = frozenset(dag.nodes)
    if s not in node_set:
        raise InvalidIndexError("set index %d is not part of this DAG view" % s)
    out = set()
    stack = [s]
    while stack:
        v = stack.pop()
        if v in out:
            continue
        out.add(v)
        stack.extend(p for p in dag.predecessors[v] if p in node_set)
    return frozenset(out)


@dataclass(frozen=True)
class LayeredAssignment:
    """Assignment plus the slot structure of its layer-by-layer schedule."""

    assignment: Assignment
    layer_starts: Tuple[int, ...]
    layer_slots: Tuple[int, ...]
    makespan: int


def layered_assign(family: Iterable[int], dag: PrecedenceDag, m: int) -> LayeredAssignment:
    """Spread a precedence-closed family over m machines layer by layer.

    Layer l (sets of equal depth) takes ceil(n_l / m) unit slots; idle slots
    count toward the makespan.
    """
    members = sorted(frozenset(int(s) for s in family))
    node_set = frozenset(dag.nodes)
    fam_set = frozenset(members)
    for s in members:
        if s not in node_set:
            raise InvalidIndexError("set %d is not part of this DAG view" % s)
        for p in dag.predecessors[s]:
            if p in node_set and p not in fam_set:
                raise NotClosedError(
                    "family misses predecessor %d of set %d" % (p, s)
                )
    layers: Dict[int, list] = {}
    for s in members:
        layers.setdefault(dag.depth[s], []).append(s)
    machines = [[] for _ in range(m)]
    starts = []
    slots = []
    clock = 0
    for level in sorted(layers):
        batch = sorted(layers[level])
        width = -(-len(batch) // m)
        starts.append(clock)
        slots.append(width)
        for i, s in enumerate(batch):
            machines[i % m].append(s)
        clock += width
    return LayeredAssignment(
        assignment=Assignment(tuple(tuple(seq) for seq in machines)),
        layer_starts=tuple(starts),
        layer_slots=tuple(slots),
        makespan=clock,
    )


def _finish_times(layered: LayeredAssignment, dag: PrecedenceDag) -> Dict[int, int]:
    """Absolute unit-slot finish time of each set in the layered schedule."""
    levels = sorted(
        {dag.depth[s] for seq in layered.assignment.per_machine for s in seq}
    )
    starts = dict(zip(levels, layered.layer_starts))
    finishes = {}
    for seq in layered.assignment.per_machine:
        position: Dict[int, int] = {}
        for s in seq:
            lvl = dag.depth[s]
            offset = position.get(lvl, 0)
            finishes[s] = starts[lvl] + offset + 1
            position[lvl] = offset + 1
    return finishes


def _candidates(inst, dag_view, remaining, pool):
    """Depth prefixes F_h for h in [d] and one closure F_S per set."""
    out = []
    d = dag_view.d
    for h in range(1, d + 1):
        fam = [s for s in pool if dag_view.depth[s] <= h]
        out.append(fam)
    for s in pool:
        out.append(sorted(closure(dag_view, s)))
    return out


def pcds_detailed(
    inst: ProblemInstance,
    remaining: Iterable[int],
    available: Optional[Iterable[int]] = None,
) -> Tuple[LayeredAssignment, DensityValue, int]:
    """Best candidate with its density and the number of candidates tried."""
    if inst.cost_model.kind != "unit":
        raise ValueError("precedence solver requires the unit cost model")
    if inst.dag is None:
        raise ValueError("instance has no precedence DAG")
    remaining = frozenset(remaining)
    full = PrecedenceDag.from_edges(inst.k, inst.dag)
    pool = sorted(range(inst.k)) if available is None else sorted(available)
    if not any(inst.members[s] & remaining for s in pool):
        raise NoCoverageError("no available set covers a remaining element")
    dag_view = full.induced(pool)

    best = None  # (DensityValue, -makespan... ) track explicitly
    count = 0
    for fam in _candidates(inst, dag_view, remaining, pool):
        count += 1
        if not fam:
            continue
        layered = layered_assign(fam, dag_view, inst.m)
        covered = set()
        for s in fam:
            covered |= inst.members[s] & remaining
        value = DensityValue(len(covered), Fraction(layered.makespan))
        if (
            best is None
            or value > best[1]
            or (value == best[1] and layered.makespan < best[0].makespan)
        ):
            best = (layered, value)
    assert best is not None
    fam_sets = [s for seq in best[0].assignment.per_machine for s in seq]
    for s in fam_sets:
        missing = closure(dag_view, s) - frozenset(fam_sets)
        assert not missing, "winner is not precedence-closed"
    return best[0], best[1], count


def pcds(
    inst: ProblemInstance,
    remaining: Iterable[int],
    available: Optional[Iterable[int]] = None,
) -> Assignment:
    """Densest precedence-closed candidate (guarantee: within k^(2/3) of opt)."""
    layered, _, _ = pcds_detailed(inst, remaining, available=available)
    return layered.assignment


@dataclass(frozen=True)
class PrecedenceIteration:
    layered: LayeredAssignment
    start_time: int
    newly_covered: frozenset
    remaining_before: int


@dataclass(frozen=True)
class PrecedenceTrace:
    iterations: Tuple[PrecedenceIteration, ...]
    cost: int
    cover_times: Tuple[int, ...]


def pmssc_precedence(
    inst: ProblemInstance,
    dag_edges: Optional[Iterable[Tuple[int, int]]] = None,
) -> Tuple[Schedule, PrecedenceTrace]:
    """Greedy driver with the precedence-closed density oracle.

    Iterations are barrier-aligned: every machine starts an iteration at the
    global maximum end time of the previous one, so cross-machine precedence
    holds. The trace carries the barrier-aligned cost; the returned schedule's
    plain prefix-sum cost would understate waiting time.
    """
    if inst.cost_model.kind != "unit":
        raise ValueError("precedence solver requires the unit cost model")
    edges = tuple(dag_edges) if dag_edges is not None else inst.dag
    if edges is None:
        raise ValueError("precedence solver requires a DAG")
    work = ProblemInstance(
        n=inst.n, sets=inst.sets, m=inst.m, cost_model=inst.cost_model, dag=edges
    )
    report = validate_instance(work)
    if not report.coverable:
        raise UncoverableError(
            "elements %s cannot be covered" % list(report.uncovered_elements)
        )
    if report.dag_acyclic is False:
        raise UncoverableError("precedence graph is cyclic")

    full = PrecedenceDag.from_edges(work.k, edges)
    remaining = set(range(work.n))
    available = set(range(work.k))
    machines = [[] for _ in range(work.m)]
    cover_times = [None] * work.n
    iterations = []
    clock = 0
    step = 0
    while remaining:
        if step > work.k + 1:
            raise StalledOracleError("precedence greedy failed to make progress")
        layered, _, _ = pcds_detailed(work, frozenset(remaining), available=frozenset(available))
        dag_view = full.induced(sorted(available))
        finishes = _finish_times(layered, dag_view)
        newly = set()
        for s, finish in finishes.items():
            absolute = clock + finish
            for u in work.members[s]:
                if u in remaining and (cover_times[u] is None or absolute < cover_times[u]):
                    cover_times[u] = absolute
                    newly.add(u)
        if not newly:
            raise StalledOracleError("oracle assignment covers no remaining element")
        for j, seq in enumerate(layered.assignment.per_machine):
            machines[j].extend(seq)
        iterations.append(
            PrecedenceIteration(
                layered=layered,
                start_time=clock,
                newly_covered=frozenset(newly),
                remaining_before=len(remaining),
            )
        )
        remaining -= newly
        for seq in layered.assignment.per_machine:
            available.difference_update(seq)
        clock += layered.makespan
        step += 1
    cost = sum(cover_times)
    schedule = Schedule(tuple(tuple(seq) for seq in machines))
    return schedule, PrecedenceTrace(tuple(iterations), cost, tuple(cover_times))
