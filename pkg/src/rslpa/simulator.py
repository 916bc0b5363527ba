"""Deterministic in-process superstep harness with message accounting.

Workers are logical: vertices partition by ``id mod k``, cross-worker
effects apply at barriers, and messages are counted rather than
transported.  Because every random draw is a pure function of its context,
any worker count produces bit-identical states; what changes is only the
inter-worker share of the message counts.  This is enough to check the
communication claims exactly: two logical messages per active vertex per
propagation iteration (request + label), 2|E| per baseline iteration (one
label per directed edge), and O(log d) rounds for component finding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import LabelState, initialize, propagate_iteration
from .errors import RslpaError
from .graph import Graph
from .incremental import UpdateHooks, UpdateMetrics, correction_propagate
from .postprocess import WeightedEdgeSet
from .rng import PICK, RngStream
from .slpa import MemoryState, slpa_run


@dataclass(frozen=True)
class Cluster:
    """Worker count plus the id-mod-k partition rule."""

    workers: int

    def __post_init__(self):
        if self.workers < 1:
            raise RslpaError("need at least one worker")

    def worker_of(self, v: int) -> int:
        return v % self.workers


@dataclass
class RoundMetrics:
    """Message accounting for one superstep round."""

    round: int
    kind: str
    logical: int = 0
    inter_worker: int = 0
    by_class: dict[str, int] = field(default_factory=dict)

    def count(self, payload_class: str, crosses: bool, n: int = 1):
        self.logical += n
        if crosses:
            self.inter_worker += n
        self.by_class[payload_class] = self.by_class.get(payload_class, 0) + n


def sim_run_rslpa(
    g: Graph, T: int, seed: int, workers: int = 1
) -> tuple[LabelState, list[RoundMetrics]]:
    """Propagation under the superstep harness.

    The state is bit-identical to ``engine.run`` for any worker count; the
    metrics count one (src, pos) request and one label response per active
    vertex per iteration.
    """
    cluster = Cluster(workers)
    state = initialize(g, seed)
    rng = RngStream(seed)
    metrics: list[RoundMetrics] = []
    for t in range(1, T + 1):
        rm = RoundMetrics(round=t, kind="propagation")
        for i in state.active:
            lo, _ = rng.halves(PICK, 0, i, t)
            adj = g.adjacency[i]
            src = adj[lo % len(adj)]
            crosses = cluster.worker_of(i) != cluster.worker_of(src)
            rm.count("label-request", crosses)
            rm.count("label-response", crosses)
        propagate_iteration(state, g, t, rng)
        metrics.append(rm)
    return state, metrics


def sim_run_slpa(
    g: Graph, T: int, seed: int, workers: int = 1
) -> tuple[MemoryState, list[RoundMetrics]]:
    """Baseline run plus its per-iteration message counts (one per directed edge)."""
    cluster = Cluster(workers)
    state = slpa_run(g, T, seed)
    metrics = []
    for t in range(1, T + 1):
        rm = RoundMetrics(round=t, kind="slpa")
        for i in g.active_vertices:
            wi = cluster.worker_of(i)
            for j in g.adjacency[i]:
                rm.count("slpa-label", wi != cluster.worker_of(j))
        metrics.append(rm)
    return state, metrics


class _AccountingHooks(UpdateHooks):
    def __init__(self, cluster: Cluster):
        self.cluster = cluster
        self.rounds: list[RoundMetrics] = []
        self.classification = RoundMetrics(round=0, kind="classification")

    def on_classification(self, requests, removals, responses):
        w = self.cluster.worker_of
        for i, _t, src in requests:
            self.classification.count("label-request", w(i) != w(src))
        for i, _t, old_src in removals:
            self.classification.count("record-removal", w(i) != w(old_src))
        for src, i, _t, _val in responses:
            self.classification.count("label-response", w(src) != w(i))

    def on_wave(self, wave, deliveries):
        rm = RoundMetrics(round=wave, kind="correction-wave")
        w = self.cluster.worker_of
        for sender, tar, _k, _val in deliveries:
            rm.count("correction", w(sender) != w(tar))
        self.rounds.append(rm)


def sim_run_update(
    state: LabelState,
    new_graph: Graph,
    deltas,
    seed: int,
    workers: int = 1,
) -> tuple[LabelState, UpdateMetrics, list[RoundMetrics]]:
    """Correction propagation under the superstep harness.

    Wraps the library engine with accounting hooks, so the result is
    bit-identical to ``correction_propagate`` under the same seed.
    """
    hooks = _AccountingHooks(Cluster(workers))
    state, update_metrics = correction_propagate(
        state, new_graph, deltas, RngStream(seed), hooks=hooks
    )
    return state, update_metrics, [hooks.classification] + hooks.rounds


def sim_connected_components(
    g: Graph, w: WeightedEdgeSet, tau: float, workers: int = 1
) -> tuple[list[frozenset[int]], frozenset[int], int, list[RoundMetrics]]:
    """Min-label hooking with pointer halving over the tau-filtered graph.

    Every vertex carries a parent label.  Each round, synchronously: each
    vertex halves its pointer (adopts its grandparent), adopts the smaller
    grandparent across each filtered edge, and offers its grandparent to
    the other endpoint's grandparent (so trees hook onto smaller roots).
    The minimum id therefore spreads by doubling, converging in O(log d)
    rounds to a star per component, labeled by the component's smallest
    vertex.  Returns components of size >= 2 (sorted by smallest member),
    the isolated vertices, the number of rounds that changed anything, and
    the per-round metrics.  The partition agrees exactly with the
    sequential union-find.
    """
    cluster = Cluster(workers)
    directed: list[tuple[int, int]] = []
    for (u, v), weight in w.items():
        if weight >= tau:
            directed.append((u, v))
            directed.append((v, u))
    parent = {v: v for v in g.active_vertices}
    metrics: list[RoundMetrics] = []
    rounds = 0
    while True:
        rm = RoundMetrics(round=rounds + 1, kind="components")
        worker_of = cluster.worker_of
        # pointer halving: every vertex asks its parent for its parent
        grand = {}
        for v, p in parent.items():
            grand[v] = parent[p]
            rm.count("pointer-jump", worker_of(v) != worker_of(p), 2)
        new = {v: min(parent[v], gp) for v, gp in grand.items()}
        for u, v in directed:
            gv = grand[v]
            # neighbor's grandparent -> me
            rm.count("component-min", worker_of(v) != worker_of(u))
            if gv < new[u]:
                new[u] = gv
            # neighbor's grandparent -> my grandparent (tree hooking)
            tgt = grand[u]
            rm.count("component-min", worker_of(v) != worker_of(tgt))
            if gv < new[tgt]:
                new[tgt] = gv
        if new == parent:
            break
        parent = new
        rounds += 1
        metrics.append(rm)

    # at the fixpoint every vertex points at its component's minimum id
    groups: dict[int, list[int]] = {}
    for v, c in parent.items():
        groups.setdefault(c, []).append(v)
    comps = sorted((frozenset(m) for m in groups.values() if len(m) >= 2), key=min)
    isolated = frozenset(v for v, c in parent.items() if len(groups[c]) < 2)
    return comps, isolated, rounds, metrics
