"""Community extraction from label sequences.

Pipeline: similarity weight per edge, automatic threshold selection
(tau2 = weakest best-edge over vertices, tau1 = entropy-maximizing scan),
connected components above tau1, then weak attachment of leftover vertices
whose best edges clear tau2.  Weak attachment is what produces overlap.
"""

from __future__ import annotations

import math
from collections import Counter

from .errors import RslpaError
from .graph import Graph, norm_pair


class Cover:
    """A set of possibly-overlapping communities (vertex sets).

    Communities are stored in canonical order: by smallest member, then by
    the full sorted member tuple.  ``membership`` maps a vertex to the set
    of community indices containing it.  ``unassigned`` records active
    vertices an extraction left without any community (see extract_cover).
    """

    __slots__ = ("communities", "membership", "unassigned")

    def __init__(self, communities, unassigned=()):
        canon = sorted(
            (tuple(sorted(c)) for c in communities if c),
            key=lambda t: (t[0], t),
        )
        # Exact duplicates (possible after weak attachment) are collapsed.
        deduped: list[tuple[int, ...]] = []
        for c in canon:
            if not deduped or deduped[-1] != c:
                deduped.append(c)
        self.communities: tuple[frozenset[int], ...] = tuple(
            frozenset(c) for c in deduped
        )
        membership: dict[int, set[int]] = {}
        for idx, comm in enumerate(self.communities):
            for v in comm:
                membership.setdefault(v, set()).add(idx)
        self.membership = {v: frozenset(ids) for v, ids in membership.items()}
        self.unassigned = frozenset(unassigned)

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.membership)

    def __len__(self):
        return len(self.communities)

    def __iter__(self):
        return iter(self.communities)

    def __eq__(self, other):
        return isinstance(other, Cover) and self.communities == other.communities

    def __repr__(self):
        sizes = sorted((len(c) for c in self.communities), reverse=True)
        return f"Cover({len(self.communities)} communities, sizes={sizes[:8]})"


class WeightedEdgeSet:
    """Symmetric edge weights in [0, 1], defined exactly on current edges."""

    __slots__ = ("_w",)

    def __init__(self, weights: dict[tuple[int, int], float]):
        self._w = weights

    def get(self, u: int, v: int) -> float:
        return self._w[norm_pair(u, v)]

    def items(self):
        return self._w.items()

    def __len__(self):
        return len(self._w)

    def max_weight(self) -> float:
        return max(self._w.values())


def edge_similarity(seq_i, seq_j) -> float:
    """Probability that independent uniform draws from the two sequences agree."""
    if not seq_i or not seq_j:
        raise RslpaError("edge_similarity needs non-empty sequences")
    f_i = Counter(seq_i)
    f_j = Counter(seq_j)
    if len(f_j) < len(f_i):
        f_i, f_j = f_j, f_i
    hits = sum(c * f_j[l] for l, c in f_i.items() if l in f_j)
    return hits / (len(seq_i) * len(seq_j))


def compute_weights(g: Graph, state) -> WeightedEdgeSet:
    """Similarity weight for every edge of ``g`` from the state's sequences."""
    counts = {v: Counter(state.labels[v]) for v in g.active_vertices}
    lengths = {v: len(state.labels[v]) for v in g.active_vertices}
    weights = {}
    for u, v in g.edges():
        f_i, f_j = counts[u], counts[v]
        if len(f_j) < len(f_i):
            f_i, f_j = f_j, f_i
        hits = sum(c * f_j[l] for l, c in f_i.items() if l in f_j)
        weights[(u, v)] = hits / (lengths[u] * lengths[v])
    return WeightedEdgeSet(weights)


def select_tau2(w: WeightedEdgeSet) -> float:
    """Weak threshold: the minimum over vertices of their best incident weight."""
    best: dict[int, float] = {}
    for (u, v), weight in w.items():
        if weight > best.get(u, -1.0):
            best[u] = weight
        if weight > best.get(v, -1.0):
            best[v] = weight
    if not best:
        raise RslpaError("select_tau2 needs at least one edge")
    return min(best.values())


class UnionFind:
    """Array-free union-find over arbitrary hashable items, by size."""

    __slots__ = ("parent", "size")

    def __init__(self):
        self.parent: dict = {}
        self.size: dict = {}

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1

    def find(self, x):
        root = x
        parent = self.parent
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:  # path compression
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def groups(self) -> list[frozenset]:
        by_root: dict = {}
        for x in self.parent:
            by_root.setdefault(self.find(x), []).append(x)
        return [frozenset(g) for g in by_root.values()]


def components_above(
    g: Graph, w: WeightedEdgeSet, tau: float
) -> tuple[list[frozenset[int]], frozenset[int]]:
    """Components of the subgraph keeping edges with weight >= tau.

    Only vertices of degree >= 1 in ``g`` participate.  Components with at
    least two vertices are returned sorted by smallest member; singletons
    are reported as isolated.
    """
    uf = UnionFind()
    for v in g.active_vertices:
        uf.add(v)
    for (u, v), weight in w.items():
        if weight >= tau:
            uf.union(u, v)
    comps = [c for c in uf.groups() if len(c) >= 2]
    comps.sort(key=min)
    isolated = frozenset(g.active_vertices) - frozenset().union(*comps) if comps else frozenset(g.active_vertices)
    return comps, isolated


def size_entropy(sizes, vertex_count: int) -> float:
    """Entropy of community sizes relative to the graph size (natural log)."""
    total = 0.0
    for s in sizes:
        if s <= 0:
            continue
        p = s / vertex_count
        total -= p * math.log(p)
    return total


def select_tau1(g: Graph, w: WeightedEdgeSet, tau2: float, step: float = 0.001) -> float:
    """Scan tau in {tau2, tau2+step, ..., max weight} and return the smallest
    value maximizing the size entropy of the extracted components.

    The scan sweeps descending with an incremental union-find (edges only
    ever enter as tau drops), so the whole thing is O(E alpha + grid).
    """
    if step <= 0:
        raise RslpaError("scan step must be positive")
    max_w = w.max_weight()
    grid = []
    k = 0
    while True:
        tau = tau2 + k * step
        if tau > max_w + 1e-12:
            break
        grid.append(tau)
        k += 1
    if not grid or grid[-1] < max_w - 1e-12:
        grid.append(max_w)

    edges_desc = sorted(w.items(), key=lambda kv: -kv[1])
    n_active = len(g.active_vertices)
    uf = UnionFind()
    for v in g.active_vertices:
        uf.add(v)
    # Multiset of component sizes, maintained incrementally.
    size_counts = Counter({1: n_active})

    best_tau = grid[-1]
    best_entropy = -1.0
    edge_idx = 0
    for tau in reversed(grid):
        while edge_idx < len(edges_desc) and edges_desc[edge_idx][1] >= tau:
            (u, v), _ = edges_desc[edge_idx]
            edge_idx += 1
            ru, rv = uf.find(u), uf.find(v)
            if ru == rv:
                continue
            su, sv = uf.size[ru], uf.size[rv]
            uf.union(ru, rv)
            size_counts[su] -= 1
            size_counts[sv] -= 1
            size_counts[su + sv] += 1
        sizes = sorted(
            (s for s, cnt in size_counts.items() if s >= 2 for _ in range(cnt)),
            reverse=True,
        )
        entropy = size_entropy(sizes, n_active)
        # Descending sweep: on ties the later (smaller) tau wins.
        if entropy >= best_entropy:
            best_entropy = entropy
            best_tau = tau
    return best_tau


def extract_cover(g: Graph, w: WeightedEdgeSet, tau1: float, tau2: float) -> Cover:
    """Communities at tau1 plus weak attachment of isolated vertices at tau2.

    An isolated vertex joins every community holding a non-isolated
    neighbor reachable over an edge of weight >= tau2; joining several
    creates overlap.  Vertices that stay isolated (their qualifying
    neighbors are all isolated too, or nothing clears tau2) are reported
    in ``Cover.unassigned``.  Degree-0 vertices never appear.
    """
    if tau2 > tau1:
        raise RslpaError(f"tau2 ({tau2}) must not exceed tau1 ({tau1})")
    comps, isolated = components_above(g, w, tau1)
    comm_of: dict[int, int] = {}
    for idx, comp in enumerate(comps):
        for v in comp:
            comm_of[v] = idx
    grown: list[set[int]] = [set(c) for c in comps]
    unassigned = []
    for v in sorted(isolated):
        homes = set()
        for u in g.neighbors(v):
            if u in comm_of and w.get(v, u) >= tau2:
                homes.add(comm_of[u])
        if homes:
            for idx in homes:
                grown[idx].add(v)
        else:
            unassigned.append(v)
    return Cover(grown, unassigned=unassigned)
