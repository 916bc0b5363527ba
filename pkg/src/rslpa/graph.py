"""Undirected binary graphs, edit batches, and per-vertex change deltas.

Vertices are arbitrary non-negative integers.  Graphs are simple (no
self-loops, no multi-edges) and immutable after construction; applying an
edit batch produces a new graph plus a delta map describing, for every
vertex whose neighborhood changed, which neighbors were kept, removed, and
added.  Degree-0 vertices stay in the vertex set.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

from .errors import BatchValidationError, ParseError


def norm_pair(u: int, v: int) -> tuple[int, int]:
    """Canonical (min, max) form of an undirected edge."""
    return (u, v) if u < v else (v, u)


class Category(enum.Enum):
    """How a vertex's neighbor set changed under a batch."""

    UNCHANGED = "unchanged"
    LOST_ONLY = "lost_only"   # removed neighbors, gained none
    HAS_NEW = "has_new"       # gained at least one neighbor


@dataclass(frozen=True)
class VertexDelta:
    """Neighbor-set change of one vertex: old = kept | removed, new = kept | added."""

    vertex: int
    kept: frozenset[int]
    removed: frozenset[int]
    added: frozenset[int]

    @property
    def category(self) -> Category:
        if self.added:
            return Category.HAS_NEW
        if self.removed:
            return Category.LOST_ONLY
        return Category.UNCHANGED

    @property
    def old_degree(self) -> int:
        return len(self.kept) + len(self.removed)

    @property
    def new_degree(self) -> int:
        return len(self.kept) + len(self.added)


class Graph:
    """Immutable undirected simple graph with sorted adjacency tuples."""

    __slots__ = ("_adj", "edge_count", "_active")

    def __init__(self, adjacency: dict[int, tuple[int, ...]]):
        # Trusted constructor: adjacency must already be symmetric, sorted,
        # loop-free and deduplicated.  Use from_edges() to normalize.
        self._adj = adjacency
        self.edge_count = sum(len(ns) for ns in adjacency.values()) // 2
        self._active = tuple(v for v in sorted(adjacency) if adjacency[v])

    @classmethod
    def from_edges(cls, edges, vertices=()) -> "Graph":
        """Build from an iterable of (u, v) pairs; extra isolated vertices allowed."""
        adj: dict[int, set[int]] = {int(v): set() for v in vertices}
        for u, v in edges:
            if u == v:
                continue
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        return cls({v: tuple(sorted(ns)) for v, ns in sorted(adj.items())})

    # -- queries ---------------------------------------------------------

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(self._adj)

    @property
    def vertex_count(self) -> int:
        return len(self._adj)

    @property
    def active_vertices(self) -> tuple[int, ...]:
        """Vertices with degree >= 1, ascending."""
        return self._active

    @property
    def adjacency(self) -> dict[int, tuple[int, ...]]:
        return self._adj

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_vertex(self, v: int) -> bool:
        return v in self._adj

    def has_edge(self, u: int, v: int) -> bool:
        ns = self._adj.get(u)
        return ns is not None and v in ns

    def edges(self):
        """Yield each edge once as (u, v) with u < v, sorted."""
        for u in self._adj:
            for v in self._adj[u]:
                if u < v:
                    yield (u, v)

    def __eq__(self, other):
        return isinstance(other, Graph) and self._adj == other._adj

    def __repr__(self):
        return f"Graph(|V|={self.vertex_count}, |E|={self.edge_count})"


@dataclass(frozen=True)
class EdgeListStats:
    """What was dropped while parsing an edge list."""

    duplicate_edges: int = 0
    self_loops: int = 0


def parse_edge_list(lines) -> tuple[list[tuple[int, int]], set[int], EdgeListStats]:
    """Parse edge-list lines into unique normalized edges.

    Each non-empty, non-comment line must hold exactly two non-negative
    decimal integers.  Self-loops and repeated edges are dropped and counted.
    """
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    vertices: set[int] = set()
    dups = loops = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected two integers, got {len(parts)} tokens", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer token in {parts!r}", lineno) from None
        if u < 0 or v < 0:
            raise ParseError(f"negative vertex id in {parts!r}", lineno)
        vertices.add(u)
        vertices.add(v)
        if u == v:
            loops += 1
            continue
        e = norm_pair(u, v)
        if e in seen:
            dups += 1
            continue
        seen.add(e)
        edges.append(e)
    return edges, vertices, EdgeListStats(duplicate_edges=dups, self_loops=loops)


def load_edge_list(source) -> tuple[Graph, EdgeListStats]:
    """Read an edge list from a path or an iterable of lines.

    Returns the deduplicated undirected graph together with drop counts.
    Vertices that appear only in dropped self-loops are kept (degree 0).
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, "r", encoding="utf-8") as fh:
            edges, vertices, stats = parse_edge_list(fh)
    else:
        edges, vertices, stats = parse_edge_list(source)
    return Graph.from_edges(edges, vertices=vertices), stats


@dataclass(frozen=True)
class EditBatch:
    """An atomic set of edge insertions and deletions."""

    insertions: frozenset[tuple[int, int]] = field(default_factory=frozenset)
    deletions: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        ins = frozenset(norm_pair(*p) for p in self.insertions)
        dels = frozenset(norm_pair(*p) for p in self.deletions)
        object.__setattr__(self, "insertions", ins)
        object.__setattr__(self, "deletions", dels)
        for u, v in ins | dels:
            if u == v:
                raise BatchValidationError(f"self-pair ({u}, {v}) in batch")
            if u < 0 or v < 0:
                raise BatchValidationError(f"negative vertex id in pair ({u}, {v})")
        both = ins & dels
        if both:
            raise BatchValidationError(
                f"pairs in both insertions and deletions: {sorted(both)}"
            )

    @property
    def m_a(self) -> int:
        return len(self.insertions)

    @property
    def m_d(self) -> int:
        return len(self.deletions)

    @property
    def size(self) -> int:
        return self.m_a + self.m_d

    def inverse(self) -> "EditBatch":
        """Swap insertions and deletions; applying both restores the graph."""
        return EditBatch(insertions=self.deletions, deletions=self.insertions)


def apply_batch(
    g: Graph, batch: EditBatch, strict: bool = True
) -> tuple[Graph, dict[int, VertexDelta]]:
    """Apply an edit batch, returning the new graph and per-vertex deltas.

    Strict mode requires every deletion to exist and every insertion to be
    absent; lenient mode downgrades violations to warnings and skips the
    offending pairs.  The delta map covers exactly the vertices whose
    neighbor set changed; all other vertices are implicitly unchanged.
    Vertices named only by insertions are created; vertices left with
    degree 0 remain in the vertex set.
    """
    bad_del = [p for p in sorted(batch.deletions) if not g.has_edge(*p)]
    bad_ins = [p for p in sorted(batch.insertions) if g.has_edge(*p)]
    if strict and (bad_del or bad_ins):
        parts = []
        if bad_del:
            parts.append(f"deletions not present: {bad_del}")
        if bad_ins:
            parts.append(f"insertions already present: {bad_ins}")
        raise BatchValidationError("; ".join(parts))
    if not strict and (bad_del or bad_ins):
        warnings.warn(
            f"skipping {len(bad_del)} missing deletions and "
            f"{len(bad_ins)} duplicate insertions",
            stacklevel=2,
        )

    deletions = batch.deletions.difference(bad_del)
    insertions = batch.insertions.difference(bad_ins)

    removed: dict[int, set[int]] = {}
    added: dict[int, set[int]] = {}
    for u, v in deletions:
        removed.setdefault(u, set()).add(v)
        removed.setdefault(v, set()).add(u)
    for u, v in insertions:
        added.setdefault(u, set()).add(v)
        added.setdefault(v, set()).add(u)

    adj = dict(g.adjacency)
    deltas: dict[int, VertexDelta] = {}
    for v in sorted(set(removed) | set(added)):
        old = set(adj.get(v, ()))
        rem = removed.get(v, set())
        add = added.get(v, set())
        kept = old - rem
        new = kept | add
        adj[v] = tuple(sorted(new))
        deltas[v] = VertexDelta(
            vertex=v,
            kept=frozenset(kept),
            removed=frozenset(rem),
            added=frozenset(add),
        )
    # Keep whole-map ordering stable for new vertices.
    new_graph = Graph({v: adj[v] for v in sorted(adj)})
    return new_graph, deltas
