"""Seeded generators: random edit batches and planted-cover test graphs."""

from __future__ import annotations

from .errors import RslpaError
from .graph import EditBatch, Graph, norm_pair
from .postprocess import Cover
from .rng import BATCH_GEN, PLANTED, RngStream


def generate_random_batch(g: Graph, size: int, seed: int) -> EditBatch:
    """Uniform edit batch: half deletions of existing edges, half insertions
    of non-existing pairs over the current vertex set.

    Deterministic for a given seed.  Insertions use rejection sampling over
    uniform vertex pairs, which is fine on the sparse graphs we target.
    """
    if size < 0 or size % 2 != 0:
        raise RslpaError(f"batch size must be even and non-negative, got {size}")
    n_del = size // 2
    n_ins = size - n_del
    edges = sorted(g.edges())
    verts = g.vertices
    n_edges = len(edges)
    n_verts = len(verts)
    max_pairs = n_verts * (n_verts - 1) // 2
    if n_del > n_edges:
        raise RslpaError(
            f"deletion side exhausted: need {n_del} edges, graph has {n_edges}"
        )
    if n_ins > max_pairs - n_edges:
        raise RslpaError(
            f"insertion side exhausted: need {n_ins} non-edges, "
            f"only {max_pairs - n_edges} exist"
        )

    rng = RngStream(seed)
    deletions: set[tuple[int, int]] = set()
    draw = 0
    while len(deletions) < n_del:
        e = edges[rng.below(n_edges, BATCH_GEN, draw, 0, 0)]
        draw += 1
        deletions.add(e)

    insertions: set[tuple[int, int]] = set()
    while len(insertions) < n_ins:
        u = verts[rng.below(n_verts, BATCH_GEN, draw, 1, 0)]
        v = verts[rng.below(n_verts, BATCH_GEN, draw, 2, 0)]
        draw += 1
        if u == v:
            continue
        p = norm_pair(u, v)
        if g.has_edge(*p) or p in insertions or p in deletions:
            continue
        insertions.add(p)
    return EditBatch(insertions=frozenset(insertions), deletions=frozenset(deletions))


def generate_planted_cover_graph(
    communities: int,
    size: int,
    overlap: int,
    p_in: float,
    p_out: float,
    seed: int,
) -> tuple[Graph, Cover]:
    """Planted overlapping communities with known ground truth.

    Communities are blocks of consecutive vertex ids arranged in a cycle;
    each consecutive pair shares exactly ``overlap`` vertices.  With one or
    two communities the cycle degenerates to a chain (a single shared block
    for k=2).  Pairs inside a common community are edged with probability
    ``p_in``, all other pairs with ``p_out``.
    """
    if not (0.0 <= p_in <= 1.0 and 0.0 <= p_out <= 1.0):
        raise RslpaError("p_in and p_out must lie in [0, 1]")
    if communities < 1 or size < 1:
        raise RslpaError("need at least one community of at least one vertex")
    if overlap < 0 or overlap >= size:
        raise RslpaError("overlap must satisfy 0 <= overlap < community size")

    if communities == 1:
        blocks = [tuple(range(size))]
        n = size
    elif communities == 2:
        n = 2 * size - overlap
        blocks = [tuple(range(size)), tuple(range(size - overlap, n))]
    else:
        stride = size - overlap
        n = communities * stride
        blocks = [
            tuple((c * stride + j) % n for j in range(size))
            for c in range(communities)
        ]

    member_sets = [frozenset(b) for b in blocks]
    rng = RngStream(seed)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            together = any(u in m and v in m for m in member_sets)
            p = p_in if together else p_out
            if p > 0.0 and rng.unit(PLANTED, u, v, 0) < p:
                edges.append((u, v))
    graph = Graph.from_edges(edges, vertices=range(n))
    return graph, Cover(member_sets)
