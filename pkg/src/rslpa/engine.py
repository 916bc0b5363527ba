"""Randomized label propagation with full provenance.

Each active vertex starts with its own id and appends one label per
iteration, copied from a uniformly chosen neighbor at a uniformly chosen
earlier position.  Alongside the sequences we keep, per picked label, where
it came from (src, pos) and, per owned label, who copied it (the receiver
records).  That reverse index is what the incremental engine forwards
corrections through.

The per-slot pick distribution equals the frequency profile of the union of
the neighbors' prefixes; ``uniform_pick_distribution`` computes it for fixed
sequences and ``exact_marginals`` composes it recursively into the exact
per-slot label law for a whole graph, which the tests use as an oracle.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ConsistencyError, RslpaError, SequencingError
from .graph import Graph
from .rng import K_A, K_B, K_PURPOSE, K_SEED, MASK64, PICK, RngStream


class LabelState:
    """Full propagation state: sequences, provenance, receiver records.

    For an active vertex ``i``: ``labels[i]`` has length T+1 with
    ``labels[i][0] == i``; ``srcs[i][t]`` and ``poss[i][t]`` (t >= 1) hold
    the provenance of ``labels[i][t]``; ``receivers[i][t]`` is the set of
    ``(tar, k)`` slots that copied ``labels[i][t]``.  Degree-0 vertices
    carry only their initial label.  ``epoch`` counts applied update
    batches; it keys the re-pick draw contexts so successive batches use
    fresh randomness.
    """

    __slots__ = ("T", "seed", "epoch", "labels", "srcs", "poss", "receivers", "active")

    def __init__(self, seed: int):
        self.T = 0
        self.seed = int(seed) & MASK64  # same canonical form as RngStream
        self.epoch = 0
        self.labels: dict[int, list] = {}
        self.srcs: dict[int, list] = {}
        self.poss: dict[int, list] = {}
        self.receivers: dict[int, list] = {}
        self.active: set[int] = set()

    def copy(self) -> "LabelState":
        dup = LabelState(self.seed)
        dup.T = self.T
        dup.epoch = self.epoch
        dup.labels = {v: list(seq) for v, seq in self.labels.items()}
        dup.srcs = {v: list(seq) for v, seq in self.srcs.items()}
        dup.poss = {v: list(seq) for v, seq in self.poss.items()}
        dup.receivers = {v: [set(r) for r in recs] for v, recs in self.receivers.items()}
        dup.active = set(self.active)
        return dup

    def __eq__(self, other):
        return (
            isinstance(other, LabelState)
            and self.T == other.T
            and self.seed == other.seed
            and self.epoch == other.epoch
            and self.active == other.active
            and self.labels == other.labels
            and self.srcs == other.srcs
            and self.poss == other.poss
            and self.receivers == other.receivers
        )

    def sequence(self, v: int) -> tuple:
        return tuple(self.labels[v])


def initialize(g: Graph, seed: int = 0) -> LabelState:
    """Every vertex holds exactly its own id; degree-0 vertices are inactive."""
    state = LabelState(seed)
    for v in g.vertices:
        state.labels[v] = [v]
        state.srcs[v] = [None]
        state.poss[v] = [None]
        state.receivers[v] = [set()]
    state.active = set(g.active_vertices)
    return state


def propagate_iteration(state: LabelState, g: Graph, t: int, rng: RngStream) -> LabelState:
    """Run iteration ``t``: every active vertex picks (src, pos) uniformly
    and appends the copied label; the pick is registered with the source.

    Mutates and returns ``state``.  The two pick fields come from the low
    and high halves of one counter-based draw per vertex (context
    ``(PICK, 0, vertex, t)``); the arithmetic below is rng.draw_u64 inlined,
    pinned by a replay test.
    """
    if t != state.T + 1:
        raise SequencingError(f"expected iteration {state.T + 1}, got {t}")
    if set(g.vertices) != set(state.labels):
        raise ConsistencyError("graph vertex set differs from state vertex set")

    labels = state.labels
    srcs = state.srcs
    poss = state.poss
    receivers = state.receivers
    adjacency = g.adjacency
    base = (rng.seed * K_SEED + PICK * K_PURPOSE + t * K_B) & MASK64
    for i in state.active:
        adj = adjacency[i]
        x = (base + i * K_A) & MASK64
        x ^= x >> 30
        x = (x * 0xBF58476D1CE4E5B9) & MASK64
        x ^= x >> 27
        x = (x * 0x94D049BB133111EB) & MASK64
        x ^= x >> 31
        x ^= x >> 30
        x = (x * 0xBF58476D1CE4E5B9) & MASK64
        x ^= x >> 27
        x = (x * 0x94D049BB133111EB) & MASK64
        x ^= x >> 31
        src = adj[(x & 0xFFFFFFFF) % len(adj)]
        pos = (x >> 32) % t
        labels[i].append(labels[src][pos])
        srcs[i].append(src)
        poss[i].append(pos)
        receivers[src][pos].add((i, t))
    for i in state.active:
        receivers[i].append(set())
    state.T = t
    return state


def run(g: Graph, T: int, seed: int) -> LabelState:
    """T iterations of propagation from a fresh state; deterministic in seed."""
    if T < 0:
        raise RslpaError("iteration count must be non-negative")
    state = initialize(g, seed)
    rng = RngStream(seed)
    for t in range(1, T + 1):
        propagate_iteration(state, g, t, rng)
    return state


def pick_for(state_seed: int, g: Graph, i: int, t: int) -> tuple[int, int]:
    """Reference (src, pos) pick for one slot, via the public rng API."""
    lo, hi = RngStream(state_seed).halves(PICK, 0, i, t)
    adj = g.adjacency[i]
    return adj[lo % len(adj)], hi % t


def uniform_pick_distribution(sequences) -> dict:
    """Label law of one uniform pick over equal-length sequences.

    P(l) is the frequency of ``l`` across the union of the sequences divided
    by the total number of slots.  Exact rationals are returned so that
    downstream comparisons (e.g. against plurality voting) are noise-free.
    """
    seqs = [tuple(s) for s in sequences]
    if not seqs:
        raise RslpaError("need at least one sequence")
    m = len(seqs[0])
    if m < 1:
        raise RslpaError("sequences must be non-empty")
    if any(len(s) != m for s in seqs):
        raise RslpaError("sequences must all have the same length")
    total = len(seqs) * m
    counts: dict = {}
    for s in seqs:
        for l in s:
            counts[l] = counts.get(l, 0) + 1
    return {l: Fraction(c, total) for l, c in sorted(counts.items())}


def exact_marginals(g: Graph, T: int) -> dict[tuple[int, int], dict[int, float]]:
    """Exact per-slot label distribution for every active vertex and t <= T.

    Derived by composing the uniform-pick law: the slot (i, t) distribution
    is the average of the neighbor-slot distributions (j, k) over j in N(i)
    and k < t.  Brute-force oracle for desk-scale graphs only.
    """
    dists: dict[tuple[int, int], dict[int, float]] = {}
    for v in g.active_vertices:
        dists[(v, 0)] = {v: 1.0}
    for t in range(1, T + 1):
        for v in g.active_vertices:
            adj = g.adjacency[v]
            weight = 1.0 / (len(adj) * t)
            acc: dict[int, float] = {}
            for j in adj:
                for k in range(t):
                    for label, p in dists[(j, k)].items():
                        acc[label] = acc.get(label, 0.0) + p * weight
            dists[(v, t)] = acc
    return dists


def validate_state(state: LabelState, g: Graph, check_values: bool = True) -> None:
    """Audit every invariant; raises ConsistencyError naming the first failure.

    Checks sequence lengths, provenance ranges, value agreement with the
    provenance chain, and the two-way duality between (src, pos) fields and
    receiver records.  ``check_values=False`` audits structure only, which
    is the part that must hold even between correction waves (values are
    in flight there).
    """
    T = state.T
    vertex_set = set(g.vertices)
    if set(state.labels) != vertex_set:
        raise ConsistencyError("state vertices differ from graph vertices")
    if state.active != set(g.active_vertices):
        raise ConsistencyError("active set does not match graph degrees")

    for v in sorted(state.labels):
        seq = state.labels[v]
        if v in state.active:
            if len(seq) != T + 1:
                raise ConsistencyError(f"vertex {v}: sequence length {len(seq)} != T+1")
        else:
            if len(seq) != 1:
                raise ConsistencyError(f"inactive vertex {v}: sequence length {len(seq)}")
        if seq[0] != v:
            raise ConsistencyError(f"vertex {v}: initial label is {seq[0]}")
        adj = set(g.adjacency[v])
        for t in range(1, len(seq)):
            src = state.srcs[v][t]
            pos = state.poss[v][t]
            if src not in adj:
                raise ConsistencyError(f"slot ({v},{t}): src {src} not a neighbor")
            if not (0 <= pos <= t - 1):
                raise ConsistencyError(f"slot ({v},{t}): pos {pos} out of range")
            if check_values:
                if seq[t] != state.labels[src][pos]:
                    raise ConsistencyError(
                        f"slot ({v},{t}): value {seq[t]} != source value "
                        f"{state.labels[src][pos]}"
                    )
                if seq[t] not in vertex_set:
                    raise ConsistencyError(
                        f"slot ({v},{t}): value {seq[t]} is no vertex id"
                    )
            if (v, t) not in state.receivers[src][pos]:
                raise ConsistencyError(
                    f"slot ({v},{t}) missing from receiver record of ({src},{pos})"
                )

    for v in sorted(state.receivers):
        recs = state.receivers[v]
        expected_len = T + 1 if v in state.active else 1
        if len(recs) != expected_len:
            raise ConsistencyError(f"vertex {v}: receiver list length {len(recs)}")
        for t, rec in enumerate(recs):
            for tar, k in rec:
                if state.srcs.get(tar) is None or k >= len(state.srcs[tar]):
                    raise ConsistencyError(
                        f"receiver entry ({tar},{k}) of ({v},{t}) has no slot"
                    )
                if state.srcs[tar][k] != v or state.poss[tar][k] != t:
                    raise ConsistencyError(
                        f"receiver entry ({tar},{k}) of ({v},{t}) disagrees with "
                        f"provenance ({state.srcs[tar][k]},{state.poss[tar][k]})"
                    )
