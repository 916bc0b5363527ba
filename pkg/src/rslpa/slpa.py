"""Original speaker-listener label propagation, as a comparison baseline.

Each iteration, every vertex sends one uniform draw from its memory to each
neighbor; every vertex then appends the plurality winner of what it
received, breaking ties uniformly.  Membership comes from thresholding the
relative frequency of labels in each memory.  ``voting_distribution``
computes the exact law of the plurality winner by enumeration; it backs the
flatness comparison against uniform picking.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction

from .errors import RslpaError
from .graph import Graph
from .postprocess import Cover
from .rng import SLPA_SEND, SLPA_TIE, RngStream


class MemoryState:
    """Per-vertex label multisets; every active vertex grows by one per iteration."""

    __slots__ = ("T", "seed", "memories", "active")

    def __init__(self, seed: int):
        self.T = 0
        self.seed = int(seed)
        self.memories: dict[int, list[int]] = {}
        self.active: set[int] = set()

    def __eq__(self, other):
        return (
            isinstance(other, MemoryState)
            and self.T == other.T
            and self.memories == other.memories
        )


def slpa_run(g: Graph, T: int, seed: int) -> MemoryState:
    """T synchronous speaker/listener iterations; deterministic in seed."""
    if T < 0:
        raise RslpaError("iteration count must be non-negative")
    state = MemoryState(seed)
    state.memories = {v: [v] for v in g.vertices}
    state.active = set(g.active_vertices)
    rng = RngStream(seed)
    mems = state.memories
    for t in range(1, T + 1):
        # Speaker super-step: one draw per directed edge, based on the
        # start-of-iteration memories (appends happen after the barrier).
        incoming: dict[int, list[int]] = {}
        for i in state.active:
            mem = mems[i]
            m = len(mem)
            for j in g.adjacency[i]:
                incoming.setdefault(j, []).append(
                    mem[rng.below(m, SLPA_SEND, t, i, j)]
                )
        # Listener super-step: plurality with uniform tie-break.
        for i in state.active:
            received = incoming[i]
            counts = Counter(received)
            top = max(counts.values())
            winners = sorted(l for l, c in counts.items() if c == top)
            pick = winners[rng.below(len(winners), SLPA_TIE, t, i, 0)]
            mems[i].append(pick)
        state.T = t
    return state


def slpa_threshold(mem: MemoryState, tau: float) -> Cover:
    """Keep labels with relative frequency >= tau; labels name communities.

    Communities with fewer than two members are dropped.
    """
    if not 0.0 <= tau <= 1.0:
        raise RslpaError("tau must lie in [0, 1]")
    members: dict[int, set[int]] = {}
    for v in sorted(mem.active):
        memory = mem.memories[v]
        size = len(memory)
        for label, count in Counter(memory).items():
            if count / size >= tau:
                members.setdefault(label, set()).add(v)
    return Cover([c for c in members.values() if len(c) >= 2])


def voting_distribution(sequences, outcome_cap: int = 10_000_000) -> dict:
    """Exact plurality-winner law when each voter submits one uniform draw
    from its own sequence and ties break uniformly.

    Enumerates the full product of per-voter draws with rational
    probabilities, so the result sums to exactly 1.  Voter sequences may
    have different lengths.  Raises when the raw product space exceeds
    ``outcome_cap`` (fall back to Monte Carlo sampling in that case).
    """
    seqs = [tuple(s) for s in sequences]
    if not seqs or any(not s for s in seqs):
        raise RslpaError("every voter needs a non-empty sequence")
    space = 1
    for s in seqs:
        space *= len(s)
        if space > outcome_cap:
            raise RslpaError(
                f"product space exceeds cap ({outcome_cap}); "
                "use Monte Carlo sampling instead"
            )
    # Enumerate over distinct labels per voter, weighted by their frequency.
    voter_laws = []
    for s in seqs:
        m = len(s)
        voter_laws.append([(l, Fraction(c, m)) for l, c in sorted(Counter(s).items())])

    result: dict = {}
    tally: Counter = Counter()

    def recurse(idx: int, prob: Fraction):
        if idx == len(voter_laws):
            top = max(tally.values())
            winners = [l for l, c in tally.items() if c == top]
            share = prob / len(winners)
            for w in winners:
                result[w] = result.get(w, Fraction(0)) + share
            return
        for label, p in voter_laws[idx]:
            tally[label] += 1
            recurse(idx + 1, prob * p)
            tally[label] -= 1

    recurse(0, Fraction(1))
    return dict(sorted(result.items()))
