import os

import pytest

from rslpa import Graph
from rslpa.engine import LabelState


def build_state(g: Graph, T: int, picks: dict, seed: int = 0) -> LabelState:
    """Hand-build a valid LabelState with chosen provenance.

    ``picks`` maps (vertex, t) -> (src, pos); unspecified slots default to
    (smallest neighbor, position 0).  Receiver records are derived, so the
    result satisfies every state invariant for ``g``.
    """
    state = LabelState(seed)
    state.T = T
    state.active = set(g.active_vertices)
    for v in g.vertices:
        if v in state.active:
            state.labels[v] = [v] + [None] * T
            state.srcs[v] = [None] * (T + 1)
            state.poss[v] = [None] * (T + 1)
            state.receivers[v] = [set() for _ in range(T + 1)]
        else:
            state.labels[v] = [v]
            state.srcs[v] = [None]
            state.poss[v] = [None]
            state.receivers[v] = [set()]
    for t in range(1, T + 1):
        for v in sorted(state.active):
            src, pos = picks.get((v, t), (g.adjacency[v][0], 0))
            state.srcs[v][t] = src
            state.poss[v][t] = pos
            state.labels[v][t] = state.labels[src][pos]
            state.receivers[src][pos].add((v, t))
    return state


def trials(n: int) -> int:
    """Scale Monte Carlo trial counts via RSLPA_TRIAL_SCALE (dev convenience;
    defaults to the full counts the checks are specified at)."""
    scale = float(os.environ.get("RSLPA_TRIAL_SCALE", "1"))
    return max(100, int(n * scale))


@pytest.fixture
def triangle():
    return Graph.from_edges([(1, 2), (2, 3), (1, 3)])


@pytest.fixture
def path3():
    return Graph.from_edges([(1, 2), (2, 3)])


@pytest.fixture
def k2():
    return Graph.from_edges([(1, 2)])


@pytest.fixture
def hexagon_chords():
    # 6 vertices, 8 edges; the mixed-batch workhorse for update tests.
    return Graph.from_edges(
        [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 2), (1, 3)]
    )
