"""Incremental maintenance of label state under edge-edit batches.

After a batch, every slot of every vertex whose neighborhood changed gets a
keep-or-repick decision that restores the uniform-pick law on the new
graph: a slot whose source edge survived stays put (for pure losers) or
stays with probability n_kept/(n_kept+n_added) (for vertices with new
neighbors); everything else redraws uniformly from the appropriate neighbor
set, with a fresh uniform position.  Changed values are then forwarded in
barrier-synchronized waves along the receiver records until quiescence.
The resulting state is distributed exactly like a fresh run on the new
graph; the test suite verifies this empirically.

Ordering constraint: a re-picked slot is registered in its new source's
receiver record *before* the value is read, so a value that is itself
corrected in a later wave still reaches every reader.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConsistencyError, RslpaError
from .graph import Category, Graph, VertexDelta
from .rng import REPICK, RngStream


@dataclass(frozen=True)
class RepickDecision:
    """Outcome for one slot: keep the current pick, or redraw (src, pos)."""

    vertex: int
    t: int
    keep: bool
    src: int | None = None
    pos: int | None = None


class _DeltaView:
    """Sorted-neighbor caches for one delta, shared across its T decisions."""

    __slots__ = ("kept", "added", "all_new")

    def __init__(self, delta: VertexDelta):
        self.kept = tuple(sorted(delta.kept))
        self.added = tuple(sorted(delta.added))
        self.all_new = tuple(sorted(delta.kept | delta.added))


def decide_repick(
    delta: VertexDelta,
    t: int,
    current_src: int | None,
    rng: RngStream,
    index: int = 1,
    _view: _DeltaView | None = None,
) -> RepickDecision:
    """Keep-or-repick decision for slot (delta.vertex, t).

    ``index`` keys the draw context (the engine passes the batch epoch so
    successive batches get independent draws).  ``current_src`` may be None
    for a vertex that had no slots before (first neighbors just arrived).
    """
    if t < 1:
        raise RslpaError("repick decisions start at iteration 1")
    v = delta.vertex
    cat = delta.category
    if cat is Category.UNCHANGED:
        return RepickDecision(v, t, keep=True)
    view = _view or _DeltaView(delta)
    n_u = len(view.kept)
    n_a = len(view.added)

    if cat is Category.LOST_ONLY:
        if current_src not in delta.removed:
            return RepickDecision(v, t, keep=True)  # survives uniformly (kept set)
        if n_u == 0:
            raise RslpaError(
                f"vertex {v} lost all neighbors; retire its labels instead of repicking"
            )
        lo, hi = rng.halves(REPICK, index, v, t)
        return RepickDecision(v, t, keep=False, src=view.kept[lo % n_u], pos=hi % t)

    # HAS_NEW: new neighbors exist; maybe removals too.
    lo, hi = rng.halves(REPICK, index, v, t)
    if current_src is not None and current_src in delta.kept:
        j = lo % (n_u + n_a)
        if j < n_u:
            return RepickDecision(v, t, keep=True)
        return RepickDecision(v, t, keep=False, src=view.added[j - n_u], pos=hi % t)
    # Source edge deleted (or no prior pick): uniform over all current neighbors.
    return RepickDecision(
        v, t, keep=False, src=view.all_new[lo % (n_u + n_a)], pos=hi % t
    )


@dataclass
class UpdateMetrics:
    """Work accounting for one correction pass.

    ``eta`` counts distinct slots whose stored value changed (including
    slots retired with their vertex and slots created for newly active
    vertices); ``repicks`` counts (src, pos) redraws, reported separately
    because a redraw can land on the same value.  ``messages[w]`` is the
    number of corrections delivered in wave w+1.
    """

    eta: int = 0
    repicks: int = 0
    waves: int = 0
    messages: list[int] = field(default_factory=list)
    record_removals: int = 0
    registrations: int = 0
    retired_vertices: int = 0
    activated_vertices: int = 0


class UpdateHooks:
    """Callback surface used by the BSP simulator and the audit tests."""

    def on_classification(self, requests, removals, responses):
        """Phase 1 traffic: repick requests, record removals, label responses."""

    def on_wave(self, wave: int, deliveries):
        """One correction wave; deliveries are (sender, tar, k, value)."""


def correction_propagate(
    state,
    new_graph: Graph,
    deltas: dict[int, VertexDelta],
    rng: RngStream,
    hooks: UpdateHooks | None = None,
) -> tuple["LabelState", UpdateMetrics]:
    """Repair ``state`` in place so it is valid for ``new_graph``.

    ``deltas`` must come from ``apply_batch`` on the graph the state was
    computed on.  Returns the state and the update metrics.  With an empty
    delta map this is a no-op.
    """
    metrics = UpdateMetrics()
    if not deltas:
        return state, metrics

    T = state.T
    labels = state.labels
    srcs = state.srcs
    poss = state.poss
    receivers = state.receivers
    epoch = state.epoch + 1

    new_vertices = set(new_graph.vertices)
    retiring: list[int] = []
    activating: list[int] = []
    ordinary: list[int] = []
    for v in sorted(deltas):
        d = deltas[v]
        if v not in new_vertices:
            raise ConsistencyError(f"delta for unknown vertex {v}")
        if (d.kept | d.added) != set(new_graph.adjacency[v]):
            raise ConsistencyError(f"delta for vertex {v} disagrees with new graph")
        if v in labels and v in state.active and len(labels[v]) != T + 1:
            raise ConsistencyError(f"vertex {v} has stale sequence length")
        if d.category is Category.UNCHANGED:
            continue
        if d.new_degree == 0:
            retiring.append(v)
        elif d.old_degree == 0:
            activating.append(v)
        else:
            ordinary.append(v)

    # ---- Phase 1a: decisions (no mutation, draws are counter-based) ----
    repicks: list[tuple[int, int, int | None, int | None, int, int]] = []
    retire_slots: list[tuple[int, int, int, int]] = []
    for v in retiring:
        for t in range(1, len(labels[v])):
            retire_slots.append((v, t, srcs[v][t], poss[v][t]))
    for v in activating:
        view = _DeltaView(deltas[v])
        for t in range(1, T + 1):
            d = decide_repick(deltas[v], t, None, rng, index=epoch, _view=view)
            repicks.append((v, t, None, None, d.src, d.pos))
    for v in ordinary:
        view = _DeltaView(deltas[v])
        src_v = srcs[v]
        for t in range(1, T + 1):
            d = decide_repick(deltas[v], t, src_v[t], rng, index=epoch, _view=view)
            if not d.keep:
                repicks.append((v, t, src_v[t], poss[v][t], d.src, d.pos))

    # ---- Phase 1b: structure updates (before any value moves) ----
    for v in activating:
        # Brand-new or previously degree-0 vertex: fresh slots for 1..T.
        # Its receiver sets are empty (nobody could have picked from it).
        labels[v] = [v] + [None] * T
        srcs[v] = [None] * (T + 1)
        poss[v] = [None] * (T + 1)
        receivers[v] = [set() for _ in range(T + 1)]
        state.active.add(v)

    removal_msgs = []
    for v, t, old_src, old_pos in retire_slots:
        receivers[old_src][old_pos].remove((v, t))
        removal_msgs.append((v, t, old_src))
    for v, t, old_src, old_pos, _, _ in repicks:
        if old_src is not None:
            receivers[old_src][old_pos].remove((v, t))
            removal_msgs.append((v, t, old_src))

    request_msgs = []
    for v, t, _, _, new_src, new_pos in repicks:
        srcs[v][t] = new_src
        poss[v][t] = new_pos
        receivers[new_src][new_pos].add((v, t))
        request_msgs.append((v, t, new_src))

    changed: set[tuple[int, int]] = set()
    for v in retiring:
        for t in range(1, len(labels[v])):
            changed.add((v, t))
        for t, rec in enumerate(receivers[v]):
            if rec:
                raise ConsistencyError(
                    f"retiring vertex {v} still has receivers at slot {t}"
                )
        labels[v] = [v]
        srcs[v] = [None]
        poss[v] = [None]
        receivers[v] = [set()]
        state.active.discard(v)

    # ---- Phase 1c: fetch pre-update values (registration happened above) ----
    responses = []
    for v, t, _, _, new_src, new_pos in repicks:
        responses.append((new_src, v, t, labels[new_src][new_pos]))
    if hooks is not None:
        hooks.on_classification(request_msgs, removal_msgs, responses)

    # ---- Wave 0: deliver fetched values ----
    queue: list[tuple[int, int, int, int]] = []  # (tar, k, value, sender)
    for new_src, v, t, value in sorted(responses, key=lambda r: (r[1], r[2])):
        if value is None:
            continue  # source slot still unassigned; its correction will reach us
        if labels[v][t] != value:
            labels[v][t] = value
            changed.add((v, t))
            for tar, k in receivers[v][t]:
                queue.append((tar, k, value, v))

    # ---- Correction waves ----
    wave = 0
    while queue:
        wave += 1
        queue.sort()
        if hooks is not None:
            hooks.on_wave(wave, [(s, tar, k, val) for tar, k, val, s in queue])
        metrics.messages.append(len(queue))
        next_queue: list[tuple[int, int, int, int]] = []
        for tar, k, value, _ in queue:
            if labels[tar][k] != value:
                labels[tar][k] = value
                changed.add((tar, k))
                for t2, k2 in receivers[tar][k]:
                    next_queue.append((t2, k2, value, tar))
        queue = next_queue

    state.epoch = epoch
    metrics.eta = len(changed)
    metrics.repicks = len(repicks)
    metrics.waves = wave
    metrics.record_removals = len(removal_msgs)
    metrics.registrations = len(request_msgs)
    metrics.retired_vertices = len(retiring)
    metrics.activated_vertices = len(activating)
    return state, metrics
