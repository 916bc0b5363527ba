import collections

import pytest

from rslpa import (
    Category,
    EditBatch,
    Graph,
    RngStream,
    RslpaError,
    VertexDelta,
    apply_batch,
    correction_propagate,
    decide_repick,
    run,
    validate_state,
)
from rslpa.incremental import UpdateHooks

from conftest import build_state, trials


def delta(vertex=0, kept=(), removed=(), added=()):
    return VertexDelta(
        vertex=vertex,
        kept=frozenset(kept),
        removed=frozenset(removed),
        added=frozenset(added),
    )


class TestDecideRepick:
    def test_unchanged_always_keeps(self):
        d = delta(kept=(1, 2))
        assert d.category is Category.UNCHANGED
        for seed in range(50):
            assert decide_repick(d, 3, 1, RngStream(seed)).keep

    def test_lost_only_kept_src_always_keeps(self):
        d = delta(kept=(1, 2), removed=(3,))
        for seed in range(200):
            assert decide_repick(d, 2, current_src=1, rng=RngStream(seed)).keep

    def test_lost_only_removed_src_repicks_uniform_over_kept(self):
        d = delta(kept=(1, 2), removed=(3,))
        n = trials(20_000)
        counts = collections.Counter(
            decide_repick(d, 4, 3, RngStream(seed)).src for seed in range(n)
        )
        assert set(counts) == {1, 2}
        assert abs(counts[1] / n - 0.5) < 0.02

    def test_lost_only_isolation_is_an_error(self):
        d = delta(kept=(), removed=(1, 2))
        with pytest.raises(RslpaError, match="retire"):
            decide_repick(d, 1, 1, RngStream(0))

    def test_has_new_kept_src_keep_probability(self):
        # two kept, one added: repick with probability exactly 1/3, and the
        # replacement source is the single new neighbor
        d = delta(kept=(1, 2), added=(9,))
        n = trials(100_000)
        repicked = 0
        for seed in range(n):
            dec = decide_repick(d, 2, current_src=1, rng=RngStream(seed))
            if not dec.keep:
                repicked += 1
                assert dec.src == 9
        assert abs(repicked / n - 1 / 3) < 0.01

    def test_has_new_removed_src_uniform_over_all_current(self):
        d = delta(kept=(1,), removed=(3,), added=(5, 7))
        n = trials(30_000)
        counts = collections.Counter(
            decide_repick(d, 2, 3, RngStream(seed)).src for seed in range(n)
        )
        assert set(counts) == {1, 5, 7}
        for v in (1, 5, 7):
            assert abs(counts[v] / n - 1 / 3) < 0.02

    def test_no_prior_pick_repicks_from_new_neighbors(self):
        d = delta(added=(4, 6))
        counts = collections.Counter(
            decide_repick(d, 1, None, RngStream(seed)).src for seed in range(2000)
        )
        assert set(counts) == {4, 6}

    def test_pos_uniform_over_iteration_range(self):
        d = delta(kept=(1,), removed=(3,))
        t = 5
        n = trials(50_000)
        counts = collections.Counter(
            decide_repick(d, t, 3, RngStream(seed)).pos for seed in range(n)
        )
        assert set(counts) == set(range(t))
        for p in range(t):
            assert abs(counts[p] / n - 1 / t) < 0.01

    def test_distinct_epochs_give_fresh_draws(self):
        d = delta(kept=(1, 2), removed=(3,))
        rng = RngStream(42)
        decisions = {
            (decide_repick(d, 4, 3, rng, index=e).src, decide_repick(d, 4, 3, rng, index=e).pos)
            for e in range(1, 30)
        }
        assert len(decisions) > 1  # not frozen across epochs


class TestCorrectionPropagate:
    def test_empty_batch_is_noop(self, hexagon_chords):
        s = run(hexagon_chords, 4, seed=11)
        before = s.copy()
        s2, m = correction_propagate(s, hexagon_chords, {}, RngStream(11))
        assert s2 == before
        assert (m.eta, m.repicks, m.waves, m.messages) == (0, 0, 0, [])

    def test_propagation_chain_corrects_in_chain_depth_waves(self):
        # a label travels 5 -> 4 -> 3 -> 2 -> 1 at increasing iterations;
        # deleting the first edge repicks the head and drags three
        # corrections down the chain, one wave each
        g = Graph.from_edges([(5, 4), (4, 3), (3, 2), (2, 1), (4, 6)])
        picks = {
            (4, 1): (5, 0),
            (3, 2): (4, 1),
            (2, 3): (3, 2),
            (1, 4): (2, 3),
        }
        state = build_state(g, 4, picks)
        assert state.labels[1][4] == 5
        validate_state(state, g)

        g2, deltas = apply_batch(g, EditBatch(deletions=frozenset({(4, 5)})))
        state, m = correction_propagate(state, g2, deltas, RngStream(0))
        validate_state(state, g2)
        assert m.repicks == 1
        assert m.waves == 3
        assert m.messages == [1, 1, 1]
        new_label = state.labels[4][1]
        assert new_label != 5
        assert state.labels[3][2] == state.labels[2][3] == state.labels[1][4] == new_label
        # vertex 5 got isolated: retired to its initial label
        assert state.labels[5] == [5] and 5 not in state.active
        # eta: 4 retired slots + 4 corrected slots
        assert m.eta == 8

    def test_retirement_clears_and_restores_invariants(self, hexagon_chords):
        g = hexagon_chords
        s = run(g, 4, seed=5)
        batch = EditBatch(deletions=frozenset({(4, 5), (5, 0)}))  # isolates 5
        g2, deltas = apply_batch(g, batch)
        s, m = correction_propagate(s, g2, deltas, RngStream(5))
        validate_state(s, g2)
        assert 5 not in s.active
        assert s.labels[5] == [5]
        assert m.retired_vertices == 1

    def test_activation_gives_full_sequences(self, k2):
        g = k2
        s = run(g, 3, seed=8)
        g2, deltas = apply_batch(g, EditBatch(insertions=frozenset({(2, 3), (3, 4)})))
        s, m = correction_propagate(s, g2, deltas, RngStream(8))
        validate_state(s, g2)
        assert len(s.labels[3]) == 4 and len(s.labels[4]) == 4
        assert m.activated_vertices == 2
        assert m.repicks >= 6  # both new vertices redraw all three slots

    def test_duality_holds_after_every_wave(self, hexagon_chords):
        g = hexagon_chords
        s = run(g, 6, seed=21)
        batch = EditBatch(
            deletions=frozenset({(0, 1), (2, 3)}), insertions=frozenset({(0, 4), (2, 5)})
        )
        g2, deltas = apply_batch(g, batch)

        audits = []

        class Auditor(UpdateHooks):
            def on_wave(self, wave, deliveries):
                validate_state(s, g2, check_values=False)
                audits.append(wave)

        s, m = correction_propagate(s, g2, deltas, RngStream(21), hooks=Auditor())
        validate_state(s, g2)
        assert audits == list(range(1, m.waves + 1))

    def test_wave_targets_move_to_later_iterations(self, hexagon_chords):
        g = hexagon_chords
        g2, deltas = apply_batch(g, EditBatch(deletions=frozenset({(1, 2)})))
        saw_waves = False
        for seed in range(12):
            mins = []

            class Tracker(UpdateHooks):
                def on_wave(self, wave, deliveries):
                    mins.append(min(k for _s, _t, k, _v in deliveries))

            s = run(g, 6, seed=seed)
            correction_propagate(s, g2, deltas, RngStream(seed), hooks=Tracker())
            assert all(b > a for a, b in zip(mins, mins[1:]))
            # wave w can only touch slots picked at iteration w+1 or later
            assert all(m >= w + 1 for w, m in enumerate(mins, start=1))
            saw_waves = saw_waves or bool(mins)
        assert saw_waves

    def test_waves_bounded_by_t(self, hexagon_chords):
        g = hexagon_chords
        for seed in range(10):
            s = run(g, 5, seed=seed)
            g2, deltas = apply_batch(g, EditBatch(deletions=frozenset({(0, 2)})))
            s, m = correction_propagate(s, g2, deltas, RngStream(seed))
            assert m.waves <= 5 + 1
            assert m.eta <= 5 * len(g.active_vertices)

    def test_deterministic_under_seed(self, hexagon_chords):
        g = hexagon_chords
        batch = EditBatch(deletions=frozenset({(3, 4)}), insertions=frozenset({(2, 5)}))
        g2, deltas = apply_batch(g, batch)
        s1, m1 = correction_propagate(run(g, 5, 3), g2, deltas, RngStream(3))
        s2, m2 = correction_propagate(run(g, 5, 3), g2, deltas, RngStream(3))
        assert s1 == s2 and m1 == m2

    def test_unknown_vertex_delta_rejected(self, triangle):
        s = run(triangle, 2, seed=0)
        bad = {99: VertexDelta(99, frozenset(), frozenset({1}), frozenset())}
        with pytest.raises(RslpaError):
            correction_propagate(s, triangle, bad, RngStream(0))

    def test_delta_disagreeing_with_graph_rejected(self, triangle):
        s = run(triangle, 2, seed=0)
        bad = {1: VertexDelta(1, frozenset({2}), frozenset(), frozenset({9}))}
        with pytest.raises(RslpaError, match="disagrees"):
            correction_propagate(s, triangle, bad, RngStream(0))

    def test_update_before_any_propagation(self, triangle):
        # T=0 states have no slots; structure still follows the batch
        s = run(triangle, 0, seed=6)
        g2, deltas = apply_batch(
            triangle, EditBatch(deletions=frozenset({(1, 2)}), insertions=frozenset({(1, 4)}))
        )
        s, m = correction_propagate(s, g2, deltas, RngStream(6))
        validate_state(s, g2)
        assert (m.eta, m.repicks, m.waves) == (0, 0, 0)
        assert 4 in s.active and s.labels[4] == [4]

    def test_second_batch_uses_fresh_epoch(self, hexagon_chords):
        g = hexagon_chords
        s = run(g, 4, seed=2)
        g2, d1 = apply_batch(g, EditBatch(deletions=frozenset({(0, 1)})))
        s, _ = correction_propagate(s, g2, d1, RngStream(2))
        assert s.epoch == 1
        g3, d2 = apply_batch(g2, EditBatch(insertions=frozenset({(0, 1)})))
        s, _ = correction_propagate(s, g3, d2, RngStream(2))
        assert s.epoch == 2
        validate_state(s, g3)


def test_incremental_marginals_match_scratch_smoke(hexagon_chords):
    # Reduced-trial version of the acceptance equivalence check.
    g = hexagon_chords
    batch = EditBatch(deletions=frozenset({(1, 2)}), insertions=frozenset({(2, 4)}))
    g2, deltas = apply_batch(g, batch)
    T = 3
    n = trials(20_000)

    scratch = {}
    for seed in range(n):
        s = run(g2, T, seed)
        for v in s.active:
            for t in range(1, T + 1):
                scratch.setdefault((v, t), collections.Counter())[s.labels[v][t]] += 1
    inc = {}
    for seed in range(1_000_000, 1_000_000 + n):
        s = run(g, T, seed)
        s, _ = correction_propagate(s, g2, deltas, RngStream(seed))
        for v in s.active:
            for t in range(1, T + 1):
                inc.setdefault((v, t), collections.Counter())[s.labels[v][t]] += 1

    assert set(scratch) == set(inc)
    for slot in scratch:
        support = set(scratch[slot]) | set(inc[slot])
        tv = sum(abs(scratch[slot][l] - inc[slot][l]) for l in support) / (2 * n)
        assert tv <= 0.05, (slot, tv)
