import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rslpa import (
    EditBatch,
    Graph,
    RngStream,
    SnapshotError,
    apply_batch,
    correction_propagate,
    load_snapshot,
    run,
    save_snapshot,
)


def roundtrip(state, g, tmp_path, name="s.bin"):
    p = tmp_path / name
    save_snapshot(state, g, p)
    return load_snapshot(p)


def test_roundtrip_identity(hexagon_chords, tmp_path):
    g = hexagon_chords
    s = run(g, 6, seed=12)
    s2, g2 = roundtrip(s, g, tmp_path)
    assert s2 == s
    assert g2 == g


def test_roundtrip_large_state(tmp_path):
    g = Graph.from_edges([(i, (i + 1) % 1000) for i in range(1000)])
    s = run(g, 200, seed=5)
    s2, g2 = roundtrip(s, g, tmp_path)
    assert s2 == s and g2 == g


def test_roundtrip_after_update(hexagon_chords, tmp_path):
    g = hexagon_chords
    s = run(g, 5, seed=3)
    g2, deltas = apply_batch(g, EditBatch(deletions=frozenset({(0, 1)})))
    s, _ = correction_propagate(s, g2, deltas, RngStream(3))
    s2, g3 = roundtrip(s, g2, tmp_path)
    assert s2 == s and g3 == g2
    assert s2.epoch == 1


def test_persisted_update_path_bit_equals_in_memory(hexagon_chords, tmp_path):
    # detect -> save -> load -> update must equal detect -> update
    g = hexagon_chords
    batch = EditBatch(deletions=frozenset({(1, 2)}), insertions=frozenset({(2, 4)}))
    g2, deltas = apply_batch(g, batch)

    mem = run(g, 5, seed=21)
    mem, _ = correction_propagate(mem, g2, deltas, RngStream(21))

    disk = run(g, 5, seed=21)
    loaded, gl = roundtrip(disk, g, tmp_path)
    loaded, _ = correction_propagate(loaded, g2, deltas, RngStream(loaded.seed))
    assert loaded == mem


def test_snapshot_bytes_reproducible(hexagon_chords, tmp_path):
    g = hexagon_chords
    a, b = tmp_path / "a.bin", tmp_path / "b.bin"
    save_snapshot(run(g, 4, seed=9), g, a)
    save_snapshot(run(g, 4, seed=9), g, b)
    assert a.read_bytes() == b.read_bytes()


def test_truncated_file_rejected(hexagon_chords, tmp_path):
    g = hexagon_chords
    p = tmp_path / "s.bin"
    save_snapshot(run(g, 4, seed=1), g, p)
    blob = p.read_bytes()
    for cut in (4, len(blob) // 2, len(blob) - 3):
        p.write_bytes(blob[:cut])
        with pytest.raises(SnapshotError, match="truncated|short"):
            load_snapshot(p)


def test_bad_magic_rejected(tmp_path):
    p = tmp_path / "s.bin"
    p.write_bytes(b"NOPE" + b"\0" * 60)
    with pytest.raises(SnapshotError, match="magic"):
        load_snapshot(p)


def test_unknown_version_rejected(hexagon_chords, tmp_path):
    g = hexagon_chords
    p = tmp_path / "s.bin"
    save_snapshot(run(g, 2, seed=1), g, p)
    blob = bytearray(p.read_bytes())
    blob[4] = 99  # version halfword
    p.write_bytes(bytes(blob))
    with pytest.raises(SnapshotError, match="version"):
        load_snapshot(p)


def test_corrupt_payload_rejected_by_checksum(hexagon_chords, tmp_path):
    g = hexagon_chords
    p = tmp_path / "s.bin"
    save_snapshot(run(g, 3, seed=2), g, p)
    blob = bytearray(p.read_bytes())
    blob[-5] ^= 0xFF
    p.write_bytes(bytes(blob))
    with pytest.raises(SnapshotError, match="checksum|quadruple|slot|audit"):
        load_snapshot(p)


def test_inconsistent_state_refused_on_save(hexagon_chords, tmp_path):
    g = hexagon_chords
    s = run(g, 3, seed=2)
    s.labels[0][1] = 999  # break value agreement
    with pytest.raises(SnapshotError, match="inconsistent"):
        save_snapshot(s, g, tmp_path / "s.bin")
    assert not os.path.exists(tmp_path / "s.bin")


def test_tampered_receiver_records_rejected(hexagon_chords, tmp_path):
    # a snapshot violating provenance/record duality must not load
    g = hexagon_chords
    p = tmp_path / "s.bin"
    s = run(g, 3, seed=2)
    save_snapshot(s, g, p)
    blob = bytearray(p.read_bytes())
    # The receiver section is last: zero out its final quadruple's target,
    # then fix up that section's crc so only validation can catch it.
    import struct
    import zlib

    quad_bytes = 32
    payload_start = len(blob) - quad_bytes * sum(
        len(r) for recs in s.receivers.values() for r in recs
    )
    section_head = payload_start - 12
    length = struct.unpack("<Q", blob[section_head : section_head + 8])[0]
    blob[-16:-8] = struct.pack("<Q", 10**9)  # receiver target -> bogus vertex
    blob[section_head + 8 : section_head + 12] = struct.pack(
        "<I", zlib.crc32(bytes(blob[payload_start : payload_start + length]))
    )
    p.write_bytes(bytes(blob))
    with pytest.raises(SnapshotError):
        load_snapshot(p)


graphs = st.sets(
    st.tuples(st.integers(0, 8), st.integers(0, 8)).filter(lambda p: p[0] < p[1]),
    min_size=1,
    max_size=14,
)


@settings(max_examples=30, deadline=None)
@given(edges=graphs, t=st.integers(0, 6), seed=st.integers(0, 2**32))
def test_roundtrip_fuzz(edges, t, seed, tmp_path_factory):
    g = Graph.from_edges(edges)
    s = run(g, t, seed)
    p = tmp_path_factory.mktemp("snap") / "s.bin"
    save_snapshot(s, g, p)
    s2, g2 = load_snapshot(p)
    assert s2 == s and g2 == g
