"""Versioned binary snapshots of full engine state.

Layout: a fixed header (magic, version, master seed, epoch, T, counts)
followed by length-prefixed, CRC-checked sections of little-endian
fixed-width integers: vertex ids, edges, label sequences, provenance
fields, and the receiver records as flat (owner, t, tar, k) quadruples in
canonical order.  Canonical ordering makes snapshots byte-reproducible:
equal states produce equal files.

Loading re-validates every state invariant; a corrupt or inconsistent file
is rejected, never repaired silently.
"""

from __future__ import annotations

import os
import struct
import sys
import zlib
from array import array

from .engine import LabelState, validate_state
from .errors import ConsistencyError, SnapshotError
from .graph import Graph

MAGIC = b"RSLP"
VERSION = 1
_HEADER = struct.Struct("<4sHxxQIIQQ")  # magic, version, seed, epoch, T, |V|, |E|
_SECTION = struct.Struct("<QI")  # payload byte length, crc32

_BIG_ENDIAN = sys.byteorder == "big"


def _u64_bytes(values) -> bytes:
    arr = array("Q", values)
    if _BIG_ENDIAN:
        arr.byteswap()
    return arr.tobytes()


def _u64_list(raw: bytes) -> list[int]:
    arr = array("Q")
    arr.frombytes(raw)
    if _BIG_ENDIAN:
        arr.byteswap()
    return arr.tolist()


def _write_section(out, values):
    payload = _u64_bytes(values)
    out.write(_SECTION.pack(len(payload), zlib.crc32(payload)))
    out.write(payload)


def _read_section(fh, what: str) -> list[int]:
    head = fh.read(_SECTION.size)
    if len(head) != _SECTION.size:
        raise SnapshotError(f"truncated snapshot: missing {what} section header")
    length, crc = _SECTION.unpack(head)
    payload = fh.read(length)
    if len(payload) != length:
        raise SnapshotError(f"truncated snapshot: {what} section cut short")
    if zlib.crc32(payload) != crc:
        raise SnapshotError(f"checksum mismatch in {what} section")
    return _u64_list(payload)


def save_snapshot(state: LabelState, g: Graph, path) -> None:
    """Atomically write state + graph; the state is validated first."""
    try:
        validate_state(state, g)
    except ConsistencyError as exc:
        raise SnapshotError(f"refusing to save inconsistent state: {exc}") from exc

    verts = sorted(g.vertices)
    edges = sorted(g.edges())
    T = state.T

    tmp = f"{os.fspath(path)}.tmp.{os.getpid()}"
    try:
        with open(tmp, "wb") as out:
            out.write(
                _HEADER.pack(
                    MAGIC, VERSION, state.seed, state.epoch, T, len(verts), len(edges)
                )
            )
            _write_section(out, verts)
            _write_section(out, [x for e in edges for x in e])

            labels_flat: list[int] = []
            for v in verts:
                seq = state.labels[v]
                labels_flat.append(len(seq))
                labels_flat.extend(seq)
            _write_section(out, labels_flat)

            prov_flat: list[int] = []
            for v in verts:
                if v in state.active:
                    prov_flat.extend(state.srcs[v][1:])
                    prov_flat.extend(state.poss[v][1:])
            _write_section(out, prov_flat)

            quads: list[int] = []
            for v in verts:
                for t, rec in enumerate(state.receivers[v]):
                    for tar, k in sorted(rec):
                        quads.extend((v, t, tar, k))
            _write_section(out, quads)
        os.replace(tmp, path)
    except OSError as exc:
        raise SnapshotError(f"cannot write snapshot to {path}: {exc}") from exc
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def load_snapshot(path) -> tuple[LabelState, Graph]:
    """Read and fully re-validate a snapshot; returns (state, graph)."""
    try:
        fh = open(path, "rb")
    except OSError as exc:
        raise SnapshotError(f"cannot open snapshot {path}: {exc}") from exc
    with fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise SnapshotError("truncated snapshot: header incomplete")
        magic, version, seed, epoch, T, n_verts, n_edges = _HEADER.unpack(head)
        if magic != MAGIC:
            raise SnapshotError("not a snapshot file (bad magic)")
        if version != VERSION:
            raise SnapshotError(f"unsupported snapshot version {version}")

        verts = _read_section(fh, "vertex")
        if len(verts) != n_verts:
            raise SnapshotError("vertex count disagrees with header")
        edge_flat = _read_section(fh, "edge")
        if len(edge_flat) != 2 * n_edges:
            raise SnapshotError("edge count disagrees with header")
        edges = list(zip(edge_flat[0::2], edge_flat[1::2]))
        graph = Graph.from_edges(edges, vertices=verts)

        labels_flat = _read_section(fh, "label")
        prov_flat = _read_section(fh, "provenance")
        quads = _read_section(fh, "receiver")
        if fh.read(1):
            raise SnapshotError("trailing bytes after final section")

    state = LabelState(seed)
    state.T = T
    state.epoch = epoch
    idx = 0
    for v in verts:
        if idx >= len(labels_flat):
            raise SnapshotError("label section too short")
        n = labels_flat[idx]
        idx += 1
        state.labels[v] = labels_flat[idx : idx + n]
        if len(state.labels[v]) != n:
            raise SnapshotError("label section too short")
        idx += n
    if idx != len(labels_flat):
        raise SnapshotError("label section has trailing data")

    state.active = {v for v in verts if graph.degree(v) > 0}
    idx = 0
    for v in verts:
        if v in state.active:
            srcs = prov_flat[idx : idx + T]
            poss = prov_flat[idx + T : idx + 2 * T]
            if len(poss) != T:
                raise SnapshotError("provenance section too short")
            idx += 2 * T
            state.srcs[v] = [None] + srcs
            state.poss[v] = [None] + poss
        else:
            state.srcs[v] = [None]
            state.poss[v] = [None]
    if idx != len(prov_flat):
        raise SnapshotError("provenance section has trailing data")

    for v in verts:
        state.receivers[v] = [set() for _ in range(T + 1 if v in state.active else 1)]
    if len(quads) % 4:
        raise SnapshotError("receiver section is not whole quadruples")
    for i in range(0, len(quads), 4):
        owner, t, tar, k = quads[i : i + 4]
        if owner not in state.receivers or t >= len(state.receivers[owner]):
            raise SnapshotError(f"receiver record for missing slot ({owner},{t})")
        state.receivers[owner][t].add((tar, k))

    try:
        validate_state(state, graph)
    except ConsistencyError as exc:
        raise SnapshotError(f"snapshot fails invariant audit: {exc}") from exc
    return state, graph
