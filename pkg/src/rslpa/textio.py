"""Readers and writers for the text formats.

Edge list: two whitespace-separated decimal integers per line.  Batch file:
``+ u v`` inserts, ``- u v`` deletes.  Cover file: one community per line,
members space-separated, communities by smallest member and members
ascending.  Ground-truth files in LFR style list one vertex per line
followed by the ids of the communities it belongs to.  ``#`` comments and
blank lines are ignored everywhere; LF and CRLF both work.
"""

from __future__ import annotations

from .errors import ParseError
from .graph import EditBatch, Graph
from .postprocess import Cover


def _iter_lines(source):
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, "r", encoding="utf-8") as fh:
            yield from fh
    else:
        yield from source


def _content_lines(source):
    for lineno, raw in enumerate(_iter_lines(source), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as out:
        for u, v in sorted(g.edges()):
            out.write(f"{u} {v}\n")


def read_batch(source) -> EditBatch:
    """Parse a batch file of ``+ u v`` and ``- u v`` lines."""
    insertions = set()
    deletions = set()
    for lineno, line in _content_lines(source):
        parts = line.split()
        if len(parts) != 3 or parts[0] not in "+-":
            raise ParseError(f"expected '+ u v' or '- u v', got {line!r}", lineno)
        try:
            u, v = int(parts[1]), int(parts[2])
        except ValueError:
            raise ParseError(f"non-integer vertex id in {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise ParseError(f"negative vertex id in {line!r}", lineno)
        (insertions if parts[0] == "+" else deletions).add((u, v))
    return EditBatch(insertions=frozenset(insertions), deletions=frozenset(deletions))


def write_batch(batch: EditBatch, path) -> None:
    with open(path, "w", encoding="utf-8") as out:
        for u, v in sorted(batch.insertions):
            out.write(f"+ {u} {v}\n")
        for u, v in sorted(batch.deletions):
            out.write(f"- {u} {v}\n")


def write_cover(cover: Cover, path) -> None:
    """One community per line; ordering is canonical for diff-based testing."""
    with open(path, "w", encoding="utf-8") as out:
        for comm in cover.communities:
            out.write(" ".join(str(v) for v in sorted(comm)) + "\n")


def read_cover(source) -> Cover:
    communities = []
    for lineno, line in _content_lines(source):
        try:
            members = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"non-integer vertex id in {line!r}", lineno) from None
        if members:
            communities.append(frozenset(members))
    return Cover(communities)


def read_lfr_cover(source) -> Cover:
    """LFR-style ground truth: ``vertex  community [community ...]`` per line."""
    members: dict[int, set[int]] = {}
    for lineno, line in _content_lines(source):
        parts = line.split()
        if len(parts) < 2:
            raise ParseError("expected a vertex id and at least one community id", lineno)
        try:
            vertex = int(parts[0])
            comm_ids = [int(tok) for tok in parts[1:]]
        except ValueError:
            raise ParseError(f"non-integer token in {line!r}", lineno) from None
        for cid in comm_ids:
            members.setdefault(cid, set()).add(vertex)
    return Cover(members.values())
