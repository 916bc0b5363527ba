"""Operator-facing command surface.

Detection, incremental update, and community extraction are separate
commands so label maintenance can run continuously while covers are only
materialized when needed.  Every randomized command takes an explicit
--seed or generates one and prints it, so any published number can be
replayed.  Exit codes: 0 success, 2 bad input or validation failure, 1
unexpected runtime failure.
"""

from __future__ import annotations

import json
import os
import secrets
import sys
import time

import click

from .cost import PcVariant, describe_prediction, predict_cost
from .engine import run
from .errors import RslpaError
from .evaluation import nmi_overlapping
from .generate import generate_planted_cover_graph, generate_random_batch
from .graph import apply_batch, load_edge_list
from .incremental import correction_propagate
from .postprocess import (
    Cover,
    compute_weights,
    extract_cover,
    select_tau1,
    select_tau2,
    size_entropy,
)
from .rng import RngStream
from .simulator import sim_run_rslpa, sim_run_update
from .snapshot import load_snapshot, save_snapshot
from . import textio


def _bail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _seed_or_new(seed: int | None) -> int:
    if seed is None:
        seed = secrets.randbits(48)
        click.echo(f"seed={seed}")
    return seed


def _write_metrics(path, payload: dict):
    if path:
        with open(path, "w", encoding="utf-8") as out:
            json.dump(payload, out, indent=2, sort_keys=True)
            out.write("\n")


@click.group()
def main():
    """Overlapping community detection with incremental label maintenance."""


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--seed", type=int, default=None, help="Master seed (generated and printed if omitted).")
@click.option("--iterations", "-T", "iterations", type=int, default=200, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--simulate-workers", type=int, default=0, help="Run under the superstep harness with this many workers and print per-iteration message counts.")
@click.option("--metrics-out", type=click.Path(), default=None)
def detect(graph_path, seed, iterations, out_path, simulate_workers, metrics_out):
    """Run label propagation on a graph and write a snapshot."""
    seed = _seed_or_new(seed)
    if iterations < 0:
        _bail("--iterations must be non-negative")
    try:
        g, stats = load_edge_list(graph_path)
        started = time.perf_counter()
        rounds = None
        if simulate_workers > 0:
            state, rounds = sim_run_rslpa(g, iterations, seed, simulate_workers)
            for rm in rounds:
                click.echo(
                    f"iteration={rm.round} logical={rm.logical} inter_worker={rm.inter_worker}"
                )
        else:
            state = run(g, iterations, seed)
        elapsed = time.perf_counter() - started
        save_snapshot(state, g, out_path)
    except RslpaError as exc:
        _bail(str(exc))
    click.echo(
        f"vertices={g.vertex_count} edges={g.edge_count} T={iterations} seed={seed} "
        f"dropped_duplicates={stats.duplicate_edges} dropped_self_loops={stats.self_loops} "
        f"wall_time={elapsed:.3f}s snapshot={out_path}"
    )
    _write_metrics(
        metrics_out,
        {
            "command": "detect",
            "vertices": g.vertex_count,
            "edges": g.edge_count,
            "iterations": iterations,
            "seed": seed,
            "wall_time_s": elapsed,
            "rounds": [
                {"round": rm.round, "logical": rm.logical, "inter_worker": rm.inter_worker}
                for rm in rounds
            ]
            if rounds
            else None,
        },
    )


@main.command()
@click.option("--snapshot", "snapshot_path", required=True, type=click.Path(exists=True))
@click.option("--batch", "batch_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--pc-formula", type=click.Choice(["corrected", "literal"]), default="corrected", show_default=True)
@click.option("--lenient", is_flag=True, help="Skip no-op edits instead of failing.")
@click.option("--simulate-workers", type=int, default=0)
@click.option("--metrics-out", type=click.Path(), default=None)
def update(snapshot_path, batch_path, out_path, pc_formula, lenient, simulate_workers, metrics_out):
    """Apply an edit batch to a snapshot and propagate corrections."""
    try:
        state, g = load_snapshot(snapshot_path)
        batch = textio.read_batch(batch_path)
        old_edges = g.edge_count
        new_graph, deltas = apply_batch(g, batch, strict=not lenient)
        started = time.perf_counter()
        if simulate_workers > 0:
            state, metrics, rounds = sim_run_update(
                state, new_graph, deltas, state.seed, simulate_workers
            )
        else:
            rounds = None
            state, metrics = correction_propagate(
                state, new_graph, deltas, RngStream(state.seed)
            )
        elapsed = time.perf_counter() - started
        save_snapshot(state, new_graph, out_path)
        variant = PcVariant(pc_formula)
        prediction = None
        if old_edges and state.T >= 1:
            prediction = predict_cost(
                vertices=len(state.active) if state.active else new_graph.vertex_count,
                edges=old_edges,
                m_d=batch.m_d,
                m_a=batch.m_a,
                iterations=state.T,
                variant=variant,
            )
    except RslpaError as exc:
        _bail(str(exc))
    click.echo(
        f"eta={metrics.eta} repicks={metrics.repicks} waves={metrics.waves} "
        f"record_removals={metrics.record_removals} wall_time={elapsed:.3f}s "
        f"snapshot={out_path}"
    )
    if prediction is not None:
        click.echo(describe_prediction(prediction))
        in_bounds = prediction.eta_lower - 1e-9 <= metrics.eta <= prediction.eta_upper + 1e-9
        click.echo(f"eta_in_bounds={'yes' if in_bounds else 'no'}")
    _write_metrics(
        metrics_out,
        {
            "command": "update",
            "eta": metrics.eta,
            "repicks": metrics.repicks,
            "waves": metrics.waves,
            "messages": metrics.messages,
            "record_removals": metrics.record_removals,
            "registrations": metrics.registrations,
            "retired_vertices": metrics.retired_vertices,
            "activated_vertices": metrics.activated_vertices,
            "wall_time_s": elapsed,
            "prediction": {
                "variant": prediction.variant.value,
                "p_c": prediction.p_c,
                "eta_expected": prediction.eta_expected,
                "eta_lower": prediction.eta_lower,
                "eta_upper": prediction.eta_upper,
            }
            if prediction
            else None,
            "rounds": [
                {
                    "round": rm.round,
                    "kind": rm.kind,
                    "logical": rm.logical,
                    "inter_worker": rm.inter_worker,
                }
                for rm in rounds
            ]
            if rounds
            else None,
        },
    )


@main.command()
@click.option("--snapshot", "snapshot_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--tau1", type=float, default=None)
@click.option("--tau2", type=float, default=None)
@click.option("--step", type=float, default=None, help="Scan granularity (default 0.001, env RSLPA_TAU_STEP).")
def postprocess(snapshot_path, out_path, tau1, tau2, step):
    """Extract an overlapping cover from a snapshot."""
    if step is None:
        step = float(os.environ.get("RSLPA_TAU_STEP", "0.001"))
    for name, value in (("tau1", tau1), ("tau2", tau2)):
        if value is not None and not 0.0 <= value <= 1.0:
            _bail(f"--{name} must lie in [0, 1]")
    if tau1 is not None and tau2 is not None and tau2 > tau1:
        _bail("--tau2 must not exceed --tau1")
    try:
        state, g = load_snapshot(snapshot_path)
        w = compute_weights(g, state)
        if tau2 is None:
            tau2 = select_tau2(w)
        if tau1 is None:
            tau1 = select_tau1(g, w, tau2, step=step)
            if tau1 < tau2:
                tau1 = tau2
        cover = extract_cover(g, w, tau1, tau2)
        entropy = size_entropy([len(c) for c in cover.communities], len(g.active_vertices))
        textio.write_cover(cover, out_path)
    except RslpaError as exc:
        _bail(str(exc))
    click.echo(
        f"tau2={tau2:.6g} tau1={tau1:.6g} entropy={entropy:.6g} "
        f"communities={len(cover.communities)} unassigned={len(cover.unassigned)} "
        f"cover={out_path}"
    )


@main.command("eval")
@click.option("--pred", "pred_path", required=True, type=click.Path(exists=True))
@click.option("--truth", "truth_path", required=True, type=click.Path(exists=True))
@click.option("--truth-format", type=click.Choice(["cover", "lfr"]), default="cover", show_default=True)
@click.option("--graph", "graph_path", type=click.Path(exists=True), default=None, help="Graph defining the vertex universe (degree-0 vertices are excluded); defaults to the union of both covers.")
def eval_covers(pred_path, truth_path, truth_format, graph_path):
    """Extended NMI between a predicted cover and a ground truth."""
    try:
        pred = textio.read_cover(pred_path)
        if truth_format == "lfr":
            truth = textio.read_lfr_cover(truth_path)
        else:
            truth = textio.read_cover(truth_path)
        if graph_path:
            g, _ = load_edge_list(graph_path)
            universe = frozenset(g.active_vertices)
            pred = Cover([c & universe for c in pred.communities if len(c & universe) >= 1])
            truth = Cover([c & universe for c in truth.communities if len(c & universe) >= 1])
        else:
            universe = pred.vertices | truth.vertices
        report = nmi_overlapping(pred, truth, universe)
    except RslpaError as exc:
        _bail(str(exc))
    click.echo(
        f"nmi={report.score:.6g} h_pred_given_truth={report.h_a_given_b:.6g} "
        f"h_truth_given_pred={report.h_b_given_a:.6g}"
    )


@main.command()
@click.option("--V", "vertices", required=True, type=int)
@click.option("--E", "edges", required=True, type=int)
@click.option("--md", "m_d", required=True, type=int)
@click.option("--ma", "m_a", required=True, type=int)
@click.option("--T", "iterations", required=True, type=int)
@click.option("--variant", type=click.Choice(["corrected", "literal"]), default="corrected", show_default=True)
def predict(vertices, edges, m_d, m_a, iterations, variant):
    """Analytic cost prediction for a uniform edit batch."""
    try:
        pred = predict_cost(vertices, edges, m_d, m_a, iterations, PcVariant(variant))
    except RslpaError as exc:
        _bail(str(exc))
    click.echo(describe_prediction(pred))


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--size", required=True, type=int)
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_path", required=True, type=click.Path())
def genbatch(graph_path, size, seed, out_path):
    """Sample a uniform edit batch (half deletions, half insertions)."""
    seed = _seed_or_new(seed)
    try:
        g, _ = load_edge_list(graph_path)
        batch = generate_random_batch(g, size, seed)
        textio.write_batch(batch, out_path)
    except RslpaError as exc:
        _bail(str(exc))
    click.echo(f"insertions={batch.m_a} deletions={batch.m_d} seed={seed} batch={out_path}")


@main.command()
@click.option("--communities", required=True, type=int)
@click.option("--size", required=True, type=int, help="Vertices per community.")
@click.option("--overlap", required=True, type=int, help="Shared vertices per adjacent community pair.")
@click.option("--p-in", required=True, type=float)
@click.option("--p-out", required=True, type=float)
@click.option("--seed", type=int, default=None)
@click.option("--graph-out", required=True, type=click.Path())
@click.option("--truth-out", required=True, type=click.Path())
def genplanted(communities, size, overlap, p_in, p_out, seed, graph_out, truth_out):
    """Generate a planted-cover benchmark graph with ground truth."""
    seed = _seed_or_new(seed)
    try:
        g, truth = generate_planted_cover_graph(communities, size, overlap, p_in, p_out, seed)
        textio.write_edge_list(g, graph_out)
        textio.write_cover(truth, truth_out)
    except RslpaError as exc:
        _bail(str(exc))
    click.echo(
        f"vertices={g.vertex_count} edges={g.edge_count} communities={len(truth.communities)} "
        f"seed={seed} graph={graph_out} truth={truth_out}"
    )


if __name__ == "__main__":
    main()
