"""Evaluation utilities: cover NMI, cost-model comparison, convergence probe.

The NMI here is the extended variant for overlapping covers: each community
is a binary membership variable over the universe; each community of one
cover is matched to the community of the other cover minimizing the
normalized conditional entropy (unmatchable communities contribute 1), and
the score averages both directions.  Identical covers score 1 regardless of
community ordering or ids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import RslpaError
from .postprocess import Cover


def _h(p: float) -> float:
    return -p * math.log(p) if p > 0.0 else 0.0


def _cover_sets(cover: Cover, universe: frozenset) -> list[frozenset]:
    sets = []
    for comm in cover.communities:
        if not comm <= universe:
            raise RslpaError("cover contains vertices outside the universe")
        sets.append(comm)
    if not sets:
        raise RslpaError("cover has no communities")
    return sets


def _direction(xs: list[frozenset], ys: list[frozenset], n: int) -> float:
    """Mean over X-communities of H(X_k | best Y_l) / H(X_k)."""
    total = 0.0
    for x in xs:
        a = len(x)
        hx = _h(a / n) + _h(1 - a / n)
        best = None
        for y in ys:
            n11 = len(x & y)
            n10 = a - n11
            n01 = len(y) - n11
            n00 = n - a - n01
            # Acceptance constraint: reject matches dominated by anti-correlation.
            if _h(n11 / n) + _h(n00 / n) <= _h(n10 / n) + _h(n01 / n):
                continue
            h_joint = _h(n11 / n) + _h(n10 / n) + _h(n01 / n) + _h(n00 / n)
            h_y = _h(len(y) / n) + _h(1 - len(y) / n)
            cond = h_joint - h_y
            if best is None or cond < best:
                best = cond
        if hx == 0.0:
            # A community equal to the whole universe carries no information
            # that needs explaining; it contributes nothing either way.
            term = 0.0
        elif best is None:
            term = 1.0
        else:
            term = min(max(best / hx, 0.0), 1.0)
        total += term
    return total / len(xs)


@dataclass(frozen=True)
class NmiReport:
    """Extended NMI score plus the per-direction normalized conditional entropies."""

    score: float
    h_a_given_b: float
    h_b_given_a: float


def nmi_overlapping(a: Cover, b: Cover, universe) -> NmiReport:
    """Extended NMI between two covers over an explicit vertex universe."""
    uni = frozenset(universe)
    if not uni:
        raise RslpaError("NMI needs a non-empty universe")
    n = len(uni)
    xs = _cover_sets(a, uni)
    ys = _cover_sets(b, uni)
    h_ab = _direction(xs, ys, n)
    h_ba = _direction(ys, xs, n)
    return NmiReport(score=1.0 - 0.5 * (h_ab + h_ba), h_a_given_b=h_ab, h_b_given_a=h_ba)


@dataclass(frozen=True)
class EtaComparison:
    """Measured update count against the analytic prediction."""

    measured_eta: int
    predicted_eta: float
    eta_lower: float
    eta_upper: float
    in_bounds: bool

    def report(self) -> str:
        return (
            f"eta_measured={self.measured_eta} eta_predicted={self.predicted_eta:.6g} "
            f"lower={self.eta_lower:.6g} upper={self.eta_upper:.6g} "
            f"in_bounds={'yes' if self.in_bounds else 'NO'}"
        )


def compare_eta(measured, predicted) -> EtaComparison:
    """Line up an UpdateMetrics against a CostPrediction."""
    eta = measured.eta
    # Half-open tolerance so the exact anchors (0 and T*V) stay in bounds.
    in_bounds = predicted.eta_lower - 1e-9 <= eta <= predicted.eta_upper + 1e-9
    return EtaComparison(
        measured_eta=eta,
        predicted_eta=predicted.eta_expected,
        eta_lower=predicted.eta_lower,
        eta_upper=predicted.eta_upper,
        in_bounds=in_bounds,
    )


def convergence_probe(g, truth: Cover, t_values, seeds) -> dict[int, float]:
    """Mean NMI of the extracted cover against ``truth`` for each iteration count.

    Runs the full pipeline (propagation, weights, automatic thresholds,
    extraction) per (T, seed).  Degenerate runs that produce no communities
    score 0.  The truth cover is restricted to the active universe.
    """
    from .engine import run
    from .postprocess import compute_weights, extract_cover, select_tau1, select_tau2

    universe = frozenset(g.active_vertices)
    if not universe:
        raise RslpaError("graph has no active vertices to probe")
    truth_active = Cover([c & universe for c in truth.communities if len(c & universe) >= 1])
    table: dict[int, float] = {}
    for T in t_values:
        if T < 1:
            # No propagation: sequences carry no information, every weight
            # is zero and extraction is vacuous.  Report as degenerate.
            table[T] = 0.0
            continue
        scores = []
        for seed in seeds:
            state = run(g, T, seed)
            try:
                w = compute_weights(g, state)
                tau2 = select_tau2(w)
                tau1 = select_tau1(g, w, tau2)
                cover = extract_cover(g, w, tau1, tau2)
                if not cover.communities:
                    scores.append(0.0)
                    continue
                scores.append(nmi_overlapping(cover, truth_active, universe).score)
            except RslpaError:
                scores.append(0.0)  # degenerate (e.g. T=0: no communities)
        table[T] = sum(scores) / len(scores)
    return table
