"""Analytic cost model for incremental updates under uniform edits.

For a batch of m_d uniform deletions and m_a uniform insertions, p_c models
the probability that one picked edge was invalidated.  From it, the
survival probability of a slot picked at iteration t follows the recursion
Q(t) = (1 - p_c/t) * Q(t-1), and the expected number of slots needing an
update is eta_hat = T*V - V * sum(Q(t)).  The bounds correspond to every
pick chaining directly to an initial label (best case) and to maximal-depth
chains (worst case).

Two p_c variants ship.  The switched-edge factor printed in the source
material is (E - m_d)/(E - m_d + m_a), which is the probability a surviving
pick is *kept*, not switched; taken literally it gives p_c = 1 for an empty
batch.  The corrected variant uses the switch probability
m_a/(E - m_d + m_a), which satisfies p_c(0, 0) = 0 and p_c(E, 0) = 1.  The
corrected form is the default; the literal form stays available for
fidelity comparisons.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import RslpaError


class PcVariant(enum.Enum):
    CORRECTED = "corrected"
    LITERAL = "literal"


@dataclass(frozen=True)
class CostPrediction:
    """p_c plus the expected / best / worst slot-update counts."""

    p_c: float
    eta_expected: float
    eta_lower: float
    eta_upper: float
    variant: PcVariant
    vertices: int
    edges: int
    m_d: int
    m_a: int
    iterations: int


def p_c_value(edges: int, m_d: int, m_a: int, variant: PcVariant) -> float:
    """Probability that one picked edge was deleted or switched."""
    if edges <= 0:
        raise RslpaError("cost model needs at least one edge")
    if m_d > edges:
        raise RslpaError(f"cannot delete {m_d} of {edges} edges")
    if m_d < 0 or m_a < 0:
        raise RslpaError("edit counts must be non-negative")
    p_del = m_d / edges
    if m_d == edges:
        return 1.0
    if variant is PcVariant.CORRECTED:
        p_switch = m_a / (edges - m_d + m_a)
    else:
        p_switch = (edges - m_d) / (edges - m_d + m_a)
    return p_del + (1.0 - p_del) * p_switch


def predict_cost(
    vertices: int,
    edges: int,
    m_d: int,
    m_a: int,
    iterations: int,
    variant: PcVariant = PcVariant.CORRECTED,
) -> CostPrediction:
    """Expected update count and bounds for a uniform edit batch."""
    if vertices < 1:
        raise RslpaError("cost model needs at least one vertex")
    if iterations < 1:
        raise RslpaError("cost model needs at least one iteration")
    if edges == 0 and (m_d or m_a):
        raise RslpaError("cannot edit an edgeless graph in the cost model")
    pc = p_c_value(edges, m_d, m_a, variant) if edges else 0.0
    if pc == 0.0:
        return CostPrediction(
            p_c=0.0,
            eta_expected=0.0,
            eta_lower=0.0,
            eta_upper=0.0,
            variant=variant,
            vertices=vertices,
            edges=edges,
            m_d=m_d,
            m_a=m_a,
            iterations=iterations,
        )
    T = iterations
    V = vertices
    q = 1.0
    q_sum = 0.0
    for t in range(1, T + 1):
        q *= 1.0 - pc / t
        q_sum += q
    eta_hat = T * V - V * q_sum
    eta_lower = T * V * pc
    if pc == 0.0:
        eta_upper = 0.0  # analytic limit of the closed form
    else:
        eta_upper = T * V - V * (1.0 - pc - (1.0 - pc) ** (T + 1)) / pc
    return CostPrediction(
        p_c=pc,
        eta_expected=eta_hat,
        eta_lower=eta_lower,
        eta_upper=eta_upper,
        variant=variant,
        vertices=V,
        edges=edges,
        m_d=m_d,
        m_a=m_a,
        iterations=T,
    )


def describe_prediction(pred: CostPrediction) -> str:
    """Key=value report plus a note documenting the two p_c variants."""
    lines = [
        f"variant={pred.variant.value}",
        f"pc={pred.p_c:.6g}",
        f"eta={pred.eta_expected:.6g}",
        f"lower={pred.eta_lower:.6g}",
        f"upper={pred.eta_upper:.6g}",
        f"V={pred.vertices} E={pred.edges} md={pred.m_d} ma={pred.m_a} T={pred.iterations}",
    ]
    if pred.edges:
        other = (
            PcVariant.LITERAL
            if pred.variant is PcVariant.CORRECTED
            else PcVariant.CORRECTED
        )
        alt = p_c_value(pred.edges, pred.m_d, pred.m_a, other)
        lines.append(f"pc_{other.value}={alt:.6g}")
    lines.append(
        "# note: the literal switched-edge factor (E-md)/(E-md+ma) is the keep "
        "probability and yields pc=1 with no edits; the corrected variant uses "
        "the switch probability ma/(E-md+ma)."
    )
    return "\n".join(lines)
