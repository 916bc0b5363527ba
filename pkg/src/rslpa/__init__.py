"""Randomized speaker-listener label propagation with incremental updates."""

from .cost import CostPrediction, PcVariant, predict_cost
from .engine import (
    LabelState,
    exact_marginals,
    initialize,
    propagate_iteration,
    run,
    uniform_pick_distribution,
    validate_state,
)
from .errors import (
    BatchValidationError,
    ConsistencyError,
    ParseError,
    RslpaError,
    SequencingError,
    SnapshotError,
)
from .evaluation import EtaComparison, NmiReport, compare_eta, convergence_probe, nmi_overlapping
from .generate import generate_planted_cover_graph, generate_random_batch
from .graph import Category, EditBatch, Graph, VertexDelta, apply_batch, load_edge_list
from .incremental import (
    RepickDecision,
    UpdateMetrics,
    correction_propagate,
    decide_repick,
)
from .postprocess import (
    Cover,
    WeightedEdgeSet,
    components_above,
    compute_weights,
    edge_similarity,
    extract_cover,
    select_tau1,
    select_tau2,
    size_entropy,
)
from .rng import RngStream
from .simulator import (
    Cluster,
    RoundMetrics,
    sim_connected_components,
    sim_run_rslpa,
    sim_run_slpa,
    sim_run_update,
)
from .slpa import MemoryState, slpa_run, slpa_threshold, voting_distribution
from .snapshot import load_snapshot, save_snapshot

__version__ = "0.1.0"
