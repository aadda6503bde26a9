"""Deception-aware influence centralities on sheaf Laplacians of social networks."""

from .centrality import (
    CentralityKind,
    CentralityVector,
    Source,
    dff_centrality,
    laplacian_centrality,
    rank_vertices,
)
from .deception import (
    EPS_OPINION,
    DeceptionAssignment,
    RelationType,
    assign_relations_stratified,
    info_flow,
    public_opinions,
    restriction_scalar,
    sample_opinions,
)
from .errors import (
    DegenerateEnergyError,
    InsufficientVerticesError,
    NumericError,
    ParseError,
    SingularOpinionError,
)
from .experiment import ExperimentConfig, ExperimentReport, influence_score, run_single, tau_sweep
from .graph import Graph, delete_vertex, erdos_renyi, graph_laplacian, load_edge_list, serialize
from .sheaf import (
    CoboundaryMatrix,
    SheafLaplacian,
    assemble_from_blocks,
    build_coboundary,
    restrict_to_subgraph,
    sheaf_laplacian,
)
from .spectral import Spectrum, diffusion_distance_sq, eigh, laplacian_energy

__version__ = "0.1.0"
