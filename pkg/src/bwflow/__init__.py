"""
bwflow: optimal-transport flow matching for graph generation.

Graphs are modeled as Gaussian Markov random fields whose precision is the
(optionally regularized) Laplacian; distances, interpolations and
velocities between two graphs come from the 2-Wasserstein geometry of
those Gaussians. On top sit discrete and continuous flow-matching
samplers, pluggable denoisers, synthetic datasets and evaluation metrics,
all reachable from the `bwflow` command line.
"""

__version__ = "0.1.0"

from .graph import (  # noqa: F401
    DisconnectedGraph,
    Graph,
    GraphMRF,
    SingularCovariance,
    adjacency_from_laplacian,
    graph_from_dict,
    graph_to_dict,
    laplacian,
    load_graph,
    load_graphs,
    mrf_from_graph,
    one_hot_features,
    sample_features,
    save_graph,
    save_graphs,
    validate,
    zero_eig_count,
)
from .linalg import (  # noqa: F401
    DEFAULT_TOL,
    NotPSD,
    RankTolerance,
    Spectrum,
    SymmetryViolation,
    center,
    check_symmetric,
    eig_sym,
    lsqr_solve,
    pinv_via_lsqr,
    psd_pinv,
    psd_power,
    psd_sqrt,
    symmetrize,
)
from .metric import (  # noqa: F401
    GaussianMeasure,
    bures_psd,
    gaussian_w2_sq,
    graph_bw_distance,
    graph_bw_terms,
    mrf_covariance,
)
from .interp import (  # noqa: F401
    InterpScheme,
    PathPoint,
    baseline_interpolate,
    bw_interpolate,
    path_sweep,
    transport_map,
)
from .velocity import (  # noqa: F401
    DiscreteVelocity,
    GraphVelocity,
    TimeSingularity,
    apply_path_operator,
    bw_velocity,
    discrete_edge_velocity,
    discrete_node_velocity,
    edge_channel_rates,
    numerical_velocity,
    path_operator,
)
from .denoiser import (  # noqa: F401
    DenoiserOutput,
    KnnDenoiser,
    OracleDenoiser,
    encode_graph,
    graph_distance,
    knn_predict,
    oracle_predict,
)
from .flow import (  # noqa: F401
    FlowConfig,
    TrainingSample,
    apply_time_distortion,
    cfm_loss,
    flow_config_from_dict,
    load_flow_config,
    make_training_sample,
    sample,
    save_flow_config,
)
from .data import (  # noqa: F401
    ReferenceDistribution,
    draw_reference,
    er_sample,
    estimate_marginal,
    sbm_sample,
    symmetric_bernoulli,
    tree_sample,
)
from .stats import (  # noqa: F401
    EvalReport,
    StatDescriptor,
    a_ratio,
    always_true,
    default_stats,
    is_connected,
    is_tree,
    median_bandwidth,
    mmd_sq,
    report_csv_rows,
    stat_histogram,
    vun,
    wl_hash,
)
