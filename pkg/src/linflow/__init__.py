"""Simulation and analysis of distributed flows that solve z = Hy.

Each node of a network owns one row (or group of rows) of the linear
system and moves its estimate continuously, mixing consensus with its
neighbors and projection onto its own solution set. The package builds
the affine geometry, schedules time-varying coupling graphs, integrates
the flows exactly per switching piece, and checks the closed-form
predictions for limits and equilibria.
"""

from .affine import (
    AffinePatch,
    CaseLabel,
    Hyperplane,
    LinearSystem,
    check_origin_symmetry,
    classify,
    normalize_system,
    probe_projection_boundedness,
    project_intersection,
)
from .analysis import (
    LimitPrediction,
    LtiReport,
    coherence,
    flow_potential,
    lti_analysis,
    ls_objective,
    monitor_ls_objective_average,
    monitor_potential,
    predict_limit_balanced,
    predict_limit_fixed,
)
from .config import MONITOR_NAMES, ExperimentConfig, parse_config, parse_graph_only
from .demos import DEMO_INDICES, DemoCase, get_demo
from .errors import (
    ConfigError,
    DimensionMismatchError,
    EmptyIntersectionError,
    InconsistentPatchError,
    LinflowError,
    NonFiniteStateError,
    NotPositiveDefiniteError,
    NotStronglyConnectedError,
    NotSymmetricError,
    PreconditionError,
    RankDeficientError,
    SingularMatrixError,
    TimeZeroDecayError,
    ZeroRowError,
)
from .flows import (
    FLOW_KINDS,
    KIND_CONSENSUS_PROJECTION,
    KIND_CONSENSUS_PROJECTION_DECAY,
    KIND_PROJECTION_CONSENSUS,
    KIND_PROJECTION_CONSENSUS_AUGMENTED,
    FlowSpec,
    affine_parts,
    rhs,
    rhs_disturbed_consensus,
)
from .graphsig import (
    ConnectivityReport,
    GraphSignal,
    SignalMode,
    WeightedDigraph,
    WindowCheck,
    arc_integral,
    check_connectivity,
    graph_at,
    is_balanced,
    is_bidirectional,
    is_strongly_connected,
    is_symmetric,
    laplacian,
    left_eigenvector,
)
from .sim import (
    DIVERGENCE_LIMIT,
    IntegratorConfig,
    Trajectory,
    monitor_average,
    monitor_disagreement,
    monitor_intersection_distance,
    monitor_limit_gap,
    monitor_own_set_distance,
    monitor_total_sq_error,
    monitor_worst_sq_error,
    monitor_worst_sq_set_distance,
    simulate,
    simulate_disturbed,
)

__version__ = "0.1.0"
