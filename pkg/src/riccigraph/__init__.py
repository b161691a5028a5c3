"""Graph curvature engine: Ollivier-Ricci and Lin-Lu-Yau curvature on
(di)graphs via exact 1-Wasserstein optimal transport, plus the
curvature-informed clustering and rewiring algorithms built on top."""

from .graph import (
    Graph,
    GraphMetric,
    UNREACHABLE,
    all_pairs_distances,
    degrees,
    graph_distance,
    graph_from_json,
    graph_to_json,
    is_finite,
    parse_edge_list,
    sbm_generate,
    serialize_edge_list,
    triangle_count,
)
from .measures import (
    VertexMeasure,
    dirac,
    jump,
    lly_measure,
    pushforward,
    yamada_measure,
)
from .transport import (
    DualCertificate,
    SinkhornResult,
    TransportPlan,
    duality_gap,
    sinkhorn_approx,
    unit_split_oracle,
    wasserstein1,
    wasserstein1_dual,
)
from .curvature import (
    CurvatureRecord,
    concavity_check,
    contraction_check,
    curvature_sweep,
    diameter_bound_check,
    geodesic_propagation_check,
    jost_liu_lower_bound,
    jost_liu_triangle_lower_bound,
    lly_curvature,
    lly_upper_bound,
    orc_alpha,
)
from .directed import (
    BranchingClass,
    BranchingKind,
    CycleOrientationProfile,
    classify_tree,
    directed_3cycle_w1_bound,
    directed_heuristic_plan,
    directed_orc,
    effective_length,
)
from .netalgo import (
    CommunityAssignment,
    FlowParams,
    RewireParams,
    adjusted_rand_index,
    curvature_rewire,
    modularity,
    negative_edge_removal_cluster,
    ricci_flow_weights,
    threshold_sweep_cluster,
)

__version__ = "0.1.0"
