"""Label-based graph connectivity metrics.

Edge/node homophily, assortativity, and a closed-form lower bound on the
mutual information between a node's label and the label multiset of its
neighborhood, validated against an exact brute-force MI oracle on synthetic
label-dependent random graphs the package can itself generate.
"""

__version__ = "0.1.0"

from .errors import (
    DegenerateInput,
    DegenerateMixing,
    DimensionMismatch,
    DuplicateLabel,
    EmptyGraph,
    EnumerationTooLarge,
    FormatMismatch,
    InfeasibleTarget,
    MalformedLine,
    MethodUnsupported,
    MissingLabel,
    ModelIncomplete,
    ModelInvalid,
    NicgraphError,
)
from .graph import IngestOptions, LabeledGraph, load_edge_list, load_geomgcn_folder, load_graph_json
from .homophily import (
    HomophilyReport,
    MixingMatrix,
    assortativity,
    edge_homophily,
    homophily_report,
    mixing_matrix,
    node_homophily,
)
from .nic import LabelModel, NicReport, bhattacharyya_matrix, estimate_model, nic, nic_of_graph
from .oracle import (
    ConfigEnumeration,
    ExactMiResult,
    bhattacharyya_by_enumeration,
    config_prob_given_label,
    enumerate_configs,
    exact_mi,
    sample_graph_from_model,
)
from .synth import (
    GaussianMixtureModel,
    SynthConfig,
    attach_features,
    calibrate_homophily,
    generate_pa_graph,
    map_accuracy,
)
from .report import MetricReport, SweepResult, build_metric_report, pearson, run_sweep
