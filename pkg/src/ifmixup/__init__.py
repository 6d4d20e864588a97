"""ifmixup: a laboratory for interpolation-based graph data augmentation.

The package mixes pairs of node-featured graphs into soft-edged,
soft-labeled training samples, proves the mixes apart again (constructive
recovery of both sources and the mixing ratio), and trains weighted-edge
GCN/GIN classifiers on the result, alongside the classic drop/mix baselines
and a small experiment harness.
"""

from .graphs import (
    DegreeStats,
    FeatureBasis,
    GraphDataset,
    LabelDistribution,
    NodeFeaturedGraph,
    check_linear_independence,
    coefficients_in_basis,
    degree_stats,
    feature_vocabulary,
    independent_row_subset,
    is_binary,
    pad_graph,
    pad_pair,
    permute_nodes,
    validate_graph,
)
from .mixing import (
    SWEEP_BETAS,
    BetaParams,
    MixedSample,
    beta_pdf,
    mix_items,
    mix_labels,
    mix_pair,
    sample_lambda,
)
from .recovery import (
    EdgeSolution,
    EdgeSolutionSet,
    IntrusionAuditReport,
    RecoveredPair,
    RecoveryError,
    edge_solutions,
    intrusion_audit,
    recover_features_basis,
    recover_features_independent,
    recover_pair,
    strip_dummy_nodes,
)
from .models import (
    ForwardTrace,
    ModelConfig,
    ModelParams,
    forward_classify,
    init_params,
    load_checkpoint,
    model_gradients,
    save_checkpoint,
    soft_cross_entropy,
)
from .augment import (
    AUGMENT_KINDS,
    AugmentSpec,
    MixedHidden,
    drop_edge,
    drop_node,
    mix_hidden,
    mix_readout,
)
from .tudataset import (
    TABLE5,
    DatasetStats,
    ParsedDataset,
    ParsedGraph,
    ParseError,
    Table5Check,
    TUDatasetFiles,
    compare_table5,
    dataset_stats,
    encode_node_features,
    load_dataset,
    make_fixture_dataset,
    make_synthetic_molecules,
    parse_tudataset,
    read_weighted_graph,
    write_tudataset,
    write_weighted_graph,
)
from .training import (
    DEPTH_SWEEP,
    HYPERPARAMETER_GRID,
    AdamWState,
    MetricsLog,
    SweepCell,
    TrainConfig,
    adamw_step,
    batch_gradients,
    build_epoch_stream,
    cross_validate,
    derive_rng,
    evaluate,
    load_metrics_csv,
    lr_at_epoch,
    metrics_to_csv,
    stratified_folds,
    summary_to_json,
    sweep,
    train_config_from_dict,
    train_config_to_dict,
    train_single,
)
from .plots import SweepBarRow, emit_plot_data

__version__ = "1.0.0"

__all__ = [
    "AUGMENT_KINDS",
    "AdamWState",
    "AugmentSpec",
    "BetaParams",
    "DEPTH_SWEEP",
    "DatasetStats",
    "DegreeStats",
    "EdgeSolution",
    "EdgeSolutionSet",
    "FeatureBasis",
    "ForwardTrace",
    "GraphDataset",
    "HYPERPARAMETER_GRID",
    "IntrusionAuditReport",
    "LabelDistribution",
    "MetricsLog",
    "MixedHidden",
    "MixedSample",
    "ModelConfig",
    "ModelParams",
    "NodeFeaturedGraph",
    "ParseError",
    "ParsedDataset",
    "ParsedGraph",
    "RecoveredPair",
    "RecoveryError",
    "SWEEP_BETAS",
    "SweepBarRow",
    "SweepCell",
    "TABLE5",
    "Table5Check",
    "TrainConfig",
    "TUDatasetFiles",
    "adamw_step",
    "batch_gradients",
    "beta_pdf",
    "build_epoch_stream",
    "check_linear_independence",
    "coefficients_in_basis",
    "compare_table5",
    "cross_validate",
    "dataset_stats",
    "degree_stats",
    "derive_rng",
    "drop_edge",
    "drop_node",
    "edge_solutions",
    "emit_plot_data",
    "encode_node_features",
    "evaluate",
    "feature_vocabulary",
    "forward_classify",
    "independent_row_subset",
    "init_params",
    "intrusion_audit",
    "is_binary",
    "load_checkpoint",
    "load_dataset",
    "load_metrics_csv",
    "lr_at_epoch",
    "make_fixture_dataset",
    "make_synthetic_molecules",
    "mix_hidden",
    "mix_items",
    "mix_labels",
    "mix_pair",
    "metrics_to_csv",
    "mix_readout",
    "model_gradients",
    "pad_graph",
    "pad_pair",
    "parse_tudataset",
    "permute_nodes",
    "read_weighted_graph",
    "recover_features_basis",
    "recover_features_independent",
    "recover_pair",
    "sample_lambda",
    "save_checkpoint",
    "soft_cross_entropy",
    "strip_dummy_nodes",
    "stratified_folds",
    "summary_to_json",
    "sweep",
    "train_config_from_dict",
    "train_config_to_dict",
    "train_single",
    "validate_graph",
    "write_tudataset",
    "write_weighted_graph",
]
