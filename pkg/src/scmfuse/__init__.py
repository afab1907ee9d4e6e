"""Fuse expert, data-driven and literature edge claims into one causal model."""

from .agreement import (
    build_scoring_matrix,
    edge_confidence,
    fleiss_kappa,
    fleiss_kappa_table,
    summarize_tier,
    weighted_confidence,
)
from .core import (
    EdgeAssertion,
    EdgeScore,
    KnowledgeSource,
    Mechanism,
    ScenarioConfig,
    Scm,
    ScmEdge,
    ScoringMatrix,
    Stance,
    Tier,
    TierSummary,
    TierWeights,
    VarPair,
    canonical_pair,
    is_acyclic,
    topological_order,
    validate_weights,
)
from .errors import (
    EmptyMatrix,
    InsufficientData,
    InvalidInput,
    InvalidPair,
    InvalidRow,
    InvalidSpec,
    InvalidWeights,
    NoOpWarning,
    OrderingWarning,
    ParseError,
    ScmFuseError,
    ScopeError,
    SingularityError,
    ValidationError,
)
from .evaluate import (
    DEFAULT_EVENTS,
    SENSITIVITY_COLUMNS,
    GroundTruthSpec,
    MetricsReport,
    Perturbation,
    PerturbationKind,
    apply_perturbation,
    compare_graphs,
    ground_truth_from_dict,
    ground_truth_to_dict,
    load_ground_truth,
    sensitivity_run,
    sensitivity_to_csv,
    simulate_data,
)
from .fixture import (
    default_config,
    default_ground_truth,
    default_inputs,
    write_default_scenario,
)
from .fuse import (
    CombinedEdge,
    FusionResult,
    GraphEdit,
    ScenarioInputs,
    fuse_all,
    load_inputs,
    orient_and_acyclify,
    resolve_conflicts,
    run_data_tier,
    run_expert_tier,
    run_literature_tier,
)
from .ingest import (
    Dataset,
    ExpertSubmission,
    load_config,
    load_dataset,
    merge_expert_phases,
    parse_expert_submission,
    parse_source_file,
    write_dataset,
)
from .learn import (
    LearnedGraph,
    Whitelist,
    bic_score,
    fisher_z_test,
    fit_parameters,
    hc_learn,
    pc_learn,
)

__version__ = "0.1.0"

__all__ = [
    "EdgeAssertion",
    "EdgeScore",
    "KnowledgeSource",
    "Mechanism",
    "ScenarioConfig",
    "Scm",
    "ScmEdge",
    "ScoringMatrix",
    "Stance",
    "Tier",
    "TierSummary",
    "TierWeights",
    "VarPair",
    "canonical_pair",
    "is_acyclic",
    "topological_order",
    "validate_weights",
    "build_scoring_matrix",
    "edge_confidence",
    "fleiss_kappa",
    "fleiss_kappa_table",
    "summarize_tier",
    "weighted_confidence",
    "ScmFuseError",
    "InvalidPair",
    "InvalidWeights",
    "ScopeError",
    "InvalidRow",
    "EmptyMatrix",
    "ParseError",
    "ValidationError",
    "SingularityError",
    "InsufficientData",
    "InvalidSpec",
    "InvalidInput",
    "OrderingWarning",
    "NoOpWarning",
    "DEFAULT_EVENTS",
    "SENSITIVITY_COLUMNS",
    "GroundTruthSpec",
    "MetricsReport",
    "Perturbation",
    "PerturbationKind",
    "apply_perturbation",
    "compare_graphs",
    "ground_truth_from_dict",
    "ground_truth_to_dict",
    "load_ground_truth",
    "sensitivity_run",
    "sensitivity_to_csv",
    "simulate_data",
    "default_config",
    "default_ground_truth",
    "default_inputs",
    "write_default_scenario",
    "CombinedEdge",
    "FusionResult",
    "GraphEdit",
    "ScenarioInputs",
    "fuse_all",
    "load_inputs",
    "orient_and_acyclify",
    "resolve_conflicts",
    "run_data_tier",
    "run_expert_tier",
    "run_literature_tier",
    "Dataset",
    "ExpertSubmission",
    "load_config",
    "load_dataset",
    "merge_expert_phases",
    "parse_expert_submission",
    "parse_source_file",
    "write_dataset",
    "LearnedGraph",
    "Whitelist",
    "bic_score",
    "fisher_z_test",
    "fit_parameters",
    "hc_learn",
    "pc_learn",
]
