"""fedids: a desk-scale federated intrusion-detection simulator.

Per-node detectors train on single attack classes, aggregate by
sample-count-weighted parameter averaging over communication rounds, and
are scored with the balanced attack-accuracy metric to find which
(train attack, test attack) pairs transfer. Two preprocessing techniques,
bootstrapped class balancing and temporal averaging, can be enabled per
approach; the combined pipeline is the `tabfids` approach tag.
"""

from .data import (
    BENIGN,
    Dataset,
    DatasetError,
    FlowRecord,
    NodeDataset,
    SplitSpec,
    partition_federated,
    split,
)
from .io import CsvSchema, SchemaError, load_flow_csv, load_schema, write_dataset_csv
from .cicids import cicids2017_schema
from .synthetic import ClassSpec, SyntheticSpec, generate_synthetic, load_synthetic_spec
from .preprocess import (
    BootstrapOversampler,
    FeatureNormalizer,
    NotFittedError,
    PipelineConfig,
    PreprocessingPipeline,
    TemporalAverager,
    apply_normalizer,
    bootstrap_balance,
    build_pipeline,
    fit_normalizer,
    temporal_average,
)
from .network import (
    ArchitectureError,
    ConvSpec,
    GradientSet,
    ModelArch,
    ModelParams,
    OptimizerState,
    TrainConfig,
    adam_step,
    forward,
    init_model,
    init_optimizer_state,
    loss_and_grad,
    mean_loss,
    predict,
    train_epochs,
)
from .classifier import ConvNetClassifier
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .federation import (
    FederationConfig,
    FederationError,
    NodeState,
    RoundLog,
    fedavg,
    fine_tune_locally,
    local_update,
    run_federation,
)
from .evaluation import (
    ConfusionCounts,
    MetricUndefinedError,
    OverlapReport,
    TransferabilityMatrix,
    TransferabilityPair,
    attack_accuracy,
    build_matrix,
    classify_pairs,
    compare_approaches,
    confusion,
    occurrence_counts,
    plain_accuracy,
    precision_recall,
)
from .experiment import (
    APPROACHES,
    ConfigError,
    ExperimentConfig,
    RunReport,
    run_all,
    run_centralized,
    run_federated,
    validate_config,
)
from .reference import load_reference_results
from .seeding import derive_seed

__version__ = "0.1.0"

__all__ = [
    "APPROACHES",
    "ArchitectureError",
    "BENIGN",
    "BootstrapOversampler",
    "Checkpoint",
    "ClassSpec",
    "ConfigError",
    "ConfusionCounts",
    "ConvNetClassifier",
    "ConvSpec",
    "CsvSchema",
    "Dataset",
    "DatasetError",
    "ExperimentConfig",
    "FeatureNormalizer",
    "FederationConfig",
    "FederationError",
    "FlowRecord",
    "GradientSet",
    "MetricUndefinedError",
    "ModelArch",
    "ModelParams",
    "NodeDataset",
    "NodeState",
    "NotFittedError",
    "OptimizerState",
    "OverlapReport",
    "PipelineConfig",
    "PreprocessingPipeline",
    "RoundLog",
    "RunReport",
    "SchemaError",
    "SplitSpec",
    "SyntheticSpec",
    "TemporalAverager",
    "TrainConfig",
    "TransferabilityMatrix",
    "TransferabilityPair",
    "adam_step",
    "apply_normalizer",
    "attack_accuracy",
    "bootstrap_balance",
    "build_matrix",
    "build_pipeline",
    "cicids2017_schema",
    "classify_pairs",
    "compare_approaches",
    "confusion",
    "derive_seed",
    "fedavg",
    "fine_tune_locally",
    "fit_normalizer",
    "forward",
    "generate_synthetic",
    "init_model",
    "init_optimizer_state",
    "load_checkpoint",
    "load_flow_csv",
    "load_reference_results",
    "load_schema",
    "load_synthetic_spec",
    "local_update",
    "loss_and_grad",
    "mean_loss",
    "occurrence_counts",
    "partition_federated",
    "plain_accuracy",
    "precision_recall",
    "predict",
    "run_all",
    "run_centralized",
    "run_federated",
    "run_federation",
    "save_checkpoint",
    "split",
    "temporal_average",
    "train_epochs",
    "validate_config",
    "write_dataset_csv",
]
