"""Model estimation: EM over HMM chains, MDL tree clustering, durations and GV."""

from .clustering import ClusterConfig, StateStats, build_tree, cluster_states_mdl, node_loglik
from .em import (
    Accumulator,
    accumulate,
    clone_to_fullcontext,
    flat_start,
    fullcontext_key,
    monophone_key,
    reestimate,
    update,
    viterbi_runs,
)
from .forward_backward import AlignmentError, FBResult, forward_backward, viterbi
from .observations import (
    ObservationSequence,
    TrainingUtterance,
    build_observations,
    lf0_with_deltas,
    phone_frame_spans,
)
from .pipeline import (
    ConfigFileError,
    StatsRow,
    TrainingConfig,
    TrainingError,
    load_training_config,
    parse_training_config,
    prepare_utterance,
    prepare_utterances,
    train_models,
    train_pipeline,
    write_stats_csv,
)
from .stats import duration_from_runs, estimate_durations, estimate_gv

__all__ = [
    "Accumulator",
    "AlignmentError",
    "ClusterConfig",
    "ConfigFileError",
    "FBResult",
    "ObservationSequence",
    "StateStats",
    "StatsRow",
    "TrainingConfig",
    "TrainingError",
    "TrainingUtterance",
    "accumulate",
    "build_observations",
    "build_tree",
    "clone_to_fullcontext",
    "cluster_states_mdl",
    "duration_from_runs",
    "estimate_durations",
    "estimate_gv",
    "flat_start",
    "forward_backward",
    "fullcontext_key",
    "lf0_with_deltas",
    "load_training_config",
    "monophone_key",
    "node_loglik",
    "parse_training_config",
    "phone_frame_spans",
    "prepare_utterance",
    "prepare_utterances",
    "reestimate",
    "train_models",
    "train_pipeline",
    "update",
    "viterbi",
    "viterbi_runs",
    "write_stats_csv",
]
