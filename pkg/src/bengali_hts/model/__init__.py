"""Acoustic model structures, context questions, trees and model files."""

from .distributions import (
    DURATION_MEAN_FLOOR,
    DURATION_VARIANCE_FLOOR,
    VARIANCE_FLOOR,
    DurationGaussian,
    MSDGaussian,
    StreamGaussian,
    gaussian_log_pdf,
    msd_log_prob,
    msd_log_prob_frames,
)
from .io import ModelFormatError, load_model_set, model_set_bytes, save_model_set
from .modelset import (
    N_STATES,
    STREAM_WEIGHTS,
    STREAMS,
    DistributionPools,
    GVModel,
    ModelSet,
    PhoneHMM,
)
from .questions import Question, answer_matrix, generate_question_set, phoneme_classes
from .tree import DecisionTree, TreeNode, tree_traverse

__all__ = [
    "DURATION_MEAN_FLOOR",
    "DURATION_VARIANCE_FLOOR",
    "N_STATES",
    "STREAMS",
    "STREAM_WEIGHTS",
    "VARIANCE_FLOOR",
    "DecisionTree",
    "DistributionPools",
    "DurationGaussian",
    "GVModel",
    "MSDGaussian",
    "ModelFormatError",
    "ModelSet",
    "PhoneHMM",
    "Question",
    "StreamGaussian",
    "TreeNode",
    "answer_matrix",
    "gaussian_log_pdf",
    "generate_question_set",
    "load_model_set",
    "model_set_bytes",
    "msd_log_prob",
    "msd_log_prob_frames",
    "phoneme_classes",
    "save_model_set",
    "tree_traverse",
]
