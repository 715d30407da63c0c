"""Parameter generation and waveform synthesis from full-context labels."""

from .chain import (
    StateChain,
    decide_voicing,
    determine_durations,
    durations_for_phones,
    labels_to_chain,
    round_half_away,
)
from .gv import apply_gv
from .mlpg import band_matvec, band_solve, mlpg, normal_equations
from .synthesize import (
    SynthesisConfig,
    SynthesisResult,
    generate_parameters,
    synth_utterance,
    write_trajectory_csv,
)

__all__ = [
    "StateChain",
    "SynthesisConfig",
    "SynthesisResult",
    "apply_gv",
    "band_matvec",
    "band_solve",
    "decide_voicing",
    "determine_durations",
    "durations_for_phones",
    "generate_parameters",
    "labels_to_chain",
    "mlpg",
    "normal_equations",
    "round_half_away",
    "synth_utterance",
    "write_trajectory_csv",
]
