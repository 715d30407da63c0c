"""Phone HMMs, tied distribution pools and the complete trained model set."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..frontend.inventory import inventory_hash
from ..frontend.labels import ContextLabel, format_label
from ..signal.analysis import AnalysisConfig
from ..signal.deltas import DeltaWindows
from .distributions import VARIANCE_FLOOR, DurationGaussian, MSDGaussian, StreamGaussian
from .tree import DecisionTree, tree_traverse

N_STATES = 5
STREAMS = ("spectrum", "excitation", "duration")
STREAM_WEIGHTS = (1.0, 1.0)
FORMAT_VERSION = 1
SELF_LOOP_INIT = 0.5


@dataclass
class PhoneHMM:
    """Left-to-right, no-skip model with ``N_STATES`` emitting states.

    Output and duration distributions are referenced by id into the pools
    of the owning :class:`ModelSet`, so tying is just sharing an id.
    """

    name: str
    spectrum: list[int]
    excitation: list[int]
    duration: list[int]
    self_loop: list[float] = field(default_factory=lambda: [SELF_LOOP_INIT] * N_STATES)

    def __post_init__(self):
        for s in STREAMS:
            ids = [int(i) for i in getattr(self, s)]
            if len(ids) != N_STATES:
                raise ValueError(f"{self.name}: {s} needs {N_STATES} state ids")
            setattr(self, s, ids)
        self.self_loop = [float(a) for a in self.self_loop]
        if len(self.self_loop) != N_STATES:
            raise ValueError(f"{self.name}: need {N_STATES} self-loop probabilities")

    def ids(self, stream: str) -> list[int]:
        return getattr(self, stream)

    def copy(self, name: str | None = None) -> "PhoneHMM":
        return PhoneHMM(self.name if name is None else name, list(self.spectrum),
                        list(self.excitation), list(self.duration), list(self.self_loop))


@dataclass
class GVModel:
    """Gaussian over the per-utterance variance of static mel-cepstra."""

    mean: np.ndarray
    variance: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.variance = np.maximum(np.asarray(self.variance, dtype=np.float64), VARIANCE_FLOOR)
        if not (np.all(np.isfinite(self.mean)) and np.all(np.isfinite(self.variance))):
            raise ValueError("GV statistics must be finite")

    def __eq__(self, other):
        return (isinstance(other, GVModel) and np.array_equal(self.mean, other.mean)
                and np.array_equal(self.variance, other.variance))


@dataclass
class DistributionPools:
    spectrum: list[StreamGaussian] = field(default_factory=list)
    excitation: list[MSDGaussian] = field(default_factory=list)
    duration: list[DurationGaussian] = field(default_factory=list)

    def add(self, stream: str, dist) -> int:
        pool = getattr(self, stream)
        pool.append(dist)
        return len(pool) - 1


@dataclass
class ModelSet:
    """Everything synthesis needs: config snapshot, windows, models, trees and GV.

    ``fullcontext`` maps formatted labels seen in training to their tied
    models; unseen labels are resolved through ``trees``.
    """

    config: AnalysisConfig = field(default_factory=AnalysisConfig)
    windows: DeltaWindows = field(default_factory=DeltaWindows)
    pools: DistributionPools = field(default_factory=DistributionPools)
    monophones: dict[str, PhoneHMM] = field(default_factory=dict)
    fullcontext: dict[str, PhoneHMM] = field(default_factory=dict)
    trees: dict[tuple[int, str], DecisionTree] = field(default_factory=dict)
    gv: GVModel | None = None
    inventory: str = field(default_factory=inventory_hash)
    version: int = FORMAT_VERSION

    def spectrum(self, i: int) -> StreamGaussian:
        return self.pools.spectrum[i]

    def excitation(self, i: int) -> MSDGaussian:
        return self.pools.excitation[i]

    def duration(self, i: int) -> DurationGaussian:
        return self.pools.duration[i]

    def model_for(self, label: ContextLabel) -> PhoneHMM:
        """Model for a label: training table, else tree traversal, else monophone."""
        key = format_label(label)
        if key in self.fullcontext:
            return self.fullcontext[key]
        mono = self.monophones.get(label.p3)
        if mono is None:
            raise KeyError(f"no model for phoneme {label.p3!r}")
        if not self.trees:
            return mono
        hmm = mono.copy(key)
        for (state, stream), tree in self.trees.items():
            hmm.ids(stream)[state - 1] = tree_traverse(label, tree)
        return hmm

    def check(self) -> None:
        """Raise ``ValueError`` if any model references a missing pool entry."""
        for table in (self.monophones, self.fullcontext):
            for hmm in table.values():
                for s in STREAMS:
                    n = len(getattr(self.pools, s))
                    if any(not 0 <= i < n for i in hmm.ids(s)):
                        raise ValueError(f"{hmm.name}: {s} id out of range")
        for (state, stream), tree in self.trees.items():
            n = len(getattr(self.pools, stream))
            if not 1 <= state <= N_STATES or any(not 0 <= i < n for i in tree.leaves()):
                raise ValueError(f"tree ({state}, {stream}) is inconsistent")
