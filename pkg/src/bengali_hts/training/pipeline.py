"""End-to-end training: features, monophones, full-context models, tying, durations, GV."""

from __future__ import annotations

import csv
from collections.abc import Callable, Sequence
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from ..corpus.cache import FeatureCache, extract_features
from ..corpus.loader import CorpusEntry
from ..frontend.labels import ContextLabel, build_context_labels, format_label
from ..model.distributions import (
    DURATION_VARIANCE_FLOOR,
    VARIANCE_FLOOR,
    MSDGaussian,
    StreamGaussian,
)
from ..model.modelset import N_STATES, DistributionPools, ModelSet, PhoneHMM
from ..model.questions import answer_matrix, generate_question_set
from ..model.tree import TreeNode
from ..signal.analysis import AnalysisConfig
from ..signal.deltas import DeltaWindows
from .clustering import ClusterConfig, StateStats, build_tree
from .em import (
    Accumulator,
    _copy,
    accumulate,
    clone_to_fullcontext,
    flat_start,
    fullcontext_key,
    monophone_key,
    reestimate,
    viterbi_runs,
)
from .observations import TrainingUtterance, build_observations, phone_frame_spans
from .stats import duration_from_runs, estimate_durations, estimate_gv


class TrainingError(RuntimeError):
    pass


class ConfigFileError(ValueError):
    pass


@dataclass(frozen=True)
class TrainingConfig:
    """Iteration counts, clustering controls and floors.

    ``boundary_margin`` widens each annotated phone span (in frames) when
    constraining alignments; a negative value trains without boundaries.
    ``seed`` is accepted for config-file compatibility; no training step
    draws random numbers, so it does not change the result.
    """

    monophone_iterations: int = 5
    fullcontext_iterations: int = 2
    tied_iterations: int = 2
    mdl_scale: float = 1.0
    min_occupancy: float = 10.0
    variance_floor: float = VARIANCE_FLOOR
    duration_variance_floor: float = DURATION_VARIANCE_FLOOR
    boundary_margin: int = 2
    seed: int = 0

    def __post_init__(self):
        for name in ("monophone_iterations", "fullcontext_iterations", "tied_iterations"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.variance_floor < VARIANCE_FLOOR:
            raise ValueError(f"variance_floor must be >= {VARIANCE_FLOOR}")
        if self.duration_variance_floor < DURATION_VARIANCE_FLOOR:
            raise ValueError(f"duration_variance_floor must be >= {DURATION_VARIANCE_FLOOR}")
        ClusterConfig(self.mdl_scale, self.min_occupancy)

    @property
    def margin(self) -> int | None:
        return None if self.boundary_margin < 0 else self.boundary_margin

    @property
    def cluster(self) -> ClusterConfig:
        return ClusterConfig(self.mdl_scale, self.min_occupancy)


def parse_training_config(text: str) -> TrainingConfig:
    """Parse ``key = value`` lines (``#`` starts a comment)."""
    types = {f.name: f.type for f in fields(TrainingConfig)}
    values = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigFileError(f"line {n}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise ConfigFileError(f"line {n}: unknown key {key!r}")
        try:
            values[key] = int(val) if types[key] == "int" else float(val)
        except ValueError:
            raise ConfigFileError(f"line {n}: bad value {val!r} for {key}") from None
    try:
        return TrainingConfig(**values)
    except ValueError as exc:
        raise ConfigFileError(str(exc)) from None


def load_training_config(path) -> TrainingConfig:
    return parse_training_config(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class StatsRow:
    stage: str
    iteration: int
    total_ll: float
    frames: int


def write_stats_csv(rows: Sequence[StatsRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["stage", "iteration", "total_LL", "frames"])
        for r in rows:
            w.writerow([r.stage, r.iteration, repr(r.total_ll), r.frames])


def prepare_utterance(uid: str, annotation, mcep: np.ndarray, lf0: np.ndarray,
                      cfg: AnalysisConfig = AnalysisConfig(),
                      windows: DeltaWindows = DeltaWindows()) -> TrainingUtterance:
    labels = build_context_labels(annotation)
    times = annotation.phone_times()
    spans = None if times is None else phone_frame_spans(times, mcep.shape[0], cfg)
    return TrainingUtterance(uid, labels, build_observations(mcep, lf0, windows), mcep, spans)


def prepare_utterances(entries: Sequence[CorpusEntry], cfg: AnalysisConfig = AnalysisConfig(),
                       windows: DeltaWindows = DeltaWindows(),
                       cache_dir=None) -> list[TrainingUtterance]:
    cache = FeatureCache(cache_dir, cfg) if cache_dir is not None else None
    out = []
    for e in entries:
        if cache is not None:
            mcep, lf0 = cache.features(e.id, e.wav_path)
        else:
            mcep, lf0 = extract_features(e.wav_path, cfg)
        out.append(prepare_utterance(e.id, e.annotation, mcep, lf0, cfg, windows))
    return out


def _offset_leaves(node: TreeNode, offset: int) -> None:
    if node.is_leaf:
        node.leaf += offset
    else:
        _offset_leaves(node.yes, offset)
        _offset_leaves(node.no, offset)


def _duration_stats(keys, runs, state, floor) -> tuple[StateStats, list[list[int]]]:
    per_item = [runs.get((k, state), []) for k in keys]
    occ = np.array([len(r) for r in per_item], dtype=np.float64)
    s1 = np.array([[sum(r)] for r in per_item], dtype=np.float64)
    s2 = np.array([[sum(x * x for x in r)] for r in per_item], dtype=np.float64)
    return StateStats(occ, s1, s2, weight=s1[:, 0], floor=floor), per_item


def tie_states(ms: ModelSet, labels: dict[str, ContextLabel], acc: Accumulator,
               runs: dict, cfg: TrainingConfig) -> None:
    """Replace the untied full-context table by decision-tree-tied models."""
    keys = list(ms.fullcontext)
    questions = generate_question_set()
    answers = answer_matrix(questions, [labels[k] for k in keys])
    old = ms.fullcontext
    pools = DistributionPools()
    mono = {}
    for name, hmm in ms.monophones.items():
        ids = {s: [pools.add(s, _copy(getattr(ms.pools, s)[i])) for i in hmm.ids(s)]
               for s in ("spectrum", "excitation", "duration")}
        mono[name] = PhoneHMM(name, self_loop=list(hmm.self_loop), **ids)
    tied = {k: {"spectrum": [0] * N_STATES, "excitation": [0] * N_STATES,
                "duration": [0] * N_STATES} for k in keys}
    trees = {}
    floor = cfg.variance_floor
    for k in range(N_STATES):
        state = k + 1
        sid = np.array([old[key].spectrum[k] for key in keys])
        eid = np.array([old[key].excitation[k] for key in keys])
        jobs = {
            "spectrum": StateStats(acc.spec_occ[sid], acc.spec_sum[sid], acc.spec_sq[sid],
                                   floor=floor),
            "excitation": StateStats(acc.exc_voiced[eid], acc.exc_sum[eid], acc.exc_sq[eid],
                                     total=acc.exc_occ[eid], floor=floor),
        }
        dstats, druns = _duration_stats(keys, runs, k, cfg.duration_variance_floor)
        jobs["duration"] = dstats
        for stream, stats in jobs.items():
            tree, groups = build_tree(stats, answers, questions, cfg.cluster, state, stream)
            offset = len(getattr(pools, stream))
            for g in groups:
                if stream == "duration":
                    dist = duration_from_runs([x for i in g for x in druns[i]],
                                              cfg.duration_variance_floor)
                else:
                    dist = _leaf_distribution(stats, g, floor, stream)
                pid = pools.add(stream, dist)
                for i in g:
                    tied[keys[i]][stream][k] = pid
            _offset_leaves(tree.root, offset)
            trees[(state, stream)] = tree
    ms.pools = pools
    ms.monophones = mono
    ms.fullcontext = {k: PhoneHMM(k, self_loop=list(old[k].self_loop), **tied[k]) for k in keys}
    ms.trees = trees


def _leaf_distribution(stats: StateStats, g, floor, stream):
    occ = stats.occ[g].sum()
    s1, s2 = stats.s1[g].sum(axis=0), stats.s2[g].sum(axis=0)
    if occ > 0:
        mean = s1 / occ
        var = np.maximum(s2 / occ - mean * mean, floor)
    else:
        mean, var = np.zeros(stats.dim), np.ones(stats.dim)
    if stream == "spectrum":
        return StreamGaussian(mean, var)
    total = stats.total[g].sum()
    return MSDGaussian(float(occ / total) if total > 0 else 0.0, mean, var)


def train_models(utts: Sequence[TrainingUtterance], cfg: TrainingConfig = TrainingConfig(),
                 analysis: AnalysisConfig = AnalysisConfig(),
                 windows: DeltaWindows = DeltaWindows(),
                 log: Callable[[str], None] | None = None) -> tuple[ModelSet, list[StatsRow]]:
    """All stages after feature extraction; returns the model set and per-stage LLs."""
    rows: list[StatsRow] = []
    say = log or (lambda msg: None)

    def record(stage, it, acc):
        rows.append(StatsRow(stage, it, float(acc.loglik), int(acc.frames)))
        say(f"{stage:<12} iter {it:2d}  LL {acc.loglik:.6f}  frames {acc.frames}")

    stage = "flat-start"
    try:
        ms = flat_start(utts, ModelSet(config=analysis, windows=windows))
        stage = "monophone"
        for i in range(cfg.monophone_iterations):
            record(stage, i + 1, reestimate(ms, ms.monophones, monophone_key, utts,
                                            cfg.margin, cfg.variance_floor))
        stage = "clone"
        labels = {}
        for u in utts:
            for lab in u.labels:
                labels.setdefault(format_label(lab), lab)
        clone_to_fullcontext(ms, list(labels.values()))
        stage = "fullcontext"
        for i in range(cfg.fullcontext_iterations):
            acc = reestimate(ms, ms.fullcontext, fullcontext_key, utts, cfg.margin,
                             cfg.variance_floor)
            if i == 0:
                record("clone", 0, acc)
            record(stage, i + 1, acc)
        stage = "align"
        acc = accumulate(ms, ms.fullcontext, fullcontext_key, utts, cfg.margin)
        if cfg.fullcontext_iterations == 0:
            record("clone", 0, acc)
        record(stage, 0, acc)
        runs = viterbi_runs(ms, ms.fullcontext, fullcontext_key, utts, cfg.margin)
        stage = "cluster"
        tie_states(ms, labels, acc, runs, cfg)
        say(f"{'cluster':<12} leaves " + " ".join(
            f"{s[0]}{st}:{t.n_leaves()}" for (st, s), t in sorted(ms.trees.items(),
                                                                 key=lambda x: (x[0][1], x[0][0]))))
        stage = "tied"
        for i in range(cfg.tied_iterations):
            record(stage, i + 1, reestimate(ms, ms.fullcontext, fullcontext_key, utts,
                                            cfg.margin, cfg.variance_floor))
        record("final", 0, accumulate(ms, ms.fullcontext, fullcontext_key, utts, cfg.margin))
        stage = "durations"
        runs = viterbi_runs(ms, ms.fullcontext, fullcontext_key, utts, cfg.margin)
        assignment = {(k, s): hmm.duration[s] for k, hmm in ms.fullcontext.items()
                      for s in range(N_STATES)}
        for pid, dist in estimate_durations(runs, assignment,
                                            variance_floor=cfg.duration_variance_floor).items():
            ms.pools.duration[pid] = dist
        stage = "gv"
        if len(utts) >= 2:
            ms.gv = estimate_gv([u.mcep for u in utts])
        ms.check()
    except TrainingError:
        raise
    except Exception as exc:
        raise TrainingError(f"training stage '{stage}' failed: {exc}") from exc
    return ms, rows


def train_pipeline(entries: Sequence[CorpusEntry], cfg: TrainingConfig = TrainingConfig(),
                   analysis: AnalysisConfig = AnalysisConfig(),
                   windows: DeltaWindows = DeltaWindows(), cache_dir=None,
                   log: Callable[[str], None] | None = None) -> tuple[ModelSet, list[StatsRow]]:
    """Features (through the cache when ``cache_dir`` is set) followed by :func:`train_models`."""
    if not entries:
        raise TrainingError("training stage 'features' failed: empty corpus")
    try:
        utts = prepare_utterances(entries, analysis, windows, cache_dir)
    except Exception as exc:
        raise TrainingError(f"training stage 'features' failed: {exc}") from exc
    return train_models(utts, cfg, analysis, windows, log)
