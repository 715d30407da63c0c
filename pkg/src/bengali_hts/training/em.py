"""Initialisation and embedded EM re-estimation over tied distribution pools."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from ..frontend.inventory import phoneme_inventory
from ..frontend.labels import ContextLabel, format_label
from ..model.distributions import (
    VARIANCE_FLOOR,
    DurationGaussian,
    MSDGaussian,
    StreamGaussian,
    msd_log_prob_frames,
)
from ..model.modelset import N_STATES, DistributionPools, ModelSet, PhoneHMM
from .forward_backward import forward_backward, span_mask, viterbi
from .observations import TrainingUtterance

log = logging.getLogger(__name__)

SELF_LOOP_RANGE = (0.01, 0.99)
_MIN_OCC = 1e-10

KeyFn = Callable[[ContextLabel], str]


def monophone_key(label: ContextLabel) -> str:
    return label.p3


def fullcontext_key(label: ContextLabel) -> str:
    return format_label(label)


def flat_start(utts: Sequence[TrainingUtterance], ms: ModelSet | None = None) -> ModelSet:
    """Monophones for the whole inventory, every state set to the global statistics."""
    if not utts:
        raise ValueError("empty corpus")
    ms = ms if ms is not None else ModelSet()
    spec = np.concatenate([u.obs.spectrum for u in utts])
    lf0 = np.concatenate([u.obs.lf0 for u in utts])
    voiced = np.concatenate([u.obs.voiced for u in utts])
    n_phones = sum(len(u.labels) for u in utts)
    mean, var = spec.mean(axis=0), spec.var(axis=0)
    w_v = float(voiced.mean())
    if voiced.any():
        v_mean, v_var = lf0[voiced].mean(axis=0), lf0[voiced].var(axis=0)
    else:
        v_mean, v_var = np.zeros(lf0.shape[1]), np.ones(lf0.shape[1])
    mu = spec.shape[0] / (N_STATES * n_phones)
    pools = DistributionPools()
    for ph in phoneme_inventory():
        ids = {s: [] for s in ("spectrum", "excitation", "duration")}
        for _ in range(N_STATES):
            ids["spectrum"].append(pools.add("spectrum", StreamGaussian(mean, var)))
            ids["excitation"].append(pools.add("excitation", MSDGaussian(w_v, v_mean, v_var)))
            ids["duration"].append(pools.add("duration", DurationGaussian(mu, mu)))
        ms.monophones[ph.symbol] = PhoneHMM(ph.symbol, **ids)
    ms.pools = pools
    return ms


def clone_to_fullcontext(ms: ModelSet, labels: Sequence[ContextLabel]) -> dict[str, PhoneHMM]:
    """One untied model per distinct label, copied from its centre phone's monophone."""
    table: dict[str, PhoneHMM] = {}
    for lab in labels:
        key = format_label(lab)
        if key in table:
            continue
        mono = ms.monophones.get(lab.p3)
        if mono is None:
            raise KeyError(f"unknown phoneme {lab.p3!r} in label {key}")
        ids = {}
        for stream in ("spectrum", "excitation", "duration"):
            pool = getattr(ms.pools, stream)
            ids[stream] = [ms.pools.add(stream, _copy(pool[i])) for i in mono.ids(stream)]
        table[key] = PhoneHMM(key, self_loop=list(mono.self_loop), **ids)
    ms.fullcontext = table
    return table


def _copy(d):
    if isinstance(d, StreamGaussian):
        return StreamGaussian(d.mean.copy(), d.variance.copy())
    if isinstance(d, MSDGaussian):
        return MSDGaussian(d.voiced_weight, d.mean.copy(), d.variance.copy())
    return DurationGaussian(d.mean, d.variance)


@dataclass
class Chain:
    keys: list[str]
    spectrum: np.ndarray
    excitation: np.ndarray
    self_loop: np.ndarray


def build_chain(labels: Sequence[ContextLabel], table: dict[str, PhoneHMM],
                key_fn: KeyFn) -> Chain:
    keys = [key_fn(lab) for lab in labels]
    try:
        models = [table[k] for k in keys]
    except KeyError as exc:
        raise KeyError(f"no model for {exc.args[0]!r}") from None
    return Chain(keys,
                 np.array([i for m in models for i in m.spectrum], dtype=np.int64),
                 np.array([i for m in models for i in m.excitation], dtype=np.int64),
                 np.array([a for m in models for a in m.self_loop]))


def _spectral_log_pdfs(x: np.ndarray, pools: list[StreamGaussian], ids) -> np.ndarray:
    """``(T, len(ids))`` Gaussian log densities, computed as two matrix products."""
    means = np.stack([pools[i].mean for i in ids])
    inv = 1.0 / np.stack([pools[i].variance for i in ids])
    d = means.shape[1]
    const = -0.5 * (np.sum(means * means * inv, axis=1) + np.sum(np.log(1.0 / inv), axis=1)
                    + d * np.log(2.0 * np.pi))
    return -0.5 * ((x * x) @ inv.T) + x @ (means * inv).T + const


def state_log_densities(ms: ModelSet, chain: Chain, utt: TrainingUtterance) -> np.ndarray:
    """``(T, S)`` log output density of every frame in every chain state."""
    obs = utt.obs
    u_spec, inv_spec = np.unique(chain.spectrum, return_inverse=True)
    spec = _spectral_log_pdfs(obs.spectrum, ms.pools.spectrum, u_spec)[:, inv_spec]
    u_exc, inv_exc = np.unique(chain.excitation, return_inverse=True)
    exc = np.stack([msd_log_prob_frames(obs.lf0, obs.voiced, ms.pools.excitation[i])
                    for i in u_exc], axis=1)[:, inv_exc]
    return spec + exc


@dataclass
class Accumulator:
    """EM sufficient statistics, indexed by pool id (merge is plain addition)."""

    spec_occ: np.ndarray
    spec_sum: np.ndarray
    spec_sq: np.ndarray
    exc_occ: np.ndarray
    exc_voiced: np.ndarray
    exc_sum: np.ndarray
    exc_sq: np.ndarray
    transitions: dict[str, np.ndarray] = field(default_factory=dict)
    loglik: float = 0.0
    frames: int = 0
    skipped: list[str] = field(default_factory=list)

    @classmethod
    def empty(cls, pools: DistributionPools) -> "Accumulator":
        ns, ne = len(pools.spectrum), len(pools.excitation)
        ds = pools.spectrum[0].mean.shape[0]
        de = pools.excitation[0].mean.shape[0]
        return cls(np.zeros(ns), np.zeros((ns, ds)), np.zeros((ns, ds)),
                   np.zeros(ne), np.zeros(ne), np.zeros((ne, de)), np.zeros((ne, de)))

    def merge(self, other: "Accumulator") -> "Accumulator":
        for name in ("spec_occ", "spec_sum", "spec_sq", "exc_occ", "exc_voiced",
                     "exc_sum", "exc_sq"):
            getattr(self, name).__iadd__(getattr(other, name))
        for k, v in other.transitions.items():
            if k in self.transitions:
                self.transitions[k] += v
            else:
                self.transitions[k] = v.copy()
        self.loglik += other.loglik
        self.frames += other.frames
        self.skipped.extend(other.skipped)
        return self


def _mask_for(utt: TrainingUtterance, margin: int | None):
    if utt.spans is None or margin is None or margin < 0:
        return None
    return span_mask(utt.spans, utt.n_frames, N_STATES, margin)


def align_utterance(ms, table, key_fn, utt, margin):
    """Forward-backward for one utterance, falling back to an unconstrained chain
    when the boundary mask leaves no path."""
    chain = build_chain(utt.labels, table, key_fn)
    log_b = state_log_densities(ms, chain, utt)
    mask = _mask_for(utt, margin)
    res = forward_backward(log_b, chain.self_loop, mask)
    if mask is not None and not np.isfinite(res.loglik):
        res = forward_backward(log_b, chain.self_loop)
    return chain, res


def accumulate(ms: ModelSet, table: dict[str, PhoneHMM], key_fn: KeyFn,
               utts: Sequence[TrainingUtterance], margin: int | None = 2) -> Accumulator:
    """E-step over all utterances."""
    acc = Accumulator.empty(ms.pools)
    for utt in utts:
        chain, res = align_utterance(ms, table, key_fn, utt, margin)
        if not np.isfinite(res.loglik):
            log.warning("%s: no valid alignment, skipped", utt.id)
            acc.skipped.append(utt.id)
            continue
        g = res.gamma
        x, obs = utt.obs.spectrum, utt.obs
        np.add.at(acc.spec_occ, chain.spectrum, g.sum(axis=0))
        np.add.at(acc.spec_sum, chain.spectrum, g.T @ x)
        np.add.at(acc.spec_sq, chain.spectrum, g.T @ (x * x))
        gv = g[obs.voiced]
        lv = obs.lf0[obs.voiced]
        np.add.at(acc.exc_occ, chain.excitation, g.sum(axis=0))
        np.add.at(acc.exc_voiced, chain.excitation, gv.sum(axis=0))
        np.add.at(acc.exc_sum, chain.excitation, gv.T @ lv)
        np.add.at(acc.exc_sq, chain.excitation, gv.T @ (lv * lv))
        for p, key in enumerate(chain.keys):
            sl = slice(p * N_STATES, (p + 1) * N_STATES)
            counts = np.stack([res.n_stay[sl], res.n_move[sl]], axis=1)
            if key in acc.transitions:
                acc.transitions[key] += counts
            else:
                acc.transitions[key] = counts
        acc.loglik += res.loglik
        acc.frames += utt.n_frames
    return acc


def _moments(occ, s1, s2, floor):
    mean = s1 / occ
    return mean, np.maximum(s2 / occ - mean * mean, floor)


def update(ms: ModelSet, table: dict[str, PhoneHMM], acc: Accumulator,
           variance_floor: float = VARIANCE_FLOOR) -> None:
    """M-step; pool entries without occupancy keep their previous parameters."""
    for i in np.flatnonzero(acc.spec_occ > _MIN_OCC):
        mean, var = _moments(acc.spec_occ[i], acc.spec_sum[i], acc.spec_sq[i], variance_floor)
        ms.pools.spectrum[i] = StreamGaussian(mean, var)
    for i in np.flatnonzero(acc.exc_occ > _MIN_OCC):
        old = ms.pools.excitation[i]
        w = min(max(acc.exc_voiced[i] / acc.exc_occ[i], 0.0), 1.0)
        mean, var = old.mean, old.variance
        if acc.exc_voiced[i] > _MIN_OCC:
            mean, var = _moments(acc.exc_voiced[i], acc.exc_sum[i], acc.exc_sq[i],
                                 variance_floor)
        ms.pools.excitation[i] = MSDGaussian(w, mean, var)
    lo, hi = SELF_LOOP_RANGE
    for key, counts in acc.transitions.items():
        hmm = table[key]
        for k in range(N_STATES):
            total = counts[k].sum()
            if total > _MIN_OCC:
                hmm.self_loop[k] = float(np.clip(counts[k, 0] / total, lo, hi))


def reestimate(ms: ModelSet, table: dict[str, PhoneHMM], key_fn: KeyFn,
               utts: Sequence[TrainingUtterance], margin: int | None = 2,
               variance_floor: float = VARIANCE_FLOOR) -> Accumulator:
    """One EM iteration; returns the accumulator (its ``loglik`` is the pre-update LL)."""
    acc = accumulate(ms, table, key_fn, utts, margin)
    update(ms, table, acc, variance_floor)
    return acc


def viterbi_runs(ms: ModelSet, table: dict[str, PhoneHMM], key_fn: KeyFn,
                 utts: Sequence[TrainingUtterance], margin: int | None = 2
                 ) -> dict[tuple[str, int], list[int]]:
    """Frame counts spent in each (model key, state index 0..4) along Viterbi paths."""
    runs: dict[tuple[str, int], list[int]] = {}
    for utt in utts:
        chain = build_chain(utt.labels, table, key_fn)
        log_b = state_log_densities(ms, chain, utt)
        mask = _mask_for(utt, margin)
        path, score = viterbi(log_b, chain.self_loop, mask)
        if mask is not None and not np.isfinite(score):
            path, score = viterbi(log_b, chain.self_loop)
        if not np.isfinite(score):
            log.warning("%s: no Viterbi path, skipped", utt.id)
            continue
        counts = np.bincount(path, minlength=len(chain.self_loop))
        for s, c in enumerate(counts):
            runs.setdefault((chain.keys[s // N_STATES], s % N_STATES), []).append(int(c))
    return runs
