"""State chains, state durations and voicing decisions."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..frontend.inventory import lookup
from ..frontend.labels import ContextLabel
from ..model.modelset import N_STATES, ModelSet


@dataclass
class StateChain:
    """Per-state parameters of the concatenated sentence HMM (``S = 5 * n_labels`` rows)."""

    spec_mean: np.ndarray
    spec_var: np.ndarray
    voiced_weight: np.ndarray
    lf0_mean: np.ndarray
    lf0_var: np.ndarray
    dur_mean: np.ndarray
    dur_var: np.ndarray
    label_index: np.ndarray
    state_index: np.ndarray
    labels: list[ContextLabel]

    def __len__(self):
        return self.dur_mean.shape[0]


def labels_to_chain(labels: Sequence[ContextLabel], models: ModelSet) -> StateChain:
    """Resolve every label's tied distributions (trees handle unseen contexts)."""
    if not labels:
        raise ValueError("no labels")
    rows = {k: [] for k in ("sm", "sv", "w", "lm", "lv", "dm", "dv")}
    for lab in labels:
        lookup(lab.p3)
        hmm = models.model_for(lab)
        for s in range(N_STATES):
            g = models.spectrum(hmm.spectrum[s])
            e = models.excitation(hmm.excitation[s])
            d = models.duration(hmm.duration[s])
            rows["sm"].append(g.mean)
            rows["sv"].append(g.variance)
            rows["w"].append(e.voiced_weight)
            rows["lm"].append(e.mean)
            rows["lv"].append(e.variance)
            rows["dm"].append(d.mean)
            rows["dv"].append(d.variance)
    n = len(labels)
    return StateChain(
        np.array(rows["sm"]), np.array(rows["sv"]), np.array(rows["w"]),
        np.array(rows["lm"]), np.array(rows["lv"]),
        np.array(rows["dm"]), np.array(rows["dv"]),
        np.repeat(np.arange(n), N_STATES), np.tile(np.arange(1, N_STATES + 1), n),
        list(labels),
    )


def round_half_away(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def _durations(mu: np.ndarray, var: np.ndarray, target: int | None) -> np.ndarray:
    if target is None:
        return np.maximum(1, round_half_away(mu)).astype(np.int64)
    if target < mu.shape[0]:
        raise ValueError(f"target of {target} frames is shorter than {mu.shape[0]} states")
    rho = (target - mu.sum()) / var.sum()
    x = mu + rho * var
    d = np.maximum(1, round_half_away(x)).astype(np.int64)
    # rounding can leave the total a frame or two off; settle the difference on
    # the states whose rounding was furthest from their real-valued optimum
    diff = int(target - d.sum())
    while diff != 0:
        rem = x - d
        if diff > 0:
            i = int(np.argmax(rem))
            d[i] += 1
            diff -= 1
        else:
            rem = np.where(d > 1, rem, np.inf)
            i = int(np.argmin(rem))
            if not np.isfinite(rem[i]):
                break
            d[i] -= 1
            diff += 1
    return d


def determine_durations(chain_or_mu, var=None, target_frames: int | None = None) -> np.ndarray:
    """State durations in frames.

    Without a target each state gets ``max(1, round(mu))``. With a target
    of ``T`` frames, ``rho = (T - sum mu) / sum var`` and each state gets
    ``max(1, round(mu + rho * var))``, after which any rounding residue is
    assigned so that the durations add up to ``T`` whenever the floor allows.
    """
    if isinstance(chain_or_mu, StateChain):
        mu, var = chain_or_mu.dur_mean, chain_or_mu.dur_var
    else:
        mu = np.asarray(chain_or_mu, dtype=np.float64)
        var = np.ones_like(mu) if var is None else np.asarray(var, dtype=np.float64)
    if mu.size == 0:
        raise ValueError("empty chain")
    return _durations(mu, var, target_frames)


def durations_for_phones(chain: StateChain, phone_frames: Sequence[int]) -> np.ndarray:
    """Apply the target-length rule phone by phone (each phone's 5 states share its frames)."""
    if len(phone_frames) * N_STATES != len(chain):
        raise ValueError("need one frame count per label")
    out = []
    for i, T in enumerate(phone_frames):
        sl = slice(i * N_STATES, (i + 1) * N_STATES)
        if T < N_STATES:
            out.append(np.ones(N_STATES, dtype=np.int64))
        else:
            out.append(_durations(chain.dur_mean[sl], chain.dur_var[sl], int(T)))
    return np.concatenate(out)


def decide_voicing(chain_or_weights, durations) -> np.ndarray:
    """Per-frame voiced flags: every frame of a state is voiced iff its ``w_v > 0.5``."""
    w = chain_or_weights.voiced_weight if isinstance(chain_or_weights, StateChain) \
        else np.asarray(chain_or_weights, dtype=np.float64)
    return np.repeat(w > 0.5, np.asarray(durations, dtype=np.int64))
