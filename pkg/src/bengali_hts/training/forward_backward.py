"""Forward-backward and Viterbi over a concatenated left-to-right, no-skip chain.

Recursions run in the log domain, which gives the same posteriors and
total likelihood as per-frame scaling without the rescaling bookkeeping.
The chain starts in its first state and must end in its last state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

NEG_INF = -np.inf


class AlignmentError(ValueError):
    pass


@numba.njit(cache=True)
def _lse(a, b):
    if a == -np.inf:
        return b
    if b == -np.inf:
        return a
    if a > b:
        return a + np.log1p(np.exp(b - a))
    return b + np.log1p(np.exp(a - b))


@numba.njit(cache=True)
def _fb_kernel(log_b, log_stay, log_move):
    T, S = log_b.shape
    alpha = np.full((T, S), -np.inf)
    beta = np.full((T, S), -np.inf)
    alpha[0, 0] = log_b[0, 0]
    for t in range(1, T):
        for s in range(S):
            v = alpha[t - 1, s] + log_stay[s]
            if s > 0:
                v = _lse(v, alpha[t - 1, s - 1] + log_move[s - 1])
            alpha[t, s] = v + log_b[t, s]
    beta[T - 1, S - 1] = 0.0
    for t in range(T - 2, -1, -1):
        for s in range(S):
            v = log_stay[s] + log_b[t + 1, s] + beta[t + 1, s]
            if s + 1 < S:
                v = _lse(v, log_move[s] + log_b[t + 1, s + 1] + beta[t + 1, s + 1])
            beta[t, s] = v
    ll = alpha[T - 1, S - 1]
    gamma = np.zeros((T, S))
    n_stay = np.zeros(S)
    n_move = np.zeros(S)
    if ll == -np.inf:
        return gamma, ll, n_stay, n_move
    for t in range(T):
        for s in range(S):
            a = alpha[t, s]
            if a == -np.inf:
                continue
            gamma[t, s] = np.exp(a + beta[t, s] - ll)
            if t + 1 < T:
                n_stay[s] += np.exp(a + log_stay[s] + log_b[t + 1, s] + beta[t + 1, s] - ll)
                if s + 1 < S:
                    n_move[s] += np.exp(a + log_move[s] + log_b[t + 1, s + 1]
                                        + beta[t + 1, s + 1] - ll)
    return gamma, ll, n_stay, n_move


@numba.njit(cache=True)
def _viterbi_kernel(log_b, log_stay, log_move):
    T, S = log_b.shape
    delta = np.full((T, S), -np.inf)
    back = np.zeros((T, S), dtype=np.int64)
    delta[0, 0] = log_b[0, 0]
    for t in range(1, T):
        for s in range(S):
            best = delta[t - 1, s] + log_stay[s]
            arg = s
            if s > 0:
                m = delta[t - 1, s - 1] + log_move[s - 1]
                if m > best:
                    best = m
                    arg = s - 1
            delta[t, s] = best + log_b[t, s]
            back[t, s] = arg
    path = np.zeros(T, dtype=np.int64)
    path[T - 1] = S - 1
    for t in range(T - 1, 0, -1):
        path[t - 1] = back[t, path[t]]
    return path, delta[T - 1, S - 1]


@dataclass
class FBResult:
    """Posteriors ``gamma`` ``(T, S)``, total log-likelihood and expected transition counts."""

    gamma: np.ndarray
    loglik: float
    n_stay: np.ndarray
    n_move: np.ndarray


def _prepare(log_b, self_loop, mask):
    log_b = np.ascontiguousarray(log_b, dtype=np.float64)
    if log_b.ndim != 2:
        raise ValueError("log_b must be (frames, states)")
    T, S = log_b.shape
    if T < S:
        raise AlignmentError(f"utterance too short: {T} frames for {S} states")
    a = np.asarray(self_loop, dtype=np.float64)
    if a.shape != (S,) or np.any((a < 0) | (a > 1)):
        raise ValueError("need one self-loop probability in [0, 1] per state")
    if mask is not None:
        log_b = np.where(mask, log_b, NEG_INF)
    with np.errstate(divide="ignore"):
        return log_b, np.log(a), np.log1p(-a)


def forward_backward(log_b, self_loop, mask=None) -> FBResult:
    """State posteriors for per-frame state log-densities ``log_b``.

    Parameters
    ----------
    log_b : ndarray, shape (T, S)
        Log output density of frame ``t`` in chain state ``s``.
    self_loop : array_like, shape (S,)
        Self-transition probability of each state.
    mask : ndarray of bool, optional
        Frames a state may occupy; everything else is excluded.

    Returns
    -------
    FBResult
        ``loglik`` is ``-inf`` if no path survives.
    """
    log_b, ls, lm = _prepare(log_b, self_loop, mask)
    gamma, ll, n_stay, n_move = _fb_kernel(log_b, ls, lm)
    return FBResult(gamma, float(ll), n_stay, n_move)


def viterbi(log_b, self_loop, mask=None) -> tuple[np.ndarray, float]:
    """Best state index per frame and its log score."""
    log_b, ls, lm = _prepare(log_b, self_loop, mask)
    path, score = _viterbi_kernel(log_b, ls, lm)
    return path, float(score)


def state_runs(path: np.ndarray, n_states: int) -> list[list[int]]:
    """Run length(s) of each chain state along a monotone path."""
    counts = np.bincount(path, minlength=n_states)
    return [[int(c)] if c else [] for c in counts]


def span_mask(spans, n_frames: int, states_per_phone: int, margin: int) -> np.ndarray:
    """Restrict each phone's states to its annotated frames widened by ``margin``."""
    S = len(spans) * states_per_phone
    mask = np.zeros((n_frames, S), dtype=bool)
    for p, (lo, hi) in enumerate(spans):
        lo, hi = max(0, lo - margin), min(n_frames, hi + margin)
        mask[lo:hi, p * states_per_phone:(p + 1) * states_per_phone] = True
    return mask
