"""Duration and global-variance estimation."""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence

import numpy as np

from ..model.distributions import DURATION_VARIANCE_FLOOR, DurationGaussian
from ..model.modelset import GVModel

DEFAULT_DURATION = (1.0, DURATION_VARIANCE_FLOOR)


def duration_from_runs(runs: Sequence[int],
                       variance_floor: float = DURATION_VARIANCE_FLOOR) -> DurationGaussian:
    """Mean and (floored) population variance of run lengths; unvisited gives (1, floor)."""
    r = np.asarray(runs, dtype=np.float64)
    if r.size == 0:
        return DurationGaussian(*DEFAULT_DURATION)
    return DurationGaussian(r.mean(), max(r.var(), variance_floor))


def estimate_durations(runs: Mapping[object, Sequence[int]], assignment: Mapping[object, int],
                       n_pools: int | None = None,
                       variance_floor: float = DURATION_VARIANCE_FLOOR
                       ) -> dict[int, DurationGaussian]:
    """Pool the runs of every state tied to the same duration distribution.

    Parameters
    ----------
    runs : mapping
        State key to observed run lengths.
    assignment : mapping
        State key to tied duration id.
    n_pools : int, optional
        When given, ids in ``range(n_pools)`` without data get the default.
    """
    pooled: dict[int, list[int]] = {}
    for key, pid in assignment.items():
        pooled.setdefault(pid, []).extend(runs.get(key, ()))
    if n_pools is not None:
        for pid in range(n_pools):
            pooled.setdefault(pid, [])
    return {pid: duration_from_runs(r, variance_floor) for pid, r in sorted(pooled.items())}


def estimate_gv(statics: Iterable[np.ndarray]) -> GVModel:
    """Mean and variance, over utterances, of each utterance's per-dimension variance."""
    v = np.array([np.var(np.asarray(c, dtype=np.float64), axis=0) for c in statics])
    if v.shape[0] < 2:
        raise ValueError("global variance needs at least 2 utterances")
    return GVModel(v.mean(axis=0), v.var(axis=0))
