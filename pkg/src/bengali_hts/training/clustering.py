"""Top-down decision-tree state clustering with a minimum-description-length stop rule."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from ..frontend.labels import ContextLabel
from ..model.distributions import VARIANCE_FLOOR
from ..model.questions import Question, answer_matrix
from ..model.tree import DecisionTree, TreeNode

_LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class ClusterConfig:
    mdl_scale: float = 1.0
    min_occupancy: float = 10.0

    def __post_init__(self):
        if self.mdl_scale < 0:
            raise ValueError("mdl_scale must be >= 0")
        if self.min_occupancy < 0:
            raise ValueError("min_occupancy must be >= 0")


@dataclass
class StateStats:
    """Sufficient statistics of one state position across context-dependent items.

    ``occ`` is the Gaussian occupancy (frames, or runs for durations) and
    ``weight`` the quantity compared against the minimum leaf occupancy. For
    MSD statistics ``total`` holds all-space occupancy while ``occ``, ``s1``
    and ``s2`` cover the voiced space.
    """

    occ: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    total: np.ndarray | None = None
    weight: np.ndarray | None = None
    floor: float = VARIANCE_FLOOR

    def __post_init__(self):
        self.occ = np.asarray(self.occ, dtype=np.float64)
        self.s1 = np.atleast_2d(np.asarray(self.s1, dtype=np.float64))
        self.s2 = np.atleast_2d(np.asarray(self.s2, dtype=np.float64))
        if self.s1.shape[0] != self.occ.shape[0]:
            self.s1, self.s2 = self.s1.T, self.s2.T
        if self.weight is None:
            self.weight = self.total if self.total is not None else self.occ
        self.weight = np.asarray(self.weight, dtype=np.float64)

    @property
    def dim(self) -> int:
        return self.s1.shape[1]

    @property
    def is_msd(self) -> bool:
        return self.total is not None

    @property
    def n_params(self) -> int:
        """Free parameters added by one extra leaf (mean + variance, plus a space weight)."""
        return 2 * self.dim + (1 if self.is_msd else 0)

    def __len__(self):
        return self.occ.shape[0]


def gaussian_node_loglik(occ, s1, s2, floor: float = VARIANCE_FLOOR) -> np.ndarray:
    """``-0.5 * occ * (d log 2pi + sum log var + d)`` for pooled statistics (rows)."""
    occ = np.asarray(occ, dtype=np.float64)
    s1, s2 = np.asarray(s1, dtype=np.float64), np.asarray(s2, dtype=np.float64)
    d = s1.shape[-1]
    safe = np.where(occ > 0, occ, 1.0)[..., None]
    mean = s1 / safe
    var = np.maximum(s2 / safe - mean * mean, floor)
    ll = -0.5 * occ * (d * _LOG_2PI + np.log(var).sum(axis=-1) + d)
    return np.where(occ > 0, ll, 0.0)


def node_loglik(occ, s1, s2, total=None, floor: float = VARIANCE_FLOOR) -> np.ndarray:
    ll = gaussian_node_loglik(occ, s1, s2, floor)
    if total is None:
        return ll
    total = np.asarray(total, dtype=np.float64)
    unvoiced = np.maximum(total - occ, 0.0)
    safe = np.where(total > 0, total, 1.0)
    return ll + xlogy(occ, occ / safe) + xlogy(unvoiced, unvoiced / safe)


def _pooled(stats: StateStats, idx):
    tot = None if stats.total is None else stats.total[idx].sum()
    return stats.occ[idx].sum(), stats.s1[idx].sum(axis=0), stats.s2[idx].sum(axis=0), tot


def build_tree(stats: StateStats, answers: np.ndarray, questions: Sequence[Question],
               cfg: ClusterConfig = ClusterConfig(), state: int = 1,
               stream: str = "spectrum") -> tuple[DecisionTree, list[np.ndarray]]:
    """Greedy MDL tree over items with pre-computed question answers.

    Parameters
    ----------
    stats : StateStats
        One row per context-dependent item.
    answers : ndarray of bool, shape (n_questions, n_items)

    Returns
    -------
    tree : DecisionTree
        Leaves are numbered 0.. in depth-first (yes-first) order.
    groups : list of ndarray
        Item indices reaching each leaf.
    """
    n = len(stats)
    if n == 0:
        raise ValueError("empty stats")
    root_occ = stats.total.sum() if stats.is_msd else stats.occ.sum()
    threshold = cfg.mdl_scale * 0.5 * stats.n_params * np.log(max(root_occ, 1.0 + 1e-12))
    A = answers.astype(np.float64)
    groups: list[np.ndarray] = []

    def grow(idx: np.ndarray) -> TreeNode:
        occ, s1, s2, tot = _pooled(stats, idx)
        ll_here = float(node_loglik(occ, s1, s2, tot, stats.floor))
        best = None
        if idx.size > 1 and np.isfinite(threshold):
            a = A[:, idx]
            n_yes = a.sum(axis=1)
            y_occ = a @ stats.occ[idx]
            y_s1 = a @ stats.s1[idx]
            y_s2 = a @ stats.s2[idx]
            y_tot = None if tot is None else a @ stats.total[idx]
            y_w = a @ stats.weight[idx]
            w = stats.weight[idx].sum()
            # complements by subtraction can dip just below zero
            n_occ = np.maximum(occ - y_occ, 0.0)
            n_tot = None if tot is None else np.maximum(tot - y_tot, 0.0)
            gain = (node_loglik(y_occ, y_s1, y_s2, y_tot, stats.floor)
                    + node_loglik(n_occ, s1 - y_s1, s2 - y_s2, n_tot, stats.floor)
                    - ll_here)
            ok = (np.isfinite(gain) & (n_yes > 0) & (n_yes < idx.size)
                  & (y_w >= cfg.min_occupancy) & (w - y_w >= cfg.min_occupancy))
            gain = np.where(ok, gain, -np.inf)
            q = int(np.argmax(gain))
            if ok[q] and gain[q] > threshold:
                best = q
        if best is None:
            groups.append(idx)
            return TreeNode(leaf=len(groups) - 1)
        yes = answers[best, idx]
        node = TreeNode(questions[best])
        node.yes = grow(idx[yes])
        node.no = grow(idx[~yes])
        return node

    root = grow(np.arange(n))
    return DecisionTree(state, stream, root), groups


def cluster_states_mdl(labels: Sequence[ContextLabel], stats: StateStats,
                       questions: Sequence[Question], cfg: ClusterConfig = ClusterConfig(),
                       state: int = 1, stream: str = "spectrum",
                       answers: np.ndarray | None = None):
    """Cluster one state position of one stream; see :func:`build_tree`."""
    if answers is None:
        answers = answer_matrix(questions, labels)
    return build_tree(stats, answers, questions, cfg, state, stream)
