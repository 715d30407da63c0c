"""Objective comparisons of natural and synthesized speech, and MOS aggregation."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

MOS_RANGE = (1.0, 5.0)
# (10 / ln 10) * sqrt(2): converts a mel-cepstral Euclidean distance to dB
MCD_CONSTANT = 10.0 / np.log(10.0) * np.sqrt(2.0)


class EvaluationError(ValueError):
    pass


@dataclass
class MosTable:
    """Per-listener average scores, one row per system.

    ``stdevs`` (same shape as ``scores``) is optional.
    """

    systems: list[str]
    listeners: list[str]
    scores: np.ndarray
    stdevs: np.ndarray | None = None

    def __post_init__(self):
        self.scores = np.atleast_2d(np.asarray(self.scores, dtype=np.float64))
        if self.scores.size == 0:
            raise EvaluationError("empty MOS table")
        if self.scores.shape != (len(self.systems), len(self.listeners)):
            raise EvaluationError("scores must be systems x listeners")
        if not np.all(np.isfinite(self.scores)):
            raise EvaluationError("every system needs a score from every listener")
        lo, hi = MOS_RANGE
        bad = (self.scores < lo) | (self.scores > hi)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise EvaluationError(
                f"score out of range [{lo:g}, {hi:g}]: {self.scores[i, j]:g} "
                f"({self.systems[i]}, {self.listeners[j]})")
        if self.stdevs is not None:
            self.stdevs = np.asarray(self.stdevs, dtype=np.float64)
            if self.stdevs.shape != self.scores.shape:
                raise EvaluationError("stdevs must match scores in shape")
            if np.any(self.stdevs < 0):
                raise EvaluationError("standard deviations must be >= 0")


@dataclass(frozen=True)
class MosSummary:
    system: str
    mean: float
    mean_stdev: float | None

    def display(self) -> str:
        s = f"{self.system}\t{self.mean:.2f}"
        if self.mean_stdev is not None:
            s += f"\t{self.mean_stdev:.2f}"
        return s


def aggregate_mos(table: MosTable) -> list[MosSummary]:
    """Mean score across listeners for each system (and mean listener stdev)."""
    means = table.scores.mean(axis=1)
    sds = None if table.stdevs is None else table.stdevs.mean(axis=1)
    return [MosSummary(name, float(means[i]), None if sds is None else float(sds[i]))
            for i, name in enumerate(table.systems)]


def read_mos_csv(path) -> MosTable:
    """Read ``system,listener,score[,stdev]`` rows into a :class:`MosTable`."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        missing = {"system", "listener", "score"} - set(fields)
        if missing:
            raise EvaluationError(f"MOS CSV lacks column(s): {', '.join(sorted(missing))}")
        has_sd = "stdev" in fields
        cells: dict[tuple[str, str], tuple[float, float]] = {}
        systems: list[str] = []
        listeners: list[str] = []
        for lineno, row in enumerate(reader, start=2):
            sysname, listener = row["system"].strip(), row["listener"].strip()
            try:
                score = float(row["score"])
                sd = float(row["stdev"]) if has_sd and row["stdev"] not in (None, "") else np.nan
            except (TypeError, ValueError):
                raise EvaluationError(f"line {lineno}: malformed number") from None
            if (sysname, listener) in cells:
                raise EvaluationError(f"line {lineno}: duplicate row for {sysname}/{listener}")
            cells[sysname, listener] = (score, sd)
            if sysname not in systems:
                systems.append(sysname)
            if listener not in listeners:
                listeners.append(listener)
    if not cells:
        raise EvaluationError("empty MOS table")
    scores = np.full((len(systems), len(listeners)), np.nan)
    sds = np.full_like(scores, np.nan)
    for (s, l), (v, sd) in cells.items():
        scores[systems.index(s), listeners.index(l)] = v
        sds[systems.index(s), listeners.index(l)] = sd
    return MosTable(systems, listeners, scores, sds if np.all(np.isfinite(sds)) else None)


def _voiced(f0) -> tuple[np.ndarray, np.ndarray]:
    f0 = np.asarray(f0, dtype=np.float64).ravel()
    return f0, np.isfinite(f0) & (f0 > 0)


@dataclass(frozen=True)
class F0Comparison:
    rmse: float | None
    agreement: float
    n_frames: int
    n_both_voiced: int


def compare_f0(natural, synthesized) -> F0Comparison:
    """RMSE (Hz) over frames voiced in both tracks and voicing agreement.

    Tracks hold Hz per frame; NaN or values <= 0 mark unvoiced frames. The
    longer track is truncated to the common length. ``rmse`` is None when
    no frame is voiced in both.
    """
    a, va = _voiced(natural)
    b, vb = _voiced(synthesized)
    n = min(a.shape[0], b.shape[0])
    if n == 0:
        raise EvaluationError("empty F0 track")
    a, va, b, vb = a[:n], va[:n], b[:n], vb[:n]
    both = va & vb
    rmse = float(np.sqrt(np.mean((a[both] - b[both]) ** 2))) if both.any() else None
    return F0Comparison(rmse, float(np.mean(va == vb)), n, int(both.sum()))


def mcd_per_frame(natural, synthesized) -> np.ndarray:
    """Mel-cepstral distortion (dB) per frame over coefficients 1..M."""
    a = np.atleast_2d(np.asarray(natural, dtype=np.float64))
    b = np.atleast_2d(np.asarray(synthesized, dtype=np.float64))
    if a.shape[1] != b.shape[1]:
        raise EvaluationError(f"order mismatch: M={a.shape[1] - 1} vs M={b.shape[1] - 1}")
    n = min(a.shape[0], b.shape[0])
    if n == 0:
        raise EvaluationError("empty mel-cepstrum sequence")
    return MCD_CONSTANT * np.linalg.norm(a[:n, 1:] - b[:n, 1:], axis=1)


def compare_spectra(natural, synthesized) -> float:
    """Mean mel-cepstral distortion in dB (c0 excluded, common length)."""
    return float(mcd_per_frame(natural, synthesized).mean())


def write_f0_comparison_csv(natural, synthesized, path) -> None:
    a, va = _voiced(natural)
    b, vb = _voiced(synthesized)
    n = min(a.shape[0], b.shape[0])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["frame", "f0_nat", "f0_syn", "voiced_nat", "voiced_syn"])
        for t in range(n):
            w.writerow([t, repr(float(a[t])) if va[t] else "0", repr(float(b[t])) if vb[t] else "0",
                        int(va[t]), int(vb[t])])


def write_mcd_csv(natural, synthesized, path) -> None:
    d = mcd_per_frame(natural, synthesized)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["frame", "mcd_db"])
        for t, v in enumerate(d):
            w.writerow([t, repr(float(v))])
