"""On-disk feature cache keyed by the analysis-config digest and extractor version.

Record layout (little-endian)::

    b"BHTSF1" | 32-byte SHA-256 of the WAV | u32 frames | u32 order | f64 alpha
    | frames x (order+1) f64 mel-cepstra | frames f64 logF0 (NaN = unvoiced) | u32 CRC32
"""

from __future__ import annotations

import hashlib
import os
import struct
import warnings
import zlib
from pathlib import Path

import numpy as np

from ..signal.analysis import AnalysisConfig, mel_cepstrogram
from ..signal.audio import read_wav
from ..signal.pitch import estimate_f0, f0_to_log

MAGIC = b"BHTSF1"
# bump when analysis or F0 extraction changes so old records are not reused
EXTRACTOR_VERSION = 2
_HEAD = struct.Struct("<6s32sIId")


class CacheFormatError(ValueError):
    pass


def extract_features(wav_path, cfg: AnalysisConfig = AnalysisConfig()):
    """``(mcep (T, M+1), logF0 (T,))`` for one WAV file."""
    wav = read_wav(wav_path)
    return mel_cepstrogram(wav, cfg), f0_to_log(estimate_f0(wav, cfg))


def encode_record(wav_hash: bytes, mcep: np.ndarray, lf0: np.ndarray, alpha: float) -> bytes:
    T, D = mcep.shape
    body = (_HEAD.pack(MAGIC, wav_hash, T, D - 1, alpha)
            + np.ascontiguousarray(mcep, "<f8").tobytes()
            + np.ascontiguousarray(lf0, "<f8").tobytes())
    return body + struct.pack("<I", zlib.crc32(body))


def decode_record(data: bytes):
    """Return ``(wav_hash, mcep, lf0, alpha)``; raises :class:`CacheFormatError`."""
    if len(data) < _HEAD.size + 4 or data[:6] != MAGIC:
        raise CacheFormatError("not a feature record")
    body, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(body) != crc:
        raise CacheFormatError("checksum mismatch")
    _, wav_hash, T, M, alpha = _HEAD.unpack_from(body)
    need = _HEAD.size + 8 * T * (M + 2)
    if len(body) != need:
        raise CacheFormatError("record length does not match its header")
    arr = np.frombuffer(body, "<f8", offset=_HEAD.size).astype(np.float64)
    return wav_hash, arr[:T * (M + 1)].reshape(T, M + 1), arr[T * (M + 1):], alpha


class FeatureCache:
    """Features under ``root/<config digest>-v<extractor version>/<id>.feat``.

    A record is reused only when it was written for the same config and the
    same WAV bytes; anything else (including a corrupt record) is recomputed.
    """

    def __init__(self, root, cfg: AnalysisConfig = AnalysisConfig()):
        self.cfg = cfg
        self.dir = Path(root) / f"{cfg.digest()}-v{EXTRACTOR_VERSION}"
        self.hits = 0
        self.misses = 0

    def path(self, uid: str) -> Path:
        return self.dir / f"{uid}.feat"

    def features(self, uid: str, wav_path):
        raw = Path(wav_path).read_bytes()
        wav_hash = hashlib.sha256(raw).digest()
        p = self.path(uid)
        if p.exists():
            try:
                h, mcep, lf0, alpha = decode_record(p.read_bytes())
                if (h == wav_hash and alpha == self.cfg.alpha
                        and mcep.shape[1] == self.cfg.order + 1):
                    self.hits += 1
                    return mcep, lf0
            except CacheFormatError as exc:
                warnings.warn(f"feature cache {p}: {exc}; recomputing", stacklevel=2)
        self.misses += 1
        mcep, lf0 = extract_features(wav_path, self.cfg)
        self.dir.mkdir(parents=True, exist_ok=True)
        tmp = p.with_name(f".{p.name}.{os.getpid()}.tmp")
        tmp.write_bytes(encode_record(wav_hash, mcep, lf0, self.cfg.alpha))
        os.replace(tmp, p)
        return mcep, lf0
