"""Binary model files.

Layout (little-endian)::

    b"BHTSM1" u16 version
    repeated: 4-byte tag, u64 payload length, payload
    u32 CRC32 of all preceding bytes

Each payload is a u32-length-prefixed JSON header followed by a float64
blob; the header records the offsets of its arrays in the blob.
"""

from __future__ import annotations

import json
import os
import struct
import zlib
from pathlib import Path

import numpy as np

from ..signal.analysis import AnalysisConfig
from ..signal.deltas import DeltaWindows
from .distributions import DurationGaussian, MSDGaussian, StreamGaussian
from .modelset import FORMAT_VERSION, DistributionPools, GVModel, ModelSet, PhoneHMM
from .questions import Question
from .tree import DecisionTree, TreeNode

MAGIC = b"BHTSM1"
SECTIONS = (b"CONF", b"WIND", b"POOL", b"MONO", b"FULL", b"TREE", b"GVST")


class ModelFormatError(ValueError):
    pass


class _Blob:
    def __init__(self):
        self.parts: list[np.ndarray] = []
        self.size = 0

    def put(self, a) -> list:
        a = np.ascontiguousarray(a, dtype="<f8").ravel()
        self.parts.append(a)
        self.size += a.size
        return [self.size - a.size, a.size]

    def bytes(self) -> bytes:
        return b"".join(p.tobytes() for p in self.parts)


def _payload(header: dict, blob: _Blob | None = None) -> bytes:
    js = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    return struct.pack("<I", len(js)) + js + (blob.bytes() if blob else b"")


def _split_payload(data: bytes, tag: str) -> tuple[dict, np.ndarray]:
    if len(data) < 4:
        raise ModelFormatError(f"section {tag} truncated")
    (n,) = struct.unpack_from("<I", data)
    if 4 + n > len(data) or (len(data) - 4 - n) % 8:
        raise ModelFormatError(f"section {tag} truncated")
    try:
        header = json.loads(data[4:4 + n])
    except ValueError as exc:
        raise ModelFormatError(f"section {tag} header is corrupt: {exc}") from None
    return header, np.frombuffer(data[4 + n:], dtype="<f8")


def _take(blob: np.ndarray, ref) -> np.ndarray:
    start, size = ref
    if start < 0 or start + size > blob.size:
        raise ModelFormatError("array reference outside section data")
    return blob[start:start + size].astype(np.float64)


def _hmm_dict(table: dict[str, PhoneHMM]) -> list:
    return [[k, h.name, h.spectrum, h.excitation, h.duration, h.self_loop]
            for k, h in table.items()]


def _hmm_table(rows) -> dict[str, PhoneHMM]:
    return {k: PhoneHMM(name, s, e, d, a) for k, name, s, e, d, a in rows}


def _question_dict(q: Question) -> dict:
    if q.values is not None:
        return {"name": q.name, "field": q.field, "values": sorted(q.values, key=repr)}
    return {"name": q.name, "field": q.field, "threshold": q.threshold}


def _node_dict(node: TreeNode):
    if node.is_leaf:
        return {"leaf": node.leaf}
    return {"q": _question_dict(node.question), "yes": _node_dict(node.yes),
            "no": _node_dict(node.no)}


def _node(d) -> TreeNode:
    if "leaf" in d:
        return TreeNode(leaf=int(d["leaf"]))
    q = d["q"]
    values = frozenset(q["values"]) if "values" in q else None
    return TreeNode(Question(q["name"], q["field"], values, q.get("threshold")),
                    _node(d["yes"]), _node(d["no"]))


def _encode(m: ModelSet) -> dict[bytes, bytes]:
    sections = {
        b"CONF": _payload({"config": m.config.to_dict(), "inventory": m.inventory,
                           "version": m.version}),
        b"WIND": _payload({"windows": [list(w) for w in m.windows.windows]}),
    }
    blob = _Blob()
    header = {
        "spectrum": [[blob.put(g.mean), blob.put(g.variance)] for g in m.pools.spectrum],
        "excitation": [[g.voiced_weight, blob.put(g.mean), blob.put(g.variance)]
                       for g in m.pools.excitation],
        "duration": [[d.mean, d.variance] for d in m.pools.duration],
    }
    sections[b"POOL"] = _payload(header, blob)
    sections[b"MONO"] = _payload({"models": _hmm_dict(m.monophones)})
    sections[b"FULL"] = _payload({"models": _hmm_dict(m.fullcontext)})
    sections[b"TREE"] = _payload({"trees": [[s, st, _node_dict(t.root)]
                                            for (s, st), t in m.trees.items()]})
    if m.gv is None:
        sections[b"GVST"] = _payload({"gv": None})
    else:
        blob = _Blob()
        sections[b"GVST"] = _payload({"gv": [blob.put(m.gv.mean), blob.put(m.gv.variance)]},
                                     blob)
    return sections


def model_set_bytes(m: ModelSet) -> bytes:
    out = [MAGIC, struct.pack("<H", m.version)]
    for tag, payload in _encode(m).items():
        out.append(tag + struct.pack("<Q", len(payload)) + payload)
    body = b"".join(out)
    return body + struct.pack("<I", zlib.crc32(body))


def save_model_set(m: ModelSet, path) -> None:
    """Write ``m`` atomically (temporary file + rename)."""
    path = Path(path)
    data = model_set_bytes(m)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def model_set_from_bytes(data: bytes) -> ModelSet:
    if len(data) < len(MAGIC) or data[:len(MAGIC)] != MAGIC:
        raise ModelFormatError("not a model file")
    if len(data) < len(MAGIC) + 2 + 4:
        raise ModelFormatError("model file truncated")
    (version,) = struct.unpack_from("<H", data, len(MAGIC))
    body, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(body) != crc:
        raise ModelFormatError("model file truncated or corrupt (checksum mismatch)")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"model format version {version}, expected {FORMAT_VERSION}")
    pos = len(MAGIC) + 2
    sections = {}
    while pos < len(body):
        if pos + 12 > len(body):
            raise ModelFormatError("model file truncated")
        tag = body[pos:pos + 4]
        (n,) = struct.unpack_from("<Q", body, pos + 4)
        pos += 12
        if pos + n > len(body):
            raise ModelFormatError("model file truncated")
        sections[tag] = body[pos:pos + n]
        pos += n
    missing = [t.decode() for t in SECTIONS if t not in sections]
    if missing:
        raise ModelFormatError(f"model file lacks sections {missing}")
    parsed = {t: _split_payload(sections[t], t.decode()) for t in SECTIONS}
    try:
        return _decode(parsed)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(f"model file is corrupt: {exc}") from None


def _decode(parsed) -> ModelSet:
    conf, _ = parsed[b"CONF"]
    wind, _ = parsed[b"WIND"]
    pool, blob = parsed[b"POOL"]
    pools = DistributionPools(
        [StreamGaussian(_take(blob, m), _take(blob, v)) for m, v in pool["spectrum"]],
        [MSDGaussian(w, _take(blob, m), _take(blob, v)) for w, m, v in pool["excitation"]],
        [DurationGaussian(m, v) for m, v in pool["duration"]],
    )
    trees = {}
    for state, stream, root in parsed[b"TREE"][0]["trees"]:
        trees[(int(state), stream)] = DecisionTree(int(state), stream, _node(root))
    gvh, gvb = parsed[b"GVST"]
    gv = None if gvh["gv"] is None else GVModel(_take(gvb, gvh["gv"][0]),
                                                 _take(gvb, gvh["gv"][1]))
    m = ModelSet(
        config=AnalysisConfig(**conf["config"]),
        windows=DeltaWindows(tuple(tuple(w) for w in wind["windows"])),
        pools=pools,
        monophones=_hmm_table(parsed[b"MONO"][0]["models"]),
        fullcontext=_hmm_table(parsed[b"FULL"][0]["models"]),
        trees=trees,
        gv=gv,
        inventory=conf["inventory"],
        version=conf["version"],
    )
    m.check()
    return m


def load_model_set(path) -> ModelSet:
    return model_set_from_bytes(Path(path).read_bytes())
