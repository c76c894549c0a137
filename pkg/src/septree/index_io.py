"""Binary ``SEPH`` index files and a JSON debug export.

Layout (little-endian throughout)::

    magic "SEPH" | u16 version | u8 kind (1 = local tree, 2 = global lines)
    u64 vertex_count | u64 edge_count | f64 cost_checksum | u16 k
    f64 x_min, x_max, y_min, y_max | u8 flags (bit 0: subgraph costs)
    body
    u32 CRC32 of every preceding byte

Local-tree body, x axis then y axis: ``n`` codes of ``ceil(k/8)`` bytes
(level 1 in the least significant bit), ``n`` u8 valid depths, then the
``n x k`` cost matrix as f64.  Global body: ``k`` x positions, ``k`` y
positions, ``n`` side masks of ``ceil(2k/8)`` bytes, then the ``n x 2k`` cost
matrix.  Empty separators are stored as +inf.
"""
from __future__ import annotations

import json
import os
import struct
import zlib

import numpy as np

from .errors import (
    BadMagicError,
    ChecksumError,
    IndexFormatError,
    TruncatedIndexError,
    UnsupportedVersionError,
)
from .graph import BoundingBox, GraphFingerprint
from .index import AxisLabels, GshIndex, LshIndex
from .separator import Axis

MAGIC = b"SEPH"
VERSION = 1
KIND_LSH = 1
KIND_GSH = 2

_PREFIX = struct.Struct("<4sHB")
_HEADER = struct.Struct("<4sHBQQdH4dB")
_CRC = struct.Struct("<I")


def _nbytes(bits: int) -> int:
    return (bits + 7) // 8


def _pack_bits(values: np.ndarray, nb: int) -> bytes:
    raw = np.ascontiguousarray(values.astype("<i8")).view(np.uint8).reshape(-1, 8)
    return raw[:, :nb].tobytes()


def _unpack_bits(buf: bytes, n: int, nb: int) -> np.ndarray:
    raw = np.zeros((n, 8), dtype=np.uint8)
    raw[:, :nb] = np.frombuffer(buf, dtype=np.uint8).reshape(n, nb)
    return raw.view("<i8").reshape(n).astype(np.int64)


def _body_size(kind: int, n: int, k: int) -> int:
    if kind == KIND_LSH:
        return 2 * n * (_nbytes(k) + 1 + 8 * k)
    return 16 * k + n * (_nbytes(2 * k) + 16 * k)


def dumps_index(index) -> bytes:
    fp = index.fingerprint
    b = index.bbox
    if isinstance(index, LshIndex):
        kind, k, flags = KIND_LSH, index.depth, int(bool(index.subgraph_costs))
    elif isinstance(index, GshIndex):
        kind, k, flags = KIND_GSH, index.k, 0
    else:
        raise TypeError(f"cannot serialise {type(index).__name__}")
    parts = [_HEADER.pack(MAGIC, VERSION, kind, fp.vertex_count, fp.edge_count, fp.cost_checksum, k,
                          b.x_min, b.x_max, b.y_min, b.y_max, flags)]
    if kind == KIND_LSH:
        for lab in (index.x_labels, index.y_labels):
            parts.append(_pack_bits(lab.codes, _nbytes(k)))
            parts.append(lab.valid_depth.astype(np.uint8).tobytes())
            parts.append(np.ascontiguousarray(lab.costs, dtype="<f8").tobytes())
    else:
        parts.append(np.asarray(index.x_positions, dtype="<f8").tobytes())
        parts.append(np.asarray(index.y_positions, dtype="<f8").tobytes())
        parts.append(_pack_bits(index.sides, _nbytes(2 * k)))
        parts.append(np.ascontiguousarray(index.costs, dtype="<f8").tobytes())
    data = b"".join(parts)
    return data + _CRC.pack(zlib.crc32(data))


def loads_index(data: bytes):
    data = bytes(data)
    if len(data) < len(MAGIC) or data[:4] != MAGIC:
        if len(data) < len(MAGIC) and MAGIC.startswith(data):
            raise TruncatedIndexError("stream ends inside the magic number")
        raise BadMagicError("not a SEPH index file")
    if len(data) < _PREFIX.size:
        raise TruncatedIndexError("stream ends inside the header")
    _, version, kind = _PREFIX.unpack_from(data)
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported index version {version}")
    if kind not in (KIND_LSH, KIND_GSH):
        raise IndexFormatError(f"unknown index kind {kind}")
    if len(data) < _HEADER.size + _CRC.size:
        raise TruncatedIndexError("stream ends inside the header")
    (_, _, _, n, m, checksum, k, x0, x1, y0, y1, flags) = _HEADER.unpack_from(data)
    expected = _HEADER.size + _body_size(kind, n, k) + _CRC.size
    if len(data) < expected:
        raise TruncatedIndexError(f"expected {expected} bytes, got {len(data)}")
    if len(data) > expected:
        raise IndexFormatError(f"{len(data) - expected} trailing bytes after index")
    (crc,) = _CRC.unpack_from(data, expected - _CRC.size)
    if zlib.crc32(data[: expected - _CRC.size]) != crc:
        raise ChecksumError("CRC mismatch")
    if k < 1 or flags > 1:
        raise IndexFormatError("header fields out of range")

    fp = GraphFingerprint(int(n), int(m), float(checksum))
    bbox = BoundingBox(x0, x1, y0, y1)
    pos = _HEADER.size

    def take(size):
        nonlocal pos
        chunk = data[pos:pos + size]
        pos += size
        return chunk

    if kind == KIND_LSH:
        labels = []
        for axis in (Axis.X, Axis.Y):
            codes = _unpack_bits(take(n * _nbytes(k)), n, _nbytes(k))
            vdepth = np.frombuffer(take(n), dtype=np.uint8).astype(np.int64)
            costs = np.frombuffer(take(8 * n * k), dtype="<f8").reshape(n, k).astype(np.float64)
            labels.append(AxisLabels(axis, int(k), codes, costs, vdepth))
        return LshIndex(labels[0], labels[1], int(k), bbox, fp, bool(flags & 1))
    xs = np.frombuffer(take(8 * k), dtype="<f8").astype(np.float64)
    ys = np.frombuffer(take(8 * k), dtype="<f8").astype(np.float64)
    sides = _unpack_bits(take(n * _nbytes(2 * k)), n, _nbytes(2 * k))
    costs = np.frombuffer(take(16 * n * k), dtype="<f8").reshape(n, 2 * k).astype(np.float64)
    return GshIndex(int(k), xs, ys, sides, costs, bbox, fp)


def save_index(index, sink) -> None:
    data = dumps_index(index)
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "wb") as f:
            f.write(data)
    else:
        sink.write(data)


def load_index(source):
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as f:
            return loads_index(f.read())
    if isinstance(source, (bytes, bytearray, memoryview)):
        return loads_index(bytes(source))
    return loads_index(source.read())


def _cost_list(row) -> list:
    return [c if np.isfinite(c) else "inf" for c in row.tolist()]


def index_to_json(index) -> dict:
    """Plain-data view of an index: codes as bit strings, inf as ``"inf"``."""
    fp = index.fingerprint
    out = {
        "kind": index.kind,
        "fingerprint": {"vertex_count": fp.vertex_count, "edge_count": fp.edge_count,
                        "cost_checksum": fp.cost_checksum},
        "bbox": [index.bbox.x_min, index.bbox.x_max, index.bbox.y_min, index.bbox.y_max],
    }
    if isinstance(index, LshIndex):
        out["depth"] = index.depth
        out["subgraph_costs"] = index.subgraph_costs
        for lab in (index.x_labels, index.y_labels):
            out[lab.axis.name.lower()] = {
                "codes": [lab.code_bits(v) for v in range(lab.codes.shape[0])],
                "valid_depth": lab.valid_depth.tolist(),
                "costs": [_cost_list(r) for r in lab.costs],
            }
    else:
        k = index.k
        out["k"] = k
        out["x_positions"] = index.x_positions.tolist()
        out["y_positions"] = index.y_positions.tolist()
        out["sides"] = ["".join(str((int(s) >> j) & 1) for j in range(2 * k)) for s in index.sides]
        out["costs"] = [_cost_list(r) for r in index.costs]
    return out


def dump_json(index, sink) -> None:
    text = json.dumps(index_to_json(index), indent=1)
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w") as f:
            f.write(text)
    else:
        sink.write(text)
