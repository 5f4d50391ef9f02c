"""Versioned binary model checkpoints.

Layout: 4-byte magic, little-endian uint32 format version, little-endian
uint32 JSON header length, the UTF-8 JSON header (architecture, round
number, seed, tensor shapes), then the parameter tensors as contiguous
little-endian float64 buffers in declared order. Field order and endianness
are fixed, so files are stable across platforms.
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass

import numpy as np

from .network import ModelParams, arch_from_dict, arch_to_dict

MAGIC = b"FIDC"
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    """Raised for unreadable or inconsistent checkpoint files."""


@dataclass(frozen=True)
class Checkpoint:
    params: ModelParams
    round_index: int
    seed: int
    extra: dict


def save_checkpoint(
    path: str | os.PathLike,
    params: ModelParams,
    round_index: int = 0,
    seed: int = 0,
    extra: dict | None = None,
) -> None:
    header = {
        "format_version": FORMAT_VERSION,
        "arch": arch_to_dict(params.arch),
        "round_index": int(round_index),
        "seed": int(seed),
        "shapes": [list(t.shape) for t in params.tensors],
        "extra": extra or {},
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", FORMAT_VERSION, len(blob)))
        fh.write(blob)
        for tensor in params.tensors:
            fh.write(np.ascontiguousarray(tensor, dtype="<f8").tobytes())


def load_checkpoint(path: str | os.PathLike) -> Checkpoint:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise CheckpointError(f"{path}: not a model checkpoint (magic {magic!r})")
        version, header_len = struct.unpack("<II", fh.read(8))
        if version != FORMAT_VERSION:
            raise CheckpointError(f"{path}: unsupported format version {version}")
        header = json.loads(fh.read(header_len).decode("utf-8"))
        arch = arch_from_dict(header["arch"])
        tensors = []
        for shape in header["shapes"]:
            count = int(np.prod(shape)) if shape else 1
            buf = fh.read(count * 8)
            if len(buf) != count * 8:
                raise CheckpointError(f"{path}: truncated tensor data")
            tensors.append(np.frombuffer(buf, dtype="<f8").astype(np.float64).reshape(shape))
        trailing = fh.read(1)
        if trailing:
            raise CheckpointError(f"{path}: trailing bytes after tensor data")
    params = ModelParams(arch=arch, tensors=tuple(tensors))
    return Checkpoint(
        params=params,
        round_index=int(header["round_index"]),
        seed=int(header["seed"]),
        extra=dict(header.get("extra", {})),
    )
