"""Bit-exact on-disk matrices: raw little-endian payload plus a JSON sidecar.

An array file holds the contiguous row-major payload and nothing else; the
sidecar ``<file>.meta.json`` records dtype, shape, order, and endianness.
Writes go through a temporary name and an atomic rename so readers never see
a truncated payload.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .errors import ArrayFormatError, NonFiniteError, ShapeMismatchError

_DTYPES = {
    "f32": np.dtype("<f4"),
    "u32": np.dtype("<u4"),
}


def sidecar_path(path: str | Path) -> Path:
    return Path(str(path) + ".meta.json")


def write_array(path: str | Path, matrix: np.ndarray, dtype: str = "f32") -> None:
    """Write a dense 2-D matrix so that read_array returns it bit-exactly."""
    if dtype not in _DTYPES:
        raise ArrayFormatError(f"unsupported dtype {dtype!r}")
    arr = np.asarray(matrix)
    if arr.ndim != 2:
        raise ShapeMismatchError(f"expected a 2-D matrix, got ndim={arr.ndim}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ShapeMismatchError(f"refusing to write empty matrix of shape {arr.shape}")
    arr = np.ascontiguousarray(arr, dtype=_DTYPES[dtype])
    if dtype == "f32" and not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise NonFiniteError(f"non-finite value at row {bad[0]}, column {bad[1]}")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(arr.tobytes())
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)

    meta = {
        "dtype": dtype,
        "shape": [int(arr.shape[0]), int(arr.shape[1])],
        "order": "row-major",
        "endian": "little",
    }
    mtmp = sidecar_path(path).with_name(sidecar_path(path).name + ".tmp")
    mtmp.write_text(json.dumps(meta, sort_keys=True) + "\n")
    os.replace(mtmp, sidecar_path(path))


def read_array(path: str | Path) -> np.ndarray:
    """Read a matrix written by write_array. Returns a read-only array."""
    path = Path(path)
    try:
        meta = json.loads(sidecar_path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ArrayFormatError(f"unparseable sidecar for {path}: {exc}") from exc
    dtype = meta.get("dtype")
    if dtype not in _DTYPES:
        raise ArrayFormatError(f"{path}: unknown dtype {dtype!r} in sidecar")
    if meta.get("order") != "row-major" or meta.get("endian") != "little":
        raise ArrayFormatError(f"{path}: unsupported order/endian in sidecar")
    shape = meta.get("shape")
    if (
        not isinstance(shape, list)
        or len(shape) != 2
        or not all(isinstance(s, int) and s > 0 for s in shape)
    ):
        raise ArrayFormatError(f"{path}: bad shape {shape!r} in sidecar")

    expected = shape[0] * shape[1] * 4
    payload = path.read_bytes()
    if len(payload) != expected:
        raise ArrayFormatError(
            f"{path}: payload is {len(payload)} bytes, header implies {expected}"
        )
    arr = np.frombuffer(payload, dtype=_DTYPES[dtype]).reshape(shape[0], shape[1])
    arr.setflags(write=False)
    return arr
