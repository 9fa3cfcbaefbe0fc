"""In-memory data model and the manifest tying a dataset directory together.

A dataset directory holds a ``trace.json`` manifest, the high-dimensional
point matrix, one coordinate matrix per embedding, an optional metadata CSV,
and a cache directory filled by the precompute pipeline. Everything loaded
here is immutable afterwards; arrays are marked read-only.
"""

from __future__ import annotations

import csv
import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .arrays import read_array, write_array
from .errors import ManifestError, NonFiniteError, ShapeMismatchError

MANIFEST_NAME = "trace.json"
SCHEMA_VERSION = 1

METRIC_NAMES = (
    "neighborhood_preservation",
    "triplet_accuracy",
    "distance_rank_correlation",
    "point_stability",
    "hd_distance_to_anchor",
)

# hard value ranges for bounded metrics, also used as display ranges
METRIC_RANGES = {
    "neighborhood_preservation": (0.0, 1.0),
    "triplet_accuracy": (0.0, 1.0),
    "point_stability": (0.0, 1.0),
    "distance_rank_correlation": (-1.0, 1.0),
}

_NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")

MAX_CATEGORIES = 1024


def _check_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(np.atleast_2d(arr)))[0]
        raise NonFiniteError(f"non-finite value in {what} at row {bad[0]}, column {bad[1]}")


def _freeze(value):
    if isinstance(value, (list, tuple)):
        return tuple(_freeze(v) for v in value)
    return value


def metric_key(metric_name: str, params: dict) -> tuple:
    """Hashable descriptor identifying one metric column."""
    return (metric_name, tuple(sorted((k, _freeze(v)) for k, v in params.items())))


@dataclass(frozen=True)
class MetadataColumn:
    name: str
    kind: str  # "categorical" | "continuous"
    values: tuple | np.ndarray  # n strings, or n float32

    def validate(self, n: int) -> None:
        if len(self.values) != n:
            raise ShapeMismatchError(
                f"metadata column {self.name!r} has {len(self.values)} values, expected {n}"
            )
        if self.kind == "categorical":
            distinct = len(set(self.values))
            if distinct > MAX_CATEGORIES:
                raise ShapeMismatchError(
                    f"categorical column {self.name!r} has {distinct} distinct values "
                    f"(limit {MAX_CATEGORIES})"
                )
        elif self.kind == "continuous":
            _check_finite(np.asarray(self.values), f"metadata column {self.name!r}")
        else:
            raise ManifestError(f"unknown metadata kind {self.kind!r}")


@dataclass
class MetricColumn:
    metric_name: str
    params: dict
    values: np.ndarray  # n float32
    vmin: float
    vmax: float

    def validate(self, n: int) -> None:
        if self.metric_name not in METRIC_NAMES:
            raise ManifestError(f"unknown metric name {self.metric_name!r}")
        if self.values.shape != (n,):
            raise ShapeMismatchError(
                f"metric {self.metric_name} has shape {self.values.shape}, expected ({n},)"
            )
        _check_finite(self.values, f"metric {self.metric_name}")
        lo, hi = float(self.values.min()), float(self.values.max())
        if self.vmin > lo or self.vmax < hi:
            raise ShapeMismatchError(
                f"metric {self.metric_name}: display range [{self.vmin}, {self.vmax}] "
                f"does not cover values [{lo}, {hi}]"
            )
        if self.metric_name in METRIC_RANGES:
            rlo, rhi = METRIC_RANGES[self.metric_name]
            if lo < rlo - 1e-6 or hi > rhi + 1e-6:
                raise ShapeMismatchError(
                    f"metric {self.metric_name} values [{lo}, {hi}] leave [{rlo}, {rhi}]"
                )

    @property
    def key(self) -> tuple:
        return metric_key(self.metric_name, self.params)


def make_metric_column(metric_name: str, params: dict, values: np.ndarray) -> MetricColumn:
    """Wrap raw values, picking the display range (natural bounds when known)."""
    values = np.ascontiguousarray(values, dtype=np.float32)
    if metric_name in METRIC_RANGES:
        vmin, vmax = METRIC_RANGES[metric_name]
    else:
        vmin, vmax = float(values.min()), float(values.max())
    col = MetricColumn(metric_name, dict(params), values, float(vmin), float(vmax))
    col.values.setflags(write=False)
    return col


@dataclass
class Embedding:
    name: str
    coords: np.ndarray  # n x 2 float32
    metrics: dict = field(default_factory=dict)  # metric_key -> MetricColumn
    ld_neighbors: dict = field(default_factory=dict)  # k -> NeighborGraph

    def add_metric(self, column: MetricColumn) -> None:
        column.validate(self.coords.shape[0])
        self.metrics[column.key] = column


@dataclass
class DatasetBundle:
    name: str
    hd_points: np.ndarray  # n x d float32
    embeddings: list
    metadata: list = field(default_factory=list)
    hd_neighbors: dict = field(default_factory=dict)  # k -> NeighborGraph
    manifest: Optional["Manifest"] = None

    @property
    def n(self) -> int:
        return self.hd_points.shape[0]

    @property
    def d(self) -> int:
        return self.hd_points.shape[1]

    def embedding(self, name: str) -> Embedding:
        for emb in self.embeddings:
            if emb.name == name:
                return emb
        raise KeyError(f"no embedding named {name!r}")

    def metadata_column(self, name: str) -> MetadataColumn:
        for col in self.metadata:
            if col.name == name:
                return col
        raise KeyError(f"no metadata column named {name!r}")


@dataclass
class Manifest:
    root: Path  # dataset directory; not serialized
    name: str
    hd_points: str
    embeddings: list  # [{"name": str, "coords": relpath}]
    metadata: Optional[str] = None
    neighbors_dir: str = "cache/neighbors"
    metrics_dir: str = "cache/metrics"
    k_list: list = field(default_factory=lambda: [10, 50, 100, 200])
    seed: int = 42
    columns: list = field(default_factory=list)
    precompute: dict = field(default_factory=dict)

    @property
    def path(self) -> Path:
        return self.root / MANIFEST_NAME

    def resolve(self, relpath: str) -> Path:
        return self.root / relpath

    def to_json(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "hd_points": self.hd_points,
            "embeddings": self.embeddings,
            "metadata": self.metadata,
            "cache": {"neighbors": self.neighbors_dir, "metrics": self.metrics_dir},
            "defaults": {"k_list": list(self.k_list), "seed": int(self.seed)},
            "columns": self.columns,
            "precompute": self.precompute,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def save(self) -> None:
        tmp = self.path.with_name(self.path.name + ".tmp")
        tmp.write_text(self.to_json())
        os.replace(tmp, self.path)

    @classmethod
    def load(cls, manifest_path: str | Path) -> "Manifest":
        manifest_path = Path(manifest_path)
        if manifest_path.is_dir():
            manifest_path = manifest_path / MANIFEST_NAME
        if not manifest_path.exists():
            raise FileNotFoundError(f"manifest not found: {manifest_path}")
        try:
            doc = json.loads(manifest_path.read_text())
        except json.JSONDecodeError as exc:
            raise ManifestError(f"unparseable manifest {manifest_path}: {exc}") from exc
        version = doc.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ManifestError(f"unknown schema_version {version!r} (expected {SCHEMA_VERSION})")
        cache = doc.get("cache", {})
        return cls(
            root=manifest_path.parent,
            name=doc["name"],
            hd_points=doc["hd_points"],
            embeddings=doc["embeddings"],
            metadata=doc.get("metadata"),
            neighbors_dir=cache.get("neighbors", "cache/neighbors"),
            metrics_dir=cache.get("metrics", "cache/metrics"),
            k_list=list(doc.get("defaults", {}).get("k_list", [10, 50, 100, 200])),
            seed=int(doc.get("defaults", {}).get("seed", 42)),
            columns=doc.get("columns", []),
            precompute=doc.get("precompute", {}),
        )


def _load_matrix(manifest: Manifest, relpath: str, what: str) -> np.ndarray:
    """Load a matrix file; CSV sources are converted to the canonical binary."""
    path = manifest.resolve(relpath)
    if path.suffix == ".csv":
        binary = path.with_suffix(".f32")
        if not binary.exists():
            if not path.exists():
                raise FileNotFoundError(f"{what}: missing file {path}")
            raw = np.loadtxt(path, delimiter=",", skiprows=1, dtype=np.float64, ndmin=2)
            write_array(binary, raw.astype(np.float32))
        path = binary
    if not path.exists():
        raise FileNotFoundError(f"{what}: missing file {path}")
    arr = read_array(path)
    _check_finite(arr, what)
    return arr


def _parse_metadata_csv(path: Path, n: int) -> list:
    """Read the metadata CSV; column kinds are inferred (all-float -> continuous)."""
    if not path.exists():
        raise FileNotFoundError(f"metadata: missing file {path}")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ManifestError(f"metadata file {path} is empty")
    header, body = rows[0], rows[1:]
    if len(body) != n:
        raise ShapeMismatchError(f"metadata has {len(body)} rows, expected {n}")
    columns = []
    for j, name in enumerate(header):
        raw = [row[j] for row in body]
        try:
            floats = np.array([float(v) for v in raw], dtype=np.float32)
            col = MetadataColumn(name=name, kind="continuous", values=floats)
        except ValueError:
            col = MetadataColumn(name=name, kind="categorical", values=tuple(raw))
        col.validate(n)
        columns.append(col)
    return columns


def load_bundle(manifest_path: str | Path) -> DatasetBundle:
    """Load and validate a dataset directory into an immutable bundle."""
    manifest = Manifest.load(manifest_path)

    hd = _load_matrix(manifest, manifest.hd_points, "hd_points")
    n, d = hd.shape
    if n < 2:
        raise ShapeMismatchError(f"dataset needs at least 2 points, got {n}")
    if d < 1:
        raise ShapeMismatchError("hd_points needs at least 1 dimension")

    embeddings = []
    seen = set()
    for entry in manifest.embeddings:
        name = entry["name"]
        if not _NAME_RE.match(name):
            raise ManifestError(f"embedding name {name!r} is not filesystem/URL safe")
        if name in seen:
            raise ManifestError(f"duplicate embedding name {name!r}")
        seen.add(name)
        coords = _load_matrix(manifest, entry["coords"], f"embedding {name!r}")
        if coords.shape[0] != n:
            raise ShapeMismatchError(
                f"embedding {name!r} has {coords.shape[0]} rows, expected {n}"
            )
        if coords.shape[1] != 2:
            raise ShapeMismatchError(
                f"embedding {name!r} has {coords.shape[1]} columns, expected 2"
            )
        embeddings.append(Embedding(name=name, coords=coords))

    metadata = []
    if manifest.metadata:
        metadata = _parse_metadata_csv(manifest.resolve(manifest.metadata), n)

    return DatasetBundle(
        name=manifest.name,
        hd_points=hd,
        embeddings=embeddings,
        metadata=metadata,
        manifest=manifest,
    )
