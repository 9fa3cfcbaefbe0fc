"""Precompute orchestration: all neighbor graphs and metric columns, on disk.

Layout under the dataset root:

    cache/neighbors/hd_k{K}.{indices.u32,distances.f32,json}
    cache/neighbors/ld_{embedding}_k{K}.{indices.u32,distances.f32,json}
    cache/metrics/{embedding}/{metric...}.f32  (+ .meta.json + .json descriptor)
    cache/metrics/point_stability_k{K}.f32     (bundle level)

Each column's JSON descriptor is written after its array, so a descriptor
always points at a complete file. Reruns skip any output whose descriptor
already matches the requested parameters byte for byte.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from filelock import FileLock

from . import metrics as metrics_mod
from .arrays import read_array, sidecar_path, write_array
from .errors import ParameterError
from .metrics import AnchorSet, TripletSampler
from .model import DatasetBundle, Manifest, make_metric_column
from .neighbors import (
    EXACT_FALLBACK_N,
    build_approx_knn,
    graph_paths,
    load_graph,
    save_graph,
)

STABILITY_K = 50


@dataclass(frozen=True)
class PrecomputeConfig:
    k_list: tuple = (10, 50, 100, 200)
    seed: int = 42
    triplets_per_point: int = 500
    anchor_count: int | None = None
    recall_target: float = 0.95
    force: bool = False

    def __post_init__(self):
        ks = sorted(set(int(k) for k in self.k_list))
        if not ks or ks[0] < 1:
            raise ParameterError(f"k_list must hold positive integers, got {self.k_list}")
        object.__setattr__(self, "k_list", tuple(ks))
        if self.seed < 0:
            raise ParameterError("seed must be a non-negative integer")
        if self.triplets_per_point < 1:
            raise ParameterError("triplets_per_point must be positive")

    @property
    def kmax(self) -> int:
        return self.k_list[-1]

    def settings(self) -> dict:
        return {
            "k_list": list(self.k_list),
            "seed": int(self.seed),
            "triplets_per_point": int(self.triplets_per_point),
            "anchor_count": self.anchor_count,
            "recall_target": float(self.recall_target),
        }

    @classmethod
    def from_settings(cls, settings: dict, force: bool = False) -> "PrecomputeConfig":
        return cls(
            k_list=tuple(settings["k_list"]),
            seed=settings["seed"],
            triplets_per_point=settings["triplets_per_point"],
            anchor_count=settings.get("anchor_count"),
            recall_target=settings.get("recall_target", 0.95),
            force=force,
        )


@dataclass
class _GraphPlan:
    stem: str
    space_id: str
    k: int
    exactness: str


@dataclass
class _ColumnPlan:
    embedding: str | None  # None = bundle level
    metric_name: str
    filename: str
    params: dict
    relpath: str = field(init=False)

    def __post_init__(self):
        sub = f"{self.embedding}/" if self.embedding else ""
        self.relpath = f"{sub}{self.filename}"


def _plan(n: int, embedding_names: list, settings: dict) -> tuple:
    """Expected graphs and columns for a dataset of size n, plus warnings."""
    seed = settings["seed"]
    exactness = "approximate" if n > EXACT_FALLBACK_N else "exact"
    warnings = []
    feasible = []
    for k in settings["k_list"]:
        if k <= n - 1:
            feasible.append(int(k))
        else:
            warnings.append(
                {"kind": "k_skipped", "k": int(k), "reason": f"needs n >= {k + 1}, dataset has {n}"}
            )
    stability_k = min(STABILITY_K, n - 1)
    kmax_eff = max(feasible) if feasible else stability_k
    k_ld = max(kmax_eff, stability_k)

    graphs = [_GraphPlan(f"hd_k{kmax_eff}", "hd", kmax_eff, exactness)]
    for name in embedding_names:
        graphs.append(_GraphPlan(f"ld_{name}_k{k_ld}", f"ld:{name}", k_ld, exactness))

    t = settings["triplets_per_point"]
    m = AnchorSet.effective_count(n, settings.get("anchor_count"))
    columns = []
    for name in embedding_names:
        for k in feasible:
            columns.append(
                _ColumnPlan(
                    name,
                    "neighborhood_preservation",
                    f"neighborhood_preservation_k{k}.f32",
                    {"k": k, "hd_exactness": exactness, "ld_exactness": exactness},
                )
            )
        columns.append(
            _ColumnPlan(
                name,
                "triplet_accuracy",
                f"triplet_accuracy_t{t}_s{seed}.f32",
                {"mode": "sampled", "seed": seed, "triplets_per_point": t},
            )
        )
        if m - 1 >= 3:
            columns.append(
                _ColumnPlan(
                    name,
                    "distance_rank_correlation",
                    f"distance_rank_correlation_m{m}_s{seed}.f32",
                    {"seed": seed, "anchor_count": m},
                )
            )
        else:
            warnings.append(
                {
                    "kind": "rank_correlation_skipped",
                    "reason": f"only {m} anchors available, need 4",
                }
            )
    if len(embedding_names) >= 2:
        columns.append(
            _ColumnPlan(
                None,
                "point_stability",
                f"point_stability_k{stability_k}.f32",
                {"k": stability_k},
            )
        )
    return graphs, columns, warnings, kmax_eff, k_ld, stability_k


def _column_descriptor(plan: _ColumnPlan, vmin: float, vmax: float) -> dict:
    return {
        "embedding": plan.embedding,
        "metric_name": plan.metric_name,
        "params": plan.params,
        "vmin": vmin,
        "vmax": vmax,
    }


def _descriptor_path(metrics_root: Path, plan: _ColumnPlan) -> Path:
    return metrics_root / (plan.relpath.removesuffix(".f32") + ".json")


def _column_is_cached(metrics_root: Path, plan: _ColumnPlan, expected_vrange=None) -> bool:
    """True when the descriptor parses, matches the plan, and the array exists."""
    array_path = metrics_root / plan.relpath
    desc_path = _descriptor_path(metrics_root, plan)
    if not (array_path.exists() and sidecar_path(array_path).exists() and desc_path.exists()):
        return False
    try:
        desc = json.loads(desc_path.read_text())
    except (OSError, json.JSONDecodeError):
        return False
    if (
        desc.get("embedding") != plan.embedding
        or desc.get("metric_name") != plan.metric_name
        or desc.get("params") != plan.params
    ):
        return False
    if expected_vrange is not None and (desc.get("vmin"), desc.get("vmax")) != expected_vrange:
        return False
    return True


def _graph_is_cached(neighbors_root: Path, plan: _GraphPlan, seed: int) -> bool:
    paths = graph_paths(neighbors_root, plan.stem)
    if not all(p.exists() for p in paths.values()):
        return False
    try:
        desc = json.loads(paths["descriptor"].read_text())
    except (OSError, json.JSONDecodeError):
        return False
    return desc == {
        "space_id": plan.space_id,
        "k": plan.k,
        "exactness": plan.exactness,
        "seed": seed,
    }


def _write_column(metrics_root: Path, plan: _ColumnPlan, column) -> None:
    array_path = metrics_root / plan.relpath
    write_array(array_path, column.values.reshape(-1, 1))
    desc = _column_descriptor(plan, column.vmin, column.vmax)
    desc_path = _descriptor_path(metrics_root, plan)
    tmp = desc_path.with_name(desc_path.name + ".tmp")
    tmp.write_text(json.dumps(desc, indent=2, sort_keys=True) + "\n")
    os.replace(tmp, desc_path)


def precompute(bundle: DatasetBundle, config: PrecomputeConfig) -> Manifest:
    """Build and persist every graph and metric column the config asks for."""
    manifest = bundle.manifest
    if manifest is None:
        raise ParameterError("bundle has no manifest; load it from a dataset directory")
    n = bundle.n
    emb_names = [e.name for e in bundle.embeddings]
    settings = config.settings()
    graphs_plan, columns_plan, warnings, kmax_eff, k_ld, stability_k = _plan(
        n, emb_names, settings
    )

    neighbors_root = manifest.resolve(manifest.neighbors_dir)
    metrics_root = manifest.resolve(manifest.metrics_dir)
    neighbors_root.mkdir(parents=True, exist_ok=True)
    metrics_root.mkdir(parents=True, exist_ok=True)

    cache_root = manifest.resolve("cache")
    cache_root.mkdir(parents=True, exist_ok=True)
    with FileLock(str(cache_root / ".lock")):
        graphs = {}
        for gplan in graphs_plan:
            if not config.force and _graph_is_cached(neighbors_root, gplan, config.seed):
                graphs[gplan.space_id] = load_graph(neighbors_root, gplan.stem)
                continue
            if gplan.space_id == "hd":
                points = bundle.hd_points
            else:
                points = bundle.embedding(gplan.space_id.removeprefix("ld:")).coords
            graph = build_approx_knn(
                points,
                gplan.k,
                recall_target=config.recall_target,
                seed=config.seed,
                space_id=gplan.space_id,
            )
            save_graph(graph, neighbors_root, gplan.stem, seed=config.seed)
            graphs[gplan.space_id] = graph

        hd_graph = graphs["hd"]
        sampler = TripletSampler(seed=config.seed, triplets_per_point=config.triplets_per_point)
        anchors = None

        column_records = []
        for cplan in columns_plan:
            if not config.force and _column_is_cached(metrics_root, cplan):
                desc = json.loads(_descriptor_path(metrics_root, cplan).read_text())
                column_records.append(dict(desc, path=cplan.relpath))
                continue
            if cplan.metric_name == "neighborhood_preservation":
                column = metrics_mod.neighborhood_preservation(
                    hd_graph, graphs[f"ld:{cplan.embedding}"], cplan.params["k"]
                )
            elif cplan.metric_name == "triplet_accuracy":
                column = metrics_mod.triplet_accuracy(
                    bundle.hd_points, bundle.embedding(cplan.embedding).coords, sampler
                )
            elif cplan.metric_name == "distance_rank_correlation":
                if anchors is None:
                    anchors = AnchorSet.sample(n, config.seed, config.anchor_count)
                column = metrics_mod.distance_rank_correlation(
                    bundle.hd_points, bundle.embedding(cplan.embedding).coords, anchors
                )
            elif cplan.metric_name == "point_stability":
                column = metrics_mod.point_stability(
                    [e.coords for e in bundle.embeddings],
                    [graphs[f"ld:{name}"] for name in emb_names],
                    stability_k,
                )
            else:  # pragma: no cover - plan only emits the four names above
                raise ParameterError(f"unplanned metric {cplan.metric_name}")
            if column.params != cplan.params:
                raise ParameterError(
                    f"planned params {cplan.params} but computed {column.params}"
                )
            _write_column(metrics_root, cplan, column)
            column_records.append(_column_descriptor(cplan, column.vmin, column.vmax))
            column_records[-1]["path"] = cplan.relpath

        manifest.columns = column_records
        manifest.precompute = {
            "settings": settings,
            "kmax": kmax_eff,
            "ld_graph_k": k_ld,
            "stability_k": stability_k,
            "hd_exactness": hd_graph.exactness,
            "warnings": warnings,
        }
        manifest.save()
    return manifest


def status(manifest: Manifest, config: PrecomputeConfig | None = None) -> dict:
    """Cache state per expected graph and column; never raises on bad cache files."""
    if config is None:
        if manifest.precompute.get("settings"):
            config = PrecomputeConfig.from_settings(manifest.precompute["settings"])
        else:
            config = PrecomputeConfig(k_list=tuple(manifest.k_list), seed=manifest.seed)
    hd_meta = sidecar_path(manifest.resolve(manifest.hd_points))
    try:
        n = json.loads(hd_meta.read_text())["shape"][0]
    except (OSError, json.JSONDecodeError, KeyError):
        raise ParameterError(f"cannot determine dataset size from {hd_meta}")
    emb_names = [entry["name"] for entry in manifest.embeddings]
    graphs_plan, columns_plan, warnings, *_ = _plan(n, emb_names, config.settings())

    neighbors_root = manifest.resolve(manifest.neighbors_dir)
    metrics_root = manifest.resolve(manifest.metrics_dir)

    # the descriptor is written last, so its absence means "missing" even when
    # stray array files exist; a descriptor that is present but unreadable or
    # pointing at an incomplete column is "corrupt"
    graph_rows = []
    for gplan in graphs_plan:
        paths = graph_paths(neighbors_root, gplan.stem)
        if _graph_is_cached(neighbors_root, gplan, config.seed):
            state = "present"
        elif not paths["descriptor"].exists():
            state = "missing"
        else:
            state = "corrupt"
        graph_rows.append({"stem": gplan.stem, "space_id": gplan.space_id, "state": state})

    column_rows = []
    for cplan in columns_plan:
        if _column_is_cached(metrics_root, cplan):
            state = "present"
        elif not _descriptor_path(metrics_root, cplan).exists():
            state = "missing"
        else:
            state = "corrupt"
        column_rows.append(
            {
                "embedding": cplan.embedding,
                "metric_name": cplan.metric_name,
                "params": cplan.params,
                "path": cplan.relpath,
                "state": state,
            }
        )

    counts = {"present": 0, "missing": 0, "corrupt": 0}
    for row in graph_rows + column_rows:
        counts[row["state"]] += 1
    return {
        "dataset": manifest.name,
        "n": n,
        "graphs": graph_rows,
        "columns": column_rows,
        "warnings": warnings,
        **counts,
    }
