"""Read-only HTTP API over a precomputed dataset directory.

Array endpoints stream the exact bytes of the on-disk cache files (row-major
little-endian float32), so a client can memcpy them into typed arrays. JSON
is used only for small structural responses. Nothing here computes metrics;
the two on-demand operations (anchor distances, selection neighbor unions)
are linear scans over in-memory data.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .errors import ParameterError
from .metrics import hd_distances_to_point, hd_neighbor_union
from .model import METRIC_NAMES, DatasetBundle
from .neighbors import NeighborGraph, load_graph

BINARY = "application/octet-stream"


class SelectionQuery(BaseModel):
    indices: list[int] = Field(min_length=1)
    k: int = Field(ge=1)


def _binary_relpath(relpath: str) -> str:
    """CSV sources are mirrored to a sibling .f32 at load time; serve that."""
    if relpath.endswith(".csv"):
        return relpath[: -len(".csv")] + ".f32"
    return relpath


def _error(status: int, detail, **extra) -> JSONResponse:
    return JSONResponse({"detail": detail, **extra}, status_code=status)


def create_app(bundle: DatasetBundle) -> FastAPI:
    manifest = bundle.manifest
    if manifest is None:
        raise ParameterError("bundle has no manifest; load it from a dataset directory")

    app = FastAPI(title="embtrace", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["*"],
        expose_headers=["X-Shape", "X-Vmin", "X-Vmax"],
    )

    emb_names = [e.name for e in bundle.embeddings]
    metrics_root = manifest.resolve(manifest.metrics_dir)
    neighbors_root = manifest.resolve(manifest.neighbors_dir)

    state = {"hd_graph": None}

    def hd_graph() -> NeighborGraph | None:
        if state["hd_graph"] is None:
            kmax = manifest.precompute.get("kmax")
            if kmax is None:
                return None
            try:
                state["hd_graph"] = load_graph(neighbors_root, f"hd_k{kmax}")
            except (OSError, json.JSONDecodeError):
                return None
        return state["hd_graph"]

    def columns_for(embedding: str) -> list:
        """Columns addressable under an embedding name; bundle-level ones apply to all."""
        return [
            col
            for col in manifest.columns
            if col["embedding"] == embedding or col["embedding"] is None
        ]

    @app.get("/api/manifest")
    def get_manifest():
        return {
            "dataset": bundle.name,
            "n": bundle.n,
            "embeddings": emb_names,
            "metrics": {
                name: [
                    {k: col[k] for k in ("metric_name", "params", "vmin", "vmax")}
                    for col in columns_for(name)
                ]
                for name in emb_names
            },
            "metadata": [{"name": col.name, "kind": col.kind} for col in bundle.metadata],
            "defaults": {"k_list": list(manifest.k_list), "seed": manifest.seed},
        }

    @app.get("/api/embeddings/{name}/coords")
    def get_coords(name: str):
        try:
            entry = next(e for e in manifest.embeddings if e["name"] == name)
        except StopIteration:
            return _error(404, f"unknown embedding {name!r}", available=emb_names)
        path = manifest.resolve(_binary_relpath(entry["coords"]))
        return Response(
            path.read_bytes(), media_type=BINARY, headers={"X-Shape": f"{bundle.n},2"}
        )

    @app.get("/api/embeddings/{name}/metrics/{metric}")
    def get_metric(name: str, metric: str, k: int | None = None, seed: int | None = None):
        if name not in emb_names:
            return _error(404, f"unknown embedding {name!r}", available=emb_names)
        if metric not in METRIC_NAMES:
            return _error(404, f"unknown metric {metric!r}", available=list(METRIC_NAMES))
        candidates = [col for col in columns_for(name) if col["metric_name"] == metric]
        if not candidates:
            return _error(
                404,
                f"no {metric!r} column cached for {name!r}; run precompute first",
                available=[],
            )
        available = [col["params"] for col in candidates]
        if k is not None:
            candidates = [col for col in candidates if col["params"].get("k") == k]
        if seed is not None:
            candidates = [col for col in candidates if col["params"].get("seed") == seed]
        if not candidates:
            return _error(404, f"no {metric!r} column matches the query", available=available)
        if len(candidates) > 1:
            return _error(
                422, f"query matches {len(candidates)} {metric!r} columns", available=available
            )
        col = candidates[0]
        payload = (metrics_root / col["path"]).read_bytes()
        return Response(
            payload,
            media_type=BINARY,
            headers={
                "X-Shape": f"{bundle.n},1",
                "X-Vmin": repr(col["vmin"]),
                "X-Vmax": repr(col["vmax"]),
            },
        )

    @app.post("/api/selection/neighbors")
    def post_selection(query: SelectionQuery):
        if len(set(query.indices)) != len(query.indices):
            return _error(422, "selection indices contain duplicates")
        graph = hd_graph()
        if graph is None:
            return _error(404, "no neighbor cache found; run precompute first")
        if query.k > graph.k:
            return _error(422, f"k={query.k} exceeds stored kmax={graph.k}")
        try:
            result = hd_neighbor_union(query.indices, graph, query.k)
        except ParameterError as exc:
            return _error(422, str(exc))
        return {"indices": result}

    @app.get("/api/points/{i}/hd_distances")
    def get_hd_distances(i: int):
        if i < 0 or i >= bundle.n:
            return _error(404, f"point {i} out of range 0..{bundle.n - 1}")
        values = hd_distances_to_point(bundle.hd_points, i)
        return Response(
            values.tobytes(), media_type=BINARY, headers={"X-Shape": f"{bundle.n},1"}
        )

    @app.get("/api/metadata/{column}")
    def get_metadata(column: str):
        try:
            col = bundle.metadata_column(column)
        except KeyError:
            return _error(
                404,
                f"unknown metadata column {column!r}",
                available=[c.name for c in bundle.metadata],
            )
        if col.kind == "categorical":
            return JSONResponse(list(col.values))
        values = np.ascontiguousarray(np.asarray(col.values, dtype="<f4"))
        return Response(
            values.tobytes(), media_type=BINARY, headers={"X-Shape": f"{bundle.n},1"}
        )

    return app
