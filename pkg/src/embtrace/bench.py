"""In-memory timing of the full precompute stage on synthetic data.

The benchmark asserts this artifact's own scaling behavior (near-linear in n
at fixed d and k); it deliberately compares against nothing external. Data
generation is deterministic from the seed; timings of course are not.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numba
import numpy as np

from . import demo
from .errors import ParameterError
from .metrics import (
    AnchorSet,
    TripletSampler,
    distance_rank_correlation,
    neighborhood_preservation,
    point_stability,
    triplet_accuracy,
)
from .neighbors import build_approx_knn
from .pipeline import STABILITY_K

STAGES = ("hd-knn", "ld-knn", "preservation", "triplets", "rank-correlation", "stability")


@dataclass
class BenchReport:
    n: int
    d: int
    embedding_count: int
    k: int
    seed: int
    cores: int
    stages: dict  # stage name -> seconds
    total: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "embedding_count": self.embedding_count,
            "k": self.k,
            "seed": self.seed,
            "cores": self.cores,
            "stages": {name: self.stages[name] for name in STAGES},
            "total": self.total,
        }


def warmup() -> None:
    """Compile every jitted kernel on tiny inputs so timings exclude the JIT."""
    pts, _ = demo.make_gaussian_mixture(64, 4, 2, seed=0)
    emb = demo.make_projection(pts, seed=1)
    hd_g = build_approx_knn(pts, 8, seed=0, space_id="hd")
    ld_g = build_approx_knn(emb, 8, seed=0, space_id="ld:w")
    neighborhood_preservation(hd_g, ld_g, 4)
    triplet_accuracy(pts, emb, TripletSampler(seed=0, triplets_per_point=16))
    triplet_accuracy(pts[:12], emb[:12], TripletSampler(mode="exhaustive"))
    distance_rank_correlation(pts, emb, AnchorSet.sample(64, seed=0, count=16))
    point_stability([emb, emb], [ld_g, ld_g], 4)


def run_bench(
    n: int,
    d: int,
    embedding_count: int = 5,
    k: int = 50,
    seed: int = 42,
    triplets_per_point: int = 500,
) -> BenchReport:
    """Generate a Gaussian mixture plus random projections and time each stage."""
    if n < 100:
        raise ParameterError(f"benchmark needs n >= 100, got {n}")
    if k < 1 or k > n - 1:
        raise ParameterError(f"k={k} outside valid range 1..{n - 1}")

    points, _ = demo.make_gaussian_mixture(n, d, clusters=8, seed=seed)
    embeddings = [demo.make_projection(points, seed=seed + 1 + i) for i in range(embedding_count)]

    warmup()
    stability_k = min(STABILITY_K, n - 1)
    k_ld = max(k, stability_k)
    times = dict.fromkeys(STAGES, 0.0)

    t0 = time.perf_counter()
    hd_graph = build_approx_knn(points, k, seed=seed, space_id="hd")
    times["hd-knn"] = time.perf_counter() - t0

    ld_graphs = []
    for i, coords in enumerate(embeddings):
        t0 = time.perf_counter()
        ld_graphs.append(build_approx_knn(coords, k_ld, seed=seed, space_id=f"ld:e{i}"))
        times["ld-knn"] += time.perf_counter() - t0

    sampler = TripletSampler(seed=seed, triplets_per_point=triplets_per_point)
    anchors = AnchorSet.sample(n, seed=seed)
    for coords, ld_graph in zip(embeddings, ld_graphs):
        t0 = time.perf_counter()
        neighborhood_preservation(hd_graph, ld_graph, k)
        times["preservation"] += time.perf_counter() - t0

        t0 = time.perf_counter()
        triplet_accuracy(points, coords, sampler)
        times["triplets"] += time.perf_counter() - t0

        t0 = time.perf_counter()
        distance_rank_correlation(points, coords, anchors)
        times["rank-correlation"] += time.perf_counter() - t0

    if embedding_count >= 2:
        t0 = time.perf_counter()
        point_stability(embeddings, ld_graphs, stability_k)
        times["stability"] = time.perf_counter() - t0

    return BenchReport(
        n=n,
        d=d,
        embedding_count=embedding_count,
        k=k,
        seed=seed,
        cores=numba.get_num_threads(),
        stages=times,
        total=sum(times.values()),
    )
