"""Synthetic datasets: a Gaussian-mixture demo bundle and a 4-point fixture.

These exist so the service and viewer have something to show out of the box;
they are not dimensionality-reduction methods. The second embedding of each
bundle is deliberately damaged (within-cluster shuffling) so quality measures
show visible structure.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .arrays import write_array
from .model import Manifest

DEFAULT_N = 5000
DEFAULT_D = 20
DEFAULT_CLUSTERS = 8


def make_gaussian_mixture(n: int, d: int, clusters: int, seed: int):
    """Points drawn around well-separated Gaussian centers; returns (points, labels)."""
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, 4.0, size=(clusters, d))
    labels = rng.integers(0, clusters, size=n)
    points = centers[labels] + rng.normal(0.0, 1.0, size=(n, d))
    return points.astype(np.float32), labels


def make_projection(points: np.ndarray, seed: int) -> np.ndarray:
    """Random 2-D linear projection of the points."""
    rng = np.random.default_rng(seed)
    d = points.shape[1]
    proj = rng.normal(0.0, 1.0, size=(d, 2)) / np.sqrt(d)
    return (points.astype(np.float64) @ proj).astype(np.float32)


def scramble_clusters(coords: np.ndarray, labels: np.ndarray, seed: int) -> np.ndarray:
    """Shuffle coordinates within every odd cluster, destroying its neighborhoods."""
    rng = np.random.default_rng(seed)
    out = coords.copy()
    for c in np.unique(labels):
        if c % 2 == 0:
            continue
        idx = np.where(labels == c)[0]
        out[idx] = coords[rng.permutation(idx)]
    return out


def write_bundle(
    out_dir: str | Path,
    name: str,
    hd_points: np.ndarray,
    embeddings: list,  # [(name, n x 2 coords)]
    metadata_header: list,
    metadata_rows: list,
    k_list: list,
    seed: int,
) -> Manifest:
    """Write a complete dataset directory and return its manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_array(out_dir / "hd_points.f32", np.asarray(hd_points, dtype=np.float32))
    entries = []
    for emb_name, coords in embeddings:
        rel = f"embeddings/{emb_name}.f32"
        write_array(out_dir / rel, np.asarray(coords, dtype=np.float32))
        entries.append({"name": emb_name, "coords": rel})
    with open(out_dir / "metadata.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(metadata_header)
        writer.writerows(metadata_rows)
    manifest = Manifest(
        root=out_dir,
        name=name,
        hd_points="hd_points.f32",
        embeddings=entries,
        metadata="metadata.csv",
        k_list=list(k_list),
        seed=int(seed),
    )
    manifest.save()
    return manifest


def write_demo_bundle(
    out_dir: str | Path,
    n: int = DEFAULT_N,
    d: int = DEFAULT_D,
    clusters: int = DEFAULT_CLUSTERS,
    seed: int = 42,
) -> Manifest:
    """Gaussian-mixture bundle with a clean projection and a scrambled variant."""
    points, labels = make_gaussian_mixture(n, d, clusters, seed)
    projection = make_projection(points, seed + 1)
    scrambled = scramble_clusters(projection, labels, seed + 2)
    rows = [[f"c{label}", f"{points[i, 0]:.6f}"] for i, label in enumerate(labels)]
    return write_bundle(
        out_dir,
        name=f"demo-n{n}-d{d}",
        hd_points=points,
        embeddings=[("projection", projection), ("scrambled", scrambled)],
        metadata_header=["cluster", "x0"],
        metadata_rows=rows,
        k_list=[k for k in (10, 50, 100, 200) if k <= n - 1],
        seed=seed,
    )


def write_line4_bundle(out_dir: str | Path) -> Manifest:
    """The 4-point hand-check fixture: a line at x=[0,1,2,10] plus a reordered copy.

    The "scrambled" embedding places the points at y=[0,10,1,2], which flips
    every neighborhood except point 3's.
    """
    hd = np.array([[0.0], [1.0], [2.0], [10.0]], dtype=np.float32)
    line = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [10.0, 0.0]], dtype=np.float32)
    scrambled = np.array([[0.0, 0.0], [10.0, 0.0], [1.0, 0.0], [2.0, 0.0]], dtype=np.float32)
    rows = [["near", "0"], ["near", "1"], ["near", "2"], ["far", "10"]]
    return write_bundle(
        out_dir,
        name="line4",
        hd_points=hd,
        embeddings=[("line", line), ("scrambled", scrambled)],
        metadata_header=["cluster", "x0"],
        metadata_rows=rows,
        k_list=[1],
        seed=42,
    )
