"""k-nearest-neighbor graphs over point matrices, exact and approximate.

Both builders honour a strict total order on neighbors: (distance, index).
Exact search accumulates squared distances in float64 and sorts each row with
a stable sort, so ties always resolve to the smaller point index. The
approximate builder is an iterative neighbor-expansion refinement of a random
graph: every row update is a pure function of the previous graph plus a
counter-based stream, which makes the result independent of worker count.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numba import njit, prange

from .arrays import read_array, write_array
from .errors import ParameterError, ShapeMismatchError
from .rng import TAG_KNN_INIT, TAG_KNN_JOIN, rand_below, stream_key

# brute force beats index construction below this size
EXACT_FALLBACK_N = 2000

MAX_REFINE_ITERS = 20


@dataclass
class NeighborGraph:
    k: int
    indices: np.ndarray  # n x k uint32, each row sorted by (distance, index)
    distances: np.ndarray  # n x k float32, non-decreasing per row
    exactness: str  # "exact" | "approximate"
    space_id: str

    @property
    def n(self) -> int:
        return self.indices.shape[0]

    def head(self, k: int) -> np.ndarray:
        """First k neighbor indices per row (rows are distance-sorted)."""
        if k < 1 or k > self.k:
            raise ParameterError(f"k={k} outside stored range 1..{self.k}")
        return self.indices[:, :k]

    def validate(self) -> None:
        n, k = self.indices.shape
        if self.distances.shape != (n, k) or k != self.k:
            raise ShapeMismatchError("indices/distances shapes disagree")
        rows = np.arange(n, dtype=np.uint32)[:, None]
        if np.any(self.indices == rows):
            raise ShapeMismatchError("graph contains self-loops")
        if np.any(np.diff(self.distances.astype(np.float64), axis=1) < 0):
            raise ShapeMismatchError("rows are not distance-sorted")
        for i in range(n):
            if len(set(self.indices[i].tolist())) != k:
                raise ShapeMismatchError(f"duplicate neighbors in row {i}")


@njit(cache=True, parallel=True)
def _exact_knn_kernel(pts, k, out_idx, out_dist):
    n, d = pts.shape
    for i in prange(n):
        d2 = np.empty(n, np.float64)
        for j in range(n):
            acc = 0.0
            for c in range(d):
                diff = pts[j, c] - pts[i, c]
                acc += diff * diff
            d2[j] = acc
        d2[i] = np.inf
        order = np.argsort(d2, kind="mergesort")  # stable: ties fall to smaller index
        for m in range(k):
            out_idx[i, m] = order[m]
            out_dist[i, m] = np.sqrt(d2[order[m]])


@njit(cache=True, inline="always")
def _sqdist32(pts, i, j):
    acc = np.float32(0.0)
    for c in range(pts.shape[1]):
        diff = pts[i, c] - pts[j, c]
        acc += diff * diff
    return acc


@njit(cache=True, parallel=True)
def _refine_init(pts, k, seed, out_idx, out_dist):
    n = pts.shape[0]
    for i in prange(n):
        key = stream_key(seed, TAG_KNN_INIT, i)
        chosen = np.empty(k, np.int64)
        cnt = 0
        t = 0
        while cnt < k:
            j = rand_below(key, t, n)
            t += 1
            if j == i:
                continue
            dup = False
            for m in range(cnt):
                if chosen[m] == j:
                    dup = True
                    break
            if not dup:
                chosen[cnt] = j
                cnt += 1
        chosen = np.sort(chosen)  # ascending index, so the stable sort breaks ties by index
        dist = np.empty(k, np.float64)
        for m in range(k):
            dist[m] = _sqdist32(pts, i, chosen[m])
        order = np.argsort(dist, kind="mergesort")
        for m in range(k):
            out_idx[i, m] = chosen[order[m]]
            out_dist[i, m] = dist[order[m]]


@njit(cache=True)
def _reverse_lists(idx, rcap):
    n, k = idx.shape
    rev = np.full((n, rcap), -1, np.int64)
    cnt = np.zeros(n, np.int64)
    for i in range(n):  # fixed scan order keeps the capped lists deterministic
        for m in range(k):
            j = idx[i, m]
            c = cnt[j]
            if c < rcap:
                rev[j, c] = i
                cnt[j] = c + 1
    return rev


@njit(cache=True, parallel=True)
def _refine_round(pts, idx, dist, rev, s, n_rand, seed, iter_no, out_idx, out_dist):
    n = pts.shape[0]
    k = idx.shape[1]
    rcap = rev.shape[1]
    cap = k + k * s + rcap * (1 + s) + n_rand
    # one draw per probe slot; restarting the counter here each round keeps
    # (key, counter) pairs unique without tracking how many draws a row used
    draws_per_round = s * (k + rcap) + n_rand
    changed = 0
    for i in prange(n):
        cand = np.empty(cap, np.int64)
        cnt = 0
        key = stream_key(seed, TAG_KNN_JOIN, i)
        ctr = iter_no * draws_per_round
        # probe sampled positions across each neighbor's whole list; always
        # taking the head stalls because the closest neighbors of a neighbor
        # are mostly already known
        for m in range(k):
            j = idx[i, m]
            cand[cnt] = j
            cnt += 1
            for t in range(s):
                cand[cnt] = idx[j, rand_below(key, ctr, k)]
                ctr += 1
                cnt += 1
        for m in range(rcap):
            r = rev[i, m]
            if r < 0:
                break
            cand[cnt] = r
            cnt += 1
            for t in range(s):
                cand[cnt] = idx[r, rand_below(key, ctr, k)]
                ctr += 1
                cnt += 1
        for t in range(n_rand):  # a few random probes guard against stalled components
            cand[cnt] = rand_below(key, ctr, n)
            ctr += 1
            cnt += 1

        cs = np.sort(cand[:cnt])
        uniq = np.empty(cnt, np.int64)
        ucnt = 0
        prev = -1
        for m in range(cnt):
            v = cs[m]
            if v == i or v == prev:
                continue
            uniq[ucnt] = v
            ucnt += 1
            prev = v
        udist = np.empty(ucnt, np.float64)
        for m in range(ucnt):
            udist[m] = _sqdist32(pts, i, uniq[m])
        order = np.argsort(udist, kind="mergesort")  # uniq ascending -> ties by index
        row_changed = 0
        for m in range(k):
            j = uniq[order[m]]
            out_idx[i, m] = j
            out_dist[i, m] = udist[order[m]]
            if j != idx[i, m]:
                row_changed += 1
        changed += row_changed
    return changed


def build_exact_knn(points: np.ndarray, k: int, space_id: str = "hd") -> NeighborGraph:
    """Exact k-NN by brute force; ties break to the smaller point index."""
    points = np.ascontiguousarray(points, dtype=np.float32)
    n = points.shape[0]
    if k < 1 or k > n - 1:
        raise ParameterError(f"k={k} outside valid range 1..{n - 1}")
    pts64 = points.astype(np.float64)
    out_idx = np.empty((n, k), np.int64)
    out_dist = np.empty((n, k), np.float64)
    _exact_knn_kernel(pts64, k, out_idx, out_dist)
    return NeighborGraph(
        k=k,
        indices=out_idx.astype(np.uint32),
        distances=out_dist.astype(np.float32),
        exactness="exact",
        space_id=space_id,
    )


def build_approx_knn(
    points: np.ndarray,
    k: int,
    recall_target: float = 0.95,
    seed: int = 42,
    space_id: str = "hd",
) -> NeighborGraph:
    """Approximate k-NN; falls back to exact search for small inputs.

    Deterministic for fixed (points, k, seed) regardless of worker count.
    """
    points = np.ascontiguousarray(points, dtype=np.float32)
    n = points.shape[0]
    if k < 1 or k > n - 1:
        raise ParameterError(f"k={k} outside valid range 1..{n - 1}")
    if not (0.0 < recall_target <= 1.0):
        raise ParameterError(f"recall_target={recall_target} outside (0, 1]")
    if n <= EXACT_FALLBACK_N:
        return build_exact_knn(points, k, space_id=space_id)

    s = max(4, min(8, k // 4))
    n_rand = 4
    delta = max(1e-4, 0.01 * (1.0 - recall_target))
    idx = np.empty((n, k), np.int64)
    dist = np.empty((n, k), np.float64)
    _refine_init(points, k, seed, idx, dist)
    for iter_no in range(MAX_REFINE_ITERS):
        rev = _reverse_lists(idx, k)
        new_idx = np.empty_like(idx)
        new_dist = np.empty_like(dist)
        changed = _refine_round(
            points, idx, dist, rev, s, n_rand, seed, iter_no, new_idx, new_dist
        )
        idx, dist = new_idx, new_dist
        if changed <= delta * n * k:
            break
    return NeighborGraph(
        k=k,
        indices=idx.astype(np.uint32),
        distances=np.sqrt(dist).astype(np.float32),
        exactness="approximate",
        space_id=space_id,
    )


def knn_recall(approx: NeighborGraph, exact: NeighborGraph) -> float:
    """Mean per-point overlap between an approximate graph and the exact one."""
    if approx.indices.shape != exact.indices.shape:
        raise ShapeMismatchError(
            f"graph shapes differ: {approx.indices.shape} vs {exact.indices.shape}"
        )
    if approx.space_id != exact.space_id:
        raise ShapeMismatchError(
            f"space mismatch: {approx.space_id!r} vs {exact.space_id!r}"
        )
    n, k = exact.indices.shape
    hits = 0
    for i in range(n):
        hits += np.intersect1d(approx.indices[i], exact.indices[i]).size
    return hits / (n * k)


def graph_paths(directory: str | Path, stem: str) -> dict:
    directory = Path(directory)
    return {
        "indices": directory / f"{stem}.indices.u32",
        "distances": directory / f"{stem}.distances.f32",
        "descriptor": directory / f"{stem}.json",
    }


def save_graph(graph: NeighborGraph, directory: str | Path, stem: str, seed: int) -> None:
    """Persist a graph as two array files plus a JSON descriptor (written last)."""
    paths = graph_paths(directory, stem)
    write_array(paths["indices"], graph.indices, dtype="u32")
    write_array(paths["distances"], graph.distances, dtype="f32")
    desc = {
        "space_id": graph.space_id,
        "k": int(graph.k),
        "exactness": graph.exactness,
        "seed": int(seed),
    }
    tmp = paths["descriptor"].with_name(paths["descriptor"].name + ".tmp")
    tmp.write_text(json.dumps(desc, sort_keys=True) + "\n")
    os.replace(tmp, paths["descriptor"])


def load_graph(directory: str | Path, stem: str) -> NeighborGraph:
    paths = graph_paths(directory, stem)
    desc = json.loads(paths["descriptor"].read_text())
    indices = read_array(paths["indices"])
    distances = read_array(paths["distances"])
    graph = NeighborGraph(
        k=int(desc["k"]),
        indices=indices,
        distances=distances,
        exactness=desc["exactness"],
        space_id=desc["space_id"],
    )
    if indices.shape != distances.shape or indices.shape[1] != graph.k:
        raise ShapeMismatchError(f"stored graph {stem!r} has inconsistent shapes")
    return graph
