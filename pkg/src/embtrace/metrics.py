"""Per-point quality measures comparing an embedding against its source space.

All measures are data-parallel over points and deterministic for a fixed
seed: sampling uses counter-based streams keyed by point index, and every
distance comparison accumulates in float64 so that tie handling matches an
independent float64 oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit, prange

from .errors import ParameterError, ShapeMismatchError
from .model import MetricColumn, make_metric_column
from .neighbors import NeighborGraph
from .rng import TAG_ANCHORS, TAG_TRIPLETS, rand_below, sample_indices, stream_key

# exhaustive triplet enumeration is quadratic per point; refuse beyond this
MAX_EXHAUSTIVE_PAIRS = 10**6

DEFAULT_TRIPLETS_PER_POINT = 500
DEFAULT_ANCHOR_COUNT = 1000


@dataclass(frozen=True)
class TripletSampler:
    """How (j, l) pairs are drawn for the triplet agreement measure."""

    seed: int = 42
    triplets_per_point: int = DEFAULT_TRIPLETS_PER_POINT
    mode: str = "sampled"  # "sampled" | "exhaustive"

    def __post_init__(self):
        if self.mode not in ("sampled", "exhaustive"):
            raise ParameterError(f"unknown triplet mode {self.mode!r}")
        if self.triplets_per_point < 1:
            raise ParameterError("triplets_per_point must be positive")

    def check(self, n: int) -> None:
        if self.mode == "exhaustive" and (n - 1) * (n - 2) // 2 > MAX_EXHAUSTIVE_PAIRS:
            raise ParameterError(
                f"exhaustive mode needs (n-1)(n-2)/2 <= {MAX_EXHAUSTIVE_PAIRS}, n={n} is too large"
            )


@dataclass(frozen=True)
class AnchorSet:
    """Shared reference points against which every point's distances are ranked."""

    seed: int
    anchor_indices: np.ndarray = field(compare=False)

    def __post_init__(self):
        idx = np.asarray(self.anchor_indices, dtype=np.int64)
        if idx.size < 3:
            raise ParameterError("anchor set needs at least 3 indices")
        if len(set(idx.tolist())) != idx.size:
            raise ParameterError("anchor indices contain duplicates")
        object.__setattr__(self, "anchor_indices", idx)

    @property
    def count(self) -> int:
        return int(self.anchor_indices.size)

    @staticmethod
    def effective_count(n: int, count: int | None = None) -> int:
        if count is None:
            # anchor points exclude themselves, so fewer than 4 anchors would
            # leave them under the 3-anchor minimum
            return min(n, max(4, min(n - 1, DEFAULT_ANCHOR_COUNT)))
        return min(count, n)

    @classmethod
    def sample(cls, n: int, seed: int, count: int | None = None) -> "AnchorSet":
        m = cls.effective_count(n, count)
        return cls(seed=seed, anchor_indices=sample_indices(seed, TAG_ANCHORS, n, m))


@njit(cache=True, inline="always")
def _sqdist64(pts, i, j):
    acc = 0.0
    for c in range(pts.shape[1]):
        diff = np.float64(pts[i, c]) - np.float64(pts[j, c])
        acc += diff * diff
    return acc


@njit(cache=True, inline="always")
def _sorted_head(idx_row, k):
    out = np.empty(k, np.int64)
    for m in range(k):
        out[m] = idx_row[m]
    return np.sort(out)


@njit(cache=True, inline="always")
def _intersect_size(a, b):
    # both sorted ascending, no duplicates
    ia = 0
    ib = 0
    hits = 0
    while ia < a.shape[0] and ib < b.shape[0]:
        if a[ia] == b[ib]:
            hits += 1
            ia += 1
            ib += 1
        elif a[ia] < b[ib]:
            ia += 1
        else:
            ib += 1
    return hits


@njit(cache=True, parallel=True)
def _preservation_kernel(hd_idx, ld_idx, k, out):
    n = hd_idx.shape[0]
    for i in prange(n):
        a = _sorted_head(hd_idx[i], k)
        b = _sorted_head(ld_idx[i], k)
        out[i] = _intersect_size(a, b) / k


@njit(cache=True, parallel=True)
def _triplet_exhaustive_kernel(hd, ld, out):
    n = hd.shape[0]
    for i in prange(n):
        dh = np.empty(n, np.float64)
        dl = np.empty(n, np.float64)
        for j in range(n):
            dh[j] = _sqdist64(hd, i, j)
            dl[j] = _sqdist64(ld, i, j)
        agree = 0
        counted = 0
        for j in range(n):
            if j == i:
                continue
            for l in range(j + 1, n):
                if l == i:
                    continue
                hdiff = dh[j] - dh[l]
                ldiff = dl[j] - dl[l]
                if hdiff == 0.0 or ldiff == 0.0:
                    continue  # ties carry no order information
                if (hdiff > 0.0) == (ldiff > 0.0):
                    agree += 1
                counted += 1
        out[i] = agree / counted if counted > 0 else 0.5


@njit(cache=True, parallel=True)
def _triplet_sampled_kernel(hd, ld, n_draws, seed, out):
    n = hd.shape[0]
    for i in prange(n):
        key = stream_key(seed, TAG_TRIPLETS, i)
        agree = 0
        counted = 0
        ctr = 0
        for _ in range(n_draws):
            j = rand_below(key, ctr, n - 1)
            ctr += 1
            if j >= i:
                j += 1
            l = rand_below(key, ctr, n - 2)
            ctr += 1
            lo = min(i, j)
            hi = max(i, j)
            if l >= lo:
                l += 1
            if l >= hi:
                l += 1
            hdiff = _sqdist64(hd, i, j) - _sqdist64(hd, i, l)
            ldiff = _sqdist64(ld, i, j) - _sqdist64(ld, i, l)
            if hdiff == 0.0 or ldiff == 0.0:
                continue
            if (hdiff > 0.0) == (ldiff > 0.0):
                agree += 1
            counted += 1
        out[i] = agree / counted if counted > 0 else 0.5


@njit(cache=True)
def _average_ranks(vals, ranks):
    """1-based ranks; tied runs all receive the mean of their positions."""
    m = vals.shape[0]
    order = np.argsort(vals, kind="mergesort")
    s = 0
    while s < m:
        e = s
        while e + 1 < m and vals[order[e + 1]] == vals[order[s]]:
            e += 1
        avg = 0.5 * (s + e) + 1.0
        for t in range(s, e + 1):
            ranks[order[t]] = avg
        s = e + 1


@njit(cache=True)
def _rank_pearson(x, y):
    m = x.shape[0]
    mx = 0.0
    my = 0.0
    for t in range(m):
        mx += x[t]
        my += y[t]
    mx /= m
    my /= m
    sxy = 0.0
    sxx = 0.0
    syy = 0.0
    for t in range(m):
        dx = x[t] - mx
        dy = y[t] - my
        sxy += dx * dy
        sxx += dx * dx
        syy += dy * dy
    if sxx == 0.0 or syy == 0.0:
        return 0.0
    rho = sxy / np.sqrt(sxx * syy)
    if rho > 1.0:
        rho = 1.0
    elif rho < -1.0:
        rho = -1.0
    return rho


@njit(cache=True)
def _spearman_kernel(x, y):
    rx = np.empty(x.shape[0], np.float64)
    ry = np.empty(y.shape[0], np.float64)
    _average_ranks(x, rx)
    _average_ranks(y, ry)
    return _rank_pearson(rx, ry)


@njit(cache=True, parallel=True)
def _rank_correlation_kernel(hd, ld, anchors, out):
    n = hd.shape[0]
    m_all = anchors.shape[0]
    for i in prange(n):
        m = 0
        for a in range(m_all):
            if anchors[a] != i:
                m += 1
        dh = np.empty(m, np.float64)
        dl = np.empty(m, np.float64)
        pos = 0
        for a in range(m_all):
            j = anchors[a]
            if j == i:
                continue
            dh[pos] = _sqdist64(hd, i, j)  # squared distances rank identically
            dl[pos] = _sqdist64(ld, i, j)
            pos += 1
        out[i] = _spearman_kernel(dh, dl)


@njit(cache=True, parallel=True)
def _stability_kernel(idx_stack, k, out):
    n_emb = idx_stack.shape[0]
    n = idx_stack.shape[1]
    for i in prange(n):
        sets = np.empty((n_emb, k), np.int64)
        for e in range(n_emb):
            sets[e] = _sorted_head(idx_stack[e, i], k)
        acc = 0.0
        pairs = 0
        for a in range(n_emb):
            for b in range(a + 1, n_emb):
                inter = _intersect_size(sets[a], sets[b])
                acc += inter / (2 * k - inter)
                pairs += 1
        out[i] = acc / pairs


def _check_same_n(hd: np.ndarray, ld: np.ndarray) -> int:
    if hd.shape[0] != ld.shape[0]:
        raise ShapeMismatchError(f"row counts differ: {hd.shape[0]} vs {ld.shape[0]}")
    return hd.shape[0]


def neighborhood_preservation(
    hd_graph: NeighborGraph, ld_graph: NeighborGraph, k: int
) -> MetricColumn:
    """Fraction of each point's k nearest source-space neighbors kept in the embedding."""
    if hd_graph.n != ld_graph.n:
        raise ShapeMismatchError(f"graph sizes differ: {hd_graph.n} vs {ld_graph.n}")
    if k < 1 or k > min(hd_graph.k, ld_graph.k):
        raise ParameterError(
            f"k={k} exceeds stored k (hd={hd_graph.k}, ld={ld_graph.k})"
        )
    out = np.empty(hd_graph.n, np.float64)
    _preservation_kernel(
        hd_graph.indices.astype(np.int64), ld_graph.indices.astype(np.int64), k, out
    )
    params = {"k": k, "hd_exactness": hd_graph.exactness, "ld_exactness": ld_graph.exactness}
    return make_metric_column("neighborhood_preservation", params, out)


def triplet_accuracy(
    hd_points: np.ndarray, ld_coords: np.ndarray, sampler: TripletSampler
) -> MetricColumn:
    """Per-point agreement of relative distance orders between the two spaces.

    For triplets (i, j, l): agreement means the sign of d(i,j)-d(i,l) matches
    across spaces; exact ties are discarded from both numerator and
    denominator, and a point whose every triplet ties scores 0.5.
    """
    n = _check_same_n(hd_points, ld_coords)
    if n < 3:
        raise ParameterError(f"triplet accuracy needs n >= 3, got {n}")
    sampler.check(n)
    hd = np.ascontiguousarray(hd_points, dtype=np.float32)
    ld = np.ascontiguousarray(ld_coords, dtype=np.float32)
    out = np.empty(n, np.float64)
    if sampler.mode == "exhaustive":
        _triplet_exhaustive_kernel(hd, ld, out)
    else:
        _triplet_sampled_kernel(hd, ld, sampler.triplets_per_point, sampler.seed, out)
    params = {
        "mode": sampler.mode,
        "seed": sampler.seed,
        "triplets_per_point": sampler.triplets_per_point,
    }
    return make_metric_column("triplet_accuracy", params, out)


def spearman_rho(x, y) -> float:
    """Rank correlation with average ranks for ties; 0 when a side has no rank variance."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ShapeMismatchError(f"length mismatch: {x.shape} vs {y.shape}")
    if x.size < 3:
        raise ParameterError(f"need at least 3 values, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ParameterError("inputs must be finite")
    return float(_spearman_kernel(x, y))


def distance_rank_correlation(
    hd_points: np.ndarray, ld_coords: np.ndarray, anchors: AnchorSet
) -> MetricColumn:
    """Per-point rank correlation of distances to a shared anchor set."""
    n = _check_same_n(hd_points, ld_coords)
    idx = anchors.anchor_indices
    if idx.min() < 0 or idx.max() >= n:
        raise ParameterError("anchor index out of range")
    # a point inside the anchor set is excluded from its own reference list
    if anchors.count - 1 < 3:
        raise ParameterError(
            f"anchor points would keep only {anchors.count - 1} usable anchors (need 3)"
        )
    hd = np.ascontiguousarray(hd_points, dtype=np.float32)
    ld = np.ascontiguousarray(ld_coords, dtype=np.float32)
    out = np.empty(n, np.float64)
    _rank_correlation_kernel(hd, ld, idx, out)
    params = {"seed": anchors.seed, "anchor_count": anchors.count}
    return make_metric_column("distance_rank_correlation", params, out)


def point_stability(embeddings: list, ld_graphs: list, k: int) -> MetricColumn:
    """Mean pairwise Jaccard overlap of a point's neighbor sets across embeddings."""
    if len(embeddings) != len(ld_graphs):
        raise ShapeMismatchError(
            f"{len(embeddings)} embeddings but {len(ld_graphs)} graphs"
        )
    if len(embeddings) < 2:
        raise ParameterError("point stability needs at least 2 embeddings")
    n = embeddings[0].shape[0]
    for coords, graph in zip(embeddings, ld_graphs):
        if coords.shape[0] != n or graph.n != n:
            raise ShapeMismatchError("row counts differ across embeddings")
        if graph.k < k:
            raise ParameterError(f"k={k} exceeds stored k={graph.k}")
    if k < 1:
        raise ParameterError("k must be positive")
    stack = np.stack([g.indices[:, : max(k, 1)].astype(np.int64) for g in ld_graphs])
    out = np.empty(n, np.float64)
    _stability_kernel(stack, k, out)
    return make_metric_column("point_stability", {"k": k}, out)


def hd_distances_to_point(hd_points: np.ndarray, anchor: int) -> np.ndarray:
    """Exact source-space distances from one anchor to every point (float32)."""
    n = hd_points.shape[0]
    if anchor < 0 or anchor >= n:
        raise ParameterError(f"anchor {anchor} out of range 0..{n - 1}")
    diff = hd_points.astype(np.float64) - hd_points[anchor].astype(np.float64)
    return np.sqrt(np.sum(diff * diff, axis=1)).astype(np.float32)


def hd_neighbor_union(selection, hd_graph: NeighborGraph, k: int) -> list:
    """Union of the selection's first-k source-space neighbors, minus the selection."""
    sel = sorted(set(int(i) for i in selection))
    if not sel:
        raise ParameterError("selection is empty")
    if sel[0] < 0 or sel[-1] >= hd_graph.n:
        raise ParameterError(f"selection index out of range 0..{hd_graph.n - 1}")
    head = hd_graph.head(k)
    union = set()
    for i in sel:
        union.update(head[i].tolist())
    union.difference_update(sel)
    return sorted(int(v) for v in union)
