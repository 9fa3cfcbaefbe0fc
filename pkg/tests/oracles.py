"""Independent brute-force references used only by the test suite.

Everything here is written against numpy/scipy primitives and stays clear of
the package's own kernels, so the two paths can disagree. Distance
comparisons use squared Euclidean distances in float64, which rank (and tie)
identically to true distances.
"""

import warnings

import numpy as np
from scipy import stats


def sqdist_matrix(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    return ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1)


def exact_knn(points, k):
    """Full-sort k-NN with (distance, index) tie order."""
    d2 = sqdist_matrix(points)
    np.fill_diagonal(d2, np.inf)
    idx = np.argsort(d2, axis=1, kind="stable")[:, :k]
    dist = np.sqrt(np.take_along_axis(d2, idx, axis=1))
    return idx, dist


def neighborhood_preservation(hd_points, ld_points, k):
    hd_idx, _ = exact_knn(hd_points, k)
    ld_idx, _ = exact_knn(ld_points, k)
    n = len(hd_idx)
    return np.array(
        [len(set(hd_idx[i]) & set(ld_idx[i])) / k for i in range(n)], dtype=np.float64
    )


def triplet_accuracy_exhaustive(hd_points, ld_points):
    dh = sqdist_matrix(hd_points)
    dl = sqdist_matrix(ld_points)
    n = dh.shape[0]
    values = np.empty(n, dtype=np.float64)
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    for i in range(n):
        a = dh[i][:, None] - dh[i][None, :]
        b = dl[i][:, None] - dl[i][None, :]
        mask = upper.copy()
        mask[i, :] = False
        mask[:, i] = False
        informative = mask & (a != 0.0) & (b != 0.0)
        agree = informative & ((a > 0.0) == (b > 0.0))
        counted = informative.sum()
        values[i] = agree.sum() / counted if counted else 0.5
    return values


def spearman(x, y) -> float:
    with warnings.catch_warnings():
        # a constant side is defined as rho = 0 here; scipy warns and returns NaN
        warnings.simplefilter("ignore", stats.ConstantInputWarning)
        rho = stats.spearmanr(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
    value = float(rho.statistic)
    return 0.0 if np.isnan(value) else value


def distance_rank_correlation(hd_points, ld_points, anchor_indices):
    dh = sqdist_matrix(hd_points)
    dl = sqdist_matrix(ld_points)
    anchors = np.asarray(anchor_indices, dtype=np.int64)
    n = dh.shape[0]
    values = np.empty(n, dtype=np.float64)
    for i in range(n):
        others = anchors[anchors != i]
        values[i] = spearman(dh[i, others], dl[i, others])
    return values


def point_stability(head_index_rows):
    """head_index_rows: list of (n, k) first-k neighbor index arrays, one per embedding."""
    n = head_index_rows[0].shape[0]
    n_emb = len(head_index_rows)
    values = np.empty(n, dtype=np.float64)
    for i in range(n):
        sets = [set(rows[i].tolist()) for rows in head_index_rows]
        acc = 0.0
        pairs = 0
        for a in range(n_emb):
            for b in range(a + 1, n_emb):
                acc += len(sets[a] & sets[b]) / len(sets[a] | sets[b])
                pairs += 1
        values[i] = acc / pairs
    return values


def integer_points(seed, n, d, span=10):
    """Random integer-grid points (float32). Integer coordinates keep squared
    distances exact in float64 regardless of summation order, so tie patterns
    agree bitwise between any two correct implementations, and collisions are
    common enough to exercise tie handling."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, span, size=(n, d)).astype(np.float32)


def separated_points(seed, n, d, min_rel_gap=1e-6, max_tries=200):
    """Random continuous points whose per-row distance gaps all exceed
    min_rel_gap relative to the row scale, so sub-ulp perturbations (for
    example a rigid motion applied in float64 and cast back) cannot reorder
    any distance comparison."""
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        pts = rng.normal(0.0, 1.0, size=(n, d)).astype(np.float32)
        d2 = sqdist_matrix(pts)
        np.fill_diagonal(d2, np.inf)
        rows = np.sort(d2, axis=1)[:, : n - 1]
        gaps = np.diff(rows, axis=1)
        scale = max(rows.max(), 1.0)
        if rows.min() > min_rel_gap * scale and gaps.min() > min_rel_gap * scale:
            return pts
    raise AssertionError(f"no margin-safe instance found for seed={seed} n={n} d={d}")
