"""Pair search for particles with variable smoothing lengths.

The fixed-radius candidate search is delegated to a k-d tree; the per-pair
criterion |x_a - x_b| < 2 max(h_a, h_b) is applied afterwards.
"""
import numpy as np
from scipy.spatial import cKDTree


def _as_2d(x):
    x = np.asarray(x, dtype=float)
    return x[:, None] if x.ndim == 1 else x


def find_pairs(x, h, pad=1.0):
    """Unordered pairs (i < j) with |x_i - x_j| < 2 pad max(h_i, h_j).

    ``pad > 1`` returns a superset that stays valid while h grows by up to
    that factor, which lets several density sweeps reuse one search.
    """
    x = _as_2d(x)
    h = np.asarray(h, dtype=float)
    if len(x) < 2:
        return np.empty(0, dtype=np.intp), np.empty(0, dtype=np.intp)
    radius = 2.0 * pad * h.max()
    pairs = cKDTree(x).query_pairs(radius, output_type="ndarray")
    if len(pairs) == 0:
        return np.empty(0, dtype=np.intp), np.empty(0, dtype=np.intp)
    i, j = pairs[:, 0], pairs[:, 1]
    d = x[i] - x[j]
    r2 = np.einsum("ij,ij->i", d, d)
    reach = 2.0 * pad * np.maximum(h[i], h[j])
    keep = r2 < reach * reach
    i, j = i[keep], j[keep]
    order = np.lexsort((j, i))
    return i[order].astype(np.intp), j[order].astype(np.intp)


def find_neighbors(x, h):
    """Per-particle neighbour index arrays (self excluded), sorted."""
    x = _as_2d(x)
    i, j = find_pairs(x, h)
    n = len(x)
    both_i = np.concatenate([i, j])
    both_j = np.concatenate([j, i])
    order = np.lexsort((both_j, both_i))
    both_i, both_j = both_i[order], both_j[order]
    splits = np.searchsorted(both_i, np.arange(1, n))
    return np.split(both_j, splits)
