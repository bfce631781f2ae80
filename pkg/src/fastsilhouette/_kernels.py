"""Compiled per-point loops.

The kernels never allocate: callers pass every output buffer in, so the only
memory a scoring run needs beyond the dataset and the report is O(K * D) per
shard. Reductions run strictly left to right (no fastmath), which makes the
results independent of how rows are split into shards.
"""
import math

import numpy as np
from numba import njit

EPS = float(np.finfo(np.float64).eps)


@njit(cache=True, nogil=True)
def snap_tolerance(count, dims):
    # worst-case rounding of an n-term running sum plus a d-term dot product
    return 4.0 * EPS * (count + dims)


@njit(cache=True, nogil=True)
def silhouette_value(a, b):
    m = max(a, b)
    if m == 0.0:
        return 0.0
    if a <= b:
        s = 1.0 - a / b
    else:
        s = b / a - 1.0
    return min(1.0, max(-1.0, s))


@njit(cache=True, nogil=True)
def assemble_into(a, b, own, sizes, s):
    for i in range(a.shape[0]):
        if a[i] < 0.0 or b[i] < 0.0:
            raise ValueError("negative mean distance: upstream numerical bug")
        if sizes[own[i]] == 1:
            a[i] = 0.0
            s[i] = 0.0
        else:
            s[i] = silhouette_value(a[i], b[i])


@njit(cache=True, nogil=True)
def sum_squares(x):
    acc = 0.0
    for l in range(x.shape[0]):
        acc += x[l] * x[l]
    return acc


# squared Euclidean ---------------------------------------------------------


@njit(cache=True, nogil=True)
def sq_accumulate(X, labels, start, stop, counts, psi, y):
    """Add rows ``[start, stop)`` into per-cluster count, psi and y.

    Returns the first row whose label is out of range, or -1.
    """
    K = counts.shape[0]
    D = X.shape[1]
    for i in range(start, stop):
        k = labels[i]
        if k < 0 or k >= K:
            return i
        counts[k] += 1
        acc = 0.0
        for l in range(D):
            v = X[i, l]
            acc += v * v
            y[k, l] += v
        psi[k] += acc
    return -1


@njit(cache=True, nogil=True)
def sq_mean_dist_raw(xi, x, count, psi_k, y_k, exclude_self):
    dot = 0.0
    for l in range(x.shape[0]):
        dot += y_k[l] * x[l]
    if exclude_self:
        n1 = count - 1.0
        return (count * xi + psi_k - 2.0 * dot) / n1, (count * xi + psi_k) / n1
    return xi + psi_k / count - 2.0 * dot / count, xi + psi_k / count


@njit(cache=True, nogil=True)
def sq_mean_dist(xi, x, count, psi_k, y_k, exclude_self):
    value, scale = sq_mean_dist_raw(xi, x, count, psi_k, y_k, exclude_self)
    if value <= snap_tolerance(count, x.shape[0]) * scale:
        return 0.0
    return value


@njit(cache=True, nogil=True)
def sq_score_range(X, labels, start, stop, counts, psi, y, a, b, own, neighbour):
    K = counts.shape[0]
    for i in range(start, stop):
        x = X[i]
        c = labels[i]
        xi = sum_squares(x)
        own[i] = c
        if counts[c] > 1:
            a[i] = sq_mean_dist(xi, x, counts[c], psi[c], y[c], True)
        else:
            a[i] = 0.0
        best = np.inf
        arg = -1
        for k in range(K):
            if k == c:
                continue
            d = sq_mean_dist(xi, x, counts[k], psi[k], y[k], False)
            if d < best:
                best = d
                arg = k
        b[i] = best
        neighbour[i] = arg


@njit(cache=True, nogil=True)
def sq_distance_matrix(X, counts, psi, y, out):
    for i in range(X.shape[0]):
        x = X[i]
        xi = sum_squares(x)
        for k in range(counts.shape[0]):
            out[i, k] = sq_mean_dist(xi, x, counts[k], psi[k], y[k], False)


# cosine ---------------------------------------------------------------------


@njit(cache=True, nogil=True)
def cos_accumulate(X, labels, start, stop, counts, omega):
    """Add unit-normalised rows ``[start, stop)`` into count and omega.

    Returns ``(bad_label_row, zero_norm_row)``, each -1 when absent.
    """
    K = counts.shape[0]
    D = X.shape[1]
    for i in range(start, stop):
        k = labels[i]
        if k < 0 or k >= K:
            return i, -1
        norm = math.sqrt(sum_squares(X[i]))
        if norm == 0.0:
            return -1, i
        counts[k] += 1
        for l in range(D):
            omega[k, l] += X[i, l] / norm
    return -1, -1


@njit(cache=True, nogil=True)
def cos_dot(x, norm, omega_k):
    dot = 0.0
    for l in range(x.shape[0]):
        dot += (x[l] / norm) * omega_k[l]
    return dot


@njit(cache=True, nogil=True)
def cos_mean_dist_raw(dot, count, exclude_self):
    if exclude_self:
        return (count - dot) / (count - 1.0), (count + abs(dot)) / (count - 1.0)
    return 1.0 - dot / count, 1.0 + abs(dot) / count


@njit(cache=True, nogil=True)
def cos_mean_dist(dot, count, dims, exclude_self):
    value, scale = cos_mean_dist_raw(dot, count, exclude_self)
    if value <= snap_tolerance(count, dims) * scale:
        return 0.0
    return min(value, 2.0)


@njit(cache=True, nogil=True)
def cos_score_range(X, labels, start, stop, counts, omega, a, b, own, neighbour):
    """Score rows ``[start, stop)``; returns the first zero-norm row or -1."""
    K = counts.shape[0]
    D = X.shape[1]
    for i in range(start, stop):
        x = X[i]
        c = labels[i]
        norm = math.sqrt(sum_squares(x))
        if norm == 0.0:
            return i
        own[i] = c
        if counts[c] > 1:
            a[i] = cos_mean_dist(cos_dot(x, norm, omega[c]), counts[c], D, True)
        else:
            a[i] = 0.0
        best = np.inf
        arg = -1
        for k in range(K):
            if k == c:
                continue
            d = cos_mean_dist(cos_dot(x, norm, omega[k]), counts[k], D, False)
            if d < best:
                best = d
                arg = k
        b[i] = best
        neighbour[i] = arg
    return -1


@njit(cache=True, nogil=True)
def cos_distance_matrix(X, counts, omega, out):
    D = X.shape[1]
    for i in range(X.shape[0]):
        x = X[i]
        norm = math.sqrt(sum_squares(x))
        if norm == 0.0:
            return i
        for k in range(counts.shape[0]):
            out[i, k] = cos_mean_dist(cos_dot(x, norm, omega[k]), counts[k], D, False)
    return -1
