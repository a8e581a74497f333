"""Community detection for weighted bipartite networks.

``bisc`` clusters the rows of the leading left/right singular-vector
matrices of the adjacency; ``nbisc`` row-normalizes those matrices first,
which absorbs per-node degree heterogeneity.  Three reference baselines are
provided for comparison studies: a regularized-Laplacian co-clustering
(``disim``), a singular-vector-ratio method (``dscore``), and the ratio
method applied to the regularized Laplacian (``rdscore``).

All algorithms assume the number of row clusters does not exceed the number
of column clusters; when called the other way round they transpose the
problem internally and swap the answer back.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError, UnsupportedError
from .linalg import as_matrix, kmeans, row_normalize, truncated_svd
from .model import Membership


@dataclass(frozen=True)
class DetectionResult:
    row_labels: Membership
    col_labels: Membership
    singular_values: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def transposed(self) -> "DetectionResult":
        swapped = dict(self.diagnostics)
        for a, b in (
            ("row_objective", "col_objective"),
            ("degenerate_rows", "degenerate_cols"),
        ):
            if a in swapped or b in swapped:
                swapped[a], swapped[b] = swapped.get(b), swapped.get(a)
                swapped = {k: v for k, v in swapped.items() if v is not None}
        return DetectionResult(
            row_labels=self.col_labels,
            col_labels=self.row_labels,
            singular_values=self.singular_values,
            diagnostics=swapped,
        )


def _check_counts(a, k_r, k_c):
    n_r, n_c = a.shape
    if k_r < 1 or k_c < 1:
        raise DimensionError("cluster counts must be positive")
    if k_r > n_r or k_c > n_c:
        raise DimensionError(
            f"cluster counts ({k_r}, {k_c}) exceed matrix shape {a.shape}"
        )


def _embed(a, k_r, k_c):
    """Leading min(k_r, k_c)-dimensional singular subspaces of ``a``."""
    factors = truncated_svd(a, min(k_r, k_c))
    return factors.left, factors.right, factors.singular_values


def bisc(a, k_r: int, k_c: int, seed: int = 0, restarts: int = 10) -> DetectionResult:
    """Bipartite spectral co-clustering on raw singular vectors.

    Runs k-means with ``k_r`` clusters on the rows of the left factor and
    ``k_c`` clusters on the rows of the right factor of the
    min(k_r, k_c)-dimensional SVD of ``a``.
    """
    a = as_matrix(a)
    _check_counts(a, k_r, k_c)
    if k_r > k_c:
        return bisc(a.T, k_c, k_r, seed=seed, restarts=restarts).transposed()
    u, v, sv = _embed(a, k_r, k_c)
    rows = kmeans(u, k_r, seed=seed, restarts=restarts)
    cols = kmeans(v, k_c, seed=seed, restarts=restarts)
    return DetectionResult(
        row_labels=Membership(rows.labels, n_clusters=k_r),
        col_labels=Membership(cols.labels, n_clusters=k_c),
        singular_values=sv,
        diagnostics={
            "row_objective": rows.objective,
            "col_objective": cols.objective,
        },
    )


def nbisc(
    a,
    k_r: int,
    k_c: int,
    seed: int = 0,
    restarts: int = 10,
    eps: float = 1e-12,
) -> DetectionResult:
    """Degree-corrected variant: cluster row-normalized singular vectors.

    Rows whose embedding norm falls below ``eps`` cannot be normalized; they
    keep their raw coordinates, still receive a label, and are reported under
    ``diagnostics['degenerate_rows']`` / ``['degenerate_cols']``.
    """
    a = as_matrix(a)
    _check_counts(a, k_r, k_c)
    if k_r > k_c:
        return nbisc(a.T, k_c, k_r, seed=seed, restarts=restarts, eps=eps).transposed()
    u, v, sv = _embed(a, k_r, k_c)
    nu = row_normalize(u, eps=eps)
    nv = row_normalize(v, eps=eps)
    rows = kmeans(nu.matrix, k_r, seed=seed, restarts=restarts)
    cols = kmeans(nv.matrix, k_c, seed=seed, restarts=restarts)
    return DetectionResult(
        row_labels=Membership(rows.labels, n_clusters=k_r),
        col_labels=Membership(cols.labels, n_clusters=k_c),
        singular_values=sv,
        diagnostics={
            "row_objective": rows.objective,
            "col_objective": cols.objective,
            "degenerate_rows": nu.degenerate_rows,
            "degenerate_cols": nv.degenerate_rows,
        },
    )


def _laplacian(a, regularizer):
    """Regularized bipartite Laplacian ``D_r^-1/2 A D_c^-1/2`` built from
    absolute degrees; the regularizer is added to every degree."""
    if a.min() < 0:
        raise DomainError(
            "Laplacian-based methods need a non-negative matrix; "
            "apply shift_nonnegative first"
        )
    d_r = np.abs(a).sum(axis=1)
    d_c = np.abs(a).sum(axis=0)
    if regularizer == "auto":
        tau_r, tau_c = float(d_r.mean()), float(d_c.mean())
    else:
        tau_r = tau_c = float(regularizer)
        if tau_r < 0:
            raise DomainError(f"regularizer must be non-negative, got {regularizer}")
    with np.errstate(divide="ignore"):
        inv_r = np.where(d_r + tau_r > 0, 1.0 / np.sqrt(d_r + tau_r), 0.0)
        inv_c = np.where(d_c + tau_c > 0, 1.0 / np.sqrt(d_c + tau_c), 0.0)
    return inv_r[:, None] * a * inv_c[None, :], (tau_r, tau_c)


def disim(
    a,
    k_r: int,
    k_c: int,
    regularizer="auto",
    seed: int = 0,
    restarts: int = 10,
) -> DetectionResult:
    """Regularized-Laplacian co-clustering baseline.

    With ``regularizer='auto'`` each side's regularizer is its mean absolute
    degree.  Singular-vector rows are unit-normalized before k-means.
    """
    a = as_matrix(a)
    _check_counts(a, k_r, k_c)
    if k_r > k_c:
        return disim(
            a.T, k_c, k_r, regularizer=regularizer, seed=seed, restarts=restarts
        ).transposed()
    lap, taus = _laplacian(a, regularizer)
    u, v, sv = _embed(lap, k_r, k_c)
    rows = kmeans(row_normalize(u).matrix, k_r, seed=seed, restarts=restarts)
    cols = kmeans(row_normalize(v).matrix, k_c, seed=seed, restarts=restarts)
    return DetectionResult(
        row_labels=Membership(rows.labels, n_clusters=k_r),
        col_labels=Membership(cols.labels, n_clusters=k_c),
        singular_values=sv,
        diagnostics={
            "row_objective": rows.objective,
            "col_objective": cols.objective,
            "regularizers": taus,
        },
    )


def _ratio_matrix(u, threshold):
    """Entrywise ratios of trailing singular-vector columns to the leading
    one, clipped to ``[-T, T]``; non-finite ratios from a vanishing leading
    entry saturate at the clip bound (0 when the numerator vanishes too)."""
    t = float(np.log(u.shape[0])) if threshold == "auto" else float(threshold)
    if not t > 0:
        raise DomainError(f"ratio threshold must be positive, got {threshold}")
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = u[:, 1:] / u[:, :1]
    ratios = np.nan_to_num(ratios, nan=0.0, posinf=t, neginf=-t)
    return np.clip(ratios, -t, t)


def dscore(
    a,
    k_r: int,
    k_c: int,
    threshold="auto",
    seed: int = 0,
    restarts: int = 10,
) -> DetectionResult:
    """Singular-vector-ratio baseline; needs at least two singular vectors.

    Dividing the trailing columns by the leading one cancels per-node scale
    factors, so the method tolerates degree heterogeneity by construction.
    The default clip threshold is ``log(n)`` for a side with ``n`` nodes.
    """
    a = as_matrix(a)
    _check_counts(a, k_r, k_c)
    if min(k_r, k_c) < 2:
        raise UnsupportedError("ratio method needs min(k_r, k_c) >= 2")
    if k_r > k_c:
        return dscore(
            a.T, k_c, k_r, threshold=threshold, seed=seed, restarts=restarts
        ).transposed()
    u, v, sv = _embed(a, k_r, k_c)
    rows = kmeans(_ratio_matrix(u, threshold), k_r, seed=seed, restarts=restarts)
    cols = kmeans(_ratio_matrix(v, threshold), k_c, seed=seed, restarts=restarts)
    return DetectionResult(
        row_labels=Membership(rows.labels, n_clusters=k_r),
        col_labels=Membership(cols.labels, n_clusters=k_c),
        singular_values=sv,
        diagnostics={
            "row_objective": rows.objective,
            "col_objective": cols.objective,
        },
    )


def rdscore(
    a,
    k_r: int,
    k_c: int,
    regularizer="auto",
    threshold="auto",
    seed: int = 0,
    restarts: int = 10,
) -> DetectionResult:
    """Ratio method on the regularized Laplacian instead of the adjacency."""
    a = as_matrix(a)
    _check_counts(a, k_r, k_c)
    if min(k_r, k_c) < 2:
        raise UnsupportedError("ratio method needs min(k_r, k_c) >= 2")
    if k_r > k_c:
        return rdscore(
            a.T,
            k_c,
            k_r,
            regularizer=regularizer,
            threshold=threshold,
            seed=seed,
            restarts=restarts,
        ).transposed()
    lap, taus = _laplacian(a, regularizer)
    result = dscore(lap, k_r, k_c, threshold=threshold, seed=seed, restarts=restarts)
    result.diagnostics["regularizers"] = taus
    return result


def shift_nonnegative(a) -> tuple:
    """Add a constant making every entry positive; returns (matrix, shift).

    A matrix with no negative entry is returned untouched with shift 0.
    Otherwise the shift is ``-min + 0.01 * range`` (range replaced by 1 when
    the matrix is constant), so the smallest shifted entry stays strictly
    positive.
    """
    a = as_matrix(a)
    lo, hi = float(a.min()), float(a.max())
    if lo >= 0:
        return a, 0.0
    spread = hi - lo
    shift = -lo + 0.01 * (spread if spread > 0 else 1.0)
    return a + shift, shift
