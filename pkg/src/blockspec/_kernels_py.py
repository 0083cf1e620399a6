"""NumPy fallback for the compiled kernels.

Implements the same contract as the Cython extension ``blockspec._kernels``:
Sturm-sequence eigenvalue counting, lockstep bisection extraction of all
eigenvalues of a symmetric tridiagonal matrix, and renormalized products of
2x2 matrix chains. Selected automatically when the extension is not built.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

_SAFMIN = np.finfo(np.float64).tiny


def _pivmin(esq_max: float) -> float:
    # LAPACK-style guard for the signed pivot recurrence
    return _SAFMIN * max(1.0, esq_max)


def sturm_count(diag, offdiag, lam: float) -> int:
    """Number of eigenvalues strictly below ``lam``."""
    d = np.asarray(diag, dtype=np.float64)
    e = np.asarray(offdiag, dtype=np.float64)
    esq = e * e
    pivmin = _pivmin(esq.max() if esq.size else 0.0)
    q = d[0] - lam
    if abs(q) < pivmin:
        q = -pivmin
    count = 1 if q < 0.0 else 0
    for i in range(1, d.size):
        q = d[i] - lam - esq[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


def _sturm_counts(d, esq, lams, pivmin):
    """Vectorized eigenvalue counts for an array of shifts."""
    q = d[0] - lams
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count = (q < 0.0).astype(np.int64)
    for i in range(1, d.size):
        q = d[i] - lams - esq[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0.0
    return count


def bisect_eigenvalues(diag, offdiag, tol: float):
    """All eigenvalues, each bracketed to width <= tol, ascending."""
    d = np.asarray(diag, dtype=np.float64)
    e = np.asarray(offdiag, dtype=np.float64)
    n = d.size
    if n == 1:
        return d.copy()
    esq = e * e
    pivmin = _pivmin(esq.max())
    radius = np.zeros(n)
    radius[:-1] += np.abs(e)
    radius[1:] += np.abs(e)
    lo0 = float(np.min(d - radius))
    hi0 = float(np.max(d + radius))
    pad = max(abs(lo0), abs(hi0), 1.0) * 1e-14 + tol
    lo = np.full(n, lo0 - pad)
    hi = np.full(n, hi0 + pad)
    want = np.arange(1, n + 1)  # eigenvalue k is bracketed once count >= k+1
    for _ in range(4096):
        if np.max(hi - lo) <= tol:
            break
        mid = 0.5 * (lo + hi)
        c = _sturm_counts(d, esq, mid, pivmin)
        upper = c >= want
        hi = np.where(upper, mid, hi)
        lo = np.where(upper, lo, mid)
    return 0.5 * (lo + hi)


def product_renorm(mats):
    """Left-product of a chain of 2x2 matrices with per-step rescaling.

    ``mats[k]`` is applied k-th, i.e. the result represents
    ``mats[-1] @ ... @ mats[0]`` as ``exp(log_scale) * matrix``.
    Returns ``(matrix, log_scale)`` with ``matrix`` max-abs-normalized to 1.
    """
    mats = np.asarray(mats, dtype=np.float64)
    acc = np.eye(2)
    log_scale = 0.0
    for k in range(mats.shape[0]):
        acc = mats[k] @ acc
        scale = np.max(np.abs(acc))
        if scale == 0.0:
            raise FloatingPointError("matrix chain product collapsed to zero")
        acc = acc / scale
        log_scale += np.log(scale)
    return acc, log_scale
