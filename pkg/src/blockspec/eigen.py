"""Symmetric tridiagonal eigensolver.

Eigenvalues come from Sturm-sequence bisection (so eigenvalue counts inside
an interval are available directly); eigenvectors from inverse iteration
with a partially pivoted tridiagonal solve. Bisection is the hot path and
is dispatched to the compiled kernel when available.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from blockspec import kernels
from blockspec.capacitance import Tridiagonal

__all__ = [
    "Spectrum",
    "EigensolverError",
    "sturm_count",
    "eigenvalues",
    "eigenvector",
    "eigenvectors",
]


class EigensolverError(RuntimeError):
    """Numerical failure with diagnostics attached to the message."""


@dataclass(frozen=True)
class Spectrum:
    """Sorted eigenvalues, each within ``tolerance`` of a true eigenvalue."""

    eigenvalues: np.ndarray
    tolerance: float

    def __post_init__(self):
        vals = np.array(self.eigenvalues, dtype=np.float64)
        vals.setflags(write=False)
        object.__setattr__(self, "eigenvalues", vals)

    def distance(self, lam: float) -> float:
        return float(np.min(np.abs(self.eigenvalues - lam)))

    def count_in(self, lo: float, hi: float) -> int:
        return int(np.sum((self.eigenvalues >= lo) & (self.eigenvalues <= hi)))


def sturm_count(m: Tridiagonal, lam: float) -> int:
    """Number of eigenvalues of ``m`` strictly below ``lam``."""
    return int(kernels.sturm_count(m.diag, m.offdiag, lam))


def eigenvalues(m: Tridiagonal, tol: float = 1e-12) -> Spectrum:
    """All eigenvalues by bisection, each bracketed to width <= tol."""
    if tol <= 0.0:
        raise ValueError("tolerance must be positive")
    vals = kernels.bisect_eigenvalues(m.diag, m.offdiag, tol)
    return Spectrum(np.sort(vals), tol)


def _solve_shifted(m: Tridiagonal, lam: float, rhs: np.ndarray, scale: float):
    """Solve (m - lam I) x = rhs; tridiagonal LU with partial pivoting.

    Row swaps introduce a second superdiagonal (du2). Near-zero pivots are
    replaced by a tiny sentinel, the usual inverse-iteration trick.
    """
    n = m.n
    tiny = np.finfo(np.float64).tiny * scale
    d = (m.diag - lam).astype(np.float64)
    x = rhs.astype(np.float64).copy()
    if n == 1:
        piv = d[0] if d[0] != 0.0 else tiny
        return x / piv
    sub = m.offdiag.astype(np.float64).copy()
    du = np.zeros(n)
    du[: n - 1] = m.offdiag
    du2 = np.zeros(n)
    for i in range(n - 1):
        if abs(d[i]) < abs(sub[i]):
            # swap rows i and i+1, then eliminate
            d[i], sub[i] = sub[i], d[i]
            du[i], d[i + 1] = d[i + 1], du[i]
            if i + 1 < n - 1:
                du2[i] = du[i + 1]
                du[i + 1] = 0.0
            x[i], x[i + 1] = x[i + 1], x[i]
            mult = sub[i] / d[i]
            d[i + 1] -= mult * du[i]
            if i + 1 < n - 1:
                du[i + 1] -= mult * du2[i]
            x[i + 1] -= mult * x[i]
        else:
            piv = d[i] if d[i] != 0.0 else tiny
            d[i] = piv
            mult = sub[i] / piv
            d[i + 1] -= mult * du[i]
            x[i + 1] -= mult * x[i]
    if d[n - 1] == 0.0:
        d[n - 1] = tiny
    x[n - 1] /= d[n - 1]
    x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i]
    return x


def eigenvector(m: Tridiagonal, lam: float, seed: int = 0) -> np.ndarray:
    """Unit eigenvector for an eigenvalue near ``lam`` by inverse iteration."""
    rng = np.random.Generator(np.random.Philox(seed))
    scale = max(1.0, m.norm_inf())
    v = rng.standard_normal(m.n)
    v /= np.linalg.norm(v)
    for _ in range(50):
        w = _solve_shifted(m, lam, v, scale)
        norm = np.linalg.norm(w)
        if not np.isfinite(norm) or norm == 0.0:
            v = rng.standard_normal(m.n)
            v /= np.linalg.norm(v)
            continue
        w /= norm
        if np.linalg.norm(m.matvec(w) - lam * w) <= 1e-8 * scale:
            return w
        v = w
    raise EigensolverError(f"inverse iteration did not converge at lam={lam!r} (n={m.n})")


def eigenvectors(m: Tridiagonal, lams, seed: int = 0) -> np.ndarray:
    """Eigenvectors for several eigenvalues, reorthogonalized within clusters.

    Eigenvalues closer than 1e-8 * ||m|| count as one cluster; their vectors
    are Gram-Schmidt orthogonalized against each other.
    """
    lams = np.asarray(lams, dtype=np.float64)
    scale = max(1.0, m.norm_inf())
    vecs = np.empty((lams.size, m.n))
    cluster_start = 0
    for j, lam in enumerate(lams):
        v = eigenvector(m, float(lam), seed=seed + j)
        if j > 0 and abs(lam - lams[j - 1]) > 1e-8 * scale:
            cluster_start = j
        for k in range(cluster_start, j):
            v -= np.dot(v, vecs[k]) * vecs[k]
        norm = np.linalg.norm(v)
        if norm < 1e-8:
            raise EigensolverError("cluster reorthogonalization degenerated")
        vecs[j] = v / norm
    return vecs
