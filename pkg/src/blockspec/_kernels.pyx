# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Sturm counts, bisection eigenvalues, 2x2 chain products.

Mirrors the contract of blockspec._kernels_py.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, log

cnp.import_array()

BACKEND = "cython"

cdef double SAFMIN = 2.2250738585072014e-308


cdef inline double _pivmin(double esq_max) nogil:
    if esq_max > 1.0:
        return SAFMIN * esq_max
    return SAFMIN


cdef inline long _count(double* d, double* esq, long n, double lam,
                        double pivmin) nogil:
    cdef double q = d[0] - lam
    if fabs(q) < pivmin:
        q = -pivmin
    cdef long count = 1 if q < 0.0 else 0
    cdef long i
    for i in range(1, n):
        q = d[i] - lam - esq[i - 1] / q
        if fabs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


def sturm_count(diag, offdiag, double lam):
    """Number of eigenvalues strictly below ``lam``."""
    cdef cnp.ndarray[double, ndim=1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] e = np.ascontiguousarray(offdiag, dtype=np.float64)
    cdef long n = d.shape[0]
    cdef cnp.ndarray[double, ndim=1] esq = e * e
    cdef double esq_max = 0.0
    cdef long i
    for i in range(n - 1):
        if esq[i] > esq_max:
            esq_max = esq[i]
    if n == 1:
        return 1 if d[0] < lam else 0
    return _count(&d[0], &esq[0], n, lam, _pivmin(esq_max))


def bisect_eigenvalues(diag, offdiag, double tol):
    """All eigenvalues, each bracketed to width <= tol, ascending."""
    cdef cnp.ndarray[double, ndim=1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] e = np.ascontiguousarray(offdiag, dtype=np.float64)
    cdef long n = d.shape[0]
    if n == 1:
        return d.copy()
    cdef cnp.ndarray[double, ndim=1] esq = e * e
    cdef double esq_max = 0.0
    cdef long i
    for i in range(n - 1):
        if esq[i] > esq_max:
            esq_max = esq[i]
    cdef double pivmin = _pivmin(esq_max)

    cdef double lo0 = d[0], hi0 = d[0], r
    for i in range(n):
        r = 0.0
        if i > 0:
            r += fabs(e[i - 1])
        if i < n - 1:
            r += fabs(e[i])
        if d[i] - r < lo0:
            lo0 = d[i] - r
        if d[i] + r > hi0:
            hi0 = d[i] + r
    cdef double pad = (fabs(lo0) if fabs(lo0) > fabs(hi0) else fabs(hi0))
    if pad < 1.0:
        pad = 1.0
    pad = pad * 1e-14 + tol
    lo0 -= pad
    hi0 += pad

    cdef cnp.ndarray[double, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] lo = np.full(n, lo0, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] hi = np.full(n, hi0, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] mid = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] q = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[long, ndim=1] cnt = np.empty(n, dtype=np.int64)
    cdef double width, t
    cdef long k, it
    with nogil:
        # bisect every eigenvalue bracket at once so each Sturm sweep over
        # the matrix serves all midpoints
        for it in range(4096):
            width = 0.0
            for k in range(n):
                if hi[k] - lo[k] > width:
                    width = hi[k] - lo[k]
            if width <= tol:
                break
            for k in range(n):
                mid[k] = 0.5 * (lo[k] + hi[k])
                t = d[0] - mid[k]
                if fabs(t) < pivmin:
                    t = -pivmin
                q[k] = t
                cnt[k] = 1 if t < 0.0 else 0
            for i in range(1, n):
                for k in range(n):
                    t = d[i] - mid[k] - esq[i - 1] / q[k]
                    if fabs(t) < pivmin:
                        t = -pivmin
                    q[k] = t
                    if t < 0.0:
                        cnt[k] += 1
            for k in range(n):
                if cnt[k] >= k + 1:
                    hi[k] = mid[k]
                else:
                    lo[k] = mid[k]
        for k in range(n):
            out[k] = 0.5 * (lo[k] + hi[k])
    return out


def product_renorm(mats):
    """Left-product of 2x2 matrices with per-step rescaling.

    Returns ``(matrix, log_scale)``; true product is exp(log_scale)*matrix.
    """
    cdef cnp.ndarray[double, ndim=3] m = np.ascontiguousarray(mats, dtype=np.float64)
    cdef long nmat = m.shape[0]
    cdef double a00 = 1.0, a01 = 0.0, a10 = 0.0, a11 = 1.0
    cdef double b00, b01, b10, b11, scale, t
    cdef double log_scale = 0.0
    cdef long k
    with nogil:
        for k in range(nmat):
            b00 = m[k, 0, 0] * a00 + m[k, 0, 1] * a10
            b01 = m[k, 0, 0] * a01 + m[k, 0, 1] * a11
            b10 = m[k, 1, 0] * a00 + m[k, 1, 1] * a10
            b11 = m[k, 1, 0] * a01 + m[k, 1, 1] * a11
            scale = fabs(b00)
            t = fabs(b01)
            if t > scale:
                scale = t
            t = fabs(b10)
            if t > scale:
                scale = t
            t = fabs(b11)
            if t > scale:
                scale = t
            if scale == 0.0:
                with gil:
                    raise FloatingPointError("matrix chain product collapsed to zero")
            a00 = b00 / scale
            a01 = b01 / scale
            a10 = b10 / scale
            a11 = b11 / scale
            log_scale += log(scale)
    return np.array([[a00, a01], [a10, a11]]), log_scale
