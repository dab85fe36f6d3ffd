# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel for the cone-constrained elliptical slice chain.

Mirrors ``_ess_py`` step for step; see that module for the contract. Matrix
products go through the same BLAS scipy links against, so both kernels agree
on trajectories in practice.
"""

import numpy as np

cimport cython
from libc.math cimport atan2, cos, fabs, hypot, sin, sqrt

from scipy.linalg.cython_blas cimport dgemv

from .exceptions import ChainNumericalError

cdef double TWO_PI = 6.283185307179586476925287
cdef double HALF_PI = 1.570796326794896619231322
cdef double DEGENERATE_RTOL = 1e-12
cdef double GUARD_RTOL = 1e-10


cdef inline void _matvec(const double[:, ::1] A, double[::1] x, double[::1] y) noexcept nogil:
    # y = A @ x for row-major A; Fortran sees the buffer as A.T, so ask for
    # the transposed product.
    cdef int m = A.shape[1]
    cdef int n = A.shape[0]
    cdef int inc = 1
    cdef double one = 1.0
    cdef double zero = 0.0
    dgemv("T", &m, &n, &one, <double*>&A[0, 0], &m, &x[0], &inc, &zero, &y[0], &inc)


cdef inline int _step(
    const double[:, ::1] A,
    const double[::1] row_norms,
    double[::1] w,
    double[::1] pa,
    double[::1] nu,
    double u,
    double[::1] pd,
    double[::1] w_new,
    double[::1] pa_new,
    int* n_proj,
) noexcept nogil:
    """Advance w/pa in place. Returns 0 on success, 1 empty arc, 2 violation."""
    cdef int n = A.shape[0]
    cdef int N = A.shape[1]
    cdef int i, p, attempt, imin
    cdef double r, phi, lo, hi, width, theta, c, s, mn, wn, tol, clamped, margin
    cdef bint any_active = 0
    cdef double phi_max = 0.0
    cdef double phi_min = 0.0

    if n > 0:
        _matvec(A, nu, pd)
    for i in range(n):
        r = hypot(pa[i], pd[i])
        if r >= DEGENERATE_RTOL * row_norms[i]:
            phi = atan2(pd[i], pa[i])
            if not any_active:
                phi_max = phi
                phi_min = phi
                any_active = 1
            else:
                if phi > phi_max:
                    phi_max = phi
                if phi < phi_min:
                    phi_min = phi
    if any_active:
        lo = phi_max - HALF_PI
        hi = phi_min + HALF_PI
    else:
        lo = 0.0
        hi = TWO_PI
    width = hi - lo
    if width <= 0.0:
        return 1
    theta = lo + u * width

    for attempt in range(3):
        c = cos(theta)
        s = sin(theta)
        for p in range(N):
            w_new[p] = c * w[p] + s * nu[p]
        mn = 0.0
        imin = -1
        if n > 0:
            _matvec(A, w_new, pa_new)
            mn = pa_new[0]
            imin = 0
            for i in range(1, n):
                if pa_new[i] < mn:
                    mn = pa_new[i]
                    imin = i
        if imin < 0 or mn >= 0.0:
            for p in range(N):
                w[p] = w_new[p]
            for i in range(n):
                pa[i] = pa_new[i]
            return 0
        wn = 0.0
        for p in range(N):
            wn += w_new[p] * w_new[p]
        tol = GUARD_RTOL * row_norms[imin] * sqrt(wn)
        if -mn >= tol:
            return 2
        if attempt == 0:
            margin = 1e-3 * width
            clamped = theta
            if clamped < lo + margin:
                clamped = lo + margin
            if clamped > hi - margin:
                clamped = hi - margin
            theta = clamped if clamped != theta else lo + 0.5 * width
        else:
            theta = lo + 0.5 * width
        n_proj[0] += 1
    return 2


def process_block(
    const double[:, ::1] A,
    const double[::1] row_norms,
    double[::1] w,
    double[::1] pa,
    double[:, ::1] dirs,
    double[::1] us,
    long step_offset,
    long warmup,
    long thinning,
    double[:, ::1] out,
    long krec,
):
    """Compiled equivalent of ``_ess_py.process_block``."""
    cdef int B = us.shape[0]
    cdef int n = A.shape[0]
    cdef int N = A.shape[1]
    cdef int j, p, status
    cdef long s
    cdef int n_proj = 0
    cdef long k = krec
    cdef double[::1] pd = np.empty(max(n, 1), dtype=np.float64)
    cdef double[::1] w_new = np.empty(N, dtype=np.float64)
    cdef double[::1] pa_new = np.empty(max(n, 1), dtype=np.float64)

    status = 0
    with nogil:
        for j in range(B):
            status = _step(A, row_norms, w, pa, dirs[j], us[j], pd, w_new, pa_new, &n_proj)
            if status != 0:
                break
            s = step_offset + j + 1
            if s > warmup and (s - warmup) % thinning == 0:
                for p in range(N):
                    out[k, p] = w[p]
                k += 1
    if status == 1:
        raise ChainNumericalError("empty feasible arc: state left the constraint cone")
    if status == 2:
        raise ChainNumericalError("constraint violated beyond rounding tolerance")
    return k, n_proj
