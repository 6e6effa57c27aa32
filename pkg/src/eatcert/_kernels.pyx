# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scalar kernels for the single-round entropy bound.

Mirrors the pure-Python implementation in bound.py operation for operation,
including the grid-then-golden-section optimizer from numerics.py, so both
backends produce identical values.
"""

from libc.math cimport log2, sqrt, pow, acos, cos

cdef double _INV_GOLDEN = (sqrt(5.0) - 1.0) / 2.0
cdef double _SQRT2 = sqrt(2.0)
cdef double _LOG2_3 = log2(3.0)


cdef inline double _h(double x) nogil:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * log2(x) - (1.0 - x) * log2(1.0 - x)


cdef inline double _clamp01(double x) nogil:
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return x


cdef inline double _uncertainty(double c, double wp, double wm, double mu) nogil:
    """Entropy bound at a fixed overlap threshold c, before the continuity
    penalty: max{0, 1 - A(c) pen} * max{0, log2(1/c) - h(arg)}."""
    cdef double a = 10.0 / ((2.0 * c - 1.0) * (2.0 * c - 1.0))
    cdef double pen = mu / 5.0 + _SQRT2 * pow(1.0 - wp, 0.25) + sqrt(1.0 - wm)
    cdef double prefactor = 1.0 - a * pen
    if prefactor < 0.0:
        prefactor = 0.0
    cdef double arg = _clamp01(wm - 2.0 * sqrt(1.0 - wp) - a * pen)
    cdef double hterm
    if arg < 0.5:
        hterm = 1.0
    else:
        hterm = _h(arg)
    cdef double gap = log2(1.0 / c) - hterm
    if gap < 0.0:
        gap = 0.0
    return prefactor * gap


cdef inline double _continuity(double wp) nogil:
    cdef double e = sqrt(1.0 - wp)
    if e <= 0.0:
        return 0.0
    return e * _LOG2_3 + (1.0 + e) * _h(e / (1.0 + e))


cdef double _best_over_c(double wp, double wm, double mu,
                         double clo, double chi,
                         int grid, int iters, double tol) nogil:
    """Max over c of _uncertainty; same grid + golden pass as
    numerics.maximize_scalar."""
    cdef double step = (chi - clo) / (grid - 1)
    cdef int best_i = 0
    cdef double best_v = _uncertainty(clo, wp, wm, mu)
    cdef double x, v
    cdef int i
    for i in range(1, grid):
        x = clo + i * step if i < grid - 1 else chi
        v = _uncertainty(x, wp, wm, mu)
        if v > best_v:
            best_i = i
            best_v = v
    cdef double a = clo + (best_i - 1) * step if best_i > 0 else clo
    cdef double b
    if best_i >= grid - 2:
        b = chi
    else:
        b = clo + (best_i + 1) * step
    cdef double c, d, fc, fd, xm, vm
    if iters > 0 and b > a:
        c = b - _INV_GOLDEN * (b - a)
        d = a + _INV_GOLDEN * (b - a)
        fc = _uncertainty(c, wp, wm, mu)
        fd = _uncertainty(d, wp, wm, mu)
        for i in range(iters):
            if b - a <= tol:
                break
            if fc >= fd:
                b = d
                d = c
                fd = fc
                c = b - _INV_GOLDEN * (b - a)
                fc = _uncertainty(c, wp, wm, mu)
            else:
                a = c
                c = d
                fc = fd
                d = a + _INV_GOLDEN * (b - a)
                fd = _uncertainty(d, wp, wm, mu)
        xm = 0.5 * (a + b)
        vm = _uncertainty(xm, wp, wm, mu)
        if vm > best_v:
            return vm
    return best_v


cdef double _two_var(double wp, double wm, double mu, double xi,
                     double clo, double chi,
                     int grid, int iters, double tol) nogil:
    cdef double v = _best_over_c(wp, wm, mu, clo, chi, grid, iters, tol)
    v = v - _continuity(wp) - xi
    if v < 0.0:
        return 0.0
    return v


cdef double _combined(double omega, double beta, double xi,
                      double clo, double chi,
                      int grid, int iters, double tol) nogil:
    """Min over the feasible preimage rate of the two-variable bound."""
    cdef double lo = (omega - beta) / (1.0 - beta)
    cdef double hi = omega / (1.0 - beta)
    if lo < 0.0:
        lo = 0.0
    if hi > 1.0:
        hi = 1.0
    cdef double step = (hi - lo) / (grid - 1)
    cdef int best_i = 0
    cdef double x, v, wm
    cdef int i
    wm = _clamp01((omega - (1.0 - beta) * lo) / beta)
    cdef double best_v = _two_var(lo, wm, 0.0, xi, clo, chi, grid, iters, tol)
    for i in range(1, grid):
        x = lo + i * step if i < grid - 1 else hi
        wm = _clamp01((omega - (1.0 - beta) * x) / beta)
        v = _two_var(x, wm, 0.0, xi, clo, chi, grid, iters, tol)
        if v < best_v:
            best_i = i
            best_v = v
    cdef double a = lo + (best_i - 1) * step if best_i > 0 else lo
    cdef double b
    if best_i >= grid - 2:
        b = hi
    else:
        b = lo + (best_i + 1) * step
    cdef double c, d, fc, fd, xm, vm
    if iters > 0 and b > a:
        c = b - _INV_GOLDEN * (b - a)
        d = a + _INV_GOLDEN * (b - a)
        fc = _two_var(c, _clamp01((omega - (1.0 - beta) * c) / beta), 0.0, xi,
                      clo, chi, grid, iters, tol)
        fd = _two_var(d, _clamp01((omega - (1.0 - beta) * d) / beta), 0.0, xi,
                      clo, chi, grid, iters, tol)
        for i in range(iters):
            if b - a <= tol:
                break
            if fc <= fd:
                b = d
                d = c
                fd = fc
                c = b - _INV_GOLDEN * (b - a)
                fc = _two_var(c, _clamp01((omega - (1.0 - beta) * c) / beta),
                              0.0, xi, clo, chi, grid, iters, tol)
            else:
                a = c
                c = d
                fc = fd
                d = a + _INV_GOLDEN * (b - a)
                fd = _two_var(d, _clamp01((omega - (1.0 - beta) * d) / beta),
                              0.0, xi, clo, chi, grid, iters, tol)
        xm = 0.5 * (a + b)
        vm = _two_var(xm, _clamp01((omega - (1.0 - beta) * xm) / beta), 0.0, xi,
                      clo, chi, grid, iters, tol)
        if vm < best_v:
            return vm
    return best_v


def uncertainty_bound(double c, double wp, double wm, double mu):
    return _uncertainty(c, wp, wm, mu)


def continuity_penalty(double wp):
    return _continuity(wp)


def two_var_bound(double wp, double wm, double mu, double xi,
                  double clo, double chi, int grid, int iters, double tol):
    return _two_var(wp, wm, mu, xi, clo, chi, grid, iters, tol)


def combined_bound(double omega, double beta, double xi,
                   double clo, double chi, int grid, int iters, double tol):
    return _combined(omega, beta, xi, clo, chi, grid, iters, tol)
