# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Same signatures and semantics as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, exp, log, fabs, isfinite

cnp.import_array()

cdef long _RESEED = 256


def toeplitz_minor_ratios(tpos, tneg, double tol=1e-8, double growth=1e12):
    cdef double[::1] tp = np.ascontiguousarray(tpos, dtype=np.float64)
    cdef double[::1] tn = np.ascontiguousarray(tneg, dtype=np.float64)
    cdef Py_ssize_t n = tp.shape[0]
    ratios_arr = np.zeros(n)
    cdef double[::1] ratios = ratios_arr
    if n == 0:
        return ratios_arr, 0
    cdef double t0 = tp[0]
    if not isfinite(t0) or fabs(t0) < tol:
        return ratios_arr, 0
    cdef double[::1] f = np.zeros(n)
    cdef double[::1] b = np.zeros(n)
    cdef double[::1] fn = np.zeros(n)
    cdef double[::1] bn = np.zeros(n)
    cdef double[::1] tmp
    cdef Py_ssize_t m, i
    cdef double ef, eb, den, inv
    ratios[0] = t0
    f[0] = 1.0 / t0
    b[0] = 1.0 / t0
    for m in range(1, n):
        ef = 0.0
        eb = 0.0
        for i in range(m):
            ef += tn[m - i] * f[i]
            eb += tp[i + 1] * b[i]
        den = 1.0 - ef * eb
        if not isfinite(den) or fabs(den) < tol:
            return ratios_arr, m
        inv = 1.0 / den
        fn[0] = f[0] * inv
        bn[0] = -eb * f[0] * inv
        for i in range(1, m):
            fn[i] = (f[i] - ef * b[i - 1]) * inv
            bn[i] = (b[i - 1] - eb * f[i]) * inv
        fn[m] = -ef * b[m - 1] * inv
        bn[m] = b[m - 1] * inv
        tmp = f
        f = fn
        fn = tmp
        tmp = b
        b = bn
        bn = tmp
        ratios[m] = ratios[m - 1] * den
        if fabs(f[0]) > growth or fabs(b[m]) > growth:
            return ratios_arr, m + 1
    return ratios_arr, n


cdef inline void _neumaier(double *acc, double *comp, double x) nogil:
    cdef double t = acc[0] + x
    if fabs(acc[0]) >= fabs(x):
        comp[0] += (acc[0] - t) + x
    else:
        comp[0] += (x - t) + acc[0]
    acc[0] = t


def sine_series(double k, double alpha, long n_terms):
    # sin(k l) by rotation, reseeded exactly every _RESEED terms; Neumaier-compensated sums
    cdef double s = 0.0, cs = 0.0, ds = 0.0, cds = 0.0
    cdef double sk = sin(k), ck = cos(k)
    cdef double sn = 0.0, cn = 1.0, tmp, lg, term
    cdef long l
    for l in range(1, n_terms + 1):
        if (l - 1) % _RESEED == 0:
            sn = sin(k * l)
            cn = cos(k * l)
        else:
            tmp = sn * ck + cn * sk
            cn = cn * ck - sn * sk
            sn = tmp
        lg = log(<double>l)
        term = sn * exp(-alpha * lg)
        _neumaier(&s, &cs, term)
        _neumaier(&ds, &cds, -lg * term)
    return s + cs, ds + cds
