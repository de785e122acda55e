"""Pure numpy implementations of the hot kernels.

These mirror :mod:`kitaev_mpe._ckernels` call for call and are used when the
compiled extension is unavailable (or when ``KITAEV_MPE_KERNELS=python``).
"""
import math

import numpy as np

_CHUNK = 1 << 16


def toeplitz_minor_ratios(tpos, tneg, tol=1e-8, growth=1e12):
    """Ratios of consecutive leading principal minors of a Toeplitz matrix.

    The matrix is ``T[i, j] = t[j - i]`` with ``tpos[m] = t[m]`` and
    ``tneg[m] = t[-m]``. Uses the nonsymmetric Levinson recursion, O(n^2).

    Returns
    -------
    ratios : ndarray, shape (n,)
        ``ratios[m] = det T_{m+1} / det T_m`` (with ``det T_0 = 1``).
    n_ok : int
        Number of trustworthy leading entries. ``n_ok < n`` means the
        recursion broke down (near-singular leading block or excessive
        growth of the inverse columns); entries from ``n_ok`` on are garbage.
    """
    tpos = np.ascontiguousarray(tpos, dtype=np.float64)
    tneg = np.ascontiguousarray(tneg, dtype=np.float64)
    n = tpos.shape[0]
    ratios = np.zeros(n)
    if n == 0:
        return ratios, 0
    t0 = tpos[0]
    if not math.isfinite(t0) or abs(t0) < tol:
        return ratios, 0
    ratios[0] = t0
    f = np.array([1.0 / t0])
    b = np.array([1.0 / t0])
    # tneg_rev[n - 1 - m:] == tneg[m:0:-1]
    tneg_rev = tneg[:0:-1]
    for m in range(1, n):
        ef = float(np.dot(tneg_rev[n - 1 - m:], f))
        eb = float(np.dot(tpos[1:m + 1], b))
        den = 1.0 - ef * eb
        if not math.isfinite(den) or abs(den) < tol:
            return ratios, m
        f_new = np.empty(m + 1)
        f_new[:m] = f
        f_new[m] = 0.0
        f_new[1:] -= ef * b
        b_new = np.empty(m + 1)
        b_new[1:] = b
        b_new[0] = 0.0
        b_new[:m] -= eb * f
        f = f_new / den
        b = b_new / den
        ratios[m] = ratios[m - 1] * den
        if abs(f[0]) > growth or abs(b[m]) > growth:
            return ratios, m + 1
    return ratios, n


def sine_series(k, alpha, n_terms):
    """Partial sums ``sum_{l=1}^{n} sin(k l) / l**alpha`` and its alpha-derivative.

    Returns ``(s, ds)`` with ``ds = -sum ln(l) sin(k l) / l**alpha``.
    """
    s_parts = []
    ds_parts = []
    for start in range(1, n_terms + 1, _CHUNK):
        ell = np.arange(start, min(start + _CHUNK, n_terms + 1), dtype=np.float64)
        term = np.sin(k * ell) * ell ** (-alpha)
        s_parts.append(float(term.sum()))
        ds_parts.append(float(-(np.log(ell) * term).sum()))
    return math.fsum(s_parts), math.fsum(ds_parts)
