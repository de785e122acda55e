"""String-operator correlators and Fisher densities from Wick's theorem.

With Majorana operators ``A_j = a_j^+ + a_j`` and ``B_j = a_j^+ - a_j`` the
ground state is characterised by the cross-contraction ``G(r) = <B_m A_{m+r}>``.
String correlators of the operators

    o_x(j) = a_j^+ S_j + S_j a_j,      o_y(j) = -i (a_j^+ S_j - S_j a_j),

with the parity string ``S_j = exp(i pi sum_{l<j} n_l)``, are Toeplitz
determinants of ``G``:

    C_x(l) = det[G(j - i + 1)]_{i,j=1..l},    C_y(l) = det[G(j - i - 1)]_{i,j=1..l}.

Staggered variants carry an extra ``(-1)**l``. The Fisher density of
``O = sum_j (+-1)^j o(j)`` is ``f_Q = 1 + sum_{l=1}^{L-1} C(l)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from kitaev_mpe import kernels
from kitaev_mpe.errors import ParameterError, VarianceBoundError
from kitaev_mpe.model import BogoliubovSolution, ModelParams, solve

_DEPTH_TOL = 1e-9


class Basis(enum.Enum):
    X = "x"
    Y = "y"


@dataclass(frozen=True)
class OperatorKind:
    basis: Basis
    staggered: bool = False

    @property
    def name(self) -> str:
        return self.basis.value + ("_st" if self.staggered else "")

    @property
    def offset(self) -> int:
        """Toeplitz index offset: +1 for x strings, -1 for y strings."""
        return 1 if self.basis is Basis.X else -1

    def swapped(self) -> "OperatorKind":
        """X <-> Y partner, e.g. under delta -> -delta."""
        return OperatorKind(Basis.Y if self.basis is Basis.X else Basis.X, self.staggered)

    def __str__(self):
        return self.name

    @classmethod
    def parse(cls, text: str) -> "OperatorKind":
        key = text.strip().lower().replace("-", "_").replace("(st)", "_st")
        if key.endswith("st") and not key.endswith("_st"):
            key = key[:-2] + "_st"
        for kind in ALL_KINDS:
            if key == kind.name:
                return kind
        raise ParameterError(f"unknown operator {text!r}; expected one of x, y, x_st, y_st")


X = OperatorKind(Basis.X)
Y = OperatorKind(Basis.Y)
X_ST = OperatorKind(Basis.X, True)
Y_ST = OperatorKind(Basis.Y, True)
ALL_KINDS = (X, Y, X_ST, Y_ST)


@dataclass(frozen=True)
class ContractionKernel:
    """``g[r + L - 1] = G(r)`` for r = -(L-1)..(L-1)."""

    params: ModelParams
    g: np.ndarray

    @property
    def L(self) -> int:
        return self.params.L

    def __call__(self, r):
        r = np.asarray(r)
        if np.any(np.abs(r) > self.L - 1):
            raise ParameterError(f"|r| must be <= L-1 = {self.L - 1}")
        out = self.g[r + self.L - 1]
        return float(out) if out.ndim == 0 else out


def contraction_kernel(sol: BogoliubovSolution) -> ContractionKernel:
    """``G(r) = -(1/L) sum_k cos(k r - theta_k)`` via one inverse FFT."""
    L = sol.params.L
    z = np.exp(-1j * sol.theta)
    s = np.fft.ifft(z)  # s[r mod L] = (1/L) sum_n z_n e^{2 pi i n r / L}
    r = np.arange(-(L - 1), L)
    g = -np.real(s[r % L] * np.exp(1j * np.pi * r / L))
    return ContractionKernel(params=sol.params, g=g)


def kernel_for(params: ModelParams) -> ContractionKernel:
    return contraction_kernel(solve(params))


def toeplitz_matrix(kernel: ContractionKernel, kind: OperatorKind, l: int) -> np.ndarray:
    """``T[i, j] = G(j - i + offset)`` for i, j < l."""
    idx = np.arange(l)
    return kernel.g[idx[None, :] - idx[:, None] + kind.offset + kernel.L - 1]


def _check_l(kernel, l):
    if not 1 <= l <= kernel.L - 1:
        raise ParameterError(f"l must lie in [1, L-1] = [1, {kernel.L - 1}], got {l}")


def correlation(kernel: ContractionKernel, kind: OperatorKind, l: int) -> float:
    """Single ``C(l)`` from a pivoted LU determinant (log-magnitude form)."""
    _check_l(kernel, l)
    sign, logdet = np.linalg.slogdet(toeplitz_matrix(kernel, kind, l))
    value = float(sign * math.exp(logdet)) if sign != 0 else 0.0
    return -value if kind.staggered and l % 2 else value


def leading_minors(kernel: ContractionKernel, kind: OperatorKind):
    """``(log|det T_l|, sign det T_l)`` for l = 1..L-1.

    Levinson recursion on the Toeplitz data; if the recursion reports a
    breakdown the remaining minors come from pivoted determinants.
    """
    L = kernel.L
    n = L - 1
    base = L - 1 + kind.offset
    tpos = kernel.g[base:base + n]
    tneg = kernel.g[base - n + 1:base + 1][::-1]
    ratios, n_ok = kernels.toeplitz_minor_ratios(tpos, tneg)
    logabs = np.empty(n)
    sign = np.empty(n)
    if n_ok:
        with np.errstate(divide="ignore"):
            logabs[:n_ok] = np.cumsum(np.log(np.abs(ratios[:n_ok])))
        sign[:n_ok] = np.cumprod(np.sign(ratios[:n_ok]))
    if n_ok < n:
        full = toeplitz_matrix(kernel, kind, n)
        for l in range(n_ok + 1, n + 1):
            s, ld = np.linalg.slogdet(full[:l, :l])
            sign[l - 1] = s
            logabs[l - 1] = ld
    return logabs, sign


@dataclass(frozen=True)
class CorrelationProfile:
    """``c[l - 1] = C(l)`` for l = 1..L-1 of one operator kind."""

    kind: OperatorKind
    c: np.ndarray
    params: ModelParams

    @property
    def distances(self) -> np.ndarray:
        return np.arange(1, self.params.L)

    @property
    def fisher_density(self) -> float:
        return fisher_density_from_correlations(self.c)


def correlation_profile(kernel: ContractionKernel, kind: OperatorKind) -> CorrelationProfile:
    logabs, sign = leading_minors(kernel, kind)
    c = sign * np.exp(logabs)
    if kind.staggered:
        c[::2] *= -1.0  # l = 1, 3, 5, ...
    return CorrelationProfile(kind=kind, c=c, params=kernel.params)


def correlation_profiles(kernel: ContractionKernel) -> dict:
    """Profiles of all four kinds from two Toeplitz sweeps."""
    out = {}
    for plain in (X, Y):
        prof = correlation_profile(kernel, plain)
        stag = prof.c.copy()
        stag[::2] *= -1.0
        st_kind = OperatorKind(plain.basis, True)
        out[plain] = prof
        out[st_kind] = CorrelationProfile(kind=st_kind, c=stag, params=kernel.params)
    return {kind: out[kind] for kind in ALL_KINDS}


def fisher_density_from_correlations(c) -> float:
    """``1 + sum C(l)``, exactly rounded so the result is order independent."""
    return 1.0 + math.fsum(np.asarray(c, dtype=float))


@dataclass(frozen=True)
class QfiResult:
    kind: OperatorKind
    fisher_density: float
    fisher: float
    witnessed_depth: int
    genuine_l_partite: bool


def qfi_result(kind: OperatorKind, fq: float, L: int) -> QfiResult:
    """Package a Fisher density with its entanglement-depth witness.

    ``f_Q > kappa`` certifies (kappa+1)-partite entanglement; the witnessed
    depth is ``1 + max{kappa : f_Q > kappa}`` capped to ``[1, L]``.
    """
    if fq < -_DEPTH_TOL or fq > L + 1e-6:
        raise VarianceBoundError(f"f_Q={fq!r} outside [0, L={L}] for operator {kind}")
    kappa = math.ceil(fq - _DEPTH_TOL) - 1
    depth = min(L, max(1, 1 + kappa))
    return QfiResult(kind=kind, fisher_density=fq, fisher=L * fq, witnessed_depth=depth,
                     genuine_l_partite=fq > L - 1 + _DEPTH_TOL)


def fisher_density(kernel: ContractionKernel, kind: OperatorKind) -> QfiResult:
    prof = correlation_profile(kernel, kind)
    return qfi_result(kind, prof.fisher_density, kernel.L)


def fisher_densities(params: ModelParams) -> dict:
    """``{kind: QfiResult}`` for all four operator kinds."""
    profiles = correlation_profiles(kernel_for(params))
    return {kind: qfi_result(kind, prof.fisher_density, params.L) for kind, prof in profiles.items()}


def best_operator(params: ModelParams):
    """Operator kind maximising the Fisher density, with its result.

    All four kinds are evaluated; ties go to the first in ``ALL_KINDS`` order.
    """
    results = fisher_densities(params)
    best = max(ALL_KINDS, key=lambda kind: results[kind].fisher_density)
    return best, results[best]
