"""Closed Kitaev chain with variable-range pairing: parameters, momentum grid,
pairing function, Bogoliubov solution and winding number.

The Hamiltonian is

.. math::

    H = -\\frac{J}{2}\\sum_j (a_j^\\dagger a_{j+1} + h.c.) - \\mu \\sum_j (n_j - 1/2)
        + \\frac{\\Delta}{2}\\sum_{j<m} d(m-j)^{-\\alpha} (a_j a_m + a_m^\\dagger a_j^\\dagger)

on a ring of even length ``L`` with antiperiodic boundary conditions and ring
distance ``d(l) = min(l, L - l)``.
"""
from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from kitaev_mpe import kernels
from kitaev_mpe.errors import ConvergenceWarning, ParameterError, UnresolvedWindingError

#: ``alpha`` at or above this value is the nearest-neighbour limit, f(k) = 2 sin k.
NEAREST_NEIGHBOR_ALPHA = 1000.0
#: Half-integer snapping tolerance for the winding number.
WINDING_SNAP_TOL = 0.1

_CHUNK = 1 << 20


def is_nearest_neighbor(alpha: float) -> bool:
    return alpha >= NEAREST_NEIGHBOR_ALPHA


def parse_alpha(value) -> float:
    """Accept floats and the spelling ``"inf"``; infinity maps to the sentinel."""
    alpha = float(value)
    if math.isinf(alpha) and alpha > 0:
        return NEAREST_NEIGHBOR_ALPHA
    return alpha


@dataclass(frozen=True)
class ModelParams:
    """Couplings of one model instance.

    Parameters
    ----------
    J : float
        Hopping energy, > 0.
    mu : float
        Chemical potential.
    delta : float
        Pairing strength.
    alpha : float
        Pairing-range exponent, >= 0. Values >= 1000 (or ``inf``) select the
        nearest-neighbour limit.
    L : int
        Even chain length, >= 4.
    """

    J: float = 1.0
    mu: float = 0.0
    delta: float = 1.0
    alpha: float = NEAREST_NEIGHBOR_ALPHA
    L: int = 8

    def __post_init__(self):
        object.__setattr__(self, "alpha", parse_alpha(self.alpha))
        for name in ("J", "mu", "delta", "alpha"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if isinstance(self.L, bool) or int(self.L) != self.L:
            raise ParameterError(f"L must be an integer, got {self.L!r}")
        object.__setattr__(self, "L", int(self.L))
        if self.L < 4 or self.L % 2:
            raise ParameterError(f"L must be even and >= 4, got {self.L}")
        if self.J <= 0:
            raise ParameterError(f"J must be positive, got {self.J}")
        if self.alpha < 0:
            raise ParameterError(f"alpha must be >= 0, got {self.alpha}")

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    @property
    def nearest_neighbor(self) -> bool:
        return is_nearest_neighbor(self.alpha)


@dataclass(frozen=True)
class MomentumGrid:
    """Antiperiodic momenta ``k_n = 2 pi (n + 1/2) / L``, n = 0..L-1."""

    L: int
    modes: np.ndarray

    def ring_distance(self, l):
        return ring_distance(l, self.L)

    def partner(self, n):
        """Index of the mode ``2 pi - k_n``."""
        return self.L - 1 - n


def ring_distance(l, L):
    """``d(l) = min(l, L - l)``; works on scalars and arrays."""
    return np.minimum(l, L - np.asarray(l)) if np.ndim(l) else min(int(l), L - int(l))


def build_grid(params: ModelParams | int) -> MomentumGrid:
    L = params if isinstance(params, (int, np.integer)) else params.L
    if L < 4 or L % 2:
        raise ParameterError(f"L must be even and >= 4, got {L}")
    modes = 2.0 * np.pi / L * (np.arange(L) + 0.5)
    return MomentumGrid(L=int(L), modes=modes)


def _ring_weights(alpha, L):
    """``w[l] = d(l)**-alpha`` for l = 0..L-1 (``w[0] = 0``)."""
    w = np.zeros(L)
    if is_nearest_neighbor(alpha):
        w[1] = w[L - 1] = 1.0
        return w
    ell = np.arange(1, L)
    w[1:] = np.minimum(ell, L - ell).astype(np.float64) ** (-alpha)
    return w


def _ring_log_weights(alpha, L):
    """``-ln d(l) * d(l)**-alpha``, the alpha-derivative of the weights."""
    dw = np.zeros(L)
    if is_nearest_neighbor(alpha):
        return dw
    ell = np.arange(1, L)
    d = np.minimum(ell, L - ell).astype(np.float64)
    dw[1:] = -np.log(d) * d ** (-alpha)
    return dw


def _sine_transform(k, weights):
    k = np.asarray(k, dtype=np.float64)
    flat = k.ravel()
    out = np.empty_like(flat)
    ell = np.arange(weights.shape[0], dtype=np.float64)
    step = max(1, _CHUNK // max(1, weights.shape[0]))
    for i in range(0, flat.shape[0], step):
        out[i:i + step] = np.sin(np.outer(flat[i:i + step], ell)) @ weights
    return out.reshape(k.shape) if k.ndim else float(out[0])


def f_alpha(k, alpha, L):
    """Pairing function ``f(k) = sum_{l=1}^{L-1} sin(k l) / d(l)**alpha``.

    Vectorised over ``k``. In the nearest-neighbour limit this is exactly
    ``2 sin k``.
    """
    alpha = parse_alpha(alpha)
    if is_nearest_neighbor(alpha):
        return 2.0 * np.sin(k) if np.ndim(k) else 2.0 * math.sin(k)
    return _sine_transform(k, _ring_weights(alpha, L))


def f_alpha_dalpha(k, alpha, L):
    """Exact alpha-derivative of :func:`f_alpha`, ``-sum ln d(l) sin(k l) / d(l)**alpha``."""
    alpha = parse_alpha(alpha)
    if is_nearest_neighbor(alpha):
        return np.zeros_like(np.asarray(k, dtype=float)) if np.ndim(k) else 0.0
    return _sine_transform(k, _ring_log_weights(alpha, L))


def _grid_transform(weights):
    """``sum_l w_l sin(k_n l)`` on the full antiperiodic grid via one FFT."""
    L = weights.shape[0]
    phase = np.exp(1j * np.pi * np.arange(L) / L)
    return np.imag(L * np.fft.ifft(weights * phase))


def f_alpha_grid(params: ModelParams):
    """``(f, df/dalpha)`` evaluated on every grid mode."""
    grid = build_grid(params)
    if params.nearest_neighbor:
        f, df = 2.0 * np.sin(grid.modes), np.zeros(params.L)
    else:
        f = _grid_transform(_ring_weights(params.alpha, params.L))
        df = _grid_transform(_ring_log_weights(params.alpha, params.L))
    # exact oddness under k -> 2 pi - k, free of rounding
    return 0.5 * (f - f[::-1]), 0.5 * (df - df[::-1])


def f_alpha_infinite(k, alpha, n_terms):
    """Truncated polylog series ``2 sum_{l=1}^{n_terms} sin(k l) / l**alpha``.

    This is the L -> infinity pairing function
    ``[Li_alpha(e^{ik}) - Li_alpha(e^{-ik})] / i`` cut after ``n_terms``
    terms. Emits :class:`ConvergenceWarning` when ``alpha <= 1`` and ``k`` is
    within ``1/n_terms`` of 0 or 2 pi.
    """
    return _f_infinite(k, alpha, n_terms)[0]


def f_alpha_infinite_dalpha(k, alpha, n_terms):
    """Term-wise alpha-derivative of :func:`f_alpha_infinite`."""
    return _f_infinite(k, alpha, n_terms)[1]


def _f_infinite(k, alpha, n_terms):
    alpha = parse_alpha(alpha)
    k = float(k)
    n_terms = int(n_terms)
    if n_terms < 1:
        raise ParameterError("n_terms must be >= 1")
    if not 0.0 < k < 2.0 * math.pi:
        raise ParameterError(f"k must lie in (0, 2 pi), got {k}")
    if is_nearest_neighbor(alpha):
        return 2.0 * math.sin(k), 0.0
    if alpha <= 1.0 and min(k, 2.0 * math.pi - k) < 1.0 / n_terms:
        warnings.warn(
            f"series for alpha={alpha} converges slowly at k={k:g} with n_terms={n_terms}",
            ConvergenceWarning, stacklevel=3)
    s, ds = kernels.sine_series(k, alpha, n_terms)
    return 2.0 * s, 2.0 * ds


@dataclass(frozen=True)
class BogoliubovSolution:
    """Per-mode Bogoliubov angles and quasiparticle energies.

    ``theta`` is the angle of the vector ``(h_y, h_z) = -(Delta f / 2, J cos k + mu) / eps``,
    i.e. ``eps sin(theta) = -Delta f / 2`` and ``eps cos(theta) = -(J cos k + mu)``.
    With this convention ``theta = pi`` on every mode deep in the filled phase.
    """

    params: ModelParams
    modes: np.ndarray
    theta: np.ndarray
    epsilon: np.ndarray
    f: np.ndarray
    df_dalpha: np.ndarray
    degenerate: bool = False

    @property
    def ground_energy(self) -> float:
        return -0.5 * math.fsum(self.epsilon)

    @property
    def gap(self) -> float:
        return float(self.epsilon.min())


def _angles(params, modes, f):
    cos_k = np.cos(modes)
    cos_k = 0.5 * (cos_k + cos_k[::-1])  # exactly even on the grid
    kinetic = params.J * cos_k + params.mu
    pairing = 0.5 * params.delta * f
    eps = np.hypot(kinetic, pairing)
    # + 0.0 turns -0.0 into +0.0 so atan2 does not return -pi on the real axis
    theta = np.arctan2(-pairing + 0.0, -kinetic + 0.0)
    zero = eps == 0.0
    theta[zero] = 0.0
    return theta, eps, bool(zero.any())


def solve(params: ModelParams) -> BogoliubovSolution:
    """Diagonalise the chain on the antiperiodic grid.

    Returns the energies ``eps_k = sqrt((J cos k + mu)^2 + (Delta f(k) / 2)^2)``
    and the Bogoliubov angles. A mode with ``eps_k == 0`` gets ``theta = 0``
    and sets ``degenerate``.
    """
    grid = build_grid(params)
    f, df = f_alpha_grid(params)
    theta, eps, degenerate = _angles(params, grid.modes, f)
    return BogoliubovSolution(params=params, modes=grid.modes, theta=theta, epsilon=eps,
                              f=f, df_dalpha=df, degenerate=degenerate)


@dataclass(frozen=True)
class WindingResult:
    raw: float
    snapped: Fraction
    snap_error: float


def bloch_angle(params: ModelParams, k, f):
    """``Theta(k) = atan2(-(Delta/2) f, -(J cos k + mu))``."""
    return np.arctan2(-0.5 * params.delta * f + 0.0, -(params.J * np.cos(k) + params.mu) + 0.0)


def winding(params: ModelParams, resolution: int = 4096) -> WindingResult:
    """Winding number of ``(h_y, h_z)`` as k runs over (0, 2 pi).

    The pairing function is evaluated in its ring form on a dense antiperiodic
    grid of ``resolution`` modes (chain length ``resolution``, independent of
    ``params.L``); on that grid the ring sum is the Abel-regularised
    thermodynamic limit (for alpha = 0 it is exactly ``cot(k/2)``).
    Principal-value increments of ``Theta`` are accumulated. For
    ``alpha >= 1`` (or ``delta == 0``) f stays finite at k = 0 and the path is
    closed across k = 0 == 2 pi. For ``alpha < 1`` f diverges there, so the
    path is open and its ends are pinned to the limits
    ``Theta(0+) = -sign(delta) pi/2`` and ``Theta(2 pi-) = +sign(delta) pi/2``;
    the omitted closure would be an ambiguous half turn.

    Raises
    ------
    UnresolvedWindingError
        If the raw value is farther than 0.1 from a half-integer, or if some
        increment is an ambiguous half turn (the curve crosses the origin).
    """
    if resolution < 256 or resolution % 2:
        raise ParameterError("resolution must be even and >= 256")
    dense = params.replace(L=resolution)
    grid = build_grid(dense)
    f, _ = f_alpha_grid(dense)
    theta = bloch_angle(params, grid.modes, f)
    if params.alpha >= 1.0 or params.delta == 0.0:
        path = np.append(theta, theta[0])
    else:
        end = math.copysign(0.5 * math.pi, params.delta)
        path = np.concatenate(([-end], theta, [end]))
    steps = np.diff(path)
    wrapped = (steps + np.pi) % (2.0 * np.pi) - np.pi
    if np.any(np.abs(np.abs(wrapped) - np.pi) < 1e-9):
        raise UnresolvedWindingError(f"winding undefined: Bloch vector vanishes for {params}")
    raw = math.fsum(wrapped) / (2.0 * math.pi)
    snapped = Fraction(round(2.0 * raw), 2)
    err = abs(raw - float(snapped))
    if err > WINDING_SNAP_TOL:
        raise UnresolvedWindingError(
            f"unresolved winding: raw={raw:.4f} is {err:.3f} from a half-integer for {params}")
    return WindingResult(raw=raw, snapped=snapped, snap_error=err)
