"""Finite-size scaling, weighted derivatives, fidelity susceptibilities and
correlation collapse."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from kitaev_mpe.correlators import (
    ALL_KINDS, CorrelationProfile, OperatorKind, correlation_profile, correlation_profiles, kernel_for,
)
from kitaev_mpe.errors import NumericalError, ParameterError
from kitaev_mpe.model import ModelParams, f_alpha_infinite, f_alpha_infinite_dalpha, solve

#: Size ladder used when none is given.
DEFAULT_SIZES = (64, 96, 128, 192, 256, 384, 512)
#: Larger ladder for comparisons with thermodynamic-scale fits.
LARGE_SIZES = (1024, 1536, 2048, 3072, 4096)
#: Fitted exponents below this are treated as the b = 0 (extensive) branch.
FLAT_EXPONENT = 0.05
ETAS = ("mu", "delta", "alpha")


@dataclass(frozen=True)
class ScalingFit:
    """Result of fitting ``f_Q = 1 + c L**b`` across sizes."""

    b: float
    c: float
    r_squared: float
    residual_rms: float
    sizes: tuple
    values: tuple
    kind: OperatorKind | None = None
    flat: bool = False

    def predict(self, L):
        return 1.0 + self.c * np.asarray(L, dtype=float) ** self.b


def exponential_prefactor(xi: float) -> float:
    """Thermodynamic f_Q - 1 for ``C(l) = exp(-d(l)/xi)`` on a ring."""
    return 2.0 / math.expm1(1.0 / xi)


def exponential_correlations(xi: float, L: int) -> np.ndarray:
    ell = np.arange(1, L)
    return np.exp(-np.minimum(ell, L - ell) / xi)


def fit_scaling(samples, kind: OperatorKind | None = None) -> ScalingFit:
    """Least-squares fit of ``log(f_Q - 1)`` against ``log L``.

    Parameters
    ----------
    samples : iterable of (L, f_Q)
        At least four distinct sizes.

    The flat branch ``b = 0, c = mean(f_Q) - 1`` is taken when every
    ``f_Q - 1 < 1e-6``, when the spread of f_Q is below ``1e-3 * mean(f_Q - 1)``,
    or when the fitted exponent is below ``FLAT_EXPONENT`` (extensive data with
    a convergent finite-size drift).
    """
    pairs = sorted((int(L), float(f)) for L, f in samples)
    sizes = np.array([p[0] for p in pairs], dtype=float)
    values = np.array([p[1] for p in pairs])
    if len(set(sizes)) != len(sizes) or len(sizes) < 4:
        raise ParameterError(f"need >= 4 distinct sizes, got {sorted(set(int(s) for s in sizes))}")
    excess = values - 1.0
    if np.any(excess < -1e-9):
        raise NumericalError(f"f_Q below 1 cannot be fitted to 1 + c L^b: {values.tolist()}")
    common = dict(sizes=tuple(int(s) for s in sizes), values=tuple(values.tolist()), kind=kind)

    def flat_fit():
        c = float(np.mean(values)) - 1.0
        rms = float(np.sqrt(np.mean((values - 1.0 - c) ** 2)))
        return ScalingFit(b=0.0, c=c, r_squared=float("nan"), residual_rms=rms, flat=True, **common)

    if np.all(excess < 1e-6) or np.ptp(values) < 1e-3 * np.mean(excess):
        return flat_fit()
    if np.any(excess <= 0.0):
        raise NumericalError(f"f_Q - 1 not positive at every size: {values.tolist()}")
    x = np.log(sizes)
    y = np.log(excess)
    b, logc = np.polyfit(x, y, 1)
    if b < FLAT_EXPONENT:
        return flat_fit()
    resid = y - (b * x + logc)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    c = math.exp(logc)
    rms = float(np.sqrt(np.mean((values - 1.0 - c * sizes ** b) ** 2)))
    return ScalingFit(b=float(b), c=c, r_squared=r2, residual_rms=rms, flat=False, **common)


def fisher_density_value(params: ModelParams, kind: OperatorKind | None = None) -> float:
    """f_Q for one kind, or the maximum over the four kinds when ``kind`` is None."""
    if kind is None:
        profiles = correlation_profiles(kernel_for(params))
        return max(p.fisher_density for p in profiles.values())
    return correlation_profile(kernel_for(params), kind).fisher_density


def scaling_samples(params: ModelParams, sizes=DEFAULT_SIZES, kind: OperatorKind | None = None):
    return [(L, fisher_density_value(params.replace(L=L), kind)) for L in sizes]


def fisher_density_scaling(params: ModelParams, sizes=DEFAULT_SIZES,
                           kind: OperatorKind | None = None) -> ScalingFit:
    return fit_scaling(scaling_samples(params, sizes, kind), kind=kind)


def _shift(params: ModelParams, eta: str, delta_eta: float) -> ModelParams:
    """Move the dimensionless parameter ``eta`` (mu/J, delta/J or alpha)."""
    if eta == "mu":
        return params.replace(mu=params.mu + delta_eta * params.J)
    if eta == "delta":
        return params.replace(delta=params.delta + delta_eta * params.J)
    if eta == "alpha":
        return params.replace(alpha=params.alpha + delta_eta)
    raise ParameterError(f"eta must be one of {ETAS}, got {eta!r}")


@dataclass(frozen=True)
class DerivativeResult:
    eta_name: str
    value: float
    step: float
    fisher_density: float


def weighted_derivative(params: ModelParams, eta: str, kind: OperatorKind | None = None,
                        step: float = 1e-3) -> DerivativeResult:
    """``(1/f_Q) df_Q/d eta`` by central differences.

    ``kind=None`` differentiates the best-operator Fisher density. For
    ``eta="alpha"`` with ``alpha <= step`` a forward difference is used.
    """
    if step <= 0:
        raise ParameterError("step must be positive")
    if eta not in ETAS:
        raise ParameterError(f"eta must be one of {ETAS}, got {eta!r}")
    try:
        if eta == "alpha" and params.alpha <= step:
            f0 = fisher_density_value(params, kind)
            fp = fisher_density_value(_shift(params, eta, step), kind)
            value = (fp - f0) / step / f0
        else:
            f0 = fisher_density_value(params, kind)
            fp = fisher_density_value(_shift(params, eta, step), kind)
            fm = fisher_density_value(_shift(params, eta, -step), kind)
            value = (fp - fm) / (2.0 * step) / f0
    except ParameterError as exc:
        raise NumericalError(f"derivative evaluation failed at {eta} +- {step}: {exc}") from exc
    return DerivativeResult(eta_name=eta, value=value, step=step, fisher_density=f0)


@dataclass(frozen=True)
class DecompositionRow:
    L: int
    direct: float
    reconstructed: float
    prefactor_term: float
    log_term: float


@dataclass(frozen=True)
class DecompositionReport:
    eta_name: str
    fit: ScalingFit
    db_deta: float
    dlogc_deta: float
    rows: tuple = field(default_factory=tuple)

    @property
    def max_absolute(self) -> float:
        return max(abs(r.direct - r.reconstructed) for r in self.rows)

    @property
    def max_relative(self) -> float:
        return max(abs(r.direct - r.reconstructed) / max(abs(r.direct), 1e-300) for r in self.rows)


def check_derivative_decomposition(params: ModelParams, eta: str, sizes=DEFAULT_SIZES,
                                   kind: OperatorKind | None = None, step: float = 1e-3,
                                   compare_sizes=None) -> DecompositionReport:
    """Compare the direct weighted derivative with the one implied by ``b(eta)``, ``c(eta)``.

    With ``f_Q = 1 + c L^b``::

        (1/f_Q) df_Q/d eta = c L^b / (1 + c L^b) * (dc/d eta / c + db/d eta * log L)

    ``b`` and ``c`` are fitted over ``sizes`` at ``eta`` and ``eta +- step``.
    """
    fit0 = fisher_density_scaling(params, sizes, kind)
    fit_p = fisher_density_scaling(_shift(params, eta, step), sizes, kind)
    fit_m = fisher_density_scaling(_shift(params, eta, -step), sizes, kind)
    db = (fit_p.b - fit_m.b) / (2.0 * step)
    if fit0.c > 0 and fit_p.c > 0 and fit_m.c > 0:
        dlogc = (math.log(fit_p.c) - math.log(fit_m.c)) / (2.0 * step)
    else:
        dlogc = 0.0
    rows = []
    for L in compare_sizes or sizes:
        growth = fit0.c * L ** fit0.b
        weight = growth / (1.0 + growth)
        pref = weight * dlogc
        logt = weight * db * math.log(L)
        direct = weighted_derivative(params.replace(L=L), eta, kind, step).value
        rows.append(DecompositionRow(L=int(L), direct=direct, reconstructed=pref + logt,
                                     prefactor_term=pref, log_term=logt))
    return DecompositionReport(eta_name=eta, fit=fit0, db_deta=db, dlogc_deta=dlogc, rows=tuple(rows))


@dataclass(frozen=True)
class SusceptibilityResult:
    chi_mu: float
    chi_delta: float
    chi_alpha: float
    params: ModelParams


def susceptibility(params: ModelParams) -> SusceptibilityResult:
    """Closed-form fidelity susceptibilities, summed over the modes with k < pi.

    ``chi_eta = (1/4) sum_n (d theta_n / d eta)^2`` evaluated analytically for
    eta = mu, delta and alpha.
    """
    sol = solve(params)
    half = params.L // 2
    k = sol.modes[:half]
    kinetic = params.J * np.cos(k) + params.mu
    f = sol.f[:half]
    df = sol.df_dalpha[:half]
    with np.errstate(divide="ignore", invalid="ignore"):
        eps4 = (kinetic ** 2 + (0.5 * params.delta * f) ** 2) ** 2
        chi_mu = 0.25 * math.fsum((0.5 * params.delta * f) ** 2 / eps4)
        chi_delta = 0.25 * math.fsum(kinetic ** 2 * (0.5 * f) ** 2 / eps4)
        chi_alpha = 0.25 * math.fsum(kinetic ** 2 * (0.5 * params.delta * df) ** 2 / eps4)
    return SusceptibilityResult(chi_mu=chi_mu, chi_delta=chi_delta, chi_alpha=chi_alpha, params=params)


def ground_state_fidelity(params: ModelParams, other: ModelParams) -> float:
    """Overlap ``prod_{k < pi} cos((theta_k - theta'_k) / 2)`` of two ground states."""
    return math.exp(log_fidelity(params, other))


def log_fidelity(params: ModelParams, other: ModelParams) -> float:
    if params.L != other.L:
        raise ParameterError("fidelity needs equal chain lengths")
    half = params.L // 2
    d = solve(params).theta[:half] - solve(other).theta[:half]
    d = (d + math.pi) % (2.0 * math.pi) - math.pi  # angles are defined modulo 2 pi
    # log cos x = log1p(-2 sin^2(x/2)) keeps precision for small x
    return math.fsum(np.log1p(-2.0 * np.sin(0.25 * d) ** 2))


def chi_alpha_single_mode(params: ModelParams, k: float, n_terms: int) -> float:
    """Single-mode alpha susceptibility with the L -> infinity pairing function.

    ``x^2 (Delta/2 df/d alpha)^2 / (x^2 + (Delta/2 f)^2)^2`` with
    ``x = J cos k + mu``. ``params.L`` is ignored.
    """
    f = f_alpha_infinite(k, params.alpha, n_terms)
    df = f_alpha_infinite_dalpha(k, params.alpha, n_terms)
    x = params.J * math.cos(k) + params.mu
    y = 0.5 * params.delta * f
    denom = (x * x + y * y) ** 2
    if denom == 0.0:
        return 0.0
    return x * x * (0.5 * params.delta * df) ** 2 / denom


def collapse_deviation(profiles, b: float, window: float = 0.05, points: int = 64) -> float:
    """Spread of rescaled correlations ``L^(1-b) C(l)`` against ``l / L``.

    Each profile is linearly interpolated onto ``points`` abscissae spanning
    ``[window, 1 - window]``; the result is the largest pairwise absolute
    difference divided by the largest rescaled amplitude.
    """
    profiles = list(profiles)
    if len(profiles) < 2:
        raise ParameterError("collapse needs at least two profiles")
    ref: CorrelationProfile = profiles[0]
    for prof in profiles[1:]:
        if prof.kind != ref.kind or prof.params.replace(L=ref.params.L) != ref.params:
            raise ParameterError("profiles must differ only in L")
    if len({p.params.L for p in profiles}) != len(profiles):
        raise ParameterError("profiles must have distinct L")
    if not 0.0 < window < 0.5:
        raise ParameterError("window must lie in (0, 0.5)")
    x = np.linspace(window, 1.0 - window, points)
    curves = []
    for prof in profiles:
        L = prof.params.L
        curves.append(np.interp(x, prof.distances / L, L ** (1.0 - b) * prof.c))
    amplitude = max(float(np.max(np.abs(c))) for c in curves)
    spread = max(float(np.max(np.abs(a - c))) for i, a in enumerate(curves) for c in curves[i + 1:])
    return spread / amplitude


def best_kind_over_sizes(params: ModelParams, sizes) -> OperatorKind:
    """Kind with the largest Fisher density at the largest size."""
    profiles = correlation_profiles(kernel_for(params.replace(L=max(sizes))))
    return max(ALL_KINDS, key=lambda kind: profiles[kind].fisher_density)
