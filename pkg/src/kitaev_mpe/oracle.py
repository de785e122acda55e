"""Brute-force ground truth in the full 2^L Fock space.

Basis states are occupation bit-strings with bit ``j - 1`` holding site ``j``.
Creation operators are ordered by increasing site, so ``a_j^+`` picks up the
sign ``(-1)**popcount(bits below j - 1)``. The Hamiltonian is assembled in
real space, independently of the momentum-space solution; the ground state is
built from the BCS product over (k, 2 pi - k) pairs. The two meet only in
the checks.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from kitaev_mpe.correlators import ALL_KINDS, Basis, OperatorKind, correlation_profiles, kernel_for
from kitaev_mpe.errors import ParameterError
from kitaev_mpe.model import ModelParams, build_grid, ring_distance, solve

MAX_STATE_L = 14
MAX_QFI_L = 12


@dataclass(frozen=True)
class FockState:
    amplitudes: np.ndarray
    L: int

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def expectation(self, op) -> complex:
        return complex(np.vdot(self.amplitudes, op @ self.amplitudes))


@functools.lru_cache(maxsize=16)
def _popcount_below(L):
    """``out[j][s] = popcount(s & ((1 << j) - 1))`` for every basis state."""
    states = np.arange(1 << L)
    counts = np.zeros((L, 1 << L), dtype=np.int64)
    for j in range(1, L):
        counts[j] = counts[j - 1] + ((states >> (j - 1)) & 1)
    return counts


@functools.lru_cache(maxsize=16)
def annihilators(L: int):
    """Sparse ``a_j`` for j = 1..L (list index j - 1)."""
    dim = 1 << L
    states = np.arange(dim)
    below = _popcount_below(L)
    ops = []
    for j in range(L):
        occupied = states[(states >> j) & 1 == 1]
        signs = np.where(below[j][occupied] % 2, -1.0, 1.0)
        ops.append(sp.csr_matrix((signs, (occupied ^ (1 << j), occupied)), shape=(dim, dim)))
    return tuple(ops)


def _creators(L):
    return tuple(a.T.tocsr() for a in annihilators(L))


def _string(L, j):
    """Diagonal ``exp(i pi sum_{l<j} n_l)``."""
    return sp.diags(np.where(_popcount_below(L)[j - 1] % 2, -1.0, 1.0))


def hamiltonian(params: ModelParams) -> sp.csr_matrix:
    """Real-space Hamiltonian with the antiperiodic bond ``a_{L+1} = -a_1``."""
    L = params.L
    if L > MAX_STATE_L:
        raise ParameterError(f"oracle supports L <= {MAX_STATE_L}, got {L}")
    a = annihilators(L)
    ad = _creators(L)
    dim = 1 << L
    H = sp.csr_matrix((dim, dim))
    eye = sp.identity(dim, format="csr")
    for j in range(L):
        nxt = (j + 1) % L
        bc = -1.0 if j == L - 1 else 1.0
        H = H - 0.5 * params.J * bc * (ad[j] @ a[nxt] + ad[nxt] @ a[j])
        H = H - params.mu * (ad[j] @ a[j] - 0.5 * eye)
    if params.delta != 0.0:
        for j in range(L):
            for m in range(j + 1, L):
                if params.nearest_neighbor and ring_distance(m - j, L) != 1:
                    continue
                w = 0.5 * params.delta * ring_distance(m - j, L) ** (-params.alpha)
                H = H + w * (a[j] @ a[m] + ad[m] @ ad[j])
    return H.tocsr()


def _momentum_creator(L, k):
    """``a_k^+ = L**-1/2 sum_j exp(-i k j) a_j^+``."""
    ad = _creators(L)
    op = sp.csr_matrix((1 << L, 1 << L), dtype=complex)
    for j in range(1, L + 1):
        op = op + np.exp(-1j * k * j) * ad[j - 1]
    return op / math.sqrt(L)


def build_ground_state(params: ModelParams) -> FockState:
    """BCS product ``prod_k (cos(theta_k/2) + i sin(theta_k/2) a_k^+ a_{-k}^+) |0>``.

    The product runs over the L/2 pairs (k_n, k_{L-1-n}) with k_n < pi. The
    phase ``+i`` is the one that makes the state an eigenvector of
    :func:`hamiltonian` under the angle convention of :func:`kitaev_mpe.model.solve`.
    """
    L = params.L
    if L > MAX_STATE_L:
        raise ParameterError(f"oracle supports L <= {MAX_STATE_L}, got {L}")
    sol = solve(params)
    psi = np.zeros(1 << L, dtype=complex)
    psi[0] = 1.0
    for n in range(L // 2):
        m = L - 1 - n
        half = 0.5 * sol.theta[n]
        pair = _momentum_creator(L, sol.modes[n]) @ (_momentum_creator(L, sol.modes[m]) @ psi)
        psi = math.cos(half) * psi + 1j * math.sin(half) * pair
    return FockState(amplitudes=psi, L=L)


def string_operator(L: int, kind: OperatorKind, site: int) -> sp.csr_matrix:
    """Sparse ``o_rho(site)``, times ``(-1)**site`` for staggered kinds."""
    if not 1 <= site <= L:
        raise ParameterError(f"site must lie in [1, L], got {site}")
    a = annihilators(L)[site - 1]
    ad = _creators(L)[site - 1]
    S = _string(L, site)
    if kind.basis is Basis.X:
        op = ad @ S + S @ a
    else:
        op = -1j * (ad @ S - S @ a)
    if kind.staggered and site % 2:
        op = -op
    return op.tocsr()


def apply_string_operator(state: FockState, kind: OperatorKind, site: int) -> FockState:
    return FockState(amplitudes=string_operator(state.L, kind, site) @ state.amplitudes, L=state.L)


@dataclass(frozen=True)
class OracleQfi:
    kind: OperatorKind
    fisher: float
    fisher_density: float
    mean: complex
    correlations: np.ndarray


def brute_force_qfi(params: ModelParams, kind: OperatorKind, state: FockState | None = None) -> OracleQfi:
    """Variance of ``O = sum_j o(j)`` and all ``C(l) = <o(1) o(1+l)>`` by state-vector algebra."""
    L = params.L
    if L > MAX_QFI_L:
        raise ParameterError(f"brute_force_qfi supports L <= {MAX_QFI_L}, got {L}")
    if state is None:
        state = build_ground_state(params)
    psi = state.amplitudes
    images = [string_operator(L, kind, j) @ psi for j in range(1, L + 1)]
    total = np.sum(images, axis=0)
    mean = complex(np.vdot(psi, total))
    fisher = float(np.vdot(total, total).real) - abs(mean) ** 2
    # staggered images carry (-1)^j each, so this is (-1)^l <o(1) o(1+l)> for them
    corr = np.array([np.vdot(images[0], images[l]).real for l in range(1, L)])
    return OracleQfi(kind=kind, fisher=fisher, fisher_density=fisher / L, mean=mean, correlations=corr)


def majorana_contractions(state: FockState) -> np.ndarray:
    """``out[m, n] = <B_m A_n>`` (sites 1..L -> indices 0..L-1)."""
    L = state.L
    a = annihilators(L)
    ad = _creators(L)
    psi = state.amplitudes
    A = [(ad[j] + a[j]) @ psi for j in range(L)]
    B = [(ad[j] - a[j]).T.conj() @ psi for j in range(L)]  # B_m^+ |psi>
    return np.array([[np.vdot(B[m], A[n]) for n in range(L)] for m in range(L)])


def parity(state: FockState) -> float:
    """``<prod_j (1 - 2 n_j)>``."""
    states = np.arange(1 << state.L)
    bits = np.array([bin(s).count("1") for s in states])
    signs = np.where(bits % 2, -1.0, 1.0)
    return float(np.sum(signs * np.abs(state.amplitudes) ** 2))


def momentum_occupation(state: FockState, params: ModelParams) -> np.ndarray:
    """``<a_k^+ a_k>`` on every grid mode."""
    grid = build_grid(params)
    out = []
    for k in grid.modes:
        ak_dag = _momentum_creator(state.L, k)
        phi = ak_dag.T.conj() @ state.amplitudes
        out.append(float(np.vdot(phi, phi).real))
    return np.array(out)


def energy_moments(state: FockState, params: ModelParams):
    """``(<H>, ||(H - <H>) psi||^2)``; the residual form avoids cancellation."""
    H = hamiltonian(params)
    psi = state.amplitudes
    hpsi = H @ psi
    mean = float(np.vdot(psi, hpsi).real)
    resid = hpsi - mean * psi
    return mean, float(np.vdot(resid, resid).real)


def oracle_check(params: ModelParams) -> dict:
    """Compare the determinant route against the Fock-space oracle.

    Returns the maximal absolute deviations, keyed by check name.
    """
    state = build_ground_state(params)
    sol = solve(params)
    energy, variance = energy_moments(state, params)
    profiles = correlation_profiles(kernel_for(params))
    report = {
        "energy_error": abs(energy - sol.ground_energy),
        "energy_variance": abs(variance),
        "norm_error": abs(state.norm - 1.0),
        "parity_error": abs(parity(state) - 1.0),
    }
    corr_err = 0.0
    fq_err = 0.0
    mean_err = 0.0
    for kind in ALL_KINDS:
        ref = brute_force_qfi(params, kind, state)
        corr_err = max(corr_err, float(np.max(np.abs(ref.correlations - profiles[kind].c))))
        fq_err = max(fq_err, abs(ref.fisher_density - profiles[kind].fisher_density))
        mean_err = max(mean_err, abs(ref.mean))
    report["correlation_error"] = corr_err
    report["fisher_density_error"] = fq_err
    report["mean_error"] = mean_err
    return report
