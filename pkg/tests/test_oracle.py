import math

import numpy as np
import pytest

from kitaev_mpe.correlators import ALL_KINDS, X, correlation_profiles, kernel_for
from kitaev_mpe.errors import ParameterError
from kitaev_mpe.model import ModelParams, solve
from kitaev_mpe.oracle import (
    FockState, annihilators, apply_string_operator, brute_force_qfi, build_ground_state,
    energy_moments, hamiltonian, majorana_contractions, momentum_occupation, oracle_check, parity,
    string_operator,
)

from _oracles import random_params


def _state(L, occupied=()):
    psi = np.zeros(1 << L, dtype=complex)
    psi[sum(1 << (j - 1) for j in occupied)] = 1.0
    return FockState(psi, L)


class TestGroundState:
    def test_filled(self):
        state = build_ground_state(ModelParams(mu=2.0, delta=0.0, L=6))
        assert abs(state.amplitudes[(1 << 6) - 1]) == pytest.approx(1.0, abs=1e-14)
        assert np.sum(np.abs(state.amplitudes) ** 2) == pytest.approx(1.0, abs=1e-14)

    def test_vacuum(self):
        state = build_ground_state(ModelParams(mu=-2.0, delta=0.0, L=6))
        assert abs(state.amplitudes[0]) == pytest.approx(1.0, abs=1e-14)

    def test_energy_l8(self):
        params = ModelParams(mu=0.5, alpha=2.0, L=8)
        energy, variance = energy_moments(build_ground_state(params), params)
        assert energy == pytest.approx(solve(params).ground_energy, abs=1e-10)
        assert variance <= 1e-18 * solve(params).epsilon.sum() ** 2

    def test_is_eigenstate_and_lowest(self):
        params = ModelParams(mu=0.3, alpha=1.4, delta=0.8, L=6)
        H = hamiltonian(params).toarray()
        assert np.allclose(H, H.conj().T)
        lowest = np.linalg.eigvalsh(H)[0]
        assert lowest == pytest.approx(solve(params).ground_energy, abs=1e-10)

    @pytest.mark.parametrize("L", [4, 6, 8])
    def test_eigenstate_random(self, L):
        rng = np.random.default_rng(L)
        for _ in range(10):
            params = random_params(rng, L)
            state = build_ground_state(params)
            energy, variance = energy_moments(state, params)
            eps_sum = solve(params).epsilon.sum()
            assert energy == pytest.approx(-0.5 * eps_sum, abs=1e-10)
            assert variance <= 1e-18 * eps_sum ** 2
            assert state.norm == pytest.approx(1.0, abs=1e-12)
            assert parity(state) == pytest.approx(1.0, abs=1e-12)

    def test_momentum_occupation(self):
        params = ModelParams(mu=0.4, alpha=0.9, delta=1.3, L=8)
        occ = momentum_occupation(build_ground_state(params), params)
        np.testing.assert_allclose(occ, np.sin(solve(params).theta / 2) ** 2, atol=1e-10)

    def test_size_limit(self):
        with pytest.raises(ParameterError):
            build_ground_state(ModelParams(L=16))
        with pytest.raises(ParameterError):
            brute_force_qfi(ModelParams(L=14), X)


class TestStringOperators:
    def test_square_is_identity(self):
        rng = np.random.default_rng(0)
        psi = rng.normal(size=64) + 1j * rng.normal(size=64)
        for kind in ALL_KINDS:
            for j in range(1, 7):
                op = string_operator(6, kind, j)
                np.testing.assert_allclose(op @ (op @ psi), psi, atol=1e-13)

    def test_hermitian(self):
        for kind in ALL_KINDS:
            op = string_operator(6, kind, 4).toarray()
            np.testing.assert_allclose(op, op.conj().T, atol=0)

    def test_first_site_on_vacuum(self):
        out = apply_string_operator(_state(2), X, 1)
        np.testing.assert_allclose(out.amplitudes, _state(2, (1,)).amplitudes)

    def test_site_range(self):
        with pytest.raises(ParameterError):
            string_operator(4, X, 0)

    def test_anticommutation(self):
        a = annihilators(4)
        for i in range(4):
            for j in range(4):
                anti = (a[i] @ a[j].T + a[j].T @ a[i]).toarray()
                np.testing.assert_allclose(anti, np.eye(16) * (i == j), atol=0)

    def test_zero_mean(self):
        rng = np.random.default_rng(4)
        params = random_params(rng, 8)
        state = build_ground_state(params)
        for kind in ALL_KINDS:
            for j in range(1, 9):
                assert abs(state.expectation(string_operator(8, kind, j))) < 1e-12


class TestQfi:
    def test_product(self):
        for kind in ALL_KINDS:
            assert brute_force_qfi(ModelParams(mu=2.0, delta=0.0, L=6), kind).fisher_density == pytest.approx(1.0, abs=1e-12)

    def test_saturation(self):
        assert brute_force_qfi(ModelParams(mu=0.0, alpha=1000.0, L=8), X).fisher_density == pytest.approx(8.0, abs=1e-10)

    def test_matches_determinants(self):
        params = ModelParams(mu=-1.0, alpha=0.5, L=8)
        profiles = correlation_profiles(kernel_for(params))
        for kind in ALL_KINDS:
            ref = brute_force_qfi(params, kind)
            np.testing.assert_allclose(ref.correlations, profiles[kind].c, atol=1e-10)
            assert ref.fisher_density == pytest.approx(profiles[kind].fisher_density, abs=1e-10)

    def test_majorana_contractions(self):
        params = ModelParams(mu=0.5, alpha=2.0, L=8)
        G = majorana_contractions(build_ground_state(params))
        kernel = kernel_for(params)
        for m in range(8):
            for n in range(8):
                assert G[m, n] == pytest.approx(kernel(n - m), abs=1e-10)

    def test_oracle_check_report(self):
        report = oracle_check(ModelParams(mu=0.5, alpha=2.0, L=6))
        assert set(report) == {"energy_error", "energy_variance", "norm_error", "parity_error",
                               "correlation_error", "fisher_density_error", "mean_error"}
        assert max(report.values()) < 1e-10
