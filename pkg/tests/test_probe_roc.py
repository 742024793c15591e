import math

import numpy as np
import pytest

from app.errors import DomainError
from app.models.probe import CovarianceMatrix2Mode, ThreeQubitState
from app.schemas.probe import LossChannelPair, RocCurve
from app.services.linalg import jacobi_eigh
from app.services.probe_roc import (
    build_output_states,
    classical_alpha,
    classical_beta,
    classical_fidelity,
    classical_roc,
    diagonal_form,
    diagonalizing_params,
    endpoint_schemes,
    helstrom_errors,
    lower_convex_hull,
    mixture_fidelity_candidate,
    quantum_roc,
    roc_lookup,
    swap_modes,
    tmsv_output_covariance,
    two_mode_squeezing_symplectic,
    weight_grid,
)


def _diag_state(values) -> ThreeQubitState:
    entries = np.zeros((8, 8))
    entries[np.arange(len(values)), np.arange(len(values))] = values
    return ThreeQubitState(entries=entries)


class TestClassicalProbe:
    """코히어런트 탐침 충실도와 α(β) 곡선"""

    def test_identical_channels(self):
        assert classical_fidelity(LossChannelPair(tau0=0.5, tau1=0.5, mean_photons=8)) == 1.0

    def test_zero_energy_probe(self):
        assert classical_fidelity(LossChannelPair(tau0=0.95, tau1=0.4, mean_photons=0)) == 1.0

    def test_default_pair_fidelity(self, default_pair):
        """F ≈ 0.626, F² ≈ 0.3918"""
        f = classical_fidelity(default_pair)
        assert f == pytest.approx(0.62594, abs=1e-3)
        assert f * f == pytest.approx(0.3918, abs=1e-3)

    def test_alpha_endpoints(self, default_pair):
        f = classical_fidelity(default_pair)
        assert classical_alpha(f * f, f) == pytest.approx(0.0, abs=1e-12)
        assert classical_alpha(0.0, f) == pytest.approx(f * f, abs=1e-15)

    def test_alpha_at_quoted_beta(self):
        assert classical_alpha(0.1899, 0.62594) == pytest.approx(0.05, abs=5e-4)

    def test_beta_endpoints(self, default_pair):
        """β(0) ∈ [0.3913, 0.3923], β(0.05) ∈ [0.1889, 0.1909]"""
        f = classical_fidelity(default_pair)
        assert 0.3913 <= classical_beta(0.0, f) <= 0.3923
        assert 0.1889 <= classical_beta(0.05, f) <= 0.1909
        assert classical_beta(f * f, f) == pytest.approx(0.0, abs=1e-12)

    def test_mutual_inverses(self, default_pair):
        f = classical_fidelity(default_pair)
        for alpha in np.linspace(0.0, f * f, 41):
            assert classical_alpha(classical_beta(alpha, f), f) == pytest.approx(alpha, abs=1e-10)
        for beta in np.linspace(0.0, 0.9 * f * f, 41):
            assert classical_beta(classical_alpha(beta, f), f) == pytest.approx(beta, abs=1e-9)

    def test_out_of_branch_rejected(self, default_pair):
        f = classical_fidelity(default_pair)
        with pytest.raises(DomainError, match="단조 분기"):
            classical_alpha(f * f + 0.01, f)
        with pytest.raises(DomainError):
            classical_beta(-0.01, f)

    def test_mixture_candidates_never_beat_coherent_probe(self, default_pair):
        """두 점 혼합 탐침의 충실도 ≥ χ^m"""
        f = classical_fidelity(default_pair)
        rng = np.random.default_rng(7)
        n0 = rng.uniform(0.0, default_pair.mean_photons, 10_000)
        p0 = rng.uniform(0.0, 1.0, 10_000)
        for n, p in zip(n0, p0):
            assert mixture_fidelity_candidate(n, p, default_pair) >= f - 1e-12

    def test_mixture_candidate_examples(self, default_pair):
        chi = classical_fidelity(default_pair) ** (1 / 8)
        assert mixture_fidelity_candidate(8.0, 0.0, default_pair) == pytest.approx(chi ** 8)
        assert mixture_fidelity_candidate(0.0, 0.5, default_pair) == pytest.approx(0.5 + 0.5 * chi ** 16)
        assert mixture_fidelity_candidate(4.0, 0.5, default_pair) == pytest.approx(chi ** 4 * (0.5 + 0.5 * chi ** 8))

    def test_mixture_candidate_n0_above_m(self, default_pair):
        with pytest.raises(DomainError, match="n0"):
            mixture_fidelity_candidate(9.0, 0.2, default_pair)

    def test_classical_roc_is_monotone(self, default_pair):
        curve = classical_roc(default_pair, 0.05, 101)
        assert curve.kind == "classical-optimal-lower-bound"
        assert len(curve.points) == 101
        assert curve.points[0][0] == 0.0
        assert curve.points[-1][0] == pytest.approx(0.05)


class TestCovarianceAndDiagonalization:
    """TMSV 출력 공분산 행렬과 대각화"""

    def test_lossless_is_pure(self):
        cov = tmsv_output_covariance(1.0, 3.0)
        nu_minus, nu_plus = cov.symplectic_eigenvalues()
        assert nu_minus == pytest.approx(1.0, abs=1e-9)
        assert nu_plus == pytest.approx(1.0, abs=1e-9)
        assert cov.is_bona_fide()

    def test_half_loss_blocks(self):
        v = tmsv_output_covariance(0.5, 1.0).entries
        assert np.allclose(v[:2, :2], 3 * np.eye(2))
        assert np.allclose(v[2:, 2:], 2 * np.eye(2))
        assert np.allclose(v[:2, 2:], 2 * np.diag([1.0, -1.0]))

    def test_default_pair_blocks(self):
        v = tmsv_output_covariance(0.4, 8.0).entries
        assert v[0, 0] == pytest.approx(17.0)
        assert v[2, 2] == pytest.approx(7.4)
        assert v[0, 2] == pytest.approx(2 * math.sqrt(28.8))
        assert v[1, 3] == pytest.approx(-2 * math.sqrt(28.8))

    def test_half_loss_symplectic_eigenvalues(self):
        """Δ = A² + B² − 2C² = 5, det V = 4 → ν = {1, 2}"""
        cov = CovarianceMatrix2Mode(entries=tmsv_output_covariance(0.5, 1.0).entries)
        nu_minus, nu_plus = cov.symplectic_eigenvalues()
        assert nu_minus == pytest.approx(1.0, abs=1e-12)
        assert nu_plus == pytest.approx(2.0, abs=1e-12)
        assert cov.delta_invariant() == pytest.approx(nu_minus ** 2 + nu_plus ** 2)

    def test_thermal_photons(self, default_pair):
        """n̄ᵢ = m(1−τᵢ)"""
        params = diagonalizing_params(default_pair)
        assert params.nbar0 == pytest.approx(0.4, abs=1e-9)
        assert params.nbar1 == pytest.approx(4.8, abs=1e-9)

    def test_lossless_thermal_photons(self):
        params = diagonalizing_params(LossChannelPair(tau0=1.0, tau1=0.5, mean_photons=1.0))
        assert params.nbar0 == pytest.approx(0.0, abs=1e-9)
        assert params.nbar1 == pytest.approx(0.5, abs=1e-9)

    def test_squeezing_parameters(self, default_pair):
        params = diagonalizing_params(default_pair)
        assert params.r0 == pytest.approx(1.582, abs=2e-3)
        assert params.r1 == pytest.approx(0.687, abs=2e-3)
        assert params.r == pytest.approx(params.r0 - params.r1)
        assert params.y ** 2 == pytest.approx(0.4907, abs=1e-3)

    def test_symplectic_reconstruction(self, default_pair):
        """S(rᵢ) diag S(rᵢ)ᵀ = V^out, 모드 교환 후 diag(1,1,ν,ν)"""
        params = diagonalizing_params(default_pair)
        for tau, nbar, r in ((0.95, params.nbar0, params.r0), (0.4, params.nbar1, params.r1)):
            v = tmsv_output_covariance(tau, 8.0).entries
            s = two_mode_squeezing_symplectic(r)
            assert np.abs(s @ diagonal_form(nbar) @ s.T - v).max() < 1e-9
            s_inv = two_mode_squeezing_symplectic(-r)
            nu = 2 * nbar + 1
            assert np.abs(swap_modes(s_inv @ v @ s_inv.T) - np.diag([1.0, 1.0, nu, nu])).max() < 1e-9


class TestOutputStates:
    """3-큐비트 축약 상태"""

    def test_a_one_channel0(self, default_pair):
        rho0, _ = build_output_states(default_pair, 1.0)
        x0 = 1 / 1.4
        expected = np.zeros(8)
        expected[:2] = [x0, 1 - x0]
        assert np.allclose(rho0.entries, np.diag(expected), atol=1e-15)

    def test_a_one_channel1_vacuum_entry(self, default_pair):
        _, rho1 = build_output_states(default_pair, 1.0)
        assert rho1.entries[0, 0] == pytest.approx(0.0846, abs=1e-3)

    def test_random_states_are_valid(self):
        """무작위 (채널 쌍, a) 100개: 대각합, PSD, 대각화 잔차"""
        rng = np.random.default_rng(2024)
        for _ in range(100):
            pair = LossChannelPair(
                tau0=float(rng.uniform(0.1, 1.0)),
                tau1=float(rng.uniform(0.1, 1.0)),
                mean_photons=float(rng.uniform(0.5, 12.0)),
            )
            a = float(rng.uniform(0.0, 1.0))
            for state in build_output_states(pair, a):
                assert abs(state.trace - 1.0) < 1e-12
                assert jacobi_eigh(state.entries)[0].min() > -1e-10
                assert state.nonzero_count() <= 9

    def test_sparsity_at_endpoints(self, default_pair):
        for a in (0.0, 1.0):
            for state in build_output_states(default_pair, a):
                assert state.nonzero_count() <= 4

    def test_a_out_of_range(self, default_pair):
        with pytest.raises(DomainError):
            build_output_states(default_pair, 1.5)


class TestHelstrom:
    """Helstrom 측정 오류"""

    def test_identical_states_b_zero(self, default_pair):
        rho, _ = build_output_states(default_pair, 0.3)
        assert helstrom_errors(rho, rho, 0.0) == (pytest.approx(1.0), pytest.approx(0.0))

    def test_orthogonal_states(self):
        alpha, beta = helstrom_errors(_diag_state([1.0, 0.0]), _diag_state([0.0, 1.0]), 0.5)
        assert alpha == pytest.approx(0.0, abs=1e-15)
        assert beta == pytest.approx(0.0, abs=1e-15)

    def test_commuting_states(self):
        alpha, beta = helstrom_errors(_diag_state([0.6, 0.4]), _diag_state([0.2, 0.8]), 0.5)
        assert alpha == pytest.approx(0.4, abs=1e-12)
        assert beta == pytest.approx(0.2, abs=1e-12)

    def test_monotone_in_weight(self, default_pair):
        """b가 커질수록 α는 줄고 β는 늘어난다"""
        rho0, rho1 = build_output_states(default_pair, 0.6)
        errors = [helstrom_errors(rho0, rho1, b) for b in np.linspace(0.0, 1.0, 101)]
        alphas = np.array([e[0] for e in errors])
        betas = np.array([e[1] for e in errors])
        assert np.all(np.diff(alphas) <= 1e-12)
        assert np.all(np.diff(betas) >= -1e-12)

    def test_counting_rule_at_a_one(self, default_pair):
        """a=1, b=1: 모드1 진공이면 C₀ → (0, x₁y²/(1−(1−x₁)y²))"""
        params = diagonalizing_params(default_pair)
        x1, y2 = params.x1, params.y ** 2
        rho0, rho1 = build_output_states(default_pair, 1.0)
        alpha, beta = helstrom_errors(rho0, rho1, 1.0)
        assert alpha == pytest.approx(0.0, abs=1e-12)
        assert beta == pytest.approx(x1 * y2 + (1 - x1) * x1 * y2 ** 2 / (1 - (1 - x1) * y2), abs=1e-12)


class TestQuantumRoc:
    """양자 달성 ROC"""

    def test_weight_grid_dense_near_ends(self):
        grid = weight_grid(64)
        assert grid[0] == 0.0 and grid[-1] == 1.0
        assert np.all(np.diff(grid) > 0)
        assert np.sum(grid < 1e-3) > 3
        assert np.sum(grid > 1 - 1e-3) > 3

    def test_hull_is_order_independent(self, rng):
        cloud = rng.uniform(0.0, 1.0, size=(300, 2))
        assert lower_convex_hull(cloud) == lower_convex_hull(cloud[rng.permutation(300)])

    def test_hull_drops_points_above(self):
        hull = lower_convex_hull([(0.0, 1.0), (0.5, 0.9), (0.5, 0.4), (1.0, 0.0), (0.2, 0.9)])
        assert hull == [(0.0, 1.0), (0.5, 0.4), (1.0, 0.0)]

    def test_coarse_grid_dominates_classical(self, default_pair):
        """64×64 격자에서도 β_quantum(α) < β_classical(α)"""
        quantum = quantum_roc(default_pair, 64, 64, alpha_max=0.05)
        classical = classical_roc(default_pair, 0.05, 101)
        assert quantum.alpha_min == 0.0
        assert quantum.alpha_max == pytest.approx(0.05)
        assert 0.138 <= roc_lookup(quantum, 0.0) <= 0.146
        for alpha in np.linspace(0.0, 0.05, 101):
            assert roc_lookup(quantum, alpha) < roc_lookup(classical, alpha)

    def test_hull_below_counting_chord(self, default_pair):
        """광자 계수 두 방식의 시분할 직선보다 아래"""
        quantum = quantum_roc(default_pair, 64, 64, alpha_max=0.05)
        chord = endpoint_schemes(default_pair)
        assert chord.kind == "time-sharing"
        for alpha, beta in quantum.points:
            assert beta <= roc_lookup(chord, alpha) + 1e-12

    def test_hull_reaching_zero_extends_to_alpha_max(self):
        """β가 α_max 전에 0에 닿아도 곡선 정의역은 [0, α_max]"""
        pair = LossChannelPair(tau0=1.0, tau1=0.01, mean_photons=50)
        quantum = quantum_roc(pair, 32, 32, alpha_max=0.05)
        assert quantum.alpha_max == pytest.approx(0.05)
        assert roc_lookup(quantum, 0.05) == pytest.approx(0.0, abs=1e-6)
        assert quantum.points[-2][1] == quantum.points[-1][1]

    def test_explicit_zero_grid_rejected(self, default_pair):
        """격자 크기 0은 기본값으로 바뀌지 않고 거부"""
        with pytest.raises(DomainError, match="격자 크기"):
            quantum_roc(default_pair, 0, 64)
        with pytest.raises(DomainError, match="격자 크기"):
            quantum_roc(default_pair, 64, 0)

    def test_endpoint_schemes(self, default_pair):
        params = diagonalizing_params(default_pair)
        y2 = params.y ** 2
        (a0, b0), (a1, b1) = endpoint_schemes(default_pair).points
        assert (a0, b1) == (0.0, 0.0)
        assert b0 == pytest.approx(0.1424, abs=1e-3)
        assert a1 == pytest.approx(params.x0 * y2 / (1 - (1 - params.x0) * y2))

    @pytest.mark.slow
    def test_full_grid_endpoints(self, default_pair):
        """512×512 격자: β(0) ∈ [0.138, 0.146], β(0.05) ∈ [0.105, 0.116]"""
        quantum = quantum_roc(default_pair, 512, 512, alpha_max=0.05)
        classical = classical_roc(default_pair, 0.05, 101)
        assert 0.138 <= roc_lookup(quantum, 0.0) <= 0.146
        assert 0.105 <= roc_lookup(quantum, 0.05) <= 0.116
        for alpha in np.linspace(0.0, 0.05, 101):
            assert roc_lookup(quantum, alpha) < roc_lookup(classical, alpha)


class TestRocLookup:
    def test_exact_point(self):
        curve = RocCurve(kind="time-sharing", points=[(0.0, 0.4), (0.1, 0.2)])
        assert roc_lookup(curve, 0.1) == pytest.approx(0.2)

    def test_midpoint(self):
        curve = RocCurve(kind="time-sharing", points=[(0.0, 0.4), (0.1, 0.2)])
        assert roc_lookup(curve, 0.05) == pytest.approx(0.3)

    def test_classical_lookup_matches_formula(self, default_pair):
        curve = classical_roc(default_pair, 0.05, 101)
        f = classical_fidelity(default_pair)
        assert roc_lookup(curve, 0.025) == pytest.approx(classical_beta(0.025, f), abs=1e-4)

    def test_outside_domain(self):
        curve = RocCurve(kind="time-sharing", points=[(0.0, 0.4), (0.1, 0.2)])
        with pytest.raises(DomainError, match="정의역"):
            roc_lookup(curve, 0.2)

    def test_curve_rejects_increasing_beta(self):
        with pytest.raises(ValueError):
            RocCurve(kind="time-sharing", points=[(0.0, 0.2), (0.1, 0.3)])
