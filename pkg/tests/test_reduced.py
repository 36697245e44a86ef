"""Reduced-model evolution and the closed-form spectral quantities."""

import math
from fractions import Fraction

import numpy as np
import pytest

from kdwalk.combinatorics import ProblemParams, class_position
from kdwalk.reduced import (
    MODE_CLOSED,
    MODE_EXACT,
    asymptotic_success,
    build_reduced_walk,
    completeness_sum,
    compute_spectral_data,
    eigenphases,
    evolve_reduced,
    gap_constant,
    initial_reduced_state,
    marked_class_overlaps,
    nearest_int,
    numeric_eigenphase_multiset,
    numeric_marked_overlaps,
    predicted_eigenphase_multiset,
    principal_eigenvector_overlaps,
    principal_phase,
    principal_phase_numeric,
    probability_series,
    step_parameters,
    success_probability,
)

SAMPLE_PARAMS = [(8, 2), (20, 2), (20, 3), (50, 4), (200, 3), (5, 2), (8, 3)]


@pytest.mark.parametrize("n,k", SAMPLE_PARAMS)
def test_reflections_are_involutions(n, k):
    walk = build_reduced_walk(ProblemParams(n, k))
    eye = np.eye(walk.u.shape[0])
    for mat in (walk.u_alpha, walk.u_beta, walk.r_matrix):
        assert np.max(np.abs(mat @ mat - eye)) < 1e-12
        assert np.max(np.abs(mat - mat.T)) < 1e-12


def test_walk_entry_examples_n8():
    walk = build_reduced_walk(ProblemParams(8, 2))
    p00 = class_position(2, 0, 0)
    # alpha diagonal at (0,0): 1 - 2*2/4 = 0
    assert walk.u_alpha[p00, p00] == pytest.approx(0.0, abs=1e-15)
    # beta fixes (0,0): diagonal 1 - 2*0/5 = 1, no coupling (weight 0)
    assert walk.u_beta[p00, p00] == pytest.approx(1.0, abs=1e-15)
    assert np.max(np.abs(walk.u_beta[:, p00])) == pytest.approx(1.0, abs=1e-15)


def test_r_matrix_flips_only_marked_class():
    walk = build_reduced_walk(ProblemParams(8, 2))
    diag = np.diag(walk.r_matrix)
    assert diag[-1] == -1.0
    assert np.all(diag[:-1] == 1.0)
    assert np.max(np.abs(walk.r_matrix - np.diag(diag))) == 0.0


class TestInitialState:
    def test_amplitudes_n8(self):
        state = initial_reduced_state(ProblemParams(8, 2))
        assert abs(state[class_position(2, 2, 0)]) == pytest.approx(
            math.sqrt(60 / 280), abs=1e-15
        )
        assert abs(state[class_position(2, 1, 0)]) == pytest.approx(
            math.sqrt(120 / 280), abs=1e-15
        )

    @pytest.mark.parametrize("n,k", SAMPLE_PARAMS + [(10**6, 2)])
    def test_unit_norm(self, n, k):
        state = initial_reduced_state(ProblemParams(n, k))
        assert np.linalg.norm(state) == pytest.approx(1.0, abs=1e-14)

    def test_stationary_under_walk(self):
        # the uniform state is fixed by both reflections
        params = ProblemParams(20, 3)
        walk = build_reduced_walk(params)
        psi0 = initial_reduced_state(params)
        assert np.max(np.abs(walk.u_alpha @ psi0 - psi0)) < 1e-13
        assert np.max(np.abs(walk.u_beta @ psi0 - psi0)) < 1e-13


class TestStepParameters:
    def test_closed_n8(self):
        assert step_parameters(ProblemParams(8, 2), MODE_CLOSED) == (2, 2)

    def test_exact_t2_n8(self):
        # round(pi / arccos(-0.4)) = round(1.585) = 2
        _, t2 = step_parameters(ProblemParams(8, 2), MODE_EXACT)
        assert t2 == 2

    def test_closed_n10000(self):
        assert step_parameters(ProblemParams(10_000, 2), MODE_CLOSED) == (17, 24)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            step_parameters(ProblemParams(8, 2), "cleverest")

    def test_nearest_int_half_up(self):
        assert nearest_int(1.5) == 2
        assert nearest_int(2.4999) == 2
        with pytest.raises(ValueError):
            nearest_int(-0.5)


class TestEvolution:
    def test_zero_iterations_identity(self):
        params = ProblemParams(8, 2)
        walk = build_reduced_walk(params)
        psi0 = initial_reduced_state(params)
        out = evolve_reduced(walk, psi0, 0, 5)
        assert np.array_equal(out, psi0)

    def test_t2_zero_only_flips_marked(self):
        params = ProblemParams(8, 2)
        walk = build_reduced_walk(params)
        psi0 = initial_reduced_state(params)
        out = evolve_reduced(walk, psi0, 1, 0)
        expect = psi0.copy()
        expect[-1] *= -1
        assert np.max(np.abs(out - expect)) < 1e-15

    def test_matches_success_probability(self):
        params = ProblemParams(8, 2)
        walk = build_reduced_walk(params)
        final = evolve_reduced(walk, initial_reduced_state(params), 2, 2)
        assert abs(final[-1]) ** 2 == pytest.approx(
            success_probability(params, 2, 2), abs=1e-13
        )

    @pytest.mark.parametrize("n,k", SAMPLE_PARAMS)
    def test_norm_preserved(self, n, k):
        params = ProblemParams(n, k)
        walk = build_reduced_walk(params)
        t1, t2 = step_parameters(params)
        out = evolve_reduced(walk, initial_reduced_state(params), t1, t2)
        assert abs(np.linalg.norm(out) - 1.0) < 1e-12

    def test_probability_series_consistent(self):
        params = ProblemParams(1000, 2)
        t1, t2 = step_parameters(params, MODE_EXACT)
        series = probability_series(params, t2, t1)
        assert series[-1] == pytest.approx(success_probability(params, t1, t2), abs=1e-12)

    def test_norm_after_every_operator(self):
        params = ProblemParams(50, 3)
        walk = build_reduced_walk(params)
        state = initial_reduced_state(params)
        for _ in range(4):
            for mat in (walk.r_matrix, walk.u_alpha, walk.u_beta):
                state = mat @ state
                assert abs(np.linalg.norm(state) - 1.0) < 1e-12


class TestSuccessProbability:
    def test_t1_zero_is_marked_mass(self):
        params = ProblemParams(8, 2)
        assert success_probability(params, 0, 2) == pytest.approx(60 / 280, abs=1e-14)

    def test_large_n_closed_params(self):
        params = ProblemParams(10_000, 2)
        t1, t2 = step_parameters(params)
        assert success_probability(params, t1, t2) >= 0.95

    def test_in_unit_interval(self):
        params = ProblemParams(50, 3)
        for t1 in (0, 1, 5, 9):
            p = success_probability(params, t1, 3)
            assert -1e-12 <= p <= 1 + 1e-12

    def test_matches_sinusoidal_peak(self):
        # at the optimum the exact value tracks 1/(4b) = peak of the profile
        params = ProblemParams(10_000, 2)
        sd = compute_spectral_data(params)
        p = success_probability(params, sd.t1_exact, sd.t2_exact)
        assert p == pytest.approx(sd.p_succ_predicted, rel=10 / math.sqrt(params.r))


class TestEigenphases:
    def test_cosines_n8(self):
        phis = eigenphases(ProblemParams(8, 2))
        assert np.cos(phis[0]) == pytest.approx(0.2, abs=1e-14)
        assert np.cos(phis[1]) == pytest.approx(-0.4, abs=1e-14)

    @pytest.mark.parametrize("n", [8, 20, 50, 200, 500])
    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_spectrum_matches_diagonalization(self, n, k):
        try:
            params = ProblemParams(n, k)
        except ValueError:
            pytest.skip("invalid regime")
        if not params.strict_regime:
            pytest.skip("boundary regime")
        dev = np.max(
            np.abs(
                numeric_eigenphase_multiset(params)
                - predicted_eigenphase_multiset(params)
            )
        )
        assert dev < 1e-10

    def test_large_n_asymptotics(self):
        # phi_k ~ 2 sqrt(k) / sqrt(r) for r = n^(k/(k+1)) << n
        params = ProblemParams(10**6, 2)
        phis = eigenphases(params)
        assert phis[-1] == pytest.approx(2 * math.sqrt(2 / params.r), rel=0.02)

    def test_boundary_cosine_is_minus_one(self):
        # k = n - r pins cos(phi_k) at exactly -1; the guard k <= min(r, n-r)
        # provably keeps every cosine inside [-1, 1]
        phis = eigenphases(ProblemParams(12, 3, r=9))
        assert np.cos(phis[-1]) == pytest.approx(-1.0, abs=1e-14)

    def test_ascending(self):
        phis = eigenphases(ProblemParams(50, 4))
        assert np.all(np.diff(phis) > 0)


class TestOverlaps:
    def test_exact_values_n8(self):
        ov = marked_class_overlaps(ProblemParams(8, 2))
        assert ov[0] == pytest.approx(math.sqrt(3 / 14), abs=1e-15)
        assert ov[1] == pytest.approx(0.5, abs=1e-15)
        assert ov[2] == pytest.approx(math.sqrt(1 / 7), abs=1e-15)

    def test_overlap0_equals_initial_marked_amplitude(self):
        for n, k in [(8, 2), (200, 3), (10**5, 2)]:
            params = ProblemParams(n, k)
            ov = marked_class_overlaps(params)
            psi0 = initial_reduced_state(params)
            assert ov[0] == pytest.approx(abs(psi0[-1]), abs=1e-14)

    @pytest.mark.parametrize("n,k", [(8, 2), (20, 2), (20, 3), (50, 4), (200, 4)])
    def test_matches_numeric_eigenvectors(self, n, k):
        params = ProblemParams(n, k)
        dev = np.max(
            np.abs(numeric_marked_overlaps(params) - marked_class_overlaps(params))
        )
        assert dev < 1e-9

    @pytest.mark.parametrize("n,k", SAMPLE_PARAMS)
    def test_completeness(self, n, k):
        assert completeness_sum(ProblemParams(n, k)) == pytest.approx(1.0, abs=1e-10)

    def test_completeness_exact_n8(self):
        # 3/14 + 2/4 + 2/7 = 1
        assert Fraction(3, 14) + 2 * Fraction(1, 4) + 2 * Fraction(1, 7) == 1


class TestPrincipalPhase:
    def test_b_formula_n8(self):
        params = ProblemParams(8, 2)
        phis = eigenphases(params)
        expected_b = 0.25 / (1 - math.cos(2 * phis[0])) + (1 / 7) / (
            1 - math.cos(2 * phis[1])
        )
        _, b = principal_phase(params, 2)
        assert b == pytest.approx(expected_b, abs=1e-13)
        assert b == pytest.approx(675 / 3136, abs=1e-13)

    def test_lambda_defining_relation(self):
        params = ProblemParams(10**4, 2)
        lam, b = principal_phase(params, 23)
        ov = marked_class_overlaps(params)
        assert lam * math.sqrt(b) == pytest.approx(ov[0], abs=1e-14)

    def test_degenerate_denominator(self):
        with pytest.raises(ValueError):
            principal_phase(ProblemParams(8, 2), 0)

    def test_closed_matches_numeric_within_5_percent(self):
        params = ProblemParams(10**4, 2)
        _, t2 = step_parameters(params, MODE_EXACT)
        lam, _ = principal_phase(params, t2)
        lam_num = principal_phase_numeric(params, t2)
        assert abs(lam - lam_num) / lam_num < 0.05

    def test_eigenvector_overlap_predictions(self):
        # |<marked|lam>| -> 1/(2 sqrt(2b)), |<initial|lam>| -> 1/sqrt(2)
        params = ProblemParams(10**4, 2)
        sd = compute_spectral_data(params)
        k0_lam, psi0_lam = principal_eigenvector_overlaps(params, sd.t2_exact)
        assert k0_lam == pytest.approx(1 / (2 * math.sqrt(2 * sd.b)), rel=0.1)
        assert psi0_lam == pytest.approx(1 / math.sqrt(2), rel=10 / math.sqrt(params.r))

    def test_lambda_ratio_decreases_along_ladder(self):
        ratios = []
        for n in (10**3, 10**4, 10**5, 10**6):
            sd = compute_spectral_data(ProblemParams(n, 2))
            ratios.append(sd.lambda_ratio)
        assert all(a > b for a, b in zip(ratios, ratios[1:]))
        assert ratios[1] < 0.2  # validity flag from r >= 100 upward


class TestAsymptoticSuccess:
    def test_k2_value(self):
        params = ProblemParams(10_000, 2)
        expected = 1 - (2 / math.sqrt(464)) * (1 / math.tan(math.pi / (2 * math.sqrt(2)))) ** 2
        assert asymptotic_success(params) == pytest.approx(expected, abs=1e-14)

    def test_k3_value(self):
        params = ProblemParams(10**4, 3)  # r = 1000
        assert params.r == 1000
        expected = 1 - (3 / 1000 ** (1 / 3)) * (
            1 / math.tan((math.pi / 2) * math.sqrt(2 / 3))
        ) ** 2
        assert asymptotic_success(params) == pytest.approx(expected, abs=1e-14)

    def test_limit_is_one(self):
        assert gap_constant(2) > 0
        p_small = asymptotic_success(ProblemParams(10**4, 2))
        p_large = asymptotic_success(ProblemParams(10**6, 2))
        assert p_small < p_large < 1.0
        assert 1 - p_large < 0.006

    def test_clamped(self):
        # tiny r drives the two-term formula negative; output stays in [0, 1]
        assert asymptotic_success(ProblemParams(5, 2)) >= 0.0


class TestSinusoidalShape:
    def test_profile_fits_series(self):
        params = ProblemParams(10**4, 2)
        sd = compute_spectral_data(params)
        series = probability_series(params, sd.t2_exact, sd.t1_exact)
        ts = np.arange(1, sd.t1_exact + 1)
        profile = np.sin(sd.lam * ts) ** 2 / (4 * sd.b)
        assert np.max(np.abs(series - profile)) < 10 / math.sqrt(params.r)


def test_spectral_data_boundary_regime():
    # k = n - r: the empty class stays pinned at zero amplitude and the
    # spectral pipeline still runs (phi_k = pi exactly)
    sd = compute_spectral_data(ProblemParams(5, 2))
    assert sd.t2_exact == 1
    assert math.isfinite(sd.lam)


@pytest.mark.parametrize("n,k", [(8, 2), (5, 2), (10**4, 2), (10**6, 3)])
def test_predicted_probability_stays_in_unit_interval(n, k):
    # the raw sinusoid peak 1/(4b) exceeds 1 on small frames; the reported
    # prediction is clamped
    sd = compute_spectral_data(ProblemParams(n, k))
    assert 0.0 <= sd.p_succ_predicted <= 1.0
