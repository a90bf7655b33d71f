import math

import numpy as np
import pytest
from scipy.special import comb

from gbscorr import (
    GaussianState,
    JointPhotonDistribution,
    NumericalDomainError,
    ParameterError,
    UnsupportedFeatureError,
    convergence_profile,
    correlator_from_distribution,
    correlator_no_displacement,
    evolve,
    gaussian_fourth_moment,
    joint_photon_distribution,
    make_coherent,
    make_squeezed_vacuum,
    make_thermal,
    reduce_two_modes,
    variance_from_distribution,
    wick_correlator,
)
from gbscorr.gaussian import ladder_moment_matrices
from gbscorr.interferometer import ReducedTwoModeState

from conftest import R_ONE, beamsplitter, random_two_mode_state, random_unitary


def reduced(state, j=0, k=1):
    return reduce_two_modes(state, j, k)


def squeezed_row(r, n_max):
    """P(m, 0) for squeezed vacuum from its Fock expansion."""
    p = np.zeros(n_max + 1)
    for n in range(n_max // 2 + 1):
        p[2 * n] = math.tanh(r) ** (2 * n) * math.factorial(2 * n) / (math.factorial(n) ** 2 * 4**n) / math.cosh(r)
    return p


def beamsplitter_brute_force(r, n_max):
    """Squeezed vacuum through a 50:50 splitter: m photons split binomially."""
    row = squeezed_row(r, 2 * n_max + 2)
    P = np.zeros((n_max + 1, n_max + 1))
    for a in range(n_max + 1):
        for b in range(n_max + 1):
            m = a + b
            P[a, b] = row[m] * comb(m, a) / 2**m
    return P


class TestDistribution:
    def test_vacuum(self):
        dist = joint_photon_distribution(reduced(GaussianState.vacuum(3)), 5)
        expected = np.zeros((6, 6))
        expected[0, 0] = 1
        assert np.allclose(dist.probabilities, expected, atol=1e-15)

    def test_squeezed_series(self):
        dist = joint_photon_distribution(reduced(make_squeezed_vacuum(R_ONE, 2, 1)), 12)
        P = dist.probabilities
        assert P[0, 0] == pytest.approx(1 / math.sqrt(2), rel=1e-12)
        assert P[2, 0] == pytest.approx(0.17678, abs=1e-5)
        assert np.allclose(P[:, 0], squeezed_row(R_ONE, 12), atol=1e-14)
        assert np.all(P[1::2, :] == 0) and np.all(P[:, 1:] == 0)

    def test_thermal_geometric(self):
        P = joint_photon_distribution(reduced(make_thermal(1.0, 2, 1)), 15).probabilities
        assert np.allclose(P[:, 0], 0.5 ** (np.arange(16) + 1), rtol=1e-12, atol=0)

    def test_beamsplitter_matches_brute_force(self):
        state = evolve(make_squeezed_vacuum(R_ONE, 2, 1), beamsplitter())
        P = joint_photon_distribution(reduced(state), 20).probabilities
        assert np.allclose(P, beamsplitter_brute_force(R_ONE, 20), atol=1e-13)

    def test_captured_mass(self, rng):
        for _ in range(5):
            U = random_unitary(4, rng)
            state = evolve(make_squeezed_vacuum(R_ONE, 4, 2), U)
            assert joint_photon_distribution(reduced(state), 40).captured_mass >= 1 - 1e-6

    def test_parity_of_squeezed_products(self):
        state = make_squeezed_vacuum(0.9, 3, 2)
        P = joint_photon_distribution(reduced(state), 10).probabilities
        n = np.arange(11) % 2
        odd = (n[:, None] + n[None, :]) > 0
        assert np.abs(P[odd]).max() < 1e-14
        assert P[2, 2] > 1e-3

    def test_marginals(self, rng):
        state = random_two_mode_state(rng)
        dist = joint_photon_distribution(reduced(state), 30)
        p1, p2 = dist.marginals()
        assert p1.sum() == pytest.approx(dist.captured_mass)
        assert p2.sum() == pytest.approx(dist.captured_mass)
        # single-mode marginal of a Gaussian state: check against its own cutoff grid
        small = dist.truncate(10)
        assert np.allclose(small.probabilities, dist.probabilities[:11, :11])

    def test_displaced_rejected(self):
        with pytest.raises(UnsupportedFeatureError):
            joint_photon_distribution(reduced(make_coherent(0.5, 2, 1)), 4)

    def test_bad_cutoff(self):
        with pytest.raises(ParameterError):
            joint_photon_distribution(reduced(GaussianState.vacuum(2)), -1)
        with pytest.raises(ParameterError):
            joint_photon_distribution(reduced(GaussianState.vacuum(2)), 5).truncate(7)

    def test_grid_shape_checked(self):
        with pytest.raises(ParameterError):
            JointPhotonDistribution(2, np.zeros((2, 2)))


class TestTruncatedCorrelator:
    def test_vacuum(self):
        dist = joint_photon_distribution(reduced(GaussianState.vacuum(2)), 6)
        assert correlator_from_distribution(dist) == 0

    def test_product_distribution(self):
        p1 = 0.5 ** np.arange(1, 9)
        p1 /= p1.sum()
        p2 = np.exp(-np.arange(8.0))
        dist = JointPhotonDistribution(7, np.outer(p1, p2 / p2.sum()))
        assert abs(correlator_from_distribution(dist)) < 1e-12

    def test_empty_distribution_rejected(self):
        with pytest.raises(ParameterError):
            correlator_from_distribution(JointPhotonDistribution(1, np.zeros((2, 2))))

    def test_beamsplitter_value(self):
        state = evolve(make_squeezed_vacuum(R_ONE, 2, 1), beamsplitter())
        dist = joint_photon_distribution(reduced(state), 40)
        assert correlator_from_distribution(dist) == pytest.approx(0.75, rel=1e-3)

    def test_random_networks_match_formula(self, rng):
        for M in (2, 4, 8):
            for _ in range(3):
                N = int(rng.integers(1, M + 1))
                r = math.asinh(math.sqrt(rng.uniform(0.1, 1.5)))
                state = make_squeezed_vacuum(r, M, N)
                U = random_unitary(M, rng)
                exact = correlator_no_displacement(state, U, 0, 1)
                dist = joint_photon_distribution(reduced(evolve(state, U)), 40)
                assert correlator_from_distribution(dist) == pytest.approx(exact, rel=1e-3)

    def test_variance_from_distribution(self):
        dist = joint_photon_distribution(reduced(make_thermal(1.0, 2, 1)), 60)
        assert variance_from_distribution(dist, 0) == pytest.approx(2.0, rel=1e-9)
        assert variance_from_distribution(dist, 1) == 0
        with pytest.raises(ParameterError):
            variance_from_distribution(dist, 2)


class TestConvergenceProfile:
    def test_small_photon_content_converges_early(self):
        state = evolve(make_squeezed_vacuum(0.05, 2, 1), beamsplitter())
        exact = correlator_no_displacement(make_squeezed_vacuum(0.05, 2, 1), beamsplitter(), 0, 1)
        prof = convergence_profile(reduced(state), exact, range(0, 11))
        assert prof.threshold_n_max is not None and prof.threshold_n_max <= 4
        assert len(prof.rows()) == 11

    def test_first_crossing(self):
        state = evolve(make_squeezed_vacuum(R_ONE, 2, 1), beamsplitter())
        prof = convergence_profile(reduced(state), 0.75, [40, 5, 20, 10])
        assert prof.n_max == (5, 10, 20, 40)
        first = next(n for n, _, d in prof.rows() if abs(d) < 1e-3)
        assert prof.threshold_n_max == first
        assert abs(prof.relative_distance[-1]) < 1e-3

    def test_zero_exact_value(self):
        with pytest.raises(NumericalDomainError):
            convergence_profile(reduced(GaussianState.vacuum(2)), 0.0, [3])

    def test_no_cutoffs(self):
        with pytest.raises(ParameterError):
            convergence_profile(reduced(GaussianState.vacuum(2)), 1.0, [])


class TestFourthMoment:
    def test_vacuum(self):
        aa, n = ladder_moment_matrices(GaussianState.vacuum(1))
        a_adag = n.conj() + 1
        assert gaussian_fourth_moment(aa.conj(), aa, n, a_adag, 0, 0, 0, 0) == 0

    def test_squeezed_variance(self):
        r = R_ONE
        state = make_squeezed_vacuum(r, 1, 1)
        aa, n = ladder_moment_matrices(state)
        value = gaussian_fourth_moment(aa.conj(), aa, n, n.conj() + 1, 0, 0, 0, 0)
        s2, c2 = math.sinh(r) ** 2, math.cosh(r) ** 2
        assert value.real == pytest.approx(s2 * c2 + s2 * s2 + s2 * (s2 + 1), rel=1e-12)
        assert wick_correlator(state, 0, 0) == pytest.approx(4.0, rel=1e-12)

    def test_thermal_variance(self):
        state = make_thermal(1.0, 2, 1)
        assert wick_correlator(state, 0, 0) == pytest.approx(2.0, rel=1e-12)
        dist = joint_photon_distribution(reduced(state), 60)
        assert variance_from_distribution(dist, 0) == pytest.approx(2.0, rel=1e-3)

    def test_random_two_mode_states(self, rng):
        for _ in range(5):
            state = random_two_mode_state(rng)
            dist = joint_photon_distribution(reduce_two_modes(state, 0, 1), 40)
            assert wick_correlator(state, 0, 1) == pytest.approx(correlator_from_distribution(dist), rel=1e-3)
            assert wick_correlator(state, 0, 0) == pytest.approx(variance_from_distribution(dist, 0), rel=1e-3)

    def test_displaced_rejected(self):
        with pytest.raises(UnsupportedFeatureError):
            wick_correlator(make_coherent(1.0, 2, 1), 0, 1)

    def test_reduced_state_validated(self):
        with pytest.raises(ParameterError):
            ReducedTwoModeState(np.eye(4) * 0.5, np.zeros(4), (0, 1))
