import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gbscorr import (
    GaussianState,
    LossParameter,
    NoiseParameter,
    ParameterError,
    analytic_signatures,
    apply_loss,
    apply_noise,
    correlator_no_displacement,
    evolve,
    lossy_correlator_scale,
    make_coherent,
    make_squeezed_vacuum,
    make_thermal,
    purity,
    squeezing_threshold,
    transform_moments,
)
from gbscorr.channels import transform_variances

from conftest import R_ONE, beamsplitter, random_unitary


class TestParameters:
    @pytest.mark.parametrize("eta", [-0.1, 1.01, float("nan")])
    def test_bad_efficiency(self, eta):
        with pytest.raises(ParameterError):
            LossParameter(eta)

    @pytest.mark.parametrize("nu", [-1e-3, float("nan")])
    def test_bad_noise(self, nu):
        with pytest.raises(ParameterError):
            NoiseParameter(nu)

    def test_parameter_objects_accepted(self):
        s = make_thermal(1.0, 2, 1)
        assert np.allclose(apply_loss(s, LossParameter(0.5)).covariance, apply_loss(s, 0.5).covariance)
        assert np.allclose(apply_noise(s, NoiseParameter(0.5)).covariance, apply_noise(s, 0.5).covariance)


class TestLoss:
    def test_identity(self):
        s = make_squeezed_vacuum(0.8, 3, 2)
        assert np.array_equal(apply_loss(s, 1.0).covariance, s.covariance)

    def test_full_loss_gives_vacuum(self):
        s = apply_loss(make_coherent(2 - 1j, 3, 2), 0.0)
        assert np.allclose(s.covariance, np.eye(6)) and np.allclose(s.displacement, 0)

    def test_lossy_squeezed_purity(self):
        s = apply_loss(make_squeezed_vacuum(1.0, 1, 1), 0.5)
        expected = (4 * 0.25 * math.sinh(1.0) ** 2 + 1) ** -0.5
        assert purity(s) == pytest.approx(expected, rel=1e-12)
        assert purity(s) == pytest.approx(0.6481, abs=1e-4)

    def test_displacement_scaled(self):
        s = apply_loss(make_coherent(1.0, 1, 1), 0.25)
        assert np.allclose(s.complex_displacement, [0.5])

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0, 1), st.floats(0, 1))
    def test_composition(self, a, b):
        s = make_squeezed_vacuum(1.1, 2, 1)
        twice = apply_loss(apply_loss(s, a), b).covariance
        once = apply_loss(s, a * b).covariance
        assert np.allclose(twice, once, atol=1e-12, rtol=0)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(0, 2), st.floats(0, 1))
    def test_uncertainty_product(self, r, eta):
        vq, vp = apply_loss(make_squeezed_vacuum(r, 1, 1), eta).quadrature_variances()
        assert vq[0] * vp[0] == pytest.approx(4 * eta * (1 - eta) * math.sinh(r) ** 2 + 1, rel=1e-12)

    def test_correlator_scaling_law(self, rng):
        for _ in range(100):
            U = random_unitary(6, rng)
            r, eta = rng.uniform(0, 1.5), rng.uniform(0.05, 1)
            state = make_squeezed_vacuum(r, 6, 3)
            lossless = correlator_no_displacement(state, U, 0, 1)
            lossy = correlator_no_displacement(apply_loss(state, eta), U, 0, 1)
            assert lossy == pytest.approx(lossy_correlator_scale(eta) * lossless, rel=1e-12)

    def test_loss_before_or_after_network(self, rng):
        U = random_unitary(4, rng)
        s = make_squeezed_vacuum(0.7, 4, 2)
        before = evolve(apply_loss(s, 0.3), U).covariance
        after = apply_loss(evolve(s, U), 0.3).covariance
        assert np.allclose(before, after, atol=1e-12)

    def test_scale_values(self):
        assert lossy_correlator_scale(1.0) == 1
        assert lossy_correlator_scale(0.2) == pytest.approx(0.04)
        lossy = apply_loss(make_squeezed_vacuum(R_ONE, 2, 1), 0.5)
        assert correlator_no_displacement(lossy, beamsplitter(), 0, 1) == pytest.approx(0.1875, rel=1e-12)

    @pytest.mark.parametrize("eta", [0.05, 0.2, 0.5, 0.9])
    def test_signatures_invariant(self, eta):
        n, e = 1.0, math.sqrt(2)
        base = analytic_signatures(8, 2, n, e)
        lossy = analytic_signatures(8, 2, *transform_moments(n, e, eta=eta))
        assert lossy.nm == pytest.approx(eta**2 * base.nm, rel=1e-12)
        assert abs(lossy.cv - base.cv) < 1e-12
        assert abs(lossy.sk - base.sk) < 1e-12


class TestNoise:
    def test_identity(self):
        s = make_squeezed_vacuum(0.5, 1, 1)
        out = apply_noise(s, 0.0)
        vq, vp = out.quadrature_variances()
        assert vq[0] * vp[0] == pytest.approx(1.0)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(0, 1.5), st.floats(0, 2))
    def test_purity_under_noise(self, r, nu):
        vq, vp = apply_noise(make_squeezed_vacuum(r, 1, 1), nu).quadrature_variances()
        product = 1 + nu**2 + 2 * nu * math.cosh(2 * r)
        assert vq[0] * vp[0] == pytest.approx(product, rel=1e-12)

    def test_thermal_shift(self):
        out = apply_noise(make_thermal(1.0, 1, 1), 1.0)
        assert np.allclose(out.covariance, make_thermal(1.5, 1, 1).covariance)

    def test_vacuum_becomes_thermal(self):
        out = apply_noise(GaussianState.vacuum(3), 0.6)
        assert np.array_equal(out.covariance, make_thermal(0.3, 3, 3).covariance)

    def test_selected_modes(self):
        out = apply_noise(GaussianState.vacuum(3), 1.0, modes=[0, 2])
        assert np.allclose(np.diag(out.covariance), [2, 1, 2, 2, 1, 2])

    def test_bad_mode(self):
        with pytest.raises(ParameterError):
            apply_noise(GaussianState.vacuum(2), 0.5, modes=[2])

    def test_uniform_noise_leaves_cross_correlators(self, rng):
        U = random_unitary(5, rng)
        s = make_squeezed_vacuum(0.8, 5, 2)
        a = correlator_no_displacement(s, U, 0, 1)
        b = correlator_no_displacement(apply_noise(s, 0.7), U, 0, 1)
        assert a == pytest.approx(b, rel=1e-12)

    def test_occupied_noise_matches_moment_shift(self, rng):
        from gbscorr import CorrelatorInputs, correlator_identical_inputs

        U = random_unitary(6, rng)
        r, nu = 0.6, 0.4
        noisy = apply_noise(make_squeezed_vacuum(r, 6, 2), nu, modes=range(2))
        n, e = transform_moments(math.sinh(r) ** 2, math.sinh(2 * r) / 2, nu=nu)
        a = correlator_no_displacement(noisy, U, 0, 1)
        b = correlator_identical_inputs(CorrelatorInputs(n, e, 2, 6), U, 0, 1)
        assert a == pytest.approx(b, rel=1e-12)


class TestThreshold:
    def test_values(self):
        assert squeezing_threshold(0.0) == 0
        assert squeezing_threshold(0.5) == pytest.approx(0.3466, abs=1e-4)
        assert math.isinf(squeezing_threshold(1.0))
        assert math.isinf(squeezing_threshold(3.0))

    @pytest.mark.parametrize("nu", [0.1, 0.5, 0.9])
    def test_subvacuum_boundary(self, nu):
        r = squeezing_threshold(nu)
        assert math.exp(-2 * r) + nu == pytest.approx(1.0, rel=1e-12)


class TestTransforms:
    def test_moments_order(self):
        assert transform_moments(1.0, 1.0, eta=0.5, nu=0.2) == pytest.approx((0.6, 0.5))

    def test_variances(self):
        vq, vp = transform_variances(3.0, 1 / 3, eta=0.5, nu=0.1)
        assert vq == pytest.approx(2.1) and vp == pytest.approx(0.5 / 3 + 0.5 + 0.1)
