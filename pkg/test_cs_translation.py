import cmath
import dataclasses
import math

import numpy as np
import pytest

import cs_translation
from cs_translation import DisplayForm
from cs_translation import TranslationParams
from errors import NotMonotoneError
from errors import OutOfDomainError
from errors import OutOfRangeError
from numerics import Transform
from numerics import integrate_real_line


@pytest.fixture
def default_params():
    return TranslationParams(alpha=1.0, s=1.0, gamma=0.0, epsilon=0.5)


class TestCoefficient:
    def test_value(self, default_params):
        assert cs_translation.coefficient_C(1.0, default_params) == (
            pytest.approx(math.exp(0.375), rel=1e-15)
        )

    def test_zero_below_cutoff(self, default_params):
        assert cs_translation.coefficient_C(0.25, default_params) == 0.0

    def test_small_alpha_limit(self):
        p = TranslationParams(alpha=1e-12, epsilon=0.5)
        energies = np.linspace(0.5, 10.0, 20)
        np.testing.assert_allclose(
            cs_translation.coefficient_C(energies, p), 1.0, atol=1e-10
        )


class TestKernel:
    def test_unit_label_is_real_gaussian(self, default_params):
        energies = np.linspace(0.0, 5.0, 51)
        values = cs_translation.kernel(energies, default_params)
        n = cs_translation.normalization(1.0, 1.0)
        np.testing.assert_allclose(values.imag, 0.0, atol=0)
        np.testing.assert_allclose(
            values.real, n * np.exp(-0.5 * energies**2), rtol=1e-14
        )

    def test_modulus_ignores_gamma(self, default_params):
        energies = np.linspace(0.0, 5.0, 51)
        phased = default_params.with_label(2.0, 1.3)
        plain = default_params.with_label(2.0, 0.0)
        np.testing.assert_allclose(
            np.abs(cs_translation.kernel(energies, phased)),
            np.abs(cs_translation.kernel(energies, plain)),
            rtol=1e-14,
        )

    def test_kernel_ignores_epsilon(self):
        energies = np.linspace(0.0, 6.0, 61)
        base = TranslationParams(alpha=0.8, s=1.7, gamma=0.4)
        expected = cs_translation.kernel(energies, base)
        for eps in (0.1, 0.5, 1.0):
            p = dataclasses.replace(base, epsilon=eps)
            np.testing.assert_array_equal(
                cs_translation.kernel(energies, p), expected
            )

    def test_eigen_residual_far_label_is_infinite(self):
        # the kernel underflows to zero on the whole grid
        p = TranslationParams(alpha=1.0, s=1e30)
        assert cs_translation.eigen_residual(p) == math.inf

    def test_eigen_residual_example(self):
        p = TranslationParams(alpha=1.0, s=2.0, gamma=0.7, epsilon=0.3)
        assert cs_translation.eigen_residual(p) < 1e-12

    def test_eigen_residual_random(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            p = TranslationParams(
                alpha=rng.uniform(0.3, 2.0),
                s=rng.uniform(0.3, 3.0),
                gamma=rng.uniform(0.0, 2 * math.pi),
                epsilon=rng.uniform(0.1, 1.0),
            )
            assert cs_translation.eigen_residual(p) < 1e-12, p

    def test_barut_girardello_eigenvalue(self):
        p = TranslationParams(s=1.7, gamma=0.4, epsilon=1.0)
        z = cs_translation.eigenvalue(p)
        assert z == pytest.approx(1.7 * cmath.exp(-0.4j), rel=1e-15)

    @pytest.mark.parametrize(
        "kwargs",
        [{"alpha": 0.0}, {"s": -1.0}, {"epsilon": 0.0}, {"omega": -1.0}],
    )
    def test_params_validation(self, kwargs):
        with pytest.raises(ValueError):
            TranslationParams(**kwargs)


class TestNormalization:
    def test_unit_label(self):
        n_sq = cs_translation.normalization(1.0, 1.0) ** 2
        assert n_sq == pytest.approx(2.0 / math.sqrt(math.pi), rel=1e-14)

    def test_label_e(self):
        n_sq = cs_translation.normalization(math.e, 1.0) ** 2
        integral = math.e * math.sqrt(math.pi) / 2 * (1 + math.erf(1.0))
        assert n_sq == pytest.approx(1.0 / integral, rel=1e-13)
        assert n_sq == pytest.approx(0.22527, abs=1e-5)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("s", [0.5, 1.0, 2.0, math.e])
    def test_quadrature_grid(self, s, alpha):
        assert cs_translation.normalization_residual(s, alpha) < 1e-8

    def test_zero_label_is_out_of_domain(self):
        with pytest.raises(OutOfDomainError):
            cs_translation.normalization(0.0, 1.0)

    def test_tolerance_reaches_the_quadrature(self, monkeypatch):
        seen = []
        original = cs_translation.norm

        def recording_norm(psi, spec=None):
            seen.append(spec)
            return original(psi, spec)

        monkeypatch.setattr(cs_translation, "norm", recording_norm)
        assert cs_translation.normalization_residual(2.0, 1.0, 1e-6) < 1e-5
        assert seen[-1].rel_tol == 1e-6
        assert seen[-1].transform is Transform.gaussian_centering

    def test_far_labels_stay_finite(self):
        assert math.isfinite(cs_translation.log_normalization_sq(1e-200, 1.0))
        assert math.isfinite(cs_translation.log_normalization_sq(1e200, 1.0))

    @pytest.mark.parametrize("s", [0.2, 0.5, 1.0])
    def test_reference_form_agrees_below_one(self, s):
        assert cs_translation.normalization_paper(s, 1.3) == pytest.approx(
            cs_translation.normalization(s, 1.3), rel=1e-12
        )

    def test_reference_form_disagrees_above_one(self):
        paper = cs_translation.normalization_paper(2.0, 1.0)
        exact = cs_translation.normalization(2.0, 1.0)
        assert abs(paper / exact - 1.0) > 1e-2


class TestMeasure:
    def test_unit_label(self):
        assert cs_translation.measure_sigma(1.0, 1.0) == pytest.approx(
            0.5, rel=1e-14
        )

    def test_vanishes_at_both_ends(self):
        assert cs_translation.measure_sigma(1e-4, 1.0) < 1e-30
        assert cs_translation.measure_sigma(1e4, 1.0) < 1e-3

    def test_h_tilde_is_a_density(self):
        result = integrate_real_line(
            lambda u: float(cs_translation.h_tilde(u, 0.7))
        )
        assert result.value == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize(
        "energy, tol", [(0.0, 1e-10), (1.0, 1e-9), (5.0, 1e-8)]
    )
    def test_moment_identity(self, energy, tol):
        assert cs_translation.moment_check(energy, 1.0) < tol

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("energy", [0.0, 0.5, 1.0, 2.0, 5.0])
    def test_moment_identity_via_measure(self, energy, alpha):
        assert (
            cs_translation.moment_check(energy, alpha, via_measure=True) < 1e-8
        )

    def test_moment_rejects_negative_energy(self):
        with pytest.raises(ValueError):
            cs_translation.moment_check(-1.0, 1.0)


class TestMeanEnergy:
    def test_unit_label(self):
        assert cs_translation.action_variable(1.0, 1.0) == pytest.approx(
            1.0 / math.sqrt(math.pi), rel=1e-15
        )

    def test_linear_in_omega(self):
        one = cs_translation.mean_energy(2.0, TranslationParams(omega=1.0))
        three = cs_translation.mean_energy(2.0, TranslationParams(omega=3.0))
        assert three == pytest.approx(3.0 * one, rel=1e-15)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
    def test_matches_quadrature(self, s, alpha):
        p = TranslationParams(alpha=alpha, s=s, gamma=0.3)
        assert cs_translation.mean_energy_quadrature(p) == pytest.approx(
            cs_translation.mean_energy(s, p), rel=1e-9
        )

    @pytest.mark.parametrize("s", [0.2, 0.5, 1.0])
    def test_reference_form_at_unit_alpha_below_one(self, s):
        assert cs_translation.mean_energy_paper(s, 1.0, 1.0) == pytest.approx(
            cs_translation.action_variable(s, 1.0), rel=1e-12
        )

    def test_reference_form_disagrees_elsewhere(self):
        paper = cs_translation.mean_energy_paper(2.0, 2.0, 1.0)
        exact = cs_translation.action_variable(2.0, 2.0)
        assert abs(paper / exact - 1.0) > 1e-2


class TestDerivative:
    def test_reference_value_at_unit_label(self):
        value = cs_translation.mean_energy_derivative(
            1.0, 1.0, 1.0, DisplayForm.paper
        )
        assert value == pytest.approx(1.0 + 2.0 / math.pi, abs=1e-9)

    def test_consistent_value_at_unit_label(self):
        value = cs_translation.mean_energy_derivative(1.0, 1.0, 1.0)
        assert value == pytest.approx(1.0 - 2.0 / math.pi, abs=1e-12)

    @pytest.mark.parametrize("s", [0.3, 1.0, 3.0])
    def test_matches_finite_differences(self, s):
        h = 1e-5 * s
        fd = (
            cs_translation.action_variable(s + h, 1.0)
            - cs_translation.action_variable(s - h, 1.0)
        ) / (2 * h)
        analytic = cs_translation.mean_energy_derivative(s, 1.0, 1.0)
        assert abs(analytic - fd) < 1e-6 * abs(analytic)

    @pytest.mark.parametrize("s", [0.1, 0.7, 4.0, 10.0])
    def test_equals_twice_the_variance(self, s):
        variance = cs_translation.energy_variance(s, 0.8)
        assert cs_translation.mean_energy_derivative(
            s, 0.8, 1.5
        ) == pytest.approx(2 * 1.5 * variance / s, rel=1e-10)

    def test_positive_on_log_grid(self):
        for s in np.geomspace(1e-3, 1e3, 200):
            assert cs_translation.mean_energy_derivative(s, 1.0, 1.0) > 0

    @pytest.mark.parametrize("alpha", [0.1, 1.0, 5.0])
    def test_certified_monotone(self, alpha):
        assert cs_translation.certify_monotone(alpha)


class TestActionInversion:
    def test_unit_label_round_trip(self):
        action = cs_translation.action_variable(1.0, 1.0)
        assert cs_translation.invert_action(action, 1.0) == pytest.approx(
            1.0, abs=1e-9
        )

    @pytest.mark.parametrize("s", [0.5, 2.0])
    def test_round_trip(self, s):
        action = cs_translation.action_variable(s, 1.0)
        assert cs_translation.invert_action(action, 1.0) == pytest.approx(
            s, rel=1e-8
        )

    @pytest.mark.parametrize("action", [0.6, 1.0, 2.0, 5.0])
    def test_action_identity(self, action):
        p = TranslationParams(alpha=1.0, gamma=0.9)
        psi = cs_translation.action_kernel(action, p)
        s = cs_translation.invert_action(action, 1.0)
        mean = cs_translation.mean_energy_quadrature(p.with_label(s))
        assert abs(mean / p.omega - action) < 1e-8
        energies = np.linspace(0.0, 10.0, 11)
        np.testing.assert_allclose(
            psi(energies), cs_translation.kernel(energies, p.with_label(s))
        )

    @pytest.mark.parametrize("action", [0.0, -1.0])
    def test_rejects_non_positive_action(self, action):
        with pytest.raises(OutOfRangeError):
            cs_translation.invert_action(action, 1.0)

    def test_refuses_uncertified_branch(self, monkeypatch):
        monkeypatch.setattr(
            cs_translation, "certify_monotone", lambda alpha: False
        )
        with pytest.raises(NotMonotoneError):
            cs_translation.invert_action(1.0, 1.0)


class TestContinuumProduct:
    @pytest.mark.parametrize("n", [10, 100, 1000])
    def test_exact_telescoping(self, n):
        assert cs_translation.product_limit_check(5.0, 1.0, n) < 1e-12

    def test_empty_target(self):
        assert cs_translation.product_limit_check(0.0, 1.0, 10) == 0.0

    def test_linearized_converges(self):
        residuals = [
            cs_translation.product_limit_check(2.0, 1.0, n, linearized=True)
            for n in (10, 100, 1000)
        ]
        assert residuals[0] > residuals[1] > residuals[2]
        assert residuals[2] < 1e-2

    def test_rejects_empty_product(self):
        with pytest.raises(ValueError):
            cs_translation.product_limit_check(1.0, 1.0, 0)

    def test_convergence_table(self):
        df = cs_translation.convergence_table(2.0, 1.0)
        assert df.columns == ["n", "exact_residual", "linearized_residual"]
        assert df["n"].to_list() == [10, 100, 1000]
        assert df["exact_residual"].max() < 1e-12
