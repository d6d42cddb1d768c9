"""Population quadrature oracles against frozen reference values.

The information values have closed forms for the bundled design
(24 ln 3 and 6 ln 3); everything else was frozen from converged
adaptive quadrature and cross-checked against the analytic component
identities noted inline.
"""

import math

import numpy as np
import pytest

from csreg import (
    ModelSpec,
    SingularInformationError,
    estimate_plugin,
    fisher_parametric,
    fisher_semiparametric,
    identifiability_integral,
    influence_representation_check,
    intercept_variance,
    population_score1,
    quadratic_error_law,
    score1_asymptotic_variance,
    score1_variance_components,
    simulate,
)


class TestInformation:
    def test_parametric_value(self, model):
        rep = fisher_parametric(model)
        assert rep.value == pytest.approx(24.0 * math.log(3.0), abs=1e-6)
        assert rep.value == pytest.approx(26.3667, abs=0.01)
        assert rep.quantity == "ip"

    def test_semiparametric_value(self, model):
        rep = fisher_semiparametric(model)
        assert rep.value == pytest.approx(6.0 * math.log(3.0), abs=1e-6)
        assert rep.value == pytest.approx(6.5917, abs=0.01)

    def test_parametric_dominates_semiparametric(self, model):
        assert fisher_parametric(model).value > fisher_semiparametric(model).value

    def test_truncation_shrinks_parametric(self, model):
        assert fisher_parametric(model, eps=0.01).value < fisher_parametric(model).value

    def test_truncated_inverses(self, model):
        assert 1.0 / fisher_semiparametric(model, eps=0.001).value == pytest.approx(
            0.158698694369, abs=1e-8
        )
        assert 1.0 / fisher_semiparametric(model, eps=0.01).value == pytest.approx(
            0.175960246944, abs=1e-8
        )
        assert 1.0 / fisher_semiparametric(model).value == pytest.approx(
            0.151706537771, abs=1e-8
        )

    def test_information_nonincreasing_in_eps(self, model):
        vals = [fisher_semiparametric(model, eps=e).value for e in (0.0, 0.001, 0.01, 0.05)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))


class TestScore1Variance:
    def test_frozen_value(self, model):
        rep = score1_asymptotic_variance(model, eps=0.001)
        assert rep.value == pytest.approx(0.193612401887, abs=1e-8)
        assert rep.eps == 0.001

    def test_component_a_analytic(self, model):
        # A = E[f0(U) Var(X|U)] over the kept region = (1 - 2 eps)/6
        A, B = score1_variance_components(model, 0.001)
        assert A == pytest.approx((1.0 - 0.002) / 6.0, abs=1e-9)
        assert B > 0.0

    def test_never_beats_efficient_bound(self, model):
        simple = score1_asymptotic_variance(model, eps=0.001).value
        efficient = 1.0 / fisher_semiparametric(model, eps=0.001).value
        assert simple >= efficient

    def test_degenerate_covariate_singular(self):
        degenerate = ModelSpec(
            beta0=[0.5],
            t_range=(0.0, 2.0),
            x_ranges=((1.0, 1.0),),
            error=quadratic_error_law(),
        )
        with pytest.raises(SingularInformationError):
            score1_asymptotic_variance(degenerate, eps=0.001)


class TestInterceptVariance:
    def test_frozen_values(self, model):
        assert intercept_variance(model, eps=0.001).value == pytest.approx(
            0.222984408655, abs=1e-8
        )
        assert intercept_variance(model, eps=0.001, efficient=False).value == pytest.approx(
            0.257898116173, abs=1e-8
        )

    def test_decomposition_consistent(self, model):
        # the two variants differ exactly by the beta-variance factor swap
        eff = intercept_variance(model, eps=0.001).value
        simple = intercept_variance(model, eps=0.001, efficient=False).value
        gap = score1_asymptotic_variance(model, eps=0.001).value - (
            1.0 / fisher_semiparametric(model, eps=0.001).value
        )
        assert simple - eff == pytest.approx(gap, abs=1e-8)

    def test_second_summand_positive(self, model):
        # sigma^2 strictly exceeds a' I^-1 a because the integral term is > 0
        eff = intercept_variance(model, eps=0.001).value
        assert eff > 1.0 / fisher_semiparametric(model, eps=0.001).value


POPSCORE = {
    0.40: -0.016660994521,
    0.45: -0.008328986076,
    0.48: -0.003330362937,
}

IDENT = {
    0.40: 0.075137851733,
    0.45: 0.025551463802,
    0.48: 0.004737212640,
}


class TestPopulationScore:
    def test_zero_at_truth(self, model):
        assert population_score1(model, 0.5, eps=0.001).value == pytest.approx(
            0.0, abs=1e-6
        )

    def test_frozen_values_and_antisymmetry(self, model):
        for b, expected in POPSCORE.items():
            lo = population_score1(model, b, eps=0.001).value
            hi = population_score1(model, 1.0 - b, eps=0.001).value
            assert lo == pytest.approx(expected, abs=1e-8)
            assert hi == pytest.approx(-expected, abs=1e-8)

    def test_sign_structure(self, model):
        for b in (0.40, 0.45, 0.48, 0.52, 0.55, 0.60):
            val = population_score1(model, b, eps=0.001).value
            assert (b - 0.5) * val > 0.0

    def test_report_fields(self, model):
        rep = population_score1(model, 0.45, eps=0.001)
        assert rep.quantity == "popscore"
        assert rep.eps == 0.001
        assert rep.quadrature_tol == 1e-6


class TestIdentifiability:
    def test_zero_at_truth(self, model):
        assert identifiability_integral(model, 0.5, eps=0.001).value == 0.0

    def test_frozen_values_and_symmetry(self, model):
        for b, expected in IDENT.items():
            lo = identifiability_integral(model, b, eps=0.001).value
            hi = identifiability_integral(model, 1.0 - b, eps=0.001).value
            assert lo == pytest.approx(expected, abs=1e-8)
            assert hi == pytest.approx(expected, abs=1e-8)

    def test_positive_off_truth_and_increasing(self, model):
        vals = [
            identifiability_integral(model, b, eps=0.001).value
            for b in (0.52, 0.55, 0.60)
        ]
        assert all(v > 0.0 for v in vals)
        assert vals[0] < vals[1] < vals[2]


class TestInfluenceRepresentation:
    def test_summands_center_and_count(self, model):
        s = simulate(model, 2000, seed=23)
        rep = influence_representation_check(model, s, 0.5, eps=0.001)
        # summand sd is about sqrt(I) = 2.6, so the mean of 2000 sits within ~0.06
        assert abs(np.mean(rep.summands)) < 0.2
        assert rep.n_used <= s.n
        assert np.isfinite(rep.representation)

    def test_eps_zero_keeps_all_points(self, model):
        s = simulate(model, 500, seed=29)
        rep = influence_representation_check(model, s, 0.5, eps=0.0)
        assert rep.n_used == s.n

    def test_tracks_estimator_deviation_smoke(self, model):
        # acceptance runs 500 seeds at n = 2000; small-scale correlation here
        devs, reps = [], []
        for seed in range(40):
            s = simulate(model, 500, seed=seed)
            beta_hat = estimate_plugin(s).beta_hat
            rep = influence_representation_check(model, s, beta_hat, eps=0.001)
            devs.append(float(rep.scaled_deviation[0]))
            reps.append(float(rep.representation[0]))
        corr = np.corrcoef(devs, reps)[0, 1]
        assert corr > 0.6
