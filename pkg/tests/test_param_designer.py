import math

import numpy as np
import pytest

from accsens.boundary_solver import ml_boundaries
from accsens.classifier import (
    GeneralSpec,
    BoundarySet,
    Orientation,
    accuracy,
    region_accuracy,
)
from accsens.densities import DensityModel, HypothesisPair
from accsens.errors import InfeasibleTargetError, InvalidParameterError
from accsens.param_designer import (
    ParamDesignProblem,
    design_params,
    exponential_law,
    fig3_box,
    gamma_sweep,
    gaussian_equal_variance_law,
    max_accuracy,
    sweep_csv_text,
)


class TestGaussianLaw:
    def test_coincident_means(self):
        acc, sens = gaussian_equal_variance_law(0.0, 2.0)
        assert acc == 0.5
        assert sens == pytest.approx(1.0 / (2 * 2.0 * math.sqrt(2 * math.pi)), rel=1e-14)

    def test_two_sigma_separation(self):
        acc, _ = gaussian_equal_variance_law(2.0, 1.0)
        assert acc == pytest.approx(0.8413, abs=5e-5)

    def test_matches_generic_pipeline(self):
        rng = np.random.default_rng(8)
        for _ in range(25):
            dmu = rng.uniform(0.0, 8.0)
            sigma = rng.uniform(0.3, 6.0)
            acc, sens = gaussian_equal_variance_law(dmu, sigma)
            pair = HypothesisPair(
                DensityModel.gaussian(0.0, sigma), DensityModel.gaussian(dmu, sigma), 0.5
            )
            spec = GeneralSpec(BoundarySet((dmu / 2.0,)))
            assert accuracy(spec, pair) == pytest.approx(acc, abs=1e-12)
            # sensitivity of the law = |d acc / d mu1| at the fixed midpoint
            h = 1e-6 * max(1.0, dmu)
            fd = (
                region_accuracy(
                    HypothesisPair(pair.h0, DensityModel.gaussian(dmu + h, sigma), 0.5),
                    (dmu / 2.0,),
                    Orientation.H0_FIRST,
                )
                - region_accuracy(
                    HypothesisPair(pair.h0, DensityModel.gaussian(dmu - h, sigma), 0.5),
                    (dmu / 2.0,),
                    Orientation.H0_FIRST,
                )
            ) / (2 * h)
            assert sens == pytest.approx(abs(fd), abs=1e-8)

    def test_monotone_in_separation(self):
        grid = np.linspace(0.1, 10.0, 50)
        laws = [gaussian_equal_variance_law(d, 2.0) for d in grid]
        accs = np.array([a for a, _ in laws])
        sens = np.array([s for _, s in laws])
        assert np.all(np.diff(accs) > 0)
        assert np.all(np.diff(sens) < 0)

    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            gaussian_equal_variance_law(-1.0, 1.0)
        with pytest.raises(InvalidParameterError):
            gaussian_equal_variance_law(1.0, 0.0)


class TestExponentialLaw:
    def test_reference_ratio_two(self):
        law = exponential_law(2.0, 1.0)
        assert law.accuracy == pytest.approx(0.625, abs=1e-15)
        assert law.sensitivity == pytest.approx(0.08664, abs=5e-6)
        assert law.boundary == pytest.approx(math.log(2.0), rel=1e-14)
        assert law.orientation is Orientation.H1_FIRST

    def test_limit_toward_identical_rates(self):
        law = exponential_law(1.0 + 1e-8, 1.0)
        assert law.accuracy == pytest.approx(0.5, abs=1e-8)

    def test_accuracy_matches_generic_pipeline(self):
        rng = np.random.default_rng(15)
        for _ in range(50):
            r = rng.uniform(1.05, 8.0)
            lam0 = rng.uniform(0.2, 4.0)
            law = exponential_law(r, lam0)
            pair = HypothesisPair(
                DensityModel.exponential(lam0), DensityModel.exponential(r * lam0), 0.5
            )
            generic = region_accuracy(pair, (law.boundary,), Orientation.H1_FIRST)
            assert generic == pytest.approx(law.accuracy, abs=1e-10)
            report = ml_boundaries(pair, 1.0)
            assert report.orientation is Orientation.H1_FIRST
            assert report.roots[0] == pytest.approx(law.boundary, abs=1e-9)

    def test_sensitivity_matches_finite_difference(self):
        rng = np.random.default_rng(16)
        for _ in range(50):
            r = rng.uniform(1.05, 8.0)
            lam0 = rng.uniform(0.2, 4.0)
            law = exponential_law(r, lam0)
            lam1 = r * lam0
            h = 1e-6 * max(1.0, lam1)
            fd = (
                exponential_law((lam1 + h) / lam0, lam0).accuracy
                - exponential_law((lam1 - h) / lam0, lam0).accuracy
            ) / (2 * h)
            assert law.sensitivity == pytest.approx(abs(fd), abs=1e-7)

    def test_monotone_in_ratio(self):
        grid = np.linspace(1.01, 12.0, 60)
        laws = [exponential_law(r, 1.0) for r in grid]
        accs = np.array([l.accuracy for l in laws])
        sens = np.array([l.sensitivity for l in laws])
        assert np.all(np.diff(accs) > 0)
        assert np.all(np.diff(sens) < 0)

    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            exponential_law(1.0, 1.0)
        with pytest.raises(InvalidParameterError):
            exponential_law(2.0, 0.0)


class TestDesign:
    def test_box_validation(self):
        with pytest.raises(InvalidParameterError):
            ParamDesignProblem(bounds=((0, 0), (1, 1), (0, 1)), gamma=0.8)
        with pytest.raises(InvalidParameterError):
            ParamDesignProblem(bounds=((0, 0), (0, 1), (0, 1), (0.1, 1)), gamma=0.8)
        with pytest.raises(InvalidParameterError):
            fig3_box(0.4)

    def test_feasibility_guard(self):
        # a cramped box cannot reach accuracy 0.99
        box = ParamDesignProblem(
            bounds=((0.0, 0.0), (3.0, 4.0), (0.0, 1.0), (3.0, 4.0)), gamma=0.99
        )
        assert max_accuracy(box) < 0.95
        with pytest.raises(InfeasibleTargetError):
            design_params(box, restarts=4)

    def test_single_design_is_feasible_and_consistent(self):
        problem = fig3_box(0.9)
        result = design_params(problem, restarts=10, seed=0)
        assert abs(result.accuracy - 0.9) <= 1e-5
        # verify against the library pipeline on the designed pair
        assert accuracy(
            GeneralSpec(BoundarySet(result.boundaries)), result.pair
        ) == pytest.approx(result.accuracy, abs=1e-9) or len(result.boundaries) == 1
        lo = np.array([b[0] for b in problem.bounds])
        hi = np.array([b[1] for b in problem.bounds])
        assert np.all(np.asarray(result.theta) >= lo - 1e-12)
        assert np.all(np.asarray(result.theta) <= hi + 1e-12)
        assert result.theta[3] <= result.theta[1] + 1e-12

    def test_chance_target_trivial(self):
        problem = fig3_box(0.5)
        result = design_params(problem, restarts=6, seed=0)
        assert result.sensitivity <= 1e-6

    def test_sweep_monotonicity_small(self):
        gammas = [0.6, 0.75, 0.9]
        results = gamma_sweep(fig3_box(gammas[0]), gammas, restarts=8, seed=0)
        sens = [r.sensitivity for r in results]
        assert sens[0] >= sens[1] - 1e-4 and sens[1] >= sens[2] - 1e-4
        text = sweep_csv_text(results)
        assert text.splitlines()[0] == "gamma,sens_star,mu0,sigma0,mu1,sigma1"
        assert len(text.splitlines()) == 4

    def test_determinism(self):
        problem = fig3_box(0.8)
        a = design_params(problem, restarts=6, seed=3)
        b = design_params(problem, restarts=6, seed=3)
        assert a.theta == b.theta and a.sensitivity == b.sensitivity

    def test_low_gamma_optimum_uses_unequal_widths(self):
        # Below accuracy ~0.64 the true optimum leaves the equal-width family:
        # shrinking the second width trades the tied mean components against a
        # smaller worst component.  Verified against exhaustive 2-d profile
        # scans over (sigma0, sigma1) with the separation root-solved per cell;
        # the designed minimum therefore rises with gamma on this stretch
        # before the equal-width branch takes over and falls monotonically.
        low = design_params(fig3_box(0.55), restarts=16, seed=0)
        mid = design_params(fig3_box(0.6426), restarts=16, seed=0)
        assert low.theta[3] < low.theta[1] - 0.5  # strictly unequal widths
        assert low.sensitivity < mid.sensitivity - 5e-4
        # equal-width law value at the cap width; the unequal design beats it
        z = 0.12566134685507405  # standard normal quantile of 0.55
        law = math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi) / 30.0
        assert low.sensitivity < law - 1e-3
