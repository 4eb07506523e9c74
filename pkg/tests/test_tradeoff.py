import numpy as np
import pytest

from accsens.boundary_solver import ml_boundaries
from accsens.classifier import Norm, region_accuracy
from accsens.densities import DensityModel, HypothesisPair
from accsens.errors import InfeasibleTargetError, InvalidParameterError
from accsens.tradeoff import (
    TradeoffCurve,
    constrained_min_sensitivity,
    general_curve,
    linear_curve,
    ml_curve,
)


def _point_at(curve: TradeoffCurve, parameter: float):
    for p in curve.points:
        if p.parameter == parameter:
            return p
    raise AssertionError(f"no point with parameter {parameter}")


def _acc_max(pair) -> float:
    report = ml_boundaries(pair, 1.0)
    return region_accuracy(pair, report.roots, report.orientation)


class TestMlCurve:
    def test_reference_points(self, table1_pair):
        curve = ml_curve(table1_pair)
        red = _point_at(curve, 1.0)
        assert red.accuracy == pytest.approx(0.7891, abs=5e-4)
        assert red.sensitivity == pytest.approx(0.0334, abs=1e-3)
        green = ml_curve(table1_pair, np.asarray([0.4603]))
        assert green.points[0].accuracy == pytest.approx(0.7766, abs=5e-4)
        assert green.points[0].sensitivity == pytest.approx(0.0201, abs=1e-3)

    def test_singleton_grid_is_max_accuracy(self, table1_pair):
        curve = ml_curve(table1_pair, np.asarray([1.0]))
        assert len(curve.points) == 1
        assert curve.points[0].accuracy == pytest.approx(_acc_max(table1_pair), abs=1e-14)

    def test_curve_invariants(self, table1_pair):
        curve = ml_curve(table1_pair)
        acc = curve.accuracies
        assert np.all(np.diff(acc) > 0)  # strictly increasing after collapse
        assert np.all(acc >= 0.5)
        assert len({len(p.boundaries) for p in curve.points}) == 1
        assert curve.metadata["degenerate_etas"] > 0  # thresholds past coalescence

    def test_dominated_pair_exists_with_inf_norm(self, table1_pair):
        # detuning the threshold can simultaneously lose accuracy and gain
        # sensitivity: the sweep is not a monotone frontier
        curve = ml_curve(table1_pair, norm=Norm.INF)
        acc, sens = curve.accuracies, curve.sensitivities
        found = any(
            np.any((acc[:i] < acc[i] - 1e-6) & (sens[:i] > sens[i] + 1e-6))
            for i in range(len(acc))
        )
        assert found

    def test_empty_and_invalid_grids(self, table1_pair):
        with pytest.raises(InvalidParameterError):
            ml_curve(table1_pair, np.asarray([]))
        with pytest.raises(InvalidParameterError):
            ml_curve(table1_pair, np.asarray([-1.0]))


class TestLinearCurve:
    def test_best_point_is_optimal_linear(self, table1_pair):
        curve = linear_curve(table1_pair)
        best = max(curve.points, key=lambda p: p.accuracy)
        assert best.parameter == pytest.approx(3.6534, abs=1e-3)
        assert best.accuracy == pytest.approx(0.78347, abs=1e-4)

    def test_far_boundary_degenerates(self, table1_pair):
        curve = linear_curve(table1_pair, np.asarray([-1e6, 0.0, 1e6]))
        far = [p for p in curve.points if abs(p.parameter) == 1e6]
        for p in far:
            assert p.accuracy == pytest.approx(max(table1_pair.p0, table1_pair.p1), abs=1e-12)
            assert p.sensitivity <= 1e-12

    def test_equal_variance_midpoint_accuracy(self):
        pair = HypothesisPair(DensityModel.gaussian(-2, 3), DensityModel.gaussian(4, 3), 0.5)
        curve = linear_curve(pair, np.asarray([1.0]))
        from scipy.special import ndtr

        assert curve.points[0].accuracy == pytest.approx(float(ndtr(6 / (2 * 3))), abs=1e-14)

    def test_kept_orientation_never_below_chance(self, table1_pair):
        curve = linear_curve(table1_pair)
        assert np.all(curve.accuracies >= 0.5)


class TestConstrainedMin:
    def test_saturated_target_returns_optimum(self, table1_pair):
        acc_max = _acc_max(table1_pair)
        pt = constrained_min_sensitivity(table1_pair, acc_max)
        np.testing.assert_allclose(pt.boundaries, (3.6534, 18.7774), atol=1e-3)
        assert pt.sensitivity == pytest.approx(0.0334, abs=1e-3)

    def test_chance_target_has_zero_sensitivity(self, table1_pair):
        pt = constrained_min_sensitivity(table1_pair, 0.5)
        assert pt.sensitivity == 0.0
        assert pt.boundaries[0] == pt.boundaries[1]

    def test_infeasible_target(self, table1_pair):
        with pytest.raises(InfeasibleTargetError):
            constrained_min_sensitivity(table1_pair, _acc_max(table1_pair) + 1e-3)

    def test_feasibility_tolerance(self, table1_pair):
        for zeta in (0.6, 0.7, 0.77):
            pt = constrained_min_sensitivity(table1_pair, zeta)
            assert abs(pt.accuracy - zeta) <= 1e-6

    def test_never_above_matched_ratio_classifier(self, table1_pair):
        # the ratio classifier at the same accuracy is a feasible candidate,
        # so the constrained minimum can only improve on it
        for eta in (0.4603, 0.2, 2.0):
            report = ml_boundaries(table1_pair, eta)
            acc = region_accuracy(table1_pair, report.roots, report.orientation)
            from accsens.classifier import apply_norm, region_accuracy_gradient

            s_ml = apply_norm(
                region_accuracy_gradient(table1_pair, report.roots, report.orientation), Norm.INF
            )
            pt = constrained_min_sensitivity(table1_pair, acc)
            assert pt.sensitivity <= s_ml + 1e-6


@pytest.fixture(scope="module")
def inf_curve(table1_pair):
    return general_curve(table1_pair, zeta_grid=np.linspace(0.5, _acc_max(table1_pair), 24))


class TestGeneralCurve:
    def test_every_point_feasible(self, inf_curve):
        for p in inf_curve.points:
            assert abs(p.accuracy - p.parameter) <= 1e-6

    def test_no_failed_targets(self, inf_curve):
        assert inf_curve.metadata["failed_zetas"] == []

    def test_near_monotone_inf(self, inf_curve):
        # The exact minimum genuinely dips by ~6e-5 where the active gradient
        # component switches (verified against a 3000x3000 brute-force grid),
        # so the non-increase property carries a 1e-4 allowance for the
        # max-component norm.
        s = inf_curve.sensitivities
        assert np.max(np.maximum(0.0, s[:-1] - s[1:])) <= 1e-4

    def test_monotone_two_norm(self, table1_pair):
        curve = general_curve(
            table1_pair,
            zeta_grid=np.linspace(0.5, _acc_max(table1_pair), 24),
            norm=Norm.TWO,
        )
        s = curve.sensitivities
        assert np.max(np.maximum(0.0, s[:-1] - s[1:])) <= 1e-5

    def test_csv_shape_and_determinism(self, table1_pair):
        grid = np.linspace(0.55, 0.75, 5)
        a = general_curve(table1_pair, zeta_grid=grid)
        b = general_curve(table1_pair, zeta_grid=grid)
        assert a.to_csv_text() == b.to_csv_text()
        header = a.to_csv_text().splitlines()[0]
        assert header == "accuracy,sensitivity,y1,y2,provenance"
        assert "np.float" not in a.to_csv_text()  # plain scalar formatting only


class TestPenaltyPath:
    def test_three_boundary_curve_is_best_effort(self, table1_pair):
        zetas = np.asarray([0.6, 0.7])
        curve = general_curve(table1_pair, zeta_grid=zetas, n_boundaries=3)
        assert curve.metadata.get("best_effort") is True
        for p in curve.points:
            assert len(p.boundaries) == 3
            assert abs(p.accuracy - p.parameter) <= 1e-6
        # three boundaries generalize two: no point may sit above the
        # two-boundary minimum by more than solver slack
        for p in curve.points:
            two = constrained_min_sensitivity(table1_pair, p.parameter)
            assert p.sensitivity <= two.sensitivity + 1e-3
