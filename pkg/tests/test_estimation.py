import unittest

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from mtemono.core.errors import FitError, SupportError
from mtemono.core.estimation.estimands import (
    estimand_late,
    estimand_latt,
    estimand_latut,
    estimand_report,
    late_tilde,
    latt_tilde,
    latut_tilde,
    wald,
)
from mtemono.core.estimation.extrapolation import (
    extrapolate_ate,
    fit_outcome_polynomial,
)
from mtemono.core.estimation.liv import (
    avg_liv_range,
    cdf_weighted_liv_integral,
    liv,
    liv_integral,
    survival_weighted_liv_integral,
)
from mtemono.core.montecarlo.seeds import derive_seed
from mtemono.core.oracle.monotonicity import check_monotonicity
from mtemono.core.oracle.parameters import true_ate, true_late, true_late_pair
from mtemono.core.population.builder import normalize, outcome_curve
from mtemono.core.population.generator import random_pair, random_population
from mtemono.models.population_model import InstrumentGrid, OutcomeCurve
from mtemono.models.report_model import MonotonicityKind
from mtemono.models.scenario_model import GeneratorConfig, GeneratorMode
from tests.fixtures import constant_effect, make_population, p2, quadratic_roy


def _curve(points, values, weights=None) -> OutcomeCurve:
    weights = weights or [1 / len(points)] * len(points)
    weights = list(np.asarray(weights) / np.sum(weights))
    return OutcomeCurve(
        grid=InstrumentGrid(points=tuple(points), weights=tuple(weights)),
        values=tuple(values),
    )


class TestLiv(unittest.TestCase):
    def test_p2_first_segment(self):
        self.assertAlmostEqual(liv(outcome_curve(p2()), 0.3), 7 / 3, places=12)

    def test_constant_curve(self):
        curve = _curve((0.1, 0.4, 0.9), (2.0, 2.0, 2.0))
        for u in (0.1, 0.25, 0.4, 0.9):
            self.assertEqual(liv(curve, u), 0.0)

    def test_two_point_grid_is_wald_slope(self):
        curve = _curve((0.2, 0.7), (1.0, 2.0))
        for u in (0.2, 0.45, 0.7):
            self.assertAlmostEqual(liv(curve, u), 2.0, places=12)

    def test_outside_support(self):
        with self.assertRaises(SupportError):
            liv(outcome_curve(p2()), 0.9)


class TestEstimands(unittest.TestCase):
    def test_p2_late(self):
        curve = outcome_curve(p2())
        self.assertAlmostEqual(estimand_late(curve), 7 / 3, places=12)
        self.assertAlmostEqual(late_tilde(curve), true_late(p2()), places=12)

    def test_p2_latt_and_latut(self):
        curve = outcome_curve(p2())
        self.assertAlmostEqual(estimand_latt(curve), 7 / 3, places=12)
        self.assertAlmostEqual(estimand_latut(curve), 7 / 3, places=12)
        # top-anchored monotonicity fails in P2, LATUT is 2.6
        self.assertAlmostEqual(2.6 - latut_tilde(curve), 0.8 / 3, places=12)

    def test_constant_effect(self):
        curve = outcome_curve(constant_effect(1.5))
        for fn in (estimand_late, estimand_latt, estimand_latut):
            self.assertAlmostEqual(fn(curve), 1.5, places=12)

    def test_extreme_pair_violation_breaks_late(self):
        pop = normalize(
            make_population(
                [
                    ((1, 1, 0), 0.2, 0.0, -4.0),
                    ((0, 1, 1), 0.3, 0.0, 1.0),
                    ((0, 0, 1), 0.3, 0.0, 2.0),
                    ((0, 0, 0), 0.2, 0.0, 0.0),
                ]
            )
        )
        self.assertFalse(check_monotonicity(pop, MonotonicityKind.EXTREME_PAIR).holds)
        gap = abs(estimand_late(outcome_curve(pop)) - true_late(pop))
        self.assertGreater(gap, 0.05)

    def test_instrument_law_override(self):
        curve = outcome_curve(p2())
        law = InstrumentGrid(points=curve.grid.points, weights=(0.5, 0.25, 0.25))
        expected = (float(np.dot(law.weights, curve.values)) - 1.0) / (
            law.mean() - 0.2
        )
        self.assertAlmostEqual(estimand_latt(curve, law), expected, places=12)

    def test_report_conditions(self):
        report = estimand_report(outcome_curve(p2()), degree=2)
        self.assertEqual(report.conditions["latt"], MonotonicityKind.BOTTOM_ANCHORED)
        self.assertEqual(report.extrapolation_degree, 2)
        self.assertIsNotNone(report.ate_extrapolated)


class TestWald(unittest.TestCase):
    def test_p2_pairs(self):
        pop = p2()
        curve = outcome_curve(pop)
        self.assertAlmostEqual(wald(curve, 1, 0), 7 / 3, places=12)
        self.assertAlmostEqual(wald(curve, 1, 0), true_late_pair(pop, 1, 0), places=12)
        # stratum B defies on (0.8, 0.5)
        self.assertAlmostEqual(wald(curve, 2, 1), 7 / 3, places=12)
        self.assertGreater(abs(wald(curve, 2, 1) - true_late_pair(pop, 2, 1)), 0.05)

    def test_same_point(self):
        with self.assertRaises(SupportError):
            wald(outcome_curve(p2()), 1, 1)


class TestAverageLiv(unittest.TestCase):
    def test_p2_lower_range(self):
        pop = p2()
        value = avg_liv_range(outcome_curve(pop), 0.2, 0.5)
        self.assertAlmostEqual(value, 7 / 3, places=12)
        self.assertAlmostEqual(value, true_late_pair(pop, 1, 0), places=12)

    def test_full_range_is_late(self):
        curve = outcome_curve(p2())
        self.assertAlmostEqual(
            avg_liv_range(curve, 0.2, 0.8), estimand_late(curve), places=12
        )

    def test_within_one_segment(self):
        curve = _curve((0.1, 0.4, 0.9), (0.0, 0.6, 0.1))
        self.assertAlmostEqual(avg_liv_range(curve, 0.5, 0.7), -1.0, places=12)

    def test_inverted_range(self):
        with self.assertRaises(SupportError):
            avg_liv_range(outcome_curve(p2()), 0.5, 0.2)


class TestExtrapolation(unittest.TestCase):
    def test_quadratic_population_is_exact(self):
        pop = quadratic_roy()
        self.assertAlmostEqual(true_ate(pop), 4.0, places=12)
        self.assertLess(abs(extrapolate_ate(outcome_curve(pop), 2) - 4.0), 1e-10)

    def test_linear_fit_is_misspecified(self):
        pop = quadratic_roy()
        self.assertGreater(abs(extrapolate_ate(outcome_curve(pop), 1) - 4.0), 0.01)

    def test_constant_curve(self):
        curve = _curve((0.1, 0.4, 0.9), (3.0, 3.0, 3.0))
        for degree in (1, 2):
            self.assertAlmostEqual(extrapolate_ate(curve, degree), 0.0, places=10)

    def test_p2_linear_curve_misses_ate(self):
        # P2 is linear at the grid points, so both fits return the LATE slope
        curve = outcome_curve(p2())
        for degree in (1, 2):
            value = extrapolate_ate(curve, degree)
            self.assertAlmostEqual(value, 7 / 3, places=10)
            self.assertGreater(abs(value - true_ate(p2())), 0.05)

    def test_under_determined_fit(self):
        with self.assertRaises(FitError):
            fit_outcome_polynomial(outcome_curve(p2()), 3)
        with self.assertRaises(FitError):
            fit_outcome_polynomial(outcome_curve(p2()), 0)


def test_integral_identities_on_random_populations():
    config = GeneratorConfig(mode=GeneratorMode.UNRESTRICTED)
    for seed in range(1, 501):
        curve = outcome_curve(random_population(config, seed))
        m, mean_y = curve.m(), curve.mean_outcome()
        assert liv_integral(curve) == pytest.approx(m[-1] - m[0], abs=1e-12)
        assert survival_weighted_liv_integral(curve) == pytest.approx(
            mean_y - m[0], abs=1e-12
        )
        assert cdf_weighted_liv_integral(curve) == pytest.approx(
            m[-1] - mean_y, abs=1e-12
        )


def test_averaged_liv_identifies_pair_late():
    # for each draw, a random interior range satisfying the pair condition
    for trial in range(500):
        seed = derive_seed(2, trial)
        pair = random_pair(np.random.default_rng(seed), 4)
        config = GeneratorConfig(mode=GeneratorMode.PAIR, pair=pair)
        pop = random_population(config, derive_seed(seed, 1))
        high, low = pair
        z = pop.grid.points
        value = avg_liv_range(outcome_curve(pop), z[low], z[high])
        assert value == pytest.approx(true_late_pair(pop, high, low), abs=1e-10)


@st.composite
def outcome_curves(draw):
    k = draw(st.integers(min_value=2, max_value=6))
    points = sorted(
        draw(
            st.lists(
                st.floats(min_value=0.0, max_value=1.0),
                min_size=k,
                max_size=k,
                unique=True,
            )
        )
    )
    assume(min(np.diff(points)) > 1e-3)
    weights = draw(
        st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=k, max_size=k)
    )
    values = draw(
        st.lists(st.floats(min_value=-10.0, max_value=10.0), min_size=k, max_size=k)
    )
    return _curve(points, values, weights)


def _mean_away_from_ends(curve: OutcomeCurve) -> bool:
    grid = curve.grid
    return min(grid.mean() - grid.low, grid.high - grid.mean()) > 0.05


@given(outcome_curves())
@settings(max_examples=300, deadline=None)
def test_integral_identities_hold_for_any_curve(curve):
    m, mean_y = curve.m(), curve.mean_outcome()
    assert liv_integral(curve) == pytest.approx(m[-1] - m[0], abs=1e-11)
    assert survival_weighted_liv_integral(curve) == pytest.approx(
        mean_y - m[0], abs=1e-11
    )
    assert cdf_weighted_liv_integral(curve) == pytest.approx(m[-1] - mean_y, abs=1e-11)


@given(outcome_curves(), st.floats(min_value=-3.0, max_value=3.0))
@settings(max_examples=200, deadline=None)
def test_estimands_are_shift_invariant(curve, shift):
    assume(_mean_away_from_ends(curve))
    shifted = OutcomeCurve(
        grid=curve.grid, values=tuple(v + shift for v in curve.values)
    )
    for estimand in (estimand_late, estimand_latt, estimand_latut):
        assert estimand(shifted) == pytest.approx(estimand(curve), abs=1e-6)


@given(outcome_curves(), st.floats(min_value=-4.0, max_value=4.0))
@settings(max_examples=200, deadline=None)
def test_estimands_scale_with_outcomes(curve, scale):
    assume(_mean_away_from_ends(curve))
    scaled = OutcomeCurve(
        grid=curve.grid, values=tuple(scale * v for v in curve.values)
    )
    for estimand in (estimand_late, estimand_latt, estimand_latut):
        assert estimand(scaled) == pytest.approx(
            scale * estimand(curve), rel=1e-9, abs=1e-6
        )
