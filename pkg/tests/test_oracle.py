import itertools
import unittest

import pytest

from mtemono.core.errors import UndefinedParameterError
from mtemono.core.estimation.estimands import latt_tilde, latut_tilde
from mtemono.core.oracle.monotonicity import (
    check_monotonicity,
    monotonicity_summary,
    violations,
)
from mtemono.core.oracle.parameters import (
    aggregate_weights,
    interior_type_effect,
    latt_weight_decomposition,
    latut_weight_decomposition,
    mte_curve,
    pair_decomposition,
    true_ate,
    true_late,
    true_late_pair,
    true_latt,
    true_latut,
    true_params,
)
from mtemono.core.population.builder import normalize, outcome_curve
from mtemono.core.population.generator import all_patterns, random_population
from mtemono.models.population_model import Population
from mtemono.models.report_model import MonotonicityKind as MK
from mtemono.models.scenario_model import GeneratorConfig, GeneratorMode
from tests.fixtures import constant_effect, make_population, p1, p2


class TestMonotonicity(unittest.TestCase):
    def test_p1_is_ia_monotone(self):
        for report in monotonicity_summary(p1()):
            self.assertTrue(report.holds, report.kind)

    def test_p2_ia_witness_is_stratum_b(self):
        report = check_monotonicity(p2(), MK.IA_FULL)
        self.assertFalse(report.holds)
        self.assertEqual(len(report.witnesses), 1)
        self.assertEqual(report.witnesses[0].stratum, 1)
        self.assertEqual(report.witnesses[0].indices, (1, 2))

    def test_p2_weak_conditions(self):
        pop = p2()
        self.assertTrue(check_monotonicity(pop, MK.EXTREME_PAIR).holds)
        self.assertTrue(check_monotonicity(pop, MK.BOTTOM_ANCHORED).holds)
        top = check_monotonicity(pop, MK.TOP_ANCHORED)
        self.assertFalse(top.holds)
        self.assertEqual([w.stratum for w in top.witnesses], [1])

    def test_p2_pair_condition(self):
        pop = p2()
        self.assertTrue(check_monotonicity(pop, MK.PAIR, (1, 0)).holds)
        self.assertFalse(check_monotonicity(pop, MK.PAIR, (2, 1)).holds)

    def test_zero_mass_strata_are_ignored(self):
        pop = normalize(
            make_population(
                [
                    ((0, 1, 1), 0.5, 0.0, 1.0),
                    ((0, 0, 1), 0.5, 0.0, 1.0),
                    ((1, 0, 0), 0.0, 0.0, 1.0),
                ]
            )
        )
        self.assertTrue(check_monotonicity(pop, MK.IA_FULL).holds)

    def test_pair_kind_needs_pair(self):
        with self.assertRaises(ValueError):
            check_monotonicity(p2(), MK.PAIR)

    def test_violation_indices(self):
        self.assertEqual(violations((1, 0, 1, 0), MK.TOP_ANCHORED), [(0, 3), (2, 3)])
        self.assertEqual(
            violations((1, 0, 1, 0), MK.BOTTOM_ANCHORED), [(0, 1), (0, 3)]
        )


class TestTrueParameters(unittest.TestCase):
    def test_p2_values(self):
        pop = p2()
        self.assertAlmostEqual(true_late(pop), 7 / 3, places=12)
        self.assertAlmostEqual(true_latt(pop), 7 / 3, places=12)
        self.assertAlmostEqual(true_latut(pop), 2.6, places=12)
        self.assertAlmostEqual(true_ate(pop), 2.5, places=12)

    def test_p2_pairs(self):
        pop = p2()
        self.assertAlmostEqual(true_late_pair(pop, 1, 0), 7 / 3, places=12)
        self.assertAlmostEqual(true_late_pair(pop, 2, 0), 7 / 3, places=12)
        self.assertAlmostEqual(true_late_pair(pop, 2, 1), 3.0, places=12)

    def test_identical_pair(self):
        with self.assertRaises(UndefinedParameterError):
            true_late_pair(p2(), 1, 1)

    def test_constant_effect(self):
        pop = constant_effect(1.5)
        for fn in (true_late, true_latt, true_latut, true_ate):
            self.assertAlmostEqual(fn(pop), 1.5, places=12)

    def test_no_compliers(self):
        pop = make_population(
            [((1, 1, 1), 0.4, 0.0, 1.0), ((0, 0, 0), 0.6, 0.0, 1.0)]
        )
        # no first stage, so the normalized flag has to be set by hand
        with self.assertRaises(UndefinedParameterError):
            true_late(pop.model_copy(update={"normalized": True}))

    def test_symmetric_effects_average_out(self):
        pop = make_population(
            [((1, 1, 1), 0.5, 0.0, 2.0), ((0, 0, 0), 0.5, 0.0, -2.0)]
        )
        self.assertEqual(true_ate(pop), 0.0)

    def test_single_stratum_ate(self):
        pop = make_population([((0, 1, 1), 1.0, 1.25, 4.0)])
        self.assertEqual(true_ate(pop), 2.75)

    def test_true_params_bundle(self):
        params = true_params(p2())
        self.assertAlmostEqual(params.complier_mass, 0.6, places=12)
        self.assertAlmostEqual(params.treated_complier_mass, 0.3, places=12)
        self.assertAlmostEqual(params.untreated_complier_mass, 1 / 3, places=12)


class TestWeightDecomposition(unittest.TestCase):
    def test_p1_weights_nonnegative(self):
        for w in latt_weight_decomposition(p1()):
            self.assertGreaterEqual(w.weight, 0.0)

    def test_treated_at_bottom_gets_negative_weight(self):
        pop = normalize(
            make_population(
                [
                    ((1, 0, 0), 0.1, 0.0, 1.0),
                    ((0, 1, 1), 0.4, 0.0, 1.0),
                    ((0, 0, 1), 0.3, 0.0, 1.0),
                    ((0, 0, 0), 0.2, 0.0, 1.0),
                ]
            )
        )
        weights = {w.pattern: w.weight for w in latt_weight_decomposition(pop)}
        self.assertLess(weights["100"], 0.0)
        self.assertGreaterEqual(weights["011"], 0.0)

    def test_aggregates_reproduce_integral_estimands(self):
        pop = normalize(
            make_population(
                [
                    ((1, 0, 0), 0.1, 0.0, 4.0),
                    ((0, 1, 1), 0.4, 1.0, 2.0),
                    ((0, 1, 0), 0.1, -1.0, 3.0),
                    ((0, 0, 1), 0.2, 0.5, 0.0),
                    ((0, 0, 0), 0.2, 2.0, 2.5),
                ],
                weights=(0.5, 0.25, 0.25),
            )
        )
        curve = outcome_curve(pop)
        latt = aggregate_weights(latt_weight_decomposition(pop))
        latut = aggregate_weights(latut_weight_decomposition(pop))
        self.assertAlmostEqual(latt, latt_tilde(curve), places=12)
        self.assertAlmostEqual(latut, latut_tilde(curve), places=12)


def test_pair_decomposition_on_defier_pair():
    decomposition = pair_decomposition(p2(), 2, 1)
    assert decomposition.complier_mass == pytest.approx(0.4)
    assert decomposition.defier_mass == pytest.approx(0.1)
    assert decomposition.complier_effect == pytest.approx(3.0)
    assert decomposition.defier_effect == pytest.approx(5.0)
    assert decomposition.wald == pytest.approx(7 / 3, abs=1e-12)


def test_interior_types_of_p2():
    interior = interior_type_effect(p2())
    assert interior.strata == [1]
    assert interior.mass == pytest.approx(0.1)
    assert interior.effect == pytest.approx(5.0)


def test_mte_matches_liv_under_ia_monotonicity():
    segments = mte_curve(p1())
    assert [s.mte for s in segments] == pytest.approx([1.0, 3.0])
    for segment in segments:
        assert segment.liv == pytest.approx(segment.mte, abs=1e-12)


def test_mte_undefined_without_ia_monotonicity():
    with pytest.raises(UndefinedParameterError):
        mte_curve(p2())


def _affine(pop: Population, shift: float, scale: float) -> Population:
    strata = tuple(
        s.model_copy(
            update={"mu0": shift + scale * s.mu0, "mu1": shift + scale * s.mu1}
        )
        for s in pop.strata
    )
    return pop.model_copy(update={"strata": strata})


def _pair_late(pop: Population, high: int, low: int):
    try:
        return true_late_pair(pop, high, low)
    except UndefinedParameterError:
        return None


@pytest.mark.parametrize("shift, scale", [(2.5, 1.0), (0.0, 3.0), (-1.0, -0.5)])
def test_true_parameters_follow_affine_outcomes(shift, scale):
    config = GeneratorConfig(mode=GeneratorMode.UNRESTRICTED)
    for seed in range(1, 51):
        pop = random_population(config, seed)
        moved = _affine(pop, shift, scale)
        before, after = true_params(pop), true_params(moved)
        for name in ("late", "latt", "latut", "ate"):
            value = getattr(before, name)
            if value is None:
                assert getattr(after, name) is None
            else:
                assert getattr(after, name) == pytest.approx(scale * value, abs=1e-9)
        value = _pair_late(pop, 3, 0)
        if value is not None:
            assert _pair_late(moved, 3, 0) == pytest.approx(scale * value, abs=1e-9)


def test_ia_full_implies_weaker_conditions():
    weaker = (MK.EXTREME_PAIR, MK.BOTTOM_ANCHORED, MK.TOP_ANCHORED)
    seen_ia = 0
    for mode in (GeneratorMode.IA_FULL, GeneratorMode.UNRESTRICTED):
        config = GeneratorConfig(mode=mode)
        for seed in range(1, 201):
            pop = random_population(config, seed)
            if not check_monotonicity(pop, MK.IA_FULL).holds:
                continue
            seen_ia += 1
            for kind in weaker:
                assert check_monotonicity(pop, kind).holds, (mode, seed, kind)
    assert seen_ia >= 200


def test_two_point_grid_conditions_coincide():
    patterns = all_patterns(2)
    for size in range(1, len(patterns) + 1):
        for chosen in itertools.combinations(patterns, size):
            pop = make_population(
                [(p, 1 / size, 0.0, 1.0) for p in chosen],
                points=(0.2, 0.8),
                weights=(0.5, 0.5),
            )
            verdicts = {r.holds for r in monotonicity_summary(pop)}
            assert len(verdicts) == 1, chosen


def test_anchored_conditions_do_not_imply_ia_full():
    # treated at both ends, switched off in between
    pop = make_population(
        [
            ((0, 1, 0, 1), 0.3, 0.0, 1.0),
            ((0, 0, 1, 1), 0.3, 0.0, 1.0),
            ((0, 0, 0, 0), 0.4, 0.0, 1.0),
        ],
        points=(1.0, 2.0, 3.0, 4.0),
        weights=(0.25, 0.25, 0.25, 0.25),
    )
    holds = {r.kind: r.holds for r in monotonicity_summary(pop)}
    assert holds[MK.BOTTOM_ANCHORED]
    assert holds[MK.TOP_ANCHORED]
    assert not holds[MK.IA_FULL]
