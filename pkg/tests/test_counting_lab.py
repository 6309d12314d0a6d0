"""
Tests for the lattice counting lab: phases, enumeration, pairings, septic
sums, the frequency-scale check and the sine-cancellation sum.
"""

import math

import numpy as np
import pandas as pd
import pytest

from src.core_tools.errors import BudgetExceededError, ParameterRangeError
from src.counting_lab.enumeration import (
    check_budget,
    lattice_count,
    reference_count,
    sup_over_windows,
    weighted_lattice_sum,
    window_profile,
)
from src.counting_lab.freq_scale import (
    ScaleTuple,
    check_frequency_scale,
    frequency_scale_table,
    scale_ratio,
    triangle_achievable,
)
from src.counting_lab.lemmas import LEMMAS, CountingContext, basic_query, get_lemma
from src.counting_lab.main import run_verify_counting
from src.counting_lab.pairings import MIRROR_PAIRING, SEPTIC_PARTITION, Pairing, pairings_respecting
from src.counting_lab.phases import (
    LinearForm,
    PhaseSpec,
    PhaseTerm,
    PhaseWindow,
    resonance_factor,
    window_hits,
)
from src.counting_lab.queries import Annulus, CountingQuery, Variable, ball_points, band_points
from src.counting_lab.ratios import bound_ratio
from src.counting_lab.septic import SepticScales, septic_mirror_sum, septic_sum
from src.counting_lab.sine_cancellation import (
    quadrature_value,
    sine_cancellation_grid,
    sine_cancellation_value,
)
from src.potential_renorm.potential import InteractionPotential


class TestPhases:
    def test_linear_form_collects_coefficients(self):
        form = LinearForm.of("n1", "n1", shift=(1, 0, 0), n2=-1)
        assert form.coeffs == (("n1", 2), ("n2", -1))
        values = {"n1": np.array([[1, 2, 3]]), "n2": np.array([[0, 1, 0]])}
        np.testing.assert_array_equal(form.evaluate(values), [[3, 3, 6]])

    def test_empty_form_cannot_be_evaluated(self):
        with pytest.raises(ParameterRangeError):
            LinearForm.of().evaluate({"n": np.zeros((1, 3))})

    def test_phase_sign_is_validated(self):
        with pytest.raises(ParameterRangeError):
            PhaseTerm(2, LinearForm.of("n"))

    def test_flipped_phase_is_negated(self):
        phase = PhaseSpec.from_pairs([(1, LinearForm.of("a", "n")), (-1, LinearForm.of("n"))], constant=0.25)
        pts = band_points(2)
        values = {"n": pts, "a": np.broadcast_to(np.array([1, 0, 0]), pts.shape)}
        np.testing.assert_allclose(phase.flipped().evaluate(values), -phase.evaluate(values), atol=1e-12)

    def test_window_hits(self):
        phi = np.array([-0.5, 0.0, 0.999, 1.5])
        np.testing.assert_array_equal(window_hits(phi, 0), [True, True, True, False])
        np.testing.assert_array_equal(window_hits(phi, 0, half_open=True), [False, True, True, False])

    def test_resonance_factor(self):
        assert resonance_factor(np.array(0.5)) == pytest.approx(1.0 + 1.0 / math.sqrt(2.0))
        assert resonance_factor(np.array(0.0)) == pytest.approx(1.0 + 2.0 / math.sqrt(2.0))


class TestQueries:
    def test_band_and_ball_sizes(self):
        assert len(band_points(1)) == 7
        assert len(band_points(2)) == 26
        assert len(ball_points(1)) == 7

    def test_duplicate_variables_rejected(self):
        with pytest.raises(ParameterRangeError):
            CountingQuery("dup", (Variable.band("n", 2), Variable.band("n", 4)))

    def test_unknown_variable_rejected(self):
        with pytest.raises(ParameterRangeError):
            CountingQuery("bad", (Variable.band("n", 2),), (Annulus(LinearForm.of("m"), 2),))

    def test_annulus_needs_dyadic_scale(self):
        with pytest.raises(ParameterRangeError):
            Annulus(LinearForm.of("n"), 3)


class TestEnumeration:
    def test_count_without_windows(self):
        q = CountingQuery("plain", (Variable.band("n", 2),))
        assert lattice_count(q) == 26
        assert weighted_lattice_sum(q.with_weight(lambda v: np.full(len(v["n"]), 2.0))) == pytest.approx(52.0)

    def test_annulus_restricts_count(self):
        q = CountingQuery("plain", (Variable.band("n", 2), Variable.band("k", 1)))
        q = q.with_constraint(Annulus(LinearForm.of("n", "k"), 1))
        assert lattice_count(q) == reference_count(q)

    @pytest.mark.parametrize("sign", [1, -1])
    def test_vectorized_count_matches_reference(self, sign):
        q = basic_query((1, 0, 0), 4, sign)
        profile = window_profile(q)
        assert profile.values
        for m in range(min(k[0] for k in profile.values) - 1, max(k[0] for k in profile.values) + 2):
            assert lattice_count(q, m) == reference_count(q, m)

    def test_two_ball_matches_reference(self):
        q = basic_query((1, 1, 0), 4, 1, B=4)
        m = window_profile(q).argmax
        assert lattice_count(q, m) == reference_count(q, m)

    def test_half_open_windows_partition_the_tuples(self):
        phase = PhaseSpec.from_pairs([(1, LinearForm.of("n", shift=(1, 0, 0))), (1, LinearForm.of("n"))])
        q = CountingQuery("half", (Variable.band("n", 4),), windows=(PhaseWindow.single(phase, half_open=True),))
        assert window_profile(q).total == pytest.approx(len(band_points(4)))

    def test_profile_independent_of_workers(self):
        q = basic_query((1, 0, 0), 8, -1)
        serial = window_profile(q, workers=1, chunk=97)
        threaded = window_profile(q, workers=3, chunk=97)
        assert serial.values == threaded.values
        assert window_profile(q).values == serial.values

    def test_sup_dominates_every_window(self):
        q = basic_query((0, 1, 0), 4, 1)
        profile = window_profile(q)
        sup = sup_over_windows(q)
        assert sup == profile.sup
        assert all(v <= sup for v in profile.values.values())
        assert profile.at(profile.argmax) == sup

    def test_budget(self):
        q = CountingQuery("plain", (Variable.band("n", 2),))
        assert check_budget(q, 26) == 26
        with pytest.raises(BudgetExceededError) as info:
            window_profile(q, budget=10)
        assert info.value.requested == 26


class TestLemmas:
    def test_unknown_lemma(self):
        with pytest.raises(ParameterRangeError):
            get_lemma("nope")

    def test_named_scales_checked(self):
        lemma = get_lemma("basic")
        assert lemma.named((8, 4)) == {"N": 8, "A": 4}
        with pytest.raises(ParameterRangeError):
            lemma.named((8,))

    def test_catalogue_grids_match_scale_names(self):
        for lemma_id, lemma in LEMMAS.items():
            assert lemma.lemma_id == lemma_id
            assert all(len(sc) == len(lemma.scale_names) for sc in lemma.grid)

    def test_bound_ratio_is_deterministic(self):
        first = bound_ratio("basic", scales=[(8, 1), (8, 4)], trials=2, seed=5)
        second = bound_ratio("basic", scales=[(8, 1), (8, 4)], trials=2, seed=5)
        assert first.rows == second.rows
        assert len(first.rows) == 2
        assert all(0 < r["ratio"] < math.inf for r in first.rows)
        assert first.slope is None
        assert first.passed()

    def test_bound_ratio_trials_validated(self):
        with pytest.raises(ParameterRangeError):
            bound_ratio("basic", trials=0)

    def test_context_validation(self):
        with pytest.raises(ValueError):
            CountingContext(beta=1.5)


class TestPairings:
    def test_validation(self):
        with pytest.raises(ParameterRangeError):
            Pairing(3, frozenset({(1, 2)}))
        with pytest.raises(ParameterRangeError):
            Pairing(3, frozenset({(1, 1)}))
        with pytest.raises(ParameterRangeError):
            Pairing.from_pairs(3, [(1, 4)])
        with pytest.raises(ParameterRangeError):
            Pairing.from_pairs(3, [(1, 2), (1, 3)])

    def test_partition_respect(self):
        assert MIRROR_PAIRING.respects(SEPTIC_PARTITION)
        assert not Pairing.from_pairs(7, [(1, 2)]).respects(SEPTIC_PARTITION)
        assert MIRROR_PAIRING.unpaired == (4,)

    def test_enumerated_pairings(self):
        assert len(pairings_respecting(3, ((1,), (2,), (3,)))) == 4
        septic = pairings_respecting(7, SEPTIC_PARTITION)
        assert MIRROR_PAIRING in septic
        assert all(p.respects(SEPTIC_PARTITION) for p in septic)

    def test_admissible_frequencies(self):
        p = Pairing.from_pairs(3, [(1, 3)])
        vecs = [(1, 2, 0), (0, 0, 5), (-1, -2, 0)]
        assert p.is_admissible(vecs)
        assert not p.is_admissible([(1, 2, 0), (0, 0, 5), (1, 2, 0)])
        np.testing.assert_array_equal(p.non_resonant_frequency(vecs), [0, 0, 5])


class TestSeptic:
    def test_mirror_shortcut_matches_enumeration(self):
        scales = SepticScales(total=2, n1234=2, n567=1, n4=2)
        V = InteractionPotential(beta=0.5)
        direct = septic_sum(MIRROR_PAIRING, scales, V, s=0.3, box=1)
        shortcut = septic_mirror_sum(scales, V, s=0.3, box=1)
        assert direct > 0
        assert shortcut == pytest.approx(direct, rel=1e-10)

    def test_rejects_non_respecting_pairing(self):
        scales = SepticScales(total=2, n1234=2, n567=1, n4=2)
        with pytest.raises(ParameterRangeError):
            septic_sum(Pairing.from_pairs(7, [(1, 2)]), scales, InteractionPotential(), s=0.3, box=1)

    def test_budget(self):
        scales = SepticScales(total=2, n1234=2, n567=1, n4=2)
        with pytest.raises(BudgetExceededError):
            septic_sum(MIRROR_PAIRING, scales, InteractionPotential(), s=0.3, box=1, budget=100)


class TestFrequencyScale:
    def test_triangle(self):
        assert triangle_achievable(1, 1, 1)
        assert triangle_achievable(4, 4, 8)
        assert not triangle_achievable(1, 1, 8)

    def test_ratio(self):
        assert scale_ratio(ScaleTuple(1, 1, 1, 1)) == 1.0
        assert scale_ratio(ScaleTuple(8, 1, 8, 8)) == pytest.approx(1.0)

    def test_table_and_check(self):
        table = frequency_scale_table(4)
        assert isinstance(table, pd.DataFrame)
        assert table["max_scale"].max() == 16
        assert table["ratio"].max() < 4.0
        check = check_frequency_scale(table, fit_max_scale=16)
        assert check.passed
        assert check.constant == pytest.approx(check.worst_ratio)

    def test_negative_exponent(self):
        with pytest.raises(ParameterRangeError):
            frequency_scale_table(-1)


class TestSineCancellation:
    def test_shift_must_be_small(self):
        with pytest.raises(ParameterRangeError):
            sine_cancellation_value((2, 0, 0), 4, 0.5, 1.0)

    def test_quadrature_at_zero_time(self):
        assert quadrature_value((0, 0, 0), 4, 0.0, 1.0) == 0j

    def test_closed_form_matches_quadrature(self):
        exact = sine_cancellation_value((1, 0, 0), 4, 0.5, 1.0)
        approx = quadrature_value((1, 0, 0), 4, 0.5, 1.0)
        assert abs(exact - approx) <= 1e-3 * max(abs(exact), 1e-12)

    @pytest.mark.parametrize("a,method", [((1, 0, 0), "axis"), ((0, 0, 0), "radial")])
    def test_reductions_match_slab_sum(self, a, method):
        times, lambdas = [0.3, 1.0], [-2.0, 0.0, 3.0]
        reduced = sine_cancellation_grid(a, 8, times, lambdas, method=method)
        slab = sine_cancellation_grid(a, 8, times, lambdas, method="slab")
        np.testing.assert_allclose(reduced, slab, rtol=1e-10, atol=1e-12)

    def test_method_validation(self):
        with pytest.raises(ParameterRangeError):
            sine_cancellation_grid((1, 0, 0), 8, [0.5], [0.0], method="radial")
        with pytest.raises(ParameterRangeError):
            sine_cancellation_grid((0, 1, 0), 8, [0.5], [0.0], method="axis")
        with pytest.raises(ParameterRangeError):
            sine_cancellation_grid((0, 0, 0), 8, [0.5], [0.0], method="fft")

    def test_interval_outside_time_range_is_zero(self):
        out = sine_cancellation_grid((1, 0, 0), 8, [1.0], [0.0, 1.0], interval=(2.0, 3.0))
        np.testing.assert_array_equal(out, 0)


def test_run_verify_counting(tmp_path):
    result = run_verify_counting("counting-test", tmp_path, lemmas=["basic"], scales=[(8, 1), (8, 4)],
                                 trials=1, sine_scales=())
    assert result["passed"]
    names = {p.split("/")[-1] for p in result["artifacts"]}
    assert names == {"counting_ratios.csv", "counting_summary.csv"}
    assert [r["check"] for r in result["rows"]] == ["basic"]
