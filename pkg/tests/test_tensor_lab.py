"""
Tests for tensors, partition norms, the truncated tensor builders and the
moment-method check.
"""

import itertools
import math

import numpy as np
import pytest

from src.core_tools.errors import (
    BudgetExceededError,
    GridMismatchError,
    ParameterRangeError,
    UnsupportedOrderError,
)
from src.counting_lab.queries import band_points
from src.gaussian_data.streams import SeededStream
from src.lattice_spectral.lattice import bracket
from src.potential_renorm.potential import InteractionPotential
from src.tensor_lab.builders import (
    Signs,
    TensorScales,
    build_first_tensor,
    dyadic_block,
    enumerate_tuples,
    phase_histogram,
    s_threshold,
    weight_exponents,
)
from src.tensor_lab.estimates import verify_tensor_estimate
from src.tensor_lab.main import run_verify_tensors
from src.tensor_lab.random_tensors import (
    complex_gaussian_moment,
    contracted_random_tensor,
    growth_limit,
    moment_method_check,
    normalized_integral,
)
from src.tensor_lab.tensors import (
    DenseTensor,
    all_partitions,
    check_partition,
    dense_reference_norm,
    merged_partitions,
    partition_label,
    tensor_norm,
)
from src.wave_dynamics.config import ParameterLadder


@pytest.fixture
def random_tensor():
    rng = np.random.default_rng(11)
    array = rng.standard_normal((3, 4, 5)) + 1j * rng.standard_normal((3, 4, 5))
    return array, DenseTensor.from_array(("a", "b", "c"), array)


class TestDenseTensor:
    def test_validation(self):
        pts = (np.zeros((1, 3)), np.zeros((1, 3)))
        with pytest.raises(ParameterRangeError):
            DenseTensor(("a", "a"), pts, np.zeros((1, 2)), np.ones(1))
        with pytest.raises(ParameterRangeError):
            DenseTensor(("a", "b"), pts, np.zeros((2, 2)), np.ones(1))
        with pytest.raises(ParameterRangeError):
            DenseTensor.from_array(tuple("abcde"), np.ones((1,) * 5))
        with pytest.raises(ParameterRangeError):
            DenseTensor.from_array(("a",), np.ones((2, 2)))

    def test_dense_round_trip_and_flattening(self, random_tensor):
        array, h = random_tensor
        np.testing.assert_allclose(h.to_dense(), array)
        M = h.flatten(("a",), ("b", "c")).toarray()
        assert M.shape == (20, 3)
        np.testing.assert_allclose(M, array.transpose(1, 2, 0).reshape(20, 3))

    def test_addition_sums_duplicates(self, random_tensor):
        array, h = random_tensor
        np.testing.assert_allclose((h + h.scaled(2.0)).to_dense(), 3 * array)
        other = DenseTensor.from_array(("a", "b", "c"), np.ones((2, 4, 5)))
        with pytest.raises(ParameterRangeError):
            h + other

    def test_vectors_and_max_frequency(self):
        h = DenseTensor.from_vectors(("x", "y"), ([(1, 0, 0), (0, 2, 0)], [(0, 0, 1), (3, 0, 0)]), [1.0, 2.0])
        np.testing.assert_array_equal(h.vectors("y"), [[0, 0, 1], [3, 0, 0]])
        assert h.max_frequency_norm() == pytest.approx(math.sqrt(13.0))
        assert DenseTensor.zero(("x",)).max_frequency_norm() == 0.0


class TestPartitions:
    def test_check_partition(self):
        assert check_partition(("a", "b"), ["b"], ["a"]) == (("b",), ("a",))
        with pytest.raises(ParameterRangeError):
            check_partition(("a", "b"), ["a"], ["a", "b"])
        with pytest.raises(ParameterRangeError):
            check_partition(("a", "b", "c"), ["a"], ["b"])

    def test_all_and_merged_partitions(self):
        assert len(all_partitions(("a", "b", "c"))) == 8
        merged = merged_partitions(("n", "n1", "n2", "n3"), ("n3",), ("n",))
        assert len(merged) == 4
        assert all("n3" in X and "n" in Y for X, Y in merged)

    def test_label(self):
        assert partition_label(("n1", "n2"), ("n",)) == "n1n2->n"
        assert partition_label((), ("n",)) == "-->n"


class TestNorms:
    @pytest.mark.parametrize("A,B", [(("a",), ("b", "c")), (("a", "b"), ("c",)), (("b",), ("a", "c"))])
    def test_power_iteration_matches_svd(self, random_tensor, A, B):
        _, h = random_tensor
        assert tensor_norm(h, A, B) == pytest.approx(dense_reference_norm(h, A, B), rel=1e-4)

    def test_trivial_partition_is_frobenius(self, random_tensor):
        array, h = random_tensor
        assert tensor_norm(h, (), ("a", "b", "c")) == pytest.approx(np.linalg.norm(array))
        assert tensor_norm(h, ("a", "b", "c"), ()) == pytest.approx(np.linalg.norm(array))

    def test_zero_tensor(self):
        assert tensor_norm(DenseTensor.zero(("a", "b")), ("a",), ("b",)) == 0.0

    def test_rank_one(self):
        u, v = np.array([1.0, 2.0, 2.0]), np.array([3.0, 4.0])
        h = DenseTensor.from_array(("a", "b"), np.outer(u, v))
        assert tensor_norm(h, ("a",), ("b",)) == pytest.approx(15.0, rel=1e-8)


class TestRandomTensors:
    def test_gaussian_moments(self):
        assert complex_gaussian_moment(2) == pytest.approx(1.0)
        assert complex_gaussian_moment(4) == pytest.approx(2.0)
        assert growth_limit(2) == pytest.approx(7.0 / 3.0)

    def test_first_order_contraction(self):
        rng = np.random.default_rng(3)
        modes = rng.standard_normal((3, 3, 3)) + 1j * rng.standard_normal((3, 3, 3))
        h = DenseTensor.from_vectors(("a", "b"), ([(0, 0, 0), (0, 0, 0)], [(1, 0, 0), (0, 1, 0)]), [1.0, 2.0])
        hc = contracted_random_tensor(h, {"b": 1}, modes)
        assert hc.axes == ("a",)
        expected = math.sqrt(2.0) * (modes[2, 1, 1] + 2.0 * modes[1, 2, 1])
        np.testing.assert_allclose(hc.to_dense(), [expected])
        flipped = contracted_random_tensor(h, {"b": -1}, modes)
        np.testing.assert_allclose(flipped.to_dense(), [math.sqrt(2.0) * (modes[0, 1, 1] + 2.0 * modes[1, 0, 1])])

    def test_second_order_removes_pairing(self):
        rng = np.random.default_rng(4)
        modes = rng.standard_normal((3, 3, 3)) + 1j * rng.standard_normal((3, 3, 3))
        value = normalized_integral([np.array([[1, 0, 0]]), np.array([[-1, 0, 0]])], [1, 1], modes)
        np.testing.assert_allclose(value, [2.0 * (modes[2, 1, 1] * modes[0, 1, 1] - 0.5)])

    def test_contraction_errors(self):
        modes = np.zeros((3, 3, 3), dtype=complex)
        h = DenseTensor.from_vectors(("a", "b", "c", "d"), [[(1, 0, 0)]] * 4, [1.0])
        with pytest.raises(UnsupportedOrderError):
            contracted_random_tensor(h, {"a": 1, "b": 1, "c": 1}, modes)
        with pytest.raises(UnsupportedOrderError):
            normalized_integral([np.zeros((1, 3))] * 3, [1, 1, 1], modes)
        with pytest.raises(ParameterRangeError):
            contracted_random_tensor(h, {"z": 1}, modes)
        far = DenseTensor.from_vectors(("a", "b"), ([(0, 0, 0)], [(2, 0, 0)]), [1.0])
        with pytest.raises(GridMismatchError):
            contracted_random_tensor(far, {"b": 1}, modes)
        two = DenseTensor.from_vectors(("a", "b"), ([(0, 0, 0)], [(1, 0, 0)]), [1.0])
        with pytest.raises(ParameterRangeError):
            contracted_random_tensor(two, {"a": 1, "b": 1}, modes)

    def test_empty_contraction_keeps_tensor(self, random_tensor):
        array, h = random_tensor
        np.testing.assert_allclose(contracted_random_tensor(h, {}, np.zeros((3, 3, 3))).to_dense(), array)

    def test_moment_check_on_single_mode(self):
        h = DenseTensor.from_vectors(("n", "n1"), ([(0, 0, 0)], [(1, 0, 0)]), [1.0])
        check = moment_method_check(h, {"n1": 1}, (), ("n",), ps=(2, 4), samples=2000,
                                    stream=SeededStream(seed=9, stream_id=6))
        assert check.merged_max == pytest.approx(1.0)
        assert check.n_max == pytest.approx(1.0)
        assert check.moment(2) == pytest.approx(math.sqrt(2.0), rel=0.05)
        assert check.ratio(2) == pytest.approx(1.0, rel=0.05)
        assert check.moment(4) == pytest.approx(math.sqrt(2.0) * 2.0 ** 0.25, rel=0.1)

    def test_moment_check_partition_validated(self):
        h = DenseTensor.from_vectors(("n", "n1"), ([(0, 0, 0)], [(1, 0, 0)]), [1.0])
        with pytest.raises(ParameterRangeError):
            moment_method_check(h, {"n1": 1}, ("n1",), ("n",), samples=2)


class TestBuilders:
    def test_thresholds_and_exponents(self):
        ladder = ParameterLadder()
        assert s_threshold("first", 0.4, ladder) == pytest.approx(0.5 + 0.4 - 0.4 - 0.06)
        assert s_threshold("second", 0.4, ladder) == pytest.approx(0.49)
        assert weight_exponents("second", ladder) == (1.0, ladder.s2, 1.0)
        with pytest.raises(ParameterRangeError):
            weight_exponents("third", ladder)
        with pytest.raises(ParameterRangeError):
            s_threshold("third", 0.4, ladder)

    def test_histogram_covers_every_tuple(self):
        scales = TensorScales(1, 1, 2)
        hist = phase_histogram(scales, Signs(1, -1, 1, -1))
        assert sum(hist.values()) == 7 * 7 * 26

    def test_budget(self):
        with pytest.raises(BudgetExceededError):
            enumerate_tuples(TensorScales(1, 1, 2), Signs(1, 1, 1, 1), budget=100)

    def test_tensor_matches_brute_force(self):
        scales, signs, s = TensorScales(1, 2, 1), Signs(1, 1, -1, 1), 0.3
        V = InteractionPotential(beta=0.4)
        hist = phase_histogram(scales, signs)
        m = max(hist, key=hist.get)
        h = build_first_tensor(scales, m, signs, s, potential=V)
        ladder = ParameterLadder()
        expected = {}
        for n1, n2, n3 in itertools.product(band_points(1), band_points(2), band_points(1)):
            n = n1 + n2 + n3
            phi = bracket(n) + bracket(n1) - bracket(n2) + bracket(n3)
            if abs(phi - m) <= 1.0 + 1e-9:
                key = tuple(np.concatenate([n, n1, n2, n3]).tolist())
                expected[key] = (bracket(n) ** (s - 1.0) * V.at(n1 + n2) / bracket(n1) / bracket(n2)
                                 * bracket(n3) ** (-ladder.s1))
        got = {tuple(np.concatenate([h.vectors(a)[e] for a in h.axes]).tolist()): h.values[e]
               for e in range(len(h.values))}
        assert got.keys() == expected.keys()
        for key, value in expected.items():
            assert got[key] == pytest.approx(value, rel=1e-12)

    def test_workers_do_not_change_tensor(self):
        scales, signs = TensorScales(2, 1, 2), Signs(1, -1, 1, 1)
        serial = build_first_tensor(scales, 3, signs, 0.3)
        threaded = build_first_tensor(scales, 3, signs, 0.3, workers=3)
        np.testing.assert_allclose(serial.to_dense(), threaded.to_dense())

    def test_dyadic_block(self):
        v = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [2, 0, 0], [2, 1, 0]])
        np.testing.assert_array_equal(dyadic_block(v), [1, 1, 2, 2, 4])


class TestEstimates:
    def test_s_must_stay_below_threshold(self):
        with pytest.raises(ParameterRangeError):
            verify_tensor_estimate("second", scales=[(2, 2, 2)], s=0.6)
        with pytest.raises(ParameterRangeError):
            verify_tensor_estimate("first", scales=[(2, 2, 2)], trials=0)

    def test_small_grid(self):
        result = verify_tensor_estimate("second", scales=[(2, 2, 2)], trials=1, seed=2)
        assert result.rows
        assert all(np.isfinite(r["ratio"]) and r["entries"] > 0 for r in result.rows)
        assert result.slope is None
        assert result.passed()


def test_run_verify_tensors(tmp_path):
    result = run_verify_tensors("tensors-test", tmp_path, which=("first",), scales=[(2, 2, 2)],
                                trials=1, ps=(), seed=1)
    assert result["passed"]
    assert [r["check"] for r in result["rows"]] == ["first_tensor_estimate"]
    names = {p.split("/")[-1] for p in result["artifacts"]}
    assert names == {"tensor_estimates.csv", "tensor_summary.csv"}
