"""
The two deterministic tensors

    h_{n n1 n2 n3} = 1{n = n123} 1{|phi - m| <= 1} <n>^{s-1} V(n12) <n1>^{-e1} <n2>^{-e2} <n3>^{-e3}

restricted to dyadic blocks of n1, n2, n3, n12 and n, with
phi = +-<n123> +- <n1> +- <n2> +- <n3>. The first tensor uses exponents
(1, 1, s1), the second (1, s2, 1). Both go through one enumeration kernel.
"""

from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from src.core_tools.errors import BudgetExceededError, ParameterRangeError
from src.core_tools.settings import get_settings
from src.core_tools.workers import map_ordered
from src.counting_lab.phases import WINDOW_TOL
from src.counting_lab.queries import band_points, in_band
from src.lattice_spectral.lattice import SHARP, TruncationProfile, bracket
from src.potential_renorm.potential import InteractionPotential
from src.tensor_lab.tensors import DenseTensor, Partition
from src.wave_dynamics.config import ParameterLadder

TENSOR_AXES = ("n", "n1", "n2", "n3")
PAIR_CHUNK = 1 << 20

WEIGHT_EXPONENTS: Dict[str, Tuple[str, str, str]] = {
    "first": ("one", "one", "s1"),
    "second": ("one", "s2", "one"),
}

ESTIMATE_PARTITIONS: Dict[str, Tuple[Partition, ...]] = {
    "first": (
        (("n1", "n2", "n3"), ("n",)),
        (("n3",), ("n", "n1", "n2")),
        (("n1", "n3"), ("n", "n2")),
        (("n2", "n3"), ("n", "n1")),
    ),
    "second": (
        (("n1", "n2", "n3"), ("n",)),
        (("n2",), ("n", "n1", "n3")),
        (("n2", "n3"), ("n", "n1")),
        (("n1", "n2"), ("n", "n3")),
    ),
}


class TensorScales(NamedTuple):
    n1: int
    n2: int
    n3: int
    n12: Optional[int] = None
    n123: Optional[int] = None


class Signs(NamedTuple):
    s123: int
    s1: int
    s2: int
    s3: int


def s_threshold(which: str, beta: float, ladder: ParameterLadder) -> float:
    """Largest admissible s (exclusive) for each estimate."""
    if which == "first":
        return 0.5 + beta - 2.0 * ladder.delta1 - 6.0 * ladder.eta
    if which == "second":
        return 0.5 - ladder.eta
    raise ParameterRangeError(f"unknown tensor {which!r}; expected 'first' or 'second'")


def weight_exponents(which: str, ladder: ParameterLadder) -> Tuple[float, float, float]:
    if which not in WEIGHT_EXPONENTS:
        raise ParameterRangeError(f"unknown tensor {which!r}; expected 'first' or 'second'")
    table = {"one": 1.0, "s1": ladder.s1, "s2": ladder.s2}
    return tuple(table[k] for k in WEIGHT_EXPONENTS[which])


@dataclass(frozen=True)
class TupleChunk:
    """Admissible (n1, n2, n3) tuples of one n3 slice with their phases."""

    n1: np.ndarray
    n2: np.ndarray
    n3: np.ndarray
    phi: np.ndarray


def _pairs(scales: TensorScales) -> Tuple[np.ndarray, np.ndarray]:
    p1, p2 = band_points(scales.n1), band_points(scales.n2)
    i1, i2 = [], []
    total = len(p1) * len(p2)
    for start in range(0, total, PAIR_CHUNK):
        lin = np.arange(start, min(start + PAIR_CHUNK, total), dtype=np.int64)
        a, b = lin // len(p2), lin % len(p2)
        keep = np.ones(len(lin), dtype=bool) if scales.n12 is None else in_band(p1[a] + p2[b], scales.n12)
        i1.append(a[keep])
        i2.append(b[keep])
    if not i1:
        return np.zeros((0, 3), dtype=np.int64), np.zeros((0, 3), dtype=np.int64)
    return p1[np.concatenate(i1)], p2[np.concatenate(i2)]


def enumerate_tuples(
    scales: TensorScales,
    signs: Signs,
    N: Optional[int] = None,
    m: Optional[int] = None,
    window: float = 1.0,
    budget: Optional[int] = None,
    workers: int = 1,
    profile: TruncationProfile = SHARP,
) -> List[TupleChunk]:
    """Tuples in the blocks of n1, n2, n3 (and n12, n123 when given), truncated by rho_{<=N}.

    With m given only tuples with |phi - m| <= window are kept. Runs over the
    n3 band, one slice per worker task.

    Raises:
        BudgetExceededError: if the unpruned tuple count exceeds the budget
    """
    budget = get_settings().enumeration_budget if budget is None else int(budget)
    p3 = band_points(scales.n3)
    requested = len(band_points(scales.n1)) * len(band_points(scales.n2)) * len(p3)
    if requested > budget:
        raise BudgetExceededError(requested, budget, "tensor tuples")
    N = max(scales.n1, scales.n2, scales.n3) if N is None else N
    n1, n2 = _pairs(scales)
    n12 = n1 + n2
    b1, b2 = bracket(n1), bracket(n2)
    rho12 = profile.radial(np.sqrt(np.sum(n1 * n1, axis=1)), N) * profile.radial(np.sqrt(np.sum(n2 * n2, axis=1)), N)
    live = rho12 > 0
    n1, n2, n12, b1, b2 = n1[live], n2[live], n12[live], b1[live], b2[live]

    def slice_at(j: int) -> TupleChunk:
        v3 = p3[j]
        if profile.radial(np.sqrt(float(v3 @ v3)), N) <= 0:
            return _empty_chunk()
        n = n12 + v3
        keep = np.ones(len(n), dtype=bool) if scales.n123 is None else in_band(n, scales.n123)
        phi = (signs.s123 * bracket(n[keep]) + signs.s1 * b1[keep] + signs.s2 * b2[keep]
               + signs.s3 * float(bracket(v3)))
        idx = np.flatnonzero(keep)
        if m is not None:
            hit = np.abs(phi - m) <= window + WINDOW_TOL
            idx, phi = idx[hit], phi[hit]
        return TupleChunk(n1[idx], n2[idx], np.broadcast_to(v3, (len(idx), 3)).copy(), phi)

    return map_ordered(slice_at, range(len(p3)), workers)


def _empty_chunk() -> TupleChunk:
    z = np.zeros((0, 3), dtype=np.int64)
    return TupleChunk(z, z, z, np.zeros(0))


def phase_histogram(scales: TensorScales, signs: Signs, N: Optional[int] = None,
                    budget: Optional[int] = None, workers: int = 1) -> Dict[int, int]:
    """Number of tuples per nearest integer of phi."""
    counts: Dict[int, int] = {}
    for chunk in enumerate_tuples(scales, signs, N, budget=budget, workers=workers):
        keys, c = np.unique(np.rint(chunk.phi).astype(np.int64), return_counts=True)
        for k, v in zip(keys.tolist(), c.tolist()):
            counts[k] = counts.get(k, 0) + v
    return counts


def build_tensor(
    which: str,
    scales: TensorScales,
    m: int,
    signs: Signs,
    s: float,
    N: Optional[int] = None,
    ladder: Optional[ParameterLadder] = None,
    potential: Optional[InteractionPotential] = None,
    window: float = 1.0,
    budget: Optional[int] = None,
    workers: int = 1,
) -> DenseTensor:
    """Exact truncated tensor over the axes (n, n1, n2, n3)."""
    ladder = ladder or ParameterLadder()
    V = potential or InteractionPotential()
    e1, e2, e3 = weight_exponents(which, ladder)
    chunks = [c for c in enumerate_tuples(scales, signs, N, m, window, budget, workers) if len(c.phi)]
    if not chunks:
        return DenseTensor.zero(TENSOR_AXES)
    n1 = np.concatenate([c.n1 for c in chunks])
    n2 = np.concatenate([c.n2 for c in chunks])
    n3 = np.concatenate([c.n3 for c in chunks])
    n = n1 + n2 + n3
    values = (bracket(n) ** (s - 1.0) * V.at(n1 + n2)
              * bracket(n1) ** (-e1) * bracket(n2) ** (-e2) * bracket(n3) ** (-e3))
    return DenseTensor.from_vectors(TENSOR_AXES, (n, n1, n2, n3), values)


def build_first_tensor(scales: TensorScales, m: int, signs: Signs, s: float, N: Optional[int] = None,
                       ladder: Optional[ParameterLadder] = None, **kwargs) -> DenseTensor:
    return build_tensor("first", scales, m, signs, s, N, ladder, **kwargs)


def build_second_tensor(scales: TensorScales, m: int, signs: Signs, s: float, N: Optional[int] = None,
                        ladder: Optional[ParameterLadder] = None, **kwargs) -> DenseTensor:
    return build_tensor("second", scales, m, signs, s, N, ladder, **kwargs)


def block_labels(h: DenseTensor) -> Tuple[np.ndarray, np.ndarray]:
    """Dyadic block of n12 and of n for every stored entry."""
    n12 = h.vectors("n1") + h.vectors("n2")
    n = h.vectors("n")
    return dyadic_block(n12), dyadic_block(n)


def dyadic_block(v: np.ndarray) -> np.ndarray:
    norm_sq = np.sum(np.asarray(v) ** 2, axis=-1)
    edges = 4 ** np.arange(0, 32, dtype=np.int64)
    return 2 ** np.searchsorted(edges, norm_sq, side="left")
