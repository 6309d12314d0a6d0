"""
Septic pairing sums.

Frequencies n_1..n_7 are grouped as {1,2,3}, {4}, {5,6,7}. Paired positions
carry opposite frequencies; the inner sum runs over paired frequencies for a
fixed choice of the unpaired ones. Frequencies other than n_4 are truncated
to the ball of radius `box`.
"""

import itertools
import math
from typing import NamedTuple, Optional

import numpy as np

from src.core_tools.errors import BudgetExceededError, ParameterRangeError
from src.core_tools.settings import get_settings
from src.counting_lab.pairings import SEPTIC_PARTITION, Pairing
from src.counting_lab.phases import resonance_factor
from src.counting_lab.queries import ball_points, band_points, in_band
from src.lattice_spectral.lattice import bracket
from src.potential_renorm.potential import InteractionPotential, symmetrized_symbol

CHUNK = 1 << 18

_SIGNS = tuple(itertools.product((1, -1), repeat=3))


class SepticScales(NamedTuple):
    total: int
    n1234: int
    n567: int
    n4: int


def default_box(scales: SepticScales) -> int:
    return 2 * scales.n567


def cubic_resonance_weight(n1: np.ndarray, n2: np.ndarray, n3: np.ndarray, V: InteractionPotential) -> np.ndarray:
    """Sum over the eight inner sign patterns and all m of <m>^{-1} |V_S| <n_123>^{-1} prod <n_j>^{-1} on the window."""
    b1, b2, b3 = bracket(n1), bracket(n2), bracket(n3)
    b123 = bracket(n1 + n2 + n3)
    res = np.zeros(np.shape(b1))
    for s1, s2, s3 in _SIGNS:
        res += resonance_factor(b123 + s1 * b1 + s2 * b2 + s3 * b3)
    return res * np.abs(symmetrized_symbol(n1, n2, n3, V)) / (b123 * b1 * b2 * b3)


def _budget(requested: int, budget: Optional[int], what: str):
    budget = get_settings().enumeration_budget if budget is None else int(budget)
    if requested > budget:
        raise BudgetExceededError(requested, budget, what)


def septic_sum(
    pairing: Pairing,
    scales: SepticScales,
    V: InteractionPotential,
    s: float,
    box: Optional[int] = None,
    budget: Optional[int] = None,
) -> float:
    """Septic sum for an arbitrary pairing respecting {1,2,3},{4},{5,6,7}, by direct enumeration.

    An unpaired n_4 runs over its band; every other free frequency runs over the box.

    Raises:
        ParameterRangeError: if the pairing does not respect the partition
        BudgetExceededError: if the free frequencies span too many tuples
    """
    if pairing.size != 7 or not pairing.respects(SEPTIC_PARTITION):
        raise ParameterRangeError("septic sums need a pairing of 1..7 respecting {1,2,3},{4},{5,6,7}")
    box = default_box(scales) if box is None else box
    unpaired = list(pairing.unpaired)
    reps = [i for i, _ in pairing.pairs]
    free = unpaired + reps
    domains = [band_points(scales.n4) if j == 4 else ball_points(box) for j in free]
    sizes = [len(d) for d in domains]
    outer_size = int(np.prod(sizes[:len(unpaired)], dtype=np.int64))
    inner_size = int(np.prod(sizes[len(unpaired):], dtype=np.int64))
    total = outer_size * inner_size
    _budget(total, budget, "septic pairing sum")

    inner = np.zeros(outer_size)
    for start in range(0, total, CHUNK):
        lin = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        idx = np.unravel_index(lin, sizes)
        n = {j: d[i] for j, d, i in zip(free, domains, idx)}
        for i, j in pairing.pairs:
            n[j] = -n[i]
        n1234 = n[1] + n[2] + n[3] + n[4]
        n567 = n[5] + n[6] + n[7]
        keep = (in_band(n1234 + n567, scales.total) & in_band(n1234, scales.n1234)
                & in_band(n567, scales.n567) & in_band(n[4], scales.n4))
        if not keep.any():
            continue
        term = (np.abs(V.at(n1234[keep]))
                * cubic_resonance_weight(n[1][keep], n[2][keep], n[3][keep], V)
                / bracket(n[4][keep])
                * cubic_resonance_weight(n[5][keep], n[6][keep], n[7][keep], V))
        inner += np.bincount(lin[keep] // inner_size, weights=term, minlength=outer_size)

    outer_idx = np.unravel_index(np.arange(outer_size, dtype=np.int64), sizes[:len(unpaired)])
    n_nr = np.zeros((outer_size, 3), dtype=np.int64)
    for d, i in zip(domains, outer_idx):
        n_nr = n_nr + d[i]
    return math.fsum((bracket(n_nr) ** (2.0 * (s - 1.0)) * inner ** 2).tolist())


def paired_cubic_table(N567: int, V: InteractionPotential, box: int, budget: Optional[int] = None) -> np.ndarray:
    """Psi(k) = sum over n1 + n2 + n3 = k inside the box of the squared cubic weight, for k in the band N567."""
    pts = ball_points(box)
    ks = band_points(N567)
    P = len(pts)
    _budget(P * P * len(ks), budget, "septic pair table")
    psi = np.zeros(len(ks))
    pair_chunk = max(1, CHUNK // max(len(ks), 1))
    for start in range(0, P * P, pair_chunk):
        lin = np.arange(start, min(start + pair_chunk, P * P), dtype=np.int64)
        n1, n2 = pts[lin // P], pts[lin % P]
        n12 = n1 + n2
        for idx, k in enumerate(ks):
            n3 = k - n12
            keep = np.sum(n3 * n3, axis=1) <= box * box
            if keep.any():
                w = cubic_resonance_weight(n1[keep], n2[keep], n3[keep], V)
                psi[idx] += math.fsum((w * w).tolist())
    return psi


def septic_mirror_sum(
    scales: SepticScales,
    V: InteractionPotential,
    s: float,
    box: Optional[int] = None,
    budget: Optional[int] = None,
) -> float:
    """Septic sum for the pairing {(1,5), (2,6), (3,7)}.

    The unpaired frequency is n_4 = n_nr, the paired block satisfies
    n_567 = -n_123, and the reflected cubic weight equals the original one, so
    the inner sum reduces to a table over k = n_123.
    """
    box = default_box(scales) if box is None else box
    if scales.total != scales.n4:
        return 0.0
    psi = paired_cubic_table(scales.n567, V, box, budget)
    ks = band_points(scales.n567)
    n4 = band_points(scales.n4)
    if not len(ks):
        return 0.0
    n1234 = n4[:, None, :] + ks[None, :, :]
    weights = in_band(n1234, scales.n1234) * np.abs(V.at(n1234))
    inner = (weights @ psi) / bracket(n4)
    return math.fsum((bracket(n4) ** (2.0 * (s - 1.0)) * inner ** 2).tolist())


def septic_bound(scales: SepticScales, beta: float, eta: float, s: float) -> float:
    return (math.log(2.0 + scales.n4) ** 2
            * (scales.total ** (2.0 * (s - 0.5)) * scales.n567 ** (-2.0 * (beta - eta))
               + scales.total ** (-2.0 * (1.0 - s - eta)))
            * scales.n1234 ** (-2.0 * beta))
