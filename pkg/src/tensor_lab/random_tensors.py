"""
Contracted random tensors and the moment-method check.

Contracting the axes S of h against the normalized integrals
I~_k[+-_j, n_j : j in S] = prod <n_j> * I_k[...] leaves a random tensor over
the remaining axes. Its partition norm has p-th moments controlled by
N_max^theta * max over merged partitions of the deterministic norms * p^{k/2}.
"""

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import special

from src.core_tools.errors import GridMismatchError, ParameterRangeError, UnsupportedOrderError
from src.core_tools.stats import mean_and_se
from src.core_tools.workers import map_ordered
from src.gaussian_data.sampler import GaussianData, sample_gff
from src.gaussian_data.streams import SeededStream
from src.lattice_spectral.lattice import bracket
from src.tensor_lab.tensors import DenseTensor, merged_partitions, partition_label, tensor_norm

MAX_CONTRACTION = 2
THETA = 0.1
DEFAULT_PS = (2, 4, 8)


def _modes(sample: Union[GaussianData, np.ndarray]) -> Tuple[np.ndarray, int]:
    modes = sample.modes if isinstance(sample, GaussianData) else np.asarray(sample)
    return modes, (modes.shape[0] - 1) // 2


def normalized_integral(vectors: Sequence[np.ndarray], signs: Sequence[int],
                        sample: Union[GaussianData, np.ndarray]) -> np.ndarray:
    """I~_k at each row of the given (E, 3) frequency arrays, k = len(vectors) <= 2.

    Sign -1 on n_j means the conjugate mode G_{-n_j}.
    """
    k = len(vectors)
    if k > MAX_CONTRACTION:
        raise UnsupportedOrderError(f"contractions of order <= {MAX_CONTRACTION} only, got {k}")
    modes, R = _modes(sample)
    if k == 0:
        raise ParameterRangeError("nothing to contract")
    signed = [int(s) * np.asarray(v, dtype=np.int64) for v, s in zip(vectors, signs)]
    if any(len(v) and np.abs(v).max() > R for v in signed):
        raise GridMismatchError(f"contraction frequencies leave the sample window of radius {R}")
    g = [modes[v[:, 0] + R, v[:, 1] + R, v[:, 2] + R] for v in signed]
    norm = np.prod([bracket(v) for v in signed], axis=0)
    if k == 1:
        return norm * g[0]
    paired = np.all(signed[0] + signed[1] == 0, axis=1)
    return norm * (g[0] * g[1] - paired * bracket(signed[0]) ** (-2.0))


def contracted_random_tensor(
    h: DenseTensor,
    contraction: Mapping[str, int],
    sample: Union[GaussianData, np.ndarray],
) -> DenseTensor:
    """h_c over the axes outside the contraction, summing h against I~_k on the contracted ones.

    Args:
        h: Tensor to contract.
        contraction: Contracted axis name -> sign.
        sample: Gaussian data (or a mode array) supplying the modes.

    Raises:
        UnsupportedOrderError: for more than two contracted axes
    """
    S = tuple(contraction)
    if len(S) > MAX_CONTRACTION:
        raise UnsupportedOrderError(f"contractions of order <= {MAX_CONTRACTION} only, got {len(S)}")
    unknown = [a for a in S if a not in h.axes]
    if unknown:
        raise ParameterRangeError(f"axes {unknown} are not axes of the tensor {h.axes}")
    keep_axes = tuple(a for a in h.axes if a not in S)
    if not keep_axes:
        raise ParameterRangeError("at least one axis must stay uncontracted")
    keep_pos = [h.axes.index(a) for a in keep_axes]
    points = tuple(h.points[p] for p in keep_pos)
    if not len(h.values):
        return DenseTensor(keep_axes, points, np.zeros((0, len(keep_axes)), dtype=np.int64), np.zeros(0))
    if S:
        factor = normalized_integral([h.vectors(a) for a in S], [contraction[a] for a in S], sample)
        values = h.values * factor
    else:
        values = h.values
    index = h.index[:, keep_pos]
    uniq, inverse = np.unique(index, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    summed = (np.bincount(inverse, weights=values.real, minlength=len(uniq))
              + 1j * np.bincount(inverse, weights=values.imag, minlength=len(uniq)))
    return DenseTensor(keep_axes, points, uniq, summed)


def complex_gaussian_moment(p: float) -> float:
    """E|g|^p for a standard complex Gaussian (E|g|^2 = 1)."""
    return float(special.gamma(1.0 + p / 2.0))


def growth_limit(k: int, p_low: float = 4.0, p_high: float = 8.0) -> float:
    """Hypercontractive ceiling on ||X||_{p_high} / ||X||_{p_low} for order-k chaos."""
    return ((p_high - 1.0) / (p_low - 1.0)) ** (k / 2.0)


@dataclass
class MomentCheck:
    rows: List[Dict]
    deterministic: Dict[str, float]
    merged_max: float
    n_max: float
    order: int

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows)

    def ratio(self, p: float) -> float:
        return next(r["ratio"] for r in self.rows if r["p"] == p)

    def moment(self, p: float) -> float:
        return next(r["moment"] for r in self.rows if r["p"] == p)

    @property
    def max_ratio(self) -> float:
        return max(r["ratio"] for r in self.rows)

    def growth(self, p_low: float = 4, p_high: float = 8) -> Optional[float]:
        low, high = self.moment(p_low), self.moment(p_high)
        return high / low if low > 0 else None


def contracted_norms(
    h: DenseTensor,
    contraction: Mapping[str, int],
    A: Sequence[str],
    B: Sequence[str],
    samples: int,
    stream: SeededStream,
    grid_radius: Optional[int] = None,
    workers: int = 1,
) -> np.ndarray:
    """||h_c||_{A -> B} on independent samples."""
    R = grid_radius or max(1, int(max((np.abs(h.vectors(a)).max(initial=0) for a in contraction), default=1)))

    def one(i: int) -> float:
        hc = contracted_random_tensor(h, contraction, sample_gff(stream.child(i), R))
        return tensor_norm(hc, A, B)

    return np.asarray(map_ordered(one, range(samples), workers), dtype=float)


def moment_method_check(
    h: DenseTensor,
    contraction: Mapping[str, int],
    A: Sequence[str],
    B: Sequence[str],
    ps: Sequence[int] = DEFAULT_PS,
    samples: int = 200,
    stream: Optional[SeededStream] = None,
    theta: float = THETA,
    workers: int = 1,
) -> MomentCheck:
    """
    Monte Carlo p-th moments of ||h_c||_{A -> B} divided by N_max^theta * merged max * p^{k/2}.

    Raises:
        ParameterRangeError: if (A, B) does not partition the axes left after contraction
    """
    stream = stream or SeededStream(seed=0, stream_id=6)
    remaining = [a for a in h.axes if a not in contraction]
    if set(A) | set(B) != set(remaining) or set(A) & set(B):
        raise ParameterRangeError(f"({tuple(A)}, {tuple(B)}) is not a partition of {tuple(remaining)}")
    k = len(contraction)
    deterministic = {partition_label(X, Y): tensor_norm(h, X, Y) for X, Y in merged_partitions(h.axes, A, B)}
    merged_max = max(deterministic.values(), default=0.0)
    n_max = max(h.max_frequency_norm(), 1.0)
    norms = contracted_norms(h, contraction, A, B, samples, stream, workers=workers)

    rows = []
    for p in ps:
        moment = float(np.mean(norms ** p) ** (1.0 / p))
        _, se = mean_and_se(norms ** p)
        scale = n_max ** theta * merged_max * p ** (k / 2.0)
        rows.append({"p": p, "moment": moment, "moment_p_se": se, "merged_max": merged_max,
                     "n_max": n_max, "ratio": moment / scale if scale > 0 else 0.0})
    return MomentCheck(rows, deterministic, merged_max, n_max, k)
