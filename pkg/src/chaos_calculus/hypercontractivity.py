"""
Monte Carlo moment checks for Gaussian chaoses: hypercontractivity ratios,
Orlicz-type Psi norms, moment/tail consistency and maxima bounds.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from src.chaos_calculus.kernels import ChaosKernel
from src.chaos_calculus.wick import eval_chaos, ito_isometry
from src.core_tools.errors import InsufficientDataError, ParameterRangeError
from src.core_tools.workers import map_ordered
from src.gaussian_data.sampler import sample_gff
from src.gaussian_data.streams import SeededStream

DEFAULT_MOMENTS = (2, 4, 6, 8)


def chaos_samples(
    f: ChaosKernel,
    count: int,
    stream: SeededStream,
    grid_radius: Optional[int] = None,
    workers: int = 1,
) -> np.ndarray:
    """I_k[f] on count independent free-field samples (child streams 0..count-1)."""
    R = max(1, f.max_frequency()) if grid_radius is None else grid_radius
    return np.array(map_ordered(lambda i: eval_chaos(f, sample_gff(stream.child(i), R)), range(count), workers))


def empirical_moment(values: np.ndarray, p: float) -> float:
    """(mean |X|^p)^{1/p}."""
    values = np.asarray(values)
    if values.size < 2:
        raise InsufficientDataError("need at least 2 samples for a moment estimate")
    return float(np.mean(np.abs(values) ** p) ** (1.0 / p))


def hypercontractivity_ratio(
    f: ChaosKernel,
    p: int,
    samples: int,
    stream: SeededStream,
    workers: int = 1,
) -> float:
    """||I_k[f]||_p / (p^{k/2} ||I_k[f]||_2), the L^2 norm taken from the Ito isometry."""
    if p < 2 or p % 2:
        raise ParameterRangeError(f"p must be an even integer >= 2, got {p}")
    norm2 = float(np.sqrt(ito_isometry(f, f).real))
    if norm2 == 0.0:
        return 0.0
    values = chaos_samples(f, samples, stream, workers=workers)
    return empirical_moment(values, p) / (p ** (f.order / 2.0) * norm2)


def psi_norm(values: np.ndarray, gamma: float, moments: Sequence[int] = DEFAULT_MOMENTS) -> float:
    """sup over the given p of p^{-1/gamma} ||Z||_p."""
    return max(p ** (-1.0 / gamma) * empirical_moment(values, p) for p in moments)


@dataclass(frozen=True)
class TailCheck:
    level: float
    empirical_tail: float
    moment_bound: float
    consistent: bool


def tail_consistency(values: np.ndarray, order: int, quantile: float = 0.99, slack: float = 10.0) -> TailCheck:
    """Compare the tail at the empirical quantile with exp(-(lambda / (e K))^{2/k}), K the Psi_{2/k} norm."""
    values = np.abs(np.asarray(values))
    level = float(np.quantile(values, quantile))
    empirical = float(np.mean(values >= level))
    K = psi_norm(values, 2.0 / max(order, 1))
    p = (level / (np.e * K)) ** (2.0 / max(order, 1)) if K > 0 else np.inf
    bound = float(np.exp(-p)) if p >= 2.0 else 1.0
    return TailCheck(level, empirical, bound, empirical <= slack * bound)


@dataclass(frozen=True)
class MaximaCheck:
    max_norm: float
    bound: float

    @property
    def ratio(self) -> float:
        return self.max_norm / self.bound if self.bound > 0 else 0.0


def maxima_psi_check(columns: np.ndarray, gamma: float, moments: Sequence[int] = DEFAULT_MOMENTS) -> MaximaCheck:
    """||max_j |Z_j| ||_Psi against e log(2+J)^{1/gamma} max_j ||Z_j||_Psi for columns of shape (J, samples)."""
    columns = np.abs(np.asarray(columns))
    J = columns.shape[0]
    lhs = psi_norm(columns.max(axis=0), gamma, moments)
    single = max(psi_norm(col, gamma, moments) for col in columns)
    return MaximaCheck(lhs, np.e * np.log(2.0 + J) ** (1.0 / gamma) * single)
