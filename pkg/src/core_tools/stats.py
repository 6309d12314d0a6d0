"""
Small statistical helpers shared by the Monte Carlo and verification code.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import fft, stats

from src.core_tools.errors import InsufficientDataError


def compensated_sum(values: Iterable[complex]) -> complex:
    """Error-compensated sum of real or complex values (math.fsum on each part)."""
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values).ravel()
    if np.iscomplexobj(arr):
        return complex(math.fsum(arr.real.tolist()), math.fsum(arr.imag.tolist()))
    return math.fsum(arr.tolist())


def mean_and_se(samples: Sequence[float]) -> tuple[float, float]:
    """Sample mean and its standard error."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise InsufficientDataError(f"need at least 2 samples, got {x.size}")
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def z_score(estimate: float, target: float, se: float) -> float:
    if se == 0.0:
        return 0.0 if estimate == target else math.copysign(math.inf, estimate - target)
    return (estimate - target) / se


def paired_z(before: Sequence[float], after: Sequence[float]) -> tuple[float, float]:
    """Mean shift after - before and its z-score from the paired differences.

    Returns:
        (mean_difference, z). When every difference vanishes z is 0.
    """
    diff = np.asarray(after, dtype=float) - np.asarray(before, dtype=float)
    mean, se = mean_and_se(diff)
    return mean, z_score(mean, 0.0, se)


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    points: int


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> SlopeFit:
    """Least-squares slope of log(y) against log(x), ignoring non-positive y."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    keep = (x > 0) & (y > 0) & np.isfinite(y)
    if np.count_nonzero(keep) < 2 or np.unique(x[keep]).size < 2:
        raise InsufficientDataError("need positive values at two distinct scales for a log-log fit")
    fit = stats.linregress(np.log(x[keep]), np.log(y[keep]))
    return SlopeFit(float(fit.slope), float(fit.intercept), int(np.count_nonzero(keep)))


def autocorrelation(series: Sequence[float]) -> np.ndarray:
    """Normalized autocorrelation function via zero-padded FFT."""
    x = np.asarray(series, dtype=float)
    x = x - x.mean()
    n = x.size
    size = fft.next_fast_len(2 * n)
    spec = fft.rfft(x, size)
    acf = fft.irfft(spec * np.conj(spec), size)[:n]
    if acf[0] == 0.0:
        return np.zeros(n)
    return acf / acf[0]


def integrated_autocorr_time(series: Sequence[float], window_factor: float = 5.0) -> float:
    """Integrated autocorrelation time with automatic windowing.

    The window is the smallest lag M with M >= window_factor * tau(M).
    """
    x = np.asarray(series, dtype=float)
    if x.size < 4:
        raise InsufficientDataError(f"need at least 4 samples, got {x.size}")
    rho = autocorrelation(x)
    taus = 2.0 * np.cumsum(rho) - 1.0
    for lag in range(1, x.size):
        if lag >= window_factor * taus[lag]:
            return float(max(taus[lag], 1.0))
    return float(max(taus[-1], 1.0))


def effective_sample_size(series: Sequence[float]) -> float:
    x = np.asarray(series, dtype=float)
    return float(x.size / integrated_autocorr_time(x))
