"""
Oscillatory lattice sum with a sine factor,

    S(t, lam) = sum_n chi_N(n) int_J sin((t - t') <a + n>) cos((t - t') <n>) e^{i lam t'} f(|n|^2) dt',

where J = [0, t] clipped to an optional interval. The time integral is done in
closed form; the lattice sum runs over slabs of constant n_x, reduced to
(n_x, n_y^2 + n_z^2) classes when a lies on the first axis and to shells when
a = 0.
"""

from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import integrate

from src.core_tools.errors import InsufficientDataError, ParameterRangeError
from src.core_tools.stats import loglog_slope
from src.lattice_spectral.lattice import require_dyadic

RadialWeight = Callable[[np.ndarray], np.ndarray]

DEFAULT_LAMBDAS = tuple(np.linspace(-4.0, 4.0, 9))
DECAY_SCALES = (8, 16, 32, 64, 128, 256)
DECAY_LIMIT = -0.8
QUAD_STEP = 1e-3
MAX_SHIFT_FRACTION = 0.25


def decay3(norm_sq: np.ndarray) -> np.ndarray:
    """f(n) = <n>^{-3}."""
    return (1.0 + np.asarray(norm_sq, dtype=float)) ** -1.5


def default_times(T: float, count: int = 10) -> np.ndarray:
    return np.linspace(T / count, T, count)


def _segment(mu: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """int_lo^hi e^{i mu s} ds."""
    mu = np.asarray(mu, dtype=float)
    small = np.abs(mu) < 1e-12
    safe = np.where(small, 1.0, mu)
    val = (np.exp(1j * safe * hi) - np.exp(1j * safe * lo)) / (1j * safe)
    return np.where(small, hi - lo + 0j, val)


def _sine_kernel(kappa: np.ndarray, t: float, lam, lo: float, hi: float) -> np.ndarray:
    """int_lo^hi sin((t - s) kappa) e^{i lam s} ds."""
    return (np.exp(1j * kappa * t) * _segment(lam - kappa, lo, hi)
            - np.exp(-1j * kappa * t) * _segment(lam + kappa, lo, hi)) / 2j


def _time_factor(omega_shift: np.ndarray, omega: np.ndarray, t: float, lam,
                 interval: Optional[Tuple[float, float]]) -> np.ndarray:
    lo, hi = 0.0, t
    if interval is not None:
        lo, hi = max(lo, interval[0]), min(hi, interval[1])
    if hi <= lo:
        return np.zeros(np.broadcast(omega, lam).shape, dtype=complex)
    return 0.5 * (_sine_kernel(omega_shift + omega, t, lam, lo, hi)
                  + _sine_kernel(omega_shift - omega, t, lam, lo, hi))


def _in_band(norm_sq: np.ndarray, N: int) -> np.ndarray:
    if N == 1:
        return norm_sq <= 1
    return (4 * norm_sq > N * N) & (norm_sq <= N * N)


def _check_shift(a: Sequence[int], N: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    require_dyadic(N)
    if np.sqrt(np.sum(a * a)) > MAX_SHIFT_FRACTION * N:
        raise ParameterRangeError(f"|a| = {np.sqrt(np.sum(a * a)):.3g} is not small against N = {N}")
    return a


def _yz_norms(N: int) -> np.ndarray:
    k = np.arange(-N, N + 1)
    return (k[:, None] ** 2 + k[None, :] ** 2).ravel()


def _classes(a: np.ndarray, N: int, method: str):
    """Yield (|a+n|^2, |n|^2, multiplicity) arrays covering the band."""
    if method == "radial":
        q = np.bincount(_yz_norms(N))
        r3 = np.zeros(3 * N * N + 1, dtype=np.int64)
        for x in range(-N, N + 1):
            r3[x * x:x * x + len(q)] += q
        norm_sq = np.flatnonzero(r3)
        keep = _in_band(norm_sq, N)
        norm_sq = norm_sq[keep]
        yield norm_sq, norm_sq, r3[norm_sq]
        return
    if method == "axis":
        q_counts = np.bincount(_yz_norms(N))
        q = np.flatnonzero(q_counts)
        c = int(a[0])
        for x in range(-N, N + 1):
            norm_sq = x * x + q
            keep = _in_band(norm_sq, N)
            if keep.any():
                ns = norm_sq[keep]
                yield ns + 2 * c * x + c * c, ns, q_counts[q[keep]]
        return
    k = np.arange(-N, N + 1)
    y, z = np.meshgrid(k, k, indexing="ij")
    y, z = y.ravel(), z.ravel()
    for x in range(-N, N + 1):
        norm_sq = x * x + y * y + z * z
        keep = _in_band(norm_sq, N)
        if keep.any():
            shifted = (x + a[0]) ** 2 + (y[keep] + a[1]) ** 2 + (z[keep] + a[2]) ** 2
            yield shifted, norm_sq[keep], np.ones(int(np.count_nonzero(keep)), dtype=np.int64)


def _auto_method(a: np.ndarray) -> str:
    if not a.any():
        return "radial"
    if a[1] == 0 and a[2] == 0:
        return "axis"
    return "slab"


def sine_cancellation_grid(
    a: Sequence[int],
    N: int,
    times: Sequence[float],
    lambdas: Sequence[float] = DEFAULT_LAMBDAS,
    f: RadialWeight = decay3,
    interval: Optional[Tuple[float, float]] = None,
    method: str = "auto",
) -> np.ndarray:
    """S(t, lam) for every t in times and lam in lambdas, shape (len(times), len(lambdas)).

    Raises:
        ParameterRangeError: if |a| > N/4 or the method is unknown
    """
    a = _check_shift(a, N)
    method = _auto_method(a) if method == "auto" else method
    if method not in ("radial", "axis", "slab"):
        raise ParameterRangeError(f"unknown summation method {method!r}")
    if method == "radial" and a.any():
        raise ParameterRangeError("the shell reduction needs a = 0")
    if method == "axis" and (a[1] or a[2]):
        raise ParameterRangeError("the axis reduction needs a on the first axis")
    lam = np.asarray(lambdas, dtype=float)[None, :]
    out = np.zeros((len(times), lam.shape[1]), dtype=complex)
    for shifted, norm_sq, mult in _classes(a, N, method):
        omega_shift = np.sqrt(1.0 + shifted)[:, None]
        omega = np.sqrt(1.0 + norm_sq)[:, None]
        w = mult * f(norm_sq)
        for i, t in enumerate(times):
            out[i] += w @ _time_factor(omega_shift, omega, float(t), lam, interval)
    return out


def sine_cancellation_value(a, N: int, t: float, lam: float, f: RadialWeight = decay3,
                            interval: Optional[Tuple[float, float]] = None, method: str = "auto") -> complex:
    return complex(sine_cancellation_grid(a, N, [t], [lam], f, interval, method)[0, 0])


def sine_cancellation_sup(
    a: Sequence[int],
    N: int,
    T: float,
    lambdas: Sequence[float] = DEFAULT_LAMBDAS,
    f: RadialWeight = decay3,
    times: Optional[Sequence[float]] = None,
) -> float:
    """sup over the (t, lam) grid of |S(t, lam)|, with t in (0, T]."""
    times = default_times(T) if times is None else times
    return float(np.max(np.abs(sine_cancellation_grid(a, N, times, lambdas, f))))


def quadrature_value(a, N: int, t: float, lam: float, f: RadialWeight = decay3, step: float = QUAD_STEP) -> complex:
    """S(t, lam) with the time integral done by the trapezoid rule on a grid of the given step (small N only)."""
    a = _check_shift(a, N)
    if t <= 0:
        return 0j
    count = max(2, int(np.ceil(t / step)) + 1)
    s = np.linspace(0.0, t, count)
    total = 0j
    for shifted, norm_sq, mult in _classes(a, N, "slab"):
        omega_shift = np.sqrt(1.0 + shifted)[:, None]
        omega = np.sqrt(1.0 + norm_sq)[:, None]
        integrand = np.sin((t - s) * omega_shift) * np.cos((t - s) * omega) * np.exp(1j * lam * s)
        total += np.sum(mult * f(norm_sq) * integrate.trapezoid(integrand, s, axis=1))
    return complex(total)


def sine_decay(
    a: Sequence[int],
    scales: Sequence[int] = DECAY_SCALES,
    T: float = 1.0,
    lambdas: Sequence[float] = DEFAULT_LAMBDAS,
    f: RadialWeight = decay3,
) -> Tuple[pd.DataFrame, Optional[float]]:
    """Sup per scale and the log-log slope of the sup against N."""
    rows = [{"N": int(N), "sup": sine_cancellation_sup(a, int(N), T, lambdas, f)} for N in scales]
    frame = pd.DataFrame(rows)
    try:
        slope = loglog_slope(frame["N"], frame["sup"]).slope
    except InsufficientDataError:
        slope = None
    return frame, slope
