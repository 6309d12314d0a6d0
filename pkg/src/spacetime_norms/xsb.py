"""
Fourier-restriction norms on sampled trajectories.

A trajectory on [0, T] is extended to [-T/2, 3T/2] and multiplied by a
raised-cosine cutoff equal to 1 on [0, T]. The time transform of the cutoff
trajectory is taken with zero padding; on the resulting (lambda, n) grid

    ||u||_{X^{s,b}}^2 = sum <n>^{2s} <|lambda| - <n>>^{2b} |u^(lambda, n)|^2 dlambda / 2pi,

so b = 0 and s = 0 give the L^2 norm in time and space of the cutoff trajectory.
The weight has a kink at lambda = 0, so the grid sum carries the matching
Euler-Maclaurin term; the remaining error is fourth order in dlambda.
"""

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import fft
from scipy.integrate import quad, trapezoid

from src.core_tools.errors import GridMismatchError, PaddingError, ParameterRangeError
from src.gaussian_data.propagator import half_wave
from src.lattice_spectral.fields import PhaseState, SpectralField
from src.lattice_spectral.lattice import bracket_grid, norm_sq_grid
from src.lattice_spectral.norms import sobolev_norm
from src.lattice_spectral.projectors import band_decomposition
from src.lattice_spectral.transforms import multiply
from src.wave_dynamics.config import Trajectory

MIN_PADDING = 4
DEFAULT_PADDING = 32
FFT_CHUNK = 1 << 22
QUAD_SPAN = 400.0


def cutoff(t, T: float) -> np.ndarray:
    """Raised-cosine bump: 1 on [0, T], falling to 0 at -T/2 and 3T/2."""
    t = np.asarray(t, dtype=float)
    edge = T / 2.0
    dist = np.clip(np.maximum(-t, t - T), 0.0, None) / edge
    return np.where(dist >= 1.0, 0.0, 0.5 * (1.0 + np.cos(np.pi * np.minimum(dist, 1.0))))


def extended_times(T: float, step: float) -> Tuple[np.ndarray, int]:
    """Grid k * step for k = -K .. J + K with J step = T and K step >= T/2; returns (times, K)."""
    J = int(round(T / step))
    if J < 1 or not math.isclose(J * step, T, rel_tol=1e-9):
        raise GridMismatchError(f"window length {T} is not a multiple of the step {step}")
    K = -(-J // 2)
    return step * np.arange(-K, J + K + 1), K


def _frame_field(frame) -> SpectralField:
    return frame.pos if isinstance(frame, PhaseState) else frame


@dataclass(frozen=True, eq=False)
class WindowedTrajectory:
    """Cutoff trajectory on the extended window, stored as (times, modes) samples."""

    T: float
    step: float
    grid_radius: int
    samples: np.ndarray
    padding: int = DEFAULT_PADDING

    def __post_init__(self):
        if self.padding < MIN_PADDING:
            raise PaddingError(f"zero padding factor must be >= {MIN_PADDING}, got {self.padding}")
        times, _ = extended_times(self.T, self.step)
        if self.samples.shape != (len(times), (2 * self.grid_radius + 1) ** 3):
            raise GridMismatchError(f"sample array {self.samples.shape} does not match the extended window")

    @classmethod
    def from_trajectory(cls, traj: Trajectory, padding: int = DEFAULT_PADDING) -> "WindowedTrajectory":
        """Even reflection at both ends of [0, T], then the cutoff."""
        if len(traj) < 2 or not np.isclose(traj.times[0], 0.0):
            raise GridMismatchError("a windowed trajectory needs at least two samples starting at t = 0")
        step, T = traj.step, float(traj.times[-1])
        times, K = extended_times(T, step)
        J = len(traj) - 1
        stack = traj.coeff_stack().reshape(len(traj), -1)
        index = np.arange(-K, J + K + 1)
        index = np.where(index < 0, -index, np.where(index > J, 2 * J - index, index))
        values = stack[np.clip(index, 0, J)] * cutoff(times, T)[:, None]
        return cls(T, step, traj.grid_radius, values, padding)

    @classmethod
    def from_function(
        cls,
        fn: Callable[[float], SpectralField],
        T: float,
        step: float,
        padding: int = DEFAULT_PADDING,
    ) -> "WindowedTrajectory":
        """Sample an exactly known evolution on the whole extended window."""
        times, _ = extended_times(T, step)
        weights = cutoff(times, T)
        frames = [fn(float(t)).coeffs.reshape(-1) * w for t, w in zip(times, weights)]
        R = fn(0.0).grid_radius
        return cls(T, step, R, np.stack(frames), padding)

    @classmethod
    def from_half_wave(
        cls,
        u0: SpectralField,
        T: float,
        step: float,
        sign: int = 1,
        padding: int = DEFAULT_PADDING,
    ) -> "WindowedTrajectory":
        return cls.from_function(lambda t: half_wave(u0, t, sign), T, step, padding)

    @property
    def times(self) -> np.ndarray:
        return extended_times(self.T, self.step)[0]

    def scaled(self, factor: complex) -> "WindowedTrajectory":
        return WindowedTrajectory(self.T, self.step, self.grid_radius, self.samples * factor, self.padding)

    def __add__(self, other: "WindowedTrajectory") -> "WindowedTrajectory":
        if other.samples.shape != self.samples.shape or other.step != self.step:
            raise GridMismatchError("windowed trajectories live on different grids")
        return WindowedTrajectory(self.T, self.step, self.grid_radius, self.samples + other.samples, self.padding)

    def localized(self, tau: float, bump: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> "WindowedTrajectory":
        """Multiply by psi(t / tau), psi a Gaussian bump by default."""
        bump = bump or (lambda x: np.exp(-x * x))
        weights = bump(self.times / tau)
        return WindowedTrajectory(self.T, self.step, self.grid_radius, self.samples * weights[:, None], self.padding)

    @cached_property
    def power(self) -> Tuple[np.ndarray, np.ndarray]:
        """(lambda grid, |u^(lambda, n)|^2 dlambda / 2pi) with shape (P,) and (P, modes)."""
        L, modes = self.samples.shape
        P = fft.next_fast_len(self.padding * L)
        power = np.empty((P, modes))
        chunk = max(1, FFT_CHUNK // P)
        for lo in range(0, modes, chunk):
            spectrum = fft.fft(self.samples[:, lo:lo + chunk], n=P, axis=0)
            power[:, lo:lo + chunk] = np.abs(spectrum) ** 2
        power *= self.step / P
        lambdas = 2.0 * np.pi * fft.fftfreq(P, d=self.step)
        return lambdas, power


def _weighted_sum(w: WindowedTrajectory, s: float, b: float, modulation) -> float:
    """sum <n>^{2s} (1 + modulation(lambda, <n>)^2)^b power, accumulated over mode chunks."""
    lambdas, power = w.power
    omega = bracket_grid(w.grid_radius).reshape(-1)
    chunk = max(1, FFT_CHUNK // len(lambdas))
    total = 0.0
    for lo in range(0, len(omega), chunk):
        om = omega[lo:lo + chunk]
        weights = (om ** (2.0 * s))[None, :] * (1.0 + modulation(lambdas[:, None], om[None, :]) ** 2) ** b
        total += float(np.sum(weights * power[:, lo:lo + chunk]))
    return total


def kink_correction(lambdas: np.ndarray, power_at_zero: np.ndarray, omega: np.ndarray, s: float, b: float) -> float:
    """dlambda/12 * sum <n>^{2s} p_n(0) [W'(0+) - W'(0-)] for W = <|lambda| - omega>^{2b}."""
    dlam = float(lambdas[1] - lambdas[0])
    jump = -4.0 * b * omega * (1.0 + omega ** 2) ** (b - 1.0)
    return dlam / 12.0 * float(np.sum(omega ** (2.0 * s) * power_at_zero * jump))


def xsb_norm(w: WindowedTrajectory, s: float, b: float) -> float:
    """sqrt(sum <n>^{2s} <|lambda| - <n>>^{2b} |u^|^2) over the discrete (lambda, n) grid."""
    lambdas, power = w.power
    omega = bracket_grid(w.grid_radius).reshape(-1)
    total = _weighted_sum(w, s, b, lambda lam, om: np.abs(lam) - om)
    total += kink_correction(lambdas, power[0], omega, s, b)
    return math.sqrt(max(total, 0.0))


def halfwave_norm(w: WindowedTrajectory, s: float, b: float, sign: int = 1) -> float:
    """The same sum with modulation lambda - sign <n>; bounds xsb_norm from above when b >= 0."""
    if sign not in (1, -1):
        raise ParameterRangeError(f"sign must be +1 or -1, got {sign}")
    return math.sqrt(_weighted_sum(w, s, b, lambda lam, om: lam - sign * om))


def profile_factor(omega: float, b: float, T: float, step: float, padding: int = DEFAULT_PADDING) -> float:
    """Windowed X^{0,b} norm of the single phase e^{i omega t}, on the grid xsb_norm uses."""
    times, _ = extended_times(T, step)
    samples = (cutoff(times, T) * np.exp(1j * omega * times))[:, None]
    single = WindowedTrajectory(T, step, 0, samples, padding)
    lambdas, power = single.power
    weights = (1.0 + (np.abs(lambdas) - omega) ** 2) ** b
    total = float(np.sum(weights * power[:, 0])) + kink_correction(lambdas, power[0], np.array([omega]), 0.0, b)
    return math.sqrt(max(total, 0.0))


def cutoff_transform(mu: float, T: float) -> float:
    """Closed form of the cutoff transform about its centre T/2.

    With k = 2 pi / T: chi^(mu) = (sin(mu T) + sin(mu T / 2)) k^2 / (mu (k^2 - mu^2)),
    continued by 3T/2 at mu = 0 and by -T/4 at mu = +-k.
    """
    mu = abs(float(mu))
    k = 2.0 * math.pi / T
    if mu < 1e-12:
        return 1.5 * T
    if abs(mu - k) < 1e-7 * k:
        return -0.25 * T
    return (math.sin(mu * T) + math.sin(0.5 * mu * T)) * k * k / (mu * (k * k - mu * mu))


def cutoff_transform_quad(mu: float, T: float) -> float:
    """Reference for cutoff_transform: the cosine transform of the cutoff by quadrature."""
    centred = lambda x: float(cutoff(T / 2.0 + x, T))
    if mu == 0.0:
        return 2.0 * quad(centred, 0.0, T)[0]
    return 2.0 * quad(centred, 0.0, T, weight="cos", wvar=mu)[0]


@lru_cache(maxsize=4096)
def profile_factor_quad(omega: float, b: float, T: float) -> float:
    """Continuous counterpart of profile_factor: int <|mu + omega| - omega>^{2b} |chi^(mu)|^2 dmu / 2pi.

    The range is cut into pieces one oscillation of chi^ long, with breaks at the kink mu = -omega.
    """
    span = max(QUAD_SPAN / T, 4.0 * omega)
    integrand = lambda mu: (1.0 + (abs(mu + omega) - omega) ** 2) ** b * cutoff_transform(mu, T) ** 2
    edges = np.union1d(np.arange(-span, span, 2.0 * math.pi / T), [-omega, 0.0, span])
    total = math.fsum(
        quad(integrand, lo, hi, epsabs=1e-14, epsrel=1e-12, limit=200)[0] for lo, hi in zip(edges[:-1], edges[1:])
    )
    return math.sqrt(total / (2.0 * math.pi))


def halfwave_factorized_norm(u0: SpectralField, s: float, b: float, T: float) -> float:
    """sqrt(sum <n>^{2s} |u0(n)|^2 profile_factor_quad(<n>)^2), one factor per distinct |n|^2."""
    R = u0.grid_radius
    nsq = norm_sq_grid(R)
    amplitude = np.abs(u0.coeffs) ** 2 * bracket_grid(R) ** (2.0 * s)
    total = 0.0
    for value in np.unique(nsq[amplitude > 0]):
        factor = profile_factor_quad(math.sqrt(1.0 + float(value)), float(b), float(T))
        total += factor ** 2 * float(np.sum(amplitude[nsq == value]))
    return math.sqrt(total)


def paired_highhigh_norm(lin: Trajectory, w: Trajectory, delta1: float) -> float:
    """sum over L1 ~ L2 (L1/2 <= L2 <= 2 L1) of ||P_{L1} lin * P_{L2} w||_{L^2_t H^{-4 delta1}}.

    Raises:
        GridMismatchError: if the trajectories have different windows or times
    """
    if lin.grid_radius != w.grid_radius or len(lin) != len(w) or not np.allclose(lin.times, w.times):
        raise GridMismatchError("paired norm needs trajectories on a shared grid and time axis")
    lin_blocks = [band_decomposition(_frame_field(f)) for f in lin.frames]
    w_blocks = [band_decomposition(_frame_field(f)) for f in w.frames]
    scales = list(lin_blocks[0].keys())
    total = 0.0
    for L1 in scales:
        for L2 in scales:
            if not L1 / 2 <= L2 <= 2 * L1:
                continue
            norms_sq = [
                sobolev_norm(multiply(a[L1], b[L2]), -4.0 * delta1) ** 2 for a, b in zip(lin_blocks, w_blocks)
            ]
            total += math.sqrt(trapezoid(norms_sq, lin.times)) if len(lin) > 1 else math.sqrt(norms_sq[0])
    return total


def localization_gain(w: WindowedTrajectory, tau: float, b1: float, b2: float, s: float = 0.0,
                      bump: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> float:
    """||psi(t/tau) F||_{X^{s,b1}} / (tau^{b2-b1} ||F||_{X^{s,b2}}); zero input gives 0."""
    if not 0.0 < tau <= 1.0:
        raise ParameterRangeError(f"tau must lie in (0, 1], got {tau}")
    if not b2 > b1:
        raise ParameterRangeError(f"need b2 > b1, got b1={b1}, b2={b2}")
    denom = tau ** (b2 - b1) * xsb_norm(w, s, b2)
    if denom == 0.0:
        return 0.0
    return xsb_norm(w.localized(tau, bump), s, b1) / denom


def localization_loss(w: WindowedTrajectory, tau: float, b: float, s: float = 0.0,
                      bump: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> float:
    """||psi(t/tau) F||_{X^{s,b}} / (tau^{1/2-b} ||F||_{X^{s,b}}) for b > 1/2; zero input gives 0."""
    if not 0.0 < tau <= 1.0:
        raise ParameterRangeError(f"tau must lie in (0, 1], got {tau}")
    if b <= 0.5:
        raise ParameterRangeError(f"the localization loss is stated for b > 1/2, got {b}")
    denom = tau ** (0.5 - b) * xsb_norm(w, s, b)
    if denom == 0.0:
        return 0.0
    return xsb_norm(w.localized(tau, bump), s, b) / denom
