"""
Stochastic-time Gaussian process W_s(n) with smooth frequency truncation.

The stochastic time axis [0, s_max] is cut into J cells. On each cell the mode
n receives an independent complex Gaussian increment of variance
(rho_{s_{j+1}}(n)^2 - rho_{s_j}(n)^2) <n>^{-2}, so the terminal value has the
free-field variance <n>^{-2} once s_max covers the window.
"""

from dataclasses import dataclass

import numpy as np

from src.core_tools.errors import ParameterRangeError
from src.gaussian_data.sampler import standard_complex_field
from src.gaussian_data.streams import SeededStream
from src.lattice_spectral.fields import SpectralField
from src.lattice_spectral.lattice import SMOOTH, TruncationProfile, bracket_grid, index_of, norm_sq_grid


def profile_at_time(R: int, s: float, profile: TruncationProfile = SMOOTH) -> np.ndarray:
    """rho_s(n) on the window, with rho_0 = 0 and rho_s(0) = 1 for s > 0."""
    if s <= 0.0:
        return np.zeros((2 * R + 1,) * 3)
    return profile.radial(np.sqrt(norm_sq_grid(R)), s)


def cell_variances(R: int, s_grid: np.ndarray, profile: TruncationProfile = SMOOTH) -> np.ndarray:
    """Per-cell, per-mode increment variances, shape (J, 2R+1, 2R+1, 2R+1)."""
    rho_sq = np.stack([profile_at_time(R, s, profile) ** 2 for s in s_grid])
    return np.diff(rho_sq, axis=0) * bracket_grid(R) ** (-2.0)


@dataclass(frozen=True, eq=False)
class ProcessPath:
    grid_radius: int
    s_grid: np.ndarray
    variances: np.ndarray
    increments: np.ndarray

    @property
    def cells(self) -> int:
        return len(self.s_grid) - 1

    def value_at(self, j: int) -> SpectralField:
        """W at stochastic time s_j."""
        return SpectralField(self.grid_radius, self.increments[:j].sum(axis=0))

    def terminal_modes(self) -> SpectralField:
        return self.value_at(self.cells)

    def mode_increments(self, n) -> np.ndarray:
        return self.increments[(slice(None),) + index_of(n, self.grid_radius)]

    def mode_variances(self, n) -> np.ndarray:
        return self.variances[(slice(None),) + index_of(n, self.grid_radius)]


def default_s_max(R: int) -> float:
    return 2.0 * np.sqrt(3.0) * R


def sample_process_path(
    stream: SeededStream,
    grid_radius: int,
    cells: int = 32,
    s_max: float | None = None,
    profile: TruncationProfile = SMOOTH,
) -> ProcessPath:
    if cells < 1:
        raise ParameterRangeError(f"need at least one stochastic-time cell, got {cells}")
    R = grid_radius
    s_grid = np.linspace(0.0, default_s_max(R) if s_max is None else s_max, cells + 1)
    variances = cell_variances(R, s_grid, profile)
    rng = stream.generator()
    increments = np.stack([standard_complex_field(rng, R) for _ in range(cells)]) * np.sqrt(variances)
    return ProcessPath(R, s_grid, variances, increments)


def offdiagonal_double_integral(path: ProcessPath, n1, n2) -> complex:
    """sum over cells i != j of dW_i(n1) dW_j(n2), the discrete second-order iterated integral."""
    a = path.mode_increments(n1)
    b = path.mode_increments(n2)
    return complex(a.sum() * b.sum() - np.sum(a * b))


def offdiagonal_second_moment(path: ProcessPath, n) -> float:
    """Exact E|sum_{i != j} dW_i(n) dW_j(-n)|^2 for n != 0 on the path's cell grid."""
    v = path.mode_variances(n)
    return float(v.sum() ** 2 - np.sum(v * v))
