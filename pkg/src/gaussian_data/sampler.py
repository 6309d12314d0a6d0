"""
Gaussian free field sampler.

Positions carry g_n / <n> and velocities h_n, where g and h are independent
standard complex Gaussians with g_{-n} = conj(g_n) and a real standard normal
at n = 0.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from src.core_tools.errors import ParameterRangeError
from src.core_tools.workers import map_ordered
from src.gaussian_data.streams import SeededStream
from src.lattice_spectral.fields import PhaseState, SpectralField
from src.lattice_spectral.lattice import bracket_grid, half_lattice_mask


def standard_complex_field(rng: np.random.Generator, R: int) -> np.ndarray:
    """Conjugate-symmetric array of standard complex Gaussians (E|z|^2 = 1), real N(0,1) at n = 0."""
    shape = (2 * R + 1,) * 3
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    half = half_lattice_mask(R).copy()
    half[R, R, R] = False
    out = np.where(half, z, 0.0)
    out = out + np.conj(out[::-1, ::-1, ::-1])
    out[R, R, R] = np.sqrt(2.0) * z[R, R, R].real
    return out


def gff_positions(rng: np.random.Generator, R: int) -> SpectralField:
    """Position coefficients of a free-field sample, drawn from an existing generator."""
    return SpectralField(R, standard_complex_field(rng, R) / bracket_grid(R))


@dataclass(frozen=True, eq=False)
class GaussianData:
    state: PhaseState
    stream: SeededStream

    @property
    def pos(self) -> SpectralField:
        return self.state.pos

    @property
    def vel(self) -> SpectralField:
        return self.state.vel

    @property
    def grid_radius(self) -> int:
        return self.state.grid_radius

    @property
    def modes(self) -> np.ndarray:
        """The Gaussian family G_n used by chaos evaluation (the position coefficients)."""
        return self.state.pos.coeffs


def sample_gff(stream: SeededStream, grid_radius: int) -> GaussianData:
    if grid_radius < 1:
        raise ParameterRangeError(f"grid radius must be >= 1, got {grid_radius}")
    rng = stream.generator()
    pos = gff_positions(rng, grid_radius)
    vel = SpectralField(grid_radius, standard_complex_field(rng, grid_radius))
    return GaussianData(PhaseState(pos, vel), stream)


def sample_gff_ensemble(stream: SeededStream, grid_radius: int, count: int, workers: int = 1) -> List[GaussianData]:
    """count independent samples on the child streams 0..count-1."""
    return map_ordered(lambda i: sample_gff(stream.child(i), grid_radius), range(count), workers)
