"""
Linear Klein-Gordon propagator (d_t^2 + 1 - Delta) u = 0 and the half-wave groups.
"""

from typing import Union

import numpy as np

from src.core_tools.errors import ParameterRangeError
from src.gaussian_data.sampler import GaussianData
from src.lattice_spectral.fields import PhaseState, SpectralField
from src.lattice_spectral.lattice import bracket_grid


def linear_flow(d: Union[GaussianData, PhaseState], t: float) -> PhaseState:
    """Exact per-mode rotation by angle t<n> in the (<n> pos, vel) plane."""
    state = d.state if isinstance(d, GaussianData) else d
    w = bracket_grid(state.grid_radius)
    c, s = np.cos(t * w), np.sin(t * w)
    p, v = state.pos.coeffs, state.vel.coeffs
    return PhaseState(
        state.pos.with_coeffs(c * p + s / w * v),
        state.vel.with_coeffs(-w * s * p + c * v),
    )


def half_wave(u0: SpectralField, t: float, sign: int = 1) -> SpectralField:
    """e^{+-it<n>} applied to every coefficient; the output is a complex field in general."""
    if sign not in (1, -1):
        raise ParameterRangeError(f"sign must be +1 or -1, got {sign}")
    return u0.scale_by(np.exp(sign * 1j * t * bracket_grid(u0.grid_radius)))


def quadratic_energy(state: PhaseState) -> float:
    """sum (<n>^2 |pos|^2 + |vel|^2), conserved by linear_flow."""
    w2 = bracket_grid(state.grid_radius) ** 2
    return float(np.sum(w2 * np.abs(state.pos.coeffs) ** 2 + np.abs(state.vel.coeffs) ** 2))
