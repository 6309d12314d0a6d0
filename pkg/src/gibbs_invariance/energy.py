"""
Renormalized potential energy of the truncated Hartree Hamiltonian.

E_N(u) = 1/4 sum V(n) |(:psi^2:)(n)|^2 - sum m_N(n) |psi(n)|^2 with
psi = P_{<=N} u. Its gradient is the renormalized nonlinearity, so the
truncated flow conserves 1/2 sum (<n>^2 |pos|^2 + |vel|^2) + E_N.
"""

import numpy as np

from src.lattice_spectral.fields import SpectralField
from src.lattice_spectral.lattice import SHARP, TruncationProfile, require_dyadic
from src.lattice_spectral.transforms import multiply
from src.potential_renorm.nonlinearity import truncate
from src.potential_renorm.potential import InteractionPotential
from src.potential_renorm.renorm import renorm_multiplier, wick_constant
from src.wave_dynamics.config import FlowConfig


def truncated_potential_energy(
    u: SpectralField,
    N: int,
    V: InteractionPotential,
    profile: TruncationProfile = SHARP,
) -> float:
    N = require_dyadic(N)
    psi = truncate(u, N, profile)
    r = psi.grid_radius
    square = multiply(psi, psi)
    centered = square - SpectralField.constant(square.grid_radius, wick_constant(N, profile))
    quartic = 0.25 * np.sum(V.grid(centered.grid_radius) * np.abs(centered.coeffs) ** 2)
    mass = np.sum(renorm_multiplier(r, N, V, profile) * np.abs(psi.coeffs) ** 2)
    return float(quartic - mass)


def potential_energy(u: SpectralField, cfg: FlowConfig) -> float:
    return truncated_potential_energy(u, cfg.N, cfg.potential, cfg.profile)
