"""
Renormalized square and renormalized Hartree nonlinearity of truncated fields.

All products are exact Fourier convolutions on padded grids, so the results
contain no aliasing for bandlimited inputs.
"""

from functools import lru_cache

import numpy as np

from src.core_tools.errors import GridOverflowError
from src.lattice_spectral.fields import SpectralField
from src.lattice_spectral.lattice import SHARP, TruncationProfile, require_dyadic
from src.lattice_spectral.projectors import project_leq
from src.lattice_spectral.transforms import multiply
from src.potential_renorm.potential import InteractionPotential
from src.potential_renorm.renorm import renorm_multiplier, wick_constant


def support_radius(N: int, profile: TruncationProfile = SHARP) -> int:
    """Window radius that holds the support of P_{<=N} under the profile."""
    return N if profile.kind == "sharp" else 2 * N


def truncate(u: SpectralField, N: int, profile: TruncationProfile = SHARP) -> SpectralField:
    """P_{<=N} u stored on the smallest window holding its support."""
    r = min(support_radius(N, profile), u.grid_radius)
    return project_leq(u, N, profile).resize(r)


def renormalized_square(u: SpectralField, N: int, profile: TruncationProfile = SHARP) -> SpectralField:
    """(P_{<=N} u)^2 - a_N on the grid of u.

    Raises:
        GridOverflowError: if the grid cannot hold twice the support radius of P_{<=N}
    """
    N = require_dyadic(N)
    R = u.grid_radius
    needed = 2 * support_radius(N, profile)
    if needed > R:
        raise GridOverflowError(f"renormalized square at N={N} needs grid radius >= {needed}, got {R}")
    psi = truncate(u, N, profile)
    square = multiply(psi, psi, out_radius=R)
    return square - SpectralField.constant(R, wick_constant(N, profile))


@lru_cache(maxsize=64)
def _linear_symbol(r: int, N: int, V: InteractionPotential, profile: TruncationProfile) -> np.ndarray:
    """a_N V(0) + 2 m_N(n) on the window of radius r."""
    out = wick_constant(N, profile) * V.at_zero + 2.0 * renorm_multiplier(r, N, V, profile)
    out.setflags(write=False)
    return out


def renormalized_nonlinearity(
    u: SpectralField,
    N: int,
    V: InteractionPotential,
    profile: TruncationProfile = SHARP,
) -> SpectralField:
    """P_{<=N}[(V * psi^2) psi - a_N V(0) psi - 2 M_N psi] with psi = P_{<=N} u, on the grid of u.

    Raises:
        GridOverflowError: if the support radius of P_{<=N} exceeds the grid radius
    """
    N = require_dyadic(N)
    R = u.grid_radius
    needed = support_radius(N, profile)
    if needed > R:
        raise GridOverflowError(f"nonlinearity at N={N} needs grid radius >= {needed}, got {R}")
    psi = truncate(u, N, profile)
    r = psi.grid_radius
    square = multiply(psi, psi)
    smoothed = square.scale_by(V.grid(square.grid_radius))
    cubic = multiply(smoothed, psi, out_radius=r)
    linear = psi.scale_by(_linear_symbol(r, N, V, profile))
    return project_leq(cubic - linear, N, profile).resize(R)
