"""
Littlewood-Paley projectors on the frequency window.
"""

from typing import Dict

import numpy as np

from src.lattice_spectral.fields import SpectralField
from src.lattice_spectral.lattice import (
    SHARP,
    TruncationProfile,
    band_mask,
    dyadic_cover,
    dyadic_range,
    require_dyadic,
)


def project_leq(f: SpectralField, N: int, profile: TruncationProfile = SHARP) -> SpectralField:
    """P_{<=N} f: multiply coefficients by rho_N(n)."""
    N = require_dyadic(N)
    return f.scale_by(profile.weights(f.grid_radius, N))


def project_band(f: SpectralField, N: int) -> SpectralField:
    """P_N f = P_{<=N} f - P_{<=N/2} f with the sharp profile."""
    N = require_dyadic(N)
    return f.scale_by(band_mask(f.grid_radius, N))


def fattened_mask(R: int, N: int) -> np.ndarray:
    mask = np.zeros((2 * R + 1,) * 3, dtype=bool)
    for K in dyadic_range(N / 16.0, 16.0 * N):
        mask |= band_mask(R, K)
    return mask


def project_fattened(f: SpectralField, N: int) -> SpectralField:
    """Fattened projector: the union of bands K with N/16 <= K <= 16N."""
    N = require_dyadic(N)
    return f.scale_by(fattened_mask(f.grid_radius, N))


def window_scales(R: int) -> list:
    """Dyadic scales whose bands meet the window (|n| <= sqrt(3) R)."""
    return dyadic_cover(np.sqrt(3.0) * R)


def band_decomposition(f: SpectralField) -> Dict[int, SpectralField]:
    """{N: P_N f} over every band meeting the window; the blocks sum to f."""
    return {N: project_band(f, N) for N in window_scales(f.grid_radius)}
