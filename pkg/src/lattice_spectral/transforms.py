"""
Transforms between the frequency window and uniform physical grids on T^3,
and alias-free pointwise products of bandlimited fields.

Conventions: u(x) = sum_n f(n) e^{i n.x} and f(n) = mean over the grid of
u(x) e^{-i n.x}; scipy.fft with norm="forward" implements exactly this pair.
"""

from typing import Optional

import numpy as np
from scipy import fft

from src.core_tools.errors import ResolutionError
from src.lattice_spectral.fields import SpectralField


def min_grid_size(R: int) -> int:
    return 2 * R + 1


def embed(coeffs: np.ndarray, R: int, M: int) -> np.ndarray:
    """Place window coefficients on an M^3 FFT array at n mod M."""
    if M < 2 * R + 1:
        raise ResolutionError(f"grid size {M} cannot hold frequencies up to {R}")
    idx = np.arange(-R, R + 1) % M
    out = np.zeros((M, M, M), dtype=complex)
    out[np.ix_(idx, idx, idx)] = coeffs
    return out


def extract(spectrum: np.ndarray, R: int) -> np.ndarray:
    """Inverse of embed: read the window of radius R from an FFT array."""
    M = spectrum.shape[0]
    if M < 2 * R + 1:
        raise ResolutionError(f"grid size {M} cannot hold frequencies up to {R}")
    idx = np.arange(-R, R + 1) % M
    return spectrum[np.ix_(idx, idx, idx)]


def to_physical(f: SpectralField, M: Optional[int] = None, real: Optional[bool] = None) -> np.ndarray:
    """Values of f on the uniform grid x_j = 2 pi j / M (real part only for real fields)."""
    R = f.grid_radius
    M = fft.next_fast_len(2 * R + 1) if M is None else int(M)
    values = fft.ifftn(embed(f.coeffs, R, M), norm="forward")
    if real is None:
        real = f.is_real()
    return values.real if real else values


def to_spectral(values: np.ndarray, R: int) -> SpectralField:
    """Window coefficients of grid values (exact when the grid resolves radius R)."""
    return SpectralField(R, extract(fft.fftn(values, norm="forward"), R))


def product_grid_size(*radii: int) -> int:
    """Smallest fast grid size computing a product of fields with these radii without aliasing."""
    return fft.next_fast_len(2 * sum(radii) + 1)


def multiply(*fields: SpectralField, out_radius: Optional[int] = None) -> SpectralField:
    """Exact Fourier convolution of the fields, i.e. the pointwise product, on radius out_radius.

    The default output radius is the full support radius (sum of input radii).
    """
    radii = [f.grid_radius for f in fields]
    R_out = sum(radii) if out_radius is None else int(out_radius)
    M = product_grid_size(*radii)
    values = None
    for f in fields:
        v = fft.ifftn(embed(f.coeffs, f.grid_radius, M), norm="forward")
        values = v if values is None else values * v
    R_full = sum(radii)
    product = SpectralField(min(R_out, R_full), extract(fft.fftn(values, norm="forward"), min(R_out, R_full)))
    return product.resize(R_out)


def grid_sup(f: SpectralField, M: int) -> float:
    """max over the M^3 grid of |f(x)|."""
    return float(np.max(np.abs(to_physical(f, M, real=False)))) if f.norm_sq() > 0 else 0.0
