"""
Static spatial norms: Sobolev norms from coefficients, Besov/Holder block
suprema on oversampled physical grids, and regularity fits.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import fft

from src.core_tools.errors import InsufficientDataError, ResolutionError
from src.core_tools.stats import loglog_slope
from src.lattice_spectral.fields import SpectralField
from src.lattice_spectral.lattice import bracket_grid
from src.lattice_spectral.projectors import band_decomposition
from src.lattice_spectral.transforms import grid_sup


def sobolev_norm(f: SpectralField, s: float) -> float:
    """sqrt(sum <n>^{2s} |f(n)|^2)."""
    weights = bracket_grid(f.grid_radius) ** (2.0 * s)
    return float(np.sqrt(np.sum(weights * np.abs(f.coeffs) ** 2)))


def sup_grid_size(R: int) -> int:
    return fft.next_fast_len(2 * (2 * R + 1))


def besov_block_sups(f: SpectralField, grid_size: Optional[int] = None) -> List[Tuple[int, float]]:
    """[(N, max_x |P_N f(x)|)] on a grid oversampled at least twofold.

    Without an explicit grid size each block is cut to its own window first,
    so band N costs a grid of about 4N points per axis.

    Raises:
        ResolutionError: if grid_size < 2 (2R + 1)
    """
    R = f.grid_radius
    if grid_size is None:
        out = []
        for N, block in band_decomposition(f).items():
            r = min(N, R)
            out.append((N, grid_sup(block.resize(r), sup_grid_size(r))))
        return out
    M = int(grid_size)
    if M < 2 * (2 * R + 1):
        raise ResolutionError(f"grid size {M} under-resolves radius {R}; need >= {2 * (2 * R + 1)}")
    return [(N, grid_sup(block, M)) for N, block in band_decomposition(f).items()]


def fit_regularity(
    blocks: Sequence[Tuple[int, float]],
    grid_radius: Optional[int] = None,
    min_scale: int = 4,
) -> float:
    """Negated log-log slope of block sups over the window [min_scale, grid_radius / 2].

    Without a grid radius the window extends to the largest block.
    """
    if len(blocks) < 3:
        raise InsufficientDataError(f"need at least 3 blocks, got {len(blocks)}")
    top = grid_radius / 2.0 if grid_radius is not None else max(N for N, _ in blocks)
    chosen = [(N, v) for N, v in blocks if min_scale <= N <= top and v > 0]
    if len(chosen) < 3:
        raise InsufficientDataError(f"need 3 nonzero blocks in [{min_scale}, {top}], got {len(chosen)}")
    scales, sups = zip(*chosen)
    return -loglog_slope(scales, sups).slope


def field_regularity(f: SpectralField) -> float:
    return fit_regularity(besov_block_sups(f), grid_radius=f.grid_radius)


def holder_norm(f: SpectralField, s: float, grid_size: Optional[int] = None) -> float:
    """Besov-type C^s norm: max over N of N^s ||P_N f||_inf."""
    return max((N ** s) * v for N, v in besov_block_sups(f, grid_size))
