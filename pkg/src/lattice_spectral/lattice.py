"""
Frequency lattice helpers: brackets, cached coordinate grids, dyadic scales
and truncation profiles on the cubic window ||n||_inf <= R.
"""

from functools import lru_cache
from typing import Iterator, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.core_tools.errors import ParameterRangeError


def bracket(n) -> np.ndarray:
    """<n> = sqrt(1 + |n|^2) for vectors with a trailing axis of length 3."""
    n = np.asarray(n, dtype=float)
    return np.sqrt(1.0 + np.sum(n * n, axis=-1))


def bracket_sq(norm_sq) -> np.ndarray:
    return np.sqrt(1.0 + np.asarray(norm_sq, dtype=float))


def is_dyadic(N: int) -> bool:
    return isinstance(N, (int, np.integer)) and N >= 1 and (int(N) & (int(N) - 1)) == 0


def require_dyadic(N: int, name: str = "N") -> int:
    if not is_dyadic(N):
        raise ParameterRangeError(f"{name} must be a power of two >= 1, got {N!r}")
    return int(N)


def dyadic_range(lo: float, hi: float) -> Iterator[int]:
    """Dyadic integers K with lo <= K <= hi."""
    K = 1
    while K <= hi:
        if K >= lo:
            yield K
        K *= 2


def dyadic_cover(max_norm: float) -> list[int]:
    """Dyadic scales 1, 2, 4, ... up to the first one with K >= max_norm."""
    scales = [1]
    while scales[-1] < max_norm:
        scales.append(scales[-1] * 2)
    return scales


def band_of(norm_sq: int) -> int:
    """Dyadic scale N of the band N/2 < |n| <= N holding a frequency of squared norm norm_sq."""
    N = 1
    while N * N < norm_sq:
        N *= 2
    return N


@lru_cache(maxsize=32)
def lattice_axes(R: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Broadcastable integer coordinates of the window, each of shape (2R+1,)*3 after broadcasting."""
    k = np.arange(-R, R + 1)
    grids = np.meshgrid(k, k, k, indexing="ij", sparse=True)
    for g in grids:
        g.setflags(write=False)
    return grids[0], grids[1], grids[2]


@lru_cache(maxsize=32)
def norm_sq_grid(R: int) -> np.ndarray:
    kx, ky, kz = lattice_axes(R)
    out = (kx * kx + ky * ky + kz * kz).astype(np.int64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=32)
def bracket_grid(R: int) -> np.ndarray:
    out = bracket_sq(norm_sq_grid(R))
    out.setflags(write=False)
    return out


@lru_cache(maxsize=32)
def lattice_points(R: int) -> np.ndarray:
    """All window points as an (M, 3) integer array in C order of the coefficient array."""
    k = np.arange(-R, R + 1)
    pts = np.stack(np.meshgrid(k, k, k, indexing="ij"), axis=-1).reshape(-1, 3)
    pts.setflags(write=False)
    return pts


def ball_mask(R: int, N: int) -> np.ndarray:
    return norm_sq_grid(R) <= N * N


def band_mask(R: int, N: int) -> np.ndarray:
    """Sharp dyadic band: N/2 < |n| <= N, and |n| <= 1 for N = 1."""
    n2 = norm_sq_grid(R)
    if N == 1:
        return n2 <= 1
    return (4 * n2 > N * N) & (n2 <= N * N)


@lru_cache(maxsize=32)
def half_lattice_mask(R: int) -> np.ndarray:
    """Points with n lexicographically >= 0 (one representative of each +/- pair, plus 0)."""
    kx, ky, kz = lattice_axes(R)
    mask = (kx > 0) | ((kx == 0) & (ky > 0)) | ((kx == 0) & (ky == 0) & (kz >= 0))
    mask = np.broadcast_to(mask, (2 * R + 1,) * 3).copy()
    mask.setflags(write=False)
    return mask


def index_of(n, R: int) -> tuple[int, int, int]:
    n = tuple(int(c) for c in n)
    if max(abs(c) for c in n) > R:
        raise ParameterRangeError(f"frequency {n} outside window of radius {R}")
    return (n[0] + R, n[1] + R, n[2] + R)


class TruncationProfile(BaseModel):
    """Radial cutoff rho_N: sharp indicator of |n| <= N or a raised-cosine taper on (N, 2N)."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["sharp", "smooth"] = "sharp"
    inner_ratio: float = 1.0
    outer_ratio: float = 2.0

    def radial(self, radius, N: float) -> np.ndarray:
        r = np.asarray(radius, dtype=float)
        if self.kind == "sharp":
            return (r <= self.inner_ratio * N).astype(float)
        inner, outer = self.inner_ratio * N, self.outer_ratio * N
        t = np.clip((r - inner) / (outer - inner), 0.0, 1.0)
        return np.where(r <= inner, 1.0, np.where(r >= outer, 0.0, 0.5 * (1.0 + np.cos(np.pi * t))))

    def weights(self, R: int, N: float) -> np.ndarray:
        """rho_N on the whole window."""
        if self.kind == "sharp":
            return (norm_sq_grid(R) <= (self.inner_ratio * N) ** 2).astype(float)
        return self.radial(np.sqrt(norm_sq_grid(R)), N)

    def at(self, n, N: float) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        return self.radial(np.sqrt(np.sum(n * n, axis=-1)), N)


SHARP = TruncationProfile()
SMOOTH = TruncationProfile(kind="smooth")
