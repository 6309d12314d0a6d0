"""
Wick constant a_N and renormalization multiplier M_N.

a_N  = sum_k rho_N(k)^2 <k>^{-2}
m_N(n) = sum_k V(n + k) rho_N(k)^2 <k>^{-2}
"""

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import pandas as pd
from scipy.signal import fftconvolve

from src.core_tools.logger import LabLogger
from src.lattice_spectral.lattice import SHARP, TruncationProfile, bracket, bracket_grid, require_dyadic
from src.potential_renorm.potential import InteractionPotential

logger = LabLogger("Renormalization")


def covariance_weights(N: int, profile: TruncationProfile = SHARP) -> np.ndarray:
    """rho_N(k)^2 <k>^{-2} on the window of radius 2N (covers both profiles)."""
    K = 2 * N
    return profile.weights(K, N) ** 2 * bracket_grid(K) ** (-2.0)


@lru_cache(maxsize=64)
def wick_constant(N: int, profile: TruncationProfile = SHARP) -> float:
    N = require_dyadic(N)
    return math.fsum(covariance_weights(N, profile).ravel().tolist())


def renorm_multiplier(R: int, N: int, V: InteractionPotential, profile: TruncationProfile = SHARP) -> np.ndarray:
    """m_N on the window of radius R."""
    return _renorm_multiplier(int(R), require_dyadic(N), V, profile)


@lru_cache(maxsize=64)
def _renorm_multiplier(R: int, N: int, V: InteractionPotential, profile: TruncationProfile) -> np.ndarray:
    K = 2 * N
    weights = covariance_weights(N, profile)
    symbol = V.grid(R + K)
    # weights are even, so the correlation is a plain convolution
    out = fftconvolve(symbol, weights, mode="valid")
    out.setflags(write=False)
    return out


def renorm_symbol(n, N: int, V: InteractionPotential, profile: TruncationProfile = SHARP) -> float:
    """m_N(n) at a single frequency."""
    N = require_dyadic(N)
    K = 2 * N
    k = np.arange(-K, K + 1)
    kk = np.stack(np.meshgrid(k, k, k, indexing="ij"), axis=-1)
    shifted = kk + np.asarray(n, dtype=int)
    terms = V.at(shifted) * covariance_weights(N, profile)
    return math.fsum(terms.ravel().tolist())


def naive_renorm_symbol(n, N: int, V: InteractionPotential, profile: TruncationProfile = SHARP) -> float:
    """Reference double loop over the lattice for m_N(n)."""
    K = 2 * N
    n = tuple(int(c) for c in n)
    terms = []
    for k in itertools.product(range(-K, K + 1), repeat=3):
        rho = float(profile.at(k, N))
        if rho == 0.0:
            continue
        shifted = (n[0] + k[0], n[1] + k[1], n[2] + k[2])
        terms.append(float(V.at(shifted)) * rho * rho / float(bracket(k)) ** 2)
    return math.fsum(terms)


@dataclass(frozen=True)
class RenormTable:
    N: int
    beta: float
    a_N: float
    grid_radius: int
    m_N: np.ndarray

    def to_frame(self) -> pd.DataFrame:
        R = self.grid_radius
        k = np.arange(-R, R + 1)
        nx, ny, nz = np.meshgrid(k, k, k, indexing="ij")
        return pd.DataFrame({
            "nx": nx.ravel(),
            "ny": ny.ravel(),
            "nz": nz.ravel(),
            "m_N": self.m_N.ravel(),
        })

    def header(self) -> dict:
        return {"N": self.N, "beta": self.beta, "a_N": repr(self.a_N)}


def build_renorm_table(
    N: int,
    V: InteractionPotential,
    grid_radius: int | None = None,
    profile: TruncationProfile = SHARP,
) -> RenormTable:
    R = N if grid_radius is None else grid_radius
    table = RenormTable(
        N=N,
        beta=V.beta,
        a_N=wick_constant(N, profile),
        grid_radius=R,
        m_N=np.array(renorm_multiplier(R, N, V, profile)),
    )
    logger.debug("Renormalization table built", data={"N": N, "R": R, "a_N": table.a_N})
    return table
