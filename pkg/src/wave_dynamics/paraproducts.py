"""
Dyadic para-products and the very-low-frequency trilinear operator.
"""

from typing import Callable, Dict, Literal, Optional

from src.core_tools.errors import ParameterRangeError
from src.lattice_spectral.fields import SpectralField
from src.lattice_spectral.projectors import band_decomposition
from src.lattice_spectral.transforms import multiply
from src.potential_renorm.potential import InteractionPotential
from src.wave_dynamics.config import ParameterLadder

ParaKind = Literal["ll", "eq", "gg", "very_low", "not_very_low"]

_SLACK = 1e-12


def pair_selector(kind: ParaKind, eps: float) -> Callable[[int, int], bool]:
    """Predicate on the band pair (N1, N2) of f and g."""
    if kind == "ll":
        return lambda N1, N2: 8 * N1 <= N2
    if kind == "gg":
        return lambda N1, N2: N1 >= 8 * N2
    if kind == "eq":
        return lambda N1, N2: not (8 * N1 <= N2 or N1 >= 8 * N2)
    if kind == "very_low":
        return lambda N1, N2: N1 <= N2 ** eps + _SLACK
    if kind == "not_very_low":
        return lambda N1, N2: N1 > N2 ** eps + _SLACK
    raise ParameterRangeError(f"unknown para-product kind {kind!r}")


def _select(blocks: Dict[int, SpectralField], keep: Callable[[int], bool], R: int) -> Optional[SpectralField]:
    chosen = [block for N, block in blocks.items() if keep(N)]
    if not chosen:
        return None
    total = SpectralField.zeros(R)
    for block in chosen:
        total = total + block
    return total


def paraproduct(
    f: SpectralField,
    g: SpectralField,
    kind: ParaKind,
    ladder: Optional[ParameterLadder] = None,
    out_radius: Optional[int] = None,
) -> SpectralField:
    """sum over band pairs (N1, N2) selected by kind of P_{N1} f * P_{N2} g.

    The output window defaults to the full product radius R_f + R_g.
    """
    eps = (ladder or ParameterLadder()).eps
    keep = pair_selector(kind, eps)
    R_out = f.grid_radius + g.grid_radius if out_radius is None else out_radius
    f_blocks = band_decomposition(f)
    total = SpectralField.zeros(R_out)
    for N2, g_block in band_decomposition(g).items():
        f_part = _select(f_blocks, lambda N1: keep(N1, N2), f.grid_radius)
        if f_part is None:
            continue
        total = total + multiply(f_part, g_block, out_radius=R_out)
    return total


def box_very_low(
    f: SpectralField,
    g: SpectralField,
    h: SpectralField,
    V: InteractionPotential,
    ladder: Optional[ParameterLadder] = None,
    out_radius: Optional[int] = None,
) -> SpectralField:
    """sum over N1, N2 <= N3^eps of (V * (P_{N1} f P_{N2} g)) P_{N3} h."""
    eps = (ladder or ParameterLadder()).eps
    R_pair = f.grid_radius + g.grid_radius
    R_out = R_pair + h.grid_radius if out_radius is None else out_radius
    f_blocks, g_blocks = band_decomposition(f), band_decomposition(g)
    total = SpectralField.zeros(R_out)
    for N3, h_block in band_decomposition(h).items():
        low = lambda N: N <= N3 ** eps + _SLACK
        f_low = _select(f_blocks, low, f.grid_radius)
        g_low = _select(g_blocks, low, g.grid_radius)
        if f_low is None or g_low is None:
            continue
        pair = multiply(f_low, g_low).scale_by(V.grid(R_pair))
        total = total + multiply(pair, h_block, out_radius=R_out)
    return total


def box_not_very_low(
    f: SpectralField,
    g: SpectralField,
    h: SpectralField,
    V: InteractionPotential,
    ladder: Optional[ParameterLadder] = None,
    out_radius: Optional[int] = None,
) -> SpectralField:
    """(V * (f g)) h minus its very-low part."""
    R_pair = f.grid_radius + g.grid_radius
    R_out = R_pair + h.grid_radius if out_radius is None else out_radius
    full = multiply(multiply(f, g).scale_by(V.grid(R_pair)), h, out_radius=R_out)
    return full - box_very_low(f, g, h, V, ladder, R_out)
