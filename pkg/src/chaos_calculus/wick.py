"""
Pathwise evaluation of multiple stochastic integrals as Wick polynomials in the
Gaussian modes, and the closed-form Ito isometry.

Covariance of the mode family: E[G_n G_m] = 1{n + m = 0} <n>^{-2}. Two families
a, b built by `correlated_family` have cross covariance C(n) <n>^{-2}.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from src.chaos_calculus.kernels import DEFAULT_FAMILY, ChaosKernel, Vec
from src.core_tools.errors import GridMismatchError, UnsupportedOrderError
from src.core_tools.stats import compensated_sum
from src.gaussian_data.sampler import GaussianData, gff_positions
from src.gaussian_data.streams import SeededStream
from src.lattice_spectral.lattice import SHARP, TruncationProfile, bracket, lattice_points

Correlation = Callable[[np.ndarray], np.ndarray]

MAX_EVAL_ORDER = 4


@dataclass(frozen=True, eq=False)
class ModeFamilies:
    """Jointly Gaussian mode families on a common window."""

    grid_radius: int
    modes: Mapping[str, np.ndarray]
    correlation: Optional[Correlation] = None


def family_factor(fam1: str, fam2: str, n: np.ndarray, correlation: Optional[Correlation]) -> np.ndarray:
    """Correlation between families fam1 and fam2 at frequencies n, shape n.shape[:-1]."""
    n = np.asarray(n)
    if fam1 == fam2:
        return np.ones(n.shape[:-1])
    if correlation is None:
        return np.zeros(n.shape[:-1])
    return np.asarray(correlation(n), dtype=float)


def as_families(data: Union[GaussianData, ModeFamilies, np.ndarray]) -> ModeFamilies:
    if isinstance(data, ModeFamilies):
        return data
    if isinstance(data, GaussianData):
        return ModeFamilies(data.grid_radius, {DEFAULT_FAMILY: data.modes})
    arr = np.asarray(data)
    return ModeFamilies((arr.shape[0] - 1) // 2, {DEFAULT_FAMILY: arr})


@lru_cache(maxsize=None)
def partial_matchings(k: int) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
    """Every set of disjoint pairs of {0, ..., k-1}, the empty matching included."""

    def extend(remaining: Tuple[int, ...]) -> List[Tuple[Tuple[int, int], ...]]:
        if len(remaining) < 2:
            return [()]
        first, rest = remaining[0], remaining[1:]
        out = list(extend(rest))
        for idx, partner in enumerate(rest):
            others = rest[:idx] + rest[idx + 1:]
            out.extend(((first, partner),) + m for m in extend(others))
        return out

    return tuple(extend(tuple(range(k))))


def eval_chaos(f: ChaosKernel, data: Union[GaussianData, ModeFamilies, np.ndarray]) -> complex:
    """I_k[f] evaluated on one sample as a Wick polynomial.

    Raises:
        UnsupportedOrderError: for order > 4
        GridMismatchError: if the kernel support leaves the sample window
    """
    if f.order > MAX_EVAL_ORDER:
        raise UnsupportedOrderError(f"pathwise evaluation supports order <= {MAX_EVAL_ORDER}, got {f.order}")
    g = f.canonical()
    if g.order == 0:
        return complex(g.entries.get((), 0.0))
    if not g.entries:
        return 0j
    fam = as_families(data)
    R = fam.grid_radius
    if g.max_frequency() > R:
        raise GridMismatchError(f"kernel reaches frequency {g.max_frequency()} beyond sample radius {R}")

    keys = np.array(list(g.entries.keys()), dtype=np.int64)
    coeffs = np.array(list(g.entries.values()), dtype=complex)
    idx = keys + R
    slots = [fam.modes[g.families[j]][idx[:, j, 0], idx[:, j, 1], idx[:, j, 2]] for j in range(g.order)]

    total = np.zeros(len(coeffs), dtype=complex)
    for matching in partial_matchings(g.order):
        term = np.ones(len(coeffs), dtype=complex)
        matched = set()
        for i, j in matching:
            ni, nj = keys[:, i], keys[:, j]
            cov = np.all(ni + nj == 0, axis=1) * bracket(ni) ** (-2.0)
            term = term * cov * family_factor(g.families[i], g.families[j], ni, fam.correlation)
            matched.update((i, j))
        for l in range(g.order):
            if l not in matched:
                term = term * slots[l]
        total += (-1) ** len(matching) * term
    return complex(compensated_sum(coeffs * total))


def ito_isometry(
    f: ChaosKernel,
    g: ChaosKernel,
    conjugate: bool = True,
    correlation: Optional[Correlation] = None,
) -> complex:
    """E[I_k[f] conj(I_l[g])] in closed form (or E[I_k[f] I_l[g]] with conjugate=False).

    For one family this is k! sum f~(n) conj(g~(n)) prod <n_j>^{-2}.
    """
    if f.order != g.order:
        return 0j
    F, G = f.canonical(), g.canonical()
    k = F.order
    if k == 0:
        fv, gv = complex(F.entries.get((), 0.0)), complex(G.entries.get((), 0.0))
        return fv * (np.conj(gv) if conjugate else gv)
    terms = []
    for key, fv in F.entries.items():
        weights = np.prod([float(bracket(n)) ** (-2.0) for n in key])
        for perm in itertools.permutations(range(k)):
            m: List[Vec] = [None] * k
            for i, p in enumerate(perm):
                m[p] = key[i] if conjugate else (-key[i][0], -key[i][1], -key[i][2])
            gv = G.entries.get(tuple(m))
            if gv is None:
                continue
            factor = 1.0
            for i, p in enumerate(perm):
                factor *= float(family_factor(F.families[i], G.families[p], np.array(key[i]), correlation))
            terms.append(fv * (np.conj(gv) if conjugate else gv) * weights * factor)
    return complex(compensated_sum(terms)) if terms else 0j


def correlation_grid(C: Correlation, R: int) -> np.ndarray:
    return np.asarray(C(lattice_points(R)), dtype=float).reshape((2 * R + 1,) * 3)


def correlated_family(
    base: GaussianData,
    C: Correlation,
    stream: SeededStream,
    labels: Tuple[str, str] = ("a", "b"),
) -> ModeFamilies:
    """Families a = base modes and b = C a + sqrt(1 - C^2) Z with Z an independent free field."""
    R = base.grid_radius
    c = correlation_grid(C, R)
    z = gff_positions(stream.generator(), R).coeffs
    a = base.modes
    return ModeFamilies(R, {labels[0]: a, labels[1]: c * a + np.sqrt(np.clip(1.0 - c * c, 0.0, None)) * z}, C)


def square_kernel(n: Vec, N: int, profile: TruncationProfile = SHARP) -> ChaosKernel:
    """Order-2 kernel whose integral is the n-th coefficient of the renormalized square at level N."""
    r = N if profile.kind == "sharp" else 2 * N
    pts = lattice_points(r)
    n_arr = np.asarray(n, dtype=np.int64)
    partner = n_arr - pts
    weight = profile.at(pts, N) * profile.at(partner, N)
    keep = weight > 0
    entries: Dict[Tuple[Vec, Vec], complex] = {}
    for n1, n2, w in zip(pts[keep], partner[keep], weight[keep]):
        entries[(tuple(int(c) for c in n1), tuple(int(c) for c in n2))] = float(w)
    return ChaosKernel(2, entries, symmetric=True)
