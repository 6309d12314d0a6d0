"""
Catalogue of the counting and weighted-sum estimates.

Every entry names its dyadic scales, a default grid of scale tuples that
exact enumeration can reach, a left-hand side evaluated exactly for one
sampled choice of signs and fixed vectors, and the closed-form right-hand
side. Sup over m is taken exactly from the window histogram.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import signal

from src.core_tools.errors import BudgetExceededError, ParameterRangeError
from src.core_tools.settings import get_settings
from src.counting_lab.enumeration import sup_over_windows
from src.counting_lab.freq_scale import ScaleTuple, achievable, scale_ratio, triangle_achievable
from src.counting_lab.phases import LinearForm, PhaseSpec, PhaseWindow, cubic_phase, resonance_factor
from src.counting_lab.queries import Annulus, CountingQuery, Variable, ball_points, band_points
from src.counting_lab.septic import SepticScales, septic_bound, septic_mirror_sum
from src.lattice_spectral.lattice import band_mask, bracket, bracket_grid
from src.potential_renorm.potential import InteractionPotential, symmetrized_symbol
from src.wave_dynamics.config import ParameterLadder

Scales = Tuple[int, ...]

CHUNK = 1 << 20


class CountingContext(BaseModel):
    model_config = ConfigDict(frozen=True)

    beta: float = Field(default=0.4, gt=0.0, lt=1.0)
    ladder: ParameterLadder = Field(default_factory=ParameterLadder)
    budget: Optional[int] = Field(default=None, gt=0)
    workers: int = Field(default=1, ge=1)

    @property
    def potential(self) -> InteractionPotential:
        return InteractionPotential(beta=self.beta)

    @property
    def eta(self) -> float:
        return self.ladder.eta

    def resolved_budget(self) -> int:
        return get_settings().enumeration_budget if self.budget is None else self.budget


@dataclass(frozen=True)
class LemmaSpec:
    lemma_id: str
    scale_names: Tuple[str, ...]
    grid: Tuple[Scales, ...]
    lhs: Callable[[Scales, np.random.Generator, CountingContext], float]
    bound: Callable[[Dict[str, int], CountingContext], float]
    randomized: bool = True
    note: str = ""

    def named(self, scales: Scales) -> Dict[str, int]:
        if len(scales) != len(self.scale_names):
            raise ParameterRangeError(f"{self.lemma_id} takes scales {self.scale_names}, got {scales}")
        return dict(zip(self.scale_names, scales))


def _signs(rng: np.random.Generator, k: int) -> Tuple[int, ...]:
    return tuple(int(x) for x in rng.choice((-1, 1), size=k))


def _pick(rng: np.random.Generator, points: np.ndarray) -> np.ndarray:
    return points[rng.integers(len(points))]


def _med(*xs: float) -> float:
    return sorted(xs)[len(xs) // 2]


def _form(*names: str, **weighted: int) -> LinearForm:
    return LinearForm.of(*names, **weighted)


def _sup(q: CountingQuery, ctx: CountingContext) -> float:
    return sup_over_windows(q, ctx.budget, ctx.workers)


# basic and two-ball counting


def basic_query(a: Sequence[int], N: int, sign: int, B: Optional[int] = None) -> CountingQuery:
    """n in the band N, window on <a + n> +- <n>; with B also |n + a| ~ B."""
    phase = PhaseSpec.from_pairs([(1, _form("a", "n")), (sign, _form("n"))])
    annuli = (Annulus(_form("a", "n"), B),) if B is not None else ()
    return CountingQuery("basic" if B is None else "two_ball",
                         (Variable.band("n", N), Variable.fixed("a", a)),
                         annuli, (PhaseWindow.single(phase),), scales={"N": N})


def _basic_lhs(scales, rng, ctx):
    N, A = scales
    return _sup(basic_query(_pick(rng, band_points(A)), N, _signs(rng, 1)[0]), ctx)


def _two_ball_lhs(scales, rng, ctx):
    N, A, B = scales
    return _sup(basic_query(_pick(rng, band_points(A)), N, _signs(rng, 1)[0], B), ctx)


# cubic counting


def cubic_forms(variant: str) -> Tuple[Tuple[str, ...], Dict[str, LinearForm]]:
    """Counted variables and the four phase frequencies n123, n1, n2, n3 as forms in them."""
    if variant == "i":
        return ("n1", "n2", "n3"), {"n123": _form("n1", "n2", "n3"), "n1": _form("n1"),
                                    "n2": _form("n2"), "n3": _form("n3")}
    if variant == "ii":
        return ("n", "n1", "n2"), {"n123": _form("n"), "n1": _form("n1"), "n2": _form("n2"),
                                   "n3": _form("n", n1=-1, n2=-1)}
    if variant == "iii":
        return ("n", "n12", "n1"), {"n123": _form("n"), "n1": _form("n1"),
                                    "n2": _form("n12", n1=-1), "n3": _form("n", n12=-1)}
    if variant == "iv":
        return ("n12", "n1", "n3"), {"n123": _form("n12", "n3"), "n1": _form("n1"),
                                     "n2": _form("n12", n1=-1), "n3": _form("n3")}
    raise ParameterRangeError(f"unknown cubic variant {variant!r}")


def cubic_query(variant: str, scales: Scales, signs: Sequence[int], weight=None) -> CountingQuery:
    names, forms = cubic_forms(variant)
    phase = cubic_phase(signs, forms["n123"], forms["n1"], forms["n2"], forms["n3"])
    variables = tuple(Variable.band(name, N) for name, N in zip(names, scales))
    return CountingQuery(f"cubic_{variant}", variables, (), (PhaseWindow.single(phase),), weight,
                         dict(zip(names, scales)))


def _cubic_lhs(variant: str):
    def lhs(scales, rng, ctx):
        return _sup(cubic_query(variant, scales, _signs(rng, 4)), ctx)
    return lhs


def cubic_sum_weight(s: float, gamma: float):
    def weight(v):
        n1, n2, n3 = v["n1"], v["n2"], v["n3"]
        return (bracket(n1 + n2 + n3) ** (2.0 * (s - 1.0)) * bracket(n1 + n2) ** (-2.0 * gamma)
                * (bracket(n1) * bracket(n2) * bracket(n3)) ** (-2.0))
    return weight


CUBIC_SUM_S = 0.5


def _cubic_sum_lhs(scales, rng, ctx):
    return _sup(cubic_query("i", scales, _signs(rng, 4), cubic_sum_weight(CUBIC_SUM_S, ctx.beta)), ctx)


def _cubic_sum_bound(sc, ctx):
    s, gamma = CUBIC_SUM_S, ctx.beta
    top = max(sc["N1"], sc["N2"], sc["N3"])
    return top ** (2 * (s - gamma)) + max(sc["N1"], sc["N2"]) ** (1 - 2 * gamma) * top ** (2 * s - 1)


# sup-counting


def sup_query(variant: str, scales: Scales, fixed: Sequence[int], signs: Sequence[int]) -> CountingQuery:
    """Counting with the total frequency relation n = n123 and one frequency held fixed.

    Variant i fixes n (scales N1, N2, N3), ii fixes n2 (N123, N1, N3), iii fixes n
    (N12, N1, N2, N3) and iv fixes n3 (N123, N12, N1, N2).
    """
    if variant == "i":
        N1, N2, N3 = scales
        variables = (Variable.band("n1", N1), Variable.band("n2", N2), Variable.fixed("n", fixed))
        f = {"n123": _form("n"), "n1": _form("n1"), "n2": _form("n2"), "n3": _form("n", n1=-1, n2=-1)}
        annuli = (Annulus(f["n3"], N3),)
    elif variant == "ii":
        N123, N1, N3 = scales
        variables = (Variable.band("n", N123), Variable.band("n1", N1), Variable.fixed("n2", fixed))
        f = {"n123": _form("n"), "n1": _form("n1"), "n2": _form("n2"), "n3": _form("n", n1=-1, n2=-1)}
        annuli = (Annulus(f["n3"], N3),)
    elif variant == "iii":
        N12, N1, N2, N3 = scales
        variables = (Variable.band("n12", N12), Variable.band("n2", N2), Variable.fixed("n", fixed))
        f = {"n123": _form("n"), "n1": _form("n12", n2=-1), "n2": _form("n2"), "n3": _form("n", n12=-1)}
        annuli = (Annulus(f["n1"], N1), Annulus(f["n3"], N3))
    elif variant == "iv":
        N123, N12, N1, N2 = scales
        variables = (Variable.band("n12", N12), Variable.band("n2", N2), Variable.fixed("n3", fixed))
        f = {"n123": _form("n12", "n3"), "n1": _form("n12", n2=-1), "n2": _form("n2"), "n3": _form("n3")}
        annuli = (Annulus(f["n123"], N123), Annulus(f["n1"], N1))
    else:
        raise ParameterRangeError(f"unknown sup variant {variant!r}")
    phase = cubic_phase(signs, f["n123"], f["n1"], f["n2"], f["n3"])
    return CountingQuery(f"sup_{variant}", variables, annuli, (PhaseWindow.single(phase),))


def _sup_fixed(variant: str, scales: Scales, rng: np.random.Generator) -> np.ndarray:
    """A fixed vector for which the constraint set is not empty by construction."""
    if variant == "i":
        return sum(_pick(rng, band_points(N)) for N in scales)
    if variant == "ii":
        N123, N1, N3 = scales
        return _pick(rng, band_points(N123)) - _pick(rng, band_points(N1)) - _pick(rng, band_points(N3))
    if variant == "iii":
        N12, _, _, N3 = scales
        return _pick(rng, band_points(N12)) + _pick(rng, band_points(N3))
    N123, N12, _, _ = scales
    return _pick(rng, band_points(N123)) - _pick(rng, band_points(N12))


def _sup_lhs(variant: str):
    def lhs(scales, rng, ctx):
        return _sup(sup_query(variant, scales, _sup_fixed(variant, scales, rng), _signs(rng, 4)), ctx)
    return lhs


def _med_min_bound(names: Tuple[str, str, str]):
    def bound(sc, ctx):
        xs = sorted(sc[n] for n in names)
        return xs[1] ** 3 * xs[0] ** 2
    return bound


def _sup_high_bound(sc, ctx):
    return (sc["N12"] * sc["N2"]) ** 3 / min(sc["N12"], sc["N1"])


# para-controlled


def paracontrolled_query(scales: Scales, n2: Sequence[int], signs: Sequence[int], ctx: CountingContext) -> CountingQuery:
    N1, _, N3 = scales
    s2, beta = ctx.ladder.s2, ctx.beta

    def weight(v):
        n1, n2_, n3 = v["n1"], v["n2"], v["n3"]
        return (bracket(n1 + n2_ + n3) ** (2.0 * (s2 - 1.0)) * bracket(n1 + n2_) ** (-2.0 * beta)
                * (bracket(n1) * bracket(n3)) ** (-2.0))

    phase = cubic_phase(signs)
    return CountingQuery("paracontrolled", (Variable.band("n1", N1), Variable.fixed("n2", n2), Variable.band("n3", N3)),
                         (), (PhaseWindow.single(phase),), weight)


def _paracontrolled_lhs(scales, rng, ctx):
    return _sup(paracontrolled_query(scales, _pick(rng, band_points(scales[1])), _signs(rng, 4), ctx), ctx)


def _paracontrolled_bound(sc, ctx):
    gamma = ctx.beta / 2.0
    top = max(sc["N1"], sc["N2"], sc["N3"])
    return top ** (2 * ctx.ladder.delta2) * sc["N1"] ** (-2 * gamma) * sc["N2"] ** (2 * gamma)


# quartic


def quartic_s(ctx: CountingContext) -> float:
    return -0.5 - 2.0 * ctx.eta


@lru_cache(maxsize=16)
def quartic_tail_table(K: int, N4: int, s: float) -> np.ndarray:
    """G(k) = sum over n4 in the band N4 of <k + n4>^{2s} <n4>^{-2}, for |k|_inf <= K, indexed by k + K."""
    R = K + N4
    f = bracket_grid(R) ** (2.0 * s)
    g = np.where(band_mask(N4, N4), bracket_grid(N4) ** (-2.0), 0.0)
    out = signal.fftconvolve(f, g[::-1, ::-1, ::-1], mode="valid")
    out.setflags(write=False)
    return out


def quartic_query(scales: Scales, signs: Sequence[int], ctx: CountingContext) -> CountingQuery:
    N1, N2, N3, N4 = scales
    K = N1 + N2 + N3
    table = quartic_tail_table(K, N4, quartic_s(ctx))
    V = ctx.potential

    def weight(v):
        n1, n2, n3 = v["n1"], v["n2"], v["n3"]
        k = n1 + n2 + n3 + K
        return (table[k[:, 0], k[:, 1], k[:, 2]] * bracket(n1 + n2 + n3) ** (-2.0)
                * symmetrized_symbol(n1, n2, n3, V) ** 2
                * (bracket(n1) * bracket(n2) * bracket(n3)) ** (-2.0))

    variables = tuple(Variable.band(f"n{j + 1}", N) for j, N in enumerate((N1, N2, N3)))
    return CountingQuery("quartic_nonresonant", variables, (), (PhaseWindow.single(cubic_phase(signs)),), weight)


def _quartic_lhs(scales, rng, ctx):
    return _sup(quartic_query(scales, _signs(rng, 4), ctx), ctx)


def _quartic_bound(sc, ctx):
    eta = ctx.eta
    return max(sc["N1"], sc["N2"], sc["N3"]) ** (-2 * ctx.beta + 2 * eta) * sc["N4"] ** (-2 * eta)


# resonance estimates


def basic_resonance_query(n1: Sequence[int], n2: Sequence[int], N3: int, signs: Sequence[int]) -> CountingQuery:
    phase = cubic_phase(signs)

    def weight(v):
        n123 = v["n1"] + v["n2"] + v["n3"]
        return resonance_factor(phase.evaluate(v)) / bracket(n123) / bracket(v["n3"]) ** 2

    return CountingQuery("basic_resonance", (Variable.fixed("n1", n1), Variable.fixed("n2", n2), Variable.band("n3", N3)),
                         (), (), weight)


def _basic_resonance_fixed(N3: int, rng: np.random.Generator):
    pts = ball_points(N3)
    return _pick(rng, pts), _pick(rng, pts)


def _basic_resonance_lhs(scales, rng, ctx):
    n1, n2 = _basic_resonance_fixed(scales[0], rng)
    lhs = _sup(basic_resonance_query(n1, n2, scales[0], _signs(rng, 4)), ctx)
    return lhs * float(bracket(n1 + n2))


def _basic_resonance_bound(sc, ctx):
    # the <n12>^{-1} factor depends on the sampled pair and is divided out in the left-hand side
    return math.log(2.0 + sc["N3"])


def resonant_inner_sums(n12: np.ndarray, c12: np.ndarray, N3: int, signs: Sequence[int], budget: int) -> np.ndarray:
    """sum_m sum_{n3} <m>^{-1} <n123>^{-1} <n3>^{-2} on the window, for each row of (n12, s1<n1> + s2<n2>)."""
    p3 = band_points(N3)
    if len(n12) * len(p3) > budget:
        raise BudgetExceededError(len(n12) * len(p3), budget, "resonant quartic inner sums")
    b3 = bracket(p3)
    out = np.empty(len(n12))
    rows = max(1, CHUNK // max(len(p3), 1))
    for start in range(0, len(n12), rows):
        sl = slice(start, start + rows)
        b123 = bracket(n12[sl, None, :] + p3[None, :, :])
        phi = signs[0] * b123 + c12[sl, None] + signs[3] * b3[None, :]
        out[sl] = np.sum(resonance_factor(phi) / b123 / b3[None, :] ** 2, axis=1)
    return out


RESONANT_QUARTIC_S = -0.25


def resonant_quartic_sum(scales: Scales, signs: Sequence[int], ctx: CountingContext) -> float:
    N1, N2, N3 = scales
    budget = ctx.resolved_budget()
    p1, p2 = band_points(N1), band_points(N2)
    if len(p1) * len(p2) > budget:
        raise BudgetExceededError(len(p1) * len(p2), budget, "resonant quartic pairs")
    i, j = np.divmod(np.arange(len(p1) * len(p2), dtype=np.int64), len(p2))
    n1, n2 = p1[i], p2[j]
    n12 = n1 + n2
    key = np.column_stack([n12, np.sum(n1 * n1, axis=1), np.sum(n2 * n2, axis=1)])
    unique, inverse = np.unique(key, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    c12 = signs[1] * np.sqrt(1.0 + unique[:, 3]) + signs[2] * np.sqrt(1.0 + unique[:, 4])
    inner = resonant_inner_sums(unique[:, :3], c12, N3, signs, budget)
    outer = (bracket(n12) ** (2.0 * RESONANT_QUARTIC_S) * (bracket(n1) * bracket(n2)) ** (-2.0)
             * inner[inverse] ** 2)
    return math.fsum(outer.tolist())


def _resonant_quartic_lhs(scales, rng, ctx):
    return resonant_quartic_sum(scales, _signs(rng, 4), ctx)


def _resonant_quartic_bound(sc, ctx):
    return math.log(2.0 + sc["N3"]) ** 2 * max(sc["N1"], sc["N2"]) ** (2 * RESONANT_QUARTIC_S)


# quintic


def quintic_s(ctx: CountingContext) -> float:
    return 0.5 - 2.0 * ctx.eta


def quintic_query(scales: Scales, signs: Sequence[int], ctx: CountingContext) -> CountingQuery:
    """Signs are (s12345, s345, s1, s2, s3, s4, s5)."""
    s12345, s345, s1, s2, s3, s4, s5 = signs
    beta, s = ctx.beta, quintic_s(ctx)
    n345, n12345 = _form("n3", "n4", "n5"), _form("n1", "n2", "n3", "n4", "n5")
    singles = [_form(f"n{j}") for j in range(1, 6)]
    psi = PhaseSpec.from_pairs([(s345, n345), (s3, singles[2]), (s4, singles[3]), (s5, singles[4])])
    phi = PhaseSpec.from_pairs([(s12345, n12345), (s345, n345), (s1, singles[0]), (s2, singles[1])])
    phi_tilde = PhaseSpec.from_pairs([(s12345, n12345), (-s345, n345)]
                                     + list(zip((s1, s2, s3, s4, s5), singles)))

    def weight(v):
        n = [v[f"n{j}"] for j in range(1, 6)]
        n34, n345_ = n[2] + n[3], n[2] + n[3] + n[4]
        n1345 = n[0] + n345_
        total = n1345 + n[1]
        prod = bracket(n[0]) * bracket(n[1]) * bracket(n[2]) * bracket(n[3]) * bracket(n[4])
        return (bracket(total) ** (2.0 * (s - 1.0)) * bracket(n1345) ** (-2.0 * beta) * bracket(n345_) ** (-2.0)
                * bracket(n34) ** (-2.0 * beta) * prod ** (-2.0))

    variables = tuple(Variable.band(f"n{j + 1}", N) for j, N in enumerate(scales))
    windows = (PhaseWindow.single(psi), PhaseWindow((phi, phi_tilde)))
    return CountingQuery("quintic_nonresonant", variables, (), windows, weight)


def _quintic_lhs(scales, rng, ctx):
    return _sup(quintic_query(scales, _signs(rng, 7), ctx), ctx)


def _quintic_bound(sc, ctx):
    eta = ctx.eta
    return max(sc["N1"], sc["N3"], sc["N4"], sc["N5"]) ** (-2 * ctx.beta + 4 * eta) * sc["N2"] ** (-2 * eta)


def single_resonance_query(n45: Sequence[int], N3: int, sign: int) -> CountingQuery:
    phase = PhaseSpec.from_pairs([(1, _form("n3", "n45")), (sign, _form("n3"))])

    def weight(v):
        return 1.0 / bracket(v["n3"] + v["n45"]) / bracket(v["n3"]) ** 2

    return CountingQuery("single_resonance_quintic", (Variable.band("n3", N3), Variable.fixed("n45", n45)),
                         (), (PhaseWindow.single(phase, half_open=True),), weight)


def _single_resonance_lhs(scales, rng, ctx):
    N3, N45 = scales
    return _sup(single_resonance_query(_pick(rng, band_points(N45)), N3, _signs(rng, 1)[0]), ctx)


def double_resonance_query(n5: Sequence[int], scales: Scales, signs: Sequence[int], ctx: CountingContext) -> CountingQuery:
    N3, N4, _ = scales
    s3, s4, s5 = signs
    beta = ctx.beta
    phase = PhaseSpec.from_pairs([(1, _form("n3", "n4", "n5")), (s3, _form("n3")), (s4, _form("n4")), (s5, _form("n5"))])

    def weight(v):
        n3, n4, n5_ = v["n3"], v["n4"], v["n5"]
        return (1.0 / bracket(n3 + n4 + n5_) * bracket(n4 + n5_) ** (-beta)
                * (bracket(n3) * bracket(n4)) ** (-2.0))

    return CountingQuery("double_resonance_quintic",
                         (Variable.band("n3", N3), Variable.band("n4", N4), Variable.fixed("n5", n5)),
                         (), (PhaseWindow.single(phase, half_open=True),), weight)


def _double_resonance_lhs(scales, rng, ctx):
    return _sup(double_resonance_query(_pick(rng, band_points(scales[2])), scales, _signs(rng, 3), ctx), ctx)


# septic


SEPTIC_S = 0.75


def _septic_lhs(scales, rng, ctx):
    return septic_mirror_sum(SepticScales(*scales), ctx.potential, SEPTIC_S, budget=ctx.resolved_budget())


def _septic_bound(sc, ctx):
    return septic_bound(SepticScales(*sc.values()), ctx.beta, ctx.eta, SEPTIC_S)


def septic_grid(n567_scales=(1, 2), top_scales=(1, 2, 4, 8)) -> Tuple[Scales, ...]:
    grid = []
    for N567 in n567_scales:
        for N in top_scales:
            N1234 = max(N, N567)
            if triangle_achievable(N567, N, N1234):
                grid.append((N, N1234, N567, N))
    return tuple(grid)


# frequency scales


def _freq_scale_lhs(scales, rng, ctx):
    t = ScaleTuple(*scales)
    if not achievable(t):
        return 0.0
    return scale_ratio(t)


def _freq_scale_grid(max_exponent: int = 10) -> Tuple[Scales, ...]:
    scales = [2 ** k for k in range(max_exponent + 1)]
    out = []
    for n1 in scales:
        for n2 in scales:
            for n1345 in scales:
                for n12345 in scales:
                    if achievable(ScaleTuple(n1, n2, n1345, n12345)):
                        out.append((n1, n2, n1345, n12345))
    return tuple(out)


def _dedupe(grid) -> Tuple[Scales, ...]:
    return tuple(dict.fromkeys(tuple(int(x) for x in g) for g in grid))


CUBIC_GRID = ((2, 2, 2), (4, 4, 4), (8, 4, 4), (4, 8, 4), (4, 4, 8), (8, 8, 2), (16, 4, 1), (16, 2, 2))
SUP3_GRID = ((2, 2, 2), (4, 4, 4), (8, 8, 8), (16, 8, 8), (8, 16, 8))


def _register() -> Dict[str, LemmaSpec]:
    lemmas = [
        LemmaSpec("basic", ("N", "A"), _dedupe((N, A) for N in (8, 16, 32, 64) for A in (1, 4, N // 2)),
                  _basic_lhs, lambda sc, ctx: sc["N"] ** 3 / min(sc["A"], sc["N"])),
        LemmaSpec("two_ball", ("N", "A", "B"),
                  _dedupe((N, A, B) for N in (8, 16, 32) for A in (4, N // 2) for B in (N // 2, N)),
                  _two_ball_lhs, lambda sc, ctx: min(sc["B"], sc["N"]) ** 3 / min(sc["A"], sc["B"], sc["N"])),
        LemmaSpec("cubic_i", ("N1", "N2", "N3"), CUBIC_GRID, _cubic_lhs("i"),
                  lambda sc, ctx: (sc["N1"] * sc["N2"] * sc["N3"]) ** 3 / _med(sc["N1"], sc["N2"], sc["N3"])),
        LemmaSpec("cubic_ii", ("N123", "N1", "N2"), CUBIC_GRID, _cubic_lhs("ii"),
                  lambda sc, ctx: (sc["N123"] * sc["N1"] * sc["N2"]) ** 3 / _med(sc["N123"], sc["N1"], sc["N2"])),
        LemmaSpec("cubic_iii", ("N123", "N12", "N1"), CUBIC_GRID, _cubic_lhs("iii"),
                  lambda sc, ctx: (sc["N123"] * sc["N12"] * sc["N1"]) ** 3 / min(sc["N12"], max(sc["N123"], sc["N1"]))),
        LemmaSpec("cubic_iv", ("N12", "N1", "N3"), CUBIC_GRID, _cubic_lhs("iv"),
                  lambda sc, ctx: (sc["N12"] * sc["N1"] * sc["N3"]) ** 3 / min(sc["N12"], max(sc["N1"], sc["N3"]))),
        LemmaSpec("cubic_sum", ("N1", "N2", "N3"), CUBIC_GRID, _cubic_sum_lhs, _cubic_sum_bound),
        LemmaSpec("sup_i", ("N1", "N2", "N3"), SUP3_GRID, _sup_lhs("i"), _med_min_bound(("N1", "N2", "N3"))),
        LemmaSpec("sup_ii", ("N123", "N1", "N3"), SUP3_GRID, _sup_lhs("ii"), _med_min_bound(("N123", "N1", "N3"))),
        LemmaSpec("sup_iii", ("N12", "N1", "N2", "N3"),
                  ((2, 2, 2, 2), (4, 4, 4, 4), (8, 8, 4, 8), (8, 4, 8, 8), (16, 8, 8, 16)),
                  _sup_lhs("iii"), _sup_high_bound),
        LemmaSpec("sup_iv", ("N123", "N12", "N1", "N2"),
                  ((2, 2, 2, 2), (4, 4, 4, 4), (8, 8, 8, 4), (8, 8, 4, 8), (16, 16, 8, 8)),
                  _sup_lhs("iv"), _sup_high_bound),
        LemmaSpec("paracontrolled", ("N1", "N2", "N3"), ((2, 2, 2), (4, 4, 4), (8, 8, 8), (16, 8, 8), (8, 8, 16)),
                  _paracontrolled_lhs, _paracontrolled_bound),
        LemmaSpec("quartic_nonresonant", ("N1", "N2", "N3", "N4"),
                  ((2, 2, 2, 2), (4, 4, 4, 4), (8, 4, 4, 8), (4, 8, 4, 16), (8, 8, 2, 32), (16, 2, 2, 64)),
                  _quartic_lhs, _quartic_bound),
        LemmaSpec("basic_resonance", ("N3",), ((8,), (16,), (32,), (64,)),
                  _basic_resonance_lhs, _basic_resonance_bound,
                  note="log(2+N3) divided out as written"),
        LemmaSpec("resonant_quartic", ("N1", "N2", "N3"), ((2, 2, 8), (4, 4, 8), (4, 2, 16), (2, 2, 32)),
                  _resonant_quartic_lhs, _resonant_quartic_bound,
                  note="log(2+N3)^2 divided out as written"),
        LemmaSpec("quintic_nonresonant", ("N1", "N2", "N3", "N4", "N5"),
                  ((1, 1, 1, 1, 1), (2, 2, 2, 2, 2), (4, 2, 2, 2, 2), (2, 2, 4, 2, 2), (8, 1, 1, 2, 2),
                   (16, 1, 1, 1, 1), (1, 1, 16, 1, 1)),
                  _quintic_lhs, _quintic_bound),
        LemmaSpec("single_resonance_quintic", ("N3", "N45"),
                  ((8, 1), (8, 4), (16, 1), (16, 8), (32, 4), (32, 16), (64, 1), (64, 32)),
                  _single_resonance_lhs, lambda sc, ctx: 1.0 / sc["N45"]),
        LemmaSpec("double_resonance_quintic", ("N3", "N4", "N5"),
                  ((4, 4, 4), (8, 8, 8), (16, 8, 8), (8, 16, 16), (8, 8, 32), (8, 8, 64)),
                  _double_resonance_lhs,
                  lambda sc, ctx: max(sc["N4"], sc["N5"]) ** (-ctx.beta + ctx.eta)),
        LemmaSpec("septic", ("N1234567", "N1234", "N567", "N4"), septic_grid(), _septic_lhs, _septic_bound,
                  randomized=False, note="mirror pairing {(1,5),(2,6),(3,7)}; log(2+N4)^2 divided out as written"),
        LemmaSpec("freq_scale", ("N1", "N2", "N1345", "N12345"), _freq_scale_grid(), _freq_scale_lhs,
                  lambda sc, ctx: 1.0, randomized=False),
    ]
    return {lemma.lemma_id: lemma for lemma in lemmas}


LEMMAS: Dict[str, LemmaSpec] = _register()


def get_lemma(lemma_id: str) -> LemmaSpec:
    try:
        return LEMMAS[lemma_id]
    except KeyError:
        raise ParameterRangeError(f"unknown lemma {lemma_id!r}; known: {', '.join(LEMMAS)}") from None
