"""
Exhaustive dyadic check of the frequency-scale inequality

    min(N2, N12345)^2 min(N1, N1345) / min(N12345, N1345, N2) <= C N2 N12345

over scale tuples that frequencies can realize.
"""

import itertools
from typing import NamedTuple, Optional, Tuple

import pandas as pd

from src.core_tools.errors import ParameterRangeError
from src.lattice_spectral.lattice import require_dyadic

DEFAULT_MAX_EXPONENT = 10
FIT_MAX_SCALE = 2 ** 5


class ScaleTuple(NamedTuple):
    n1: int
    n2: int
    n1345: int
    n12345: int


def _interval(N: int) -> Tuple[float, float]:
    return (0.0, 1.0) if N == 1 else (N / 2.0, float(N))


def triangle_achievable(Na: int, Nb: int, Nc: int) -> bool:
    """True when some a + b = c has |a|, |b|, |c| in the bands of Na, Nb, Nc (up to the open lower ends)."""
    intervals = [_interval(require_dyadic(N)) for N in (Na, Nb, Nc)]
    for i in range(3):
        lo = intervals[i][0]
        others = [intervals[j] for j in range(3) if j != i]
        if lo >= others[0][1] + others[1][1]:
            return False
    return True


def achievable(t: ScaleTuple) -> bool:
    """n12345 = n2 + n1345 constrains (N2, N1345, N12345); N1 is free because n345 is."""
    return triangle_achievable(t.n2, t.n1345, t.n12345)


def scale_ratio(t: ScaleTuple) -> float:
    lhs = min(t.n2, t.n12345) ** 2 * min(t.n1, t.n1345) / min(t.n12345, t.n1345, t.n2)
    return lhs / (t.n2 * t.n12345)


def frequency_scale_table(max_exponent: int = DEFAULT_MAX_EXPONENT) -> pd.DataFrame:
    """One row per achievable dyadic tuple with every scale at most 2^max_exponent."""
    if max_exponent < 0:
        raise ParameterRangeError(f"max_exponent must be >= 0, got {max_exponent}")
    scales = [2 ** k for k in range(max_exponent + 1)]
    rows = []
    for combo in itertools.product(scales, repeat=4):
        t = ScaleTuple(*combo)
        if achievable(t):
            rows.append({**t._asdict(), "max_scale": max(combo), "ratio": scale_ratio(t)})
    return pd.DataFrame(rows)


class FrequencyScaleCheck(NamedTuple):
    constant: float
    worst_ratio: float
    worst_tuple: Optional[ScaleTuple]
    passed: bool


def check_frequency_scale(table: pd.DataFrame, fit_max_scale: int = FIT_MAX_SCALE, slack: float = 1.0) -> FrequencyScaleCheck:
    """Fit C on tuples with max scale <= fit_max_scale, freeze it, and test every other tuple against it."""
    fit = table[table["max_scale"] <= fit_max_scale]
    constant = float(fit["ratio"].max())
    worst = table.loc[table["ratio"].idxmax()]
    worst_tuple = ScaleTuple(int(worst["n1"]), int(worst["n2"]), int(worst["n1345"]), int(worst["n12345"]))
    worst_ratio = float(worst["ratio"])
    return FrequencyScaleCheck(constant, worst_ratio, worst_tuple, worst_ratio <= slack * constant)
