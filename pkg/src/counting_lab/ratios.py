"""
Bound-ratio harness: evaluates a catalogued estimate on its scale grid and
regresses the worst ratio against the largest scale.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.core_tools.errors import InsufficientDataError, ParameterRangeError
from src.core_tools.logger import LabLogger
from src.core_tools.stats import loglog_slope
from src.counting_lab.lemmas import LEMMAS, CountingContext, Scales, get_lemma
from src.gaussian_data.streams import SeededStream

logger = LabLogger("BoundRatio")

SLOPE_LIMIT = 0.1


@dataclass
class BoundRatioResult:
    lemma_id: str
    rows: List[Dict]
    slope: Optional[float]
    note: str = ""

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows)

    @property
    def max_ratio(self) -> float:
        return max((r["ratio"] for r in self.rows), default=0.0)

    def passed(self, limit: float = SLOPE_LIMIT) -> bool:
        ratios = [r["ratio"] for r in self.rows]
        if not ratios or not all(np.isfinite(ratios)):
            return False
        return self.slope is None or self.slope <= limit


def _scales_label(scales: Scales) -> str:
    return "x".join(str(int(x)) for x in scales)


def bound_ratio(
    lemma_id: str,
    scales: Optional[Sequence[Scales]] = None,
    trials: int = 1,
    seed: int = 0,
    ctx: Optional[CountingContext] = None,
) -> BoundRatioResult:
    """
    Ratio of the exact left-hand side to the bound at each scale tuple.

    Args:
        lemma_id: Catalogue id of the estimate.
        scales: Scale tuples to visit; the catalogue grid when omitted.
        trials: Sampled (signs, fixed vectors) per scale tuple; the sup is kept.
        seed: Seed of the root random stream.
        ctx: Shared parameters (potential exponent, ladder, budget, workers).

    Returns:
        The per-scale rows and the slope of log(max ratio) against log(max scale).
    """
    if trials < 1:
        raise ParameterRangeError(f"trials must be >= 1, got {trials}")
    lemma = get_lemma(lemma_id)
    ctx = ctx or CountingContext()
    grid = lemma.grid if scales is None else tuple(tuple(int(x) for x in sc) for sc in scales)
    root = SeededStream(seed=seed, stream_id=4).child(list(LEMMAS).index(lemma_id))
    n_trials = trials if lemma.randomized else 1

    rows = []
    for g, sc in enumerate(grid):
        named = lemma.named(sc)
        bound = lemma.bound(named, ctx)
        lhs = 0.0
        for trial in range(n_trials):
            rng = root.child(g).child(trial).generator()
            lhs = max(lhs, lemma.lhs(sc, rng, ctx))
        rows.append({
            "lemma": lemma_id,
            "scales": _scales_label(sc),
            "max_scale": max(sc),
            "lhs": lhs,
            "bound": bound,
            "ratio": lhs / bound if bound > 0 else float("inf"),
            "note": lemma.note,
        })
        logger.debug("Bound ratio", data={"lemma": lemma_id, "scales": _scales_label(sc), "ratio": rows[-1]["ratio"]})

    frame = pd.DataFrame(rows)
    slope = None
    if len(frame):
        worst = frame[frame["ratio"] > 0].groupby("max_scale")["ratio"].max()
        try:
            slope = loglog_slope(worst.index.to_numpy(dtype=float), worst.to_numpy()).slope
        except InsufficientDataError:
            slope = None
    return BoundRatioResult(lemma_id, rows, slope, lemma.note)
