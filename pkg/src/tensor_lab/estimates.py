"""
Ratio tables for the two deterministic tensor estimates.

For each (N1, N2, N3) and sampled signs, m is taken at the most populated
integer of the phase and at one random populated integer. The tensor is split
into its (N12, N123) blocks and the worst block counts.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.core_tools.errors import InsufficientDataError, ParameterRangeError
from src.core_tools.logger import LabLogger
from src.core_tools.stats import loglog_slope
from src.gaussian_data.streams import SeededStream
from src.potential_renorm.potential import InteractionPotential
from src.tensor_lab.builders import (ESTIMATE_PARTITIONS, Signs, TensorScales, block_labels, build_tensor,
                                     phase_histogram, s_threshold)
from src.tensor_lab.tensors import partition_label, tensor_norm
from src.wave_dynamics.config import ParameterLadder

logger = LabLogger("TensorEstimate")

TENSOR_GRID = ((2, 2, 2), (4, 2, 2), (4, 4, 2), (4, 4, 4), (8, 4, 4), (4, 4, 8), (8, 2, 8), (16, 4, 2), (2, 4, 16))
S_MARGIN = 0.01
SLOPE_LIMIT = 0.1


def estimate_bound(which: str, scales: TensorScales, N12: int, beta: float, ladder: ParameterLadder) -> float:
    top = max(scales.n1, scales.n2, scales.n3) ** (-ladder.eta)
    if which == "first":
        return top
    return N12 ** (-beta) * top


@dataclass
class TensorEstimateResult:
    which: str
    rows: List[Dict]
    slope: Optional[float]

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows)

    def passed(self, limit: float = SLOPE_LIMIT) -> bool:
        ratios = [r["ratio"] for r in self.rows]
        if not ratios or not np.all(np.isfinite(ratios)):
            return False
        return self.slope is None or self.slope <= limit


def _sample_signs(rng: np.random.Generator) -> Signs:
    return Signs(*(int(x) for x in rng.choice((1, -1), size=4)))


def _candidate_ms(hist: Dict[int, int], rng: np.random.Generator) -> Tuple[int, ...]:
    if not hist:
        return ()
    keys = sorted(hist)
    mode = max(keys, key=lambda k: (hist[k], -abs(k)))
    return tuple(dict.fromkeys((mode, int(rng.choice(keys)))))


def verify_tensor_estimate(
    which: str,
    scales: Optional[Sequence[Tuple[int, int, int]]] = None,
    trials: int = 2,
    seed: int = 0,
    beta: float = 0.4,
    ladder: Optional[ParameterLadder] = None,
    s: Optional[float] = None,
    budget: Optional[int] = None,
    workers: int = 1,
) -> TensorEstimateResult:
    """
    Max partition norm over the blocks of each tensor, divided by the bound.

    Args:
        which: 'first' or 'second'.
        scales: (N1, N2, N3) tuples; TENSOR_GRID when omitted.
        trials: Sampled sign patterns per scale tuple.
        seed: Seed of the root random stream.
        beta: Potential exponent.
        ladder: Small parameters; the default ladder when omitted.
        s: Regularity exponent; just below the admissible threshold when omitted.
        budget: Enumeration budget per tensor.
        workers: Worker threads over the n3 band.

    Returns:
        Per-(scales, trial, m, block) rows and the log-log slope of the worst ratio.
    """
    ladder = ladder or ParameterLadder()
    threshold = s_threshold(which, beta, ladder)
    s = threshold - S_MARGIN if s is None else s
    if s >= threshold:
        raise ParameterRangeError(f"s = {s} must stay below {threshold:.4g} for the {which} tensor")
    if trials < 1:
        raise ParameterRangeError(f"trials must be >= 1, got {trials}")
    V = InteractionPotential(beta=beta)
    partitions = ESTIMATE_PARTITIONS[which]
    root = SeededStream(seed=seed, stream_id=5).child(0 if which == "first" else 1)
    grid = TENSOR_GRID if scales is None else tuple(tuple(int(x) for x in sc) for sc in scales)

    rows = []
    for g, sc in enumerate(grid):
        base = TensorScales(*sc)
        for trial in range(trials):
            rng = root.child(g).child(trial).generator()
            signs = _sample_signs(rng)
            hist = phase_histogram(base, signs, budget=budget, workers=workers)
            for m in _candidate_ms(hist, rng):
                h = build_tensor(which, base, m, signs, s, ladder=ladder, potential=V, budget=budget, workers=workers)
                b12, b123 = block_labels(h)
                for N12, N123 in sorted(set(zip(b12.tolist(), b123.tolist()))):
                    block = h.masked((b12 == N12) & (b123 == N123))
                    norms = {partition_label(A, B): tensor_norm(block, A, B) for A, B in partitions}
                    worst = max(norms.values())
                    bound = estimate_bound(which, base, N12, beta, ladder)
                    rows.append({
                        "which": which,
                        "scales": "x".join(str(x) for x in sc),
                        "max_scale": max(sc),
                        "trial": trial,
                        "signs": "".join("+" if x > 0 else "-" for x in signs),
                        "m": m,
                        "N12": N12,
                        "N123": N123,
                        "entries": block.nnz,
                        **norms,
                        "max_norm": worst,
                        "bound": bound,
                        "ratio": worst / bound,
                    })
        logger.debug("Tensor scales done", data={"which": which, "scales": str(sc)})

    frame = pd.DataFrame(rows)
    slope = None
    if len(frame):
        worst = frame[frame["ratio"] > 0].groupby("max_scale")["ratio"].max()
        try:
            slope = loglog_slope(worst.index.to_numpy(dtype=float), worst.to_numpy()).slope
        except InsufficientDataError:
            slope = None
    return TensorEstimateResult(which, rows, slope)
