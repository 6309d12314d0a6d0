"""
Tensor verification suite: ratio tables of the two deterministic tensor
estimates and the moment-method check on contracted random tensors.
"""

import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from src.core_tools.artifact_store import ArtifactStore
from src.core_tools.logger import LabLogger
from src.gaussian_data.streams import SeededStream
from src.potential_renorm.potential import InteractionPotential
from src.tensor_lab.builders import Signs, TensorScales, build_first_tensor, phase_histogram, s_threshold
from src.tensor_lab.estimates import S_MARGIN, SLOPE_LIMIT, verify_tensor_estimate
from src.tensor_lab.random_tensors import DEFAULT_PS, growth_limit, moment_method_check
from src.wave_dynamics.config import ParameterLadder

logger = LabLogger("TensorLab")

MOMENT_SCALES = (2, 4, 8)
MOMENT_SIGNS = Signs(1, 1, -1, 1)
FROZEN_SLACK = 2.0


def moment_tensor(n3_scale: int, beta: float, ladder: ParameterLadder):
    """First tensor with n1, n2 in the unit ball and n3 in the given band, at its most populated m."""
    scales = TensorScales(1, 1, n3_scale)
    hist = phase_histogram(scales, MOMENT_SIGNS)
    m = max(hist, key=lambda k: (hist[k], -abs(k)))
    s = s_threshold("first", beta, ladder) - S_MARGIN
    return build_first_tensor(scales, m, MOMENT_SIGNS, s, ladder=ladder, potential=InteractionPotential(beta=beta))


def moment_rows(ps: Sequence[int], samples: int, seed: int, beta: float, workers: int,
                ladder: Optional[ParameterLadder] = None) -> Tuple[List[Dict], bool]:
    ladder = ladder or ParameterLadder()
    stream = SeededStream(seed=seed, stream_id=6)
    rows, frozen = [], None
    passed = True
    for i, n3_scale in enumerate(MOMENT_SCALES):
        h = moment_tensor(n3_scale, beta, ladder)
        check = moment_method_check(h, {"n1": MOMENT_SIGNS.s1, "n2": MOMENT_SIGNS.s2}, ("n3",), ("n",),
                                    ps, samples, stream.child(i), workers=workers)
        if frozen is None:
            frozen = check.max_ratio
        growth = check.growth() if 4 in ps and 8 in ps else None
        ok = check.max_ratio <= FROZEN_SLACK * frozen and (growth is None or growth <= growth_limit(check.order))
        passed = passed and ok
        for r in check.rows:
            rows.append({**r, "n3_scale": n3_scale, "frozen_constant": frozen, "growth_4_8": growth, "passed": ok})
    return rows, passed


def run_verify_tensors(
    run_id: str,
    out_dir: Path,
    which: Sequence[str] = ("first", "second"),
    scales: Optional[Sequence[Tuple[int, int, int]]] = None,
    trials: int = 2,
    ps: Sequence[int] = DEFAULT_PS,
    samples: int = 200,
    seed: int = 0,
    beta: float = 0.4,
    budget: Optional[int] = None,
    workers: int = 1,
    ladder: Optional[ParameterLadder] = None,
):
    """
    Runs the tensor verification suite.

    Args:
        run_id: Identifier of this run.
        out_dir: Output directory for artifacts.
        which: Deterministic estimates to check.
        scales: (N1, N2, N3) tuples overriding the default grid.
        trials: Sampled sign patterns per scale tuple.
        ps: Moment orders of the moment-method check (empty to skip it).
        samples: Monte Carlo samples per moment-method instance.
        seed: Seed of the root random stream.
        beta: Potential exponent.
        budget: Enumeration budget per tensor.
        workers: Worker threads.
        ladder: Small parameters; the default ladder when omitted.

    Returns:
        A dictionary with per-check rows and the overall verdict.
    """
    logger.set_run_id(run_id)
    start_time = time.time()
    logger.header("TENSOR VERIFICATION")
    logger.info("Starting tensor checks", data={"which": ",".join(which), "trials": trials, "seed": seed})
    store = ArtifactStore(out_dir, run_id)

    summary: List[Dict] = []
    estimate_rows: List[Dict] = []
    artifacts = []
    for name in which:
        logger.step_start(f"{name}_tensor")
        step_start = time.time()
        try:
            result = verify_tensor_estimate(name, scales, trials, seed, beta, ladder=ladder, budget=budget,
                                            workers=workers)
        except Exception as e:
            logger.step_failed(f"{name}_tensor", e)
            raise
        estimate_rows.extend({**r, "slope": result.slope} for r in result.rows)
        summary.append({"check": f"{name}_tensor_estimate", "value": result.slope, "target": SLOPE_LIMIT,
                        "passed": result.passed()})
        logger.step_complete(f"{name}_tensor", duration_ms=int((time.time() - step_start) * 1000),
                             data={"slope": result.slope, "passed": result.passed()})
    if estimate_rows:
        artifacts.append(str(store.write_csv("tensor_estimates.csv", pd.DataFrame(estimate_rows))))

    if ps:
        logger.step_start("moment_method")
        step_start = time.time()
        try:
            rows, passed = moment_rows(ps, samples, seed, beta, workers, ladder)
        except Exception as e:
            logger.step_failed("moment_method", e)
            raise
        artifacts.append(str(store.write_csv("moment_method.csv", pd.DataFrame(rows))))
        summary.append({"check": "moment_method", "value": max(r["ratio"] for r in rows),
                        "target": FROZEN_SLACK * rows[0]["frozen_constant"], "passed": passed})
        logger.step_complete("moment_method", duration_ms=int((time.time() - step_start) * 1000),
                             data={"passed": passed})

    artifacts.append(str(store.write_csv("tensor_summary.csv", pd.DataFrame(summary))))
    passed = all(r["passed"] for r in summary)
    duration_ms = int((time.time() - start_time) * 1000)
    logger.separator()
    if passed:
        logger.success("Tensor checks passed", data={"checks": len(summary), "duration_ms": duration_ms})
    else:
        failed = [r["check"] for r in summary if not r["passed"]]
        logger.warning("Tensor checks failed", data={"failed": ",".join(failed), "duration_ms": duration_ms})
    return {"run_id": run_id, "passed": passed, "rows": summary, "artifacts": artifacts, "store": store}
