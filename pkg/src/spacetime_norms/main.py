"""
X^{s,b} diagnostics: half-wave exactness of the windowed norm, localization
ratios and the paired high-high norm on a short truncated trajectory.
"""

import time
from pathlib import Path
from typing import Dict, List, Sequence

import pandas as pd

from src.core_tools.artifact_store import ArtifactStore
from src.core_tools.logger import LabLogger
from src.gaussian_data.sampler import sample_gff
from src.gaussian_data.streams import SeededStream
from src.lattice_spectral.fields import SpectralField
from src.potential_renorm.potential import InteractionPotential
from src.spacetime_norms.xsb import (
    DEFAULT_PADDING,
    WindowedTrajectory,
    halfwave_factorized_norm,
    halfwave_norm,
    localization_gain,
    paired_highhigh_norm,
    profile_factor_quad,
    xsb_norm,
)
from src.wave_dynamics.config import FlowConfig, ParameterLadder
from src.wave_dynamics.integrator import flow_trajectory
from src.wave_dynamics.remainder import remainder_decomposition
from src.wave_dynamics.stochastic_objects import linear_paths

logger = LabLogger("SpacetimeNorms")

FACTORIZATION_TOL = 1e-4
QUADRATURE_TOL = 1e-4
LOCALIZATION_LIMIT = 10.0
TAUS = (1.0, 0.5, 0.25, 0.125)


def halfwave_rows(u0, s_values: Sequence[float], b_values: Sequence[float], T: float, step: float,
                  padding: int) -> List[Dict]:
    rows = []
    for sign in (1, -1):
        w = WindowedTrajectory.from_half_wave(u0, T, step, sign, padding)
        for s in s_values:
            for b in b_values:
                value = xsb_norm(w, s, b)
                factorized = halfwave_factorized_norm(u0, s, b, T)
                rel = abs(value - factorized) / factorized if factorized > 0 else abs(value)
                rows.append({
                    "sign": sign, "s": s, "b": b, "value": value, "factorized": factorized,
                    "halfwave_bound": halfwave_norm(w, s, b, sign), "rel_error": rel,
                    "passed": rel <= FACTORIZATION_TOL,
                })
    return rows


def run_norms(
    run_id: str,
    grid_radius: int,
    T: float,
    step: float,
    seed: int,
    out_dir: Path,
    s_values: Sequence[float] = (0.0, 0.5),
    b_values: Sequence[float] = (0.49, 0.55),
    padding: int = DEFAULT_PADDING,
):
    """
    Evaluates windowed X^{s,b} norms and checks them against the per-mode quadrature factorization.

    Args:
        run_id: Identifier of this run.
        grid_radius: Radius of the sampled data.
        T: Window length.
        step: Time step of the samples.
        seed: Seed of the root random stream.
        out_dir: Output directory for artifacts.
        s_values: Spatial exponents.
        b_values: Modulation exponents.
        padding: Zero-padding factor of the time transform.

    Returns:
        A dictionary with the norm table, localization ratios and the verdict.
    """
    logger.set_run_id(run_id)
    start_time = time.time()
    logger.header("X^{s,b} NORMS")
    logger.info("Starting norm diagnostics", data={"grid_radius": grid_radius, "T": T, "step": step})

    store = ArtifactStore(out_dir, run_id)
    stream = SeededStream(seed=seed, stream_id=5)
    try:
        data = sample_gff(stream.child(0), grid_radius)

        logger.step_start("half_wave")
        rows = halfwave_rows(data.pos, s_values, b_values, T, step, padding)
        logger.step_complete("half_wave", data={"max_rel_error": max(r["rel_error"] for r in rows)})

        logger.step_start("profile_quadrature")
        quad_rows = []
        for b in b_values:
            windowed = WindowedTrajectory.from_half_wave(SpectralField.constant(grid_radius, 1.0), T, step, 1, padding)
            discrete = xsb_norm(windowed, 0.0, b)
            continuous = profile_factor_quad(1.0, b, T)
            rel = abs(discrete - continuous) / continuous
            quad_rows.append({"b": b, "discrete": discrete, "quadrature": continuous, "rel_error": rel,
                              "passed": rel <= QUADRATURE_TOL})
        logger.step_complete("profile_quadrature", data={"max_rel_error": max(r["rel_error"] for r in quad_rows)})

        logger.step_start("localization")
        lin = linear_paths(data, [k * step for k in range(int(round(T / step)) + 1)])
        windowed_lin = WindowedTrajectory.from_trajectory(lin.positions(), padding)
        loc_rows = [
            {"tau": tau, "ratio": localization_gain(windowed_lin, tau, b_values[0], b_values[-1])}
            for tau in TAUS
        ]
        logger.step_complete("localization", data={"max_ratio": max(r["ratio"] for r in loc_rows)})

        logger.step_start("paired_highhigh")
        N = max(1, _largest_dyadic(grid_radius))
        cfg = FlowConfig(N=N, h=step, grid_radius=grid_radius, potential=InteractionPotential(beta=0.5))
        u = flow_trajectory(data.state, T, cfg)
        w = remainder_decomposition(u, data, cfg)
        paired = paired_highhigh_norm(lin.positions(), w, ParameterLadder().delta1)
        logger.step_complete("paired_highhigh", data={"value": paired})
    except Exception as e:
        logger.error("Norm diagnostics failed", error=e)
        raise

    norms_path = store.write_csv("xsb_norms.csv", pd.DataFrame(rows), header={"T": T, "step": step, "padding": padding})
    quad_path = store.write_csv("profile_quadrature.csv", pd.DataFrame(quad_rows))
    loc_path = store.write_plot_table("localization.csv", {
        "gain": ([r["tau"] for r in loc_rows], [r["ratio"] for r in loc_rows]),
    })
    passed = (
        all(r["passed"] for r in rows)
        and all(r["passed"] for r in quad_rows)
        and all(r["ratio"] <= LOCALIZATION_LIMIT for r in loc_rows)
    )

    duration_ms = int((time.time() - start_time) * 1000)
    logger.separator()
    if passed:
        logger.success("Norm diagnostics passed", data={"paired_highhigh": paired, "duration_ms": duration_ms})
    else:
        logger.warning("Norm diagnostics failed", data={"duration_ms": duration_ms})
    return {
        "run_id": run_id,
        "passed": passed,
        "rows": rows,
        "localization": loc_rows,
        "paired_highhigh": paired,
        "artifacts": [str(norms_path), str(quad_path), str(loc_path)],
        "store": store,
    }


def _largest_dyadic(R: int) -> int:
    N = 1
    while 2 * N <= R:
        N *= 2
    return N

