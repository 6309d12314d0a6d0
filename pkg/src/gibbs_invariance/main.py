"""
Gibbs experiments: a sampled chain with its energy trace, and the invariance
experiment with an optional perturbed-coupling control.
"""

import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from src.core_tools.artifact_store import ArtifactStore
from src.core_tools.logger import LabLogger
from src.gaussian_data.streams import SeededStream
from src.gibbs_invariance.chain import ACCEPTANCE_WINDOW, ChainSettings, sample_gibbs
from src.gibbs_invariance.invariance import Z_LIMIT, invariance_experiment
from src.potential_renorm.potential import InteractionPotential
from src.wave_dynamics.config import FlowConfig

logger = LabLogger("GibbsInvariance")

CONTROL_Z = 6.0


def run_gibbs_sample(
    run_id: str,
    N: int,
    beta: float,
    count: int,
    seed: int,
    out_dir: Path,
    chain: ChainSettings = ChainSettings(),
):
    """
    Runs one pCN chain on the truncated Gibbs measure and records its energy trace.

    Args:
        run_id: Identifier of this run.
        N: Dyadic truncation level.
        beta: Potential exponent.
        count: Number of kept states.
        seed: Seed of the root random stream.
        out_dir: Output directory for artifacts.
        chain: Step size, burn-in, thinning and adaptation.

    Returns:
        A dictionary with acceptance, autocorrelation diagnostics and artifact paths.
    """
    logger.set_run_id(run_id)
    start_time = time.time()
    logger.header("GIBBS SAMPLING")
    logger.info("Starting chain", data={"N": N, "beta": beta, "count": count, "seed": seed, **chain.model_dump()})

    store = ArtifactStore(out_dir, run_id)
    cfg = FlowConfig(N=N, potential=InteractionPotential(beta=beta))
    logger.step_start("chain")
    step_start = time.time()
    try:
        run = sample_gibbs(N, count, chain.burnin, chain.thin, cfg, SeededStream(seed=seed, stream_id=7),
                           chain.step_size, chain.adapt)
    except Exception as e:
        logger.step_failed("chain", e)
        raise
    logger.step_complete("chain", duration_ms=int((time.time() - step_start) * 1000),
                         data={"acceptance": round(run.acceptance_rate, 3)})

    index = np.arange(count)
    trace_path = store.write_csv("gibbs_energy.csv", pd.DataFrame({"sample": index, "potential_energy": run.energies}),
                                 header={"N": N, "beta": beta, "thin": chain.thin, "burnin": chain.burnin})
    plot_path = store.write_plot_table("gibbs_energy_plot.csv", {"potential_energy": (index, run.energies)})
    summary = {
        "acceptance_rate": run.acceptance_rate,
        "step_size": run.step_size,
        "iat": run.iat,
        "ess": run.ess,
        "mean_energy": float(np.mean(run.energies)),
    }
    summary_path = store.write_json("gibbs_summary.json", summary)
    low, high = ACCEPTANCE_WINDOW
    passed = low <= run.acceptance_rate <= high

    duration_ms = int((time.time() - start_time) * 1000)
    logger.separator()
    if passed:
        logger.success("Chain finished", data={**summary, "duration_ms": duration_ms})
    else:
        logger.warning("Acceptance outside target window", data={**summary, "duration_ms": duration_ms})
    return {
        "run_id": run_id,
        "passed": passed,
        **summary,
        "artifacts": [str(trace_path), str(plot_path), str(summary_path)],
        "store": store,
    }


def run_invariance(
    run_id: str,
    N: int,
    T: float,
    ensemble: int,
    seed: int,
    out_dir: Path,
    beta: float = 0.5,
    coupling: float = 1.0,
    chain: ChainSettings = ChainSettings(),
    observables: Optional[Sequence[str]] = None,
    chains: int = 4,
    workers: int = 1,
):
    """
    Evolves a Gibbs ensemble and compares observable means before and after.

    At coupling 1 every |z| must stay within Z_LIMIT; any other coupling is a
    control run whose potential-energy shift must reach CONTROL_Z.

    Args:
        run_id: Identifier of this run.
        N: Dyadic truncation level.
        T: Evolution time.
        ensemble: Number of Gibbs states.
        seed: Seed of the root random stream.
        out_dir: Output directory for artifacts.
        beta: Potential exponent.
        coupling: Nonlinearity scale of the evolving flow.
        chain: Step size, burn-in, thinning and adaptation.
        observables: Observable names (all when omitted).
        chains: Independent chains the ensemble is split over.
        workers: Worker threads.

    Returns:
        A dictionary with the report and the verdict.
    """
    logger.set_run_id(run_id)
    start_time = time.time()
    logger.header("GIBBS INVARIANCE")
    logger.info("Starting invariance experiment",
                data={"N": N, "T": T, "ensemble": ensemble, "coupling": coupling, "seed": seed})

    store = ArtifactStore(out_dir, run_id)
    cfg = FlowConfig(N=N, potential=InteractionPotential(beta=beta))
    logger.step_start("experiment")
    try:
        report = invariance_experiment(N, T, ensemble, observables, cfg, coupling, chain, chains, seed, workers)
    except Exception as e:
        logger.step_failed("experiment", e)
        raise
    logger.step_complete("experiment", duration_ms=int((time.time() - start_time) * 1000),
                         data={"max_abs_z": round(report.max_abs_z, 3)})

    path = store.write_ndjson("invariance_report.ndjson", report.to_records())
    if coupling == 1.0:
        passed = report.passed()
    else:
        passed = "potential_energy" in {s.name for s in report.shifts} and abs(report.z("potential_energy")) >= CONTROL_Z

    duration_ms = int((time.time() - start_time) * 1000)
    logger.separator()
    data = {s.name: round(s.z, 3) for s in report.shifts}
    if passed:
        logger.success("Invariance experiment passed", data={**data, "duration_ms": duration_ms})
    else:
        logger.warning("Invariance experiment failed", data={**data, "limit": Z_LIMIT, "duration_ms": duration_ms})
    return {
        "run_id": run_id,
        "passed": passed,
        "report": report,
        "artifacts": [str(path)],
        "store": store,
    }
