"""
Renormalization table export: writes m_N on the window with a_N in the header.
"""

import time
from pathlib import Path
from typing import Optional

from src.core_tools.artifact_store import ArtifactStore
from src.core_tools.logger import LabLogger
from src.potential_renorm.potential import InteractionPotential
from src.potential_renorm.renorm import build_renorm_table

logger = LabLogger("Renormalization")


def run_dump_renorm(run_id: str, N: int, beta: float, out_dir: Path, grid_radius: Optional[int] = None):
    """
    Builds the renormalization table for one truncation level and writes it as CSV.

    Args:
        run_id: Identifier of this run.
        N: Dyadic truncation level.
        beta: Potential exponent.
        out_dir: Output directory for artifacts.
        grid_radius: Window radius of the table (defaults to N).

    Returns:
        A dictionary with a_N and the artifact path.
    """
    logger.set_run_id(run_id)
    start_time = time.time()
    logger.header("RENORMALIZATION TABLE")
    logger.info("Building table", data={"N": N, "beta": beta, "grid_radius": grid_radius or N})

    store = ArtifactStore(out_dir, run_id)
    try:
        table = build_renorm_table(N, InteractionPotential(beta=beta), grid_radius)
        path = store.write_csv(f"renorm_N{N}.csv", table.to_frame(), header=table.header())
    except Exception as e:
        logger.error("Failed to build renormalization table", error=e)
        raise

    duration_ms = int((time.time() - start_time) * 1000)
    logger.separator()
    logger.success("Renormalization table written", data={"a_N": table.a_N, "path": path.name, "duration_ms": duration_ms})
    return {"run_id": run_id, "passed": True, "a_N": table.a_N, "artifacts": [str(path)], "store": store}
