"""
Remainder of the truncated solution after removing the linear and cubic
stochastic objects: w_N = u_N - lin - cubic_duh.
"""

import numpy as np

from src.core_tools.errors import GridMismatchError
from src.gaussian_data.sampler import GaussianData
from src.wave_dynamics.config import FlowConfig, Trajectory
from src.wave_dynamics.stochastic_objects import fit_trajectory_regularity, stochastic_objects


def remainder_decomposition(u: Trajectory, d: GaussianData, cfg: FlowConfig) -> Trajectory:
    """w_N on the time grid of u; the fitted regularity of the final frame is in metadata["regularity"].

    Raises:
        GridMismatchError: if u and the data live on different windows or u does not start at 0
    """
    if u.grid_radius != d.grid_radius:
        raise GridMismatchError(f"solution radius {u.grid_radius} differs from data radius {d.grid_radius}")
    if not np.isclose(u.times[0], 0.0):
        raise GridMismatchError("the solution trajectory must start at t = 0")
    objects = stochastic_objects(d, cfg, u.times)
    w = u.positions() - objects.lin - objects.cubic_duh
    w.metadata["regularity"] = fit_trajectory_regularity(w)
    return w
