"""
Stochastic objects built on the linear evolution of Gaussian data: the linear
wave, its renormalized square, the cubic nonlinearity applied to it and the
Duhamel integral of that cubic term.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np

from src.core_tools.errors import InsufficientDataError
from src.gaussian_data.propagator import linear_flow
from src.gaussian_data.sampler import GaussianData
from src.lattice_spectral.fields import PhaseState
from src.lattice_spectral.norms import field_regularity
from src.potential_renorm.nonlinearity import renormalized_nonlinearity, renormalized_square, support_radius
from src.wave_dynamics.config import FlowConfig, Trajectory, uniform_times
from src.wave_dynamics.duhamel import duhamel, duhamel_final


@dataclass(frozen=True)
class StochasticObjects:
    lin: Trajectory
    square: Trajectory
    cubic: Trajectory
    cubic_duh: Trajectory

    def as_dict(self) -> Dict[str, Trajectory]:
        return {"lin": self.lin, "square": self.square, "cubic": self.cubic, "cubic_duh": self.cubic_duh}


def linear_paths(d: GaussianData | PhaseState, times: Sequence[float]) -> Trajectory:
    return Trajectory(np.asarray(times, dtype=float), [linear_flow(d, float(t)) for t in times])


def stochastic_objects(d: GaussianData, cfg: FlowConfig, times: Sequence[float]) -> StochasticObjects:
    """The four objects at the given uniformly spaced times (starting at 0).

    The square lives on radius max(R, twice the support radius); the other objects on the data radius R.
    """
    times = np.asarray(times, dtype=float)
    lin_states = linear_paths(d, times)
    lin = lin_states.positions()
    square_radius = max(d.grid_radius, 2 * support_radius(cfg.N, cfg.profile))
    square = lin.map(lambda u: renormalized_square(u.resize(square_radius), cfg.N, cfg.profile))
    cubic = lin.map(lambda u: renormalized_nonlinearity(u, cfg.N, cfg.potential, cfg.profile))
    cubic_duh = -duhamel(cubic) if len(times) > 1 else cubic.map(lambda f: f * 0.0)
    return StochasticObjects(lin, square, cubic, cubic_duh)


def fit_trajectory_regularity(traj: Trajectory, index: int = -1) -> Optional[float]:
    """Fitted C^s exponent of one frame, None when too few bands carry mass."""
    frame = traj.frames[index]
    field = frame.pos if isinstance(frame, PhaseState) else frame
    try:
        return field_regularity(field)
    except InsufficientDataError:
        return None


def objects_at_time(d: GaussianData, cfg: FlowConfig, T: float) -> Dict[str, object]:
    """lin and cubic_duh at time T only, with the cubic forcing sampled on the cfg.h grid."""
    times = uniform_times(T, cfg.h)
    forcing = Trajectory(times, [
        renormalized_nonlinearity(linear_flow(d, float(t)).pos, cfg.N, cfg.potential, cfg.profile) for t in times
    ])
    cubic_duh = -duhamel_final(forcing) if len(times) > 1 else forcing.final * 0.0
    return {"lin": linear_flow(d, float(times[-1])).pos, "cubic_duh": cubic_duh}
