"""
Strang splitting for u'' + (1 - Delta) u = -coupling * F_N(u).

One step is a linear half step, a kick of the velocity by the renormalized
nonlinearity, and a second linear half step. The scheme is symplectic and
time reversible, so energy errors stay bounded over long runs.
"""

import math
from typing import Optional

import numpy as np

from src.core_tools.errors import GridOverflowError, ParameterRangeError
from src.core_tools.logger import LabLogger
from src.gaussian_data.propagator import linear_flow, quadratic_energy
from src.lattice_spectral.fields import PhaseState
from src.potential_renorm.nonlinearity import renormalized_nonlinearity
from src.wave_dynamics.config import MAX_STEP, FlowConfig, Trajectory
from src.wave_dynamics.hamiltonian import hamiltonian

logger = LabLogger("Integrator")

_REMAINDER_TOL = 1e-12


def _check(state: PhaseState, cfg: FlowConfig):
    if state.grid_radius < cfg.N:
        raise GridOverflowError(f"state radius {state.grid_radius} is below N={cfg.N}")


def _kick(state: PhaseState, h: float, cfg: FlowConfig, coupling: float) -> PhaseState:
    if coupling == 0.0 or cfg.potential.amplitude == 0.0:
        return state
    force = renormalized_nonlinearity(state.pos, cfg.N, cfg.potential, cfg.profile)
    return PhaseState(state.pos, state.vel - force * (h * coupling))


def step(state: PhaseState, cfg: FlowConfig, h: Optional[float] = None, coupling: float = 1.0) -> PhaseState:
    """One Strang step of size h (cfg.h by default); negative h runs backwards."""
    _check(state, cfg)
    h = cfg.h if h is None else h
    if not 0.0 < abs(h) <= MAX_STEP:
        raise ParameterRangeError(f"step size must satisfy 0 < |h| <= {MAX_STEP}, got {h}")
    half = linear_flow(state, h / 2.0)
    return linear_flow(_kick(half, h, cfg, coupling), h / 2.0)


def _step_count(t: float, h: float) -> tuple[int, float]:
    n = int(math.floor(abs(t) / abs(h) + 1e-9))
    return n, t - math.copysign(n * abs(h), t)


def flow(state: PhaseState, t: float, cfg: FlowConfig, coupling: float = 1.0) -> PhaseState:
    """Compose steps of size cfg.h (signed like t) plus one remainder step reaching t.

    Adjacent linear half steps are merged into one exact rotation.
    """
    _check(state, cfg)
    if t == 0.0:
        return state
    n, rest = _step_count(t, cfg.h)
    h = math.copysign(abs(cfg.h), t)
    current = state
    if n > 0:
        current = linear_flow(current, h / 2.0)
        for i in range(n):
            current = _kick(current, h, cfg, coupling)
            current = linear_flow(current, h if i < n - 1 else h / 2.0)
    if abs(rest) > _REMAINDER_TOL:
        current = step(current, cfg, rest, coupling)
    return current


def flow_trajectory(
    state: PhaseState,
    T: float,
    cfg: FlowConfig,
    coupling: float = 1.0,
    record_every: int = 1,
) -> Trajectory:
    """States at times 0, k h, 2 k h, ... up to T (k = record_every)."""
    _check(state, cfg)
    if record_every < 1:
        raise ParameterRangeError(f"record_every must be >= 1, got {record_every}")
    n, _ = _step_count(T, cfg.h)
    h = math.copysign(abs(cfg.h), T) if T != 0 else cfg.h
    times, frames = [0.0], [state]
    current = state
    for i in range(1, n + 1):
        current = step(current, cfg, h, coupling)
        if i % record_every == 0:
            times.append(i * h)
            frames.append(current)
    return Trajectory(np.array(times), frames, {"N": cfg.N, "h": h, "coupling": coupling})


def state_distance(a: PhaseState, b: PhaseState) -> float:
    """Energy-norm distance sqrt(sum <n>^2 |dpos|^2 + |dvel|^2)."""
    return float(np.sqrt(quadratic_energy(a - b)))


def richardson_ratio(state: PhaseState, t: float, cfg: FlowConfig, coupling: float = 1.0) -> float:
    """|Phi_h - Phi_{h/2}| / |Phi_{h/2} - Phi_{h/4}| at time t; close to 4 for a second-order scheme."""
    coarse = flow(state, t, cfg, coupling)
    mid = flow(state, t, cfg.with_step(cfg.h / 2.0), coupling)
    fine = flow(state, t, cfg.with_step(cfg.h / 4.0), coupling)
    denom = state_distance(mid, fine)
    return state_distance(coarse, mid) / denom if denom > 0 else float("inf")


def energy_drift(state: PhaseState, t: float, cfg: FlowConfig, coupling: float = 1.0) -> float:
    """|H(Phi_t state) - H(state)| / |H(state)| with H the coupling-weighted Hamiltonian."""
    start = hamiltonian(state, cfg, coupling)
    end = hamiltonian(flow(state, t, cfg, coupling), cfg, coupling)
    drift = abs(end - start) / abs(start) if start != 0 else abs(end - start)
    logger.debug("Energy drift", data={"t": t, "h": cfg.h, "drift": drift})
    return drift
