"""
Preconditioned Crank-Nicolson chain for the truncated Gibbs measure.

The target on positions is exp(-E_N(pos)) times the free-field law; velocities
are independent standard Gaussians and are redrawn at every step. Proposals
pos' = sqrt(1 - rho^2) pos + rho xi with xi a fresh free-field sample leave the
free field invariant, so the acceptance probability only involves E_N.
"""

import math
import time
from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.core_tools.errors import InsufficientDataError, ParameterRangeError
from src.core_tools.logger import LabLogger
from src.core_tools.stats import effective_sample_size, integrated_autocorr_time
from src.gaussian_data.sampler import gff_positions, standard_complex_field
from src.gaussian_data.streams import SeededStream
from src.gibbs_invariance.energy import potential_energy
from src.lattice_spectral.fields import PhaseState, SpectralField
from src.wave_dynamics.config import FlowConfig

logger = LabLogger("GibbsChain")

ACCEPTANCE_WINDOW = (0.2, 0.6)
ADAPT_EVERY = 50


class ChainSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    step_size: float = Field(default=0.5, gt=0.0, lt=1.0)
    burnin: int = Field(default=1000, ge=0)
    thin: int = Field(default=10, ge=1)
    adapt: bool = True


@dataclass(frozen=True, eq=False)
class GibbsChain:
    """
    Attributes:
        state: Current position and the velocity drawn with it
        energy: Potential energy of the current position
        step_size: pCN parameter rho in (0, 1)
        accepted: Accepted proposals so far
        proposed: Proposals so far
        stream: Stream the step draws are derived from
        active: Optional mask of the modes the chain moves (the others stay at zero)
    """

    state: PhaseState
    energy: float
    step_size: float
    accepted: int
    proposed: int
    stream: SeededStream
    active: Optional[np.ndarray] = None

    @classmethod
    def start(cls, cfg: FlowConfig, stream: SeededStream, step_size: float = 0.5,
              active: Optional[np.ndarray] = None) -> "GibbsChain":
        """Chain started from a free-field sample (the prior)."""
        _check_step(step_size)
        rng = stream.child(0).generator()
        pos = _masked(gff_positions(rng, cfg.grid_radius), active)
        vel = SpectralField(cfg.grid_radius, standard_complex_field(rng, cfg.grid_radius))
        return cls(PhaseState(pos, vel), potential_energy(pos, cfg), step_size, 0, 0, stream, active)

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposed if self.proposed else 0.0


def _check_step(rho: float):
    if not 0.0 < rho < 1.0:
        raise ParameterRangeError(f"pCN step size must lie in (0, 1), got {rho}")


def _masked(field: SpectralField, active: Optional[np.ndarray]) -> SpectralField:
    if active is None:
        return field
    return field.with_coeffs(np.where(active, field.coeffs, 0.0))


def pcn_step(chain: GibbsChain, cfg: FlowConfig) -> GibbsChain:
    """One proposal, accepted with probability min(1, exp(E(pos) - E(pos')))."""
    _check_step(chain.step_size)
    rng = chain.stream.child(chain.proposed + 1).generator()
    R = chain.state.grid_radius
    rho = chain.step_size
    xi = _masked(gff_positions(rng, R), chain.active)
    proposal = chain.state.pos.with_coeffs(math.sqrt(1.0 - rho * rho) * chain.state.pos.coeffs + rho * xi.coeffs)
    energy = potential_energy(proposal, cfg)
    accept = math.log(rng.uniform()) < chain.energy - energy
    vel = SpectralField(R, standard_complex_field(rng, R))
    pos, energy = (proposal, energy) if accept else (chain.state.pos, chain.energy)
    return replace(chain, state=PhaseState(pos, vel), energy=energy,
                   accepted=chain.accepted + int(accept), proposed=chain.proposed + 1)


def _adapted(rho: float, rate: float) -> float:
    low, high = ACCEPTANCE_WINDOW
    if rate < low + 0.1:
        return max(rho * 0.8, 1e-3)
    if rate > high - 0.1:
        return min(rho * 1.25, 0.99)
    return rho


@dataclass
class GibbsRun:
    states: List[PhaseState]
    energies: np.ndarray
    acceptance_rate: float
    step_size: float
    iat: Optional[float]
    ess: Optional[float]
    chain: GibbsChain


def sample_gibbs(
    N: int,
    count: int,
    burnin: int = 1000,
    thin: int = 10,
    cfg: Optional[FlowConfig] = None,
    stream: Optional[SeededStream] = None,
    step_size: float = 0.5,
    adapt: bool = True,
    active: Optional[np.ndarray] = None,
) -> GibbsRun:
    """
    Draws count thinned states of the truncated Gibbs measure after burn-in.

    The step size is tuned during burn-in towards an acceptance rate inside
    ACCEPTANCE_WINDOW and frozen afterwards.

    Args:
        N: Dyadic truncation level.
        count: Number of returned states.
        burnin: Discarded steps.
        thin: Steps between kept states.
        cfg: Flow configuration (potential, profile, grid); FlowConfig(N=N) when omitted.
        stream: Random stream of the chain.
        step_size: Initial pCN parameter.
        adapt: Tune the step size during burn-in.
        active: Optional mask of moved modes.

    Returns:
        Kept states, their potential energies and chain diagnostics.
    """
    if count < 1:
        raise ParameterRangeError(f"count must be >= 1, got {count}")
    cfg = cfg or FlowConfig(N=N)
    if cfg.N != N:
        raise ParameterRangeError(f"configuration truncates at {cfg.N}, not {N}")
    stream = stream or SeededStream(seed=0, stream_id=7)
    start_time = time.time()
    chain = GibbsChain.start(cfg, stream, step_size, active)

    window_accepted = 0
    for i in range(1, burnin + 1):
        before = chain.accepted
        chain = pcn_step(chain, cfg)
        window_accepted += chain.accepted - before
        if adapt and i % ADAPT_EVERY == 0:
            chain = replace(chain, step_size=_adapted(chain.step_size, window_accepted / ADAPT_EVERY))
            window_accepted = 0
    kept_from, kept_accepted = chain.proposed, chain.accepted

    states, energies = [], []
    for _ in range(count):
        for _ in range(thin):
            chain = pcn_step(chain, cfg)
        states.append(chain.state)
        energies.append(chain.energy)
    energies = np.asarray(energies)
    rate = (chain.accepted - kept_accepted) / max(chain.proposed - kept_from, 1)

    try:
        iat, ess = integrated_autocorr_time(energies), effective_sample_size(energies)
    except InsufficientDataError:
        iat = ess = None
    low, high = ACCEPTANCE_WINDOW
    log = logger.info if low <= rate <= high else logger.warning
    log("Gibbs chain finished", data={"N": N, "count": count, "acceptance": round(rate, 3),
                                      "step_size": round(chain.step_size, 4), "iat": iat, "ess": ess,
                                      "duration_ms": int((time.time() - start_time) * 1000)})
    return GibbsRun(states, energies, rate, chain.step_size, iat, ess, chain)
