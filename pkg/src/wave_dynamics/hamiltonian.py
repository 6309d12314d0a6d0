"""
Conserved energy of the truncated renormalized flow.
"""

from src.core_tools.errors import GridOverflowError
from src.gaussian_data.propagator import quadratic_energy
from src.gibbs_invariance.energy import potential_energy
from src.lattice_spectral.fields import PhaseState
from src.wave_dynamics.config import FlowConfig


def hamiltonian(state: PhaseState, cfg: FlowConfig, coupling: float = 1.0) -> float:
    """1/2 sum (<n>^2 |pos|^2 + |vel|^2) + coupling * E_N(pos).

    Raises:
        GridOverflowError: if the state window cannot hold frequencies up to N
    """
    if state.grid_radius < cfg.N:
        raise GridOverflowError(f"state radius {state.grid_radius} is below N={cfg.N}")
    kinetic = 0.5 * quadratic_energy(state)
    if coupling == 0.0:
        return kinetic
    return kinetic + coupling * potential_energy(state.pos, cfg)
