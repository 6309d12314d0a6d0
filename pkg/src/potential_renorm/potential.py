"""
Interaction potential given by its Fourier symbol V(n) = amplitude * <n>^{-beta}.
"""

from functools import lru_cache

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.core_tools.errors import ParameterRangeError
from src.lattice_spectral.lattice import bracket, bracket_grid


def potential_symbol(n, beta: float) -> np.ndarray:
    """<n>^{-beta} for 0 < beta < 3."""
    if not 0.0 < beta < 3.0:
        raise ParameterRangeError(f"beta must lie in (0, 3), got {beta}")
    return bracket(n) ** (-beta)


class InteractionPotential(BaseModel):
    """Even, positive symbol V(n) = amplitude <n>^{-beta}.

    beta = 0 gives the constant symbol used as the V = 1 surrogate and
    amplitude = 0 switches the interaction off.
    """

    model_config = ConfigDict(frozen=True)

    beta: float = Field(default=0.5, ge=0.0)
    amplitude: float = Field(default=1.0, ge=0.0)

    @field_validator("beta")
    @classmethod
    def _beta_below_three(cls, value: float) -> float:
        if value >= 3.0:
            raise ParameterRangeError(f"beta must be < 3, got {value}")
        return value

    @classmethod
    def unit(cls) -> "InteractionPotential":
        return cls(beta=0.0, amplitude=1.0)

    @classmethod
    def zero(cls) -> "InteractionPotential":
        return cls(beta=0.0, amplitude=0.0)

    @property
    def at_zero(self) -> float:
        return self.amplitude

    def at(self, n) -> np.ndarray:
        return self.amplitude * bracket(n) ** (-self.beta)

    def grid(self, R: int) -> np.ndarray:
        return _symbol_grid(self, R)


@lru_cache(maxsize=64)
def _symbol_grid(V: InteractionPotential, R: int) -> np.ndarray:
    out = V.amplitude * bracket_grid(R) ** (-V.beta)
    out.setflags(write=False)
    return out


def symmetrized_symbol(n1, n2, n3, V: InteractionPotential) -> np.ndarray:
    """Average of V over the pair sums n1+n2, n1+n3, n2+n3 (each pair counted twice among 6 permutations)."""
    n1, n2, n3 = (np.asarray(x) for x in (n1, n2, n3))
    return (V.at(n1 + n2) + V.at(n1 + n3) + V.at(n2 + n3)) / 3.0
