"""
Configuration objects for the truncated flow: the parameter ladder, the flow
configuration and sampled trajectories.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Dict, List, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core_tools.errors import GridMismatchError, ParameterRangeError
from src.lattice_spectral.fields import PhaseState, SpectralField
from src.lattice_spectral.lattice import SHARP, TruncationProfile, require_dyadic
from src.potential_renorm.nonlinearity import support_radius
from src.potential_renorm.potential import InteractionPotential
from src.potential_renorm.renorm import RenormTable, build_renorm_table

MAX_STEP = 0.1


class ParameterLadder(BaseModel):
    """Small parameters of the local theory with their strict ordering.

    1/2 - b_minus < b - 1/2 < b_plus - 1/2 < eta' < eta < kappa < delta2 < eps < delta1
    and b_minus < 1/2 < b < b_plus < 1.
    """

    model_config = ConfigDict(frozen=True)

    delta1: float = 0.2
    eps: float = 0.1
    delta2: float = 0.05
    kappa: float = 0.02
    eta: float = 0.01
    eta_prime: float = 0.005
    b_plus: float = 0.504
    b: float = 0.502
    b_minus: float = 0.499

    @model_validator(mode="after")
    def _ordering(self) -> "ParameterLadder":
        chain = [
            0.5 - self.b_minus,
            self.b - 0.5,
            self.b_plus - 0.5,
            self.eta_prime,
            self.eta,
            self.kappa,
            self.delta2,
            self.eps,
            self.delta1,
        ]
        if not all(a < b for a, b in zip(chain, chain[1:])) or chain[0] <= 0:
            raise ParameterRangeError(f"parameter ladder violates its strict ordering: {chain}")
        if not self.b_minus < 0.5 < self.b < self.b_plus < 1.0:
            raise ParameterRangeError("need b_minus < 1/2 < b < b_plus < 1")
        return self

    @property
    def s1(self) -> float:
        return 0.5 - self.delta1

    @property
    def s2(self) -> float:
        return 0.5 + self.delta2


class FlowConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    N: int
    h: float = 1e-2
    grid_radius: int | None = None
    potential: InteractionPotential = Field(default_factory=InteractionPotential)
    profile: TruncationProfile = SHARP

    @model_validator(mode="after")
    def _check(self) -> "FlowConfig":
        require_dyadic(self.N)
        if not 0.0 < abs(self.h) <= MAX_STEP:
            raise ParameterRangeError(f"step size must satisfy 0 < |h| <= {MAX_STEP}, got {self.h}")
        needed = support_radius(self.N, self.profile)
        if self.grid_radius is None:
            object.__setattr__(self, "grid_radius", needed)
        if self.grid_radius < needed:
            raise ParameterRangeError(
                f"grid radius {self.grid_radius} cannot hold the {self.profile.kind} truncation at N={self.N}"
            )
        return self

    @cached_property
    def renorm(self) -> RenormTable:
        return build_renorm_table(self.N, self.potential, self.grid_radius, self.profile)

    def with_step(self, h: float) -> "FlowConfig":
        return self.model_copy(update={"h": h})


Frame = Union[PhaseState, SpectralField]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Frames (phase states or fields) at uniformly spaced times."""

    times: np.ndarray
    frames: Sequence[Frame]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if len(times) != len(self.frames) or len(times) == 0:
            raise GridMismatchError("a trajectory needs one frame per time")
        if len(times) > 2:
            gaps = np.diff(times)
            if not np.allclose(gaps, gaps[0], rtol=1e-9, atol=1e-12):
                raise GridMismatchError("trajectory times must be uniformly spaced")
        radii = {f.grid_radius for f in self.frames}
        if len(radii) != 1:
            raise GridMismatchError(f"frames live on different grids: {sorted(radii)}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "frames", list(self.frames))

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0

    @property
    def grid_radius(self) -> int:
        return self.frames[0].grid_radius

    @property
    def final(self) -> Frame:
        return self.frames[-1]

    def positions(self) -> "Trajectory":
        return self.map(lambda s: s.pos if isinstance(s, PhaseState) else s)

    def velocities(self) -> "Trajectory":
        return self.map(lambda s: s.vel)

    def map(self, fn: Callable[[Frame], Frame]) -> "Trajectory":
        return Trajectory(self.times, [fn(f) for f in self.frames], dict(self.metadata))

    def coeff_stack(self) -> np.ndarray:
        """Position coefficients as an array of shape (times, 2R+1, 2R+1, 2R+1)."""
        return np.stack([(f.pos if isinstance(f, PhaseState) else f).coeffs for f in self.frames])

    @classmethod
    def from_stack(cls, times: np.ndarray, stack: np.ndarray) -> "Trajectory":
        R = (stack.shape[1] - 1) // 2
        return cls(times, [SpectralField(R, c) for c in stack])

    def _combine(self, other: "Trajectory", op) -> "Trajectory":
        if len(other) != len(self) or not np.allclose(other.times, self.times):
            raise GridMismatchError("trajectories have different time grids")
        if other.grid_radius != self.grid_radius:
            raise GridMismatchError(f"grid radius {self.grid_radius} vs {other.grid_radius}")
        return Trajectory(self.times, [op(a, b) for a, b in zip(self.frames, other.frames)])

    def __add__(self, other: "Trajectory") -> "Trajectory":
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other: "Trajectory") -> "Trajectory":
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self) -> "Trajectory":
        return self.map(lambda f: -f)

    def scaled(self, factor: float) -> "Trajectory":
        return self.map(lambda f: f * factor if isinstance(f, SpectralField) else PhaseState(f.pos * factor, f.vel * factor))

    def to_records(self) -> List[Dict[str, Any]]:
        """One NDJSON record per time with the position field."""
        out = []
        for t, frame in zip(self.times, self.frames):
            pos = frame.pos if isinstance(frame, PhaseState) else frame
            out.append({"t": float(t), "field": pos.to_records()})
        return out


def uniform_times(T: float, h: float) -> np.ndarray:
    """0, h, 2h, ... up to T (the last point is T itself)."""
    steps = int(round(abs(T) / abs(h)))
    if steps == 0:
        return np.array([0.0])
    return np.linspace(0.0, np.sign(T) * steps * abs(h), steps + 1)
