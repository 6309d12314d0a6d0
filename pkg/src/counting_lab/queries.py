"""
Counting queries: frequency variables ranging over finite domains, dyadic
annulus constraints on linear forms of them, phase windows and weights.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.core_tools.errors import ParameterRangeError
from src.counting_lab.phases import LinearForm, PhaseWindow
from src.lattice_spectral.lattice import band_mask, lattice_points, require_dyadic

Assignment = Mapping[str, np.ndarray]
Weight = Callable[[Assignment], np.ndarray]


@lru_cache(maxsize=32)
def band_points(N: int) -> np.ndarray:
    """Lattice points of the dyadic band of scale N as an (K, 3) array."""
    N = require_dyadic(N)
    pts = lattice_points(N)[band_mask(N, N).ravel()]
    pts.setflags(write=False)
    return pts


@lru_cache(maxsize=32)
def ball_points(R: int) -> np.ndarray:
    pts = lattice_points(R)
    pts = pts[np.sum(pts * pts, axis=1) <= R * R]
    pts.setflags(write=False)
    return pts


def in_band(v: np.ndarray, N: int) -> np.ndarray:
    n2 = np.sum(np.asarray(v) ** 2, axis=-1)
    if N == 1:
        return n2 <= 1
    return (4 * n2 > N * N) & (n2 <= N * N)


@dataclass(frozen=True, eq=False)
class Variable:
    name: str
    points: np.ndarray

    @classmethod
    def band(cls, name: str, N: int) -> "Variable":
        return cls(name, band_points(N))

    @classmethod
    def fixed(cls, name: str, vector: Sequence[int]) -> "Variable":
        return cls(name, np.asarray([vector], dtype=np.int64))

    @property
    def size(self) -> int:
        return int(len(self.points))


@dataclass(frozen=True)
class Annulus:
    """|form| ~ N in the band convention."""

    form: LinearForm
    N: int

    def __post_init__(self):
        require_dyadic(self.N, "annulus scale")

    def holds(self, values: Assignment) -> np.ndarray:
        return in_band(self.form.evaluate(values), self.N)


@dataclass(frozen=True, eq=False)
class CountingQuery:
    lemma_id: str
    variables: Tuple[Variable, ...]
    annuli: Tuple[Annulus, ...] = ()
    windows: Tuple[PhaseWindow, ...] = ()
    weight: Optional[Weight] = None
    scales: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ParameterRangeError(f"duplicate variable names in {names}")
        known = set(names)
        for form in [a.form for a in self.annuli] + [t.form for w in self.windows for p in w.phases for t in p.terms]:
            missing = set(form.variables) - known
            if missing:
                raise ParameterRangeError(f"query {self.lemma_id} refers to unknown variables {sorted(missing)}")

    @property
    def size(self) -> int:
        """Number of tuples before any constraint is applied."""
        total = 1
        for v in self.variables:
            total *= v.size
        return total

    def radii(self) -> Dict[str, float]:
        return {v.name: float(np.sqrt(np.max(np.sum(v.points ** 2, axis=1)))) if v.size else 0.0
                for v in self.variables}

    def with_constraint(self, annulus: Annulus) -> "CountingQuery":
        return CountingQuery(self.lemma_id, self.variables, self.annuli + (annulus,), self.windows,
                             self.weight, self.scales)

    def with_weight(self, weight: Optional[Weight]) -> "CountingQuery":
        return CountingQuery(self.lemma_id, self.variables, self.annuli, self.windows, weight, self.scales)
