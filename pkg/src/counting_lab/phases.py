"""
Linear forms in frequency variables and dispersive phase functions built from them.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.core_tools.errors import ParameterRangeError
from src.lattice_spectral.lattice import bracket

Vec = Tuple[int, int, int]

WINDOW_TOL = 1e-9


@dataclass(frozen=True)
class LinearForm:
    """sum_i c_i n_{v_i} + shift over named frequency variables."""

    coeffs: Tuple[Tuple[str, int], ...]
    shift: Vec = (0, 0, 0)

    @classmethod
    def of(cls, *names: str, shift: Sequence[int] = (0, 0, 0), **weighted: int) -> "LinearForm":
        """LinearForm.of("n1", "n2") is n1 + n2; keyword arguments give other integer coefficients."""
        acc: Dict[str, int] = {}
        for name in names:
            acc[name] = acc.get(name, 0) + 1
        for name, c in weighted.items():
            acc[name] = acc.get(name, 0) + int(c)
        return cls(tuple(sorted((k, v) for k, v in acc.items() if v != 0)), tuple(int(c) for c in shift))

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.coeffs)

    def evaluate(self, values: Mapping[str, np.ndarray]) -> np.ndarray:
        out = None
        for name, c in self.coeffs:
            term = c * values[name]
            out = term if out is None else out + term
        if out is None:
            raise ParameterRangeError("a linear form needs at least one variable")
        return out + np.asarray(self.shift, dtype=out.dtype)

    def max_norm(self, radii: Mapping[str, float]) -> float:
        return sum(abs(c) * radii[name] for name, c in self.coeffs) + float(np.linalg.norm(self.shift))

    def negated(self) -> "LinearForm":
        return LinearForm(tuple((k, -v) for k, v in self.coeffs), tuple(-c for c in self.shift))


@dataclass(frozen=True)
class PhaseTerm:
    sign: int
    form: LinearForm

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ParameterRangeError(f"phase sign must be +1 or -1, got {self.sign}")


@dataclass(frozen=True)
class PhaseSpec:
    """sum_j sign_j <form_j> plus a real constant."""

    terms: Tuple[PhaseTerm, ...]
    constant: float = 0.0

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[int, LinearForm]], constant: float = 0.0) -> "PhaseSpec":
        return cls(tuple(PhaseTerm(s, f) for s, f in pairs), constant)

    def evaluate(self, values: Mapping[str, np.ndarray]) -> np.ndarray:
        total = self.constant
        for term in self.terms:
            total = total + term.sign * bracket(term.form.evaluate(values))
        return np.asarray(total, dtype=float)

    def bound(self, radii: Mapping[str, float]) -> float:
        """Upper bound of |phase| over domains contained in the given radii."""
        return abs(self.constant) + sum(float(np.sqrt(1.0 + t.form.max_norm(radii) ** 2)) for t in self.terms)

    def flipped(self) -> "PhaseSpec":
        """Phase of the reflected tuple with every sign reversed: equals -phi(-n)."""
        return PhaseSpec(tuple(PhaseTerm(-t.sign, t.form.negated()) for t in self.terms), -self.constant)


@dataclass(frozen=True)
class PhaseWindow:
    """Window condition |phi - m| <= 1, or phi in [m, m + 1) when half_open.

    Several alternative phases share the same m and their indicators are added.
    """

    phases: Tuple[PhaseSpec, ...]
    half_open: bool = False

    @classmethod
    def single(cls, phase: PhaseSpec, half_open: bool = False) -> "PhaseWindow":
        return cls((phase,), half_open)


def window_hits(phi: np.ndarray, m, half_open: bool = False) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    if half_open:
        return (phi >= m - WINDOW_TOL) & (phi < m + 1 - WINDOW_TOL)
    return np.abs(phi - m) <= 1.0 + WINDOW_TOL


def window_candidates(phi: np.ndarray, half_open: bool = False) -> Tuple[np.ndarray, int]:
    """Lowest integer m whose window holds phi, and how many consecutive m to try (3, or 1 if half open)."""
    phi = np.asarray(phi, dtype=float)
    if half_open:
        return np.floor(phi + WINDOW_TOL).astype(np.int64), 1
    return np.ceil(phi - 1.0 - WINDOW_TOL).astype(np.int64), 3


def resonance_factor(phi: np.ndarray) -> np.ndarray:
    """sum over integers m with |phi - m| <= 1 of <m>^{-1}."""
    low, count = window_candidates(phi)
    total = np.zeros(np.shape(phi))
    for j in range(count):
        m = low + j
        total += np.where(window_hits(phi, m), 1.0 / np.sqrt(1.0 + m.astype(float) ** 2), 0.0)
    return total


def cubic_phase(
    signs: Sequence[int],
    n123: Optional[LinearForm] = None,
    n1: Optional[LinearForm] = None,
    n2: Optional[LinearForm] = None,
    n3: Optional[LinearForm] = None,
) -> PhaseSpec:
    """+-_{123} <n_123> +-_1 <n_1> +-_2 <n_2> +-_3 <n_3> with signs (s123, s1, s2, s3).

    Each frequency is a linear form; the defaults are the plain variables
    n1, n2, n3 and their sum.
    """
    n1 = n1 or LinearForm.of("n1")
    n2 = n2 or LinearForm.of("n2")
    n3 = n3 or LinearForm.of("n3")
    n123 = n123 or LinearForm.of("n1", "n2", "n3")
    return PhaseSpec.from_pairs(list(zip(signs, (n123, n1, n2, n3))))
