"""
Field containers on the frequency window ||n||_inf <= R.

SpectralField stores the Fourier coefficients of a function on T^3 (normalized
measure) as a (2R+1)^3 complex array indexed by n + R. Real fields satisfy
coeff(-n) = conj(coeff(n)).
"""

from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Tuple

import numpy as np

from src.core_tools.errors import GridMismatchError, ParameterRangeError
from src.lattice_spectral.lattice import half_lattice_mask, index_of, lattice_points, norm_sq_grid


def _mirror(arr: np.ndarray) -> np.ndarray:
    """Coefficient array evaluated at -n."""
    return arr[::-1, ::-1, ::-1]


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid_radius: int
    coeffs: np.ndarray

    def __post_init__(self):
        R = int(self.grid_radius)
        if R < 0:
            raise ParameterRangeError(f"grid radius must be >= 0, got {R}")
        arr = np.asarray(self.coeffs, dtype=complex)
        if arr.shape != (2 * R + 1,) * 3:
            raise GridMismatchError(f"coefficient array {arr.shape} does not match grid radius {R}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "grid_radius", R)
        object.__setattr__(self, "coeffs", arr)

    # construction

    @classmethod
    def zeros(cls, R: int) -> "SpectralField":
        return cls(R, np.zeros((2 * R + 1,) * 3, dtype=complex))

    @classmethod
    def from_modes(cls, R: int, modes: Mapping[Tuple[int, int, int], complex], real: bool = True) -> "SpectralField":
        """Field with the given coefficients; real=True also fills -n with the conjugate."""
        arr = np.zeros((2 * R + 1,) * 3, dtype=complex)
        for n, value in modes.items():
            arr[index_of(n, R)] = value
            if real:
                arr[index_of(tuple(-c for c in n), R)] = np.conj(value)
        return cls(R, arr)

    @classmethod
    def constant(cls, R: int, value: complex) -> "SpectralField":
        return cls.from_modes(R, {(0, 0, 0): value}, real=False)

    def with_coeffs(self, arr: np.ndarray) -> "SpectralField":
        return SpectralField(self.grid_radius, arr)

    # access

    def coeff(self, n) -> complex:
        return complex(self.coeffs[index_of(n, self.grid_radius)])

    def __getitem__(self, n) -> complex:
        return self.coeff(n)

    @property
    def shape(self) -> tuple:
        return self.coeffs.shape

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def support_radius_sq(self) -> int:
        """Largest |n|^2 carrying a nonzero coefficient (-1 for the zero field)."""
        nz = np.abs(self.coeffs) > 0
        if not nz.any():
            return -1
        return int(norm_sq_grid(self.grid_radius)[nz].max())

    def is_real(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.coeffs, np.conj(_mirror(self.coeffs)), atol=atol, rtol=0.0))

    def enforce_reality(self) -> "SpectralField":
        return self.with_coeffs(0.5 * (self.coeffs + np.conj(_mirror(self.coeffs))))

    def reflect(self) -> "SpectralField":
        """The field x -> f(-x), i.e. coefficients at -n."""
        return self.with_coeffs(_mirror(self.coeffs))

    def conj(self) -> "SpectralField":
        """Complex conjugate in physical space."""
        return self.with_coeffs(np.conj(_mirror(self.coeffs)))

    def resize(self, R_new: int) -> "SpectralField":
        """Zero-pad or truncate the window to radius R_new."""
        R = self.grid_radius
        if R_new == R:
            return self
        out = np.zeros((2 * R_new + 1,) * 3, dtype=complex)
        r = min(R, R_new)
        src = slice(R - r, R + r + 1)
        dst = slice(R_new - r, R_new + r + 1)
        out[dst, dst, dst] = self.coeffs[src, src, src]
        return SpectralField(R_new, out)

    # arithmetic

    def _check(self, other: "SpectralField"):
        if other.grid_radius != self.grid_radius:
            raise GridMismatchError(f"grid radius {self.grid_radius} vs {other.grid_radius}")

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check(other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check(other)
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __neg__(self) -> "SpectralField":
        return self.with_coeffs(-self.coeffs)

    def __mul__(self, scalar) -> "SpectralField":
        if isinstance(scalar, SpectralField):
            raise TypeError("use lattice_spectral.transforms.multiply for field products")
        return self.with_coeffs(self.coeffs * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "SpectralField":
        return self.with_coeffs(self.coeffs / scalar)

    def scale_by(self, multiplier: np.ndarray) -> "SpectralField":
        """Apply a Fourier multiplier given on the window."""
        return self.with_coeffs(self.coeffs * multiplier)

    def allclose(self, other: "SpectralField", atol: float = 1e-12, rtol: float = 0.0) -> bool:
        self._check(other)
        return bool(np.allclose(self.coeffs, other.coeffs, atol=atol, rtol=rtol))

    # serialization

    def to_records(self) -> List[Dict[str, Any]]:
        """NDJSON records: a header {grid_radius} then {n, re, im} over the half-lattice."""
        R = self.grid_radius
        records: List[Dict[str, Any]] = [{"grid_radius": R}]
        mask = half_lattice_mask(R).ravel()
        pts = lattice_points(R)[mask]
        vals = self.coeffs.ravel()[mask]
        for n, v in zip(pts, vals):
            records.append({"n": [int(c) for c in n], "re": float(v.real), "im": float(v.imag)})
        return records

    @classmethod
    def from_records(cls, records: Iterable[Dict[str, Any]]) -> "SpectralField":
        records = list(records)
        if not records or "grid_radius" not in records[0]:
            raise ParameterRangeError("field records must start with a grid_radius header")
        R = int(records[0]["grid_radius"])
        modes = {tuple(r["n"]): complex(r["re"], r["im"]) for r in records[1:]}
        return cls.from_modes(R, modes, real=True)


@dataclass(frozen=True, eq=False)
class PhaseState:
    """Position u and velocity d_t u on a common grid."""

    pos: SpectralField
    vel: SpectralField

    def __post_init__(self):
        if self.pos.grid_radius != self.vel.grid_radius:
            raise GridMismatchError(
                f"position grid {self.pos.grid_radius} and velocity grid {self.vel.grid_radius} differ"
            )

    @property
    def grid_radius(self) -> int:
        return self.pos.grid_radius

    @classmethod
    def zeros(cls, R: int) -> "PhaseState":
        return cls(SpectralField.zeros(R), SpectralField.zeros(R))

    def resize(self, R_new: int) -> "PhaseState":
        return PhaseState(self.pos.resize(R_new), self.vel.resize(R_new))

    def __add__(self, other: "PhaseState") -> "PhaseState":
        return PhaseState(self.pos + other.pos, self.vel + other.vel)

    def __sub__(self, other: "PhaseState") -> "PhaseState":
        return PhaseState(self.pos - other.pos, self.vel - other.vel)

    def __neg__(self) -> "PhaseState":
        return PhaseState(-self.pos, -self.vel)
