"""
Duhamel operator of the Klein-Gordon equation on sampled forcings.

w(t) = int_{t0}^t sin((t - t') <n>) / <n> F(t') dt' solves
(d_t^2 + 1 - Delta) w = F with zero data at t0. The kernel splits as
sin(t<n>) cos(t'<n>) - cos(t<n>) sin(t'<n>), so each mode needs two
cumulative quadratures instead of a double sum.
"""

import numpy as np
from scipy.integrate import cumulative_trapezoid

from src.core_tools.errors import InsufficientDataError
from src.lattice_spectral.fields import PhaseState, SpectralField
from src.lattice_spectral.lattice import bracket_grid
from src.wave_dynamics.config import Trajectory

CHUNK = 1 << 15


def _moments(forcing: Trajectory):
    if len(forcing) < 2:
        raise InsufficientDataError("the Duhamel quadrature needs at least two forcing samples")
    tau = forcing.times - forcing.times[0]
    stack = forcing.coeff_stack()
    shape = stack.shape[1:]
    flat = stack.reshape(len(tau), -1)
    omega = bracket_grid(forcing.grid_radius).reshape(-1)
    return tau, flat, omega, shape


def _integrate(tau: np.ndarray, flat: np.ndarray, omega: np.ndarray):
    """Yield (slice, sin(tau w), cos(tau w), C, S) over chunks of modes."""
    for lo in range(0, flat.shape[1], CHUNK):
        sl = slice(lo, lo + CHUNK)
        phase = np.outer(tau, omega[sl])
        cos, sin = np.cos(phase), np.sin(phase)
        C = cumulative_trapezoid(cos * flat[:, sl], tau, axis=0, initial=0.0)
        S = cumulative_trapezoid(sin * flat[:, sl], tau, axis=0, initial=0.0)
        yield sl, sin, cos, C, S


def duhamel_state(forcing: Trajectory) -> Trajectory:
    """Position and velocity of the Duhamel integral at every forcing time."""
    tau, flat, omega, shape = _moments(forcing)
    pos = np.zeros_like(flat, dtype=complex)
    vel = np.zeros_like(flat, dtype=complex)
    for sl, sin, cos, C, S in _integrate(tau, flat, omega):
        pos[:, sl] = (sin * C - cos * S) / omega[sl]
        vel[:, sl] = cos * C + sin * S
    R = forcing.grid_radius
    frames = [
        PhaseState(SpectralField(R, p.reshape(shape)), SpectralField(R, v.reshape(shape)))
        for p, v in zip(pos, vel)
    ]
    return Trajectory(forcing.times, frames, {"grid_radius": R})


def duhamel(forcing: Trajectory) -> Trajectory:
    """Trajectory of fields w(t_j); trapezoid accuracy O(h^2) in the sample spacing."""
    return duhamel_state(forcing).positions()


def duhamel_velocity(forcing: Trajectory) -> Trajectory:
    return duhamel_state(forcing).velocities()


def duhamel_final(forcing: Trajectory):
    """w at the last forcing time only, accumulated frame by frame without stacking the trajectory."""
    if len(forcing) < 2:
        raise InsufficientDataError("the Duhamel quadrature needs at least two forcing samples")
    R = forcing.grid_radius
    omega = bracket_grid(R)
    weights = np.full(len(forcing), forcing.step)
    weights[0] = weights[-1] = forcing.step / 2.0
    T = forcing.times[-1]
    acc = np.zeros_like(omega, dtype=complex)
    for t, wgt, frame in zip(forcing.times, weights, forcing.frames):
        acc += wgt * np.sin((T - t) * omega) * frame.coeffs
    return SpectralField(R, acc / omega)
