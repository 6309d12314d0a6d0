import math

import numpy as np
import pandas as pd
import pytest

from src.core_tools.errors import GridMismatchError, PaddingError, ParameterRangeError
from src.gaussian_data.sampler import sample_gff
from src.gaussian_data.streams import SeededStream
from src.lattice_spectral.fields import SpectralField
from src.spacetime_norms.main import run_norms
from src.spacetime_norms.xsb import (
    WindowedTrajectory,
    cutoff,
    cutoff_transform,
    cutoff_transform_quad,
    extended_times,
    halfwave_factorized_norm,
    halfwave_norm,
    localization_gain,
    localization_loss,
    paired_highhigh_norm,
    profile_factor,
    profile_factor_quad,
    xsb_norm,
)
from src.wave_dynamics.config import Trajectory
from src.wave_dynamics.stochastic_objects import linear_paths

STEP = 1.0 / 32


@pytest.fixture
def u0():
    return sample_gff(SeededStream(seed=51, stream_id=5), 2).pos


def test_cutoff_shape():
    values = cutoff([-1.0, -0.25, 0.0, 0.5, 1.0, 1.25, 2.0], 1.0)
    assert np.allclose(values, [0.0, 0.5, 1.0, 1.0, 1.0, 0.5, 0.0])


def test_extended_window():
    times, K = extended_times(1.0, 0.25)
    assert K == 2
    assert np.allclose(times, np.arange(-2, 7) * 0.25)
    with pytest.raises(GridMismatchError):
        extended_times(1.0, 0.3)


def test_padding_and_shape_checks(u0):
    with pytest.raises(PaddingError):
        WindowedTrajectory.from_half_wave(u0, 1.0, STEP, padding=2)
    with pytest.raises(GridMismatchError):
        WindowedTrajectory(1.0, STEP, 2, np.zeros((3, 125)))
    f = SpectralField.zeros(1)
    with pytest.raises(GridMismatchError):
        WindowedTrajectory.from_trajectory(Trajectory([0.1, 0.2], [f, f]))


def test_zero_exponents_give_time_space_l2(u0):
    w = WindowedTrajectory.from_half_wave(u0, 1.0, STEP)
    direct = np.sqrt(STEP * np.sum(np.abs(w.samples) ** 2))
    assert xsb_norm(w, 0.0, 0.0) == pytest.approx(direct, rel=1e-10)


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("s,b", [(0.0, 0.49), (0.0, 0.55), (0.5, 0.49), (0.5, 0.55), (-0.5, 0.3)])
def test_half_wave_norm_matches_quadrature(u0, sign, s, b):
    w = WindowedTrajectory.from_half_wave(u0, 1.0, STEP, sign)
    exact = halfwave_factorized_norm(u0, s, b, 1.0)
    assert xsb_norm(w, s, b) == pytest.approx(exact, rel=1e-4)
    assert halfwave_norm(w, s, b, sign) >= xsb_norm(w, s, b) * (1 - 1e-12)


@pytest.mark.parametrize("b", [0.49, 0.55])
def test_single_mode_matches_quadrature(b):
    w = WindowedTrajectory.from_half_wave(SpectralField.constant(1, 1.0), 1.0, 1.0 / 128)
    exact = profile_factor_quad(1.0, b, 1.0)
    assert xsb_norm(w, 0.0, b) == pytest.approx(exact, rel=1e-6)
    assert profile_factor(1.0, b, 1.0, 1.0 / 128) == pytest.approx(exact, rel=1e-6)


def test_kink_term_removes_the_second_order_error():
    w = WindowedTrajectory.from_half_wave(SpectralField.constant(0, 1.0), 1.0, 1.0 / 64, padding=8)
    lambdas, power = w.power
    raw = math.sqrt(float(np.sum((1.0 + (np.abs(lambdas) - 1.0) ** 2) ** 0.49 * power[:, 0])))
    exact = profile_factor_quad(1.0, 0.49, 1.0)
    assert abs(raw - exact) / exact > 5e-4
    assert abs(xsb_norm(w, 0.0, 0.49) - exact) / exact < 1e-4


@pytest.mark.parametrize("mu", [0.0, 0.3, 1.0, 2.0 * math.pi, 7.5, 40.0])
def test_cutoff_transform_closed_form(mu):
    assert cutoff_transform(mu, 1.0) == pytest.approx(cutoff_transform_quad(mu, 1.0), abs=1e-9)
    assert cutoff_transform(-mu, 2.0) == pytest.approx(cutoff_transform_quad(mu, 2.0), abs=1e-9)


def test_linearity_of_windowed_trajectories(u0):
    a = WindowedTrajectory.from_half_wave(u0, 1.0, STEP)
    doubled = a + a
    assert xsb_norm(doubled, 0.5, 0.55) == pytest.approx(2 * xsb_norm(a, 0.5, 0.55))
    assert xsb_norm(a.scaled(3.0), 0.5, 0.55) == pytest.approx(3 * xsb_norm(a, 0.5, 0.55))


def test_localization_ratios(u0):
    w = WindowedTrajectory.from_half_wave(u0, 1.0, STEP)
    assert 0.0 < localization_gain(w, 0.25, 0.49, 0.55) < 10.0
    assert localization_loss(w, 0.5, 0.55) > 0.0
    zero = w.scaled(0.0)
    assert localization_gain(zero, 0.5, 0.49, 0.55) == 0.0
    with pytest.raises(ParameterRangeError):
        localization_gain(w, 1.5, 0.49, 0.55)
    with pytest.raises(ParameterRangeError):
        localization_gain(w, 0.5, 0.55, 0.49)
    with pytest.raises(ParameterRangeError):
        localization_loss(w, 0.5, 0.45)


def test_paired_highhigh_norm(u0):
    d = sample_gff(SeededStream(seed=52, stream_id=5), 2)
    times = [k * STEP for k in range(9)]
    lin = linear_paths(d, times).positions()
    assert paired_highhigh_norm(lin, lin.scaled(0.0), 0.2) == 0.0
    assert paired_highhigh_norm(lin, lin, 0.2) > 0.0
    with pytest.raises(GridMismatchError):
        paired_highhigh_norm(lin, linear_paths(d, times[:5]).positions(), 0.2)


def test_norms_runner(tmp_path):
    result = run_norms("norms-s2", 2, 0.5, 1.0 / 64, 2, tmp_path)
    table = pd.read_csv(tmp_path / "xsb_norms.csv", comment="#")
    assert len(table) == 2 * 2 * 2
    assert table.passed.all()
    quad_table = pd.read_csv(tmp_path / "profile_quadrature.csv")
    assert (quad_table.rel_error <= 1e-4).all()
    assert (table.rel_error <= 1e-4).all()
    loc = pd.read_csv(tmp_path / "localization.csv")
    assert list(loc.columns) == ["x", "y", "series"]
    assert result["paired_highhigh"] >= 0.0
