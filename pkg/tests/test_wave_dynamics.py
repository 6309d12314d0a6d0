import json

import numpy as np
import pandas as pd
import pytest

from src.core_tools.errors import GridMismatchError, InsufficientDataError, ParameterRangeError
from src.gaussian_data.propagator import linear_flow, quadratic_energy
from src.gaussian_data.sampler import sample_gff
from src.gaussian_data.streams import SeededStream
from src.lattice_spectral.fields import PhaseState, SpectralField
from src.lattice_spectral.lattice import SMOOTH, bracket
from src.lattice_spectral.transforms import multiply
from src.potential_renorm.potential import InteractionPotential
from src.wave_dynamics.config import FlowConfig, ParameterLadder, Trajectory, uniform_times
from src.wave_dynamics.duhamel import duhamel, duhamel_final, duhamel_velocity
from src.wave_dynamics.hamiltonian import hamiltonian
from src.wave_dynamics.integrator import energy_drift, flow, flow_trajectory, richardson_ratio, state_distance, step
from src.wave_dynamics.main import run_regularity, run_simulate
from src.wave_dynamics.paraproducts import box_not_very_low, box_very_low, pair_selector, paraproduct
from src.wave_dynamics.regularity_table import predicted_regularity
from src.wave_dynamics.remainder import remainder_decomposition
from src.wave_dynamics.stochastic_objects import objects_at_time, stochastic_objects


@pytest.fixture
def data():
    return sample_gff(SeededStream(seed=41, stream_id=1), 4)


def test_parameter_ladder():
    ladder = ParameterLadder()
    assert ladder.s1 == pytest.approx(0.3)
    assert ladder.s2 == pytest.approx(0.55)
    with pytest.raises(ValueError):
        ParameterLadder(eps=0.3)
    with pytest.raises(ValueError):
        ParameterLadder(b_minus=0.5)


def test_flow_config_validation():
    assert FlowConfig(N=4).grid_radius == 4
    with pytest.raises(ValueError):
        FlowConfig(N=3)
    with pytest.raises(ValueError):
        FlowConfig(N=4, h=0.2)
    with pytest.raises(ValueError):
        FlowConfig(N=4, grid_radius=2)
    assert FlowConfig(N=4, profile=SMOOTH).grid_radius == 8
    with pytest.raises(ValueError):
        FlowConfig(N=4, grid_radius=4, profile=SMOOTH)
    cfg = FlowConfig(N=2, potential=InteractionPotential(beta=1.0))
    assert cfg.renorm.a_N == pytest.approx(11.2)
    assert cfg.with_step(0.05).h == 0.05


def test_trajectory_validation():
    f = SpectralField.zeros(1)
    with pytest.raises(GridMismatchError):
        Trajectory([0.0, 0.1, 0.3], [f, f, f])
    with pytest.raises(GridMismatchError):
        Trajectory([0.0, 0.1], [f, SpectralField.zeros(2)])
    a = Trajectory([0.0, 0.1], [f, f])
    with pytest.raises(GridMismatchError):
        a + Trajectory([0.0, 0.2], [f, f])
    assert a.step == pytest.approx(0.1)
    assert np.allclose(uniform_times(1.0, 0.25), [0.0, 0.25, 0.5, 0.75, 1.0])
    assert np.allclose(uniform_times(-0.5, 0.25), [0.0, -0.25, -0.5])


def test_zero_coupling_flow_is_linear(data):
    cfg = FlowConfig(N=4, h=0.1)
    out = flow(data.state, 0.37, cfg, coupling=0.0)
    exact = linear_flow(data, 0.37)
    assert state_distance(out, exact) <= 1e-10
    assert hamiltonian(out, cfg, coupling=0.0) == pytest.approx(0.5 * quadratic_energy(data.state), rel=1e-12)


def test_flow_is_time_reversible(data):
    cfg = FlowConfig(N=4, h=0.05, potential=InteractionPotential(beta=0.5))
    there = flow(data.state, 0.5, cfg)
    back = flow(there, -0.5, cfg)
    assert state_distance(back, data.state) <= 1e-9 * max(1.0, state_distance(data.state, PhaseState.zeros(4)))


def test_step_matches_flow_of_one_step(data):
    cfg = FlowConfig(N=4, h=0.05)
    assert state_distance(step(data.state, cfg), flow(data.state, 0.05, cfg)) <= 1e-12
    with pytest.raises(ParameterRangeError):
        step(data.state, cfg, h=0.5)


def test_second_order_convergence(data):
    cfg = FlowConfig(N=4, h=0.04, potential=InteractionPotential(beta=0.5))
    assert 3.0 <= richardson_ratio(data.state, 0.4, cfg) <= 5.0


def test_energy_is_nearly_conserved():
    d = sample_gff(SeededStream(seed=42, stream_id=1), 2)
    cfg = FlowConfig(N=2, h=0.005, potential=InteractionPotential(beta=0.5))
    assert energy_drift(d.state, 0.2, cfg) <= 1e-2


def test_flow_trajectory_records(data):
    cfg = FlowConfig(N=4, h=0.05)
    traj = flow_trajectory(data.state, 0.3, cfg, record_every=2)
    assert len(traj) == 4
    assert np.allclose(traj.times, [0.0, 0.1, 0.2, 0.3])
    assert state_distance(traj.final, flow(data.state, 0.3, cfg)) <= 1e-10
    with pytest.raises(ParameterRangeError):
        flow_trajectory(data.state, 0.3, cfg, record_every=0)


def constant_forcing(T, h, n=(1, 0, 0)):
    times = uniform_times(T, h)
    f = SpectralField.from_modes(2, {n: 1.0})
    return Trajectory(times, [f] * len(times)), float(bracket(n))


def test_duhamel_of_constant_forcing():
    forcing, w = constant_forcing(1.0, 1e-3)
    pos = duhamel(forcing)
    vel = duhamel_velocity(forcing)
    t = forcing.times
    expected = (1.0 - np.cos(t * w)) / w ** 2
    assert np.allclose([f.coeff((1, 0, 0)).real for f in pos.frames], expected, atol=1e-6)
    assert np.allclose([f.coeff((1, 0, 0)).real for f in vel.frames], np.sin(t * w) / w, atol=1e-6)
    assert duhamel_final(forcing).allclose(pos.final, atol=1e-12)


def test_duhamel_needs_two_samples():
    f = SpectralField.zeros(1)
    with pytest.raises(InsufficientDataError):
        duhamel(Trajectory([0.0], [f]))
    with pytest.raises(InsufficientDataError):
        duhamel_final(Trajectory([0.0], [f]))


def test_paraproducts_decompose_the_product():
    rng = np.random.default_rng(3)
    shape = (9, 9, 9)
    f = SpectralField(4, rng.standard_normal(shape) + 0j).enforce_reality()
    g = SpectralField(4, rng.standard_normal(shape) + 0j).enforce_reality()
    parts = [paraproduct(f, g, kind) for kind in ("ll", "eq", "gg")]
    assert (parts[0] + parts[1] + parts[2]).allclose(multiply(f, g), atol=1e-10)
    V = InteractionPotential(beta=1.0)
    full = multiply(multiply(f, g).scale_by(V.grid(8)), f)
    split = box_very_low(f, g, f, V) + box_not_very_low(f, g, f, V)
    assert split.allclose(full, atol=1e-10)
    with pytest.raises(ParameterRangeError):
        pair_selector("diagonal", 0.1)


def test_predicted_regularity():
    wave = predicted_regularity("wave", 0.5)
    assert wave.s_gaussian == -0.5
    assert wave.s_probabilistic == pytest.approx(-2.5 / 3.0)
    assert wave.s_deterministic == 0.0
    assert predicted_regularity("wave", 2.8).s_probabilistic == -1.5
    assert predicted_regularity("wave", 0.2).s_deterministic == pytest.approx(0.3)
    assert predicted_regularity("schrodinger", 0.5).s_probabilistic == pytest.approx(-0.75)
    with pytest.raises(ParameterRangeError):
        predicted_regularity("wave", 3.0)
    with pytest.raises(ParameterRangeError):
        predicted_regularity("heat", 1.0)


def test_stochastic_objects_at_time_zero(data):
    cfg = FlowConfig(N=2, h=0.05)
    objects = stochastic_objects(data, cfg, uniform_times(0.2, 0.05))
    assert objects.lin.frames[0].allclose(data.pos)
    assert objects.square.grid_radius == 4
    assert objects.cubic_duh.frames[0].norm_sq() == 0.0
    single = objects_at_time(data, cfg, 0.2)
    assert single["cubic_duh"].allclose(objects.cubic_duh.final, atol=1e-10)
    assert single["lin"].allclose(objects.lin.final, atol=1e-12)


def test_remainder_is_smaller_than_cubic_object(data):
    cfg = FlowConfig(N=4, h=0.01, potential=InteractionPotential(beta=0.5))
    u = flow_trajectory(data.state, 0.1, cfg)
    w = remainder_decomposition(u, data, cfg)
    assert w.frames[0].norm_sq() == pytest.approx(0.0, abs=1e-20)
    cubic = stochastic_objects(data, cfg, u.times).cubic_duh.final
    assert w.final.norm_sq() < cubic.norm_sq()
    with pytest.raises(GridMismatchError):
        remainder_decomposition(u, sample_gff(SeededStream(seed=1), 8), cfg)


def test_simulate_runner(tmp_path):
    result = run_simulate("simulate-s5", 2, 0.5, 0.01, 0.04, 5, tmp_path)
    energy = pd.read_csv(tmp_path / "energy.csv", comment="#")
    assert list(energy.columns) == ["t", "H_N"]
    assert len(energy) == 5
    lines = (tmp_path / "trajectory.ndjson").read_text().splitlines()
    assert json.loads(lines[0])["t"] == 0.0
    assert result["energy_drift"] < 1e-3
    summary = json.loads((tmp_path / "simulation_summary.json").read_text())
    assert set(summary) >= {"energy_drift", "remainder_l2", "cubic_duh_l2"}


@pytest.mark.slow
def test_regularity_runner(tmp_path):
    result = run_regularity("regularity-s1", 8, 0.5, 0.2, 4, 1, tmp_path, gff_radius=32, h=0.05)
    frame = pd.read_csv(tmp_path / "regularity_fits.csv", comment="#")
    assert set(frame.object) == {"gff", "cubic_duh", "remainder"}
    assert set(result["medians"]) == {"gff", "cubic_duh", "remainder"}
    assert (tmp_path / "regularity_summary.json").exists()
