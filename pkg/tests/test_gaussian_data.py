import numpy as np
import pytest

from src.core_tools.errors import ParameterRangeError
from src.gaussian_data.process import (
    offdiagonal_double_integral,
    offdiagonal_second_moment,
    profile_at_time,
    sample_process_path,
)
from src.gaussian_data.propagator import half_wave, linear_flow, quadratic_energy
from src.gaussian_data.sampler import sample_gff, sample_gff_ensemble
from src.gaussian_data.streams import SeededStream
from src.lattice_spectral.lattice import bracket_grid
from src.lattice_spectral.norms import sobolev_norm
from src.lattice_spectral.projectors import project_leq


def test_streams_are_reproducible_and_independent():
    a = SeededStream(seed=5, stream_id=1)
    assert np.array_equal(a.generator().standard_normal(4), SeededStream(seed=5, stream_id=1).generator().standard_normal(4))
    assert not np.array_equal(a.generator().standard_normal(4), a.child(0).generator().standard_normal(4))
    assert a.child(3) == a.child(3)
    assert a.child(3) != a.child(4)


def test_child_ids_do_not_collide_across_parents():
    ids = {SeededStream(seed=5, stream_id=p).child(i).stream_id for p in range(4) for i in range(256)}
    assert len(ids) == 4 * 256
    # a linear (parent, index) mix would map both of these to the same id
    assert SeededStream(seed=5, stream_id=0).child(0x9E3779B1) != SeededStream(seed=5, stream_id=1).child(0)
    assert SeededStream(seed=5, stream_id=2).child(7) == SeededStream(seed=5, stream_id=2).child(7)
    with pytest.raises(ParameterRangeError):
        SeededStream(seed=5).child(-1)


def test_gff_sample_is_real_and_reproducible():
    stream = SeededStream(seed=9, stream_id=1)
    d = sample_gff(stream, 3)
    assert d.pos.is_real() and d.vel.is_real()
    assert d.grid_radius == 3
    assert np.array_equal(d.modes, sample_gff(stream, 3).pos.coeffs)
    with pytest.raises(ParameterRangeError):
        sample_gff(stream, 0)


def test_ensemble_independent_of_worker_count():
    stream = SeededStream(seed=2, stream_id=1)
    one = sample_gff_ensemble(stream, 2, 6, workers=1)
    many = sample_gff_ensemble(stream, 2, 6, workers=3)
    assert all(a.pos.allclose(b.pos, atol=0.0) for a, b in zip(one, many))


def test_gff_low_mode_mass():
    # E ||P_{<=1} u||^2 = sum over |n| <= 1 of <n>^{-2} = 4
    stream = SeededStream(seed=13, stream_id=1)
    values = np.array([sobolev_norm(project_leq(sample_gff(stream.child(i), 1).pos, 1), 0) ** 2 for i in range(10_000)])
    se = values.std(ddof=1) / np.sqrt(values.size)
    assert abs(values.mean() - 4.0) <= 5 * se


def test_velocity_modes_have_unit_variance():
    stream = SeededStream(seed=14, stream_id=1)
    values = np.array([abs(sample_gff(stream.child(i), 1).vel.coeff((1, 0, 0))) ** 2 for i in range(5000)])
    se = values.std(ddof=1) / np.sqrt(values.size)
    assert abs(values.mean() - 1.0) <= 5 * se


def test_linear_flow_group_and_energy():
    d = sample_gff(SeededStream(seed=3), 3)
    s1 = linear_flow(linear_flow(d, 0.3), 0.4)
    s2 = linear_flow(d, 0.7)
    assert s1.pos.allclose(s2.pos, atol=1e-12) and s1.vel.allclose(s2.vel, atol=1e-12)
    assert quadratic_energy(s2) == pytest.approx(quadratic_energy(d.state), rel=1e-12)
    assert linear_flow(d, 0.0).pos.allclose(d.pos)


def test_linear_flow_splits_into_half_waves():
    d = sample_gff(SeededStream(seed=4), 2)
    t = 1.3
    w = bracket_grid(2)
    plus = d.pos.with_coeffs(d.pos.coeffs - 1j * d.vel.coeffs / w)
    minus = d.pos.with_coeffs(d.pos.coeffs + 1j * d.vel.coeffs / w)
    combined = 0.5 * (half_wave(plus, t, 1) + half_wave(minus, t, -1))
    assert combined.allclose(linear_flow(d, t).pos, atol=1e-12)
    with pytest.raises(ParameterRangeError):
        half_wave(d.pos, t, 0)


def test_process_terminal_variance_is_free_field():
    path = sample_process_path(SeededStream(seed=1, stream_id=6), 2, cells=16)
    assert np.allclose(path.variances.sum(axis=0), bracket_grid(2) ** -2.0)
    assert np.all(path.variances >= -1e-15)
    assert path.cells == 16
    assert path.value_at(0).norm_sq() == 0.0
    assert path.terminal_modes().is_real()
    with pytest.raises(ParameterRangeError):
        sample_process_path(SeededStream(seed=1), 2, cells=0)


def test_profile_at_time_boundaries():
    assert np.all(profile_at_time(2, 0.0) == 0.0)
    assert profile_at_time(2, 0.5)[2, 2, 2] == 1.0


def test_offdiagonal_integral_second_moment():
    n = (1, 1, 0)
    values, exact = [], None
    for i in range(3000):
        path = sample_process_path(SeededStream(seed=21, stream_id=6).child(i), 2)
        values.append(offdiagonal_double_integral(path, n, (-1, -1, 0)))
        exact = offdiagonal_second_moment(path, n)
    values = np.asarray(values)
    second = np.abs(values) ** 2
    se = second.std(ddof=1) / np.sqrt(second.size)
    assert abs(second.mean() - exact) <= 5 * se
    mean_se = values.real.std(ddof=1) / np.sqrt(values.size)
    assert abs(values.real.mean()) <= 5 * mean_se
