import numpy as np
import pandas as pd
import pytest

from src.core_tools.errors import GridOverflowError, ParameterRangeError
from src.gaussian_data.sampler import sample_gff
from src.gaussian_data.streams import SeededStream
from src.lattice_spectral.fields import SpectralField
from src.lattice_spectral.lattice import SMOOTH
from src.potential_renorm.main import run_dump_renorm
from src.potential_renorm.nonlinearity import renormalized_nonlinearity, renormalized_square, truncate
from src.potential_renorm.potential import InteractionPotential, potential_symbol, symmetrized_symbol
from src.potential_renorm.renorm import (
    build_renorm_table,
    naive_renorm_symbol,
    renorm_multiplier,
    renorm_symbol,
    wick_constant,
)


def test_potential_symbol():
    assert potential_symbol((0, 0, 0), 1.0) == 1.0
    assert potential_symbol((1, 1, 1), 2.0) == pytest.approx(0.25)
    with pytest.raises(ParameterRangeError):
        potential_symbol((1, 0, 0), 3.0)
    # raised inside the model validator, so pydantic reports it as a ValidationError
    with pytest.raises(ValueError):
        InteractionPotential(beta=3.5)
    V = InteractionPotential(beta=1.0, amplitude=2.0)
    assert V.at_zero == 2.0
    assert V.grid(1)[1, 1, 2] == pytest.approx(2.0 / np.sqrt(2.0))
    assert InteractionPotential.unit().at((5, 5, 5)) == 1.0


def test_symmetrized_symbol_is_permutation_invariant():
    V = InteractionPotential(beta=0.7)
    a, b, c = np.array([1, 0, 2]), np.array([-3, 1, 0]), np.array([0, 2, -1])
    assert symmetrized_symbol(a, b, c, V) == pytest.approx(symmetrized_symbol(c, a, b, V))


def test_wick_constant_small_levels():
    assert wick_constant(1) == 4.0
    assert wick_constant(2) == pytest.approx(11.2, rel=1e-15)
    assert wick_constant(8, SMOOTH) > wick_constant(8)


def test_wick_constant_grows_linearly():
    # a_N = 4 pi N + O(1)
    assert wick_constant(32) - wick_constant(16) == pytest.approx(4 * np.pi * 16, rel=0.05)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.5])
def test_renorm_symbol_matches_direct_sum(beta):
    V = InteractionPotential(beta=beta)
    for n in [(0, 0, 0), (1, 0, 0), (2, -1, 3), (4, 4, 4)]:
        assert renorm_symbol(n, 4, V) == pytest.approx(naive_renorm_symbol(n, 4, V), rel=1e-12)


def test_renorm_multiplier_matches_direct_sum():
    V = InteractionPotential(beta=0.5)
    grid = renorm_multiplier(3, 4, V)
    assert grid.shape == (7, 7, 7)
    for n in [(0, 0, 0), (3, -2, 1), (-3, -3, -3)]:
        idx = tuple(c + 3 for c in n)
        assert grid[idx] == pytest.approx(naive_renorm_symbol(n, 4, V), rel=1e-10)
    smooth = renorm_multiplier(2, 4, V, SMOOTH)
    assert smooth[2, 2, 2] == pytest.approx(naive_renorm_symbol((0, 0, 0), 4, V, SMOOTH), rel=1e-10)


@pytest.mark.slow
def test_renorm_multiplier_matches_direct_sum_at_sixteen():
    V = InteractionPotential(beta=1.0)
    grid = renorm_multiplier(4, 16, V)
    assert grid[4 + 3, 4 - 1, 4] == pytest.approx(naive_renorm_symbol((3, -1, 0), 16, V), rel=1e-10)


def test_unit_potential_multiplier_equals_wick_constant():
    grid = renorm_multiplier(2, 4, InteractionPotential.unit())
    assert np.allclose(grid, wick_constant(4), rtol=1e-12)


def test_renorm_table_frame_and_header():
    table = build_renorm_table(1, InteractionPotential(beta=1.0))
    frame = table.to_frame()
    assert list(frame.columns) == ["nx", "ny", "nz", "m_N"]
    assert len(frame) == 27
    assert table.header() == {"N": 1, "beta": 1.0, "a_N": "4.0"}


def test_renormalized_square_of_zero_is_minus_wick_constant():
    sq = renormalized_square(SpectralField.zeros(4), 2)
    assert sq.coeff((0, 0, 0)) == pytest.approx(-11.2)
    assert sq.norm_sq() == pytest.approx(11.2 ** 2)
    with pytest.raises(GridOverflowError):
        renormalized_square(SpectralField.zeros(3), 2)


def test_renormalized_square_has_zero_mean_on_free_field():
    stream = SeededStream(seed=7, stream_id=2)
    values = [renormalized_square(sample_gff(stream.child(i), 4).pos, 2).coeff((0, 0, 0)).real for i in range(4000)]
    mean = np.mean(values)
    se = np.std(values, ddof=1) / np.sqrt(len(values))
    assert abs(mean) <= 5 * se


def test_nonlinearity_with_unit_potential():
    # a constant symbol is a delta interaction: F = P_N[u^3 - 3 a_N u]
    u = SpectralField.from_modes(2, {(1, 0, 0): 0.5})
    F = renormalized_nonlinearity(u, 1, InteractionPotential.unit())
    assert F.grid_radius == 2
    assert F.coeff((1, 0, 0)) == pytest.approx(0.375 - 6.0)
    assert F.coeff((0, 0, 0)) == pytest.approx(0.0)
    assert F.is_real()


def test_nonlinearity_vanishes_without_interaction():
    u = sample_gff(SeededStream(seed=1), 4).pos
    assert renormalized_nonlinearity(u, 4, InteractionPotential.zero()).norm_sq() == 0.0
    with pytest.raises(GridOverflowError):
        renormalized_nonlinearity(u, 8, InteractionPotential())


def test_truncate_shrinks_window():
    u = sample_gff(SeededStream(seed=2), 8).pos
    assert truncate(u, 2).grid_radius == 2
    assert truncate(u, 2, SMOOTH).grid_radius == 4


def test_smooth_square_needs_doubled_support():
    # P_{<=4} under the smooth profile reaches |n| = 8, so its square reaches 16
    u = SpectralField.from_modes(16, {(6, 0, 0): 1.0}, real=False)
    sq = renormalized_square(u, 4, SMOOTH)
    assert sq.coeff((12, 0, 0)) == pytest.approx(0.25)
    for R in (8, 15):
        with pytest.raises(GridOverflowError):
            renormalized_square(u.resize(R), 4, SMOOTH)
    assert renormalized_square(u.resize(8), 4).grid_radius == 8
    with pytest.raises(GridOverflowError):
        renormalized_nonlinearity(u.resize(7), 4, InteractionPotential(), SMOOTH)
    assert renormalized_nonlinearity(u.resize(8), 4, InteractionPotential(), SMOOTH).grid_radius == 8


def test_dump_renorm_writes_header(tmp_path):
    result = run_dump_renorm("dump-renorm-s0", 1, 1.0, tmp_path)
    path = tmp_path / "renorm_N1.csv"
    lines = path.read_text().splitlines()
    assert lines[:3] == ["# N=1", "# beta=1.0", "# a_N=4.0"]
    frame = pd.read_csv(path, comment="#")
    assert frame.loc[(frame.nx == 0) & (frame.ny == 0) & (frame.nz == 0), "m_N"].iloc[0] == pytest.approx(
        naive_renorm_symbol((0, 0, 0), 1, InteractionPotential(beta=1.0)), rel=1e-10
    )
    assert result["a_N"] == 4.0
