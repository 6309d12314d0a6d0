"""
Tests for the truncated potential energy, the pCN Gibbs chain and the
invariance experiment.
"""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from src.core_tools.errors import ParameterRangeError
from src.gaussian_data.propagator import linear_flow
from src.gaussian_data.sampler import sample_gff
from src.gaussian_data.streams import SeededStream
from src.gibbs_invariance.chain import ChainSettings, GibbsChain, pcn_step, sample_gibbs
from src.gibbs_invariance.energy import potential_energy, truncated_potential_energy
from src.gibbs_invariance.invariance import (
    OBSERVABLES,
    InvarianceReport,
    ObservableShift,
    abs2_e1,
    control_energy_drift,
    control_flow,
    invariance_experiment,
    re_e1,
    replication_check,
)
from src.gibbs_invariance.main import run_gibbs_sample, run_invariance
from src.lattice_spectral.fields import PhaseState, SpectralField
from src.potential_renorm.nonlinearity import renormalized_nonlinearity
from src.potential_renorm.potential import InteractionPotential
from src.wave_dynamics.config import FlowConfig

QUICK_CHAIN = ChainSettings(burnin=20, thin=2)


class TestEnergy:
    def test_zero_field(self):
        assert truncated_potential_energy(SpectralField.zeros(1), 1, InteractionPotential.unit()) == pytest.approx(4.0)
        assert truncated_potential_energy(SpectralField.zeros(2), 1, InteractionPotential.zero()) == 0.0

    @pytest.mark.parametrize("mode,part", [((1, 0, 0), "re"), ((1, 1, 0), "im"), ((0, 0, 0), "re")])
    def test_gradient_is_the_nonlinearity(self, mode, part):
        V = InteractionPotential(beta=0.5)
        u = sample_gff(SeededStream(seed=4, stream_id=7), 2).pos
        F = renormalized_nonlinearity(u, 2, V)
        value = 1.0 if part == "re" else 1j
        delta = SpectralField.from_modes(2, {mode: value}, real=mode != (0, 0, 0))
        eps = 1e-4
        numeric = (truncated_potential_energy(u + delta * eps, 2, V)
                   - truncated_potential_energy(u - delta * eps, 2, V)) / (2 * eps)
        if mode == (0, 0, 0):
            expected = F[mode].real
        elif part == "re":
            expected = 2.0 * F[mode].real
        else:
            expected = 2.0 * F[mode].imag
        assert numeric == pytest.approx(expected, rel=1e-5, abs=1e-8)

    def test_config_wrapper(self):
        cfg = FlowConfig(N=2, potential=InteractionPotential(beta=0.3))
        u = sample_gff(SeededStream(seed=1, stream_id=7), 2).pos
        assert potential_energy(u, cfg) == truncated_potential_energy(u, 2, cfg.potential)


class TestChain:
    def test_settings_validated(self):
        with pytest.raises(ValueError):
            ChainSettings(step_size=1.5)
        with pytest.raises(ParameterRangeError):
            GibbsChain.start(FlowConfig(N=1), SeededStream(seed=0, stream_id=7), step_size=0.0)

    def test_argument_checks(self):
        with pytest.raises(ParameterRangeError):
            sample_gibbs(1, 0)
        with pytest.raises(ParameterRangeError):
            sample_gibbs(1, 10, cfg=FlowConfig(N=2))

    def test_step_bookkeeping(self):
        cfg = FlowConfig(N=1)
        chain = GibbsChain.start(cfg, SeededStream(seed=2, stream_id=7))
        for _ in range(5):
            chain = pcn_step(chain, cfg)
        assert chain.proposed == 5
        assert 0 <= chain.accepted <= 5
        assert chain.energy == pytest.approx(potential_energy(chain.state.pos, cfg))
        assert chain.state.pos.is_real()

    def test_chain_is_reproducible(self):
        first = sample_gibbs(1, 50, burnin=100, thin=2, stream=SeededStream(seed=3, stream_id=7))
        second = sample_gibbs(1, 50, burnin=100, thin=2, stream=SeededStream(seed=3, stream_id=7))
        np.testing.assert_array_equal(first.energies, second.energies)
        assert len(first.states) == 50
        assert 0.0 <= first.acceptance_rate <= 1.0
        assert 1e-3 <= first.step_size <= 0.99

    def test_inactive_modes_stay_zero(self):
        mask = np.zeros((3, 3, 3), dtype=bool)
        mask[1, 1, 1] = True
        run = sample_gibbs(1, 20, burnin=10, thin=1, stream=SeededStream(seed=5, stream_id=7), active=mask)
        for state in run.states:
            assert np.count_nonzero(state.pos.coeffs[~mask]) == 0

    @pytest.mark.slow
    def test_zero_mode_marginal_matches_density(self):
        V = InteractionPotential(beta=0.5, amplitude=0.1)
        cfg = FlowConfig(N=1, potential=V)
        mask = np.zeros((3, 3, 3), dtype=bool)
        mask[1, 1, 1] = True
        run = sample_gibbs(1, 20_000, burnin=500, thin=5, cfg=cfg, stream=SeededStream(seed=6, stream_id=7),
                           active=mask)
        x = np.array([s.pos.coeffs[1, 1, 1].real for s in run.states])

        def density(t):
            return math.exp(-truncated_potential_energy(SpectralField.constant(1, t), 1, V)) * stats.norm.pdf(t)

        edges = np.linspace(-3.0, 3.0, 11)
        Z = integrate.quad(density, -8.0, 8.0)[0]
        expected = np.array([integrate.quad(density, a, b)[0] for a, b in zip(edges[:-1], edges[1:])]) / Z
        observed = np.histogram(x, bins=edges)[0] / len(x)
        np.testing.assert_allclose(observed, expected, atol=0.02)


class TestInvariance:
    def test_control_flow(self):
        cfg = FlowConfig(N=1)
        state = sample_gff(SeededStream(seed=7, stream_id=8), 1).state
        linear = control_flow(state, 0.3, cfg, coupling=0.0)
        expected = linear_flow(state, 0.3)
        assert linear.pos.allclose(expected.pos) and linear.vel.allclose(expected.vel)
        with pytest.raises(ParameterRangeError):
            control_flow(state, 0.3, cfg, coupling=-1.0)

    def test_only_the_true_flow_conserves_energy(self):
        cfg = FlowConfig(N=1, h=1e-3)
        state = sample_gff(SeededStream(seed=8, stream_id=8), 1).state
        true_drift = control_energy_drift(state, 0.2, cfg, 1.0)
        perturbed = control_energy_drift(state, 0.2, cfg, 0.0)
        assert true_drift < 1e-4
        assert perturbed > 10 * true_drift

    def test_observables(self):
        pos = SpectralField.from_modes(1, {(1, 0, 0): 2.0 + 1.0j, (0, 0, 0): 1.0})
        state = PhaseState(pos, SpectralField.zeros(1))
        cfg = FlowConfig(N=1)
        assert re_e1(state, cfg) == pytest.approx(2.0)
        assert abs2_e1(state, cfg) == pytest.approx(5.0)
        assert OBSERVABLES["low_mode_mass"](state, cfg) == pytest.approx(11.0)
        assert OBSERVABLES["kinetic"](state, cfg) == 0.0

    def test_shift_needs_finite_z(self):
        with pytest.raises(ValueError):
            ObservableShift(name="x", mean_before=0.0, mean_after=0.0, se=0.0, z=float("nan"))

    def test_argument_checks(self):
        with pytest.raises(ParameterRangeError):
            invariance_experiment(N=1, ensemble=10)
        with pytest.raises(ParameterRangeError):
            invariance_experiment(N=1, ensemble=10, min_ensemble=5, observables=["nope"])

    def test_small_experiment(self):
        report = invariance_experiment(N=1, T=0.1, ensemble=24, chain=QUICK_CHAIN, chains=3, seed=1,
                                       min_ensemble=10, workers=2)
        assert isinstance(report, InvarianceReport)
        assert report.ensemble == 24
        assert [s.name for s in report.shifts] == list(OBSERVABLES)
        records = report.to_records()
        assert records[0]["kind"] == "header"
        assert len(records) == 1 + len(OBSERVABLES)

    def test_experiment_is_reproducible(self):
        kwargs = dict(N=1, T=0.1, ensemble=12, chain=QUICK_CHAIN, chains=2, seed=4, min_ensemble=10)
        first = invariance_experiment(**kwargs, workers=1)
        second = invariance_experiment(**kwargs, workers=2)
        assert [s.z for s in first.shifts] == [s.z for s in second.shifts]

    def test_replication_check(self):
        summary = replication_check(replications=2, N=1, T=0.05, ensemble=12, chain=QUICK_CHAIN, chains=2,
                                    min_ensemble=10, observables=["re_e1"])
        assert summary["replications"] == 2
        assert 0.0 <= summary["fraction_above"] <= 1.0
        assert summary["passed"] == (summary["fraction_above"] <= 0.2)


class TestRunners:
    def test_gibbs_sample_runner(self, tmp_path):
        result = run_gibbs_sample("gibbs-test", 1, 0.5, 40, 0, tmp_path, chain=QUICK_CHAIN)
        names = {p.split("/")[-1] for p in result["artifacts"]}
        assert names == {"gibbs_energy.csv", "gibbs_energy_plot.csv", "gibbs_summary.json"}
        assert 0.0 <= result["acceptance_rate"] <= 1.0

    def test_invariance_runner_rejects_small_ensemble(self, tmp_path):
        with pytest.raises(ParameterRangeError):
            run_invariance("inv-test", 1, 0.1, 10, 0, tmp_path)

    @pytest.mark.slow
    def test_invariance_runner(self, tmp_path):
        result = run_invariance("inv-test", 1, 0.2, 500, 0, tmp_path, chain=ChainSettings(burnin=200, thin=2),
                                observables=["re_e1", "low_mode_mass"])
        assert result["report"].ensemble == 500
        assert result["artifacts"][0].endswith("invariance_report.ndjson")
