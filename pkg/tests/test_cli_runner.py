"""
Tests for configuration resolution and the command-line front end.
"""

import json

import pytest

from src.cli_runner.config import COMMAND_DEFAULTS, COMMANDS, load_config_file, resolve_config, split_ladder
from src.cli_runner.main import DISPATCH, EXIT_OK, EXIT_USAGE, run
from src.core_tools.errors import UsageError
from src.core_tools.settings import LabSettings, get_settings


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestConfig:
    def test_command_defaults(self):
        cfg = resolve_config("simulate", {}, settings=LabSettings())
        assert (cfg.N, cfg.h, cfg.T) == (8, 1e-3, 1.0)
        assert cfg.run_id == f"simulate-s{cfg.seed}"
        assert set(COMMAND_DEFAULTS) == set(COMMANDS) == set(DISPATCH)

    def test_precedence(self, tmp_path, fresh_settings):
        fresh_settings.setenv("HARTREE_LAB_SEED", "7")
        settings = get_settings()
        assert resolve_config("dump-renorm", {}, settings=settings).seed == 7
        config = _write(tmp_path / "run.toml", "seed = 9\nbeta = 0.7\nN = 2\n")
        cfg = resolve_config("dump-renorm", {}, config, settings)
        assert (cfg.seed, cfg.beta, cfg.N) == (9, 0.7, 2)
        cfg = resolve_config("dump-renorm", {"seed": 11, "N": 4}, config, settings)
        assert (cfg.seed, cfg.beta, cfg.N) == (11, 0.7, 4)

    def test_ladder_keys(self, tmp_path):
        assert split_ladder({"ladder_eta": 0.011, "N": 2}) == {"N": 2, "ladder": {"eta": 0.011}}
        config = _write(tmp_path / "run.toml", "ladder_eta = 0.011\nladder_kappa = 0.03\n")
        cfg = resolve_config("verify-tensors", {"ladder": {"eta": 0.012}}, config, LabSettings())
        assert cfg.ladder == {"eta": 0.012, "kappa": 0.03}
        assert cfg.parameter_ladder().eta == 0.012

    def test_bad_ladder(self):
        with pytest.raises(UsageError):
            resolve_config("verify-tensors", {"ladder": {"eta": 0.5}}, settings=LabSettings())

    @pytest.mark.parametrize("text", ["N = ", "[section]\nN = 2\n"])
    def test_bad_files(self, tmp_path, text):
        with pytest.raises(UsageError):
            load_config_file(_write(tmp_path / "bad.toml", text))

    def test_missing_file(self, tmp_path):
        with pytest.raises(UsageError):
            load_config_file(tmp_path / "missing.toml")

    def test_file_for_another_command(self, tmp_path):
        config = _write(tmp_path / "run.toml", 'command = "simulate"\n')
        with pytest.raises(UsageError):
            resolve_config("dump-renorm", {}, config, LabSettings())

    @pytest.mark.parametrize("flags", [{"N": 3}, {"beta": 3.0}, {"unknown": 1}, {"which": ["third"]}])
    def test_invalid_values(self, flags):
        with pytest.raises(UsageError):
            resolve_config("dump-renorm", flags, settings=LabSettings())

    def test_out_dir(self, tmp_path):
        settings = LabSettings(output_dir=tmp_path)
        cfg = resolve_config("dump-renorm", {"seed": 5}, settings=settings)
        assert cfg.out_dir(settings) == tmp_path / "dump-renorm-s5"
        assert resolve_config("dump-renorm", {"out": tmp_path / "x"}, settings=settings).out_dir(settings) == tmp_path / "x"


class TestCli:
    @pytest.mark.parametrize("argv", [[], ["simulate", "--bogus"], ["dump-renorm", "--N", "3"],
                                      ["verify-tensors", "--scales", "4x4", "--ps"]])
    def test_usage_errors(self, argv, tmp_path):
        assert run(argv + (["--out", str(tmp_path)] if argv else [])) == EXIT_USAGE

    def test_help(self):
        assert run(["--help"]) == EXIT_OK

    def test_budget_rejection(self, tmp_path):
        argv = ["verify-counting", "--lemma", "basic", "--scales", "8x1", "--budget", "10", "--out", str(tmp_path)]
        assert run(argv) == EXIT_USAGE

    def test_dump_renorm(self, tmp_path):
        assert run(["dump-renorm", "--N", "1", "--beta", "1", "--out", str(tmp_path)]) == EXIT_OK
        lines = (tmp_path / "renorm_N1.csv").read_text().splitlines()
        assert "# a_N=4.0" in lines
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["command"] == "dump-renorm"
        assert set(manifest["artifacts"]) >= {"renorm_N1.csv"}
        assert manifest["config"]["N"] == 1

    def test_environment_sets_output_and_seed(self, tmp_path, fresh_settings):
        fresh_settings.setenv("HARTREE_LAB_OUTPUT_DIR", str(tmp_path))
        fresh_settings.setenv("HARTREE_LAB_SEED", "3")
        fresh_settings.setenv("HARTREE_LAB_USE_COLORS", "false")
        assert run(["dump-renorm", "--N", "1"]) == EXIT_OK
        assert (tmp_path / "dump-renorm-s3" / "renorm_N1.csv").exists()

    def test_config_file_flag(self, tmp_path):
        config = _write(tmp_path / "run.toml", "N = 2\nbeta = 0.25\n")
        out = tmp_path / "out"
        assert run(["dump-renorm", "--config", str(config), "--out", str(out)]) == EXIT_OK
        assert (out / "renorm_N2.csv").exists()
        bad = _write(tmp_path / "bad.toml", 'command = "norms"\n')
        assert run(["dump-renorm", "--config", str(bad), "--out", str(out)]) == EXIT_USAGE

    def test_runs_are_deterministic(self, tmp_path):
        argv = ["simulate", "--N", "2", "--T", "0.05", "--h", "0.01", "--seed", "4"]
        assert run(argv + ["--out", str(tmp_path / "a")]) in (0, 1)
        assert run(argv + ["--out", str(tmp_path / "b")]) in (0, 1)
        first = sorted(p.name for p in (tmp_path / "a").iterdir() if p.suffix != ".json")
        assert first
        for name in first:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
