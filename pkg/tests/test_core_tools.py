import json
import math

import numpy as np
import pandas as pd
import pytest

from src.core_tools.artifact_store import ArtifactStore, sha256_file
from src.core_tools.errors import (
    BudgetExceededError,
    InsufficientDataError,
    LabError,
    ParameterRangeError,
    UsageError,
)
from src.core_tools.logger import LabLogger, configure_logging
from src.core_tools.settings import get_settings
from src.core_tools.stats import (
    compensated_sum,
    effective_sample_size,
    integrated_autocorr_time,
    loglog_slope,
    mean_and_se,
    paired_z,
    z_score,
)
from src.core_tools.workers import map_ordered


def test_error_hierarchy():
    assert issubclass(ParameterRangeError, LabError)
    assert issubclass(ParameterRangeError, ValueError)
    assert issubclass(UsageError, ValueError)
    err = BudgetExceededError(12, 10, "septic sum")
    assert err.requested == 12 and err.budget == 10
    assert "septic sum" in str(err)
    assert not isinstance(err, ValueError)


def test_compensated_sum_beats_naive_cancellation():
    values = [1e16, 1.0, -1e16]
    assert compensated_sum(values) == 1.0
    assert compensated_sum(np.array([1 + 1j, 2 - 3j])) == 3 - 2j


def test_mean_and_se():
    mean, se = mean_and_se([1.0, 2.0, 3.0, 4.0])
    assert mean == 2.5
    assert se == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2.0)
    with pytest.raises(InsufficientDataError):
        mean_and_se([1.0])


def test_z_score_zero_error():
    assert z_score(1.0, 1.0, 0.0) == 0.0
    assert z_score(2.0, 1.0, 0.0) == math.inf
    assert z_score(2.0, 1.0, 0.5) == 2.0


def test_paired_z_identical_series():
    shift, z = paired_z([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert shift == 0.0 and z == 0.0


def test_loglog_slope_recovers_power():
    xs = [2.0, 4.0, 8.0, 16.0]
    fit = loglog_slope(xs, [x ** -1.5 for x in xs])
    assert fit.slope == pytest.approx(-1.5)
    assert fit.points == 4
    with pytest.raises(InsufficientDataError):
        loglog_slope([2.0, 2.0], [1.0, 3.0])


def test_autocorr_time_of_white_noise_is_near_one():
    x = np.random.default_rng(3).standard_normal(4000)
    tau = integrated_autocorr_time(x)
    assert 0.8 <= tau <= 1.3
    assert effective_sample_size(x) == pytest.approx(x.size / tau)
    with pytest.raises(InsufficientDataError):
        integrated_autocorr_time([1.0, 2.0, 3.0])


def test_autocorr_time_grows_for_ar1():
    rng = np.random.default_rng(4)
    x = np.zeros(20000)
    for i in range(1, x.size):
        x[i] = 0.9 * x[i - 1] + rng.standard_normal()
    # exact value (1 + 0.9) / (1 - 0.9) = 19
    assert 12.0 <= integrated_autocorr_time(x) <= 27.0


@pytest.mark.parametrize("workers", [1, 4])
def test_map_ordered_keeps_order(workers):
    assert map_ordered(lambda x: x * x, range(10), workers) == [x * x for x in range(10)]


def test_artifact_store_writes_header_and_manifest(tmp_path):
    store = ArtifactStore(tmp_path / "run", "unit-s1")
    csv = store.write_csv("table.csv", pd.DataFrame({"a": [1, 2]}), header={"N": 1, "beta": 1.0})
    lines = csv.read_text().splitlines()
    assert lines[:3] == ["# N=1", "# beta=1.0", "a"]
    nd = store.write_ndjson("rows.ndjson", [{"z": 1j, "x": np.float64(2.0)}])
    assert json.loads(nd.read_text()) == {"x": 2.0, "z": [0.0, 1.0]}
    manifest = json.loads(store.write_manifest("unit", {"N": 1}, 1, 0.25).read_text())
    assert manifest["artifacts"]["table.csv"] == sha256_file(csv)
    assert manifest["seed"] == 1


def test_logger_respects_threshold(log_buffer):
    logger = LabLogger("Unit", use_emojis=False, stream=log_buffer)
    configure_logging("INFO", use_colors=False)
    logger.set_run_id("unit-s1")
    logger.debug("hidden")
    logger.info("shown", data={"h": 0.01})
    out = log_buffer.getvalue()
    assert "hidden" not in out
    assert "[Unit] [unit-s1] shown (h=0.01)" in out


def test_settings_from_environment(fresh_settings, tmp_path):
    fresh_settings.setenv("HARTREE_LAB_OUTPUT_DIR", str(tmp_path))
    fresh_settings.setenv("HARTREE_LAB_LOG_LEVEL", "debug")
    fresh_settings.setenv("HARTREE_LAB_WORKERS", "3")
    settings = get_settings()
    assert settings.output_dir == tmp_path
    assert settings.log_level == "DEBUG"
    assert settings.workers == 3


def test_settings_reject_unknown_level(fresh_settings):
    fresh_settings.setenv("HARTREE_LAB_LOG_LEVEL", "loud")
    with pytest.raises(ValueError):
        get_settings()
