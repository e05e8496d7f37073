import json

import numpy as np
import pytest

from dpk.core import operator_norm, operators_close
from dpk.errors import ConfigError
from dpk.factor import unitarity_defect
from dpk.generate import (
    KINDS,
    ExperimentConfig,
    generate,
    splitmix64,
    trial_seed,
)
from dpk.suites import SUITES, run_suite


def test_splitmix_mix_is_stable():
    # Regression anchors computed once from the documented mix; any change
    # to the derivation breaks reproducibility of published reports.
    assert splitmix64(0x9E3779B97F4A7C15) == 16294208416658607535
    assert trial_seed(0, 0) == 16294208416658607535
    assert trial_seed(1, 0) != trial_seed(0, 0)
    assert trial_seed(0, 1) != trial_seed(0, 0)


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(trials=0)
    with pytest.raises(ConfigError):
        ExperimentConfig(head_size=7, period=3)
    with pytest.raises(ConfigError):
        ExperimentConfig(seed=-1)


def test_generate_deterministic():
    config = ExperimentConfig(seed=99, trials=5, head_size=6, period=3)
    a = generate(config, "operator", trial=3)
    b = generate(config, "operator", trial=3)
    np.testing.assert_array_equal(a.head, b.head)
    np.testing.assert_array_equal(a.tail, b.tail)
    c = generate(config, "operator", trial=4)
    assert not operators_close(a, c)


def test_generate_kinds_satisfy_invariants():
    config = ExperimentConfig(seed=5, trials=5, head_size=6, period=3)
    for trial in range(4):
        u = generate(config, "unitary", trial=trial)
        assert unitarity_defect(u) <= 1e-12

        proj = generate(config, "projection", trial=trial)
        assert operator_norm(proj.op @ proj.op - proj.op) <= 1e-10

        pos = generate(config, "positive", trial=trial)
        assert np.linalg.eigvalsh(pos.head)[0] > 0
        assert np.min(np.diagonal(pos.tail).real) > 0

        phi = generate(config, "functional", trial=trial)
        assert np.min(phi.weights) >= 0

        spec = generate(config, "permutation", trial=trial)
        assert sorted(spec.head_perm.tolist()) == list(range(6))

    with pytest.raises(ConfigError):
        generate(config, "nonsense")
    assert set(KINDS) == {
        "operator", "unitary", "projection", "positive", "functional", "permutation"
    }


def test_run_suite_unknown_name():
    with pytest.raises(ConfigError):
        run_suite(ExperimentConfig(suite="no-such-suite"))


def test_registry_covers_spec_suites():
    for name in ("delta-contractive", "index-additivity"):
        assert name in SUITES


def test_small_suite_passes_and_reports():
    config = ExperimentConfig(seed=7, trials=20, head_size=6, period=3,
                              suite="delta-contractive")
    report = run_suite(config)
    assert report.failures == 0
    assert report.passes == report.trials == 20
    obj = report.to_obj()
    assert "wall_time_s" in obj
    assert "wall_time_s" not in report.to_obj(no_meta=True)


def test_report_bytes_deterministic():
    config = ExperimentConfig(seed=11, trials=15, head_size=6, period=3,
                              suite="membership")
    first = run_suite(config).to_json(no_meta=True)
    second = run_suite(config).to_json(no_meta=True)
    assert first == second
    parsed = json.loads(first)
    assert parsed["failures"] == 0


def test_csv_output_shape():
    config = ExperimentConfig(seed=11, trials=5, head_size=6, period=3,
                              suite="norm-cstar")
    report = run_suite(config)
    lines = report.to_csv().strip().splitlines()
    assert len(lines) == 6
    assert lines[0].startswith("trial,ok,")
