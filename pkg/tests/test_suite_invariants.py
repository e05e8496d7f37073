"""Sweep counts pinned by the module invariant lists, run at a light scale."""

from dpk.generate import ExperimentConfig
from dpk.suites import run_suite


def _clean(suite, trials, head=12, period=3):
    config = ExperimentConfig(seed=31415, trials=trials, head_size=head,
                              period=period, suite=suite)
    report = run_suite(config)
    failed = [c["notes"][:2] for c in report.cases if not c["ok"]]
    assert report.failures == 0, f"{suite}: {failed[:4]}"


def test_closure_thousand_trials():
    _clean("closure", 1000)


def test_delta_contractive_five_hundred_trials():
    _clean("delta-contractive", 500)


def test_norm_cstar_invariants():
    _clean("norm-cstar", 300)


def test_quotient_invariants():
    _clean("quotient", 120)


def test_automorphism_invariants():
    _clean("automorphism", 60)
