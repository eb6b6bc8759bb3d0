"""Coefficient-level failure simulations."""

import pytest

from regencode.galois import GF
from regencode.mdscore import CodeSpec
from regencode.sim import SimConfig, codec_for_spec, run_sim
from regencode.trace import CSV_HEADER


def _mbr_spec():
    return CodeSpec(5, 3, 4, 4, 1, GF(1), "exact-mbr")


def test_runs_are_reproducible():
    cfg = SimConfig(_mbr_spec(), trials=3, repairs=5, seed=7)
    a = run_sim(cfg)
    b = run_sim(cfg)
    assert a.traces == b.traces
    assert a.per_trial_pass == b.per_trial_pass
    c = run_sim(SimConfig(_mbr_spec(), trials=3, repairs=5, seed=8))
    assert c.traces != a.traces


def test_mbr_mean_traffic_is_gamma():
    report = run_sim(SimConfig(_mbr_spec(), trials=2, repairs=10, seed=1))
    assert report.mean_symbols == 4.0
    assert report.audit_pass_rate == 1.0
    assert report.naive_symbols == 9


def test_cauchy_baseline_pays_full_file():
    spec = CodeSpec(5, 3, 3, 3, 3, GF(8), "cauchy-mds")
    report = run_sim(SimConfig(spec, trials=2, repairs=6, seed=2))
    assert report.mean_symbols == 9.0
    assert report.naive_symbols == 9


def test_rlnc_audit_rate_is_high():
    spec = CodeSpec(5, 3, 4, 2, 1, GF(8), "rlnc-functional")
    report = run_sim(SimConfig(spec, trials=10, repairs=10, seed=3))
    assert len(report.traces) == 100
    assert report.audit_pass_rate >= 0.99
    assert report.mean_symbols == 4.0


def test_round_robin_failure_order():
    spec = _mbr_spec()
    report = run_sim(
        SimConfig(spec, "round-robin", trials=1, repairs=7, seed=4)
    )
    assert [t.failed for t in report.traces] == [0, 1, 2, 3, 4, 0, 1]


def test_csv_output(tmp_path):
    out = tmp_path / "log.csv"
    cfg = SimConfig(_mbr_spec(), trials=1, repairs=4, seed=5, out=str(out))
    report = run_sim(cfg)
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 5
    assert lines[1] == report.traces[0].csv_line()


def test_summary_mentions_the_tradeoff():
    report = run_sim(SimConfig(_mbr_spec(), trials=1, repairs=2, seed=6))
    text = "\n".join(report.summary_lines())
    assert "family=exact-mbr" in text
    assert "analytic gamma=4" in text
    assert "naive full decode=9" in text


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(_mbr_spec(), failure_model="adversarial")
    with pytest.raises(ValueError):
        SimConfig(_mbr_spec(), trials=0)
    with pytest.raises(ValueError):
        SimConfig(_mbr_spec(), repairs=-1)


def test_spec_shape_must_match_family():
    # an impossible shape for the pairwise family: d != n-1
    bad = CodeSpec(6, 3, 4, 5, 1, GF(8), "exact-mbr")
    with pytest.raises(ValueError):
        codec_for_spec(bad)


def test_zero_repairs_is_a_clean_pass():
    report = run_sim(SimConfig(_mbr_spec(), trials=2, repairs=0, seed=0))
    assert report.traces == []
    assert report.audit_pass_rate == 1.0
    assert report.per_trial_pass == [1.0, 1.0]
