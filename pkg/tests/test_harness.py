"""Verification harness: determinism, config validation, CLI behavior."""

import json

import numpy as np
import pytest

from lifted.cli import main
from lifted.demos import (DEMOS, demo_action_derivative, demo_measure_gradient,
                          demo_stokes_boundary)
from lifted.errors import UsageError
from lifted.harness import (CaseFamily, SuiteConfig, case_rng, derive_key,
                            family_ids, run_suite, suite_names, _run_families)


def test_derived_keys_are_stable_and_distinct():
    k1 = derive_key(7, "suite/fam/00")
    k2 = derive_key(7, "suite/fam/00")
    assert np.array_equal(k1, k2)
    assert k1.dtype == np.uint64 and k1.shape == (2,)
    assert not np.array_equal(k1, derive_key(7, "suite/fam/01"))
    assert not np.array_equal(k1, derive_key(8, "suite/fam/00"))
    # identical streams from identical keys
    a = case_rng(7, "suite/fam/00").normal(size=5)
    b = case_rng(7, "suite/fam/00").normal(size=5)
    assert np.array_equal(a, b)


def test_config_validation_matrix():
    with pytest.raises(UsageError):
        SuiteConfig(seed=True)
    with pytest.raises(UsageError):
        SuiteConfig(seed=-1)
    with pytest.raises(UsageError):
        SuiteConfig(seed=2 ** 64)
    with pytest.raises(UsageError):
        SuiteConfig(tolerances={"measure-core/flow-fd": -1e-9})
    with pytest.raises(UsageError):
        SuiteConfig(counts={"measure-core/flow-fd": 2.5})
    with pytest.raises(UsageError):
        SuiteConfig(counts={"measure-core/flow-fd": True})
    with pytest.raises(UsageError):
        SuiteConfig(params={"q": 2})
    with pytest.raises(UsageError):
        SuiteConfig(params={"m": 99})
    # zero tolerance is legal: it forces failures, it is not invalid usage
    cfg = SuiteConfig(tolerances={"measure-core/flow-fd": 0})
    assert cfg.tolerances["measure-core/flow-fd"] == 0.0


def test_config_file_roundtrip_and_errors(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"suite": "mapping-core", "seed": 99}))
    cfg = SuiteConfig.from_file(str(path))
    assert (cfg.suite, cfg.seed) == ("mapping-core", 99)
    # explicit overrides win; None overrides are ignored
    cfg2 = SuiteConfig.from_file(str(path), suite="measure-core", report=None)
    assert cfg2.suite == "measure-core"

    path.write_text(json.dumps({"suite": "mapping-core", "bogus": 1}))
    with pytest.raises(UsageError):
        SuiteConfig.from_file(str(path))
    path.write_text("not json {")
    with pytest.raises(UsageError):
        SuiteConfig.from_file(str(path))
    path.write_text(json.dumps([1, 2, 3]))
    with pytest.raises(UsageError):
        SuiteConfig.from_file(str(path))
    with pytest.raises(UsageError):
        SuiteConfig.from_file(str(tmp_path / "missing.json"))


def test_run_suite_rejects_unknown_names():
    with pytest.raises(UsageError):
        run_suite(SuiteConfig(suite="no-such-suite"))
    with pytest.raises(UsageError):
        run_suite(SuiteConfig(suite="mapping-core",
                              counts={"mapping-core/bogus": 1}))


def test_registry_exposes_six_suites():
    assert suite_names() == ["curve-core", "geometry-core", "mapping-core",
                             "measure-core", "smooth-core", "submanifold-core"]
    ids = family_ids()
    assert len(ids) == len(set(ids))
    assert all("/" in i for i in ids)


def test_suite_passes_and_reports_sorted_ids():
    result = run_suite(SuiteConfig(suite="mapping-core"))
    assert not result.failed
    ids = [c.id for c in result.cases]
    assert ids == sorted(ids)
    assert all(c.ms == 0 for c in result.cases)
    for c in result.cases:
        assert c.status == ("pass" if c.residual <= c.tolerance else "fail")
        assert c.seed == int(derive_key(result.seed, c.id)[0])


def test_report_schema_is_exact():
    result = run_suite(SuiteConfig(suite="mapping-core"))
    doc = result.to_dict()
    assert set(doc) == {"suite", "seed", "cases", "summary"}
    assert set(doc["summary"]) == {"pass", "fail", "skip"}
    for case in doc["cases"]:
        assert set(case) == {"id", "desc", "anchor", "status", "residual",
                             "tolerance", "ms"}
        assert isinstance(case["residual"], float)
        assert isinstance(case["ms"], int)
    assert doc["summary"]["pass"] == len(doc["cases"])


def test_count_and_tolerance_overrides():
    fam = "mapping-core/flow-fd"
    cfg = SuiteConfig(suite="mapping-core", counts={fam: 3})
    result = run_suite(cfg)
    assert sum(c.id.startswith(fam) for c in result.cases) == 3
    # forcing tolerance 0 fails every case with a nonzero residual
    cfg = SuiteConfig(suite="mapping-core", tolerances={fam: 0.0})
    result = run_suite(cfg)
    for c in result.cases:
        if c.id.startswith(fam):
            assert c.status == ("fail" if c.residual > 0 else "pass")
    assert result.failed


def test_seed_changes_residual_stream():
    fam = "measure-core/flow-fd"
    r1 = run_suite(SuiteConfig(suite="measure-core", seed=1,
                               counts={fam: 2}))
    r2 = run_suite(SuiteConfig(suite="measure-core", seed=2,
                               counts={fam: 2}))
    a = [c.residual for c in r1.cases if c.id.startswith(fam)]
    b = [c.residual for c in r2.cases if c.id.startswith(fam)]
    assert a != b


def test_reports_are_byte_identical_across_runs():
    cfg = SuiteConfig(suite="measure-core")
    blob1 = run_suite(cfg).to_json()
    blob2 = run_suite(SuiteConfig(suite="measure-core")).to_json()
    assert blob1 == blob2


def test_skip_status_for_none_residuals():
    fam = CaseFamily(name="maybe", desc="sometimes inapplicable", anchor="x",
                     tolerance=1e-9, count=4,
                     fn=lambda rng, params: None if rng.random() < 0.5 else 0.0)
    reports = _run_families("demo", [fam], SuiteConfig(suite="all"))
    assert len(reports) == 4
    assert {r.status for r in reports} <= {"pass", "skip"}
    assert any(r.status == "skip" for r in reports)
    for r in reports:
        if r.status == "skip":
            assert r.residual == 0.0


def test_timings_flag_populates_ms():
    cfg = SuiteConfig(suite="mapping-core", timings=True,
                      counts={"mapping-core/flow-fd": 1})
    result = run_suite(cfg)
    assert all(isinstance(c.ms, int) and c.ms >= 0 for c in result.cases)


# ---------------------------------------------------------------------------
# command-line interface (in-process)
# ---------------------------------------------------------------------------

def test_cli_verify_writes_report_and_exits_zero(tmp_path, capsys):
    report = tmp_path / "report.json"
    code = main(["verify", "--suite", "mapping-core",
                 "--report", str(report)])
    assert code == 0
    out = capsys.readouterr().out
    assert "suite mapping-core" in out
    doc = json.loads(report.read_text())
    assert doc["suite"] == "mapping-core"
    assert doc["summary"]["fail"] == 0


def test_cli_env_seed_and_flag_precedence(tmp_path, monkeypatch, capsys):
    report = tmp_path / "report.json"
    monkeypatch.setenv("LIFTED_SEED", "123")
    assert main(["verify", "--suite", "mapping-core",
                 "--report", str(report)]) == 0
    assert json.loads(report.read_text())["seed"] == 123
    # an explicit flag wins over the environment
    assert main(["verify", "--suite", "mapping-core", "--seed", "77",
                 "--report", str(report)]) == 0
    assert json.loads(report.read_text())["seed"] == 77
    monkeypatch.setenv("LIFTED_SEED", "not-a-number")
    assert main(["verify", "--suite", "mapping-core"]) == 2
    assert "error:" in capsys.readouterr().err


def test_cli_config_file_with_forced_failure(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "suite": "mapping-core",
        "tolerances": {"mapping-core/flow-fd": 0.0},
    }))
    code = main(["verify", "--config", str(cfg)])
    assert code == 1
    out = capsys.readouterr().out
    assert "FAIL" in out


def test_cli_usage_errors_exit_two(capsys):
    assert main(["verify", "--suite", "no-such-suite"]) == 2
    assert "error:" in capsys.readouterr().err
    assert main(["demo", "stokes-boundary", "--refine", "0"]) == 2
    assert main(["demo", "stokes-boundary", "--count", "3"]) == 2
    assert main(["demo", "measure-gradient", "--refine", "2"]) == 2
    assert main(["demo", "measure-gradient", "--count", "0"]) == 2
    assert main(["demo", "measure-gradient", "--dim", "7"]) == 2


def test_cli_demo_runs_and_dumps(tmp_path, capsys):
    dump = tmp_path / "rows.json"
    code = main(["demo", "stokes-boundary", "--refine", "2",
                 "--dump", str(dump)])
    assert code == 0
    rows = json.loads(dump.read_text())
    assert isinstance(rows, list) and len(rows) == 2
    capsys.readouterr()


def test_demo_registry_and_shapes():
    assert sorted(DEMOS) == ["action-derivative", "dirichlet-markov",
                             "mapping-derivative", "measure-gradient",
                             "stokes-boundary"]
    rows = demo_stokes_boundary(refine=3)
    assert len(rows) == 3
    rows = demo_measure_gradient(count=2)
    assert len(rows) == 2
    for row in rows:
        assert isinstance(row, dict)
    rows = demo_action_derivative(count=2)
    assert len(rows) == 3        # reference circle row + sampled rows
