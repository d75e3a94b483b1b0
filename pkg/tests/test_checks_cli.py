import json

import pytest

from steinlab import checks
from steinlab.checks import (
    RunConfig,
    cmd_charney,
    cmd_morse,
    cmd_report,
    cmd_solomon_tits,
    cmd_surjectivity,
    cmd_theorem31,
    run_checks,
    strip_timing,
)
from steinlab.cli import main


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(q=4, n=3)
    with pytest.raises(ValueError):
        RunConfig(q=2, n=1)
    with pytest.raises(ValueError):
        RunConfig(q=2, n=3, basis_v=[[1, 0, 0], [0, 1, 0], [0, 0, 1]])


def test_solomon_tits_report_2_3():
    (rep,) = cmd_solomon_tits(RunConfig(q=2, n=3))
    assert rep.passed and rep.details["top_betti"] == 8
    assert rep.details["cohen_macaulay"] is True
    assert set(rep.timing) == {"wall_seconds", "cache_hits"}


def test_charney_reports_2_3():
    reps = cmd_charney(RunConfig(q=2, n=3))
    assert [r.params["poset"] for r in reps] == ["S", "S(<=,>=L)", "S(<=H,>=)"]
    assert all(r.passed for r in reps)
    assert reps[0].details["top_betti"] == 113
    # restrictions to a line or a hyperplane are 1-spherical for n = 3
    assert all(r.details["top_betti"] > 0 for r in reps)


def test_theorem31_all_subspaces_2_3():
    reps = cmd_theorem31(RunConfig(q=2, n=3, all_subspaces=True))
    assert len(reps) == 14 and all(r.passed for r in reps)
    assert {r.params["k"]: r.details["betti"] for r in reps} == {1: 9, 2: 3}


def test_surjectivity_report_2_3():
    (rep,) = cmd_surjectivity(RunConfig(q=2, n=3, all_subspaces=True))
    assert rep.passed and rep.details["monotone"]
    assert rep.details["cokernel"] == []
    assert all(fb["height"] == 3 - fb["k"] - 1 for fb in rep.details["fibers"])
    assert len(rep.details["fibers"]) == 14


def test_morse_report_sweep():
    reps = cmd_morse(RunConfig(q=2, n=3, rank_v=2, sweep_lh=True))
    assert len(reps) == 12 and all(r.passed for r in reps)
    assert all(r.details["uncovered_without_layer_minus_one"] > 0 for r in reps)


def test_partial_report_under_time_cap():
    (rep,) = cmd_surjectivity(RunConfig(q=2, n=4, max_seconds=1e-9))
    assert not rep.passed and rep.witness["partial"] is True


def test_report_merge_and_table():
    cfg = RunConfig(q=2, n=2)
    reports = run_checks(cfg, checks.CHECKS)
    doc = cmd_report(reports, cfg.to_dict())
    assert doc["format"] == checks.FORMAT_VERSION and doc["all_passed"]
    table = checks.summary_table(doc)
    assert "solomon-tits" in table and "FAIL" not in table


def test_cache_reproducibility(tmp_path):
    cfg = RunConfig(q=2, n=3, cache_dir=str(tmp_path))
    first = cmd_report(run_checks(cfg, checks.CHECKS), cfg.to_dict())
    second = cmd_report(run_checks(cfg, checks.CHECKS), cfg.to_dict())
    assert strip_timing(first) == strip_timing(second)
    assert sum(r["timing"]["cache_hits"] for r in second["reports"]) > 0
    assert list((tmp_path / "v1").glob("*.hom"))


def test_cache_dir_is_versioned(tmp_path):
    cfg = RunConfig(q=2, n=2, cache_dir=str(tmp_path))
    run_checks(cfg, ["solomon-tits"])
    assert (tmp_path / f"v{checks.CACHE_VERSION}").is_dir()


def test_cli_single_verb(tmp_path, capsys):
    out = tmp_path / "st.json"
    code = main(["solomon-tits", "--q", "3", "--n", "2", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["reports"][0]["details"]["top_betti"] == 3
    assert "solomon-tits" in capsys.readouterr().err


def test_cli_basis_and_stdout(capsys):
    code = main(["theorem31", "--q", "2", "--n", "3", "--basis-v", "100,010"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    (rep,) = doc["reports"]
    assert rep["params"]["V"] == [[1, 0, 0], [0, 1, 0]] and rep["params"]["k"] == 2


def test_cli_report_inputs(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["charney", "--q", "2", "--n", "2", "--out", str(a)]) == 0
    assert main(["morse", "--q", "2", "--n", "3", "--out", str(b)]) == 0
    merged = tmp_path / "m.json"
    assert main(["report", "--q", "2", "--n", "2", "--inputs", str(a), str(b),
                 "--out", str(merged)]) == 0
    doc = json.loads(merged.read_text())
    assert {r["check"] for r in doc["reports"]} == {"charney", "morse"}
    assert len(doc["reports"]) == 4


def test_cli_failing_run_exits_nonzero(tmp_path):
    assert main(["surjectivity", "--q", "2", "--n", "4", "--max-seconds", "1e-9",
                 "--out", str(tmp_path / "x.json")]) == 1


def test_cli_rejects_bad_arguments():
    with pytest.raises(SystemExit):
        main(["bogus", "--q", "2", "--n", "2"])
    with pytest.raises(ValueError):
        main(["charney", "--q", "6", "--n", "2"])


def test_workers_give_same_document():
    cfg1 = RunConfig(q=2, n=2)
    cfg2 = RunConfig(q=2, n=2, workers=2)
    d1 = cmd_report(run_checks(cfg1, checks.CHECKS))
    d2 = cmd_report(run_checks(cfg2, checks.CHECKS))
    assert strip_timing(d1) == strip_timing(d2)
