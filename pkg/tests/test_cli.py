from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from lindecomp import attacks, cli
from lindecomp.cli import ExperimentConfig, closure_benchmark, list_protocols, loglog_slope, main, run_experiment
from lindecomp.protocols import TAGS


def test_stickel_batch_succeeds():
    report = run_experiment(ExperimentConfig("stickel", trials=50, seed=1))
    assert report.success_rate == 1.0
    assert report.successes == 50 == len(report.records)


def test_romanczuk_batch_records_both_keys():
    report = run_experiment(ExperimentConfig("romanczuk", trials=20))
    for r in report.records:
        assert r.cross_success is True
        assert r.key == r.cross_key


def test_reports_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(["run", "--protocol", "hkks", "--trials", "1", "--seed", "5", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["success_rate"] == 1.0 and doc["trials"] == 1
    assert "wall_time" not in doc["records"][0]


def test_timing_is_opt_in(tmp_path):
    out = tmp_path / "r.json"
    main(["run", "--protocol", "wang_cao", "--trials", "2", "--timing", "--out", str(out)])
    assert all(r["wall_time"] >= 0 for r in json.loads(out.read_text())["records"])


def test_success_rate_semantics():
    report = run_experiment(ExperimentConfig("hurley", trials=3, seed=2))
    assert report.success_rate == report.successes / len(report.records)


def test_list_protocols():
    text = list_protocols()
    assert "hkks" in text
    positions = [text.index(tag + " ") for tag in TAGS]
    assert positions == sorted(positions)
    assert text == list_protocols()


def test_list_subcommand(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for tag in TAGS:
        assert tag in out


def test_params_and_flags(tmp_path, capsys):
    out = tmp_path / "r.json"
    rc = main(
        ["run", "--protocol", "stickel", "--trials", "2", "--param", "n=2", "--param", "p=5", "--emit-private", "--trace", "--out", str(out)]
    )
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["config"]["params"] == {"n": "2", "p": "5"}
    assert all("private" in t for t in doc["transcripts"])
    assert doc["transcripts"][0]["key_space"]["rows"] == 2
    err = capsys.readouterr().err
    assert "trial=0" in err and "word=" in err


def test_public_transcripts_omit_private(tmp_path):
    out = tmp_path / "r.json"
    main(["run", "--protocol", "ko_lee", "--trials", "1", "--transcripts", "--out", str(out)])
    doc = json.loads(out.read_text())
    assert "private" not in doc["transcripts"][0]


def test_config_errors():
    with pytest.raises(ValueError):
        ExperimentConfig("stickel", trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig("nope")
    with pytest.raises(ValueError):
        ExperimentConfig("stickel", large=True)
    with pytest.raises(ValueError):
        ExperimentConfig("stickel", params={"bogus": "1"})
    assert main(["run", "--protocol", "stickel", "--param", "bogus=1"]) == 2
    assert main(["run", "--protocol", "stickel", "--param", "novalue"]) == 2


def test_trial_errors_are_recorded(monkeypatch):
    real = attacks.ATTACKS["wang_cao"]
    calls = []

    def flaky(pub):
        calls.append(1)
        if len(calls) == 1:
            raise RuntimeError("boom")
        return real(pub)

    monkeypatch.setitem(cli.ATTACKS, "wang_cao", flaky)
    report = run_experiment(ExperimentConfig("wang_cao", trials=3))
    assert [r.success for r in report.records] == [False, True, True]
    assert "boom" in report.records[0].error
    assert not report.all_succeeded


def test_wrong_key_is_a_failure(monkeypatch):
    real = attacks.ATTACKS["stickel"]

    def off_by_one(pub):
        rec = real(pub)
        rec.key = (rec.key + 1) % pub.space.p
        return rec

    monkeypatch.setitem(cli.ATTACKS, "stickel", off_by_one)
    assert main(["run", "--protocol", "stickel", "--trials", "2"]) == 1


def test_bench(capsys):
    assert main(["bench", "--dims", "10", "20", "40"]) == 0
    out = capsys.readouterr().out
    assert "log-log slope" in out
    rows = closure_benchmark([10, 20], n_actions=2)
    assert [r["rank"] for r in rows] == [10, 20]
    assert loglog_slope(rows) > 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lindecomp", "list"], capture_output=True, text=True, check=True)
    assert "stickel" in proc.stdout


def test_large_flag_sets_platform():
    cfg = ExperimentConfig("hkks", large=True)
    assert cfg.params["large"] is True
    assert np.isclose(run_experiment(ExperimentConfig("hkks", trials=1, seed=0)).success_rate, 1.0)
