import json
import subprocess
import sys

import pytest

from pfcs.cli import main
from pfcs.config import RunConfig
from pfcs.workloads import read_trace


def run_cli(*args):
    return main([str(a) for a in args])


def test_generate_join_counts(tmp_path, capsys):
    out = tmp_path / "t.jsonl"
    assert run_cli("generate", "--kind", "join", "--elements", 1000, "--events", 100000, "--seed", 42, "--out", out) == 0
    events = list(read_trace(out))
    n_relate = sum(e.kind == "relate" for e in events)
    assert n_relate == 1000 // 3
    assert len(events) - n_relate == 100000
    assert capsys.readouterr().out.strip() == str(len(events))


def test_generate_twice_same_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for p in (a, b):
        run_cli("generate", "--kind", "zipf", "--events", 2000, "--seed", 7, "--out", p)
    assert a.read_bytes() == b.read_bytes()


def test_generate_theta_zero_is_invalid(tmp_path, capsys):
    assert run_cli("generate", "--kind", "zipf", "--theta", 0, "--out", tmp_path / "x") == 2
    assert "zipf_theta" in capsys.readouterr().err


def test_usage_errors():
    assert run_cli("frobnicate") == 2
    assert run_cli("run", "--policies", "lru,bogus") == 2
    assert run_cli("run", "--seed", -1) == 2


def test_bad_config_file(tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{"policies": ["lru"], "colour": "blue"}')
    assert run_cli("run", "--config", p) == 2
    p.write_text("{not json")
    assert run_cli("run", "--config", p) == 2
    assert run_cli("run", "--config", tmp_path / "missing.json") == 2


def test_bad_trace_line(tmp_path, capsys):
    t = tmp_path / "t.jsonl"
    t.write_text('{"op":"access","key":1}\n{"op":"access"}\n')
    assert run_cli("run", "--trace", t, "--policies", "lru") == 2
    assert "line 2" in capsys.readouterr().err


def report(tmp_path, *args):
    out = tmp_path / "r.json"
    assert run_cli("run", "--out", out, *args) == 0
    return json.loads(out.read_text())


def test_no_relations_pfcs_equals_lru(tmp_path):
    t = tmp_path / "z.jsonl"
    run_cli("generate", "--kind", "zipf", "--elements", 8000, "--events", 20000, "--seed", 1, "--out", t)
    r = report(tmp_path, "--trace", t, "--policies", "pfcs,lru")
    res = r["results"]
    assert res["pfcs"]["mean_hit_rate"] == res["lru"]["mean_hit_rate"]
    assert res["pfcs"]["runs"][0]["hits"] == res["lru"]["runs"][0]["hits"]


def test_join_with_room_for_everything(tmp_path):
    t = tmp_path / "j.jsonl"
    run_cli("generate", "--kind", "join", "--elements", 3000, "--events", 10000, "--seed", 2, "--out", t)
    res = report(tmp_path, "--trace", t, "--policies", "pfcs,lru")["results"]
    assert res["pfcs"]["mean_hit_rate"] > res["lru"]["mean_hit_rate"]


def test_report_shape_and_hit_rate(tmp_path):
    r = report(tmp_path, "--kind", "zipf", "--elements", 500, "--events", 3000, "--repetitions", 2, "--policies", "lru,arc,lirs,pfcs,semantic")
    assert r["tool"] == "pfcs" and r["seed"] == 0 and "version" in r
    for name in ("lru", "arc", "lirs", "pfcs"):
        runs = r["results"][name]["runs"]
        assert len(runs) == 2
        for s in runs:
            assert s["hit_rate"] == s["hits"] / s["accesses"]
            assert s["hits"] + s["misses"] == s["accesses"] == 3000
        assert r["results"][name]["mean_hit_rate"] == (runs[0]["hit_rate"] + runs[1]["hit_rate"]) / 2
    assert r["results"]["semantic"]["available"] is False
    # repetitions differ by seed, so the two zipf traces differ
    assert r["results"]["lru"]["runs"][0] != r["results"]["lru"]["runs"][1]


def test_config_echo_round_trips(tmp_path):
    r = report(tmp_path, "--kind", "join", "--elements", 300, "--events", 900, "--seed", 5, "--policies", "lru,pfcs")
    echo = r["config"]
    cfg = RunConfig.from_dict(echo)
    again = cfg.to_dict()
    del again["out"]
    assert again == echo
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(echo))
    out2 = tmp_path / "r2.json"
    assert run_cli("run", "--config", cfg_path, "--out", out2) == 0
    assert json.loads(out2.read_text()) == r


def test_flags_override_config(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"policies": ["arc"], "seed": 3, "workload": {"generator": "sequential", "n_elements": 10, "n_events": 50}}))
    r = report(tmp_path, "--config", cfg_path, "--policies", "lru", "--events", 20)
    assert list(r["results"]) == ["lru"] and r["seed"] == 3
    assert r["config"]["workload"]["n_events"] == 20 and r["config"]["workload"]["generator"] == "sequential"


def test_same_config_same_bytes(tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / "r.json"
        run_cli("run", "--kind", "join", "--elements", 600, "--events", 3000, "--out", out)
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_stdout_report(capsys):
    assert run_cli("run", "--kind", "sequential", "--elements", 5, "--events", 20, "--policies", "lru") == 0
    assert json.loads(capsys.readouterr().out)["results"]["lru"]["runs"][0]["hits"] == 15


def test_module_entry_point(tmp_path):
    out = tmp_path / "t.jsonl"
    proc = subprocess.run(
        [sys.executable, "-m", "pfcs", "generate", "--kind", "sequential", "--events", "5", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "5"


@pytest.mark.slow
def test_verify_passes(capsys):
    assert run_cli("verify") == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "golden 143" in out and "golden 3027" in out
