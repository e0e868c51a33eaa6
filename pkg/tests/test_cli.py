from __future__ import annotations

import csv
import json
from fractions import Fraction

import pytest

from stretchsched import io
from stretchsched.checks import BatchConfig, evaluate_instance, verify
from stretchsched.cli import build_policy, main
from stretchsched.model import Instance, ScheduleError
from stretchsched.single import spt_schedule


@pytest.fixture
def pair_file(tmp_path):
    path = tmp_path / "pair.json"
    path.write_text(json.dumps({"machines": 1, "jobs": [
        {"id": 1, "release": 0, "processing": 3},
        {"id": 2, "release": "1", "processing": "1/1"},
    ]}))
    return path


@pytest.mark.parametrize("policy, total", [("spt", "4/1"), ("srpt", "7/3"), ("opt", "8/3"), ("pos", "4/1")])
def test_run_prints_exact_total(pair_file, tmp_path, capsys, policy, total):
    out = tmp_path / "s.json"
    assert main(["run", str(pair_file), "--policy", policy, "--out", str(out)]) == 0
    assert total in capsys.readouterr().out
    data = json.loads(out.read_text())
    assert data["policy"] == policy and data["report"]["total"] == total


def test_run_writes_dumps(pair_file, tmp_path):
    paths = {k: tmp_path / f"{k}.out" for k in ("gantt", "forest", "blocks")}
    code = main([
        "run", str(pair_file), "--policy", "srpt",
        "--gantt", str(paths["gantt"]), "--dump-forest", str(paths["forest"]), "--dump-blocks", str(paths["blocks"]),
    ])
    assert code == 0
    rows = list(csv.DictReader(paths["gantt"].open()))
    assert [r["end_exact"] for r in rows] == ["1/1", "2/1", "4/1"]
    assert rows[0]["start"] == "0"
    assert json.loads(paths["forest"].read_text())["roots"] == [1]
    block = json.loads(paths["blocks"].read_text())["blocks"][0]
    assert block["jobs"] == [1, 2] and block["sptm"]["last_completion"] == "4/1"


def test_run_errors_are_nonzero(tmp_path, pair_file, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"jobs": [{"id": 1, "release": 0.5, "processing": 1}]}')
    assert main(["run", str(bad), "--policy", "spt"]) == 2
    assert main(["run", str(tmp_path / "missing.json"), "--policy", "spt"]) == 2
    assert main(["run", str(pair_file), "--policy", "opt", "--oracle-budget", "1"]) == 3
    assert "oracle limit" in capsys.readouterr().err


def test_single_machine_policies_refuse_parallel_instances():
    with pytest.raises(ScheduleError):
        build_policy(Instance.from_tuples([(0, 1)], machines=2), "pos")


def test_dsptm_default_unit():
    inst = Instance.from_tuples([(0, 2), (0, 1)], machines=2)
    sched = build_policy(inst, "dsptm")
    # delta 2, unit p_min/m = 1/2, so every piece moves by 3/4
    assert sched.segments[0].start == Fraction(3, 4)


def test_gen_round_trip(tmp_path):
    out = tmp_path / "inst.json"
    assert main(["gen", "--seed", "3", "--n", "5", "--m", "2", "--delta-max", "5/2", "--mode", "bursty", "--out", str(out)]) == 0
    inst = io.read_instance(out)
    assert inst.n == 5 and inst.machines == 2
    assert io.instance_from_dict(io.instance_to_dict(inst)) == inst


def test_verify_and_export(tmp_path, capsys):
    report, table = tmp_path / "r.json", tmp_path / "r.csv"
    code = main(["verify", "--seed", "2", "--trials", "6", "--n-max", "4", "--m", "1,2",
                 "--out", str(report), "--csv", str(table)])
    data = json.loads(report.read_text())
    assert code == (0 if data["ok"] else 1)
    assert len(table.read_text().splitlines()) == 1 + 6 * 11
    exported = tmp_path / "again.csv"
    assert main(["export", str(report), "--format", "csv", "--out", str(exported)]) == 0
    assert exported.read_text() == table.read_text()
    capsys.readouterr()
    assert main(["export", str(report), "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out) == data


def test_verify_exit_status_follows_failures(tmp_path):
    assert main(["verify", "--trials", "3", "--n-max", "1", "--m", "1"]) == 0
    data_path = tmp_path / "r.json"
    code = main(["verify", "--seed", "0", "--trials", "60", "--m", "2,3", "--out", str(data_path)])
    assert code == (0 if json.loads(data_path.read_text())["ok"] else 1)


def test_report_csv_contract():
    empty = io.report_to_dict(verify(BatchConfig(trials=0)))
    assert io.report_csv(empty).splitlines() == [",".join(io.REPORT_FIELDS)]

    single = io.report_to_dict(verify(BatchConfig(trials=1)))
    assert len(io.report_rows(single)) == 11

    lower = Instance.from_tuples([(0, 4), (Fraction(1, 6), Fraction(10, 3)), (Fraction(1, 2), Fraction(7, 6))], machines=2)

    class Batch:
        config = BatchConfig(trials=0)
        instances = (evaluate_instance(lower),)
        generated_at = "t"
        ok = False

        def summary(self):
            return verify(self.config).summary()

    rows = io.report_rows(io.report_to_dict(Batch()))
    failed = [r for r in rows if r["verdict"] == "fail"]
    assert failed and all(json.loads(r["counterexample"])["machines"] == 2 for r in failed)
    assert all(r["counterexample"] == "" for r in rows if r["verdict"] != "fail")


def test_schedule_export_is_exact():
    sched = spt_schedule(Instance.from_tuples([(0, Fraction(1, 3))]))
    data = io.schedule_to_dict(sched)
    assert data["segments"] == [{"job": 1, "machine": 0, "start": "0/1", "end": "1/3"}]
    assert io.gantt_csv(sched).splitlines()[1] == "1,0,0,0.333333333333,0/1,1/3"


def test_strip_header_removes_only_timestamp():
    data = io.report_to_dict(verify(BatchConfig(trials=1)))
    assert set(data) - set(io.strip_header(data)) == {"header"}
