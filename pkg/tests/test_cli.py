import json

import pytest

from calmeasures import cdl, ece, read_csv, smce
from calmeasures.cli import main

CSV = "prediction,label\n0.3,1\n0.3,0\n0.7,1\n0.2,0\n"


@pytest.fixture
def data_csv(tmp_path):
    p = tmp_path / "data.csv"
    p.write_text(CSV)
    return str(p)


@pytest.fixture
def instance_json(tmp_path):
    p = tmp_path / "inst.json"
    p.write_text(
        json.dumps(
            [
                {"id": "a", "mass": 0.5, "pred": 0.4, "cond_mean": 0.0},
                {"id": "b", "mass": 0.5, "pred": 0.6, "cond_mean": 1.0},
            ]
        )
    )
    return str(p)


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


class TestReport:
    def test_values_match_library(self, data_csv, capsys):
        code, out = run_cli(
            ["report", data_csv, "--measures", "ece,smce,cdl"], capsys
        )
        assert code == 0
        obj = json.loads(out)
        assert obj["schema"] == 1
        j = read_csv(data_csv)
        assert obj["measures"]["ece"] == pytest.approx(ece(j), abs=1e-15)
        assert obj["measures"]["smce"] == pytest.approx(smce(j), abs=1e-15)
        assert obj["measures"]["cdl"] == pytest.approx(cdl(j), abs=1e-15)

    def test_verify_relations_flag(self, data_csv, capsys):
        code, out = run_cli(["report", data_csv, "--verify-relations"], capsys)
        assert code == 0
        checks = json.loads(out)["relation_checks"]
        assert all(checks.values())

    def test_parameterized_measures(self, data_csv, capsys):
        code, out = run_cli(
            [
                "report",
                data_csv,
                "--measures",
                "ece_q:3,binned:10,lowdeg:2,kernel:gaussian",
            ],
            capsys,
        )
        assert code == 0
        assert set(json.loads(out)["measures"]) == {
            "ece_q:3",
            "binned:10",
            "lowdeg:2",
            "kernel:gaussian",
        }

    def test_cfdl_with_task_file(self, data_csv, tmp_path, capsys):
        task = tmp_path / "task.json"
        task.write_text('{"actions": ["l", "h"], "payoff": [[1, 0], [0, 1]]}')
        code, out = run_cli(
            ["report", data_csv, "--measures", f"cfdl:{task}"], capsys
        )
        assert code == 0
        assert json.loads(out)["measures"][f"cfdl:{task}"] >= 0.0

    def test_unknown_measure_exit_3(self, data_csv, capsys):
        assert main(["report", data_csv, "--measures", "nope"]) == 3

    def test_missing_file_exit_2(self, capsys):
        assert main(["report", "/no/such/file.csv"]) == 2

    def test_malformed_csv_exit_2(self, tmp_path, capsys):
        p = tmp_path / "bad.csv"
        p.write_text("nonsense\n1,2\n")
        assert main(["report", str(p)]) == 2

    def test_dce_needs_instance_exit_3(self, data_csv, capsys):
        assert main(["report", data_csv, "--measures", "dce"]) == 3

    def test_determinism_byte_identical(self, data_csv, tmp_path, capsys):
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        args = ["report", data_csv, "--seed", "7", "--measures", "ece,smce"]
        assert main(args + ["-o", str(out1)]) == 0
        assert main(args + ["-o", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_seed_from_env(self, data_csv, capsys, monkeypatch):
        monkeypatch.setenv("CALIB_SEED", "99")
        code, out = run_cli(["report", data_csv], capsys)
        assert code == 0
        assert json.loads(out)["meta"]["seed"] == 99

    def test_float_precision_17_digits(self, data_csv, capsys):
        code, out = run_cli(["report", data_csv, "--measures", "ece"], capsys)
        obj = json.loads(out)
        # round-trips exactly through the printed representation
        assert obj["measures"]["ece"] == ece(read_csv(data_csv))


class TestOracle:
    def test_sandwich_checks_pass(self, instance_json, capsys):
        code, out = run_cli(["oracle", instance_json], capsys)
        assert code == 0
        obj = json.loads(out)
        assert all(obj["sandwich_checks"].values())
        assert obj["dce"] <= obj["dce_upper"] + 1e-12

    def test_cap_exceeded_exit_4(self, tmp_path, capsys):
        p = tmp_path / "big.json"
        p.write_text(
            json.dumps(
                [
                    {"id": f"x{i}", "mass": 1.0, "pred": i / 13, "cond_mean": 0.5}
                    for i in range(14)
                ]
            )
        )
        assert main(["oracle", str(p), "--cap", "12"]) == 4

    def test_malformed_exit_2(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        assert main(["oracle", str(p)]) == 2


class TestOnline:
    def test_threshold_episode(self, capsys):
        code, out = run_cli(
            [
                "online",
                "--forecaster",
                "running_mean",
                "--adversary",
                "threshold",
                "-T",
                "50",
                "--seed",
                "1",
                "--measures",
                "ece",
            ],
            capsys,
        )
        assert code == 0
        obj = json.loads(out)
        assert len(obj["rounds"]) == 50
        assert obj["sequence_measures"]["ece"] >= 0.4 * 50
        assert len(obj["prefix_curves"]["ece"]) == 50

    def test_determinism(self, tmp_path, capsys):
        args = [
            "online",
            "--forecaster",
            "grid_random:10",
            "--adversary",
            "bernoulli:0.4",
            "-T",
            "30",
            "--seed",
            "2",
            "--no-curves",
        ]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(args + ["-o", str(a)]) == 0
        assert main(args + ["-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_bad_specs_exit_2(self, capsys):
        base = ["online", "-T", "5"]
        assert main(base + ["--forecaster", "wat", "--adversary", "ones"]) == 2
        assert (
            main(base + ["--forecaster", "constant:0.5", "--adversary", "wat"])
            == 2
        )

    def test_unknown_measure_exit_3(self, capsys):
        assert (
            main(
                [
                    "online",
                    "--forecaster",
                    "constant:0.5",
                    "--adversary",
                    "ones",
                    "-T",
                    "5",
                    "--measures",
                    "nope",
                ]
            )
            == 3
        )


class TestFixtureCommand:
    def test_emit_and_reuse(self, tmp_path, capsys):
        emitted = tmp_path / "tp.json"
        code, out = run_cli(
            [
                "fixture",
                "--name",
                "two_point",
                "--eps",
                "0.1",
                "--emit",
                str(emitted),
            ],
            capsys,
        )
        assert code == 0
        obj = json.loads(out)
        assert obj["fixtures"][0]["ok"] is True
        assert emitted.exists()
        assert main(["oracle", str(emitted)]) == 0

    def test_pair_fixture_emits_both(self, tmp_path, capsys):
        base = tmp_path / "qg.json"
        code, out = run_cli(
            [
                "fixture",
                "--name",
                "quadratic_gap",
                "--eps",
                "0.1",
                "--emit",
                str(base),
            ],
            capsys,
        )
        assert code == 0
        names = [f["name"] for f in json.loads(out)["fixtures"]]
        for name in names:
            assert (tmp_path / f"qg_{name}.json").exists()

    def test_eps_out_of_range_exit_2(self, capsys):
        assert main(["fixture", "--name", "two_point", "--eps", "0.9"]) == 2


class TestPlotdata:
    def test_reliability_rows(self, data_csv, capsys):
        code, out = run_cli(
            ["plotdata", "--kind", "reliability", data_csv], capsys
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "prediction,conditional_mean,mass"
        assert len(lines) == 4  # header + 3 distinct values

    def test_transcript_rows(self, tmp_path, capsys):
        p = tmp_path / "t.json"
        p.write_text(json.dumps({"rounds": [[0.5, 1]] * 10}))
        code, out = run_cli(
            [
                "plotdata",
                "--kind",
                "transcript",
                str(p),
                "--measures",
                "ece,smce",
            ],
            capsys,
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "t,p,y,prefix_ece,prefix_smce"
        assert len(lines) == 11

    def test_malformed_transcript_exit_2(self, tmp_path, capsys):
        p = tmp_path / "t.json"
        p.write_text("[]")
        assert main(["plotdata", "--kind", "transcript", str(p)]) == 2
