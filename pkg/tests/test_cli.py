import csv
import json

import pytest

from mapflow_hub.cli.interface import main
from mapflow_hub.core.engine import VEHICLE_COLUMNS
from mapflow_hub.core.metrics import REPORT_COLUMNS


@pytest.fixture
def data_dir(tmp_path):
    return tmp_path / "data"


@pytest.fixture
def scenario_file(data_dir):
    code = main(
        [
            "generate", "--seed", "2", "--out", "s.json",
            "--vehicles", "6", "--rsus", "6", "--demand", "1G",
        ]
    )
    assert code == 0
    return data_dir / "s.json"


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as f:
        return list(csv.reader(f))


class TestGenerate:
    def test_defaults(self, data_dir, capsys):
        assert main(["generate", "--seed", "1", "--out", "s.json"]) == 0
        data = json.loads((data_dir / "s.json").read_text(encoding="utf-8"))
        assert len(data["rsus"]) == 60
        assert len(data["vehicles"]) == 251
        assert data["seed"] == 1
        assert "Сценарий сохранён" in capsys.readouterr().out

    def test_vehicle_count_keeps_branch_proportions(self, data_dir):
        main(["generate", "--out", "s.json", "--vehicles", "50"])
        data = json.loads((data_dir / "s.json").read_text(encoding="utf-8"))
        branches = [v["branch"] for v in data["vehicles"]]
        assert sorted(branches.count(b) for b in "ABC") == [12, 19, 19]

    def test_renormalize_flag(self, data_dir):
        main(["generate", "--out", "a.json", "--vehicles", "5"])
        main(["generate", "--out", "b.json", "--vehicles", "5", "--renormalize"])
        plain = json.loads((data_dir / "a.json").read_text(encoding="utf-8"))
        scaled = json.loads((data_dir / "b.json").read_text(encoding="utf-8"))
        assert plain["channel"]["renormalize_contention"] is False
        assert scaled["channel"]["renormalize_contention"] is True

    def test_same_seed_same_file(self, data_dir):
        main(["generate", "--seed", "9", "--out", "a.json", "--vehicles", "20"])
        main(["generate", "--seed", "9", "--out", "b.json", "--vehicles", "20"])
        assert (data_dir / "a.json").read_bytes() == (data_dir / "b.json").read_bytes()

    def test_empty_speed_range_is_an_error(self, data_dir, capsys):
        code = main(
            ["generate", "--out", "s.json", "--speed-min", "30", "--speed-max", "10"]
        )
        assert code == 1
        assert "Ошибка" in capsys.readouterr().err
        assert not (data_dir / "s.json").exists()

    def test_out_is_required(self):
        with pytest.raises(SystemExit) as exc:
            main(["generate"])
        assert exc.value.code == 2


class TestRun:
    def test_report_row_is_appended(self, scenario_file, data_dir, capsys):
        assert main(["run", "s.json", "etdm", "--out", "r.csv"]) == 0
        assert main(["run", "s.json", "pta:0.7", "--out", "r.csv"]) == 0
        rows = read_csv(data_dir / "r.csv")
        assert rows[0] == list(REPORT_COLUMNS)
        assert [row[0] for row in rows[1:]] == ["etdm", "pta:0.7"]
        assert "etdm" in capsys.readouterr().out

    def test_bare_pta_uses_default_probability(self, scenario_file, data_dir):
        main(["run", "s.json", "pta", "--out", "r.csv"])
        assert read_csv(data_dir / "r.csv")[1][0] == "pta:0.7"

    @pytest.mark.parametrize("algorithm", ["pta:1.5", "greedy", "pta:x"])
    def test_bad_algorithm_is_a_usage_error(self, scenario_file, algorithm):
        with pytest.raises(SystemExit) as exc:
            main(["run", "s.json", algorithm])
        assert exc.value.code == 2

    def test_detail_and_json(self, scenario_file, data_dir):
        code = main(
            ["run", "s.json", "oa", "--detail", "d.csv", "--json", "r.json"]
        )
        assert code == 0
        detail = read_csv(data_dir / "d.csv")
        assert detail[0] == list(VEHICLE_COLUMNS)
        assert len(detail) == 1 + 6
        data = json.loads((data_dir / "r.json").read_text(encoding="utf-8"))
        assert data["algorithm"] == "oa"
        assert len(data["records"]) == 6

    def test_json_is_reproducible(self, scenario_file, data_dir):
        main(["run", "s.json", "pta:0.5", "--json", "a.json"])
        main(["run", "s.json", "pta:0.5", "--json", "b.json"])
        assert (data_dir / "a.json").read_bytes() == (data_dir / "b.json").read_bytes()

    def test_missing_scenario(self, capsys):
        assert main(["run", "missing.json", "etdm"]) == 1
        assert "Ошибка" in capsys.readouterr().err

    def test_invalid_scenario_lists_violations(self, scenario_file, capsys):
        data = json.loads(scenario_file.read_text(encoding="utf-8"))
        data["rsus"][0]["lane_offset_m"] = 150.0
        scenario_file.write_text(json.dumps(data), encoding="utf-8")
        assert main(["run", "s.json", "etdm"]) == 1
        err = capsys.readouterr().err
        assert "   - " in err
        assert "Ошибка" in err

    def test_anomalies_do_not_fail_the_run(self, data_dir):
        main(
            [
                "generate", "--out", "weak.json", "--vehicles", "4",
                "--rsus", "3", "--energy", "0",
            ]
        )
        assert main(["run", "weak.json", "etdm", "--out", "r.csv"]) == 0
        assert read_csv(data_dir / "r.csv")[1][11] == "4"


class TestSweeps:
    def test_volume_to_stdout(self, scenario_file, capsys):
        code = main(
            [
                "sweep-volume", "s.json", "--algorithms", "etdm,oa",
                "--from", "1G", "--to", "2G", "--step", "1G",
            ]
        )
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == ",".join(REPORT_COLUMNS)
        assert len(lines) == 1 + 2 * 2

    def test_traffic_rerun_is_byte_identical(self, scenario_file, data_dir):
        args = ["sweep-traffic", "s.json", "--from", "2", "--to", "6", "--step", "2"]
        assert main([*args, "--out", "a.csv"]) == 0
        assert main([*args, "--out", "b.csv"]) == 0
        assert main([*args, "--out", "c.csv", "--workers", "2"]) == 0
        first = (data_dir / "a.csv").read_bytes()
        assert first == (data_dir / "b.csv").read_bytes()
        assert first == (data_dir / "c.csv").read_bytes()
        rows = read_csv(data_dir / "a.csv")
        assert len(rows) == 1 + 3 * 5
        assert [row[0] for row in rows[1:6]] == [
            "etdm", "oa", "pta:0.3", "pta:0.5", "pta:0.7",
        ]

    def test_empty_algorithm_list(self, scenario_file):
        with pytest.raises(SystemExit) as exc:
            main(["sweep-traffic", "s.json", "--algorithms", ","])
        assert exc.value.code == 2

    def test_traffic_beyond_fleet_size(self, scenario_file, capsys):
        code = main(["sweep-traffic", "s.json", "--from", "5", "--to", "10"])
        assert code == 1
        assert "Ошибка" in capsys.readouterr().err


class TestFeasibility:
    def test_contact_times(self, capsys):
        code = main(
            [
                "feasibility", "--range", "100", "--offset", "60",
                "--v1", "20", "--v2", "20",
            ]
        )
        assert code == 0
        out = capsys.readouterr().out.splitlines()
        assert "contact_time=4.0" in out
        assert "contact_time_same_direction=infinite contact" in out

    def test_vehicles_needed(self, capsys):
        main(
            [
                "feasibility", "--range", "100", "--offset", "60",
                "--v1", "20", "--v2", "20", "--rate", "200",
                "--data", "100G", "--bandwidth", "300",
            ]
        )
        out = capsys.readouterr().out.splitlines()
        assert "capacity_mb=800.0" in out
        assert "c_max_mb=1200.0" in out
        assert "vehicles_needed=84" in out

    def test_offset_outside_range(self, capsys):
        main(
            [
                "feasibility", "--range", "50", "--offset", "60",
                "--v1", "20", "--v2", "10",
            ]
        )
        out = capsys.readouterr().out.splitlines()
        assert "contact_time=undefined" in out

    def test_missing_speed(self):
        with pytest.raises(SystemExit) as exc:
            main(["feasibility", "--range", "100", "--offset", "60", "--v1", "20"])
        assert exc.value.code == 2
