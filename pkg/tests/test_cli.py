import csv
import io
import json
import math

import pytest

from app.main import main
from app.services.qcore import qpoch_inf_value
from app.utils.formatters import REPORT_FIELDS


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def value_after(label: str, output: str) -> float:
    for line in output.splitlines():
        if line.startswith(label):
            return float(line.split(":", 1)[1])
    raise AssertionError(f"linha '{label}' ausente em:\n{output}")


class TestSuiteCommand:
    def test_single_check_json(self, capsys):
        code, out, _ = run_cli(capsys, "suite", "--check", "INT_4_2", "--q", "0.3")
        records = json.loads(out)
        assert code == 0
        assert len(records) == 4
        assert all(list(record) == REPORT_FIELDS for record in records)
        assert all(record["pass"] for record in records)
        assert {record["params"]["q"] for record in records} == {0.3}

    def test_output_is_sorted(self, capsys):
        code, out, _ = run_cli(capsys, "suite", "--check", "INT_4_2", "ID_2_3", "--q", "0.5", "--jobs", "3")
        records = json.loads(out)
        keys = [(r["check_id"], json.dumps(r["params"], sort_keys=True)) for r in records]
        assert code == 0
        assert keys == sorted(keys)

    def test_q_out_of_range_is_usage_error(self, capsys):
        code, out, err = run_cli(capsys, "suite", "--check", "INT_4_2", "--q", "1.5")
        assert code == 2
        assert out == ""
        assert '"exit_code": 2' in err

    def test_unknown_check_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "suite", "--check", "NOPE_9_9", "--q", "0.5")
        assert code == 2
        assert "UnknownCheck" in err

    def test_bad_flag_is_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "suite", "--format", "xml")
        assert code == 2

    def test_tiny_tolerance_fails(self, capsys):
        code, out, _ = run_cli(capsys, "suite", "--check", "INT_2_2", "--q", "0.5", "--tol", "1e-30")
        records = json.loads(out)
        assert code == 1
        assert all(record["tolerance"] == 1e-30 for record in records)
        assert not all(record["pass"] for record in records)

    def test_csv_header(self, capsys):
        code, out, _ = run_cli(capsys, "suite", "--check", "INT_4_2", "--q", "0.3", "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0
        assert out.splitlines()[0] == ",".join(REPORT_FIELDS)
        assert len(rows) == 4
        assert json.loads(rows[0]["params"])["q"] == 0.3

    def test_human_summary(self, capsys):
        code, out, _ = run_cli(capsys, "suite", "--check", "INT_4_2", "--q", "0.3", "--format", "human")
        assert code == 0
        assert out.count("✅") == 4
        assert out.rstrip().endswith("4/4 aprovados, 0 reprovados")

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "report.json"
        code, out, _ = run_cli(capsys, "suite", "--check", "INT_4_2", "--q", "0.3", "--output", str(target))
        assert code == 0
        assert out == ""
        assert len(json.loads(target.read_text(encoding="utf-8"))) == 4

    def test_seeded_runs_are_identical(self, capsys):
        argv = ("suite", "--check", "ID_2_3", "INT_2_2", "--q", "0.5", "--seed", "11", "--random", "3")

        def report():
            code, out, _ = run_cli(capsys, *argv)
            assert code != 2
            records = json.loads(out)
            for record in records:
                record.pop("runtime_ms")
            return json.dumps(records, sort_keys=True)

        assert report() == report()

    def test_save_and_history(self, capsys):
        code, _, _ = run_cli(capsys, "suite", "--check", "INT_4_2", "--q", "0.3", "--save")
        assert code == 0
        code, out, _ = run_cli(capsys, "suite", "--history", "5")
        runs = json.loads(out)
        assert code == 0
        assert len(runs) == 1
        assert runs[0]["selector"] == "check:INT_4_2"
        assert runs[0]["total"] == 4
        assert runs[0]["failed"] == 0


class TestEvalCommand:
    def test_continuous_hermite_degree_two(self, capsys):
        code, out, _ = run_cli(capsys, "eval", "ContinuousQHermite", "2", "--point", "trig:0", "--q", "0.5")
        assert code == 0
        assert value_after("recurrence", out) == pytest.approx(3.5)
        assert value_after("explicit[default]", out) == pytest.approx(3.5)
        assert value_after("residual", out) < 1e-12

    def test_monic_target_variant(self, capsys):
        code, out, _ = run_cli(
            capsys, "eval", "ContinuousQHermite", "2", "--point", "trig:0", "--q", "0.5", "--variant", "monic",
        )
        assert code == 0
        assert value_after("monic", out) == pytest.approx(0.875)

    def test_rational_family_has_note(self, capsys):
        code, out, _ = run_cli(
            capsys, "eval", "ASVermaRational", "2", "--point", "line:0.3", "--q", "0.5",
            "--param", "a=0.7", "--param", "t1=0.2", "--param", "t2=-0.1",
        )
        assert code == 0
        assert "recurrence" not in out
        assert "nota:" in out

    def test_unknown_family(self, capsys):
        code, _, err = run_cli(capsys, "eval", "Legendre", "2", "--point", "trig:0", "--q", "0.5")
        assert code == 2
        assert "DomainViolation" in err

    def test_bad_point(self, capsys):
        code, _, _ = run_cli(capsys, "eval", "ContinuousQHermite", "2", "--point", "disk:0", "--q", "0.5")
        assert code == 2

    def test_non_numeric_param(self, capsys):
        code, out, err = run_cli(
            capsys, "eval", "ASCarlitzU", "2", "--param", "a=foo", "--point", "line:0.3", "--q", "0.5",
        )
        assert code == 2
        assert out == ""
        assert "DomainViolation" in err


class TestMeasureCommand:
    def test_carlitz_masses_sum_to_one(self, capsys):
        code, out, _ = run_cli(capsys, "measure", "carlitz", "--param", "a=-1", "--q", "0.5", "--atoms", "60")
        lines = out.splitlines()
        assert code == 0
        assert lines[0] == "location,mass_or_density,cumulative"
        total = float(lines[-1].split("total_mass=")[1].split()[0])
        assert total == pytest.approx(1.0, abs=1e-10)
        last_cumulative = complex(lines[-2].split(",")[2]).real
        assert last_cumulative == pytest.approx(1.0, abs=1e-10)

    def test_nu_with_a_equal_one(self, capsys):
        code, _, err = run_cli(capsys, "measure", "nu", "--param", "a=1", "--q", "0.5")
        assert code == 2
        assert "DomainViolation" in err

    def test_human_table(self, capsys):
        code, out, _ = run_cli(capsys, "measure", "hermite", "--q", "0.5", "--samples", "9", "--format", "human")
        assert code == 0
        assert len(out.splitlines()) == 10
        total = float(out.splitlines()[-1].split("total_mass=")[1].split()[0])
        assert total == pytest.approx(2 * math.pi / qpoch_inf_value(0.5, 0.5).real, rel=1e-10)

    def test_non_numeric_param(self, capsys):
        code, out, err = run_cli(capsys, "measure", "carlitz", "--param", "a=abc", "--q", "0.5")
        assert code == 2
        assert out == ""
        assert "DomainViolation" in err
        assert "valor não numérico para a" in err
