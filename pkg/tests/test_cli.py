import csv
import json
import math

import pytest

from fgkls.cli import EXIT_CONTRACT, EXIT_OK, EXIT_SCHEMA, TRAJECTORY_HEADER, main


def write_job(tmp_path, doc, name="job.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def degenerate_jordan_job(command="pointer", **extra):
    doc = {
        "command": command,
        "system": {
            "hamiltonian": [[0.7, 0.0], [0.0, 0.7]],
            "lindblad": {"form": "jordan", "c": 1.0, "lambda": [1.0, 0.0]},
        },
    }
    doc.update(extra)
    return doc


class TestPointerCommand:
    def test_degenerate_h_jordan(self, tmp_path, capsys):
        job = write_job(tmp_path, degenerate_jordan_job())
        assert main(["--job", job]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["case"] == "degenerate-H Jordan"
        rho = payload["rho"]
        assert rho[0][0] == [pytest.approx(2.0 / 3.0), 0.0]
        assert rho[0][1] == [pytest.approx(-1.0 / 3.0), 0.0]

    def test_output_file_roundtrip(self, tmp_path):
        out = tmp_path / "pointer.json"
        job = write_job(tmp_path, degenerate_jordan_job())
        assert main(["--job", job, "--out", str(out)]) == EXIT_OK
        first = out.read_text()
        assert main(["--job", job, "--out", str(out)]) == EXIT_OK
        assert out.read_text() == first  # bit-for-bit reproducible
        payload = json.loads(first)
        assert payload["rho"][1][1][0] == 1.0 / 3.0  # full double precision


class TestSpectrumCommand:
    def test_double_root_structure(self, tmp_path, capsys):
        doc = {
            "command": "spectrum",
            "system": {
                "hamiltonian": [[0.5, 0.0], [0.0, 0.5]],
                "lindblad": {"form": "jordan", "c": 1.0, "lambda": [0.0, 0.0]},
            },
        }
        assert main(["--job", write_job(tmp_path, doc)]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["structure"] == "DoubleRoot"
        assert payload["stability"] == "AllDamped"
        svals = sorted(r["s"][0] for r in payload["roots"] for _ in range(r["multiplicity"]))
        assert svals == pytest.approx([-1.0, -0.5, -0.5])


class TestEvolveCommand:
    def test_csv_matches_closed_form(self, tmp_path):
        out = tmp_path / "traj.csv"
        doc = {
            "command": "evolve",
            "system": {
                "hamiltonian": [[0.3, 0.0], [0.0, 0.3]],
                "lindblad": {"form": "jordan", "c": 1.0, "lambda": [0.0, 0.0]},
            },
            "initial_state": [[0.0, 0.0], [0.0, 1.0]],
            "time_grid": {"t_start": 0.0, "t_end": 5.0, "points": 51},
            "output": {"format": "csv", "path": str(out)},
        }
        assert main(["--job", write_job(tmp_path, doc)]) == EXIT_OK
        with open(out) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == TRAJECTORY_HEADER
        for row in rows[1:]:
            t, f22 = float(row[0]), float(row[7])
            assert abs(f22 - math.exp(-t)) < 1e-8
            assert row[11] == "1"

    def test_missing_initial_state_is_schema_error(self, tmp_path, capsys):
        doc = degenerate_jordan_job(command="evolve")
        assert main(["--job", write_job(tmp_path, doc)]) == EXIT_SCHEMA


class TestPositivityCommand:
    def test_single_mode_method(self, tmp_path, capsys):
        doc = {
            "command": "positivity",
            "system": {
                "hamiltonian": [[0.3, 0.0], [0.0, 0.3]],
                "lindblad": {"form": "jordan", "c": 1.0, "lambda": [0.0, 0.0]},
            },
            "initial_state": [[0.0, 0.0], [0.0, 1.0]],
        }
        assert main(["--job", write_job(tmp_path, doc)]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["method"] == "single-mode"
        assert payload["valid"] is True
        assert payload["t_min"] == 0.0

    def test_det_scan_fallback(self, tmp_path, capsys):
        doc = {
            "command": "positivity",
            "system": {
                "hamiltonian": [[0.9, [0.2, -0.1]], [[0.2, 0.1], -0.3]],
                "lindblad": {"form": "jordan", "c": 1.0, "lambda": [0.8, 0.1]},
            },
            "initial_state": [[0.9, [0.1, 0.05]], [[0.1, -0.05], 0.1]],
            "time_grid": {"t_start": 0.0, "t_end": 12.0, "points": 600},
        }
        assert main(["--job", write_job(tmp_path, doc)]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["method"] == "det-scan"
        assert payload["t_min"] == 0.0  # physical initial state stays physical


class TestPerturbCommand:
    def test_jordan_branches_and_slopes(self, tmp_path, capsys):
        doc = {
            "command": "perturb",
            "system": {
                "hamiltonian": [[1.0, 0.0], [0.0, 0.0]],
                "lindblad": {"form": "jordan", "c": 0.1, "lambda": [0.8, 0.3]},
            },
        }
        assert main(["--job", write_job(tmp_path, doc)]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        a1s = sorted(b["a1"][0] for b in payload["branches"])
        assert a1s == pytest.approx([-1.0, -0.5, -0.5])
        assert abs(payload["rate_error_slope"] - 4.0) < 0.5
        assert abs(payload["pointer_f11_order4_slope"] - 8.0) < 0.5

    def test_non_diagonal_h_is_contract_error(self, tmp_path):
        doc = {
            "command": "perturb",
            "system": {
                "hamiltonian": [[1.0, 0.3], [0.3, 0.0]],
                "lindblad": {"form": "jordan", "c": 0.1, "lambda": [0.8, 0.3]},
            },
        }
        assert main(["--job", write_job(tmp_path, doc)]) == EXIT_CONTRACT


class TestUnitonCommand:
    def test_all_states(self, tmp_path, capsys):
        doc = {
            "command": "uniton",
            "system": {
                "hamiltonian": [[1.0, 0.0], [0.0, 0.0]],
                "lindblad": {
                    "form": "diagonal",
                    "c": 1.0,
                    "lambda1": [0.4, 0.2],
                    "lambda2": [0.4, 0.2],
                },
            },
        }
        assert main(["--job", write_job(tmp_path, doc)]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["verdict"] == "AllStates"

    def test_jordan_none_with_candidate(self, tmp_path, capsys):
        doc = {
            "command": "uniton",
            "system": {
                "hamiltonian": [[1.0, 0.0], [0.0, 0.0]],
                "lindblad": {"form": "jordan", "c": 1.0, "lambda": [1.0, 0.0]},
            },
        }
        assert main(["--job", write_job(tmp_path, doc)]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["verdict"] == "None"
        assert payload["candidate"][0][0][0] == pytest.approx(2.0 / 3.0)


class TestOracleCheckCommand:
    def test_reports_small_deviation(self, tmp_path, capsys):
        doc = {
            "command": "oracle-check",
            "system": {
                "hamiltonian": [[0.8, [0.2, -0.1]], [[0.2, 0.1], -0.4]],
                "lindblad": {"form": "jordan", "c": 1.0, "lambda": [0.5, 0.3]},
            },
            "time_grid": {"t_start": 0.0, "t_end": 6.0, "points": 100},
        }
        assert main(["--job", write_job(tmp_path, doc), "--seed", "7"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["max_deviation"] < 1e-6
        assert payload["states_checked"] == 5


class TestErrors:
    def test_json_parse_error_is_line_anchored(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{\n  "command": "pointer",\n  oops\n}')
        assert main(["--job", str(path)]) == EXIT_SCHEMA
        err = capsys.readouterr().err
        assert "bad.json:3" in err

    def test_unknown_command(self, tmp_path, capsys):
        doc = degenerate_jordan_job(command="fly")
        assert main(["--job", write_job(tmp_path, doc)]) == EXIT_SCHEMA
        assert "$.command" in capsys.readouterr().err

    def test_missing_field_path_reported(self, tmp_path, capsys):
        doc = {"command": "pointer", "system": {"hamiltonian": [[0, 0], [0, 0]]}}
        assert main(["--job", write_job(tmp_path, doc)]) == EXIT_SCHEMA
        assert "$.system" in capsys.readouterr().err

    def test_bad_complex_entry(self, tmp_path, capsys):
        doc = degenerate_jordan_job()
        doc["system"]["hamiltonian"][0][0] = [1.0, 0.0, 0.0]
        assert main(["--job", write_job(tmp_path, doc)]) == EXIT_SCHEMA
        assert "hamiltonian" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["--job", str(tmp_path / "nope.json")]) == EXIT_SCHEMA
