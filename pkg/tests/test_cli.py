"""CLI contract: subcommands, formats, exit codes, determinism."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest
from scipy.special import j0

from qdot.cli import main

EXIT_OK = 0
EXIT_REPRODUCTION = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_kv(text):
    out = {}
    for line in text.splitlines():
        if " = " in line:
            key, _, value = line.partition(" = ")
            out[key.strip()] = value.strip()
    return out


class TestSolve:
    def test_reference_row_both_methods(self, capsys):
        code, out, _ = run_cli(
            capsys, "solve", "--r0", "1", "--nr", "0", "--m", "0",
            "--coulomb", "1", "--method", "both",
        )
        assert code == EXIT_OK
        kv = parse_kv(out)
        assert abs(float(kv["E_wkb"]) - 9.6186) / 9.6186 <= 5e-4
        assert abs(float(kv["E_exact"]) - 9.0240) / 9.0240 <= 5e-3
        assert "rel_diff" in kv

    def test_free_case_wkb(self, capsys):
        code, out, _ = run_cli(
            capsys, "solve", "--r0", "2", "--nr", "0", "--m", "0",
            "--coulomb", "0", "--method", "wkb",
        )
        assert code == EXIT_OK
        expected = ((0.75 * math.pi) / 2.0) ** 2
        assert float(parse_kv(out)["E_wkb"]) == pytest.approx(expected, rel=1e-5)

    def test_excited_reference(self, capsys):
        code, out, _ = run_cli(
            capsys, "solve", "--r0", "1", "--nr", "0", "--m", "1",
            "--coulomb", "2", "--method", "exact",
        )
        assert code == EXIT_OK
        assert abs(float(parse_kv(out)["E_exact"]) - 18.646) / 18.646 <= 5e-3

    def test_json_echoes_config(self, capsys):
        code, out, _ = run_cli(
            capsys, "solve", "--r0", "1", "--method", "wkb", "--format", "json",
        )
        assert code == EXIT_OK
        payload = json.loads(out)
        cfg = payload["config"]
        assert cfg["command"] == "solve"
        for key in ("r0", "nr", "m", "coulomb", "method", "format", "n_intervals", "output"):
            assert key in cfg
        assert payload["results"]["wkb"]["E"] > 0


class TestActionCommand:
    def test_ground_state_phase(self, capsys):
        code, out, _ = run_cli(
            capsys, "action", "--E", "9.6186", "--r0", "1", "--m", "0", "--coulomb", "1",
        )
        assert code == EXIT_OK
        kv = parse_kv(out)
        assert float(kv["alpha_over_pi"]) == pytest.approx(0.75, abs=1e-3)
        assert kv["nearest_n_r"].startswith("0")

    def test_excited_phase(self, capsys):
        code, out, _ = run_cli(
            capsys, "action", "--E", "54.222", "--r0", "1", "--m", "1", "--coulomb", "2",
        )
        assert code == EXIT_OK
        assert float(parse_kv(out)["alpha_over_pi"]) == pytest.approx(1.75, abs=1e-3)

    def test_free_case_exact_phase(self, capsys):
        r0 = 3.0
        E = ((0.75 * math.pi) / r0) ** 2
        code, out, _ = run_cli(
            capsys, "action", "--E", str(E), "--r0", str(r0), "--m", "0", "--coulomb", "0",
        )
        assert code == EXIT_OK
        assert float(parse_kv(out)["alpha_over_pi"]) == pytest.approx(0.75, abs=1e-9)

    def test_below_wall_potential_is_numerical_failure(self, capsys):
        code, _, err = run_cli(
            capsys, "action", "--E", "0.1", "--r0", "1", "--m", "1", "--coulomb", "2",
        )
        assert code == EXIT_NUMERICAL
        assert "error" in err

    def test_all_methods_agree(self, capsys):
        code, out, _ = run_cli(
            capsys, "action", "--E", "12.0", "--r0", "1.5", "--m", "1", "--coulomb", "2",
        )
        assert code == EXIT_OK
        kv = parse_kv(out)
        a = float(kv["alpha_quadrature_rho"])
        assert float(kv["alpha_quadrature_w"]) == pytest.approx(a, rel=1e-9)
        assert float(kv["alpha_closed_form"]) == pytest.approx(a, rel=1e-9)


class TestSweep:
    def test_reference_radii_wkb_column(self, capsys):
        from qdot.report import TABLES

        radii = ",".join(str(row.r0) for row in TABLES[1])
        code, out, _ = run_cli(
            capsys, "sweep", "--r0-list", radii, "--nr", "0", "--m", "0",
            "--coulomb", "1", "--method", "wkb",
        )
        assert code == EXIT_OK
        lines = out.splitlines()
        assert len(lines) == 1 + len(TABLES[1])
        for line, row in zip(lines[1:], TABLES[1]):
            e_wkb = float(line.split(",")[5])
            assert abs(e_wkb - row.paper_E_wkb) / row.paper_E_wkb <= 5e-4

    def test_single_point_matches_solve(self, capsys):
        code, sweep_out, _ = run_cli(
            capsys, "sweep", "--r0-list", "1.0", "--nr", "0", "--m", "0",
            "--coulomb", "1", "--method", "wkb",
        )
        assert code == EXIT_OK
        sweep_e = float(sweep_out.splitlines()[1].split(",")[5])
        _, solve_out, _ = run_cli(
            capsys, "solve", "--r0", "1.0", "--method", "wkb",
        )
        assert sweep_e == pytest.approx(float(parse_kv(solve_out)["E_wkb"]), rel=1e-10)

    def test_log_range(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--r0-log", "1:100:3", "--method", "wkb", "--coulomb", "0",
            "--m", "1",
        )
        assert code == EXIT_OK
        radii = [float(line.split(",")[1]) for line in out.splitlines()[1:]]
        assert radii == pytest.approx([1.0, 10.0, 100.0])

    def test_requires_radii_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["sweep", "--method", "wkb"])
        assert exc.value.code == EXIT_USAGE

    def test_bad_radii_exit_numerical(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "--r0-list", "-1.0", "--method", "wkb")
        assert code == EXIT_NUMERICAL
        assert "positive" in err


class TestReproduce:
    def test_table3_passes(self, capsys):
        code, out, _ = run_cli(capsys, "reproduce", "--table", "3", "--format", "csv")
        assert code == EXIT_OK
        assert len(out.splitlines()) == 1 + 13

    def test_wrong_coulomb_fails(self, capsys):
        code, out, _ = run_cli(
            capsys, "reproduce", "--table", "1", "--coulomb-override", "2",
            "--format", "csv",
        )
        assert code == EXIT_REPRODUCTION
        # every row fails at >10%
        for line in out.splitlines()[1:]:
            assert line.split(",")[-1] == "false"

    def test_all_tables_csv_row_count(self, capsys):
        code, out, err = run_cli(capsys, "reproduce", "--table", "all", "--format", "csv")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert len(lines) == 1 + 15 + 11 + 13
        assert "audit" in err  # csv cannot carry the audit; it goes to stderr

    def test_markdown_to_file(self, capsys, tmp_path):
        target = tmp_path / "rep.md"
        code, out, _ = run_cli(
            capsys, "reproduce", "--table", "2", "--format", "md", "--output", str(target),
        )
        assert code == EXIT_OK
        assert out == ""
        text = target.read_text()
        assert "n_r = 0, m = 1" in text


class TestWavefunction:
    def test_exact_free_disc_matches_bessel(self, capsys):
        code, out, _ = run_cli(
            capsys, "wavefunction", "--r0", "1", "--nr", "0", "--m", "0",
            "--coulomb", "0", "--method", "exact", "--samples", "250",
        )
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "r,u,psi"
        data = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
        r, u, psi = data.T
        assert r[-1] == pytest.approx(1.0)
        assert abs(u[-1]) <= 1e-6 * np.max(np.abs(u))
        reference = j0(2.404825557695773 * r)
        amplitude = float(np.dot(psi, reference) / np.dot(reference, reference))
        assert np.max(np.abs(psi - amplitude * reference)) <= 1e-5 * np.max(
            np.abs(amplitude * reference)
        )

    def test_u_column_node_count(self, capsys):
        code, out, _ = run_cli(
            capsys, "wavefunction", "--r0", "1", "--nr", "1", "--m", "1",
            "--coulomb", "2", "--method", "exact",
        )
        assert code == EXIT_OK
        u = np.array([float(line.split(",")[1]) for line in out.splitlines()[1:]])
        interior = u[1:-1]
        nodes = int(np.sum(np.sign(interior[:-1]) * np.sign(interior[1:]) < 0))
        assert nodes == 1

    def test_wkb_dump_documents_exclusion(self, capsys):
        code, out, _ = run_cli(
            capsys, "wavefunction", "--r0", "1", "--nr", "0", "--m", "0",
            "--coulomb", "1", "--method", "wkb", "--samples", "100",
        )
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0].startswith("#")
        assert "omitted" in lines[0]
        assert lines[1] == "region,r,u,psi"
        regions = {line.split(",")[0] for line in lines[2:]}
        assert regions == {"I", "II"}
        # the wall row is present and carries a near-node value
        last = lines[-1].split(",")
        assert float(last[1]) == pytest.approx(1.0)


class TestExitCodeContract:
    def test_usage_error_is_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["solve", "--r0", "1", "--method", "nonsense"])
        assert exc.value.code == EXIT_USAGE

    def test_missing_required_flag_is_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["solve"])
        assert exc.value.code == EXIT_USAGE

    def test_console_entry_help(self):
        proc = subprocess.run(
            [sys.executable, "-m", "qdot.cli", "--help"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "reproduce" in proc.stdout


class TestDeterminism:
    def test_action_bytes_stable(self, capsys):
        args = ("action", "--E", "9.6186", "--r0", "1", "--m", "0", "--coulomb", "1")
        _, first, _ = run_cli(capsys, *args)
        _, second, _ = run_cli(capsys, *args)
        assert first == second

    def test_solve_json_stable(self, capsys):
        args = ("solve", "--r0", "1.5", "--method", "wkb", "--format", "json")
        _, first, _ = run_cli(capsys, *args)
        _, second, _ = run_cli(capsys, *args)
        assert first == second
