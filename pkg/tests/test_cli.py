import json
import math

import numpy as np
import pytest

from scatmap.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestRegime:
    @pytest.mark.parametrize("a10,expected", [
        ("0.6", "single"), ("0.9", "tangency"), ("1.5", "holes"),
    ])
    def test_examples(self, capsys, a10, expected):
        code, out, _ = run(capsys, "regime", "--a10", a10, "--a01", "1")
        assert code == 0
        assert json.loads(out)["regime"] == expected

    def test_mu_flag(self, capsys):
        code, out, _ = run(capsys, "regime", "--mu", "0.9")
        assert code == 0
        assert json.loads(out)["mu"] == pytest.approx(0.9)


class TestCrests:
    def test_horizontal_csv(self, capsys):
        code, out, _ = run(capsys, "crests", "--mu", "0.6", "--I", "1.2",
                           "--grid", "16")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "branch,phi,s,residual"
        assert len(lines) == 1 + 32
        residuals = [abs(float(l.split(",")[3])) for l in lines[1:]]
        assert max(residuals) <= 1e-12

    def test_vertical_csv(self, capsys):
        code, out, _ = run(capsys, "crests", "--mu", "1.2", "--I", "1",
                           "--grid", "8")
        assert code == 0
        assert max(abs(float(l.split(",")[3]))
                   for l in out.strip().splitlines()[1:]) <= 1e-12


class TestPortrait:
    def test_grid_symmetry_and_header(self, capsys):
        code, out, _ = run(capsys, "portrait", "--mu", "0.6", "--grid", "21",
                           "--imin", "-1", "--imax", "1")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "I,theta,value"
        rows = [tuple(map(float, l.split(","))) for l in lines[1:]]
        table = {(round(i, 9), round(t, 9)): v for i, t, v in rows}
        for (i, t), v in table.items():
            assert table[(round(-i, 9), t)] == pytest.approx(v, abs=1e-9)

    def test_holes_flagged_nan(self, capsys):
        code, out, _ = run(capsys, "portrait", "--mu", "1.5", "--grid", "31",
                           "--imin", "0.6", "--imax", "1.4")
        assert code == 0
        values = [l.split(",")[2] for l in out.strip().splitlines()[1:]]
        assert any(v == "nan" for v in values)

    def test_contours_emitted(self, tmp_path, capsys):
        out_file = tmp_path / "portrait.csv"
        code, _, _ = run(capsys, "portrait", "--mu", "0.6", "--grid", "41",
                         "--imin", "-2", "--imax", "2", "--nlevels", "3",
                         "--out", str(out_file))
        assert code == 0
        assert out_file.exists()
        contours = tmp_path / "portrait.contours.csv"
        assert contours.exists()
        header = contours.read_text().splitlines()[0]
        assert header == "level,polyline,vertex,I,theta"


class TestHighways:
    def test_csv_residuals(self, capsys):
        code, out, _ = run(capsys, "highways", "--mu", "0.6", "--imin", "-2",
                           "--imax", "2", "--step", "0.1", "--side", "right")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "side,I,theta,psi,residual"
        assert max(abs(float(l.split(",")[4])) for l in lines[1:]) <= 1e-10

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "highways", "--mu", "0.6", "--imin", "0",
                           "--imax", "1", "--step", "0.5", "--side", "right",
                           "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert len(doc["highways"]) == 3
        assert set(doc["highways"][0]) == {"side", "I", "theta", "psi", "residual"}

    def test_breakage_is_numeric_failure(self, capsys):
        code, _, err = run(capsys, "highways", "--mu", "1.5", "--imin", "0",
                           "--imax", "2", "--step", "0.1", "--side", "right")
        assert code == 1
        assert "numeric failure" in err


class TestTangency:
    def test_single_action(self, capsys):
        code, out, _ = run(capsys, "tangency", "--mu", "0.9", "--I", "1.5")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "I,psi1,psi2,theta1,theta2"
        _, psi1, psi2, th1, th2 = map(float, lines[1].split(","))
        assert psi2 == pytest.approx(2 * math.pi - psi1, abs=1e-12)
        assert th1 >= th2

    def test_empty_when_transversal(self, capsys):
        code, out, _ = run(capsys, "tangency", "--mu", "0.5", "--imin", "0.1",
                           "--imax", "3", "--grid", "20")
        assert code == 0
        assert len(out.strip().splitlines()) == 1  # header only


class TestOrbit:
    def test_short_highway_run(self, capsys):
        code, out, _ = run(capsys, "orbit", "--mu", "0.6", "--eps", "0.05",
                           "--ifrom", "-1", "--ito", "1")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "leg,mechanism,I,theta,model_time"
        last = lines[-1].split(",")
        assert float(last[2]) >= 1.0

    def test_zero_eps_is_numeric_failure(self, capsys):
        code, _, err = run(capsys, "orbit", "--mu", "0.6", "--eps", "0",
                           "--ifrom", "-1", "--ito", "1")
        assert code == 1


class TestDifftime:
    def test_json_fields(self, capsys):
        code, out, _ = run(capsys, "difftime", "--mu", "0.6", "--eps", "0.01",
                           "--Istar", "2")
        assert code == 0
        doc = json.loads(out)
        assert doc["Td"] == pytest.approx(
            doc["Ns"] * doc["Th"] + (doc["Ns"] // doc["Nss"]) * doc["Ti"])

    def test_zero_eps_is_config_error(self, capsys):
        code, _, err = run(capsys, "difftime", "--eps", "0")
        assert code == 2
        assert "configuration error" in err


class TestEpsstar:
    def test_value(self, capsys):
        code, out, _ = run(capsys, "epsstar", "--mu", "0.9", "--Istar", "4",
                           "--grid", "401")
        assert code == 0
        doc = json.loads(out)
        assert doc["eps_star"] == pytest.approx(0.0837, abs=2e-3)
        assert doc["eps_star"] < doc["envelope"]


class TestVerifyCommand:
    def test_fast_suite_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--fast", "--mu", "0.6")
        assert code == 0
        assert "[PASS]" in out
        assert "[FAIL]" not in out


class TestConfigPrecedence:
    def test_file_then_flags(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# sample\na10 = 0.9\na01 = 1.0\n")
        code, out, _ = run(capsys, "regime", "--config", str(cfg))
        assert code == 0
        assert json.loads(out)["regime"] == "tangency"
        # flag wins over file
        code, out, _ = run(capsys, "regime", "--config", str(cfg), "--a10", "0.5")
        assert json.loads(out)["regime"] == "single"

    def test_missing_config_is_config_error(self, capsys):
        code, _, err = run(capsys, "regime", "--config", "/nonexistent.cfg")
        assert code == 2


class TestDeterminism:
    def test_byte_stable(self, capsys):
        argv = ["portrait", "--mu", "0.6", "--grid", "15", "--imin", "-1",
                "--imax", "1", "--nlevels", "2"]
        _, out1, _ = run(capsys, *argv)
        _, out2, _ = run(capsys, *argv)
        assert out1 == out2

    def test_seventeen_digit_floats(self, capsys):
        _, out, _ = run(capsys, "highways", "--mu", "0.6", "--imin", "0",
                        "--imax", "0.2", "--step", "0.1", "--side", "right")
        sample = out.strip().splitlines()[2].split(",")[3]
        assert len(sample.replace(".", "").replace("-", "").lstrip("0")) >= 15
