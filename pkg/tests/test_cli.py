import csv
import io
import json

import pytest

from hyperqnd import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestEpp:
    def test_point_08(self, capsys):
        code, out, err = run(capsys, "epp", "--f1", "0.8", "--n", "2")
        assert code == 0 and err == ""
        table = rows(out)
        assert list(table[0]) == cli.COLUMNS["epp"]
        assert float(table[2]["F_prime"]) == pytest.approx((256 / 257) ** 2, abs=1e-12)

    def test_perfect_input(self, capsys):
        _, out, _ = run(capsys, "epp", "--f1", "1.0", "--n", "4")
        assert {float(r["F_prime"]) for r in rows(out)} == {1.0}

    def test_grid_is_increasing(self, capsys):
        _, out, _ = run(capsys, "epp", "--f-grid", "0.6", "--n", "5")
        fp = [float(r["F_prime"]) for r in rows(out)]
        assert all(b > a for a, b in zip(fp, fp[1:]))

    def test_monte_carlo_columns(self, capsys):
        _, out, _ = run(capsys, "epp", "--n", "1", "--shots", "2000", "--seed", "1")
        assert list(rows(out)[0])[-2:] == cli.MC_COLUMNS


class TestEcp:
    def test_reference_amplitude(self, capsys):
        _, out, _ = run(capsys, "ecp", "--two-alpha-sq", "0.9", "--n", "5")
        table = rows(out)
        assert float(table[0]["P_cumulative"]) == pytest.approx(0.245025, abs=1e-12)
        assert float(table[-1]["P_cumulative"]) == pytest.approx(0.808, abs=2e-3)

    def test_maximal_input(self, capsys):
        _, out, _ = run(capsys, "ecp", "--two-alpha-sq", "1.0", "--n", "8")
        cum = [float(r["P_cumulative"]) for r in rows(out)]
        assert cum[0] == pytest.approx(0.25)
        assert all(b > a for a, b in zip(cum, cum[1:]))

    def test_default_grid(self, capsys):
        _, out, _ = run(capsys, "ecp", "--n", "1")
        assert len(rows(out)) == 20


class TestQnd:
    def test_reference_point(self, capsys):
        _, out, _ = run(capsys, "qnd-fidelity")
        (row,) = rows(out)
        assert 0.970 <= float(row["F_P"]) <= 0.972
        assert 0.985 <= float(row["F_S"]) <= 0.987

    def test_near_ideal(self, capsys):
        # kappa = 0 and 4 g^2 = 400 eta gamma
        g = (100 * 10 * 0.015) ** 0.5
        _, out, _ = run(capsys, "qnd-fidelity", "--g", str(g), "--kappa", "0")
        (row,) = rows(out)
        assert float(row["F_P"]) > 0.999 and float(row["F_S"]) > 0.999

    def test_uncoupled_row(self, capsys):
        # r = r0 = -9/11: P and S by direct substitution
        _, out, _ = run(capsys, "qnd-fidelity", "--g", "0", "--format", "json")
        (row,) = json.loads(out)
        a = 9 / 11
        p = (2 * a * a + 2) ** 2 * (2 * a + 2) ** 2 / (16 * (2 * a**4 + 2) * (2 * a * a + 2))
        s = (0.5 + 0.5) * (2 * a + 2) ** 2 / (4 * (2 * a * a + 2))
        assert row["abs_r"] == row["abs_r0"] == pytest.approx(a, abs=1e-15)
        assert row["F_P"] == pytest.approx(p, abs=1e-14)
        assert row["F_S"] == pytest.approx(s, abs=1e-14)

    def test_grid(self, capsys):
        _, out, _ = run(capsys, "qnd-fidelity", "--g", "0.5,1,2", "--kappa", "0,1")
        assert len(rows(out)) == 6


class TestReflectionSweep:
    def test_resonance_reference(self, capsys):
        _, out, _ = run(capsys, "reflection-sweep", "--detuning-min", "0", "--detuning-max", "0", "--points", "1")
        (row,) = rows(out)
        assert float(row["abs_r"]) == pytest.approx(0.9280, abs=5e-5)

    def test_bare_cavity(self, capsys):
        _, out, _ = run(capsys, "reflection-sweep", "--g", "0", "--kappa", "0",
                        "--detuning-min", "0", "--detuning-max", "0", "--points", "1")
        (row,) = rows(out)
        assert (float(row["re_r"]), float(row["im_r"])) == (-1.0, 0.0)

    def test_bounded(self, capsys):
        _, out, _ = run(capsys, "reflection-sweep", "--points", "101", "--detuning-min", "-100",
                        "--detuning-max", "100")
        assert all(float(r["abs_r"]) <= 1 + 1e-9 for r in rows(out))


class TestConfig:
    def test_file_and_flag_precedence(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# purification\nf1 = 0.7\nn = 1\n")
        _, out, _ = run(capsys, "epp", "--config", str(cfg))
        assert float(rows(out)[0]["F1"]) == 0.7
        _, out, _ = run(capsys, "epp", "--config", str(cfg), "--f1", "0.9")
        assert float(rows(out)[0]["F1"]) == 0.9

    def test_unknown_key_in_file(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("alpha = 0.3\n")
        code, out, err = run(capsys, "epp", "--config", str(cfg))
        assert code == 2 and out == "" and "alpha" in err

    def test_malformed_line(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("f1 0.3\n")
        assert run(capsys, "epp", "--config", str(cfg))[0] == 2

    def test_missing_file(self, tmp_path, capsys):
        assert run(capsys, "epp", "--config", str(tmp_path / "nope.cfg"))[0] == 2

    def test_seed_required_with_shots(self, capsys):
        code, out, err = run(capsys, "ecp", "--shots", "10")
        assert code == 2 and out == "" and "seed" in err

    @pytest.mark.parametrize("argv", [["epp", "--f1", "1.5"], ["epp", "--n", "-1"],
                                      ["ecp", "--two-alpha-sq", ""], ["epp", "--format", "xml"],
                                      ["qnd-fidelity", "--eta", "abc"]])
    def test_invalid_values(self, capsys, argv):
        code, out, _ = run(capsys, *argv)
        assert code == 2 and out == ""

    def test_unknown_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["epp", "--bogus", "1"])
        assert exc.value.code == 2

    def test_domain_error_exit_code(self, capsys):
        code, out, err = run(capsys, "qnd-fidelity", "--g", "0", "--kappa", "0", "--gamma", "0", "--eta", "0")
        assert code == 3 and out == "" and "domain" in err

    def test_range_grid(self):
        assert cli._grid("0.1:0.3:0.1") == [0.1, 0.2, 0.3]


class TestOutput:
    def test_file_output_is_deterministic(self, tmp_path, capsys):
        for cmd in (["epp"], ["ecp"], ["qnd-fidelity"]):
            a, b = tmp_path / "a.csv", tmp_path / "b.csv"
            assert run(capsys, *cmd, "--out", str(a))[0] == 0
            assert run(capsys, *cmd, "--out", str(b))[0] == 0
            assert a.read_bytes() == b.read_bytes()

    def test_output_dir_env(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path))
        assert run(capsys, "qnd-fidelity", "--out", "q.json", "--format", "json")[0] == 0
        data = json.loads((tmp_path / "q.json").read_text())
        assert list(data[0]) == cli.COLUMNS["qnd-fidelity"]

    def test_precision(self, capsys):
        _, out, _ = run(capsys, "qnd-fidelity")
        digits = rows(out)[0]["F_P"].lstrip("0.").replace(".", "")
        assert len(digits) >= 12
