import csv
import io
import math

import pytest

from ncluster.cli import SweepConfig, fmt, parse_grid, run


def invoke(argv, capsys):
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# ncluster ")
    body = [l for l in lines[1:] if not l.startswith("#")]
    rows = list(csv.reader(io.StringIO("\n".join(body))))
    return lines[0], rows[0], rows[1:]


class TestHelpers:
    def test_parse_grid(self):
        assert parse_grid("0:1:3") == [0.0, 0.5, 1.0]
        assert parse_grid("0.25") == [0.25]
        assert parse_grid("pi/4") == [math.pi / 4]
        assert parse_grid("0:1:3").text == "0:1:3"

    @pytest.mark.parametrize("bad", ["0:1", "a:b:3", "0:1:0", ""])
    def test_parse_grid_rejects(self, bad):
        import argparse

        with pytest.raises(argparse.ArgumentTypeError):
            parse_grid(bad)

    def test_fmt(self):
        assert fmt(1 / 3) == "0.333333333333"
        assert fmt(-0.0) == "0"
        assert fmt(True) == "1"
        assert fmt(float("nan")) == "nan"
        assert fmt(7) == "7"


class TestCommands:
    def test_energy_scan(self, capsys):
        code, out, _ = invoke(["energy-scan", "--n", "1", "--phi", "0.6:0.95:36", "--h", "1e-3"], capsys)
        assert code == 0
        _, header, rows = parse_csv(out)
        assert header == ["phi", "d2E"]
        assert len(rows) == 36
        peak = max(rows, key=lambda r: abs(float(r[1])))
        assert abs(float(peak[0]) - math.pi / 4) <= 0.01 + 1e-12

    def test_order_param_columns(self, capsys):
        code, out, _ = invoke(["order-param", "--n", "3", "--phi", "0:0.6:4", "--rmax", "96"], capsys)
        assert code == 0
        _, header, rows = parse_csv(out)
        assert header[:3] == ["phi", "numeric", "closed_form"]
        for row in rows:
            assert float(row[1]) == pytest.approx(float(row[2]), rel=1e-2)

    def test_correlators(self, capsys):
        code, out, _ = invoke(["correlators", "--n", "1", "--phi", "pi/2", "--r", "1", "2"], capsys)
        assert code == 0
        _, header, rows = parse_csv(out)
        assert header == ["n", "phi", "r", "G_r", "sigma_z", "zz", "xx", "yy"]
        assert float(rows[0][4]) == -1.0
        code, out, _ = invoke(["correlators", "--n", "1", "--phi", "pi/2", "--r", "1", "--fermionic"], capsys)
        assert float(parse_csv(out)[2][0][4]) == 1.0

    def test_cluster_corr_default_separations(self, capsys):
        code, out, _ = invoke(["cluster-corr", "--n", "1", "2", "--phi", "0.3"], capsys)
        assert code == 0
        _, header, rows = parse_csv(out)
        assert [int(r[2]) for r in rows] == [3, 6, 9, 12, 15] * 2

    def test_concurrence(self, capsys):
        code, out, _ = invoke(["concurrence", "--n", "2", "--phi", "0.9", "pi/2"], capsys)
        assert code == 0
        _, header, rows = parse_csv(out)
        assert header == ["n", "phi", "r", "concurrence"]
        assert float(rows[0][3]) > 0 and abs(float(rows[1][3])) < 1e-12

    def test_entropy_fit(self, capsys):
        code, out, _ = invoke(["entropy", "--n", "1", "--m", "8:64:8", "--fit"], capsys)
        assert code == 0
        fit = [l for l in out.splitlines() if l.startswith("# fit")]
        assert len(fit) == 1
        c_hat = float(fit[0].split("c_hat=")[1].split()[0])
        assert c_hat == pytest.approx(1.0, rel=0.1)

    def test_oracle_compare(self, capsys):
        code, out, _ = invoke(["oracle-compare", "--n", "1", "--sites", "10", "--phi", "1.2", "--random", "20"], capsys)
        assert code == 0
        _, header, rows = parse_csv(out)
        classes = {r[3] for r in rows}
        assert {"energy_per_site", "sigma_z", "random_pauli"} <= classes
        rand = next(r for r in rows if r[3] == "random_pauli")
        assert float(rand[6]) < 1e-8

    def test_output_file(self, tmp_path, capsys):
        path = tmp_path / "out.csv"
        code, out, _ = invoke(["concurrence", "--n", "1", "--phi", "0.9", "-o", str(path)], capsys)
        assert code == 0 and out == ""
        data = path.read_bytes()
        assert b"\r\n" not in data and data.startswith(b"# ncluster concurrence")


class TestReproducibility:
    ARGV = ["correlators", "--n", "1", "2", "--phi", "0.2:1.2:5", "--r", "1", "3"]

    def test_byte_identical(self, capsys):
        _, a, _ = invoke(self.ARGV, capsys)
        _, b, _ = invoke(self.ARGV, capsys)
        assert a == b

    @pytest.mark.parametrize(
        "argv",
        [
            ARGV,
            ["entropy", "--n", "0", "--phi", "0.5", "--m", "1:4:4"],
            ["order-param", "--n", "1", "--phi", "0.2", "--rmax", "40", "--panels", "40"],
            ["cluster-corr", "--n", "1", "--phi", "0.4", "--r", "2"],
            ["correlators", "--n", "1", "--phi", "0.4", "--r", "2", "--fermionic"],
        ],
    )
    def test_comment_round_trip(self, argv, capsys):
        _, out, _ = invoke(argv, capsys)
        comment = out.splitlines()[0]
        cfg = SweepConfig.from_comment(comment)
        assert cfg.comment() == comment
        _, again, _ = invoke(cfg.argv(), capsys)
        assert again == out


class TestErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["bogus"],
            ["correlators", "--n", "1", "--phi", "0.3"],
            ["correlators", "--n", "-1", "--phi", "0.3", "--r", "1"],
            ["order-param", "--n", "1", "--phi", "2.0"],
            ["order-param", "--n", "1", "--phi", "0.3", "--rmax", "4"],
            ["beta-fit", "--n", "1", "--dmin", "0.1", "--dmax", "0.01"],
            ["entropy", "--n", "1", "--m", "2:4:3", "--fit"],
        ],
    )
    def test_bad_arguments_exit_1(self, argv, capsys):
        code, _, err = invoke(argv, capsys)
        assert code == 1
        assert "error" in err

    def test_unwritable_output(self, capsys):
        code, _, _ = invoke(["concurrence", "--n", "1", "--phi", "0.9", "-o", "/nonexistent/dir/x.csv"], capsys)
        assert code == 1

    def test_numerical_failure_exit_2(self, capsys):
        code, _, err = invoke(["order-param", "--n", "1", "--phi", "pi/4"], capsys)
        assert code == 2
        assert "n=1" in err and "phi=0.785398" in err

    def test_zero_mode_exit_2(self, capsys):
        code, _, err = invoke(["oracle-compare", "--n", "1", "--sites", "10", "--phi", "pi/4", "--random", "2"], capsys)
        assert code == 2
        assert "N=10" in err
