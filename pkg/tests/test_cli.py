import subprocess
import sys

import numpy as np
import pytest

from pairlotto.cli import main, parse_ticket, UsageError
from pairlotto.salesmodel import POWERBALL_SALES, SalesRecord, tickets_sold, write_sales_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestRankCommands:
    def test_unrank_worked_example(self, capsys):
        code, out, _ = run(capsys, "unrank", "--game", "powerball", "100000000")
        assert code == 0
        assert out.strip() == "25,33,47,51,59 pb 9"

    def test_rank_first(self, capsys):
        code, out, _ = run(capsys, "rank", "--game", "powerball", "1,2,3,4,5", "pb", "1")
        assert (code, out.strip()) == (0, "0")

    def test_roundtrip(self, capsys):
        _, ticket, _ = run(capsys, "unrank", "--game", "megamillions", "123456789")
        code, out, _ = run(capsys, "rank", "--game", "megamillions", *ticket.split())
        assert (code, out.strip()) == (0, "123456789")

    def test_one_past_last_rank(self, capsys):
        code, out, err = run(capsys, "unrank", "--game", "powerball", "292201338")
        assert code == 2 and out == "" and "outside" in err

    def test_malformed_ticket(self, capsys):
        code, _, err = run(capsys, "rank", "1,2,three", "pb", "1")
        assert code == 1 and "malformed" in err

    def test_invalid_ticket(self, capsys):
        code, _, err = run(capsys, "rank", "5,4,3,2,1", "pb", "1")
        assert code == 2 and "increasing" in err

    def test_explicit_shape(self, capsys):
        code, out, _ = run(capsys, "unrank", "--white-max", "10", "--white-count", "3",
                           "--special-max", "4", "479")
        assert (code, out.strip()) == (0, "8,9,10 pb 4")

    def test_bad_shape(self, capsys):
        code, _, err = run(capsys, "unrank", "--white-count", "0", "1")
        assert code == 2

    def test_bad_flag_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["unrank", "--bogus", "1"])
        assert info.value.code == 1

    @pytest.mark.parametrize("text", ["1,2,3,4,5 pb 1", "1, 2, 3, 4, 5 PB 1", "1,2,3,4,5+1", "1,2,3,4,5 mb 1"])
    def test_parse_ticket(self, text):
        t = parse_ticket(text)
        assert t.whites == (1, 2, 3, 4, 5) and t.special == 1

    def test_parse_ticket_rejects(self):
        with pytest.raises(UsageError):
            parse_ticket("1 2 3 4 5 1")


class TestSimulate:
    def test_deterministic_files(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["simulate", "--space-size", "2000", "--trials", "1", "--seed", "7", "--steps", "6"]
        assert run(capsys, *args, "--out", str(a))[0] == 0
        assert run(capsys, *args, "--out", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_schema_and_manifest(self, tmp_path, capsys):
        path = tmp_path / "sim.csv"
        run(capsys, "simulate", "--space-size", "1000", "--trials", "3", "--steps", "3",
            "--seed", "4", "--out", str(path))
        lines = path.read_text().splitlines()
        comments = [l for l in lines if l.startswith("#")]
        assert comments[0] == "# pairlotto simulate"
        assert "# seed: 4" in comments
        assert any('"space_size": 1000' in l for l in comments)
        body = [l for l in lines if not l.startswith("#")]
        assert body[0] == "strategy,k,mean_distinct,stderr,pool_fraction"
        assert len(body) == 1 + 3 * 4
        assert {row.split(",")[0] for row in body[1:]} == {"independent", "central", "pairing"}

    def test_manifest_regenerates_file(self, tmp_path, capsys):
        import json

        first = tmp_path / "first.csv"
        run(capsys, "simulate", "--space-size", "800", "--stores", "5", "--trials", "4",
            "--steps", "5", "--seed", "21", "--strategy", "pairing", "--out", str(first))
        header = first.read_text().splitlines()
        params = json.loads(next(l for l in header if l.startswith("# params:"))[len("# params: "):])
        seed = next(l for l in header if l.startswith("# seed:")).split(": ")[1]
        second = tmp_path / "second.csv"
        run(capsys, "simulate", "--space-size", str(params["space_size"]), "--stores", str(params["stores"]),
            "--trials", str(params["trials"]), "--steps", str(params["steps"]), "--k-max", str(params["k_max"]),
            "--strategy", params["strategy"], "--seed", seed, "--out", str(second))
        assert first.read_bytes() == second.read_bytes()

    def test_central_ends_at_one(self, capsys):
        code, out, _ = run(capsys, "simulate", "--space-size", "1000", "--strategy", "central",
                           "--k-max", "1000", "--steps", "4", "--trials", "2", "--no-manifest")
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("strategy,")
        assert float(lines[-1].split(",")[-1]) == 1.0

    def test_unwritable_output(self, tmp_path, capsys):
        code, _, err = run(capsys, "simulate", "--space-size", "100", "--trials", "1", "--steps", "1",
                           "--out", str(tmp_path / "missing" / "x.csv"))
        assert code == 2 and err

    def test_invalid_flag_value(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["simulate", "--trials", "0"])
        assert info.value.code == 1


class TestAnalyze:
    def test_defaults(self, tmp_path, capsys):
        path = tmp_path / "ev.csv"
        code, out, _ = run(capsys, "analyze", "--out", str(path))
        assert code == 0
        ir = next(l for l in out.splitlines() if l.startswith("IR break-even"))
        cs = next(l for l in out.splitlines() if l.startswith("CS break-even"))
        lo, hi = (float(x) for x in ir.split(": ")[1].split(" million")[0].split(" to "))
        assert lo == pytest.approx(775.2, abs=8) and hi == pytest.approx(1665.6, abs=17)
        lo, hi = (float(x) for x in cs.split(": ")[1].split(" million")[0].split(" to "))
        assert lo == pytest.approx(584.4, abs=0.1) and hi == pytest.approx(1794, abs=18)
        assert "1.25 sqrt(N) = 21367" in out
        rows = [l for l in path.read_text().splitlines() if not l.startswith("#")]
        assert rows[0] == "jackpot_millions,tickets_sold,ev_ir,ev_cs"
        assert len(rows) == 1 + 297
        j, t, ev_ir, ev_cs = (float(x) for x in rows[1].split(","))
        assert j == 40.0 and t == pytest.approx(tickets_sold(POWERBALL_SALES, 40.0))
        assert ev_ir <= ev_cs

    def test_zero_cost(self, capsys):
        code, out, _ = run(capsys, "analyze", "--cost", "0")
        assert code == 0
        assert "IR break-even: none" in out and "CS break-even: none" in out

    def test_bad_coeffs(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["analyze", "--coeffs", "1,2"])
        assert info.value.code == 1
        with pytest.raises(SystemExit):
            main(["analyze", "--coeffs", "a,b,c"])

    def test_custom_coeffs(self, capsys):
        code, out, _ = run(capsys, "analyze", "--coeffs=278.36,-5364.95,10582740.74", "--cost", "2")
        assert code == 0 and "IR break-even: 775.2" in out


class TestFit:
    def test_noiseless(self, tmp_path, capsys):
        path = tmp_path / "sales.csv"
        write_sales_csv(path, [SalesRecord(j, 2 * j * j + 3 * j + 5) for j in range(1, 11)])
        res = tmp_path / "res.csv"
        code, out, _ = run(capsys, "fit", "--input", str(path), "--residuals", str(res))
        assert code == 0
        values = dict(line.split(" = ") for line in out.splitlines())
        assert float(values["a"]) == pytest.approx(2, rel=1e-6)
        assert float(values["b"]) == pytest.approx(3, rel=1e-6)
        assert float(values["c"]) == pytest.approx(5, rel=1e-6)
        assert float(values["r_squared"]) == pytest.approx(1.0)
        rows = [l for l in res.read_text().splitlines() if not l.startswith("#")]
        assert rows[0] == "jackpot_millions,tickets_sold,predicted,residual"
        assert all(abs(float(r.split(",")[3])) < 1e-6 for r in rows[1:])

    def test_noisy_powerball_model(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        j = np.linspace(40, 1600, 50)
        t = tickets_sold(POWERBALL_SALES, j) * (1 + 0.01 * rng.standard_normal(50))
        path = tmp_path / "sales.csv"
        write_sales_csv(path, [SalesRecord(float(a), int(round(b))) for a, b in zip(j, t)])
        code, out, _ = run(capsys, "fit", "--input", str(path))
        values = dict(line.split(" = ") for line in out.splitlines())
        assert code == 0
        assert float(values["a"]) == pytest.approx(POWERBALL_SALES.a, rel=0.05)
        assert float(values["r_squared"]) > 0.99

    def test_two_rows(self, tmp_path, capsys):
        path = tmp_path / "sales.csv"
        path.write_text("jackpot_millions,tickets_sold\n100,5\n200,9\n")
        code, _, err = run(capsys, "fit", "--input", str(path))
        assert code == 2 and "distinct" in err

    def test_schema_error_reports_line(self, tmp_path, capsys):
        path = tmp_path / "sales.csv"
        path.write_text("jackpot_millions,tickets_sold\n100,5\n200,x\n300,7\n")
        code, _, err = run(capsys, "fit", "--input", str(path))
        assert code == 2 and "line 3" in err

    def test_missing_file(self, tmp_path, capsys):
        code, _, _ = run(capsys, "fit", "--input", str(tmp_path / "nope.csv"))
        assert code == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "pairlotto", "unrank", "0"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "1,2,3,4,5 pb 1"
