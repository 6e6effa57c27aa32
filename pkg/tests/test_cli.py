import math

import pytest

from eatcert import cli
from eatcert.cli import UsageError, _parse_grid, main
from eatcert.devices import ideal_device, serialize_device
from eatcert.protocol import parse_transcript
from eatcert.verify import SuiteReport

PARAMS = """\
n = 2000
gamma = 0.5
beta = 0.045
eps_s = 1e-5
p_omega = 1e-5
omega_exp = 0.95
delta_est = 0.02
omega_0 = 0.95
"""


def write_inputs(tmp_path, device=None):
    dev = tmp_path / "device.txt"
    dev.write_text(serialize_device(device or ideal_device()))
    par = tmp_path / "params.txt"
    par.write_text(PARAMS)
    return str(dev), str(par)


def read_rows(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


class TestParseGrid:
    def test_inclusive_endpoints(self):
        assert _parse_grid("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]

    def test_final_point_clamped(self):
        grid = _parse_grid("0.9995:1.0:0.0001")
        assert grid[-1] == 1.0
        assert len(grid) == 6

    def test_bad_specs(self):
        for spec in ("0:1", "a:b:c", "1:0:0.1", "0:1:0"):
            with pytest.raises(UsageError):
                _parse_grid(spec)


class TestExitCodes:
    def test_bad_flag_is_usage_error(self, capsys):
        assert main(["bound", "--nope"]) == 1

    def test_missing_subcommand(self, capsys):
        assert main([]) == 1

    def test_missing_device_file(self, tmp_path, capsys):
        _, par = write_inputs(tmp_path)
        code = main(
            ["simulate", "--device-file", str(tmp_path / "none.txt"),
             "--params", par, "--out", str(tmp_path / "t.txt")]
        )
        assert code == 1

    def test_unknown_param_key(self, tmp_path, capsys):
        dev, _ = write_inputs(tmp_path)
        bad = tmp_path / "params.txt"
        bad.write_text(PARAMS + "bogus = 1\n")
        code = main(
            ["simulate", "--device-file", dev, "--params", str(bad),
             "--out", str(tmp_path / "t.txt")]
        )
        assert code == 1

    def test_verify_failure_is_code_2(self, monkeypatch, capsys):
        monkeypatch.setattr(
            cli,
            "run_suite",
            lambda name, trials, seed: SuiteReport(name, trials, False, -1.0, "bad"),
        )
        assert main(["verify", "--suite", "jordan", "--trials", "5"]) == 2

    def test_verify_pass_is_code_0(self, capsys):
        assert main(["verify", "--suite", "jordan", "--trials", "3"]) == 0

    def test_zero_trials_warns_but_passes(self, capsys):
        assert main(["verify", "--suite", "tradeoff", "--trials", "0"]) == 0
        assert "vacuous" in capsys.readouterr().err


class TestBoundCommand:
    def test_values_and_determinism(self, tmp_path, capsys):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["bound", "--beta", "0.045", "--omega-grid", "0.5:1.0:0.1"]
        assert main(argv + ["--out", str(out1)]) == 0
        assert main(argv + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        header, rows = read_rows(out1)
        assert header == ["omega", "bound"]
        assert float(rows[0][1]) == 0.0
        assert float(rows[-1][1]) >= 0.999

    def test_grid_matches_request(self, tmp_path, capsys):
        out = tmp_path / "a.csv"
        assert main(["bound", "--beta", "0.045", "--omega-grid", "0:1:0.5",
                     "--out", str(out)]) == 0
        _, rows = read_rows(out)
        assert [float(r[0]) for r in rows] == [0.0, 0.5, 1.0]


class TestBound2dCommand:
    def test_corner_values(self, tmp_path, capsys):
        out = tmp_path / "b2.csv"
        assert main(["bound2d", "--grid", "0.5:1.0:0.25", "--out", str(out)]) == 0
        header, rows = read_rows(out)
        assert header == ["omega_p", "omega_m", "bound"]
        table = {(r[0], r[1]): float(r[2]) for r in rows}
        assert table[("1.0", "1.0")] >= 0.999
        assert table[("0.5", "0.5")] == 0.0
        assert len(rows) == 9


class TestRateCommand:
    def test_finite_n_dominated_by_infinite(self, tmp_path, capsys):
        out = tmp_path / "r.csv"
        assert main(
            ["rate", "--n", "1e8,inf", "--gamma", "1.0",
             "--omega-grid", "0.999:1.0:0.0005", "--out", str(out)]
        ) == 0
        header, rows = read_rows(out)
        assert header == ["n", "omega", "rate"]
        finite = {r[1]: float(r[2]) for r in rows if r[0] != "inf"}
        infinite = {r[1]: float(r[2]) for r in rows if r[0] == "inf"}
        assert set(finite) == set(infinite)
        for omega, rate in finite.items():
            assert rate <= infinite[omega] + 1e-12
        assert infinite[max(infinite)] > 0.98

    def test_deterministic(self, tmp_path, capsys):
        argv = ["rate", "--n", "1e10", "--omega-grid", "0.99:1.0:0.005"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestSimulateCommand:
    def test_honest_run(self, tmp_path, capsys):
        dev, par = write_inputs(tmp_path)
        out = tmp_path / "t.txt"
        code = main(["simulate", "--device-file", dev, "--params", par,
                     "--seed", "3", "--out", str(out)])
        assert code == 0
        summary = capsys.readouterr().out
        assert "aborted=false" in summary
        assert "generation_rounds=" in summary
        tr = parse_transcript(out.read_text())
        assert len(tr.rounds) == 2000
        assert not tr.aborted

    def test_abort_still_exit_zero(self, tmp_path, capsys):
        dev = tmp_path / "dead.txt"
        dev.write_text("blocks = 0\njunk_weight = 1.0\n")
        _, par = write_inputs(tmp_path)
        out = tmp_path / "t.txt"
        code = main(["simulate", "--device-file", str(dev), "--params", par,
                     "--out", str(out)])
        assert code == 0
        summary = capsys.readouterr().out
        assert "aborted=true" in summary
        assert "certified_entropy=0.0" in summary

    def test_deterministic_transcripts(self, tmp_path, capsys):
        dev, par = write_inputs(tmp_path)
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        for out in (a, b):
            assert main(["simulate", "--device-file", dev, "--params", par,
                         "--seed", "9", "--out", str(out)]) == 0
        assert a.read_bytes() == b.read_bytes()
