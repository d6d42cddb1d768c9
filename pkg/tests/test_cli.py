"""Command line surface: exit codes, JSON/CSV outputs, validation."""

import json

import numpy as np
import pytest

from csreg import simulate, simulation_model
from csreg.cli import dispatch
from csreg.io import read_sample_csv, read_step_csv, write_sample_csv


def run(capsys, *argv):
    code = dispatch(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSimulate:
    def test_writes_csv(self, tmp_path, capsys):
        out = str(tmp_path / "s.csv")
        code, _, _ = run(capsys, "simulate", "--n", "50", "--seed", "7", "--out", out)
        assert code == 0
        sample = read_sample_csv(out)
        assert sample.n == 50

    def test_matches_library_call(self, tmp_path, capsys):
        out = str(tmp_path / "s.csv")
        run(capsys, "simulate", "--n", "30", "--seed", "4", "--out", out)
        direct = simulate(simulation_model(), 30, 4)
        back = read_sample_csv(out)
        assert np.array_equal(back.t, direct.t)
        assert np.array_equal(back.delta, direct.delta)

    def test_rejects_bad_n(self, capsys, tmp_path):
        code, _, _ = run(
            capsys, "simulate", "--n", "0", "--seed", "1", "--out", str(tmp_path / "x.csv")
        )
        assert code == 2


class TestEstimate:
    def test_pipeline_smoke(self, tmp_path, capsys):
        src = str(tmp_path / "s.csv")
        run(capsys, "simulate", "--n", "300", "--seed", "7", "--out", src)
        code, out, _ = run(
            capsys,
            "estimate",
            "--method",
            "score1",
            "--input",
            src,
            "--interval",
            "0.3,0.7",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["schema"] == 1
        assert 0.3 < doc["beta_hat"] < 0.7
        assert doc["alpha_hat"] is not None
        assert doc["method"] == "score1"

    def test_simulated_input_path(self, capsys):
        code, out, _ = run(
            capsys, "estimate", "--method", "plugin", "--n", "300", "--seed", "5"
        )
        assert code == 0
        doc = json.loads(out)
        assert 0.3 < doc["beta_hat"] < 0.7
        assert doc["h_beta"] == 0.5 * 300 ** (-0.2)
        assert doc["diagnostics"]["type"] == "crossing"

    def test_eps_validation(self, capsys):
        code, _, err = run(
            capsys, "estimate", "--method", "score1", "--n", "100", "--eps", "0.7"
        )
        assert code == 2
        assert "eps" in err

    def test_eps_zero_rejected_for_estimation(self, capsys):
        code, _, _ = run(
            capsys, "estimate", "--method", "score1", "--n", "100", "--eps", "0"
        )
        assert code == 2

    def test_requires_some_input(self, capsys):
        code, _, _ = run(capsys, "estimate", "--method", "score1")
        assert code == 2

    def test_degenerate_sample_exit_3(self, tmp_path, capsys):
        s = simulate(simulation_model(), 40, 3)
        from csreg import Sample

        degenerate = Sample(t=s.t, x=s.x, delta=np.zeros(40, dtype=int))
        src = str(tmp_path / "d.csv")
        write_sample_csv(src, degenerate)
        code, _, err = run(capsys, "estimate", "--method", "score1", "--input", src)
        assert code == 3
        assert "estimation failed" in err

    def test_no_intercept_flag(self, capsys):
        code, out, _ = run(
            capsys,
            "estimate",
            "--method",
            "score1",
            "--n",
            "200",
            "--seed",
            "2",
            "--no-intercept",
        )
        assert code == 0
        assert json.loads(out)["alpha_hat"] is None


class TestMLE:
    def test_export_round_trip(self, tmp_path, capsys):
        src = str(tmp_path / "s.csv")
        run(capsys, "simulate", "--n", "120", "--seed", "9", "--out", src)
        out = str(tmp_path / "f.csv")
        code, js, _ = run(capsys, "mle", "--input", src, "--beta", "0.5", "--out", out)
        assert code == 0
        doc = json.loads(js)
        assert doc["n"] == 120
        dist = read_step_csv(out)
        assert np.all(np.diff(dist.values) >= 0)
        assert np.all(np.diff(dist.knots) > 0)
        assert doc["knots"] == dist.knots.size


class TestOracle:
    def test_parametric_information(self, capsys):
        code, out, _ = run(capsys, "oracle", "--quantity", "ip")
        assert code == 0
        doc = json.loads(out)
        assert doc["value"] == pytest.approx(26.3667, abs=0.01)
        assert doc["eps"] == 0.0

    def test_truncated_inverse(self, capsys):
        code, out, _ = run(capsys, "oracle", "--quantity", "ieps", "--eps", "0.001")
        assert code == 0
        assert 1.0 / json.loads(out)["value"] == pytest.approx(0.158699, abs=5e-4)

    def test_popscore_requires_beta(self, capsys):
        code, _, _ = run(capsys, "oracle", "--quantity", "popscore")
        assert code == 2

    def test_popscore_value(self, capsys):
        code, out, _ = run(
            capsys, "oracle", "--quantity", "popscore", "--beta", "0.45"
        )
        assert code == 0
        assert json.loads(out)["value"] == pytest.approx(-0.008328986076, abs=1e-6)

    def test_interceptvar_simple_flag(self, capsys):
        _, out_eff, _ = run(capsys, "oracle", "--quantity", "interceptvar")
        _, out_simple, _ = run(capsys, "oracle", "--quantity", "interceptvar", "--simple")
        assert json.loads(out_simple)["value"] > json.loads(out_eff)["value"]


class TestTables:
    def test_mc_table(self, tmp_path, capsys):
        out = str(tmp_path / "t.csv")
        code, _, _ = run(
            capsys,
            "mc-table",
            "--n",
            "60",
            "--reps",
            "3",
            "--methods",
            "score1",
            "--seed",
            "5",
            "--out",
            out,
        )
        assert code == 0
        with open(out) as fh:
            fh.readline()
            assert fh.readline().strip() == "parameter,method,n,N,mean,n_times_var,failures"

    def test_score_curve(self, tmp_path, capsys):
        src = str(tmp_path / "s.csv")
        run(capsys, "simulate", "--n", "150", "--seed", "3", "--out", src)
        out = str(tmp_path / "sc.csv")
        code, _, _ = run(
            capsys,
            "score-curve",
            "--input",
            src,
            "--score",
            "psi1",
            "--points",
            "7",
            "--out",
            out,
        )
        assert code == 0
        with open(out) as fh:
            fh.readline()
            assert fh.readline().strip() == "beta,psi,method,n_used,n_excluded"
            rows = [line.strip().split(",") for line in fh if line.strip()]
        assert len(rows) == 7
        assert all(r[2] == "psi1" for r in rows)

    def test_bootstrap_bw(self, tmp_path, capsys):
        src = str(tmp_path / "s.csv")
        run(capsys, "simulate", "--n", "100", "--seed", "8", "--out", src)
        out = str(tmp_path / "bw.csv")
        code, js, _ = run(
            capsys,
            "bootstrap-bw",
            "--input",
            src,
            "--c-grid",
            "0.4,0.7",
            "--B",
            "4",
            "--seed",
            "2",
            "--out",
            out,
        )
        assert code == 0
        doc = json.loads(js)
        assert doc["c_opt"] in (0.4, 0.7)
        with open(out) as fh:
            fh.readline()
            assert fh.readline().strip() == "c,mse,kind"

    def test_mse_curve(self, tmp_path, capsys):
        out = str(tmp_path / "mse.csv")
        code, _, _ = run(
            capsys,
            "mse-curve",
            "--n",
            "60",
            "--reps",
            "2",
            "--c-grid",
            "0.5",
            "--seed",
            "3",
            "--out",
            out,
        )
        assert code == 0
        with open(out) as fh:
            fh.readline()
            assert fh.readline().strip() == "c,mse,kind"
            assert fh.readline().strip().endswith("montecarlo")


class TestDispatch:
    def test_unknown_subcommand(self, capsys):
        assert dispatch(["frobnicate"]) == 2
        capsys.readouterr()

    def test_missing_required_flag(self, capsys):
        assert dispatch(["simulate", "--n", "10"]) == 2
        capsys.readouterr()

    def test_interval_parse_error(self, capsys):
        code, _, _ = run(
            capsys,
            "estimate",
            "--method",
            "score1",
            "--n",
            "100",
            "--interval",
            "0.7,0.3",
        )
        assert code == 2
