import json
import math

import pytest
from click.testing import CliRunner

from hausdorffcs import hausdorff, log
from hausdorffcs.hausdorff import VerificationReport
from hausdorffcs.main import EXIT_ERROR, EXIT_FAILED_CHECK, EXIT_OK, RunConfig, cli, main, run
from hausdorffcs.moments import AsymptoticDescriptor


@pytest.fixture(autouse=True)
def quiet_logger():
    yield
    log.remove()
    log.disable("hausdorffcs")


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(cli, list(args), catch_exceptions=False)


class TestVerify:
    def test_acceptance_run(self, runner):
        result = invoke(
            runner,
            "verify", "--family", "general", "--a", "1", "--nu", "0", "--k", "2", "--l", "1",
            "--nmax", "30", "--tol", "1e-8", "--format", "json",
        )  # fmt: skip
        assert result.exit_code == EXIT_OK
        data = json.loads(result.stdout)
        assert data["pass"] is True
        assert data["max_rel_err"] <= 1e-8
        assert len(data["rows"]) == 31
        report = VerificationReport.from_dict(data)
        assert report.passed

    def test_jsonl(self, runner):
        result = invoke(runner, "verify", "--family", "coulomb-exact", "--nmax", "5", "--format", "jsonl")
        assert result.exit_code == EXIT_OK
        lines = result.stdout.splitlines()
        assert len(lines) == 7
        assert json.loads(lines[0])["tolerance"] == 1e-8
        assert VerificationReport.from_jsonl(result.stdout).to_family().kind == "coulomb-exact"

    def test_csv(self, runner):
        result = invoke(runner, "verify", "--family", "coulomb-alt", "--nmax", "3")
        assert result.exit_code == EXIT_OK
        assert result.stdout.splitlines()[0] == "n,rho_exact,rho_quadrature,abs_err,rel_err"

    def test_failed_verification_exits_two(self, runner, monkeypatch):
        exact = hausdorff.rho
        monkeypatch.setattr(hausdorff, "rho", lambda family, n: 1.1 * exact(family, n))
        result = invoke(runner, "verify", "--family", "coulomb-alt", "--nmax", "3", "--format", "json")
        assert result.exit_code == EXIT_FAILED_CHECK


class TestFigure:
    def test_figure_one_csv(self, runner):
        result = invoke(runner, "figure", "--id", "1", "--grid", "1000", "--format", "csv")
        assert result.exit_code == EXIT_OK
        lines = result.stdout.splitlines()
        assert lines[0] == "y,curve_I,curve_II"
        assert len(lines) == 1001
        assert "\r" not in result.stdout
        y, first, second = (float(v) for v in lines[1].split(","))
        assert y == pytest.approx(1.0 / 1001.0)
        assert first >= 0.0 and second >= 0.0

    def test_figure_four_atoms(self, runner):
        result = invoke(runner, "figure", "--id", "4", "--grid", "100")
        lines = result.stdout.splitlines()
        assert len(lines) == 102
        label, first, second = lines[-1].split(",")
        assert label == "atom"
        assert float(first) == 0.5
        assert float(second) == pytest.approx(math.exp(-1.0))

        data = json.loads(invoke(runner, "figure", "--id", "4", "--grid", "100", "--format", "json").stdout)
        assert data["atoms"] == {"curve_I": 0.5, "curve_II": pytest.approx(math.exp(-1.0))}
        assert len(data["rows"]) == 100
        assert data["families"]["curve_I"] == {"kind": "coulomb-exact"}

    def test_unknown_figure(self, runner):
        assert invoke(runner, "figure", "--id", "7").exit_code == EXIT_ERROR

    def test_error_reported_once(self, runner):
        result = invoke(runner, "figure", "--id", "7")
        assert result.exit_code == EXIT_ERROR
        assert result.stderr.count("Error") == 1

    def test_unwritable_output_reported_once(self, runner, tmp_path):
        result = invoke(runner, "moments", "--nmax", "2", "-o", str(tmp_path / "missing" / "out.csv"))
        assert result.exit_code == EXIT_ERROR
        assert result.stderr.count("Error") == 1
        assert result.stdout == ""

    def test_output_file(self, runner, tmp_path):
        path = tmp_path / "fig3.csv"
        result = invoke(runner, "figure", "--id", "3", "--grid", "100", "-o", str(path))
        assert result.exit_code == EXIT_OK
        assert result.stdout == ""
        assert path.read_text().splitlines()[0] == "y,curve_I,curve_II"

    def test_config_file_grid(self, runner, tmp_path):
        config = tmp_path / "settings.ini"
        config.write_text(
            "[USER]\nclosed_form_tol = 1e-8\ngeneric_tol = 1e-6\nquad_epsrel = 1e-9\ncontour_abscissa = 1.0\n"
            "contour_half_height = 400\ncontour_nodes = 64\ncontour_tol = 1e-10\nseries_tol = 1e-14\n"
            "grid_size = 150\nfit_points = 400\nworkers = 2\n"
        )
        result = invoke(runner, "--config", str(config), "figure", "--id", "3")
        assert result.exit_code == EXIT_OK
        assert len(result.stdout.splitlines()) == 151

    def test_deterministic(self, runner):
        first = invoke(runner, "figure", "--id", "1", "--grid", "100").stdout
        assert invoke(runner, "figure", "--id", "1", "--grid", "100").stdout == first


class TestFamilies:
    def test_fit(self, runner):
        result = invoke(
            runner, "fit", "--family", "general", "--a", "1", "--nu", "0", "--k", "3", "--l", "2",
            "--nmin", "500", "--nmax", "20000", "--format", "json",
        )  # fmt: skip
        assert result.exit_code == EXIT_OK
        data = json.loads(result.stdout)
        assert data["theta"] == pytest.approx(1.0 / 3.0, rel=0.01)
        assert data["c"] == pytest.approx(2.0 / 3.0, rel=0.02)
        assert data["sigma"] == pytest.approx(2.0 / 7.0, rel=0.01)
        assert data["exact_theta"] == pytest.approx(1.0 / 3.0)
        assert AsymptoticDescriptor.from_dict(data).n_max == 20000

    def test_fit_range_error(self, runner):
        assert invoke(runner, "fit", "--nmin", "500", "--nmax", "1000").exit_code == EXIT_ERROR

    def test_moments_with_fraction(self, runner):
        result = invoke(runner, "moments", "--a", "1/2", "--nmax", "3", "--format", "json")
        data = json.loads(result.stdout)
        assert data["family"]["a"] == 0.5
        assert [row["n"] for row in data["rows"]] == [0, 1, 2, 3]
        expected = math.exp(0.5 - 0.5 * math.sqrt(2.0))
        assert data["rows"][1]["rho"] == pytest.approx(expected, rel=1e-13)

    def test_spectrum(self, runner):
        result = invoke(runner, "spectrum", "--family", "coulomb-exact", "--nmax", "2")
        lines = result.stdout.splitlines()
        assert lines[:2] == ["n,e", "0,0"]
        values = [float(line.split(",")[1]) for line in lines[1:]]
        assert values == pytest.approx([0.0, 0.75, 8.0 / 9.0], rel=1e-14)

    def test_weight_with_atom(self, runner):
        result = invoke(runner, "weight", "--family", "coulomb-exact", "--grid", "100")
        lines = result.stdout.splitlines()
        assert lines[0] == "y,density"
        assert lines[-1] == "atom,0.5"
        assert len(lines) == 102

    def test_weight_json(self, runner):
        result = invoke(runner, "weight", "--family", "besselk", "--nu", "4/3", "--grid", "100", "--format", "json")
        data = json.loads(result.stdout)
        assert data["backend"] == "closed-form"
        assert data["family"] == {"kind": "besselk", "nu": pytest.approx(4.0 / 3.0)}
        assert all(row["density"] >= 0.0 for row in data["rows"])

    def test_cs_norm(self, runner):
        result = invoke(runner, "cs-norm", "--family", "coulomb-exact", "--J", "0.9", "--format", "json")
        data = json.loads(result.stdout)
        assert abs(data["action_residual"]) <= 1e-10
        assert data["normalization"] > 1.0

    def test_cs_overlap(self, runner):
        result = invoke(runner, "cs-overlap", "--J", "0.3", "--gamma2", str(math.pi), "--format", "json")
        data = json.loads(result.stdout)
        assert data["J2"] == 0.3
        assert data["abs"] < 1.0
        assert data["abs"] == pytest.approx(math.hypot(data["re"], data["im"]))

    def test_cs_bad_action(self, runner):
        assert invoke(runner, "cs-norm", "--J", "1.5").exit_code == EXIT_ERROR

    def test_quasiclassical(self, runner):
        result = invoke(runner, "quasiclassical", "--sigma", "2/5", "--nmax", "10", "--format", "json")
        data = json.loads(result.stdout)
        assert data["exponent"] == pytest.approx(0.5)
        assert len(data["rows"]) == 11
        assert all(row["energy"] < 0.0 for row in data["rows"])


class TestPositivity:
    def test_negative_nu_fails(self, runner):
        result = invoke(
            runner, "positivity", "--family", "general", "--nu=-1/2", "--allow-negative-nu",
            "--backend", "mellin-barnes",
        )  # fmt: skip
        assert result.exit_code == EXIT_FAILED_CHECK

    def test_negative_nu_needs_waiver(self, runner):
        result = invoke(runner, "positivity", "--nu=-1/2")
        assert result.exit_code == EXIT_ERROR

    def test_closed_form_passes(self, runner):
        result = invoke(runner, "positivity", "--k", "3", "--l", "1", "--format", "json")
        assert result.exit_code == EXIT_OK
        assert json.loads(result.stdout)["pass"] is True


class TestEntryPoint:
    @pytest.mark.parametrize(
        "argv, code",
        [
            (["moments", "--nmax", "2"], EXIT_OK),
            (["figure", "--id", "9"], EXIT_ERROR),
            (["moments", "--bogus"], EXIT_ERROR),
            (["moments", "--nu", "abc"], EXIT_ERROR),
            (["verify", "--k", "1", "--l", "1"], EXIT_ERROR),
        ],
    )
    def test_exit_codes(self, argv, code, capsys):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == code

    def test_version(self, runner):
        result = invoke(runner, "--version")
        assert result.exit_code == EXIT_OK
        assert result.stdout.startswith("hausdorffcs ")
        assert "numpy" in result.stdout and "scipy" in result.stdout

    @pytest.mark.parametrize(
        "kwargs",
        [dict(command="nope"), dict(command="moments", fmt="xml"), dict(command="moments", n_max=-1)],
    )
    def test_run_rejects_invalid_config(self, kwargs):
        assert run(RunConfig(**kwargs)) == EXIT_ERROR

    def test_run_returns_zero(self, capsys):
        assert run(RunConfig(command="moments", family="coulomb-alt", n_max=2)) == EXIT_OK
        assert capsys.readouterr().out.splitlines()[0] == "n,rho"
