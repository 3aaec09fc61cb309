"""
HausdorffCS
Copyright (C) 2026 HausdorffCS developers

This program is free software: you can redistribute it and/or modify
it under the terms of the GNU General Public License as published by
the Free Software Foundation, either version 3 of the License, or
(at your option) any later version.

This program is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU General Public License for more details.

You should have received a copy of the GNU General Public License
along with this program.  If not, see <https://www.gnu.org/licenses/>.
"""

import sys
from dataclasses import dataclass, field
from typing import Optional

import click
import numpy as np

from hausdorffcs import log
from hausdorffcs.errors import HausdorffError
from hausdorffcs.meijer import ContourConfig
from hausdorffcs.moments import (
    FAMILY_KINDS,
    BesselK,
    GeneralPower,
    MomentFamily,
    fit_asymptotics,
    leading_asymptotics,
    rho,
    spectrum,
)
from hausdorffcs.quicknumbers import parse_fraction
from hausdorffcs.reports import FORMATS, render_table, save_text, to_json
from hausdorffcs.settings import Settings, load_settings
from hausdorffcs.version import __version__, version_message

COMMANDS = (
    "moments",
    "spectrum",
    "fit",
    "weight",
    "verify",
    "cs-norm",
    "cs-overlap",
    "figure",
    "quasiclassical",
    "positivity",
)
BACKENDS = ("closed-form", "mellin-barnes", "convolution")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED_CHECK = 2


@dataclass
class RunConfig:
    command: str
    family: str = "general"
    a: float = 1.0
    nu: Optional[float] = None
    k: int = 2
    l: int = 1  # noqa: E741
    allow_negative_nu: bool = False
    n_min: int = 500
    n_max: int = 30
    tol: Optional[float] = None
    grid: Optional[int] = None
    J: float = 0.5
    gamma: float = 0.0
    J2: Optional[float] = None
    gamma2: float = 0.0
    sigma: float = 1.0
    v0: float = 1.0
    mass: float = 1.0
    backend: str = "closed-form"
    figure_id: int = 1
    fmt: str = "csv"
    out: Optional[str] = None
    settings: Settings = field(default_factory=Settings)

    def validate(self) -> Optional[MomentFamily]:
        """Check the options and build the selected moment family; raises before any computation starts."""
        if self.command not in COMMANDS:
            raise click.UsageError(f"unknown command {self.command!r}")
        if self.fmt not in FORMATS:
            raise click.UsageError(f"--format must be one of {FORMATS}, got {self.fmt!r}")
        if self.backend not in BACKENDS:
            raise click.UsageError(f"--backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.n_max < 0:
            raise click.UsageError(f"--nmax must be >= 0, got {self.n_max}")
        # these two take no family options
        if self.command in ("figure", "quasiclassical"):
            return None
        return self.build_family()

    def build_family(self) -> MomentFamily:
        if self.family not in FAMILY_KINDS:
            raise click.UsageError(f"--family must be one of {sorted(FAMILY_KINDS)}, got {self.family!r}")
        if self.family == "general":
            nu = 0.0 if self.nu is None else self.nu
            return GeneralPower(a=self.a, nu=nu, k=self.k, l=self.l, allow_negative_nu=self.allow_negative_nu)
        if self.family == "besselk":
            return BesselK() if self.nu is None else BesselK(nu=self.nu)
        return FAMILY_KINDS[self.family]()

    def contour(self) -> ContourConfig:
        s = self.settings
        return ContourConfig(
            abscissa=s.contour_abscissa, half_height=s.contour_half_height, nodes=s.contour_nodes, tol=s.contour_tol
        )

    @property
    def grid_size(self) -> int:
        return self.settings.grid_size if self.grid is None else self.grid


def _emit(config: RunConfig, text: str):
    if config.out:
        save_text(text, config.out)
    else:
        click.echo(text, nl=False)


def _indexed_table(config: RunConfig, family: MomentFamily, name: str, values) -> str:
    n = np.arange(config.n_max + 1)
    rows = zip(n.tolist(), np.atleast_1d(values).tolist())
    return render_table(config.fmt, ("n", name), rows, {"family": family.to_dict()})


def _run_moments(config: RunConfig, family: MomentFamily) -> int:
    _emit(config, _indexed_table(config, family, "rho", rho(family, np.arange(config.n_max + 1))))
    return EXIT_OK


def _run_spectrum(config: RunConfig, family: MomentFamily) -> int:
    _emit(config, _indexed_table(config, family, "e", spectrum(family, np.arange(config.n_max + 1))))
    return EXIT_OK


def _run_fit(config: RunConfig, family: MomentFamily) -> int:
    fitted = fit_asymptotics(family, config.n_min, config.n_max, config.settings.fit_points)
    exact = leading_asymptotics(family)
    payload = {**fitted.to_dict(), "family": family.to_dict(), "exact_theta": exact.theta, "exact_c": exact.c}
    if config.fmt == "json":
        _emit(config, to_json(payload))
    else:
        columns = tuple(fitted.to_dict())
        _emit(config, render_table(config.fmt, columns, [tuple(fitted.to_dict().values())]))
    return EXIT_OK


def _run_weight(config: RunConfig, family: MomentFamily) -> int:
    from hausdorffcs.weights import WeightFunction

    wf = WeightFunction(family, config.backend, config.contour())
    y = np.arange(1, config.grid_size + 1) / (config.grid_size + 1.0)
    rows = list(zip(y.tolist(), np.asarray(wf.density(y)).tolist()))
    header = {"family": family.to_dict(), "backend": wf.backend.value, "atom_at_one": wf.atom_at_one}
    if config.fmt == "csv" and wf.atom_at_one:
        rows.append(("atom", wf.atom_at_one))
    _emit(config, render_table(config.fmt, ("y", "density"), rows, header))
    return EXIT_OK


def _run_verify(config: RunConfig, family: MomentFamily) -> int:
    from hausdorffcs.hausdorff import verify_family
    from hausdorffcs.weights import has_closed_form

    s = config.settings
    tol = config.tol
    if tol is None:
        # closed-form weights are held to the tighter tolerance
        closed = config.backend == "closed-form" and has_closed_form(family)
        tol = s.closed_form_tol if closed else s.generic_tol
    report = verify_family(
        family,
        config.n_max,
        tol=tol,
        backend=config.backend,
        workers=s.workers,
        contour=config.contour(),
        epsrel=s.quad_epsrel,
    )
    if config.fmt == "json":
        text = report.to_json() + "\n"
    elif config.fmt == "jsonl":
        text = report.to_jsonl()
    else:
        columns = ("n", "rho_exact", "rho_quadrature", "abs_err", "rel_err")
        text = render_table("csv", columns, [tuple(row.to_dict().values()) for row in report.rows])
    _emit(config, text)
    if not report.passed:
        log.error(f"Verification failed: max relative error {report.max_rel_err:.3g} > {report.tolerance:g}")
        return EXIT_FAILED_CHECK
    return EXIT_OK


def _run_cs_norm(config: RunConfig, family: MomentFamily) -> int:
    from hausdorffcs.coherent import action_identity_residual, normalization_terms

    tol = config.settings.series_tol
    summary = normalization_terms(family, config.J, tol)
    payload = {
        "family": family.to_dict(),
        "J": config.J,
        "normalization": summary.value.real,
        "terms": summary.terms,
        "tail_bound": summary.tail_bound,
        "action_residual": action_identity_residual(family, config.J, tol),
    }
    _emit(config, _single_record(config, payload))
    return EXIT_OK


def _run_cs_overlap(config: RunConfig, family: MomentFamily) -> int:
    from hausdorffcs.coherent import CSParams, overlap

    p1 = CSParams(config.J, config.gamma)
    p2 = CSParams(config.J if config.J2 is None else config.J2, config.gamma2)
    value = overlap(family, p1, p2, config.settings.series_tol)
    payload = {
        "family": family.to_dict(),
        "J1": p1.J,
        "gamma1": p1.gamma,
        "J2": p2.J,
        "gamma2": p2.gamma,
        "re": value.real,
        "im": value.imag,
        "abs": abs(value),
    }
    _emit(config, _single_record(config, payload))
    return EXIT_OK


def _single_record(config: RunConfig, payload: dict) -> str:
    if config.fmt == "json":
        return to_json(payload)
    flat = {key: value for key, value in payload.items() if key != "family"}
    return render_table(config.fmt, tuple(flat), [tuple(flat.values())], {"family": payload["family"]})


def _run_figure(config: RunConfig, _family) -> int:
    from hausdorffcs.weights import figure_data

    table = figure_data(config.figure_id, config.grid_size)
    header = {
        "figure_id": table.figure_id,
        "families": {name: wf.family.to_dict() for name, wf in table.weights.items()},
        "atoms": table.atoms,
    }
    rows = list(table.rows())
    if config.fmt != "csv":
        rows = [row for row in rows if row[0] != "atom"]
    _emit(config, render_table(config.fmt, table.columns, rows, header))
    return EXIT_OK


def _run_quasiclassical(config: RunConfig, _family) -> int:
    from hausdorffcs.quasiclassical import PotentialSpec, d_constant, level_exponent, quasiclassical_level

    spec = PotentialSpec(config.sigma, config.v0, config.mass)
    n = np.arange(config.n_max + 1)
    header = {
        "sigma": spec.sigma,
        "v0": spec.v0,
        "mass": spec.mass,
        "d_constant": d_constant(spec.sigma),
        "exponent": level_exponent(spec.sigma),
    }
    rows = zip(n.tolist(), np.atleast_1d(quasiclassical_level(spec, n)).tolist())
    _emit(config, render_table(config.fmt, ("n", "energy"), rows, header))
    return EXIT_OK


def _run_positivity(config: RunConfig, family: MomentFamily) -> int:
    from hausdorffcs.weights import WeightFunction, positivity_scan

    report = positivity_scan(WeightFunction(family, config.backend, config.contour()), max(config.grid_size, 1000))
    payload = report.to_dict()
    if config.fmt == "json":
        _emit(config, to_json(payload))
    else:
        _emit(config, render_table(config.fmt, tuple(payload), [tuple(payload.values())]))
    return EXIT_OK if report.passed else EXIT_FAILED_CHECK


RUNNERS = {
    "moments": _run_moments,
    "spectrum": _run_spectrum,
    "fit": _run_fit,
    "weight": _run_weight,
    "verify": _run_verify,
    "cs-norm": _run_cs_norm,
    "cs-overlap": _run_cs_overlap,
    "figure": _run_figure,
    "quasiclassical": _run_quasiclassical,
    "positivity": _run_positivity,
}


def run(config: RunConfig) -> int:
    """Execute one command; returns 0 on success, 2 when a verification or positivity check fails, 1 on errors."""
    try:
        family = config.validate()
        return RUNNERS[config.command](config, family)
    except click.UsageError as e:
        click.echo(f"Error: {e.message}", err=True)
    except (HausdorffError, OSError) as e:
        click.echo(f"Error: {e}", err=True)
    return EXIT_ERROR


def _fraction(ctx, param, value):
    if value is None:
        return None
    try:
        return float(parse_fraction(value))
    except ValueError as e:
        raise click.BadParameter(str(e)) from e


def family_options(func):
    options = (
        click.option("--family", type=click.Choice(sorted(FAMILY_KINDS)), default="general", show_default=True),
        click.option("--a", "a", callback=_fraction, default="1", show_default=True, help="Scale a > 0, e.g. 1 or 1/2"),
        click.option("--nu", callback=_fraction, default=None, help="Order nu, e.g. 0, 1/4 or 4/3"),
        click.option("--k", "k", type=int, default=2, show_default=True),
        click.option("--l", "l", type=int, default=1, show_default=True),
        click.option("--allow-negative-nu", is_flag=True, help="Waive positivity and accept nu < 0"),
    )
    for option in reversed(options):
        func = option(func)
    return func


def output_options(func):
    options = (
        click.option("--format", "fmt", type=click.Choice(FORMATS), default="csv", show_default=True),
        click.option("--out", "-o", type=click.Path(dir_okay=False), default=None, help="Write to this file"),
    )
    for option in reversed(options):
        func = option(func)
    return func


backend_option = click.option("--backend", type=click.Choice(BACKENDS), default="closed-form", show_default=True)


def _finish(ctx: click.Context, command: str, **kwargs):
    config = RunConfig(command=command, settings=ctx.obj["settings"], **kwargs)
    ctx.exit(run(config))


@click.group()
@click.version_option(__version__, prog_name="hausdorffcs", message=version_message())
@click.option("--config", "config_file", type=click.Path(dir_okay=False), default=None, help="INI settings file")
@click.option("--verbose", "-v", is_flag=True, help="Log progress to stderr")
@click.pass_context
def cli(ctx: click.Context, config_file: Optional[str], verbose: bool):
    """Moment problems and coherent states for power-law potentials."""
    # the package logger is disabled on import; command line runs switch it on
    log.remove()
    log.add(sys.stderr, level="DEBUG" if verbose else "WARNING")
    log.enable("hausdorffcs")
    ctx.ensure_object(dict)
    ctx.obj["settings"] = load_settings(config_file)


@cli.command()
@family_options
@click.option("--nmax", "n_max", type=int, default=30, show_default=True)
@output_options
@click.pass_context
def moments(ctx, **kwargs):
    """Moments rho(n) for n = 0..nmax."""
    _finish(ctx, "moments", **kwargs)


@cli.command("spectrum")
@family_options
@click.option("--nmax", "n_max", type=int, default=30, show_default=True)
@output_options
@click.pass_context
def spectrum_command(ctx, **kwargs):
    """Spectrum e(n) = rho(n) / rho(n-1), with e(0) = 0."""
    _finish(ctx, "spectrum", **kwargs)


@cli.command()
@family_options
@click.option("--nmin", "n_min", type=int, default=500, show_default=True)
@click.option("--nmax", "n_max", type=int, default=20000, show_default=True)
@output_options
@click.pass_context
def fit(ctx, **kwargs):
    """Fit 1 - e(n) ~ c n^-theta and derive sigma."""
    _finish(ctx, "fit", **kwargs)


@cli.command()
@family_options
@backend_option
@click.option("--grid", type=int, default=None, help="Number of interior y points")
@output_options
@click.pass_context
def weight(ctx, **kwargs):
    """Weight density on a uniform grid in (0, 1)."""
    _finish(ctx, "weight", **kwargs)


@cli.command()
@family_options
@backend_option
@click.option("--nmax", "n_max", type=int, default=30, show_default=True)
@click.option("--tol", type=float, default=None, help="Relative tolerance (default by backend)")
@output_options
@click.pass_context
def verify(ctx, **kwargs):
    """Reconstruct rho(n) from the weight by quadrature; exit 2 when the tolerance is missed."""
    _finish(ctx, "verify", **kwargs)


@cli.command("cs-norm")
@family_options
@click.option("--J", "J", type=float, default=0.5, show_default=True)
@output_options
@click.pass_context
def cs_norm(ctx, **kwargs):
    """Coherent-state normalization N(J) and the action identity residual."""
    _finish(ctx, "cs-norm", **kwargs)


@cli.command("cs-overlap")
@family_options
@click.option("--J", "J", type=float, default=0.5, show_default=True)
@click.option("--gamma", type=float, default=0.0, show_default=True)
@click.option("--J2", "J2", type=float, default=None, help="Second state's J (default: same as --J)")
@click.option("--gamma2", type=float, default=0.0, show_default=True)
@output_options
@click.pass_context
def cs_overlap(ctx, **kwargs):
    """Overlap <J, gamma | J2, gamma2>."""
    _finish(ctx, "cs-overlap", **kwargs)


@cli.command()
@click.option("--id", "figure_id", type=int, required=True, help="Figure 1-4")
@click.option("--grid", type=int, default=None)
@output_options
@click.pass_context
def figure(ctx, **kwargs):
    """The two weight curves of one figure."""
    _finish(ctx, "figure", **kwargs)


@cli.command()
@click.option("--sigma", callback=_fraction, default="1", show_default=True)
@click.option("--v0", type=float, default=1.0, show_default=True)
@click.option("--mass", type=float, default=1.0, show_default=True)
@click.option("--nmax", "n_max", type=int, default=30, show_default=True)
@output_options
@click.pass_context
def quasiclassical(ctx, **kwargs):
    """Bohr-Sommerfeld levels E(n) for V = -|V0| |x|^-sigma."""
    _finish(ctx, "quasiclassical", **kwargs)


@cli.command()
@family_options
@backend_option
@click.option("--grid", type=int, default=None, help="Scan points (at least 1000)")
@output_options
@click.pass_context
def positivity(ctx, **kwargs):
    """Scan the weight density for negative values; exit 2 when one is found."""
    _finish(ctx, "positivity", **kwargs)


def main(argv=None):
    """Console entry point: usage errors exit 1 rather than click's default 2."""
    try:
        code = cli.main(args=argv, prog_name="hausdorffcs", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        code = EXIT_ERROR
    except click.Abort:
        click.echo("Aborted!", err=True)
        code = EXIT_ERROR
    sys.exit(code or EXIT_OK)


if __name__ == "__main__":
    main()
