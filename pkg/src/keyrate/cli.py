"""CLI interface."""

import functools
import logging
import math
import sys
import threading
import warnings
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Callable, Final, Iterator, TypeVar, cast

import click

from keyrate.config import Config
from keyrate.conjecture import (
    FULL_SCALE_STEP,
    SurfaceField,
    SweepRanges,
    e85_sweep,
    equality_point_audit,
    surface_emit,
    sweep,
)
from keyrate.core import (
    JointDist,
    ParamFamily,
    Variant,
    conditional_entropies,
    connected_components,
    entropy,
    joint_entropy,
    mutual_information,
)
from keyrate.correlation import (
    kbib_upper_bound,
    maximal_correlation,
    sup_rho_m_over_lower_set,
)
from keyrate.envelope import omega_r, sigma_r
from keyrate.exceptions import ConvergenceWarning, KeyrateError
from keyrate.formatters import Formatter, Matrix, Report, Table
from keyrate.formatters.csv_formatter import CSVFormatter
from keyrate.formatters.gnuplot_formatter import GnuplotFormatter
from keyrate.formatters.json_formatter import JSONFormatter
from keyrate.formatters.plain_formatter import PlainFormatter
from keyrate.rates import (
    converse_bound,
    kbib_from_threshold,
    mimk_limit_route,
    mimk_sigma_route,
    one_way_threshold,
    rate_region_boundary,
    s_star,
    tyagi_check,
)
from keyrate.run_config import RunConfig

logger = logging.getLogger(__name__)

BANNER: Final[str] = r"""
     __
    / /_____  __  ___________ _/ /____
   / //_/ _ \/ / / / ___/ __ `/ __/ _ \
  / ,< /  __/ /_/ / /  / /_/ / /_/  __/
 /_/|_|\___/\__, /_/   \__,_/\__/\___/
           /____/
    """

EXIT_ERROR: Final[int] = 2
EXIT_NOT_CONVERGED: Final[int] = 3

FORMATTERS: Final[dict[str, type[Formatter]]] = {
    "plain": PlainFormatter,
    "json": JSONFormatter,
    "csv": CSVFormatter,
    "gnuplot": GnuplotFormatter,
}
EXTENSIONS: Final[dict[str, str]] = {
    "plain": "txt",
    "json": "json",
    "csv": "csv",
    "gnuplot": "dat",
}

_F = TypeVar("_F", bound=Callable[..., Any])


class RoundsParamType(click.ParamType):
    """Number of rounds: a non-negative integer or "inf"."""

    name = "rounds"

    def convert(
        self, value: Any, param: click.Parameter | None, ctx: click.Context | None
    ) -> int | float:
        """Parse the number of rounds."""
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            rounds: int | float = value
        elif str(value).strip().lower() in {"inf", "infinity"}:
            rounds = math.inf
        else:
            try:
                rounds = int(str(value))
            except ValueError:
                self.fail(f"{value!r} is neither an integer nor 'inf'.", param, ctx)
        if rounds < 0:
            self.fail(f"{value!r} is negative.", param, ctx)
        return rounds


ROUNDS = RoundsParamType()


@contextmanager
def _exit_on_error(ctx: click.Context) -> Iterator[None]:
    try:
        yield
    except (KeyrateError, OSError) as exc:
        logger.error(exc)
        ctx.exit(EXIT_ERROR)


def output_options(fn: _F) -> _F:
    """Options shared by every command producing a report."""
    options = [
        click.option(
            "--format",
            "-f",
            help="Output format. Plain is suitable for terminals, json, csv and "
            "gnuplot for files. Defaults to the configured output_format.",
            type=click.Choice(list(FORMATTERS)),
            default=None,
        ),
        click.option(
            "--output",
            "-o",
            help="Write the report to this file instead of standard output.",
            type=click.Path(dir_okay=False, path_type=Path),
            default=None,
        ),
        click.option(
            "--allow-warn",
            help="Exit successfully even if an envelope iteration did not converge.",
            is_flag=True,
            default=False,
        ),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def family_options(fn: _F) -> _F:
    """Options selecting the source and the envelope grid.

    The decorated command receives a `ParamFamily` as `family`; grid flags
    overload the loaded configuration.
    """

    @functools.wraps(fn)
    def wrapper(
        *args: Any,
        variant: str,
        epsilon: float,
        base: tuple[float, float],
        grid_n: int | None,
        sup_norm_tol: float | None,
        max_passes: int | None,
        grid_tol: float | None,
        **kwargs: Any,
    ) -> Any:
        ctx = click.get_current_context()
        config: Config = ctx.obj
        overloads = {
            "grid_n": grid_n,
            "sup_norm_tol": sup_norm_tol,
            "max_passes": max_passes,
            "grid_tol": grid_tol,
        }
        with _exit_on_error(ctx):
            config.overload({k: v for k, v in overloads.items() if v is not None})
            if variant == Variant.SUPPORT_THREE.value:
                family = ParamFamily.support_three(base)
            else:
                family = ParamFamily.bsc_kernel(epsilon, base)
        return fn(*args, family=family, **kwargs)

    options = [
        click.option(
            "--variant",
            help="Chart of the lower set.",
            type=click.Choice([v.value for v in Variant]),
            default=Variant.BSC_KERNEL.value,
        ),
        click.option(
            "--epsilon",
            "-e",
            help="Crossover probability of the BSC kernel.",
            type=float,
            default=0.11,
        ),
        click.option(
            "--base",
            help="Chart coordinates (f, g) of the source distribution.",
            type=(float, float),
            default=(0.5, 0.5),
        ),
        click.option("--grid-n", help="Grid points per axis.", type=int),
        click.option("--sup-norm-tol", help="Convergence tolerance.", type=float),
        click.option("--max-passes", help="Maximum marginal passes.", type=int),
        click.option("--grid-tol", help="Grid resolution tolerance.", type=float),
    ]
    for option in reversed(options):
        wrapper = option(wrapper)
    return cast(_F, wrapper)


def _family_parameters(family: ParamFamily) -> dict[str, Any]:
    return {
        "variant": family.variant.value,
        "epsilon": family.epsilon,
        "base": list(family.base),
    }


def _run_config(
    ctx: click.Context,
    command: str,
    parameters: dict[str, Any],
    format: str | None,
    output: Path | None,
    envelope: bool = True,
) -> RunConfig:
    config: Config = ctx.obj
    output_format = format or config.output_format
    if output_format not in FORMATTERS:
        raise click.UsageError(
            f"Unknown output_format {output_format!r}, "
            f"choose from {list(FORMATTERS)}."
        )
    return RunConfig(
        command=command,
        parameters=parameters,
        envelope=config.envelope if envelope else None,
        output_format=output_format,
        output=output,
        bits=config.bits,
        config_text=config.config_text,
    )


def _write(run_config: RunConfig, report: Report, path: Path | None) -> None:
    formatter = FORMATTERS[run_config.output_format](run_config=run_config)
    text = formatter.format(report)
    if path is None:
        click.echo(text, nl=False)
    else:
        path.write_text(text, encoding="utf-8")
        logger.info(f"Report written to {path}")


def _run(
    ctx: click.Context,
    run_config: RunConfig,
    compute: Callable[[], Report],
    allow_warn: bool,
    emit: Callable[[RunConfig, Report], None] | None = None,
) -> None:
    """Compute a report, write it, and map failures to exit codes."""
    config: Config = ctx.obj
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        with _exit_on_error(ctx):
            report = compute()

    converged = True
    for warning in caught:
        logger.warning(f"{warning.category.__name__}: {warning.message}")
        if issubclass(warning.category, ConvergenceWarning):
            converged = False

    with _exit_on_error(ctx):
        if emit is None:
            _write(run_config, report, run_config.output)
        else:
            emit(run_config, report)

    if not converged and not (allow_warn or config.allow_warn):
        logger.error("Envelope iteration did not converge, see --allow-warn.")
        ctx.exit(EXIT_NOT_CONVERGED)


@click.version_option(message="%(version)s", package_name="keyrate")
@click.group(
    help=f"\b{BANNER}",
    invoke_without_command=False,
    context_settings={"help_option_names": ["-h", "--help"]},
)
@click.option(
    "--config",
    "config_file",
    help="Batch configuration file, echoed into every output.",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
)
@click.option(
    "--threads",
    "-t",
    help="Worker threads. Results do not depend on this value.",
    type=click.IntRange(min=1),
    default=None,
)
@click.option(
    "--bits",
    help="Show information quantities in bits instead of nats.",
    is_flag=True,
    default=False,
)
@click.option(
    "--verbose",
    "-v",
    help="Log progress information.",
    is_flag=True,
    default=False,
)
@click.pass_context
def cli(
    ctx: click.Context,
    config_file: Path | None,
    threads: int | None,
    bits: bool,
    verbose: bool,
) -> None:
    """CLI entrypoint."""
    if verbose:
        root = logging.getLogger()
        root.setLevel(logging.INFO)
        for handler in root.handlers:
            handler.setLevel(logging.INFO)

    config = Config()
    try:
        config.load(config_file)
    except (ValueError, AttributeError, KeyrateError) as exc:
        logger.error(f"Invalid configuration: {exc}")
        ctx.exit(EXIT_ERROR)
    if threads:
        config.overload({"threads": threads})
    if bits:
        config.overload({"bits": bits})
    ctx.obj = config


@cli.command()
@click.argument(
    "dist_file", type=click.Path(exists=True, dir_okay=False, path_type=Path)
)
@output_options
@click.pass_context
def info(
    ctx: click.Context,
    dist_file: Path,
    format: str | None,
    output: Path | None,
    allow_warn: bool,
) -> None:
    """Entropies, mutual information and maximal correlation of a source."""
    run_config = _run_config(
        ctx, "info", {"dist_file": str(dist_file)}, format, output, envelope=False
    )

    def compute() -> Report:
        joint = JointDist.load(dist_file)
        h_x_given_y, h_y_given_x = conditional_entropies(joint)
        components = connected_components(joint)
        return Report(
            title=f"Source {dist_file.name} ({joint.m}x{joint.n})",
            values={
                "joint_entropy": joint_entropy(joint),
                "entropy_x": entropy(joint.p_x),
                "entropy_y": entropy(joint.p_y),
                "mutual_information": mutual_information(joint),
                "entropy_x_given_y": h_x_given_y,
                "entropy_y_given_x": h_y_given_x,
                "maximal_correlation": maximal_correlation(joint),
                "components": len(components.parts),
                "indecomposable": components.is_indecomposable,
            },
            nats=frozenset(
                {
                    "joint_entropy",
                    "entropy_x",
                    "entropy_y",
                    "mutual_information",
                    "entropy_x_given_y",
                    "entropy_y_given_x",
                }
            ),
        )

    _run(ctx, run_config, compute, allow_warn)


@cli.command()
@family_options
@click.option(
    "--functional",
    help="Base functional: omega is s H(X,Y) - I(X;Y), sigma is H(X,Y) on the "
    "independence locus.",
    type=click.Choice(["omega", "sigma"]),
    default="sigma",
)
@click.option("--s", "slope", help="Slope s of omega.", type=float, default=1.0)
@click.option(
    "--rounds", "-r", help="Number of rounds, or inf.", type=ROUNDS, default="inf"
)
@output_options
@click.pass_context
def envelope(
    ctx: click.Context,
    family: ParamFamily,
    functional: str,
    slope: float,
    rounds: int | float,
    format: str | None,
    output: Path | None,
    allow_warn: bool,
) -> None:
    """Alternating marginal concave envelope of a base functional."""
    config: Config = ctx.obj
    parameters = _family_parameters(family) | {
        "functional": functional,
        "rounds": rounds,
    }
    if functional == "omega":
        parameters["s"] = slope
    run_config = _run_config(ctx, "envelope", parameters, format, output)

    def compute() -> Report:
        if functional == "omega":
            fn = omega_r(slope, family, rounds, config.envelope)
        else:
            fn = sigma_r(family, rounds, config.envelope, config.indep_tol)
        return Report(
            title=f"{functional} envelope after {fn.passes} passes",
            values={"base_value": fn.base_value(), "passes": fn.passes},
            nats=frozenset({"base_value"}),
            matrices={functional: Matrix(fn.axis, fn.values)},
        )

    _run(ctx, run_config, compute, allow_warn)


@cli.command()
@family_options
@click.option(
    "--rounds", "-r", help="Number of rounds, or inf.", type=ROUNDS, default="1"
)
@output_options
@click.pass_context
def region(
    ctx: click.Context,
    family: ParamFamily,
    rounds: int | float,
    format: str | None,
    output: Path | None,
    allow_warn: bool,
) -> None:
    """Boundary of the achievable (total rate, key rate) region."""
    config: Config = ctx.obj
    parameters = _family_parameters(family) | {"rounds": rounds}
    run_config = _run_config(ctx, "region", parameters, format, output)

    def compute() -> Report:
        boundary = rate_region_boundary(family, rounds, config.envelope)
        return Report(
            title=f"Rate region boundary, {rounds} rounds",
            values={
                "mutual_information": boundary.mutual_information,
                "saturation": boundary.saturation,
            },
            nats=frozenset({"mutual_information", "saturation", "S", "R"}),
            table=Table(("S", "R", "s"), list(boundary.points)),
        )

    _run(ctx, run_config, compute, allow_warn)


@cli.command()
@family_options
@click.option(
    "--rounds", "-r", help="Number of rounds, or inf.", type=ROUNDS, default="inf"
)
@click.option("--bisect-tol", help="Width of the final bracket.", type=float)
@output_options
@click.pass_context
def kbib(
    ctx: click.Context,
    family: ParamFamily,
    rounds: int | float,
    bisect_tol: float | None,
    format: str | None,
    output: Path | None,
    allow_warn: bool,
) -> None:
    """Threshold slope s* and key bits per interaction bit."""
    config: Config = ctx.obj
    if bisect_tol is not None:
        config.overload({"bisect_tol": bisect_tol})
    parameters = _family_parameters(family) | {
        "rounds": rounds,
        "bisect_tol": config.bisect_tol,
    }
    run_config = _run_config(ctx, "kbib", parameters, format, output)

    def compute() -> Report:
        result = s_star(family, rounds, config.envelope, config.bisect_tol)
        grid_n = config.envelope.grid_n
        return Report(
            title=f"Key bits per interaction bit, {rounds} rounds",
            values={
                "s_star": result.s_star,
                "bracket": result.bracket,
                "iterations": result.iterations,
                "kbib": kbib_from_threshold(result),
                "sup_rho_m_squared": sup_rho_m_over_lower_set(family, grid_n).value,
                "kbib_upper_bound": kbib_upper_bound(family, grid_n),
            },
        )

    _run(ctx, run_config, compute, allow_warn)


@cli.command(name="one-way")
@click.argument(
    "dist_file", type=click.Path(exists=True, dir_okay=False, path_type=Path)
)
@click.option(
    "--grid-n", help="Points on the X-marginal fiber.", type=int, default=2001
)
@click.option("--bisect-tol", help="Width of the final bracket.", type=float)
@output_options
@click.pass_context
def one_way(
    ctx: click.Context,
    dist_file: Path,
    grid_n: int,
    bisect_tol: float | None,
    format: str | None,
    output: Path | None,
    allow_warn: bool,
) -> None:
    """Strong data processing constant of a source with binary X."""
    config: Config = ctx.obj
    if bisect_tol is not None:
        config.overload({"bisect_tol": bisect_tol})
    parameters = {
        "dist_file": str(dist_file),
        "grid_n": grid_n,
        "bisect_tol": config.bisect_tol,
    }
    run_config = _run_config(
        ctx, "one-way", parameters, format, output, envelope=False
    )

    def compute() -> Report:
        joint = JointDist.load(dist_file)
        result = one_way_threshold(
            joint, grid_n, config.bisect_tol, config.envelope.sup_norm_tol
        )
        return Report(
            title=f"One-way threshold of {dist_file.name}",
            values={
                "s_star": result.s_star,
                "bracket": result.bracket,
                "iterations": result.iterations,
                "kbib": kbib_from_threshold(result),
            },
        )

    _run(ctx, run_config, compute, allow_warn)


@cli.command()
@family_options
@click.option(
    "--rounds", "-r", help="Number of rounds, or inf.", type=ROUNDS, default="inf"
)
@click.option(
    "--agree-tol",
    help="Largest difference between the two routes counted as agreement.",
    type=float,
    default=1e-2,
)
@output_options
@click.pass_context
def mimk(
    ctx: click.Context,
    family: ParamFamily,
    rounds: int | float,
    agree_tol: float,
    format: str | None,
    output: Path | None,
    allow_warn: bool,
) -> None:
    """Minimum interactive communication for maximal key rate, by two routes."""
    config: Config = ctx.obj
    parameters = _family_parameters(family) | {
        "rounds": rounds,
        "agree_tol": agree_tol,
    }
    run_config = _run_config(ctx, "mimk", parameters, format, output)

    def compute() -> Report:
        sigma_route = mimk_sigma_route(
            family, rounds, config.envelope, config.indep_tol
        )
        limit_route = mimk_limit_route(family, rounds, config.envelope)
        difference = abs(sigma_route - limit_route.value)
        return Report(
            title=f"MIMK, {rounds} rounds",
            values={
                "sigma_route": sigma_route,
                "limit_route": limit_route.value,
                "difference": difference,
                "agree": difference <= agree_tol,
            },
            nats=frozenset(
                {"sigma_route", "limit_route", "difference", "estimate"}
            ),
            table=Table(("s", "estimate"), list(limit_route.sequence)),
        )

    _run(ctx, run_config, compute, allow_warn)


@cli.command()
@family_options
@output_options
@click.pass_context
def tyagi(
    ctx: click.Context,
    family: ParamFamily,
    format: str | None,
    output: Path | None,
    allow_warn: bool,
) -> None:
    """Whether interaction lowers the MIMK of a binary source."""
    config: Config = ctx.obj
    run_config = _run_config(
        ctx, "tyagi", _family_parameters(family), format, output
    )

    def compute() -> Report:
        report = tyagi_check(family, config.envelope)
        return Report(
            title=f"One-way against interactive MIMK: {report.verdict}",
            values={
                "sigma1": report.sigma1,
                "sigma3": report.sigma3,
                "sigma_inf": report.sigma_inf,
                "sigma1_transposed": report.sigma1_transposed,
                "conditional_sum": report.conditional_sum,
                "one_way_mimk": report.one_way_mimk,
                "interactive_mimk": report.interactive_mimk,
                "verdict": report.verdict,
            },
            nats=frozenset(
                {
                    "sigma1",
                    "sigma3",
                    "sigma_inf",
                    "sigma1_transposed",
                    "conditional_sum",
                    "one_way_mimk",
                    "interactive_mimk",
                }
            ),
        )

    _run(ctx, run_config, compute, allow_warn)


@cli.command(name="converse-bound")
@click.option(
    "--log-k", help="Logarithm of the key alphabet size.", type=float, required=True
)
@click.option(
    "--log-w",
    help="Logarithm of the message alphabet size.",
    type=float,
    required=True,
)
@click.option("--delta", help="Error probability.", type=float, required=True)
@click.option(
    "--s", "slope", help="Threshold slope of the source.", type=float, required=True
)
@output_options
@click.pass_context
def converse_bound_command(
    ctx: click.Context,
    log_k: float,
    log_w: float,
    delta: float,
    slope: float,
    format: str | None,
    output: Path | None,
    allow_warn: bool,
) -> None:
    """Finite-length bound on key length per communication length."""
    parameters = {"log_k": log_k, "log_w": log_w, "delta": delta, "s": slope}
    run_config = _run_config(
        ctx, "converse-bound", parameters, format, output, envelope=False
    )

    def compute() -> Report:
        bound = converse_bound(log_k, log_w, delta, slope)
        return Report(
            title="Converse bound on log K / log W",
            values={
                "bound": bound.bound,
                "ratio": bound.ratio,
                "consistent": bound.consistent,
            },
        )

    _run(ctx, run_config, compute, allow_warn)


@cli.command()
@click.option("--step", help="Sweep step. Defaults to sweep_step.", type=float)
@click.option(
    "--full-scale",
    help=f"Sweep at step {FULL_SCALE_STEP}; a long run.",
    is_flag=True,
    default=False,
)
@click.option(
    "--audit",
    help="(alpha, epsilon) at which the touching points are audited.",
    type=(float, float),
    default=(0.11, 0.11),
)
@output_options
@click.pass_context
def conjecture(
    ctx: click.Context,
    step: float | None,
    full_scale: bool,
    audit: tuple[float, float],
    format: str | None,
    output: Path | None,
    allow_warn: bool,
) -> None:
    """Grid sweep of the binary-source domination inequality."""
    config: Config = ctx.obj
    if full_scale and step is not None:
        raise click.UsageError("--full-scale cannot be used with --step.")
    step = FULL_SCALE_STEP if full_scale else (step or config.sweep_step)
    parameters = {"step": step, "audit": list(audit)}
    run_config = _run_config(
        ctx, "conjecture", parameters, format, output, envelope=False
    )

    def compute() -> Report:
        slabs = SweepRanges.offset(step).axes(step)[2].size
        lock = threading.Lock()
        with click.progressbar(
            length=slabs, label="Sweeping epsilon slabs", file=sys.stderr
        ) as bar:

            def advance(count: int) -> None:
                with lock:
                    bar.update(count)

            report = sweep(step, threads=config.threads, progress=advance)
        checked = equality_point_audit(*audit)
        return Report(
            title=f"Domination gap sweep at step {step}",
            values={
                "min_gap": report.min_gap,
                "argmin": report.argmin,
                "negative_count": report.negative_count,
                "cells_scanned": report.cells_scanned,
                "roundoff_budget": report.roundoff_budget,
                "beyond_budget": report.beyond_budget,
                "wall_time": report.wall_time,
                "audit_max_gap": checked.max_abs_gap,
                "audit_max_gradient": checked.max_abs_gradient,
                "audit_passed": checked.passed,
            },
            nats=frozenset({"min_gap", "roundoff_budget", "audit_max_gap"}),
            volatile=frozenset({"wall_time"}),
        )

    _run(ctx, run_config, compute, allow_warn)


@cli.command()
@click.argument("alpha", type=float)
@click.argument("epsilon", type=float)
@click.option("--grid-n", help="Points per axis.", type=int, default=101)
@click.option(
    "--output-dir",
    help="Write one file per field into this directory.",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
)
@output_options
@click.pass_context
def surfaces(
    ctx: click.Context,
    alpha: float,
    epsilon: float,
    grid_n: int,
    output_dir: Path | None,
    format: str | None,
    output: Path | None,
    allow_warn: bool,
) -> None:
    """Plot data of s H - I, its dominating functional and their gap."""
    if output_dir is not None and output is not None:
        raise click.UsageError("--output-dir cannot be used with --output.")
    parameters = {"alpha": alpha, "epsilon": epsilon, "grid_n": grid_n}
    run_config = _run_config(
        ctx, "surfaces", parameters, format, output, envelope=False
    )

    def compute() -> Report:
        matrices: dict[str, Matrix] = {}
        for field in SurfaceField:
            surface = surface_emit(field, alpha, epsilon, grid_n)
            matrices[field.value] = Matrix(surface.axis, surface.values)
        return Report(
            title=f"Surfaces at alpha={alpha}, epsilon={epsilon}",
            values={"alpha": alpha, "epsilon": epsilon},
            matrices=matrices,
        )

    def emit_files(run_config: RunConfig, report: Report) -> None:
        assert output_dir is not None
        output_dir.mkdir(parents=True, exist_ok=True)
        extension = EXTENSIONS[run_config.output_format]
        for name, matrix in report.matrices.items():
            single = Report(report.title, report.values, matrices={name: matrix})
            _write(run_config, single, output_dir / f"{name}.{extension}")

    _run(
        ctx,
        run_config,
        compute,
        allow_warn,
        emit=None if output_dir is None else emit_files,
    )


@cli.command()
@click.option("--step", help="Sweep step. Defaults to sweep_step.", type=float)
@output_options
@click.pass_context
def e85(
    ctx: click.Context,
    step: float | None,
    format: str | None,
    output: Path | None,
    allow_warn: bool,
) -> None:
    """Grid sweep of the reduced inequality of the epsilon -> 1/2 regime."""
    config: Config = ctx.obj
    step = step or config.sweep_step
    run_config = _run_config(
        ctx, "e85", {"step": step}, format, output, envelope=False
    )

    def compute() -> Report:
        report = e85_sweep(step)
        return Report(
            title=f"Reduced inequality sweep at step {step}",
            values={
                "min_slack": report.min_slack,
                "argmin": report.argmin,
                "negative_count": report.negative_count,
                "cells_scanned": report.cells_scanned,
                "equality_line_max": report.equality_line_max,
            },
        )

    _run(ctx, run_config, compute, allow_warn)
