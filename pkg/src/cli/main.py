"""outfn command line: analyze maps, approximate limits, build and check the complex."""

import logging
from typing import Any

import click

from ..utils.config import Config, output_dir
from ..utils.errors import AssertionFailure, OutFnError
from ..utils.report import to_json, write_report
from .runner import run

logger = logging.getLogger(__name__)


def _execute(ctx: click.Context, command: str, **params: Any) -> None:
    opts = ctx.obj
    try:
        config = Config.load(opts["config"]) if opts["config"] else None
        report = run(command, config, opts["timing"], **params)
        out = output_dir(opts["out"])
        if out is not None:
            write_report(report, out, command.replace(" ", "_"))
    except OutFnError as e:
        click.echo(f"error: {e}", err=True)
        ctx.exit(e.exit_code)
        return

    click.echo(to_json(report), nl=False)
    failed = [name for name, ok in report.assertions.items() if not ok]
    if failed:
        click.echo(f"assertions failed: {', '.join(sorted(failed))}", err=True)
        ctx.exit(AssertionFailure.exit_code)


@click.group()
@click.option("--config", "-c", type=click.Path(dir_okay=False), help="TOML run configuration")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging on stderr")
@click.option("--timing", is_flag=True, help="Record wall time in the report")
@click.option("--out", type=click.Path(file_okay=False), help="Directory for report files")
@click.pass_context
def cli(ctx: click.Context, config: str | None, verbose: bool, timing: bool, out: str | None):
    """Outer automorphisms of free groups: train tracks, limit trees, crossratio complexes."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        force=True,
    )
    ctx.obj = {"config": config, "timing": timing, "out": out}


@cli.command()
@click.option("--map", "map_name", required=True, help="Map name from the config")
@click.pass_context
def analyze(ctx: click.Context, map_name: str):
    """Train track check, eigen-metric and cancellation constants of one map."""
    _execute(ctx, "analyze", map_name=map_name)


@cli.command()
@click.option("--map", "map_name", required=True, help="Map name from the config")
@click.option("--subword-length", default=2, show_default=True, help="Current window length")
@click.option("--depth", default=20, show_default=True, help="Iteration depth of currents")
@click.option("--sign", type=click.Choice(["+", "-"]), default="+", show_default=True)
@click.option("--g", "element", help="Translate the tree by an element such as 'swap*fib^-1'")
@click.option("--testset", type=click.Path(exists=True, dir_okay=False), help="One class per line")
@click.option("--tol", type=float, help="Convergence tolerance (default from config)")
@click.option("--kmax", type=int, help="Iteration cap (default from config)")
@click.pass_context
def limits(
    ctx: click.Context,
    map_name: str,
    subword_length: int,
    depth: int,
    sign: str,
    element: str | None,
    testset: str | None,
    tol: float | None,
    kmax: int | None,
):
    """Length function of T^sign . g, plus the poles and currents of one map."""
    _execute(
        ctx,
        "limits",
        map_name=map_name,
        L=subword_length,
        k=depth,
        sign=1 if sign == "+" else -1,
        element=element,
        testset=testset,
        tol=tol,
        k_max=kmax,
    )


@cli.group("complex")
def complex_group():
    """Build the crossratio complex or re-check a stored one."""


@complex_group.command("build")
@click.option("--leaves", type=int, help="Use the caterpillar tree model with this many leaves")
@click.option("--radius", type=int, help="Enumeration radius (default from config)")
@click.option("--mode", type=click.Choice(["chain", "separating"]), help="Crossratio mode")
@click.option("--r", "r", type=int, help="Edge threshold (default: connectivity + 1)")
@click.pass_context
def complex_build(
    ctx: click.Context, leaves: int | None, radius: int | None, mode: str | None, r: int | None
):
    """Sample, annuli, crossratio table, rho and G_r, with DOT output."""
    _execute(ctx, "complex build", leaves=leaves, radius=radius, mode=mode, r=r)


@complex_group.command("check")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--budget", default=100_000, show_default=True, help="Quadruple budget")
@click.option("--seed", default=0, show_default=True)
@click.pass_context
def complex_check(ctx: click.Context, path: str, budget: int, seed: int):
    """Reload a complex build report and re-run the axiom scans."""
    _execute(ctx, "complex check", path=path, budget=budget, seed=seed)


@cli.group()
def experiment():
    """Experiments on limit trees and the complex."""


@experiment.command("t2")
@click.option("--f", "f", help="First map (default from config)")
@click.option("--g", "g", help="Second map (default from config)")
@click.option("--max-length", type=int, help="Longest primitive class scanned")
@click.pass_context
def experiment_t2(ctx: click.Context, f: str | None, g: str | None, max_length: int | None):
    """Uniform lower bound for the larger of two stable lengths."""
    _execute(ctx, "experiment t2", f=f, g=g, max_length=max_length)


@experiment.command("a1a2")
@click.option("--radii", default="3,4", show_default=True, help="Comma-separated radii")
@click.pass_context
def experiment_a1a2(ctx: click.Context, radii: str):
    """A1 stability and A2 across enumeration radii."""
    try:
        parsed = tuple(int(x) for x in radii.split(",") if x.strip())
    except ValueError as e:
        raise click.BadParameter(f"radii must be integers: {radii!r}") from e
    _execute(ctx, "experiment a1a2", radii=parsed)


@experiment.command("axioms")
@click.option("--leaves", type=int, help="Use the caterpillar tree model with this many leaves")
@click.option("--k", "k", default=0, show_default=True, help="Allowed additive error")
@click.option("--radius", type=int, help="Enumeration radius (default from config)")
@click.pass_context
def experiment_axioms(ctx: click.Context, leaves: int | None, k: int, radius: int | None):
    """Hyperbolic crossratio axioms, path property and triangle inequality."""
    _execute(ctx, "experiment axioms", leaves=leaves, k=k, radius=radius)


@experiment.command("translation")
@click.option("--g", "element", help="Element such as 'fib' or 'fib*swap^-1'")
@click.option("--n-max", type=int, help="Largest power")
@click.pass_context
def experiment_translation(ctx: click.Context, element: str | None, n_max: int | None):
    """Slope of d(x, x.f^N) against N."""
    _execute(ctx, "experiment translation", element=element, n_max=n_max)


@experiment.command("orbit")
@click.pass_context
def experiment_orbit(ctx: click.Context):
    """Orbit diameter under a marker stabilizer against 2N + 2."""
    _execute(ctx, "experiment orbit")


@experiment.command("wpd")
@click.pass_context
def experiment_wpd(ctx: click.Context):
    """Elements nearly fixing x and x.f^N, counted per N."""
    _execute(ctx, "experiment wpd")


@experiment.command("treemodel")
@click.option("--leaves", default=6, show_default=True, help="Caterpillar leaves")
@click.pass_context
def experiment_treemodel(ctx: click.Context, leaves: int):
    """Tree-model crossratios against the subtree-distance oracle."""
    _execute(ctx, "experiment treemodel", leaves=leaves)


@experiment.command("pairing")
@click.option("--map", "map_name", help="Map name (default from config)")
@click.option("--depth", "k", type=int, help="Current depth")
@click.pass_context
def experiment_pairing(ctx: click.Context, map_name: str | None, k: int | None):
    """Decay of the pairing of a stable tree with its dual current."""
    _execute(ctx, "experiment pairing", map_name=map_name, k=k)


@experiment.command("scaling")
@click.pass_context
def experiment_scaling(ctx: click.Context):
    """Scales of translated trees along growing elements."""
    _execute(ctx, "experiment scaling")


if __name__ == "__main__":
    cli()
