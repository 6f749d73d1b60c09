"""
Continuum ladder operators and coherent states.
Verifies the closed-form identities numerically and exports tables.
"""
from __future__ import annotations

import logging
import os
import sys
from pathlib import Path
from typing import Annotated
from typing import Any
from typing import Optional

import typer

from config import Convention
from config import Family
from config import OutputFormat
from config import RunConfig
from errors import ContinuumError
from verify_app import VerificationApp

# Logging configuration; tables may go to stdout, so logs use stderr
DEFAULT_LOG_LEVEL = "INFO"
log_level = os.environ.get("CONTSPEC_LOG", DEFAULT_LOG_LEVEL).upper()

logging.basicConfig(
    level=log_level,
    format="%(levelname)s - %(message)s",
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)

EXIT_FAIL = 1
EXIT_CONFIG = 2

app = typer.Typer(help="Continuum ladder operators and coherent states.")

# CLI Option Aliases
FamilyOpt = Annotated[
    Optional[Family],
    typer.Option(case_sensitive=False, help="translation or dilation"),
]
AlphaOpt = Annotated[Optional[float], typer.Option(help="Translation alpha")]
BetaOpt = Annotated[Optional[float], typer.Option(help="Dilation beta")]
LambdaOpt = Annotated[
    Optional[float], typer.Option("--lambda", help="Dilation step in (0, 1)")
]
EpsilonOpt = Annotated[
    Optional[float], typer.Option(help="Translation step eps")
]
SOpt = Annotated[
    Optional[list[float]],
    typer.Option("--s", help="Label s (repeat for several values)"),
]
ShapesOpt = Annotated[
    Optional[list[float]],
    typer.Option("--shapes", help="Shape parameters for grids and scans"),
]
ProbeOpt = Annotated[
    Optional[list[float]],
    typer.Option("--probe", help="Moment probes (E or ln E)"),
]
GammaOpt = Annotated[Optional[float], typer.Option(help="Label gamma")]
OmegaOpt = Annotated[Optional[float], typer.Option(help="H = omega E")]
GridOpt = Annotated[
    Optional[str], typer.Option(help="Energy grid as start:stop:num")
]
TolOpt = Annotated[
    Optional[float],
    typer.Option("--tol", help="Relative tolerance of every quadrature"),
]
ConventionOpt = Annotated[
    Optional[Convention],
    typer.Option(case_sensitive=False, help="paper, kernel or auto"),
]
FormatOpt = Annotated[
    Optional[OutputFormat],
    typer.Option("--format", case_sensitive=False, help="json or csv"),
]
OutOpt = Annotated[
    Optional[Path], typer.Option(help="Output file (default: stdout)")
]
JobsOpt = Annotated[Optional[int], typer.Option(help="Worker threads")]
ConfigOpt = Annotated[
    Optional[Path],
    typer.Option("--config", help="JSON config file (flags override it)"),
]
ProductsOpt = Annotated[
    bool, typer.Option(help="Emit continuum-product convergence tables")
]


def _load_app(config_path: Optional[Path], **flags: Any) -> VerificationApp:
    """Builds the app or exits with the config error code."""
    try:
        config = RunConfig.from_args(config_path=config_path, **flags)
        return VerificationApp(config)
    except ValueError as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(code=EXIT_CONFIG)


def _run(action: Any) -> Any:
    """Maps library errors onto exit codes."""
    try:
        return action()
    except ContinuumError as e:
        logger.error(str(e))
        code = EXIT_CONFIG if isinstance(e, ValueError) else EXIT_FAIL
        raise typer.Exit(code=code)
    except ValueError as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(code=EXIT_CONFIG)


@app.command()
def verify(
    family: FamilyOpt = None,
    alpha: AlphaOpt = None,
    beta: BetaOpt = None,
    lam: LambdaOpt = None,
    epsilon: EpsilonOpt = None,
    s: SOpt = None,
    shapes: ShapesOpt = None,
    probe: ProbeOpt = None,
    gamma: GammaOpt = None,
    omega: OmegaOpt = None,
    tol: TolOpt = None,
    convention: ConventionOpt = None,
    output_format: FormatOpt = None,
    out: OutOpt = None,
    jobs: JobsOpt = None,
    config: ConfigOpt = None,
) -> None:
    """Run the axiom suite; exit 0 iff every verdict passes."""
    verifier = _load_app(
        config,
        family=family,
        alpha=alpha,
        beta=beta,
        lam=lam,
        epsilon=epsilon,
        s_values=s,
        shape_values=shapes,
        probes=probe,
        gamma=gamma,
        omega=omega,
        rel_tol=tol,
        convention=convention,
        output_format=output_format,
        out=out,
        jobs=jobs,
    )
    report = _run(verifier.verify)
    if not report.passed:
        failed = [k for k, v in report.verdict.items() if not v.passed]
        logger.error(f"verification failed: {', '.join(failed)}")
        raise typer.Exit(code=EXIT_FAIL)
    logger.info("all checks passed")


@app.command()
def kernel(
    family: FamilyOpt = None,
    alpha: AlphaOpt = None,
    beta: BetaOpt = None,
    s: SOpt = None,
    gamma: GammaOpt = None,
    grid: GridOpt = None,
    output_format: FormatOpt = None,
    out: OutOpt = None,
    config: ConfigOpt = None,
) -> None:
    """Sample the coherent-state kernel as rows (E, re, im)."""
    verifier = _load_app(
        config,
        family=family,
        alpha=alpha,
        beta=beta,
        s_values=s,
        gamma=gamma,
        grid=grid,
        output_format=output_format,
        out=out,
    )
    _run(verifier.kernel)


@app.command()
def commutator(
    family: FamilyOpt = None,
    alpha: AlphaOpt = None,
    beta: BetaOpt = None,
    lam: LambdaOpt = None,
    epsilon: EpsilonOpt = None,
    grid: GridOpt = None,
    convention: ConventionOpt = None,
    output_format: FormatOpt = None,
    out: OutOpt = None,
    config: ConfigOpt = None,
) -> None:
    """Commutator multipliers of both provenances and the limit ratio."""
    verifier = _load_app(
        config,
        family=family,
        alpha=alpha,
        beta=beta,
        lam=lam,
        epsilon=epsilon,
        grid=grid,
        convention=convention,
        output_format=output_format,
        out=out,
    )
    _run(verifier.commutator)


@app.command()
def moments(
    family: FamilyOpt = None,
    shapes: ShapesOpt = None,
    probe: ProbeOpt = None,
    tol: TolOpt = None,
    convention: ConventionOpt = None,
    products: ProductsOpt = False,
    output_format: FormatOpt = None,
    out: OutOpt = None,
    config: ConfigOpt = None,
) -> None:
    """Moment-problem residuals, or product convergence with --products."""
    verifier = _load_app(
        config,
        family=family,
        shape_values=shapes,
        probes=probe,
        rel_tol=tol,
        convention=convention,
        output_format=output_format,
        out=out,
    )
    _run(lambda: verifier.moments(products=products))


@app.command()
def scan(
    family: FamilyOpt = None,
    s: SOpt = None,
    shapes: ShapesOpt = None,
    lam: LambdaOpt = None,
    epsilon: EpsilonOpt = None,
    gamma: GammaOpt = None,
    omega: OmegaOpt = None,
    convention: ConventionOpt = None,
    output_format: FormatOpt = None,
    out: OutOpt = None,
    tol: TolOpt = None,
    jobs: JobsOpt = None,
    config: ConfigOpt = None,
) -> None:
    """Residuals over the (s, shape) grid, one row per point."""
    verifier = _load_app(
        config,
        family=family,
        s_values=s,
        shape_values=shapes,
        lam=lam,
        epsilon=epsilon,
        gamma=gamma,
        omega=omega,
        convention=convention,
        output_format=output_format,
        out=out,
        rel_tol=tol,
        jobs=jobs,
    )
    _run(verifier.scan)


if __name__ == "__main__":
    app()
