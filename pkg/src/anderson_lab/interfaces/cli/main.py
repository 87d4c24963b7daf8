"""CLI interface for Anderson Lab."""

import logging
from pathlib import Path
from typing import Any, Optional

# Load .env file before any other imports that might need env vars
from dotenv import find_dotenv, load_dotenv

load_dotenv(find_dotenv(usecwd=True))

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from ...config.loader import load_run_config
from ...config.settings import settings
from ...errors import CheckFailure, ConfigError, NumericalError, SpecMismatchError
from ...flows import CheckFlow, ConvergeFlow, NoiseFlow, OperatorFlow, SolveFlow
from ...flows.base import ExperimentFlow
from ...models.flow_state import ExecutionStatus
from ...storage.registry import RunRegistry

app = typer.Typer(
    name="anderson-lab",
    help="Renormalized Anderson Hamiltonian experiments on 2-d and 3-d tori",
    no_args_is_help=True,
)
console = Console()

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_CHECK = 4

ConfigOption = typer.Option(
    None, "--config", "-c", help="YAML run config merged over the defaults", exists=True
)
SeedOption = typer.Option(None, "--seed", help="Noise seed")
EpsOption = typer.Option(
    None, "--eps", help="eps ladder; repeat the flag or give a comma-separated list"
)
DimOption = typer.Option(None, "--dim", help="Torus dimension (2 or 3)")
KOption = typer.Option(None, "--K", help="Lattice cutoff |k|_inf <= K")
WorkersOption = typer.Option(None, "--workers", "-w", help="Process pool size for the rungs")
OutOption = typer.Option(None, "--out", "-o", help="Output root for run directories")
AllowOption = typer.Option(
    False,
    "--allow-out-of-range-exponents",
    help="Accept exponents outside the admissible windows",
)
ForceOption = typer.Option(False, "--force", "-f", help="Recompute even if a completed run exists")


@app.callback()
def main(
    log_level: Optional[str] = typer.Option(
        None, "--log-level", help="Logging level (default from settings)"
    ),
) -> None:
    """Configure logging for every command."""
    logging.basicConfig(
        level=(log_level or settings.log_level).upper(),
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


def parse_eps(values: Optional[list[str]]) -> Optional[list[float]]:
    """Flatten repeated and comma-separated --eps values.

    Raises:
        ConfigError: If a value is not a number
    """
    if not values:
        return None
    ladder = []
    for value in values:
        for part in value.split(","):
            if not part.strip():
                continue
            try:
                ladder.append(float(part))
            except ValueError as e:
                raise ConfigError(f"--eps value {part!r} is not a number") from e
    return ladder


def build_overrides(
    seed: Optional[int],
    eps: Optional[list[str]],
    dim: Optional[int],
    K: Optional[int],
    allow_out_of_range: bool,
) -> dict[str, Any]:
    """Nested config overrides from the command-line flags."""
    overrides: dict[str, Any] = {}
    torus: dict[str, Any] = {}
    if dim is not None:
        torus["dim"] = dim
    if K is not None:
        torus["K"] = K
    if torus:
        overrides["torus"] = torus
    noise: dict[str, Any] = {}
    if seed is not None:
        noise["seed"] = seed
    ladder = parse_eps(eps)
    if ladder is not None:
        noise["eps"] = ladder
    if noise:
        overrides["noise"] = noise
    if allow_out_of_range:
        overrides["allow_out_of_range_exponents"] = True
    return overrides


def _show_result(flow: ExperimentFlow) -> None:
    state = flow.state
    color = {
        ExecutionStatus.COMPLETED: "green",
        ExecutionStatus.REUSED: "cyan",
        ExecutionStatus.CHECK_FAILED: "red",
    }.get(state.execution_status, "yellow")
    console.print(
        Panel(
            f"[bold]Command:[/bold] {state.command}\n"
            f"[bold]Status:[/bold] [{color}]{state.execution_status.value}[/{color}]\n"
            f"[bold]Run:[/bold] {state.run_hash}\n"
            f"[bold]Directory:[/bold] {state.run_dir}\n"
            f"[bold]Artifacts:[/bold] {len(state.artifacts)}",
            title="Run Complete",
        )
    )

    scalars = {k: v for k, v in state.records.items() if isinstance(v, (int, float, str, bool))}
    if scalars:
        table = Table(title="Summary")
        table.add_column("Record", style="cyan")
        table.add_column("Value", justify="right")
        for key, value in scalars.items():
            table.add_row(key, f"{value:.6g}" if isinstance(value, float) else str(value))
        console.print(table)

    if state.checks:
        table = Table(title="Checks")
        table.add_column("Check", style="cyan")
        table.add_column("Result")
        table.add_column("Value", justify="right")
        table.add_column("Threshold", justify="right")
        table.add_column("Detail", style="dim")
        for check in state.checks:
            result = "[green]pass[/green]" if check.passed else "[red]FAIL[/red]"
            table.add_row(
                check.name, result, f"{check.value:.3e}", f"{check.threshold:.1e}", check.detail
            )
        console.print(table)

    if state.warnings:
        console.print(f"\n[yellow]Warnings ({len(state.warnings)}):[/yellow]")
        for warning in state.warnings[:10]:
            console.print(f"  - {warning}")


def execute(
    flow_cls: type[ExperimentFlow],
    config_path: Optional[Path],
    overrides: dict[str, Any],
    workers: Optional[int],
    out: Optional[Path],
    force: bool,
    **flow_kwargs: Any,
) -> ExperimentFlow:
    """Load the config, run the flow and map failures to exit codes."""
    try:
        config = load_run_config(config_path, overrides)
        flow = flow_cls(
            config,
            root=out,
            registry=RunRegistry(),
            workers=workers or settings.default_workers,
            reuse=not force,
            **flow_kwargs,
        )
        flow.kickoff()
    except (ConfigError, SpecMismatchError) as e:
        console.print(f"[red]Invalid configuration:[/red] {e}")
        raise typer.Exit(EXIT_CONFIG)
    except NumericalError as e:
        console.print(f"[red]Numerical failure:[/red] {e}")
        raise typer.Exit(EXIT_NUMERICAL)
    except CheckFailure as e:
        console.print(f"[red]Check failed:[/red] {e}")
        raise typer.Exit(EXIT_CHECK)

    _show_result(flow)
    if flow.state.execution_status is ExecutionStatus.CHECK_FAILED:
        raise typer.Exit(EXIT_CHECK)
    return flow


@app.command()
def noise(
    config: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    eps: Optional[list[str]] = EpsOption,
    dim: Optional[int] = DimOption,
    K: Optional[int] = KOption,
    workers: Optional[int] = WorkersOption,
    out: Optional[Path] = OutOption,
    allow_out_of_range_exponents: bool = AllowOption,
    force: bool = ForceOption,
) -> None:
    """Sample and enhance the noise; write constants, ladders and fields."""
    overrides = _overrides(seed, eps, dim, K, allow_out_of_range_exponents)
    execute(NoiseFlow, config, overrides, workers, out, force)


@app.command()
def operator(
    config: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    eps: Optional[list[str]] = EpsOption,
    dim: Optional[int] = DimOption,
    K: Optional[int] = KOption,
    workers: Optional[int] = WorkersOption,
    out: Optional[Path] = OutOption,
    allow_out_of_range_exponents: bool = AllowOption,
    force: bool = ForceOption,
) -> None:
    """Build the shifted operators; write spectra, resolvent ladder and inequality report."""
    overrides = _overrides(seed, eps, dim, K, allow_out_of_range_exponents)
    execute(OperatorFlow, config, overrides, workers, out, force)


@app.command()
def solve(
    config: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    eps: Optional[list[str]] = EpsOption,
    dim: Optional[int] = DimOption,
    K: Optional[int] = KOption,
    workers: Optional[int] = WorkersOption,
    out: Optional[Path] = OutOption,
    allow_out_of_range_exponents: bool = AllowOption,
    force: bool = ForceOption,
    order_test: bool = typer.Option(
        False, "--order-test", help="Also fit the energy-drift order over the dt sweep"
    ),
) -> None:
    """Run NLS or wave on the finest rung; write the trace and a-priori checks."""
    overrides = _overrides(seed, eps, dim, K, allow_out_of_range_exponents)
    execute(SolveFlow, config, overrides, workers, out, force, order_test=order_test)


@app.command()
def converge(
    config: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    eps: Optional[list[str]] = EpsOption,
    dim: Optional[int] = DimOption,
    K: Optional[int] = KOption,
    workers: Optional[int] = WorkersOption,
    out: Optional[Path] = OutOption,
    allow_out_of_range_exponents: bool = AllowOption,
    force: bool = ForceOption,
) -> None:
    """Solve on every rung and tabulate phi_eps(t) between consecutive rungs."""
    overrides = _overrides(seed, eps, dim, K, allow_out_of_range_exponents)
    execute(ConvergeFlow, config, overrides, workers, out, force)


@app.command()
def check(
    config: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    eps: Optional[list[str]] = EpsOption,
    dim: Optional[int] = DimOption,
    K: Optional[int] = KOption,
    workers: Optional[int] = WorkersOption,
    out: Optional[Path] = OutOption,
    allow_out_of_range_exponents: bool = AllowOption,
    force: bool = ForceOption,
) -> None:
    """Run the invariant suites; exit 4 if any check fails."""
    overrides = _overrides(seed, eps, dim, K, allow_out_of_range_exponents)
    execute(CheckFlow, config, overrides, workers, out, force)


@app.command()
def runs(
    limit: int = typer.Option(20, "--limit", "-l", help="Maximum runs to list"),
) -> None:
    """List recent runs from the registry."""
    rows = RunRegistry().list_runs(limit)
    if not rows:
        console.print("[yellow]No runs registered.[/yellow]")
        return
    table = Table()
    table.add_column("ID", style="dim")
    table.add_column("Command", style="cyan")
    table.add_column("Run", style="magenta")
    table.add_column("Status")
    table.add_column("Wall time", justify="right")
    table.add_column("Path")
    for row in rows:
        wall = f"{row.wall_time:.2f}s" if row.wall_time is not None else "-"
        table.add_row(str(row.id), row.command, row.run_hash, row.status, wall, row.path)
    console.print(table)


def _overrides(
    seed: Optional[int],
    eps: Optional[list[str]],
    dim: Optional[int],
    K: Optional[int],
    allow_out_of_range: bool,
) -> dict[str, Any]:
    try:
        return build_overrides(seed, eps, dim, K, allow_out_of_range)
    except ConfigError as e:
        console.print(f"[red]Invalid configuration:[/red] {e}")
        raise typer.Exit(EXIT_CONFIG)


if __name__ == "__main__":
    app()
