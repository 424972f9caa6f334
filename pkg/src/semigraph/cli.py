"""
Command-line interface for semigraph.

Subcommands train and evaluate model variants over several seeds, sweep one
hyper-parameter, export hidden graphs from checkpoints, run the numerical
self-checks and write the synthetic benchmark in TU format.
"""

import sys
from pathlib import Path
from typing import List, Optional, Union

import typer
from loguru import logger
from pydantic import ValidationError
from rich import print as rprint
from rich.console import Console
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from .config.settings import load_config
from .core.generator import SyntheticGraphGenerator
from .experiments.export import export_run
from .experiments.runner import run_experiment, sweep as run_sweep
from .ingestion.tu_format import write_tu_dataset
from .schemas.base import RunConfig, SweepParameter, Variant
from .validation.selfcheck import SelfCheckSuite

app = typer.Typer(
    name="semigraph",
    help="semigraph - semi-supervised graph classification with twin graph encoders",
    rich_markup_mode="rich",
)
console = Console()


def _configure_logging(level: str, log_file: Optional[Path] = None) -> None:
    logger.remove()
    logger.add(sys.stderr, level=level.upper())
    if log_file is not None:
        logger.add(str(log_file), level="DEBUG")


def _build_config(
    config_file: Optional[Path],
    overrides: Optional[List[str]],
    **explicit,
) -> RunConfig:
    try:
        return load_config(config_file, overrides or [], **explicit)
    except ValidationError as e:
        rprint(f"[red]Invalid configuration:[/red]\n{e}")
        raise typer.Exit(1)
    except ValueError as e:
        rprint(f"[red]Configuration error: {e}[/red]")
        raise typer.Exit(1)


def _parse_number(text: str) -> Union[int, float]:
    try:
        return int(text)
    except ValueError:
        return float(text)


@app.command()
def run(
    config_file: Optional[Path] = typer.Option(None, "--config", "-c", help="key = value configuration file"),
    overrides: Optional[List[str]] = typer.Option(None, "--set", "-s", help="Override a key: --set tau=0.2"),
    variant: Optional[Variant] = typer.Option(None, help="Model variant"),
    dataset: Optional[str] = typer.Option(None, help="TU dataset directory or 'synthetic'"),
    seeds: Optional[str] = typer.Option(None, help="Comma-separated seeds"),
    epochs: Optional[int] = typer.Option(None, help="Training epochs"),
    output_dir: Optional[Path] = typer.Option(None, help="Directory for reports, histories and checkpoints"),
    log_level: str = typer.Option("INFO", help="Logging level"),
    log_file: Optional[Path] = typer.Option(None, help="Also log (at DEBUG) to this file"),
):
    """
    Train and evaluate one variant over every configured seed.
    """
    _configure_logging(log_level, log_file)
    config = _build_config(
        config_file, overrides, variant=variant, dataset=dataset, seeds=seeds, epochs=epochs,
        output_dir=str(output_dir) if output_dir else None,
    )
    rprint(f"[bold green]Running {config.variant.value}[/bold green] on [bold]{config.dataset}[/bold] "
           f"with seeds {config.seeds}")

    with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"), console=console) as progress:
        task_id = progress.add_task("Training...", total=None)
        try:
            report = run_experiment(config, output_dir=config.output_dir)
        except Exception as e:
            progress.update(task_id, description=f"[red]Run failed: {e}[/red]")
            rprint(f"[red]Run error: {e}[/red]")
            raise typer.Exit(1)
        progress.update(task_id, description="[green]Run completed![/green]")

    table = Table(title=f"{report.variant.value} on {report.dataset}")
    table.add_column("Seed", style="cyan")
    table.add_column("Test Accuracy", style="green")
    table.add_column("Best Epoch", style="yellow")
    table.add_column("Val Accuracy", style="yellow")
    table.add_column("Secondary Vote", style="magenta")
    for result in report.per_seed:
        vote = "-" if result.secondary_vote_accuracy is None else f"{result.secondary_vote_accuracy:.4f}"
        table.add_row(str(result.seed), f"{result.test_accuracy:.4f}", str(result.best_epoch),
                      f"{result.best_val_accuracy:.4f}", vote)
    console.print(table)
    rprint(f"Mean accuracy: [bold yellow]{report.mean:.4f} ± {report.std:.4f}[/bold yellow] "
           f"({report.wall_time:.1f}s)")
    rprint(f"[green]Outputs written to {config.output_dir}[/green]")


@app.command()
def sweep(
    parameter: str = typer.Argument(..., help="One of d, P, label_ratio, lambda, M"),
    values: str = typer.Argument(..., help="Comma-separated values"),
    config_file: Optional[Path] = typer.Option(None, "--config", "-c", help="key = value configuration file"),
    overrides: Optional[List[str]] = typer.Option(None, "--set", "-s", help="Override a key: --set tau=0.2"),
    output_dir: Optional[Path] = typer.Option(None, help="Directory for the sweep table and per-value runs"),
    log_level: str = typer.Option("INFO", help="Logging level"),
):
    """
    Run the configuration once per value of PARAMETER and write a CSV table.
    """
    _configure_logging(log_level)
    config = _build_config(config_file, overrides, output_dir=str(output_dir) if output_dir else None)
    try:
        SweepParameter.parse(parameter)
        numbers = [_parse_number(v.strip()) for v in values.split(",") if v.strip()]
    except ValueError as e:
        rprint(f"[red]Invalid sweep request: {e}[/red]")
        raise typer.Exit(1)

    try:
        table_frame = run_sweep(config, parameter, numbers, output_dir=config.output_dir)
    except Exception as e:
        rprint(f"[red]Sweep error: {e}[/red]")
        raise typer.Exit(1)

    table = Table(title=f"Sweep over {parameter}")
    table.add_column("Value", style="cyan")
    table.add_column("Mean", style="green")
    table.add_column("Std", style="yellow")
    for row in table_frame.itertuples(index=False):
        table.add_row(str(row.value), f"{row.mean:.4f}", f"{row.std:.4f}")
    console.print(table)
    rprint(f"[green]Sweep table saved under {config.output_dir}[/green]")


@app.command()
def export(
    checkpoint: Path = typer.Argument(..., help="Checkpoint written by 'run'"),
    output_dir: Path = typer.Option(Path("export"), help="Directory for DOT files and manifest"),
    threshold: float = typer.Option(0.0, help="Keep hidden-graph edges with weight above this"),
    log_level: str = typer.Option("INFO", help="Logging level"),
):
    """
    Dump the hidden graphs of a trained run as DOT files plus a manifest.
    """
    _configure_logging(log_level)
    if not checkpoint.exists():
        rprint(f"[red]Checkpoint not found: {checkpoint}[/red]")
        raise typer.Exit(1)
    try:
        manifest = export_run(checkpoint, output_dir, threshold)
    except Exception as e:
        rprint(f"[red]Export error: {e}[/red]")
        raise typer.Exit(1)
    rprint(f"[green]Manifest written: {manifest}[/green]")


@app.command()
def check(
    seed: int = typer.Option(0, help="Seed of the random instances"),
    instances: int = typer.Option(100, help="Random instances per primitive gradient check"),
    quick: bool = typer.Option(False, help="Smaller oracle, distribution and bank trials"),
    log_level: str = typer.Option("WARNING", help="Logging level"),
):
    """
    Run the gradient, kernel-oracle, loss and memory-bank self-checks.
    """
    _configure_logging(log_level)
    if quick:
        suite = SelfCheckSuite(seed, instances=min(instances, 2), oracle_pairs=20,
                               distribution_trials=100, bank_sequences=500)
    else:
        suite = SelfCheckSuite(seed, instances=instances)
    results = suite.run()

    table = Table(title="Self-check Results")
    table.add_column("Check", style="cyan")
    table.add_column("Status", style="bold")
    table.add_column("Value", style="yellow")
    table.add_column("Threshold", style="yellow")
    table.add_column("Detail")
    for result in results:
        table.add_row(
            result.name,
            "[green]PASS[/green]" if result.passed else "[red]FAIL[/red]",
            "-" if result.value is None else f"{result.value:.3e}",
            "-" if result.threshold is None else f"{result.threshold:.0e}",
            result.detail,
        )
    console.print(table)
    failed = [r for r in results if not r.passed]
    if failed:
        rprint(f"[red]{len(failed)} of {len(results)} checks failed[/red]")
        raise typer.Exit(1)
    rprint(f"[green]All {len(results)} checks passed[/green]")


@app.command()
def synthesize(
    output_dir: Path = typer.Argument(..., help="Directory for the TU files"),
    graphs: int = typer.Option(300, help="Number of graphs"),
    seed: int = typer.Option(0, help="Generator seed"),
    name: str = typer.Option("SYNTHETIC", help="Dataset name prefix"),
    max_degree: int = typer.Option(16, help="Clamp for one-hot degree features"),
):
    """
    Write the synthetic cycles / stars / near-complete benchmark in TU format.
    """
    _configure_logging("WARNING")
    try:
        dataset = SyntheticGraphGenerator(seed=seed, max_degree=max_degree).generate(graphs, name=name)
        write_tu_dataset(dataset, output_dir, name)
    except Exception as e:
        rprint(f"[red]Synthesis error: {e}[/red]")
        raise typer.Exit(1)
    rprint(f"[green]Wrote {len(dataset)} graphs ({dataset.num_classes} classes) to {output_dir}[/green]")


if __name__ == "__main__":
    app()
