"""Helpers shared by the command modules: config resolution, exit codes, report output."""

import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

import click

from ..config import MAX_SEED, CliConfig, Config
from ..errors import CircuitParseError, HgsaError, LabelError
from ..output import console
from ..reports import REPORT_FORMATS, VerificationReport, render, summary_table, write_report

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3

# Reusable option decorators; None means "take the .env default".
photons_option = click.option(
    "--photons", "-n", type=click.IntRange(2, 6), default=None, help="Photon count N (2-6)"
)
shots_option = click.option(
    "--shots", type=click.IntRange(min=1), default=None, help="Seeded shots per input state"
)
seed_option = click.option(
    "--seed", type=click.IntRange(0, MAX_SEED), default=None, help="Master seed (64-bit)"
)
format_option = click.option(
    "--format",
    "fmt",
    type=click.Choice(REPORT_FORMATS),
    default=None,
    help="Report format",
)
out_option = click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write the report to this file instead of stdout",
)
workers_option = click.option(
    "--workers", type=click.IntRange(min=1), default=None, help="Worker processes"
)


def resolve_config(subcommand: str, **flags) -> CliConfig:
    """Layer flags over .env defaults; invalid values are usage errors (exit 2)."""
    config = CliConfig.resolve(subcommand, Config(), **flags)
    errors = config.validate()
    if errors:
        raise click.UsageError("; ".join(errors))
    return config


@contextmanager
def exit_codes():
    """Map library exceptions onto exit codes 2 (bad input) and 3 (internal)."""
    try:
        yield
    except (LabelError, CircuitParseError) as exc:
        console.error(f"[red]Error:[/red] {exc}", markup=True, highlight=False)
        sys.exit(EXIT_USAGE)
    except click.ClickException:
        raise
    except HgsaError as exc:
        logger.debug("simulation error", exc_info=True)
        console.error(f"[red]Internal error:[/red] {exc}", highlight=False)
        sys.exit(EXIT_INTERNAL)
    except Exception as exc:
        logger.debug("unexpected error", exc_info=True)
        console.error(f"[red]Internal error:[/red] {type(exc).__name__}: {exc}", highlight=False)
        sys.exit(EXIT_INTERNAL)


def emit_report(report: VerificationReport, config: CliConfig, out: Optional[Path] = None) -> None:
    """Text reports get a summary table; json/csv are printed verbatim or written to --out."""
    target = out or config.out
    if target is not None:
        write_report(report, config.format, target)
        console.print(f"[green]✓[/green] Report written to {target}")
    elif config.format == "text":
        console.print(summary_table(report))
        console.document(render(report, "text"))
    else:
        console.document(render(report, config.format))


def finish(report: VerificationReport, config: CliConfig) -> None:
    """Exit 0 on pass, 1 on failure; the verdict line never goes into a json/csv stream."""
    if config.format != "text" and config.out is None:
        sys.exit(EXIT_PASS if report.passed else EXIT_FAIL)
    verdict = "[bold green]PASS[/bold green]" if report.passed else "[bold red]FAIL[/bold red]"
    console.print(f"{report.scope}: {verdict}")
    sys.exit(EXIT_PASS if report.passed else EXIT_FAIL)
