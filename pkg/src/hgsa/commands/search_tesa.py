"""Search for an element-level TESA configuration."""

import sys
from pathlib import Path

import click

from ..circuit_file import dump_template, load_template
from ..oracle import SearchSpace, search_tesa_config
from ..output import console
from .common import (
    EXIT_FAIL,
    emit_report,
    exit_codes,
    finish,
    format_option,
    out_option,
    resolve_config,
)


@click.command(name="search-tesa")
@click.option(
    "--circuit",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Template file (photon=*) tried before the enumeration",
)
@click.option(
    "--max-candidates",
    type=click.IntRange(min=0),
    default=None,
    help="Stop after this many candidates",
)
@click.option(
    "--max-prefix",
    type=click.IntRange(0, 5),
    default=5,
    show_default=True,
    help="Longest catalog prefix placed before the beam splitter",
)
@format_option
@out_option
def cmd(circuit, max_candidates, max_prefix, fmt, out):
    """Enumerate per-photon element sequences until one reproduces the TESA outputs.

    Prints the first passing configuration, or "none found" (exit 1).
    """
    with exit_codes():
        config = resolve_config(
            "search-tesa", circuit=circuit, max_candidates=max_candidates, format=fmt, out=out
        )
        seeds = (load_template(config.circuit),) if config.circuit else ()
        space = SearchSpace(
            max_prefix=max_prefix, seeds=seeds, max_candidates=config.max_candidates
        )
        limit = min(space.size, config.max_candidates)
        with console.status(f"[bold]Searching up to {limit} candidates...[/bold]"):
            found, report = search_tesa_config(space)

        if config.format == "text" or config.out is not None:
            if found is None:
                console.print("[yellow]none found[/yellow]")
            else:
                console.print("[bold green]Passing configuration:[/bold green]")
                console.print(dump_template(found), markup=False, highlight=False)
        emit_report(report, config)
        if found is None:
            sys.exit(EXIT_FAIL)
        finish(report, config)
