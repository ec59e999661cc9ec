#!/usr/bin/env python3
"""CLI entry point for hgsa."""

import sys

import click

from .commands import analyze, search_tesa, tables, verify
from .output import configure_logging, set_quiet


@click.group()
@click.version_option(package_name="hgsa")
@click.option(
    "--quiet",
    "-q",
    is_flag=True,
    help="Suppress non-essential output. Errors and reports are still shown.",
)
@click.option("--verbose", "-v", is_flag=True, help="Log simulation progress at DEBUG level.")
def main(quiet: bool, verbose: bool):
    """Simulate and verify two-step hyperentangled GHZ-state analysis."""
    set_quiet(quiet)
    configure_logging(verbose)


main.add_command(analyze.cmd)
main.add_command(verify.cmd)
main.add_command(tables.cmd)
main.add_command(search_tesa.cmd)


if __name__ == "__main__":
    sys.exit(main())
