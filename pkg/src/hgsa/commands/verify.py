"""Exhaustive verification command."""

import click

from ..oracle import verify_protocol
from ..output import console
from .common import (
    emit_report,
    exit_codes,
    finish,
    format_option,
    out_option,
    photons_option,
    resolve_config,
    seed_option,
    shots_option,
    workers_option,
)


@click.command(name="verify")
@photons_option
@shots_option
@seed_option
@format_option
@out_option
@workers_option
def cmd(photons, shots, seed, fmt, out, workers):
    """Verify step 1, the TESA contract, the TESA tables and complete discrimination.

    Every one of the 4^N input states is run for --shots seeded shots.
    """
    with exit_codes():
        config = resolve_config(
            "verify",
            photons=photons,
            shots=shots,
            seed=seed,
            format=fmt,
            out=out,
            workers=workers,
        )
        with console.status(
            f"[bold]Verifying N={config.photons}, {config.shots} shots per state...[/bold]"
        ):
            report = verify_protocol(
                config.photons, config.shots, config.seed, config.workers
            )
        emit_report(report, config)
        finish(report, config)
