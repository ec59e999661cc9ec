"""Regenerate the atom table and the detector-group table from simulation."""

import csv
import io
import json
import time

import click
from rich.table import Table

from ..oracle import TESA_PHOTONS, atom_table, group_table, verify_atom_table, verify_group_table
from ..output import console
from ..reports import VerificationReport
from .common import (
    exit_codes,
    finish,
    format_option,
    out_option,
    photons_option,
    resolve_config,
)


@click.command(name="tables")
@photons_option
@format_option
@out_option
def cmd(photons, fmt, out):
    """Print the atom readout table and the detector-group table for N photons.

    At N=3 both tables are also compared row for row with the reference
    tables; any mismatch is shown as a diff and exits 1.
    """
    with exit_codes():
        config = resolve_config("tables", photons=photons, format=fmt, out=out)
        start = time.perf_counter()
        atoms = atom_table(config.photons)
        groups = group_table(config.photons)

        report = VerificationReport(scope=f"tables N={config.photons}")
        report.add_section(verify_atom_table(config.photons))
        report.add_section(verify_group_table(config.photons))
        if config.photons == TESA_PHOTONS:
            report.note("compared with the reference tables")
        report.duration_ms = (time.perf_counter() - start) * 1000.0

        if config.format == "json":
            text = _tables_json(atoms, groups, report)
        elif config.format == "csv":
            text = _tables_csv(atoms, groups)
        else:
            text = None

        if config.out is not None:
            config.out.write_text(text if text is not None else _tables_plain(atoms, groups))
            console.print(f"[green]✓[/green] Tables written to {config.out}")
        elif text is not None:
            console.document(text)
        else:
            console.print(_atom_rich_table(atoms))
            console.print(_group_rich_table(groups))

        _print_diff(report)
        finish(report, config)


def _tables_json(atoms, groups, report: VerificationReport) -> str:
    data = {
        "atom_table": [{"label": str(pol), "atoms": list(readout)} for pol, readout in atoms],
        "group_table": [
            {"group": str(group), "labels": [str(label) for label in labels]}
            for group, labels in groups.items()
        ],
        "report": report.to_dict(),
    }
    return json.dumps(data, indent=2) + "\n"


def _tables_csv(atoms, groups) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["Table", "Key", "Value"])
    for pol, readout in atoms:
        writer.writerow(["atoms", str(pol), "".join(readout)])
    for group, labels in groups.items():
        writer.writerow(["groups", str(group), " ".join(str(label) for label in labels)])
    return buffer.getvalue()


def _tables_plain(atoms, groups) -> str:
    lines = [f"{pol}  {' '.join(readout)}" for pol, readout in atoms]
    lines.append("")
    lines += [f"{group}  {' '.join(str(label) for label in labels)}" for group, labels in groups.items()]
    return "\n".join(lines) + "\n"


def _atom_rich_table(atoms) -> Table:
    table = Table(title="Atom readouts")
    table.add_column("Polarization state", style="cyan")
    for index in range(len(atoms[0][1])):
        table.add_column(f"Atom {index + 1}", justify="center")
    for pol, readout in atoms:
        table.add_row(str(pol), *readout)
    return table


def _group_rich_table(groups) -> Table:
    table = Table(title="Detector groups")
    table.add_column("Group", style="cyan")
    table.add_column("States")
    for group, labels in groups.items():
        table.add_row(str(group), ", ".join(str(label) for label in labels))
    return table


def _print_diff(report: VerificationReport):
    for section in report.walk():
        for case in section.failures:
            console.error(f"[bold]{section.scope}[/bold] {case.input}", highlight=False)
            console.error(f"[red]- {case.expected}[/red]", highlight=False)
            console.error(f"[green]+ {case.observed}[/green]", highlight=False)
