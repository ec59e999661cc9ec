"""Defaults for the hgsa command line, optionally read from .env."""

import os
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from .hilbert import MAX_PHOTONS
from .reports import REPORT_FORMATS
from .states import MIN_PHOTONS

MAX_SEED = 2**64 - 1

ENV_NAMES = {
    "photons": "HGSA_PHOTONS",
    "shots": "HGSA_SHOTS",
    "seed": "HGSA_SEED",
    "format": "HGSA_FORMAT",
    "workers": "HGSA_WORKERS",
    "max_candidates": "HGSA_MAX_CANDIDATES",
}


def _int_env(name: str, default: int) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        return None


def check_values(values: dict, names: dict[str, str]) -> list[str]:
    """Range checks shared by Config (.env names) and CliConfig (flag names)."""
    errors = []
    photons = values.get("photons")
    if photons is None or not MIN_PHOTONS <= photons <= MAX_PHOTONS:
        errors.append(f"{names['photons']} must be an integer in [{MIN_PHOTONS}, {MAX_PHOTONS}]")
    shots = values.get("shots")
    if shots is None or shots < 1:
        errors.append(f"{names['shots']} must be a positive integer")
    seed = values.get("seed")
    if seed is None or not 0 <= seed <= MAX_SEED:
        errors.append(f"{names['seed']} must be an integer in [0, 2^64)")
    workers = values.get("workers")
    if workers is None or workers < 1:
        errors.append(f"{names['workers']} must be a positive integer")
    max_candidates = values.get("max_candidates")
    if max_candidates is None or max_candidates < 0:
        errors.append(f"{names['max_candidates']} must be a non-negative integer")
    if values.get("format") not in REPORT_FORMATS:
        errors.append(f"{names['format']} must be one of {', '.join(REPORT_FORMATS)}")
    return errors


class Config:
    """Defaults loaded from .env in the project directory.

    Every value can be overridden by the matching command-line flag; a value
    that does not parse is kept as None and reported by validate().
    """

    def __init__(self, project_dir: Optional[Path] = None):
        self.project_dir = project_dir or Path.cwd()
        load_dotenv(self.project_dir / ".env")

        self.photons = _int_env("HGSA_PHOTONS", 3)
        self.shots = _int_env("HGSA_SHOTS", 100)
        self.seed = _int_env("HGSA_SEED", 0)
        self.workers = _int_env("HGSA_WORKERS", 1)
        self.max_candidates = _int_env("HGSA_MAX_CANDIDATES", 100_000)
        self.format = os.getenv("HGSA_FORMAT", "text").lower()

    def as_dict(self) -> dict:
        return {key: getattr(self, key) for key in ENV_NAMES}

    def validate(self) -> list[str]:
        """Human-readable problems with the loaded defaults."""
        return check_values(self.as_dict(), ENV_NAMES)


@dataclass(frozen=True)
class CliConfig:
    """One resolved invocation: flags layered over Config defaults."""

    subcommand: str
    photons: Optional[int]
    shots: Optional[int] = 100
    seed: Optional[int] = 0
    format: str = "text"
    circuit: Optional[Path] = None
    state: Optional[str] = None
    max_candidates: Optional[int] = 100_000
    out: Optional[Path] = None
    workers: Optional[int] = 1

    @classmethod
    def resolve(cls, subcommand: str, defaults: Config, **flags) -> "CliConfig":
        """Flags left at None fall back to the .env defaults."""
        values = defaults.as_dict()
        values.update({k: v for k, v in flags.items() if v is not None})
        return cls(subcommand=subcommand, **values)

    def validate(self) -> list[str]:
        names = {key: f"--{key.replace('_', '-')}" for key in ENV_NAMES}
        return check_values(asdict(self), names)
