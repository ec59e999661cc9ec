"""GHZ and hyperentangled GHZ state factory with canonical labels.

A GHZ label names (|b> + sign |~b>)/sqrt(2) on one degree of freedom. The bit
string b and its complement name the same state, so labels are kept in the
form whose leading bit is 0; ``canonicalize`` tracks the global phase picked
up when a complemented name is brought back to that form.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Optional

from .errors import ArgumentError, LabelError
from .hilbert import (
    MAX_PHOTONS,
    Dof,
    ModeSpec,
    PhotonDof,
    StateVector,
    product_state,
    tensor,
)

SIGNS = ("+", "-")
MIN_PHOTONS = 2

_HYPER_PATTERN = re.compile(r"^P([+-])([01]+),T([+-])([01]+)$")


class GhzDof(str, Enum):
    POLARIZATION = "polarization"
    TIMEBIN = "timebin"

    @property
    def prefix(self) -> str:
        return "P" if self is GhzDof.POLARIZATION else "T"

    @property
    def dof(self) -> Dof:
        return Dof.POL if self is GhzDof.POLARIZATION else Dof.SLOT


@dataclass(frozen=True)
class GhzLabel:
    """Canonical name of a single-DOF GHZ state."""

    dof: GhzDof
    sign: str
    bits: str

    def __post_init__(self):
        if self.sign not in SIGNS:
            raise LabelError(f"sign must be '+' or '-', got '{self.sign}'")
        if not self.bits or set(self.bits) - {"0", "1"}:
            raise LabelError(f"bits must be a non-empty binary string, got '{self.bits}'")
        if self.bits[0] != "0":
            raise LabelError(f"'{self.bits}' is not canonical: the leading bit must be 0")

    @property
    def photon_count(self) -> int:
        return len(self.bits)

    @property
    def sort_key(self) -> tuple[int, str]:
        return (SIGNS.index(self.sign), self.bits)

    def __str__(self) -> str:
        return f"{self.dof.prefix}{self.sign}{self.bits}"


@dataclass(frozen=True)
class HyperLabel:
    """Polarization GHZ label paired with a time-bin GHZ label."""

    pol: GhzLabel
    time: GhzLabel

    def __post_init__(self):
        if self.pol.dof is not GhzDof.POLARIZATION or self.time.dof is not GhzDof.TIMEBIN:
            raise LabelError("a hyper label pairs a polarization label with a time-bin label")
        if self.pol.photon_count != self.time.photon_count:
            raise LabelError(
                f"polarization and time-bin labels differ in length ({self.pol.bits} vs {self.time.bits})"
            )

    @property
    def photon_count(self) -> int:
        return self.pol.photon_count

    @classmethod
    def parse(cls, text: str, photons: Optional[int] = None) -> "HyperLabel":
        return parse_label(text, photons)

    def __str__(self) -> str:
        return f"{self.pol},{self.time}"


def complement(bits: str) -> str:
    return "".join("1" if b == "0" else "0" for b in bits)


def canonicalize(
    sign: str, bits: str, dof: GhzDof = GhzDof.POLARIZATION
) -> tuple[GhzLabel, int]:
    """Bring (sign, bits) to leading-bit-0 form.

    Returns the canonical label and the global phase relating the two names:
    complementing a "-" state swaps its terms and flips its overall sign.
    """
    if not bits:
        raise LabelError("cannot canonicalize an empty bit string")
    if bits[0] == "0":
        return GhzLabel(dof, sign, bits), 1
    return GhzLabel(dof, sign, complement(bits)), (1 if sign == "+" else -1)


def parse_label(text: str, photons: Optional[int] = None) -> HyperLabel:
    """Parse ``P<sign><bits>,T<sign><bits>``.

    Non-canonical bit strings are rejected, not rewritten.
    """
    cleaned = text.strip().replace(" ", "").replace("−", "-")
    match = _HYPER_PATTERN.match(cleaned)
    if not match:
        raise LabelError(
            f"'{text}' does not match P<sign><bits>,T<sign><bits> (e.g. P+001,T-010)"
        )
    pol_sign, pol_bits, time_sign, time_bits = match.groups()
    label = HyperLabel(
        GhzLabel(GhzDof.POLARIZATION, pol_sign, pol_bits),
        GhzLabel(GhzDof.TIMEBIN, time_sign, time_bits),
    )
    if photons is not None and label.photon_count != photons:
        raise LabelError(f"'{text}' names {label.photon_count} photons, expected {photons}")
    return label


def canonical_hyper(text: str) -> tuple[HyperLabel, int]:
    """Like parse_label but accepts complemented names, returning the phase too."""
    cleaned = text.strip().replace(" ", "").replace("−", "-")
    match = _HYPER_PATTERN.match(cleaned)
    if not match:
        raise LabelError(f"'{text}' is not a hyper label")
    pol_sign, pol_bits, time_sign, time_bits = match.groups()
    pol, pol_phase = canonicalize(pol_sign, pol_bits, GhzDof.POLARIZATION)
    time, time_phase = canonicalize(time_sign, time_bits, GhzDof.TIMEBIN)
    return HyperLabel(pol, time), pol_phase * time_phase


def check_photon_count(photons: int) -> None:
    if not MIN_PHOTONS <= photons <= MAX_PHOTONS:
        raise ArgumentError(
            f"photon count must be in [{MIN_PHOTONS}, {MAX_PHOTONS}], got {photons}"
        )


def ghz_labels(photons: int, dof: GhzDof = GhzDof.POLARIZATION) -> list[GhzLabel]:
    """All 2^N canonical labels of one DOF, "+" first, then by bits."""
    check_photon_count(photons)
    tails = ("".join(t) for t in product("01", repeat=photons - 1))
    bit_strings = ["0" + t for t in tails]
    return [GhzLabel(dof, sign, bits) for sign in SIGNS for bits in bit_strings]


def enumerate_labels(photons: int) -> list[HyperLabel]:
    """All 4^N hyper labels, polarization major and time-bin minor."""
    pol_labels = ghz_labels(photons, GhzDof.POLARIZATION)
    time_labels = ghz_labels(photons, GhzDof.TIMEBIN)
    return [HyperLabel(p, t) for p in pol_labels for t in time_labels]


def make_ghz(label: GhzLabel, spec: ModeSpec) -> StateVector:
    """(|b> + sign |~b>)/sqrt(2) on the label's DOF of every photon."""
    if label.photon_count != spec.photon_count:
        raise ArgumentError(
            f"label {label} names {label.photon_count} photons but the mode spec has {spec.photon_count}"
        )
    layout = tuple(PhotonDof(p, label.dof.dof) for p in range(spec.photon_count))
    key = tuple(int(b) for b in label.bits)
    flipped = tuple(1 - b for b in key)
    s = 1 / math.sqrt(2)
    terms = {key: s, flipped: s if label.sign == "+" else -s}
    return StateVector(spec, layout, terms)


def make_hyper(label: HyperLabel, spec: ModeSpec) -> StateVector:
    """Polarization GHZ (x) time-bin GHZ, every photon on path x1."""
    pol = make_ghz(label.pol, spec)
    time = make_ghz(label.time, spec)
    paths = product_state(
        spec, {PhotonDof(p, Dof.PATH): 1 for p in range(spec.photon_count)}
    )
    return tensor(tensor(pol, time), paths).reorder(spec.photon_layout())
