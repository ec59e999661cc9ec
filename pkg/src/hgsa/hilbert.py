"""Composite-system state algebra for photons and cavity atoms.

A photon carries three degrees of freedom (polarization, time slot, path) and
every cavity atom is a two-level system. States are stored sparsely: a map from
basis keys to complex amplitudes, where a basis key is the tuple of levels of
the subsystems listed in the state's layout.

Polarization levels are 0 = H and 1 = V, time slots run 0..T-1 (S = 0,
L = 1), paths run 1..P and atom levels are 0 and 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from itertools import product
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Protocol, Sequence, Union

import numpy as np

from .errors import (
    ArgumentError,
    CompositionError,
    ModeSpecError,
    PreconditionError,
)

logger = logging.getLogger(__name__)

AMPLITUDE_CUTOFF = 1e-12
NORM_TOLERANCE = 1e-10

MAX_PHOTONS = 6
MAX_TIME_SLOTS = 4
MAX_PATHS = 2
MAX_ATOMS = 6

DEFAULT_TIME_SLOTS = 4
DEFAULT_PATHS = 2

POL_LABELS = ("H", "V")
SLOT_LABELS = ("S", "L")
PM_LABELS = ("+", "-")


class Dof(str, Enum):
    """Photonic degrees of freedom."""

    POL = "pol"
    SLOT = "slot"
    PATH = "path"


@dataclass(frozen=True, order=True)
class PhotonDof:
    """One degree of freedom of one photon (0-based photon index)."""

    photon: int
    dof: Dof

    def __str__(self) -> str:
        return f"photon{self.photon + 1}.{self.dof.value}"


@dataclass(frozen=True, order=True)
class AtomId:
    """A cavity atom (0-based index)."""

    index: int

    def __str__(self) -> str:
        return f"atom{self.index + 1}"


Subsystem = Union[PhotonDof, AtomId]
BasisState = tuple  # levels of the layout's subsystems, in layout order


def photon_dofs(photon: int) -> tuple[PhotonDof, PhotonDof, PhotonDof]:
    """All three subsystems of one photon."""
    return (
        PhotonDof(photon, Dof.POL),
        PhotonDof(photon, Dof.SLOT),
        PhotonDof(photon, Dof.PATH),
    )


@dataclass(frozen=True)
class ModeSpec:
    """Sizes of the simulated system."""

    photon_count: int
    time_slots: int = DEFAULT_TIME_SLOTS
    paths_per_photon: int = DEFAULT_PATHS
    atom_count: int = 0

    def __post_init__(self):
        if not 1 <= self.photon_count <= MAX_PHOTONS:
            raise ModeSpecError(f"photon_count must be in [1, {MAX_PHOTONS}], got {self.photon_count}")
        if not 2 <= self.time_slots <= MAX_TIME_SLOTS:
            raise ModeSpecError(f"time_slots must be in [2, {MAX_TIME_SLOTS}], got {self.time_slots}")
        if not 1 <= self.paths_per_photon <= MAX_PATHS:
            raise ModeSpecError(
                f"paths_per_photon must be in [1, {MAX_PATHS}], got {self.paths_per_photon}"
            )
        if not 0 <= self.atom_count <= MAX_ATOMS:
            raise ModeSpecError(f"atom_count must be in [0, {MAX_ATOMS}], got {self.atom_count}")

    @property
    def dimension(self) -> int:
        """Total basis dimension (2*T*P)^N * 2^M."""
        photon_dim = 2 * self.time_slots * self.paths_per_photon
        return photon_dim**self.photon_count * 2**self.atom_count

    def contains(self, subsystem: Subsystem) -> bool:
        if isinstance(subsystem, PhotonDof):
            return 0 <= subsystem.photon < self.photon_count
        if isinstance(subsystem, AtomId):
            return 0 <= subsystem.index < self.atom_count
        return False

    def levels(self, subsystem: Subsystem) -> tuple[int, ...]:
        """Admissible levels of a subsystem."""
        if isinstance(subsystem, AtomId):
            return (0, 1)
        if subsystem.dof is Dof.POL:
            return (0, 1)
        if subsystem.dof is Dof.SLOT:
            return tuple(range(self.time_slots))
        return tuple(range(1, self.paths_per_photon + 1))

    def photon_layout(self) -> tuple[PhotonDof, ...]:
        return tuple(s for p in range(self.photon_count) for s in photon_dofs(p))

    def atom_layout(self) -> tuple[AtomId, ...]:
        return tuple(AtomId(m) for m in range(self.atom_count))

    def full_layout(self) -> tuple[Subsystem, ...]:
        return self.photon_layout() + self.atom_layout()

    def compatible(self, other: "ModeSpec") -> bool:
        """Same photons and lattice; the atom count only bounds atom indices."""
        return (
            self.photon_count == other.photon_count
            and self.time_slots == other.time_slots
            and self.paths_per_photon == other.paths_per_photon
        )

    def merge(self, other: "ModeSpec") -> "ModeSpec":
        if (self.time_slots, self.paths_per_photon) != (other.time_slots, other.paths_per_photon):
            raise CompositionError(f"cannot combine lattices of {self} and {other}")
        return ModeSpec(
            photon_count=max(self.photon_count, other.photon_count),
            time_slots=self.time_slots,
            paths_per_photon=self.paths_per_photon,
            atom_count=max(self.atom_count, other.atom_count),
        )


def level_label(subsystem: Subsystem, level: int) -> str:
    """Human-readable name of a computational level."""
    if isinstance(subsystem, AtomId):
        return str(level)
    if subsystem.dof is Dof.POL:
        return POL_LABELS[level]
    if subsystem.dof is Dof.SLOT:
        return SLOT_LABELS[level] if level < len(SLOT_LABELS) else f"t{level}"
    return f"x{level}"


class StateVector:
    """Immutable sparse state over an ordered layout of subsystems.

    Amplitudes below AMPLITUDE_CUTOFF are dropped on construction and the
    norm must be 1 within NORM_TOLERANCE (or the state is rescaled when
    ``normalize`` is set).
    """

    __slots__ = ("_spec", "_layout", "_positions", "_amplitudes")

    def __init__(
        self,
        spec: ModeSpec,
        layout: Sequence[Subsystem],
        amplitudes: Mapping[BasisState, complex],
        *,
        normalize: bool = False,
    ):
        layout = tuple(layout)
        positions = {s: i for i, s in enumerate(layout)}
        if len(positions) != len(layout):
            raise CompositionError("layout lists a subsystem more than once")
        for subsystem in layout:
            if not spec.contains(subsystem):
                raise CompositionError(f"{subsystem} is outside {spec}")

        kept = {k: complex(a) for k, a in amplitudes.items() if abs(a) >= AMPLITUDE_CUTOFF}
        norm2 = math.fsum(abs(a) ** 2 for a in kept.values())
        if normalize:
            if norm2 == 0.0:
                raise ArgumentError("cannot normalize the zero vector")
            scale = 1.0 / math.sqrt(norm2)
            kept = {k: a * scale for k, a in kept.items()}
        elif abs(norm2 - 1.0) > NORM_TOLERANCE:
            raise ArgumentError(f"state is not normalized (norm^2 = {norm2:.12f})")

        self._spec = spec
        self._layout = layout
        self._positions = positions
        self._amplitudes = kept

    @classmethod
    def from_terms(
        cls,
        spec: ModeSpec,
        layout: Sequence[Subsystem],
        terms: Mapping[BasisState, complex],
        *,
        normalize: bool = True,
    ) -> "StateVector":
        """Build a state from user-supplied terms, validating every key."""
        layout = tuple(layout)
        levels = [set(spec.levels(s)) for s in layout]
        for key in terms:
            if len(key) != len(layout) or any(v not in lv for v, lv in zip(key, levels)):
                raise ArgumentError(f"basis key {key} does not fit layout {layout}")
        return cls(spec, layout, terms, normalize=normalize)

    @property
    def spec(self) -> ModeSpec:
        return self._spec

    @property
    def layout(self) -> tuple[Subsystem, ...]:
        return self._layout

    @property
    def subsystems(self) -> frozenset:
        return frozenset(self._layout)

    @property
    def amplitudes(self) -> Mapping[BasisState, complex]:
        return MappingProxyType(self._amplitudes)

    def position(self, subsystem: Subsystem) -> int:
        try:
            return self._positions[subsystem]
        except KeyError:
            raise CompositionError(f"{subsystem} is not part of this state") from None

    def amplitude(self, key: BasisState) -> complex:
        return self._amplitudes.get(tuple(key), 0j)

    def norm(self) -> float:
        return math.sqrt(math.fsum(abs(a) ** 2 for a in self._amplitudes.values()))

    def support_values(self, subsystem: Subsystem) -> set[int]:
        """Levels of ``subsystem`` that carry amplitude."""
        pos = self.position(subsystem)
        return {key[pos] for key in self._amplitudes}

    def reorder(self, layout: Sequence[Subsystem]) -> "StateVector":
        layout = tuple(layout)
        if set(layout) != set(self._layout):
            raise CompositionError("reorder needs the same set of subsystems")
        order = [self.position(s) for s in layout]
        terms = {tuple(key[i] for i in order): a for key, a in self._amplitudes.items()}
        return StateVector(self._spec, layout, terms)

    def ket(self, key: BasisState) -> str:
        parts = [level_label(s, v) for s, v in zip(self._layout, key)]
        return "|" + ",".join(parts) + ">"

    def __len__(self) -> int:
        return len(self._amplitudes)

    def __repr__(self) -> str:
        terms = sorted(self._amplitudes.items())
        shown = " + ".join(f"({a.real:+.4f}{a.imag:+.4f}j){self.ket(k)}" for k, a in terms[:6])
        more = f" + ... ({len(terms) - 6} more)" if len(terms) > 6 else ""
        return f"StateVector({shown}{more})"


class LocalAction(Protocol):
    """Compiled action of an element on its bound subsystems."""

    columns: Mapping[tuple, tuple]
    requires_product: bool

    def check(self, local_key: tuple) -> None: ...


class Operator(Protocol):
    """Anything apply_op can execute (components.ElementOp)."""

    bindings: tuple

    def compile(self, spec: ModeSpec) -> LocalAction: ...


class MeasurementBasis(str, Enum):
    COMPUTATIONAL = "computational"
    PM_ATOM = "pm_atom"


@dataclass(frozen=True)
class Outcome:
    """Result of a projective measurement."""

    subsystems: tuple[Subsystem, ...]
    values: tuple[int, ...]
    labels: tuple[str, ...]
    probability: float


def product_state(spec: ModeSpec, assignment: Mapping[Subsystem, int]) -> StateVector:
    """A single basis ket over the assigned subsystems."""
    layout = tuple(assignment)
    return StateVector.from_terms(spec, layout, {tuple(assignment[s] for s in layout): 1.0})


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product of states on disjoint subsystem sets."""
    overlap = a.subsystems & b.subsystems
    if overlap:
        names = ", ".join(str(s) for s in sorted(overlap, key=str))
        raise CompositionError(f"tensor factors overlap on {names}")
    spec = a.spec.merge(b.spec)
    terms = {
        ka + kb: aa * ab for ka, aa in a.amplitudes.items() for kb, ab in b.amplitudes.items()
    }
    return StateVector(spec, a.layout + b.layout, terms)


def _positions(state: StateVector, bindings: Iterable[Subsystem]) -> tuple[int, ...]:
    positions = []
    for subsystem in bindings:
        if subsystem not in state.subsystems:
            raise CompositionError(f"element is bound to {subsystem}, which the state does not carry")
        positions.append(state.position(subsystem))
    return tuple(positions)


def _require_product(state: StateVector, positions: tuple[int, ...]) -> None:
    """Raise unless the bound factor is unentangled from the rest."""
    groups: dict[tuple, dict[tuple, complex]] = {}
    for key, amp in state.amplitudes.items():
        local = tuple(key[p] for p in positions)
        rest = tuple(v for i, v in enumerate(key) if i not in positions)
        groups.setdefault(rest, {})[local] = amp

    reference = None
    pivot = None
    for vector in groups.values():
        if reference is None:
            reference = vector
            pivot = max(vector, key=lambda k: abs(vector[k]))
            continue
        ratio = vector.get(pivot, 0j) / reference[pivot]
        for local in set(vector) | set(reference):
            if abs(vector.get(local, 0j) - ratio * reference.get(local, 0j)) > 1e-9:
                raise PreconditionError("bound subsystem is entangled with the rest of the state")


def apply_op(state: StateVector, element: Operator) -> StateVector:
    """Apply an element to the subsystems it is bound to."""
    positions = _positions(state, element.bindings)
    action = element.compile(state.spec)
    if action.requires_product:
        _require_product(state, positions)

    out: dict[tuple, complex] = {}
    for key, amp in state.amplitudes.items():
        local = tuple(key[p] for p in positions)
        action.check(local)
        for new_local, coeff in action.columns[local]:
            new_key = list(key)
            for p, v in zip(positions, new_local):
                new_key[p] = v
            new_key = tuple(new_key)
            out[new_key] = out.get(new_key, 0j) + amp * coeff
    return StateVector(state.spec, state.layout, out)


def apply_all(state: StateVector, elements: Iterable[Operator]) -> StateVector:
    for element in elements:
        state = apply_op(state, element)
    return state


def _require_comparable(a: StateVector, b: StateVector) -> None:
    if not a.spec.compatible(b.spec):
        raise CompositionError(f"mismatched specs: {a.spec} vs {b.spec}")
    if a.subsystems != b.subsystems:
        raise CompositionError("states carry different subsystems")


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>."""
    _require_comparable(a, b)
    if a.layout != b.layout:
        b = b.reorder(a.layout)
    bs = b.amplitudes
    return sum((amp.conjugate() * bs.get(k, 0j) for k, amp in a.amplitudes.items()), 0j)


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, insensitive to global phase."""
    value = abs(inner(a, b)) ** 2
    return min(1.0, max(0.0, value))


def superpose(terms: Iterable[tuple[complex, StateVector]]) -> StateVector:
    """Normalized linear combination of states over the same subsystems."""
    terms = list(terms)
    if not terms:
        raise ArgumentError("superpose needs at least one term")
    first = terms[0][1]
    out: dict[tuple, complex] = {}
    for coeff, state in terms:
        _require_comparable(first, state)
        if state.layout != first.layout:
            state = state.reorder(first.layout)
        for key, amp in state.amplitudes.items():
            out[key] = out.get(key, 0j) + coeff * amp
    return StateVector(first.spec, first.layout, out, normalize=True)


def outcome_distribution(
    state: StateVector, subsystems: Sequence[Subsystem]
) -> dict[tuple[int, ...], float]:
    """Born probabilities of the joint computational outcomes, sorted by outcome."""
    positions = _positions(state, subsystems)
    weights: dict[tuple[int, ...], float] = {}
    for key, amp in state.amplitudes.items():
        values = tuple(key[p] for p in positions)
        weights[values] = weights.get(values, 0.0) + abs(amp) ** 2
    return dict(sorted(weights.items()))


def _hadamard_atom(state: StateVector, atom: AtomId) -> StateVector:
    pos = state.position(atom)
    s = 1 / math.sqrt(2)
    out: dict[tuple, complex] = {}
    for key, amp in state.amplitudes.items():
        sign = 1.0 if key[pos] == 0 else -1.0
        for level, coeff in ((0, s), (1, s * sign)):
            new_key = key[:pos] + (level,) + key[pos + 1 :]
            out[new_key] = out.get(new_key, 0j) + amp * coeff
    return StateVector(state.spec, state.layout, out)


def measure(
    state: StateVector,
    subsystems: Sequence[Subsystem],
    basis: MeasurementBasis = MeasurementBasis.COMPUTATIONAL,
    rng_seed: int = 0,
) -> tuple[Outcome, StateVector]:
    """Projective measurement sampled by the Born rule.

    Args:
        state: State to measure.
        subsystems: Distinct subsystems measured jointly.
        basis: Computational basis, or the atom |+>/|-> basis.
        rng_seed: Seed of the generator that picks the outcome.

    Returns:
        The observed outcome and the renormalized post-measurement state.
    """
    subsystems = tuple(subsystems)
    if not subsystems:
        raise ArgumentError("nothing to measure")
    if len(set(subsystems)) != len(subsystems):
        raise ArgumentError("measured subsystems must be distinct")
    basis = MeasurementBasis(basis)

    if basis is MeasurementBasis.PM_ATOM:
        if not all(isinstance(s, AtomId) for s in subsystems):
            raise ArgumentError("the +/- basis applies to atoms only")
        rotated = state
        for atom in subsystems:
            rotated = _hadamard_atom(rotated, atom)
        outcome, post = measure(rotated, subsystems, MeasurementBasis.COMPUTATIONAL, rng_seed)
        for atom in subsystems:
            post = _hadamard_atom(post, atom)
        labels = tuple(PM_LABELS[v] for v in outcome.values)
        return Outcome(subsystems, outcome.values, labels, outcome.probability), post

    distribution = outcome_distribution(state, subsystems)
    outcomes = list(distribution)
    cumulative = np.cumsum(np.fromiter(distribution.values(), dtype=float))
    rng = np.random.default_rng(rng_seed)
    draw = rng.random() * cumulative[-1]
    index = min(int(np.searchsorted(cumulative, draw, side="right")), len(outcomes) - 1)
    chosen = outcomes[index]
    probability = distribution[chosen]

    positions = _positions(state, subsystems)
    projected = {
        key: amp
        for key, amp in state.amplitudes.items()
        if tuple(key[p] for p in positions) == chosen
    }
    post = StateVector(state.spec, state.layout, projected, normalize=True)
    labels = tuple(level_label(s, v) for s, v in zip(subsystems, chosen))
    logger.debug("measured %s -> %s (p=%.6f)", [str(s) for s in subsystems], labels, probability)
    return Outcome(subsystems, chosen, labels, probability), post


def discard(state: StateVector, subsystems: Iterable[Subsystem]) -> StateVector:
    """Drop subsystems that sit in a single definite level."""
    subsystems = tuple(subsystems)
    drop = set(_positions(state, subsystems))
    for subsystem in subsystems:
        if len(state.support_values(subsystem)) != 1:
            raise PreconditionError(f"{subsystem} is not in a definite level")
    keep = [i for i in range(len(state.layout)) if i not in drop]
    layout = tuple(state.layout[i] for i in keep)
    terms = {tuple(key[i] for i in keep): amp for key, amp in state.amplitudes.items()}
    return StateVector(state.spec, layout, terms)


def derive_seed(seed: int, *keys: int) -> int:
    """Independent 64-bit seed for a (case, shot, ...) stream."""
    sequence = np.random.SeedSequence([int(seed), *(int(k) for k in keys)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def random_state(
    spec: ModeSpec,
    layout: Sequence[Subsystem],
    seed: int,
    terms: Optional[int] = None,
) -> StateVector:
    """Seeded random state with complex Gaussian amplitudes on a few basis keys."""
    layout = tuple(layout)
    levels = [spec.levels(s) for s in layout]
    rng = np.random.default_rng(seed)
    size = math.prod(len(lv) for lv in levels)
    wanted = min(size, terms or 8)

    if size <= 4096:
        everything = list(product(*levels))
        picks = rng.choice(size, size=wanted, replace=False)
        keys = [everything[i] for i in sorted(picks)]
    else:
        chosen: set[tuple] = set()
        while len(chosen) < wanted:
            chosen.add(tuple(lv[int(rng.integers(len(lv)))] for lv in levels))
        keys = sorted(chosen)

    values = rng.normal(size=len(keys)) + 1j * rng.normal(size=len(keys))
    return StateVector.from_terms(spec, layout, dict(zip(keys, values)), normalize=True)
