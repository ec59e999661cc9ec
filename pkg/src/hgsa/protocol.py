"""The two-step analyzer: atom-assisted polarization analysis, then TESA.

Step 1 sends every photon past N cavity atoms. Atoms 1..N-1 pick up the
parity of photon 1 with photon m+1; atom N, sandwiched between Hadamard wave
plates, picks up the polarization sign. The photons leave untouched.

Step 2 (time-bin entangled state analysis) converts each photon's time bin
into a path, mixes the paths on a beam splitter and detects polarization and
path. ``classify`` rebuilds the hyper label from both readouts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .components import (
    ElementOp,
    atom_prepare_plus,
    atom_readout,
    make_bs,
    make_cpf,
    make_hwp,
    make_t2p,
)
from .errors import (
    ArgumentError,
    CompositionError,
    TemporalDistinguishabilityError,
)
from .hilbert import (
    DEFAULT_PATHS,
    DEFAULT_TIME_SLOTS,
    POL_LABELS,
    Dof,
    MeasurementBasis,
    ModeSpec,
    PhotonDof,
    StateVector,
    apply_all,
    derive_seed,
    discard,
    measure,
    product_state,
    tensor,
)
from .states import (
    GhzDof,
    GhzLabel,
    HyperLabel,
    canonicalize,
    check_photon_count,
    make_hyper,
)

logger = logging.getLogger(__name__)


STEP1_STREAM = 1
TESA_STREAM = 2


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class MeasurementStep:
    """Subsystems measured jointly, and in which basis."""

    subsystems: tuple
    basis: MeasurementBasis = MeasurementBasis.COMPUTATIONAL


@dataclass(frozen=True)
class Circuit:
    """An ordered element list followed by a measurement plan.

    ``path_relabel`` optionally renames detector paths: detector path k is
    reported as ``path_relabel[k - 1]``.
    """

    spec: ModeSpec
    elements: tuple = ()
    measurements: tuple = ()
    path_relabel: Optional[tuple] = None
    name: str = ""

    def __post_init__(self):
        for element in self.elements:
            for subsystem in element.bindings:
                if not self.spec.contains(subsystem):
                    raise CompositionError(f"{element} binds {subsystem}, outside {self.spec}")
        seen: set = set()
        for step in self.measurements:
            for subsystem in step.subsystems:
                if not self.spec.contains(subsystem):
                    raise CompositionError(f"measurement of {subsystem} is outside {self.spec}")
                if subsystem in seen:
                    raise CompositionError(f"{subsystem} is measured more than once")
                seen.add(subsystem)
        if self.path_relabel is not None:
            expected = set(range(1, self.spec.paths_per_photon + 1))
            if set(self.path_relabel) != expected or len(self.path_relabel) != len(expected):
                raise ArgumentError(f"path relabeling {self.path_relabel} is not a permutation")

    @property
    def photon_count(self) -> int:
        return self.spec.photon_count

    def relabel_path(self, path: int) -> int:
        if self.path_relabel is None:
            return path
        return self.path_relabel[path - 1]

    def with_elements(self, elements: Sequence[ElementOp]) -> "Circuit":
        return Circuit(self.spec, tuple(elements), self.measurements, self.path_relabel, self.name)

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class DetectorClick:
    """Which polarization/path detector one photon fired."""

    pol: str
    path: int

    def __post_init__(self):
        if self.pol not in POL_LABELS:
            raise ArgumentError(f"polarization click must be H or V, got '{self.pol}'")

    def __str__(self) -> str:
        return f"{self.pol}{self.path}"


@dataclass(frozen=True)
class MeasurementRecord:
    """Atom readouts (+/-) and one detector click per photon."""

    atom_outcomes: tuple
    detector_pattern: tuple

    def __post_init__(self):
        if len(self.atom_outcomes) != len(self.detector_pattern):
            raise ArgumentError(
                f"record has {len(self.atom_outcomes)} atom outcomes "
                f"but {len(self.detector_pattern)} detector clicks"
            )
        bad = [a for a in self.atom_outcomes if a not in ("+", "-")]
        if bad:
            raise ArgumentError(f"atom outcomes must be '+' or '-', got '{bad[0]}'")

    @property
    def photon_count(self) -> int:
        return len(self.atom_outcomes)

    @property
    def pol_pattern(self) -> str:
        return "".join(click.pol for click in self.detector_pattern)

    @property
    def path_pattern(self) -> tuple:
        return tuple(click.path for click in self.detector_pattern)

    def __str__(self) -> str:
        atoms = "".join(self.atom_outcomes)
        clicks = " ".join(str(c) for c in self.detector_pattern)
        return f"atoms {atoms} | clicks {clicks}"


@dataclass(frozen=True, order=True)
class GroupId:
    """Detector group: canonical polarization-click letter and path parity."""

    letter: str
    parity: Parity

    def __str__(self) -> str:
        return f"{self.letter}/{self.parity.value}"


@dataclass(frozen=True)
class AnalysisResult:
    label: HyperLabel
    record: MeasurementRecord
    classified: HyperLabel
    group: GroupId

    @property
    def correct(self) -> bool:
        return self.classified == self.label


def detection_subsystems(photons: int) -> tuple[PhotonDof, ...]:
    """(pol, path) of every photon, in photon order."""
    return tuple(
        PhotonDof(p, dof) for p in range(photons) for dof in (Dof.POL, Dof.PATH)
    )


def build_step1(
    photons: int,
    time_slots: int = DEFAULT_TIME_SLOTS,
    paths: int = DEFAULT_PATHS,
) -> Circuit:
    """Parity atoms 1..N-1, then the phase atom N between two Hadamard layers.

    Each atom is read out (Hadamard, then a computational measurement) after
    its last interaction; elements on disjoint subsystems are grouped so the
    intermediate states stay small.
    """
    check_photon_count(photons)
    spec = ModeSpec(photons, time_slots, paths, atom_count=photons)
    elements: list[ElementOp] = []
    for m in range(photons - 1):
        elements += [
            atom_prepare_plus(m),
            make_cpf(m, 0),
            make_cpf(m, m + 1),
            atom_readout(m),
        ]
    phase_atom = photons - 1
    elements.append(atom_prepare_plus(phase_atom))
    elements += [make_hwp(p) for p in range(photons)]
    elements += [make_cpf(phase_atom, p) for p in range(photons)]
    elements += [make_hwp(p) for p in range(photons)]
    elements.append(atom_readout(phase_atom))
    plan = (MeasurementStep(spec.atom_layout(), MeasurementBasis.COMPUTATIONAL),)
    return Circuit(spec, tuple(elements), plan, name="step1")


def build_tesa(
    photons: int,
    time_slots: int = DEFAULT_TIME_SLOTS,
    out_paths: tuple[int, int] = (1, 2),
    path_relabel: Optional[tuple[int, ...]] = None,
) -> Circuit:
    """T2P then BS on every photon; detect (pol, path) of all photons.

    Swapping ``out_paths`` together with ``path_relabel=(2, 1)`` gives an
    equivalent analyzer with the detectors renamed.
    """
    check_photon_count(photons)
    spec = ModeSpec(photons, time_slots, DEFAULT_PATHS)
    elements: list[ElementOp] = []
    for p in range(photons):
        elements += [make_t2p(p, out_paths), make_bs(p, out_paths)]
    plan = (MeasurementStep(detection_subsystems(photons)),)
    return Circuit(spec, tuple(elements), plan, path_relabel, name="tesa")


def evolve(state: StateVector, circuit: Circuit) -> StateVector:
    """Apply the circuit's elements, without its measurements."""
    return apply_all(state, circuit.elements)


def attach_atoms(state: StateVector, circuit: Circuit) -> StateVector:
    """Add ground-state atoms the circuit needs but the state does not carry."""
    if state.spec.photon_count != circuit.spec.photon_count:
        raise CompositionError(
            f"state has {state.spec.photon_count} photons, circuit expects {circuit.spec.photon_count}"
        )
    missing = [a for a in circuit.spec.atom_layout() if a not in state.subsystems]
    if not missing:
        return state
    return tensor(state, product_state(circuit.spec, {a: 0 for a in missing}))


def _atom_outcomes(
    evolved: StateVector, circuit: Circuit, rng_seed: int
) -> tuple[tuple[str, ...], StateVector]:
    outcomes: list[str] = []
    measured: list = []
    for index, step in enumerate(circuit.measurements):
        outcome, evolved = measure(
            evolved, step.subsystems, step.basis, derive_seed(rng_seed, index)
        )
        if step.basis is MeasurementBasis.PM_ATOM:
            outcomes += outcome.labels
        else:
            outcomes += ["+" if v == 0 else "-" for v in outcome.values]
        measured += step.subsystems
    return tuple(outcomes), discard(evolved, measured)


def run_step1(
    state: StateVector, circuit: Circuit, rng_seed: int
) -> tuple[tuple[str, ...], StateVector]:
    """Run step 1 and read the atoms.

    Returns:
        The atom readouts ("+"/"-", atom order) and the photonic state with
        the measured atoms removed.
    """
    evolved = evolve(attach_atoms(state, circuit), circuit)
    return _atom_outcomes(evolved, circuit, rng_seed)


def check_single_slot(state: StateVector) -> None:
    """Raise unless every photon arrives in one time slot."""
    for subsystem in state.layout:
        if isinstance(subsystem, PhotonDof) and subsystem.dof is Dof.SLOT:
            slots = state.support_values(subsystem)
            if len(slots) > 1:
                raise TemporalDistinguishabilityError(
                    f"{subsystem} arrives in slots {sorted(slots)}"
                )


def sample_detection(
    evolved: StateVector, circuit: Circuit, rng_seed: int
) -> tuple[DetectorClick, ...]:
    """Sample one (pol, path) click per photon from an already evolved TESA state."""
    check_single_slot(evolved)
    levels: dict = {}
    for index, step in enumerate(circuit.measurements):
        outcome, evolved = measure(
            evolved, step.subsystems, step.basis, derive_seed(rng_seed, index)
        )
        levels.update(zip(step.subsystems, outcome.values))
    clicks = []
    for p in range(circuit.photon_count):
        pol = levels[PhotonDof(p, Dof.POL)]
        path = levels[PhotonDof(p, Dof.PATH)]
        clicks.append(DetectorClick(POL_LABELS[pol], circuit.relabel_path(path)))
    return tuple(clicks)


def run_tesa(state: StateVector, circuit: Circuit, rng_seed: int) -> tuple[DetectorClick, ...]:
    """Run step 2 and sample one detector click per photon."""
    return sample_detection(evolve(state, circuit), circuit, rng_seed)


def path_parity(clicks: Sequence[DetectorClick]) -> Parity:
    """Parity of the number of photons detected on path x2."""
    odd = sum(1 for c in clicks if c.path == 2) % 2
    return Parity.ODD if odd else Parity.EVEN


def group_of(record: MeasurementRecord) -> GroupId:
    bits = "".join("0" if c.pol == "H" else "1" for c in record.detector_pattern)
    letter, _ = canonicalize("+", bits, GhzDof.TIMEBIN)
    return GroupId(letter.bits, path_parity(record.detector_pattern))


def _xor(a: str, b: str) -> str:
    return "".join("0" if x == y else "1" for x, y in zip(a, b))


def classify(record: MeasurementRecord, photons: int) -> HyperLabel:
    """Rebuild the hyper label from atom readouts and detector clicks."""
    if record.photon_count != photons:
        raise ArgumentError(f"record covers {record.photon_count} photons, expected {photons}")
    atoms = record.atom_outcomes
    pol_bits = "0" + "".join("1" if a == "-" else "0" for a in atoms[:-1])
    # atom N reads "-" for a "+" state when N is odd; the rule inverts for even N
    pol_sign = "+" if (atoms[-1] == "-") != (photons % 2 == 0) else "-"

    clicks = "".join("0" if c.pol == "H" else "1" for c in record.detector_pattern)
    time_letter, _ = canonicalize("+", _xor(clicks, pol_bits), GhzDof.TIMEBIN)
    if path_parity(record.detector_pattern) is Parity.EVEN:
        time_sign = pol_sign
    else:
        time_sign = "-" if pol_sign == "+" else "+"
    return HyperLabel(
        GhzLabel(GhzDof.POLARIZATION, pol_sign, pol_bits),
        GhzLabel(GhzDof.TIMEBIN, time_sign, time_letter.bits),
    )


class HgsaAnalyzer:
    """Full two-step pipeline with the unitary part cached per input.

    Every shot re-samples the measurements from ``derive_seed(seed, ...)``;
    only the deterministic evolution is shared between shots.
    """

    def __init__(
        self,
        photons: int,
        time_slots: int = DEFAULT_TIME_SLOTS,
        tesa: Optional[Circuit] = None,
    ):
        check_photon_count(photons)
        self.photons = photons
        self.spec = ModeSpec(photons, time_slots, DEFAULT_PATHS)
        self.step1 = build_step1(photons, time_slots)
        self.tesa = tesa or build_tesa(photons, time_slots)
        self._step1_cache: dict = {}
        self._tesa_cache: dict = {}

    def prepare(self, label: HyperLabel) -> StateVector:
        return make_hyper(label, self.spec)

    def step1_state(self, label: HyperLabel) -> StateVector:
        """Evolved step-1 state, atoms included and not yet measured."""
        if label not in self._step1_cache:
            self._step1_cache[label] = evolve(attach_atoms(self.prepare(label), self.step1), self.step1)
        return self._step1_cache[label]

    def tesa_state(self, label: HyperLabel, atoms: tuple, photonic: StateVector) -> StateVector:
        key = (label, atoms)
        if key not in self._tesa_cache:
            self._tesa_cache[key] = evolve(photonic, self.tesa)
        return self._tesa_cache[key]

    def record(self, label: HyperLabel, seed: int, shot: int = 0) -> MeasurementRecord:
        atoms, photonic = _atom_outcomes(
            self.step1_state(label), self.step1, derive_seed(seed, shot, STEP1_STREAM)
        )
        evolved = self.tesa_state(label, atoms, photonic)
        clicks = sample_detection(evolved, self.tesa, derive_seed(seed, shot, TESA_STREAM))
        return MeasurementRecord(atoms, clicks)

    def analyze(self, label: HyperLabel, seed: int, shot: int = 0) -> AnalysisResult:
        record = self.record(label, seed, shot)
        classified = classify(record, self.photons)
        logger.debug("%s shot %d: %s -> %s", label, shot, record, classified)
        return AnalysisResult(label, record, classified, group_of(record))

    def signature(self, label: HyperLabel) -> tuple[tuple[str, ...], GroupId]:
        """Deterministic (atom readouts, detector group) of a label."""
        result = self.analyze(label, seed=0)
        return result.record.atom_outcomes, result.group
