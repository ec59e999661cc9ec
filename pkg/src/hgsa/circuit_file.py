"""Line-oriented circuit descriptions.

One record per line, ``kind(bindings; params)``, ``#`` starts a comment::

    # three-photon TESA front end
    t2p(photon=1; in=1, out=1:2)
    bs(photon=1; paths=1:2)
    cpf(atom=2, photon=3)
    delay(photon=*; when=x1, slots=1)
    measure(photon=1, photon=2; dofs=pol:path)
    relabel(; paths=2:1)

Photons and atoms are numbered from 1. ``photon=*`` marks a template record
that is instantiated on every photon (see ``parse_template``). Time slots are
numbered from 0 (S = 0, L = 1).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .components import (
    DelayCondition,
    ElementKind,
    ElementOp,
    atom_prepare_plus,
    atom_readout,
    make_bs,
    make_cpf,
    make_delay,
    make_hwp,
    make_identity,
    make_pbs,
    make_pockels,
    make_t2p,
)
from .errors import CircuitParseError, HgsaError
from .hilbert import (
    DEFAULT_PATHS,
    DEFAULT_TIME_SLOTS,
    AtomId,
    Dof,
    MeasurementBasis,
    ModeSpec,
    PhotonDof,
)
from .protocol import Circuit, MeasurementStep, detection_subsystems

WILDCARD = "*"

_RECORD = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*\((.*)\)\s*$")

KINDS = (
    "cpf", "hwp", "pockels", "pbs", "delay", "bs", "t2p",
    "prep", "readout", "identity", "measure", "relabel",
)


@dataclass
class _Field:
    key: str
    value: str
    column: int


@dataclass
class _Record:
    kind: str
    line: int
    column: int
    bindings: list[_Field] = field(default_factory=list)
    params: dict[str, _Field] = field(default_factory=dict)

    def fail(self, message: str, column: Optional[int] = None) -> CircuitParseError:
        return CircuitParseError(message, self.line, column or self.column)

    def param(self, name: str, default: Optional[str] = None) -> Optional[str]:
        found = self.params.get(name)
        return found.value if found else default

    def param_column(self, name: str) -> int:
        found = self.params.get(name)
        return found.column if found else self.column


@dataclass
class CircuitDescription:
    """Parsed records before they are bound to a ModeSpec."""

    elements: list[tuple[ElementOp, int]] = field(default_factory=list)
    measurements: list[tuple[MeasurementStep, int]] = field(default_factory=list)
    path_relabel: Optional[tuple[int, ...]] = None
    template: Optional[bool] = None


def _split_fields(text: str, offset: int, line: int) -> list[_Field]:
    fields: list[_Field] = []
    position = 0
    for chunk in text.split(","):
        column = offset + position + (len(chunk) - len(chunk.lstrip())) + 1
        position += len(chunk) + 1
        stripped = chunk.strip()
        if not stripped:
            continue
        key, sep, value = stripped.partition("=")
        if not sep or not key.strip() or not value.strip():
            raise CircuitParseError(f"expected name=value, got '{stripped}'", line, column)
        fields.append(_Field(key.strip(), value.strip(), column))
    return fields


def _tokenize(raw: str, line: int) -> Optional[_Record]:
    text = raw.split("#", 1)[0]
    if not text.strip():
        return None
    column = len(text) - len(text.lstrip()) + 1
    match = _RECORD.match(text)
    if not match:
        raise CircuitParseError("expected a record of the form kind(bindings; params)", line, column)
    kind = match.group(1).lower()
    if kind not in KINDS:
        raise CircuitParseError(f"unknown element kind '{match.group(1)}'", line, column)

    inner = match.group(2)
    inner_offset = match.start(2)
    binding_text, sep, param_text = inner.partition(";")
    record = _Record(kind, line, column)
    record.bindings = _split_fields(binding_text, inner_offset, line)
    for f in _split_fields(param_text, inner_offset + len(binding_text) + len(sep), line):
        if f.key in record.params:
            raise CircuitParseError(f"parameter '{f.key}' given twice", line, f.column)
        record.params[f.key] = f
    return record


def _index(record: _Record, f: _Field, allow_wildcard: bool) -> Optional[int]:
    if f.value == WILDCARD:
        if not allow_wildcard:
            raise record.fail("'*' is only allowed for photon bindings", f.column)
        return None
    if not f.value.isdigit() or int(f.value) < 1:
        raise record.fail(f"{f.key} must be a positive integer or '*', got '{f.value}'", f.column)
    return int(f.value) - 1


def _single(record: _Record, name: str, required: bool = True) -> Optional[_Field]:
    found = [f for f in record.bindings if f.key == name]
    unknown = [f for f in record.bindings if f.key not in ("photon", "atom")]
    if unknown:
        raise record.fail(f"unknown binding '{unknown[0].key}'", unknown[0].column)
    if len(found) > 1:
        raise record.fail(f"{record.kind} takes one {name} binding", found[1].column)
    if not found:
        if required:
            raise record.fail(f"{record.kind} needs a {name}= binding")
        return None
    return found[0]


def _path_pair(record: _Record, name: str, default: str) -> tuple[int, int]:
    text = record.param(name, default)
    parts = text.split(":")
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise record.fail(f"{name} must look like 1:2, got '{text}'", record.param_column(name))
    return int(parts[0]), int(parts[1])


def _int_param(record: _Record, name: str, default: str) -> int:
    text = record.param(name, default)
    if text.upper() in ("S", "L") and name == "trigger":
        return 0 if text.upper() == "S" else 1
    if not text.lstrip("-").isdigit():
        raise record.fail(f"{name} must be an integer, got '{text}'", record.param_column(name))
    return int(text)


def _check_params(record: _Record, allowed: tuple[str, ...]) -> None:
    for name, f in record.params.items():
        if name not in allowed:
            raise record.fail(f"{record.kind} does not take '{name}'", f.column)


def _build(record: _Record, description: CircuitDescription, time_slots: int) -> None:
    kind = record.kind

    if kind == "relabel":
        _check_params(record, ("paths",))
        if record.bindings:
            raise record.fail("relabel takes no bindings", record.bindings[0].column)
        description.path_relabel = _path_pair(record, "paths", "1:2")
        return

    if kind == "measure":
        _measure(record, description)
        return

    atom_field = _single(record, "atom", required=kind in ("cpf", "prep", "readout"))
    photon_required = kind not in ("prep", "readout", "identity")
    photon_field = _single(record, "photon", required=photon_required)
    photon = _index(record, photon_field, True) if photon_field else None
    atom = _index(record, atom_field, False) if atom_field else None
    if photon_field is not None:
        is_template = photon is None
        if description.template is None:
            description.template = is_template
        elif description.template != is_template:
            raise record.fail("cannot mix photon=* with numbered photons", photon_field.column)
    slot_photon = 0 if photon is None else photon

    if kind == "cpf":
        _check_params(record, ())
        element = make_cpf(atom, slot_photon)
    elif kind == "hwp":
        _check_params(record, ("mode",))
        mode = record.param("mode", "hadamard")
        if mode not in ("hadamard", "flip"):
            raise record.fail(f"mode must be hadamard or flip, got '{mode}'", record.param_column("mode"))
        element = make_hwp(slot_photon, mode)
    elif kind == "pockels":
        _check_params(record, ("trigger",))
        element = make_pockels(slot_photon, _int_param(record, "trigger", "0"), time_slots)
    elif kind == "pbs":
        _check_params(record, ("in", "out", "adjoint"))
        element = make_pbs(slot_photon, _path_pair(record, "in", "1:2"), _path_pair(record, "out", "1:2"))
    elif kind == "delay":
        _check_params(record, ("when", "slots", "adjoint"))
        element = make_delay(slot_photon, record.param("when", "V"), _int_param(record, "slots", "1"))
    elif kind == "bs":
        _check_params(record, ("paths",))
        element = make_bs(slot_photon, _path_pair(record, "paths", "1:2"))
    elif kind == "t2p":
        _check_params(record, ("in", "out", "adjoint"))
        element = make_t2p(
            slot_photon, _path_pair(record, "out", "1:2"), _int_param(record, "in", "1")
        )
    elif kind == "prep":
        _check_params(record, ())
        element = atom_prepare_plus(atom)
    elif kind == "readout":
        _check_params(record, ())
        element = atom_readout(atom)
    else:
        _check_params(record, ("dof",))
        if atom is not None:
            element = make_identity(AtomId(atom))
        elif photon_field is not None:
            dof_text = record.param("dof", "pol")
            if dof_text not in [d.value for d in Dof]:
                raise record.fail(f"unknown dof '{dof_text}'", record.param_column("dof"))
            element = make_identity(PhotonDof(slot_photon, Dof(dof_text)))
        else:
            raise record.fail("identity needs a photon= or atom= binding")

    if record.param("adjoint", "false").lower() in ("true", "yes", "1"):
        element = element.inverse()
    description.elements.append((element, record.line))


def _measure(record: _Record, description: CircuitDescription) -> None:
    _check_params(record, ("basis", "dofs"))
    subsystems: list = []
    atoms = [f for f in record.bindings if f.key == "atom"]
    photons = [f for f in record.bindings if f.key == "photon"]
    unknown = [f for f in record.bindings if f.key not in ("photon", "atom")]
    if unknown:
        raise record.fail(f"unknown binding '{unknown[0].key}'", unknown[0].column)
    if not record.bindings:
        raise record.fail("measure needs at least one photon= or atom= binding")
    for f in atoms:
        subsystems.append(AtomId(_index(record, f, False)))
    dofs_text = record.param("dofs", "pol:path")
    try:
        dofs = [Dof(name) for name in dofs_text.split(":")]
    except ValueError:
        raise record.fail(f"unknown dof list '{dofs_text}'", record.param_column("dofs")) from None
    for f in photons:
        photon = _index(record, f, False)
        subsystems += [PhotonDof(photon, dof) for dof in dofs]
    basis_text = record.param("basis", "computational")
    basis = MeasurementBasis.PM_ATOM if basis_text in ("pm", "pm_atom") else None
    if basis is None and basis_text != "computational":
        raise record.fail(f"unknown basis '{basis_text}'", record.param_column("basis"))
    step = MeasurementStep(tuple(subsystems), basis or MeasurementBasis.COMPUTATIONAL)
    description.measurements.append((step, record.line))


def parse_description(text: str, time_slots: int = DEFAULT_TIME_SLOTS) -> CircuitDescription:
    """Parse every record; element arguments are validated as they are built."""
    description = CircuitDescription()
    for number, raw in enumerate(text.splitlines(), start=1):
        record = _tokenize(raw, number)
        if record is None:
            continue
        try:
            _build(record, description, time_slots)
        except CircuitParseError:
            raise
        except HgsaError as exc:
            raise record.fail(str(exc)) from exc
    return description


def parse_circuit(
    text: str, photons: Optional[int] = None, time_slots: int = DEFAULT_TIME_SLOTS
) -> Circuit:
    """A concrete circuit; the photon and atom counts default to the largest index used."""
    description = parse_description(text, time_slots)
    if description.template:
        raise CircuitParseError("template records (photon=*) need parse_template", 1)
    bindings = [s for element, _ in description.elements for s in element.bindings]
    bindings += [s for step, _ in description.measurements for s in step.subsystems]
    used_photons = [s.photon + 1 for s in bindings if isinstance(s, PhotonDof)]
    used_atoms = [s.index + 1 for s in bindings if isinstance(s, AtomId)]
    photon_count = photons or max(used_photons, default=1)
    try:
        spec = ModeSpec(photon_count, time_slots, DEFAULT_PATHS, max(used_atoms, default=0))
    except HgsaError as exc:
        raise CircuitParseError(str(exc), 1) from exc
    for element, line in description.elements:
        try:
            element.compile(spec)
        except HgsaError as exc:
            raise CircuitParseError(str(exc), line) from exc
    try:
        return Circuit(
            spec,
            tuple(element for element, _ in description.elements),
            tuple(step for step, _ in description.measurements),
            description.path_relabel,
            name="file",
        )
    except HgsaError as exc:
        raise CircuitParseError(str(exc), 1) from exc


def parse_template(text: str, time_slots: int = DEFAULT_TIME_SLOTS):
    """A per-photon TESA template; every element record must bind photon=*."""
    from .oracle import TesaConfig

    description = parse_description(text, time_slots)
    for element, line in description.elements:
        if element.atom is not None:
            raise CircuitParseError("templates cannot bind atoms", line)
    if description.elements and not description.template:
        raise CircuitParseError("template records must bind photon=*", description.elements[0][1])
    try:
        return TesaConfig(
            tuple(element for element, _ in description.elements), description.path_relabel
        )
    except HgsaError as exc:
        raise CircuitParseError(str(exc), 1) from exc


def load_circuit(path: Path, photons: Optional[int] = None, time_slots: int = DEFAULT_TIME_SLOTS) -> Circuit:
    return parse_circuit(Path(path).read_text(), photons, time_slots)


def load_tesa_circuit(path: Path, photons: int, time_slots: int = DEFAULT_TIME_SLOTS) -> Circuit:
    """A replacement step-2 circuit; it must measure pol and path of every photon."""
    circuit = load_circuit(path, photons, time_slots)
    if circuit.spec.atom_count:
        raise CircuitParseError("a TESA circuit cannot bind atoms", 1)
    measured = {s for step in circuit.measurements for s in step.subsystems}
    missing = [s for s in detection_subsystems(photons) if s not in measured]
    if missing:
        raise CircuitParseError(f"circuit never measures {missing[0]}", 1)
    return circuit


def load_template(path: Path, time_slots: int = DEFAULT_TIME_SLOTS):
    return parse_template(Path(path).read_text(), time_slots)


def _pair(pair) -> str:
    return f"{pair[0]}:{pair[1]}"


def format_element(element: ElementOp, photon_text: Optional[str] = None) -> str:
    """Record text for one element; ``photon_text`` overrides the photon number (e.g. '*')."""
    photon = photon_text or (str(element.photon + 1) if element.photon is not None else "")
    atom = str(element.atom + 1) if element.atom is not None else ""
    kind = element.kind
    params: list[str] = []

    if kind is ElementKind.CPF:
        head, bindings = "cpf", [f"atom={atom}", f"photon={photon}"]
    elif kind in (ElementKind.HWP_HADAMARD, ElementKind.HWP_FLIP):
        head, bindings = "hwp", [f"photon={photon}"]
        params = ["mode=hadamard" if kind is ElementKind.HWP_HADAMARD else "mode=flip"]
    elif kind is ElementKind.POCKELS:
        head, bindings = "pockels", [f"photon={photon}"]
        params = [f"trigger={element.param('trigger')}"]
    elif kind is ElementKind.PBS_SPLIT:
        head, bindings = "pbs", [f"photon={photon}"]
        params = [f"in={_pair(element.param('in'))}", f"out={_pair(element.param('out'))}"]
    elif kind is ElementKind.DELAY:
        head, bindings = "delay", [f"photon={photon}"]
        condition: DelayCondition = element.param("when")
        params = [f"when={condition}", f"slots={element.param('slots')}"]
    elif kind is ElementKind.BS_PATH:
        head, bindings = "bs", [f"photon={photon}"]
        params = [f"paths={_pair(element.param('paths'))}"]
    elif kind is ElementKind.T2P:
        head, bindings = "t2p", [f"photon={photon}"]
        params = [f"in={element.param('in')}", f"out={_pair(element.param('out'))}"]
    elif kind is ElementKind.ATOM_PREP:
        head, bindings = "prep", [f"atom={atom}"]
    elif kind is ElementKind.ATOM_READOUT:
        head, bindings = "readout", [f"atom={atom}"]
    else:
        (subsystem,) = element.bindings
        if isinstance(subsystem, AtomId):
            head, bindings = "identity", [f"atom={atom}"]
        else:
            head, bindings = "identity", [f"photon={photon}"]
            params = [f"dof={subsystem.dof.value}"]

    if element.adjoint:
        params.append("adjoint=true")
    text = f"{head}({', '.join(bindings)}"
    if params:
        text += f"; {', '.join(params)}"
    return text + ")"


def _format_step(step: MeasurementStep) -> str:
    atoms = [s for s in step.subsystems if isinstance(s, AtomId)]
    photons = sorted({s.photon for s in step.subsystems if isinstance(s, PhotonDof)})
    bindings = [f"atom={a.index + 1}" for a in atoms] + [f"photon={p + 1}" for p in photons]
    if atoms:
        basis = "pm" if step.basis is MeasurementBasis.PM_ATOM else "computational"
        return f"measure({', '.join(bindings)}; basis={basis})"
    dofs = []
    for s in step.subsystems:
        if isinstance(s, PhotonDof) and s.dof.value not in dofs:
            dofs.append(s.dof.value)
    return f"measure({', '.join(bindings)}; dofs={':'.join(dofs)})"


def dump_circuit(circuit: Circuit) -> str:
    spec = circuit.spec
    lines = [
        f"# {circuit.name or 'circuit'}: {spec.photon_count} photons, "
        f"{spec.atom_count} atoms, {spec.time_slots} time slots"
    ]
    lines += [format_element(e) for e in circuit.elements]
    lines += [_format_step(step) for step in circuit.measurements]
    if circuit.path_relabel is not None:
        lines.append(f"relabel(; paths={':'.join(str(p) for p in circuit.path_relabel)})")
    return "\n".join(lines) + "\n"


def format_config(config) -> str:
    """Template records joined with ' ; ' (one line, for reports)."""
    parts = [format_element(e, WILDCARD) for e in config.template]
    if config.path_relabel is not None:
        parts.append(f"relabel(; paths={':'.join(str(p) for p in config.path_relabel)})")
    return " ; ".join(parts) if parts else "(empty)"


def dump_template(config) -> str:
    lines = [format_element(e, WILDCARD) for e in config.template]
    if config.path_relabel is not None:
        lines.append(f"relabel(; paths={':'.join(str(p) for p in config.path_relabel)})")
    return "\n".join(lines) + "\n"
