"""Optical and atom-cavity elements as bound unitaries.

Every element is described by its kind, the subsystems it is bound to and a
few kind-specific parameters. ``ElementOp.compile`` turns it into the sparse
column map that ``hilbert.apply_op`` executes; the dense matrix on the bound
factor is checked for unitarity on the way.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from itertools import product
from typing import Any, Callable, Optional, Union

import numpy as np

from .errors import (
    ArgumentError,
    BindingError,
    ElementError,
    LatticeOverflowError,
    PreconditionError,
)
from .hilbert import (
    DEFAULT_TIME_SLOTS,
    AtomId,
    Dof,
    ModeSpec,
    PhotonDof,
    Subsystem,
)

logger = logging.getLogger(__name__)

UNITARITY_TOLERANCE = 1e-12
_S = 1 / math.sqrt(2)


class ElementKind(str, Enum):
    """Element inventory."""

    IDENTITY = "identity"
    CPF = "cpf"
    HWP_HADAMARD = "hwp_hadamard"
    HWP_FLIP = "hwp_flip"
    POCKELS = "pockels"
    PBS_SPLIT = "pbs"
    DELAY = "delay"
    BS_PATH = "bs"
    T2P = "t2p"
    ATOM_PREP = "prep"
    ATOM_READOUT = "readout"


INVOLUTIONS = frozenset(
    {
        ElementKind.IDENTITY,
        ElementKind.CPF,
        ElementKind.HWP_HADAMARD,
        ElementKind.HWP_FLIP,
        ElementKind.POCKELS,
        ElementKind.BS_PATH,
        ElementKind.ATOM_PREP,
        ElementKind.ATOM_READOUT,
    }
)


class HwpMode(str, Enum):
    HADAMARD = "hadamard"
    FLIP = "flip"


@dataclass(frozen=True)
class DelayCondition:
    """Which components a delay line picks up: pol = H/V or path = k."""

    dof: Dof
    level: int

    @classmethod
    def parse(cls, text: str) -> "DelayCondition":
        """Accepts ``H``, ``V``, ``x<k>``, ``pol=H``, ``pol=V`` or ``path=<k>``."""
        token = text.strip().replace(" ", "")
        if "=" in token:
            name, _, value = token.partition("=")
            if name == "pol" and value in ("H", "V"):
                token = value
            elif name == "path" and value.isdigit():
                token = f"x{value}"
            else:
                raise ArgumentError(f"unknown delay condition '{text}'")
        if token == "H":
            return cls(Dof.POL, 0)
        if token == "V":
            return cls(Dof.POL, 1)
        if token.startswith("x") and token[1:].isdigit() and int(token[1:]) >= 1:
            return cls(Dof.PATH, int(token[1:]))
        raise ArgumentError(f"unknown delay condition '{text}'")

    def __str__(self) -> str:
        if self.dof is Dof.POL:
            return "H" if self.level == 0 else "V"
        return f"x{self.level}"


@dataclass(frozen=True)
class CompiledAction:
    """Sparse columns of an element's matrix plus its support check."""

    columns: dict
    requires_product: bool = False
    checker: Optional[Callable[[tuple], None]] = None

    def check(self, local_key: tuple) -> None:
        if self.checker is not None:
            self.checker(local_key)


@dataclass(frozen=True)
class ElementOp:
    """An element bound to concrete subsystems.

    ``params`` is a tuple of (name, value) pairs so that elements stay
    hashable; ``adjoint`` marks the conjugate transpose.
    """

    kind: ElementKind
    bindings: tuple
    params: tuple = ()
    adjoint: bool = False

    def param(self, name: str, default: Any = None) -> Any:
        for key, value in self.params:
            if key == name:
                return value
        return default

    @property
    def photon(self) -> Optional[int]:
        for subsystem in self.bindings:
            if isinstance(subsystem, PhotonDof):
                return subsystem.photon
        return None

    @property
    def atom(self) -> Optional[int]:
        for subsystem in self.bindings:
            if isinstance(subsystem, AtomId):
                return subsystem.index
        return None

    def inverse(self) -> "ElementOp":
        if self.kind in INVOLUTIONS:
            return self
        return replace(self, adjoint=not self.adjoint)

    def for_photon(self, photon: int) -> "ElementOp":
        """The same element acting on another photon."""
        bindings = tuple(
            PhotonDof(photon, s.dof) if isinstance(s, PhotonDof) else s for s in self.bindings
        )
        return replace(self, bindings=bindings)

    def matrix(self, spec: ModeSpec) -> np.ndarray:
        """Dense matrix on the bound factor, rows/columns in ``local_basis`` order."""
        return _matrix(self, spec)

    def local_basis(self, spec: ModeSpec) -> list[tuple]:
        return list(product(*(spec.levels(s) for s in self.bindings)))

    def compile(self, spec: ModeSpec) -> CompiledAction:
        return _compile(self, spec)

    def __str__(self) -> str:
        from .circuit_file import format_element

        return format_element(self)


def _photon_pol(photon: Union[int, PhotonDof]) -> PhotonDof:
    if isinstance(photon, PhotonDof):
        if photon.dof is not Dof.POL:
            raise BindingError(f"{photon} is not a polarization subsystem")
        return photon
    return PhotonDof(int(photon), Dof.POL)


def _photon_index(photon: Union[int, PhotonDof]) -> int:
    return photon.photon if isinstance(photon, PhotonDof) else int(photon)


def _atom(atom: Union[int, AtomId]) -> AtomId:
    return atom if isinstance(atom, AtomId) else AtomId(int(atom))


def _path_pair(pair, what: str) -> tuple[int, int]:
    first, second = (int(v) for v in pair)
    if first == second:
        raise ArgumentError(f"{what} must name two distinct paths, got {first} twice")
    if first < 1 or second < 1:
        raise ArgumentError(f"{what} must use path labels >= 1")
    return first, second


def make_identity(subsystem: Subsystem) -> ElementOp:
    return ElementOp(ElementKind.IDENTITY, (subsystem,))


def make_cpf(atom: Union[int, AtomId], photon: Union[int, PhotonDof]) -> ElementOp:
    """Cavity-assisted controlled phase flip exp(i*pi |1><1| (x) |H><H|)."""
    return ElementOp(ElementKind.CPF, (_atom(atom), _photon_pol(photon)))


def make_hwp(photon: Union[int, PhotonDof], mode: Union[HwpMode, str] = HwpMode.HADAMARD) -> ElementOp:
    mode = HwpMode(mode)
    kind = ElementKind.HWP_HADAMARD if mode is HwpMode.HADAMARD else ElementKind.HWP_FLIP
    return ElementOp(kind, (_photon_pol(photon),))


def make_pockels(
    photon: Union[int, PhotonDof], trigger_slot: int, time_slots: int = DEFAULT_TIME_SLOTS
) -> ElementOp:
    """Polarization flip gated on one time slot."""
    if not 0 <= trigger_slot < time_slots:
        raise ArgumentError(f"trigger slot {trigger_slot} is outside slots 0..{time_slots - 1}")
    p = _photon_index(photon)
    return ElementOp(
        ElementKind.POCKELS,
        (PhotonDof(p, Dof.POL), PhotonDof(p, Dof.SLOT)),
        (("trigger", int(trigger_slot)),),
    )


def make_pbs(
    photon: Union[int, PhotonDof],
    in_paths: tuple[int, int] = (1, 2),
    out_paths: tuple[int, int] = (1, 2),
) -> ElementOp:
    """Polarizing beam splitter: H transmits (a->o1, b->o2), V reflects (a->o2, b->o1)."""
    in_paths = _path_pair(in_paths, "PBS input ports")
    out_paths = _path_pair(out_paths, "PBS output ports")
    if set(in_paths) != set(out_paths):
        raise ArgumentError(f"PBS ports {in_paths} -> {out_paths} must connect the same two paths")
    p = _photon_index(photon)
    return ElementOp(
        ElementKind.PBS_SPLIT,
        (PhotonDof(p, Dof.POL), PhotonDof(p, Dof.PATH)),
        (("in", in_paths), ("out", out_paths)),
    )


def make_delay(
    photon: Union[int, PhotonDof],
    condition: Union[DelayCondition, str],
    slots: int = 1,
) -> ElementOp:
    """Unbalanced-arm delay: shift the slot of matching components by ``slots``."""
    if isinstance(condition, str):
        condition = DelayCondition.parse(condition)
    if int(slots) < 1:
        raise ArgumentError(f"delay must be a positive number of slots, got {slots}")
    p = _photon_index(photon)
    return ElementOp(
        ElementKind.DELAY,
        (PhotonDof(p, condition.dof), PhotonDof(p, Dof.SLOT)),
        (("when", condition), ("slots", int(slots))),
    )


def make_bs(photon: Union[int, PhotonDof], paths: tuple[int, int] = (1, 2)) -> ElementOp:
    """50:50 beam splitter acting as a Hadamard on the two paths."""
    paths = _path_pair(paths, "beam splitter paths")
    return ElementOp(
        ElementKind.BS_PATH, (PhotonDof(_photon_index(photon), Dof.PATH),), (("paths", paths),)
    )


def make_t2p(
    photon: Union[int, PhotonDof],
    out_paths: tuple[int, int] = (1, 2),
    in_path: int = 1,
) -> ElementOp:
    """Time-to-path transduction with the self-assisted polarization flip.

    |p,S> -> |p, o1>, |p,L> -> |flip(p), o2>, both in slot 1.
    """
    out_paths = _path_pair(out_paths, "T2P output paths")
    if int(in_path) < 1:
        raise ArgumentError("T2P input path must be >= 1")
    p = _photon_index(photon)
    return ElementOp(
        ElementKind.T2P,
        photon_bindings(p),
        (("in", int(in_path)), ("out", out_paths)),
    )


def photon_bindings(photon: int) -> tuple[PhotonDof, PhotonDof, PhotonDof]:
    return (PhotonDof(photon, Dof.POL), PhotonDof(photon, Dof.SLOT), PhotonDof(photon, Dof.PATH))


def atom_prepare_plus(atom: Union[int, AtomId]) -> ElementOp:
    """Rotate a fresh atom from |0> to |+>."""
    return ElementOp(ElementKind.ATOM_PREP, (_atom(atom),))


def atom_readout(atom: Union[int, AtomId]) -> ElementOp:
    """Hadamard that maps the |+>/|-> readout onto levels 0/1."""
    return ElementOp(ElementKind.ATOM_READOUT, (_atom(atom),))


# Column builders: local key -> list of (local key, coefficient)


def _identity_column(element, spec, key):
    return [(key, 1.0)]


def _cpf_column(element, spec, key):
    atom, pol = key
    return [(key, -1.0 if (atom == 1 and pol == 0) else 1.0)]


def _hadamard_column(element, spec, key):
    (level,) = key
    return [((0,), _S), ((1,), _S if level == 0 else -_S)]


def _flip_column(element, spec, key):
    (pol,) = key
    return [((1 - pol,), 1.0)]


def _pockels_column(element, spec, key):
    pol, slot = key
    if slot == element.param("trigger"):
        pol = 1 - pol
    return [((pol, slot), 1.0)]


def _pbs_column(element, spec, key):
    pol, path = key
    (a, b), (o1, o2) = element.param("in"), element.param("out")
    if path == a:
        path = o1 if pol == 0 else o2
    elif path == b:
        path = o2 if pol == 0 else o1
    return [((pol, path), 1.0)]


def _delay_column(element, spec, key):
    cond, slot = key
    if cond == element.param("when").level:
        slot = (slot + element.param("slots")) % spec.time_slots
    return [((cond, slot), 1.0)]


def _bs_column(element, spec, key):
    (path,) = key
    x1, x2 = element.param("paths")
    if path == x1:
        return [((x1,), _S), ((x2,), _S)]
    if path == x2:
        return [((x1,), _S), ((x2,), -_S)]
    return [(key, 1.0)]


def _t2p_permutation(element, spec) -> dict[tuple, tuple]:
    in_path = element.param("in")
    o1, o2 = element.param("out")
    mapping = {}
    for pol in (0, 1):
        mapping[(pol, 0, in_path)] = (pol, 1, o1)
        mapping[(pol, 1, in_path)] = (1 - pol, 1, o2)
    basis = element.local_basis(spec)
    free_in = [k for k in basis if k not in mapping]
    used = set(mapping.values())
    free_out = [k for k in basis if k not in used]
    mapping.update(zip(free_in, free_out))
    return mapping


def _t2p_column(element, spec, key):
    return [(_t2p_permutation(element, spec)[key], 1.0)]


_COLUMNS = {
    ElementKind.IDENTITY: _identity_column,
    ElementKind.CPF: _cpf_column,
    ElementKind.HWP_HADAMARD: _hadamard_column,
    ElementKind.HWP_FLIP: _flip_column,
    ElementKind.POCKELS: _pockels_column,
    ElementKind.PBS_SPLIT: _pbs_column,
    ElementKind.DELAY: _delay_column,
    ElementKind.BS_PATH: _bs_column,
    ElementKind.T2P: _t2p_column,
    ElementKind.ATOM_PREP: _hadamard_column,
    ElementKind.ATOM_READOUT: _hadamard_column,
}


def _validate_against(element: ElementOp, spec: ModeSpec) -> None:
    paths = spec.paths_per_photon
    labels: list[int] = []
    if element.kind is ElementKind.POCKELS:
        trigger = element.param("trigger")
        if not 0 <= trigger < spec.time_slots:
            raise ArgumentError(f"trigger slot {trigger} is outside slots 0..{spec.time_slots - 1}")
    elif element.kind is ElementKind.PBS_SPLIT:
        labels = [*element.param("in"), *element.param("out")]
    elif element.kind is ElementKind.BS_PATH:
        labels = list(element.param("paths"))
    elif element.kind is ElementKind.T2P:
        labels = [element.param("in"), *element.param("out")]
    elif element.kind is ElementKind.DELAY:
        when = element.param("when")
        if when.dof is Dof.PATH:
            labels = [when.level]
        if element.param("slots") >= spec.time_slots:
            raise ArgumentError(f"delay of {element.param('slots')} slots exceeds the lattice")
    bad = [label for label in labels if label > paths]
    if bad:
        raise ArgumentError(f"path {bad[0]} does not exist (paths per photon: {paths})")


@functools.lru_cache(maxsize=4096)
def _matrix(element: ElementOp, spec: ModeSpec) -> np.ndarray:
    _validate_against(element, spec)
    basis = element.local_basis(spec)
    index = {key: i for i, key in enumerate(basis)}
    builder = _COLUMNS[element.kind]
    matrix = np.zeros((len(basis), len(basis)), dtype=complex)
    for j, key in enumerate(basis):
        for out_key, coeff in builder(element, spec, key):
            matrix[index[out_key], j] += coeff
    if element.adjoint:
        matrix = matrix.conj().T
    matrix.setflags(write=False)
    return matrix


def is_unitary(matrix: np.ndarray, tolerance: float = UNITARITY_TOLERANCE) -> bool:
    identity = np.eye(matrix.shape[0])
    return bool(np.allclose(matrix.conj().T @ matrix, identity, atol=tolerance, rtol=0.0))


def _support_checker(element: ElementOp, spec: ModeSpec) -> Optional[Callable[[tuple], None]]:
    if element.kind is ElementKind.DELAY:
        level = element.param("when").level
        shift = -element.param("slots") if element.adjoint else element.param("slots")
        last = spec.time_slots - 1

        def check_delay(key: tuple) -> None:
            cond, slot = key
            if cond == level and not 0 <= slot + shift <= last:
                raise LatticeOverflowError(
                    f"delay by {shift} moves slot {slot} outside 0..{last}"
                )

        return check_delay

    if element.kind is ElementKind.T2P and not element.adjoint:
        in_path = element.param("in")

        def check_t2p(key: tuple) -> None:
            _, slot, path = key
            if slot not in (0, 1) or path != in_path:
                raise PreconditionError(
                    f"T2P expects slots S/L on path x{in_path}, found slot {slot} on path x{path}"
                )

        return check_t2p

    return None


@functools.lru_cache(maxsize=4096)
def _compile(element: ElementOp, spec: ModeSpec) -> CompiledAction:
    matrix = _matrix(element, spec)
    if not is_unitary(matrix):
        raise ElementError(f"{element.kind.value} element is not unitary")
    basis = element.local_basis(spec)
    columns = {}
    for j, key in enumerate(basis):
        column = matrix[:, j]
        columns[key] = tuple(
            (basis[i], complex(column[i])) for i in np.flatnonzero(np.abs(column) > 0)
        )
    logger.debug("compiled %s on %s", element.kind.value, spec)
    return CompiledAction(
        columns=columns,
        requires_product=element.kind is ElementKind.ATOM_PREP,
        checker=_support_checker(element, spec),
    )
