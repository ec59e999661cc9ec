"""Exception hierarchy for the HGSA simulator."""


class HgsaError(Exception):
    """Base class for all simulator errors."""


class ArgumentError(HgsaError, ValueError):
    """An argument is outside the range an operation accepts."""


class ModeSpecError(ArgumentError):
    """A ModeSpec violates its bounds."""


class LabelError(ArgumentError):
    """A GHZ or hyperentangled label is malformed or not canonical."""


class CompositionError(HgsaError):
    """Subsystems overlap, are missing, or belong to incompatible specs."""


class ElementError(HgsaError):
    """An optical or atom-cavity element is not a valid unitary."""


class BindingError(ElementError):
    """An element is bound to a subsystem of the wrong kind."""


class LatticeOverflowError(HgsaError):
    """A delay pushed amplitude outside the time-slot lattice."""


class PreconditionError(HgsaError):
    """A state does not satisfy an element's or operation's precondition."""


class TemporalDistinguishabilityError(HgsaError):
    """Photon amplitude is spread over more than one time slot at detection."""


class CircuitParseError(HgsaError):
    """A circuit description could not be parsed.

    Carries the 1-based line and column of the offending token.
    """

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column
