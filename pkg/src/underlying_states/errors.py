"""Exception hierarchy shared by all modules."""


class UnderlyingStatesError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(UnderlyingStatesError, ValueError):
    """Operands have incompatible or malformed shapes."""


class ValidationError(UnderlyingStatesError, ValueError):
    """Input violates a structural requirement (e.g. not Hermitian)."""


class NumericError(UnderlyingStatesError, ArithmeticError):
    """A numerical routine failed or produced an out-of-range value."""


class UnknownOutcomeError(UnderlyingStatesError, KeyError):
    """The requested value is not an eigenvalue of the observable."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class UndefinedUpdateError(UnderlyingStatesError, ZeroDivisionError):
    """Conditioning on an event of (numerically) zero probability."""


class NoWitnessError(UnderlyingStatesError, ValueError):
    """A witness was requested for a compatible pair."""


class NoObstructionError(UnderlyingStatesError, ValueError):
    """An obstruction was requested for a pairwise compatible scenario."""


class IncompatibleScenarioError(UnderlyingStatesError, ValueError):
    """A model was requested for a scenario with an incompatible pair.

    The offending :class:`~underlying_states.compatibility.Witness` is kept
    on the ``witness`` attribute.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class CapacityError(UnderlyingStatesError, ValueError):
    """The product sample space exceeds the configured cap."""


class ScenarioFormatError(UnderlyingStatesError, ValueError):
    """A scenario document is malformed.

    ``location`` names the offending field (``observables[1].matrix.real``)
    or line, when known.
    """

    def __init__(self, message, location=None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
