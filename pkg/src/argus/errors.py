"""Exception types shared across the package."""


class ArgusError(Exception):
    """Base class for all argus errors."""


class FormulaSyntaxError(ArgusError):
    """Malformed formula text. Carries the character offset of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownAtomError(ArgusError):
    """Formula references an atom that is not in the vocabulary."""

    def __init__(self, atom: str, position: int | None = None):
        where = f" (at position {position})" if position is not None else ""
        super().__init__(f"unknown atom {atom!r}{where}")
        self.atom = atom
        self.position = position


class VocabularyMismatchError(ArgusError):
    """Operands were built over different vocabularies."""


class VocabularyTooLargeError(ArgusError):
    """Vocabulary exceeds the exhaustive-enumeration bound."""


class PremiseSetTooLargeError(ArgusError):
    """Premise set exceeds the subset-enumeration cap."""


class DomainError(ArgusError):
    """Numeric argument outside its legal domain."""


class NonMonotoneGammaError(ArgusError):
    """Weighting curve is not monotone at this gamma; inversion is ill-posed."""


class ConvergenceFailureError(ArgusError):
    """Root finding exhausted its iteration budget."""


class DegenerateUpdateError(ArgusError):
    """An update would place positive mass on a side with zero prior mass.

    Signals an irreconcilable argument rather than silently renormalizing.
    """

    def __init__(self, message: str, timestep: int | None = None):
        if timestep is not None:
            message = f"{message} (timestep {timestep})"
        super().__init__(message)
        self.timestep = timestep


class MalformedTraceError(ArgusError):
    """Dialogue trace violates the move-structure invariants."""


class NoArgumentAvailableError(ArgusError):
    """The agent has no unused valid argument left; the dialogue must end."""


class LengthMismatchError(ArgusError):
    """Paired inputs have different lengths."""


class DegenerateInputError(ArgusError):
    """Statistical input carries no usable variation."""


class InsufficientRoundsError(ArgusError):
    """Participant lacks the rounds a personalization variant requires."""
