"""Exception types shared across the package."""


class HahnautoError(Exception):
    """Base class for all library errors."""


class ConfigMismatchError(HahnautoError, ValueError):
    """Operands live in different finite fields."""


class FormatError(HahnautoError, ValueError):
    """Malformed text input."""


class DomainError(HahnautoError, ValueError):
    """A value falls outside the exponent universe (e.g. a negative exponent)."""


class AlphabetError(HahnautoError, ValueError):
    """A symbol is not part of the automaton's input alphabet."""


class IncompatibleError(HahnautoError, ValueError):
    """Automata with different fields, alphabets or semantics were combined."""


class InseparableError(HahnautoError):
    """The derivative vanishes, so coefficientwise lifting is ambiguous."""


class NoRootError(HahnautoError):
    """No power series root extends the given prefix."""


class ReducibleError(HahnautoError):
    """The polynomial has a nontrivial factor."""

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


class BudgetExceeded(HahnautoError):
    """An exploration hit its state or step budget."""

    def __init__(self, message, explored=None):
        super().__init__(message)
        self.explored = explored


class BoundsExceeded(HahnautoError):
    """No relation exists within the requested degree bounds."""

    def __init__(self, message, rank_profile=None):
        super().__init__(message)
        self.rank_profile = rank_profile


class UnderdeterminedError(HahnautoError):
    """Too few equations to make a guessed relation meaningful."""


class PreconditionError(HahnautoError, ValueError):
    """An operation's structural precondition is violated."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class PrescalingError(HahnautoError, ValueError):
    """The declared t-power prescaling does not clear the poles at 0."""


class AmbiguityError(HahnautoError):
    """Several candidate solutions agree with the available data."""


class InconclusiveError(HahnautoError):
    """A finite computation could not settle the question asked."""


class AccumulationError(HahnautoError):
    """The support below the bound is too large to truncate (possibly infinite)."""
