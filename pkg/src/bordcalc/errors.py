"""Exception hierarchy shared across the package.

Library code raises these; the command line front end maps them to exit
codes (input 2, resource 3, precondition 4) and never lets them escape.
"""


class BordcalcError(Exception):
    """Base class for every error raised by this package."""


class InputError(BordcalcError):
    """Malformed user input: bad syntax, unknown names, invalid files."""


class PresentationSyntaxError(InputError):
    """Syntax error in the presentation DSL, with source position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ResourceLimitError(BordcalcError):
    """A configured cap was hit (group order, coset count, matrix size)."""


class EliminationOverflowError(ResourceLimitError):
    """Integer elimination exceeded the 128-bit working range.

    Raised by smith_normal_form; callers should retry with a modular ring.
    """


class PreconditionError(BordcalcError):
    """An operation was invoked outside its stated contract."""


class InvalidActionError(PreconditionError):
    """A semidirect-product action is not a homomorphism to Aut(N)."""


class NotNormalError(PreconditionError):
    """A quotient was requested by a non-normal subgroup."""
