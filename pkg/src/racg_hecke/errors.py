"""Exception hierarchy shared by all modules."""


class RacgError(Exception):
    """Base class for every error raised by this package."""


class InputError(RacgError, ValueError):
    """Malformed or out-of-domain input (unknown generator, bad parameter)."""


class ThicknessError(InputError):
    """A building thickness below 2."""


class HypothesisError(RacgError):
    """A theorem hypothesis (irreducibility, rank, ...) is violated."""


class PreconditionError(RacgError, ValueError):
    """An operation was called outside of its documented precondition."""


class CapacityError(RacgError):
    """A configured size cap (ball size, clique count) would be exceeded."""


class BallOverflowError(CapacityError):
    """A product escaped the ball it was asked to stay in."""

    def __init__(self, message, word=None):
        super().__init__(message)
        self.word = word
