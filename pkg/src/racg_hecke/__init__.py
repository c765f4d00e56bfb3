"""Multiparameter Hecke algebras of right-angled Coxeter groups."""

__version__ = "0.1.0"

from .coxeter import BallBasis, CoxeterSystem, LetterStatistics, enumerate_ball
from .errors import (
    BallOverflowError,
    CapacityError,
    HypothesisError,
    InputError,
    PreconditionError,
    RacgError,
    ThicknessError,
)
