"""Damped quantum oscillator observables from a susceptibility."""

from ._qdho import (
    ConvergenceError,
    DiagonalizabilityReport,
    DivergenceError,
    DomainError,
    Error,
    ModelParams,
    NotDiagonalizableError,
    Observables,
    PassivityError,
    PoleError,
    TabulatedChi,
    TailMismatchError,
    ToleranceError,
    check_diagonalizable,
    chi,
    kk_re_chi,
    oracle,
    poles,
    q2_matsubara,
    thermal,
    zero_point,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
