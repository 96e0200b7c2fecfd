"""Dissipative dynamics and quantum correlations of two atoms in a lossy cavity."""

from ._backend import NAME as BACKEND
from .dynamics import (
    ClosedState,
    DegeneracyError,
    IntegrationError,
    Trajectory,
    integrate,
    integrate_full,
    rhs_closed,
    steady_state,
)
from .measures import (
    CorrelationRecord,
    XState,
    chsh,
    classical_correlation,
    concurrence,
    discord_closed,
    discord_numeric,
    eof_pure,
    mutual_information,
    purity,
    reduce_to_xstate,
)
from .model import FullState, InitialState, SystemParams, hamiltonian, initial_density, liouvillian

__version__ = "0.1.0"
