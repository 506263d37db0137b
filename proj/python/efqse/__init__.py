"""Entanglement forging with quantum subspace expansion."""

from ._core import (
    ConfigError,
    Error,
    Integrals,
    NumericalError,
    ParseError,
    State,
    casci,
    hartree_to_ev,
    read_fcidump,
    resource_count,
    run,
)

__all__ = [
    "ConfigError",
    "Error",
    "Integrals",
    "NumericalError",
    "ParseError",
    "State",
    "casci",
    "hartree_to_ev",
    "read_fcidump",
    "resource_count",
    "run",
]
