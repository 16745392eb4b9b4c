"""Unistochastic processes: indivisible stochastic dynamics built from unitaries.

Submodules:

- ``linalg``: matrix helpers (Hermitian exponentials, partial traces, stochastic checks)
- ``dynamics``: schedules, transition matrices, divisibility and division events
- ``quantum``: density matrices, observables and the Born-rule correspondence
- ``causality``: composite systems and causal influence between subsystems
- ``bell``: EPR, CHSH and hidden-variable models
- ``bayesnet``: conditional tables, joints and common-cause tests
- ``io`` and ``cli``: JSON/CSV formats and the ``unilab`` command
"""

from .dynamics import (
    HamiltonianSchedule,
    UnitaryEvolution,
    divisibility_decide,
    transition_report,
    unistochastic_from_unitary,
)
from .errors import (
    DimensionError,
    PremiseError,
    RangeError,
    UnilabError,
    ValidationError,
    ZeroSupportError,
)

__all__ = [
    "DimensionError",
    "HamiltonianSchedule",
    "PremiseError",
    "RangeError",
    "UnilabError",
    "UnitaryEvolution",
    "ValidationError",
    "ZeroSupportError",
    "divisibility_decide",
    "transition_report",
    "unistochastic_from_unitary",
]
__version__ = "0.1.0"
