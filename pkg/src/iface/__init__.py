"""Minimum-cardinality sensor selection for situation awareness under a
given level of user trust."""

from .awareness import AwarenessFamily, awareness_family, is_situation_aware
from .errors import DataError, InfeasibleError, InputError, InstanceError, NumericalError
from .model import LtiSystem, SensorPool, SensorSet, Task, TrustLevel, build_chain_example
from .solver import Solution, solve
from .uii import GammaOracle

__all__ = [
    "AwarenessFamily",
    "DataError",
    "GammaOracle",
    "InfeasibleError",
    "InputError",
    "InstanceError",
    "LtiSystem",
    "NumericalError",
    "SensorPool",
    "SensorSet",
    "Solution",
    "Task",
    "TrustLevel",
    "awareness_family",
    "build_chain_example",
    "is_situation_aware",
    "solve",
]
__version__ = "0.1.0"
