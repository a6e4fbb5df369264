"""Hat guessing games on graphs: strategies, demons, exact solving and bounds."""

from ._kernels import BACKEND
from .game import (
    Counterexample, GameSpec, SearchBudget, Strategy, Win, evaluate, is_demonic,
    random_table_strategy, verify_winning,
)
from .graphcore import Graph

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Counterexample", "GameSpec", "Graph", "SearchBudget", "Strategy", "Win",
    "evaluate", "is_demonic", "random_table_strategy", "verify_winning",
]
