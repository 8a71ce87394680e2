"""Semiclassical dispersive evolutions on periodic grids and their eps -> 0 limits."""

__version__ = "0.1.0"

from .symbols import ContractError, SymbolSpec, PotentialSpec, builtin_symbol, builtin_potential  # noqa: E402
from .grid import Grid, Field, UnderResolved  # noqa: E402
from .propagator import TimeWindow, evolve, free_evolve, strang_evolve, profile_evolve  # noqa: E402
from .initial_data import FAMILY_VARIANTS, sample_data, auto_grid  # noqa: E402
from .wigner import wigner_transform, two_micro_expect, converged_average  # noqa: E402

__all__ = [
    "__version__", "ContractError", "SymbolSpec", "PotentialSpec", "builtin_symbol", "builtin_potential",
    "Grid", "Field", "UnderResolved", "TimeWindow", "evolve", "free_evolve", "strang_evolve",
    "profile_evolve", "FAMILY_VARIANTS", "sample_data", "auto_grid", "wigner_transform",
    "two_micro_expect", "converged_average",
]
