"""Damping and decoherence of a cavity mode with a time-modulated frequency."""

__version__ = "0.1.0"

from .params import (DimensionlessGroup, ModulationSpec, ReservoirSpec,  # noqa: E402
                     StationaryModeError, derive_groups, modulation_from_groups)
from .kernel import ComplexDampingTrace, damping_trace, gamma_of_t  # noqa: E402
from .decoherence import CatStateSpec, c12  # noqa: E402

__all__ = [
    "CatStateSpec", "ComplexDampingTrace", "DimensionlessGroup", "ModulationSpec",
    "ReservoirSpec", "StationaryModeError", "c12", "damping_trace", "derive_groups",
    "gamma_of_t", "modulation_from_groups",
]
