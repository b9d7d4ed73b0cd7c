"""spintop: quantum-noise-limited angular-momentum readout of a spinning
birefringent micro-object.

Layered as classical polarization optics (:mod:`spintop.jones_optics`),
rigid-body mechanics (:mod:`spintop.rigid_top`), exact truncated-Hilbert-space
dynamics (:mod:`spintop.hilbert`), the linearized Gaussian measurement model
(:mod:`spintop.gaussian_measurement`), and a scenario-driven CLI
(:mod:`spintop.cli`).
"""

from .errors import (ConfigError, ContractError, DegenerateConditioningError,
                     DomainError, IntegrationQualityError,
                     LinearizationFloorError, ResourceLimitError, SpintopError,
                     TruncationError)
from .scenario import Scenario, paper_quartz

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ContractError",
    "DegenerateConditioningError",
    "DomainError",
    "IntegrationQualityError",
    "LinearizationFloorError",
    "ResourceLimitError",
    "Scenario",
    "SpintopError",
    "TruncationError",
    "__version__",
    "paper_quartz",
]
