"""Exception hierarchy shared across the package.

Three broad classes matter to callers (and map to distinct CLI exit codes):
configuration problems, contract/physics violations, and resource limits.
"""


class SpintopError(Exception):
    """Base class for all package errors."""


class ConfigError(SpintopError):
    """Bad scenario file, unknown override key, or invalid field value."""


class ContractError(SpintopError):
    """A precondition or postcondition of an operation was violated."""


class DomainError(ContractError):
    """Physically meaningless input (non-positive density, n_e <= n_o, ...)."""


class TruncationError(ContractError):
    """Coherent amplitude too large for the requested Fock truncation."""


class LinearizationFloorError(ContractError):
    """Photon/quanta numbers below the validity floor of the linearized
    Gaussian model; use the exact route instead."""


class IntegrationQualityError(ContractError):
    """Fixed-step integration failed its conservation-drift bound."""


class DegenerateConditioningError(ContractError):
    """Gaussian conditioning on an outcome with (numerically) zero variance."""


class ResourceLimitError(SpintopError):
    """Requested Hilbert-space dimension exceeds the configured cap."""
