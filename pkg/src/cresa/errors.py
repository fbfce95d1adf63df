"""Exception types raised across the package."""


class CREError(ValueError):
    """Base class for all package errors."""


class DistributionError(CREError):
    """Invalid distribution parameters."""


class UnsupportedFamilyError(CREError):
    """Operation not available for the requested distribution family."""


class TooFewSamplesError(CREError):
    """Estimator received fewer samples than it needs."""


class DegenerateOutputError(CREError):
    """Model output carries no uncertainty (zero CRE or zero variance)."""


class ModelDomainError(CREError):
    """Model evaluated outside its domain of validity."""


class ConfigError(CREError):
    """Malformed or inconsistent experiment configuration."""
