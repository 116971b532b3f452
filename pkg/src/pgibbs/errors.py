"""Exception types shared across the package."""


class PgibbsError(Exception):
    """Base class for all pgibbs-specific errors."""


class NetworkFormatError(PgibbsError):
    """A network document is malformed or references unknown nodes."""


class StructureError(PgibbsError):
    """A network violates the structural assumptions an operation relies on."""


class SizeLimitError(PgibbsError):
    """An enumeration or matrix would exceed its configured size cap."""


class ImpossibleConfigurationError(PgibbsError):
    """Both values of a variable have zero conditional weight.

    The current configuration has zero probability no matter which value
    the variable takes, so the Gibbs conditional is undefined.
    """


class ImpossibleEvidenceError(PgibbsError):
    """The observed evidence has zero probability under the network."""


class ImpossibleOutcomeError(PgibbsError):
    """A sample landed on an outcome the exact distribution assigns zero mass.

    For a sampler that is supposed to be exact this is a correctness
    violation, not a statistics failure.
    """


class NumericalError(PgibbsError):
    """A numerical routine failed to converge or returned unusable output."""
