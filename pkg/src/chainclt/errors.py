"""Exception hierarchy.

Every error raised by the library derives from :class:`ChainCLTError`, and the
input-validation ones also derive from :class:`ValueError` so callers that only
know about the builtin still catch them.
"""


class ChainCLTError(Exception):
    """Base class for all library errors."""


class NegativeWeight(ChainCLTError, ValueError):
    pass


class NotNormalized(ChainCLTError, ValueError):
    pass


class LengthMismatch(ChainCLTError, ValueError):
    pass


class EmptyClass(ChainCLTError, ValueError):
    pass


class MassOverflow(ChainCLTError, ValueError):
    pass


class MetricMismatch(ChainCLTError, ValueError):
    pass


class ClassMismatch(ChainCLTError, ValueError):
    pass


class LevelOutOfRange(ChainCLTError, ValueError):
    pass


class SpaceMismatch(ChainCLTError, ValueError):
    pass


class BadU(ChainCLTError, ValueError):
    """Deviation parameter ``u`` must exceed 1/2."""


class NotPSD(ChainCLTError, ValueError):
    pass


class TooLarge(ChainCLTError, ValueError):
    """Exact enumeration would exceed the configured outcome budget."""


class DegenerateTarget(ChainCLTError, ValueError):
    pass


class ConfigError(ChainCLTError, ValueError):
    pass
