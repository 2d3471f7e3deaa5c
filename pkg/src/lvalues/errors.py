"""Exception hierarchy shared by all modules."""


class LValueError(Exception):
    """Base class for every error raised by this package."""


class PrecisionExhausted(LValueError):
    """A requested coefficient cannot be certified from the stored precision."""


class InvZero(LValueError):
    """Inversion of a series with no visible nonzero coefficient."""


class NotLocallyContracting(LValueError):
    """An operator coefficient has a tau-free component."""


class TailNotCertified(LValueError):
    """A series evaluation could not bound its truncation tail."""


class IsometryRadiusNotCertified(LValueError):
    pass


class WindowNotStabilized(LValueError):
    pass


class RankDeficient(LValueError):
    """The search window did not contain a full-rank sublattice."""


class DegenerateBasis(LValueError):
    pass


class ConfigError(LValueError):
    """Malformed job configuration or polynomial text."""
