"""Exception and warning types raised across the package."""


class SpecRegError(Exception):
    """Base class for all package errors."""


class NotSquare(SpecRegError, ValueError):
    pass


class NotHermitian(SpecRegError, ValueError):
    pass


class NonFiniteEntries(SpecRegError, ValueError):
    pass


class NotPositiveSemidefinite(SpecRegError, ValueError):
    pass


class BadParams(SpecRegError, ValueError):
    pass


class DegenerateWindow(SpecRegError, ValueError):
    pass


class RankNotConstant(SpecRegError):
    """The per-node rank of the density varies on a set of positive measure.

    ``profile`` holds the rank found at every grid node.
    """

    def __init__(self, message, profile=None, fraction=None):
        super().__init__(message)
        self.profile = profile
        self.fraction = fraction


class ChannelCollapse(SpecRegError):
    def __init__(self, message, node=None, channel=None):
        super().__init__(message)
        self.node = node
        self.channel = channel


class LogDivergence(SpecRegError):
    pass


class NonpositiveEigenvalue(SpecRegError):
    """A retained eigenvalue is zero at some node, so the log integrand is -inf.

    ``result`` carries the integral evaluated with those nodes included
    (total is -inf) so callers can still report the finite part.
    """

    def __init__(self, message, nodes=None, result=None):
        super().__init__(message)
        self.nodes = nodes
        self.result = result


class NoNonvanishingMinor(SpecRegError):
    pass


class RankOutOfRange(SpecRegError, ValueError):
    pass


class PathTooShort(SpecRegError, ValueError):
    pass


class UnsimulableModel(SpecRegError):
    pass


class ExcessTailEnergy(UserWarning):
    """Truncating the filter window discarded more coefficient energy than allowed."""


class EpsBoundViolated(UserWarning):
    """The supplied (delta, eps) pair does not separate the eigenvalues at every node."""


class SingularBlock(UserWarning):
    """The Levinson recursion hit a numerically singular block and stopped early."""
