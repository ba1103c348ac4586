"""Exception types shared across the toolkit."""


class DistboundError(Exception):
    """Base class for all toolkit errors."""


class TooSmall(DistboundError):
    """Grid smaller than the minimal 3x3 layout."""


class EmptyMask(DistboundError):
    """Mask contains no inside node."""


class MaskTouchesBorder(DistboundError):
    """An inside node sits on the image border (one-pixel margin is mandatory)."""


class MaskMismatch(DistboundError):
    """Two fields do not live on the same mask."""


class DegenerateSum(DistboundError):
    """A kernel-weighted denominator collapsed to zero."""


class BadLambda(DistboundError):
    """Sharpness parameter outside the range where blend weights stay in (0, 1)."""


class BadConfig(DistboundError):
    """Invalid run configuration."""


class ParseError(DistboundError):
    """Malformed input file."""


class EmptySlice(DistboundError):
    """Requested row does not intersect the domain."""


class DoesNotFit(DistboundError):
    """Generated shape does not fit the canvas with the required margin."""


class ClampWarning(RuntimeWarning):
    """A positivity clamp had to rescue a non-positive solver value."""
