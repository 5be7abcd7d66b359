"""Exception hierarchy shared by the codec, the kernels and the container layer."""


class EczError(Exception):
    """Base class for every error raised by this package."""


class SampleRangeError(EczError, ValueError):
    """An input sample lies outside the signed range of the configured bit depth."""


class FrameLayoutError(EczError, ValueError):
    """A frame payload has the wrong arity or a field that does not fit its width."""


class CorruptionError(EczError, ValueError):
    """Decoded data is inconsistent; ``index`` is the offending frame, if known."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class InvalidHeader(CorruptionError):
    """A frame word starts with the unassigned prefix ``0010``."""


class RangeCorruption(CorruptionError):
    """A reconstructed sample left the signed sample range (lost lockstep)."""


class ContainerError(EczError, ValueError):
    """Base class for malformed container files."""


class BadMagic(ContainerError):
    pass


class UnsupportedVersion(ContainerError):
    pass


class TruncatedContainer(ContainerError):
    pass
