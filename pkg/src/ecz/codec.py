"""Single-channel codec core.

Slope prediction, residual computation and its inverse, width
classification, the 16-bit frame layouts and the greedy packing rule.

Frame layouts (header read from the most significant bit)::

    A  1     3 x 5-bit residuals
    B  01    2 x 7-bit residuals
    C  0001  4 x 3-bit residuals
    D  0000  6 x 2-bit residuals
    E  0011  1 x 12-bit raw sample (resynchronisation point)

The prefix ``0010`` is unassigned and always means corruption.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .errors import FrameLayoutError, InvalidHeader, RangeCorruption, SampleRangeError

MIN_WIDTH = 8
MAX_WIDTH = 12
DEFAULT_WIDTH = 12
BUFFER_CAPACITY = 6
RAW_FIELD_BITS = 12


class FrameType(enum.Enum):
    # value: (header bits, header length, field width, field count)
    A = ("1", 5, 3)
    B = ("01", 7, 2)
    C = ("0001", 3, 4)
    D = ("0000", 2, 6)
    E = ("0011", RAW_FIELD_BITS, 1)

    def __init__(self, header: str, field_bits: int, count: int):
        self.header = header
        self.field_bits = field_bits
        self.count = count

    @property
    def header_bits(self) -> int:
        return len(self.header)


# Priority order for residual frames; E is the fallback.
PACKING_ORDER = (FrameType.D, FrameType.C, FrameType.A, FrameType.B)


class WidthClass(enum.IntEnum):
    """Smallest supported two's-complement width holding a residual."""

    W2 = 2
    W3 = 3
    W5 = 5
    W7 = 7
    FULL = 8

    def fits(self, bits: int) -> bool:
        return self is not WidthClass.FULL and self.value <= bits


def check_width(width: int) -> int:
    if not MIN_WIDTH <= width <= MAX_WIDTH:
        raise ValueError(f"sample width must be in {MIN_WIDTH}..{MAX_WIDTH}, got {width}")
    return width


def sample_range(width: int) -> tuple[int, int]:
    """Inclusive ``(lo, hi)`` bounds of a signed ``width``-bit sample."""
    half = 1 << (width - 1)
    return -half, half - 1


def fits_bits(value: int, bits: int) -> bool:
    half = 1 << (bits - 1)
    return -half <= value < half


def to_field(value: int, bits: int) -> int:
    return value & ((1 << bits) - 1)


def from_field(field: int, bits: int) -> int:
    sign = 1 << (bits - 1)
    return (field ^ sign) - sign


@dataclass(frozen=True)
class PredictorState:
    """The two most recent samples, ``x1`` = x(n-1) and ``x2`` = x(n-2)."""

    x1: int = 0
    x2: int = 0

    @classmethod
    def anchored(cls, x: int) -> PredictorState:
        # State after a resynchronisation frame: zero slope through x.
        return cls(x, x)


@dataclass(slots=True)
class PendingEntry:
    """One queued residual plus its raw sample, in case it leaves as a type E frame."""

    error: int
    width: WidthClass
    raw: int
    forced: bool = False


def predict(state: PredictorState) -> int:
    return 2 * state.x1 - state.x2


def compute_error(state: PredictorState, x: int) -> tuple[int, PredictorState]:
    return x - predict(state), PredictorState(x, state.x1)


def reconstruct(
    state: PredictorState, error: int, width: int = DEFAULT_WIDTH
) -> tuple[int, PredictorState]:
    """Invert :func:`compute_error`.

    Raises :class:`RangeCorruption` when the result is not a valid sample,
    which can only happen if encoder and decoder states diverged.
    """
    x = predict(state) + error
    lo, hi = sample_range(width)
    if not lo <= x <= hi:
        raise RangeCorruption(f"reconstructed sample {x} outside [{lo}, {hi}]")
    return x, PredictorState(x, state.x1)


def classify_width(error: int) -> WidthClass:
    for cls in (WidthClass.W2, WidthClass.W3, WidthClass.W5, WidthClass.W7):
        if fits_bits(error, cls.value):
            return cls
    return WidthClass.FULL


def encode_frame(frame_type: FrameType, payload: Sequence[int], width: int = DEFAULT_WIDTH) -> int:
    """Pack ``payload`` behind the header of ``frame_type`` into a 16-bit word.

    For A-D the payload is the residuals in arrival order, first one in the
    most significant field. For E it is a single raw sample, sign-extended
    into the 12-bit field.
    """
    if len(payload) != frame_type.count:
        raise FrameLayoutError(
            f"frame {frame_type.name} takes {frame_type.count} fields, got {len(payload)}"
        )
    bits = frame_type.field_bits
    if frame_type is FrameType.E:
        lo, hi = sample_range(check_width(width))
        if not lo <= payload[0] <= hi:
            raise FrameLayoutError(f"raw sample {payload[0]} outside [{lo}, {hi}]")
    word = int(frame_type.header, 2)
    for value in payload:
        if not fits_bits(value, bits):
            raise FrameLayoutError(f"{value} does not fit a {bits}-bit field")
        word = (word << bits) | to_field(value, bits)
    return word


def frame_type_of(word: int) -> FrameType:
    if word & 0x8000:
        return FrameType.A
    if word & 0x4000:
        return FrameType.B
    nibble = word >> 12
    if nibble == 0:
        return FrameType.D
    if nibble == 1:
        return FrameType.C
    if nibble == 3:
        return FrameType.E
    raise InvalidHeader(f"unassigned header prefix 0010 in word 0x{word:04X}")


def decode_frame(word: int, width: int = DEFAULT_WIDTH) -> tuple[FrameType, list[int]]:
    """Split a 16-bit word into its frame type and sign-extended fields.

    For type E the single field is the raw sample, checked against ``width``.
    """
    if not 0 <= word <= 0xFFFF:
        raise ValueError(f"frame word out of range: {word}")
    frame_type = frame_type_of(word)
    bits = frame_type.field_bits
    mask = (1 << bits) - 1
    shifts = range(bits * (frame_type.count - 1), -1, -bits)
    fields = [from_field((word >> s) & mask, bits) for s in shifts]
    if frame_type is FrameType.E:
        lo, hi = sample_range(check_width(width))
        if not lo <= fields[0] <= hi:
            raise RangeCorruption(f"type E sample {fields[0]} outside [{lo}, {hi}]")
    return frame_type, fields


def select_frame(buffer: Sequence[PendingEntry]) -> FrameType:
    """Highest-priority frame type the head of ``buffer`` can fill."""
    for frame_type in PACKING_ORDER:
        n = frame_type.count
        if len(buffer) >= n and all(e.width.fits(frame_type.field_bits) for e in buffer[:n]):
            return frame_type
    return FrameType.E


def pack_step(
    buffer: Sequence[PendingEntry], flush: bool = False, width: int = DEFAULT_WIDTH
) -> tuple[int, int] | None:
    """Pack the oldest entries of ``buffer`` into one frame.

    Returns ``(word, consumed)``, or ``None`` when the buffer is not full
    and ``flush`` is false. The buffer itself is not modified.
    """
    if len(buffer) > BUFFER_CAPACITY:
        raise ValueError(f"pending buffer holds at most {BUFFER_CAPACITY} entries")
    if not buffer or (len(buffer) < BUFFER_CAPACITY and not flush):
        return None
    frame_type = select_frame(buffer)
    if frame_type is FrameType.E:
        return encode_frame(frame_type, [buffer[0].raw], width), 1
    n = frame_type.count
    return encode_frame(frame_type, [e.error for e in buffer[:n]], width), n
