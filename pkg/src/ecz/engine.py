"""Multi-channel streaming layer and the ``ECZ1`` container format.

Each channel owns its predictor and its six-entry packing buffer, so
frames never mix channels. Two encoder flavours exist:

* :class:`ChannelEncoder` / :class:`ChannelDecoder` work one sample or one
  word at a time on top of :mod:`ecz.codec`;
* :func:`encode_channels` / :func:`decode_container` run whole arrays
  through :mod:`ecz.kernels`.

Both produce identical words.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .codec import (
    DEFAULT_WIDTH,
    FrameType,
    PendingEntry,
    PredictorState,
    WidthClass,
    check_width,
    classify_width,
    compute_error,
    decode_frame,
    pack_step,
    reconstruct,
    sample_range,
)
from .errors import (
    BadMagic,
    CorruptionError,
    InvalidHeader,
    SampleRangeError,
    TruncatedContainer,
    UnsupportedVersion,
)

DEFAULT_RESYNC_INTERVAL = 2048  # 4 s at 512 S/s
MAX_CHANNELS = 4

MAGIC = b"ECZ1"
VERSION = 1
_HEADER = struct.Struct("<4sBBBBI")
RECORD_DTYPE = np.dtype([("channel", "u1"), ("word", "<u2")])


class ChannelEncoder:
    """Streaming encoder for one channel."""

    def __init__(self, width: int = DEFAULT_WIDTH, resync_interval: int = DEFAULT_RESYNC_INTERVAL):
        if resync_interval < 0:
            raise ValueError("resync_interval must be >= 0 (0 disables)")
        self.width = check_width(width)
        self.resync_interval = resync_interval
        self.state = PredictorState()
        self.buffer: list[PendingEntry] = []
        self.sample_index = 0

    def _enqueue(self, x: int, forced: bool) -> None:
        if forced:
            self.buffer.append(PendingEntry(0, WidthClass.FULL, x, forced=True))
            self.state = PredictorState.anchored(x)
            return
        error, state = compute_error(self.state, x)
        width = classify_width(error)
        self.buffer.append(PendingEntry(error, width, x))
        # A full-width entry always leaves as a raw frame, which re-anchors.
        self.state = PredictorState.anchored(x) if width is WidthClass.FULL else state

    def _step(self, flush: bool) -> int | None:
        packed = pack_step(self.buffer, flush, self.width)
        if packed is None:
            return None
        word, consumed = packed
        head = self.buffer[0]
        del self.buffer[:consumed]
        if consumed == 1 and head.width is not WidthClass.FULL:
            # Narrow residual emitted raw: re-predict the rest of the queue
            # from the new anchor, exactly as the decoder will.
            pending, self.buffer = self.buffer, []
            self.state = PredictorState.anchored(head.raw)
            for entry in pending:
                self._enqueue(entry.raw, entry.forced)
        return word

    def push(self, x: int) -> list[int]:
        lo, hi = sample_range(self.width)
        if not lo <= x <= hi:
            raise SampleRangeError(f"sample {x} outside [{lo}, {hi}]")
        r = self.resync_interval
        self._enqueue(x, forced=r > 0 and self.sample_index > 0 and self.sample_index % r == 0)
        self.sample_index += 1
        frames = []
        while (word := self._step(flush=False)) is not None:
            frames.append(word)
        return frames

    def flush(self) -> list[int]:
        frames = []
        while self.buffer:
            frames.append(self._step(flush=True))
        return frames


class ChannelDecoder:
    """Streaming decoder for one channel; mirrors :class:`ChannelEncoder`."""

    def __init__(self, width: int = DEFAULT_WIDTH):
        self.width = check_width(width)
        self.state = PredictorState()
        self.frames_seen = 0

    def push(self, word: int) -> list[int]:
        index = self.frames_seen
        try:
            frame_type, fields = decode_frame(word, self.width)
            if frame_type is FrameType.E:
                self.state = PredictorState.anchored(fields[0])
                out = fields
            else:
                out = []
                for error in fields:
                    x, self.state = reconstruct(self.state, error, self.width)
                    out.append(x)
        except CorruptionError as exc:
            raise type(exc)(f"frame {index}: {exc}", index) from None
        self.frames_seen += 1
        return out


class MultiChannelEncoder:
    """Streaming encoder for multiplexed ``(channel, sample)`` input."""

    def __init__(
        self,
        channels: int,
        width: int = DEFAULT_WIDTH,
        resync_interval: int = DEFAULT_RESYNC_INTERVAL,
    ):
        if not 1 <= channels <= MAX_CHANNELS:
            raise ValueError(f"channel count must be in 1..{MAX_CHANNELS}")
        self.encoders = [ChannelEncoder(width, resync_interval) for _ in range(channels)]

    def push(self, channel: int, sample: int) -> list[tuple[int, int]]:
        if not 0 <= channel < len(self.encoders):
            raise ValueError(f"channel {channel} not in 0..{len(self.encoders) - 1}")
        return [(channel, w) for w in self.encoders[channel].push(sample)]

    def flush(self) -> list[tuple[int, int]]:
        return [(c, w) for c, enc in enumerate(self.encoders) for w in enc.flush()]


def demux(words: Iterable[tuple[int, int]], channels: int) -> list[list[int]]:
    """Route ``(channel, sample)`` pairs to per-channel lists, keeping order."""
    if not 1 <= channels <= MAX_CHANNELS:
        raise ValueError(f"channel count must be in 1..{MAX_CHANNELS}")
    streams: list[list[int]] = [[] for _ in range(channels)]
    for i, (channel, sample) in enumerate(words):
        if not 0 <= channel < channels:
            raise ValueError(f"word {i}: channel {channel} not in 0..{channels - 1}")
        streams[channel].append(sample)
    return streams


def pack_adc_word(channel: int, sample: int, width: int = DEFAULT_WIDTH) -> int:
    """ADC output word: 2-bit channel select above a ``width``-bit sample."""
    if not 0 <= channel < MAX_CHANNELS:
        raise ValueError(f"channel {channel} not in 0..{MAX_CHANNELS - 1}")
    return (channel << width) | (sample & ((1 << width) - 1))


def unpack_adc_word(word: int, width: int = DEFAULT_WIDTH) -> tuple[int, int]:
    sign = 1 << (width - 1)
    sample = ((word & ((1 << width) - 1)) ^ sign) - sign
    return (word >> width) & 0x3, sample


def interleave(streams: Sequence[Sequence[int]]) -> list[tuple[int, int]]:
    """Round-robin ``(channel, sample)`` order, as a multiplexed ADC produces it."""
    out = []
    longest = max((len(s) for s in streams), default=0)
    for i in range(longest):
        for c, s in enumerate(streams):
            if i < len(s):
                out.append((c, s[i]))
    return out


@dataclass(eq=False)
class Container:
    """Decoded form of an ``ECZ1`` file."""

    width: int
    resync_interval: int
    sample_counts: list[int]
    records: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=RECORD_DTYPE))

    @property
    def channel_count(self) -> int:
        return len(self.sample_counts)

    def channel_words(self, channel: int) -> np.ndarray:
        return self.records["word"][self.records["channel"] == channel]

    @property
    def frame_count(self) -> int:
        return len(self.records)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Container):
            return NotImplemented
        return (
            self.width == other.width
            and self.resync_interval == other.resync_interval
            and list(self.sample_counts) == list(other.sample_counts)
            and np.array_equal(self.records, other.records)
        )


def encode_channels(
    streams: Sequence[Sequence[int]],
    width: int = DEFAULT_WIDTH,
    resync_interval: int = DEFAULT_RESYNC_INTERVAL,
) -> Container:
    """Encode per-channel sample streams into a :class:`Container`.

    Records are ordered as a streaming encoder fed the round-robin
    interleaving of ``streams`` would emit them; end-of-stream flush frames
    come last, channel by channel.
    """
    check_width(width)
    if not 1 <= len(streams) <= MAX_CHANNELS:
        raise ValueError(f"channel count must be in 1..{MAX_CHANNELS}")
    if resync_interval < 0:
        raise ValueError("resync_interval must be >= 0 (0 disables)")
    nch = len(streams)
    words, keys, chans, counts = [], [], [], []
    for c, stream in enumerate(streams):
        xs = np.ascontiguousarray(stream, dtype=np.int64)
        w, trig = kernels.encode_channel(xs, width, resync_interval)
        n = len(xs)
        flushed = trig < 0
        # Emission time of a frame triggered by sample i of channel c in the
        # interleaved stream is i*nch + c; flush frames follow everything.
        key = np.where(flushed, np.iinfo(np.int64).max, (trig - 1) * nch + c)
        words.append(w)
        keys.append(key)
        chans.append(np.full(len(w), c, dtype=np.uint8))
        counts.append(n)
    words_all = np.concatenate(words) if words else np.empty(0, np.uint16)
    keys_all = np.concatenate(keys)
    chans_all = np.concatenate(chans)
    order = np.lexsort((np.arange(len(keys_all)), chans_all, keys_all))
    records = np.empty(len(order), dtype=RECORD_DTYPE)
    records["channel"] = chans_all[order]
    records["word"] = words_all[order]
    return Container(width, resync_interval, counts, records)


def decode_container(container: Container) -> list[np.ndarray]:
    """Decode every channel, enforcing the sample counts from the header."""
    out = []
    channels = container.records["channel"]
    if len(channels) and int(channels.max()) >= container.channel_count:
        bad = int(np.argmax(channels >= container.channel_count))
        raise CorruptionError(f"frame record {bad}: channel {channels[bad]} not declared", bad)
    for c, expected in enumerate(container.sample_counts):
        positions = np.flatnonzero(channels == c)
        try:
            samples = kernels.decode_channel(container.records["word"][positions], container.width)
        except CorruptionError as exc:
            index = int(positions[exc.index]) if exc.index is not None else None
            raise type(exc)(f"channel {c}, frame record {index}: {exc}", index) from None
        if len(samples) < expected:
            raise TruncatedContainer(
                f"channel {c}: decoded {len(samples)} samples, header declares {expected}"
            )
        if len(samples) > expected:
            raise CorruptionError(
                f"channel {c}: decoded {len(samples)} samples, header declares {expected}"
            )
        out.append(samples)
    return out


def serialize_container(container: Container) -> bytes:
    check_width(container.width)
    nch = container.channel_count
    if not 1 <= nch <= MAX_CHANNELS:
        raise ValueError(f"channel count must be in 1..{MAX_CHANNELS}")
    header = _HEADER.pack(MAGIC, VERSION, container.width, nch, 0, container.resync_interval)
    counts = struct.pack(f"<{nch}Q", *container.sample_counts)
    records = np.ascontiguousarray(container.records, dtype=RECORD_DTYPE)
    return header + counts + records.tobytes()


def deserialize_container(data: bytes) -> Container:
    if len(data) < _HEADER.size:
        raise TruncatedContainer(f"container header needs {_HEADER.size} bytes, got {len(data)}")
    magic, version, width, nch, _reserved, interval = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise UnsupportedVersion(f"unsupported container version {version}")
    check_width(width)
    if not 1 <= nch <= MAX_CHANNELS:
        raise CorruptionError(f"invalid channel count {nch}")
    offset = _HEADER.size + 8 * nch
    if len(data) < offset:
        raise TruncatedContainer("container ends inside the sample-count table")
    counts = list(struct.unpack_from(f"<{nch}Q", data, _HEADER.size))
    body = len(data) - offset
    if body % RECORD_DTYPE.itemsize:
        raise TruncatedContainer(f"trailing partial frame record ({body % RECORD_DTYPE.itemsize} bytes)")
    records = np.frombuffer(data, dtype=RECORD_DTYPE, offset=offset).copy()
    return Container(width, interval, counts, records)


def raw_words_to_bytes(words: np.ndarray) -> bytes:
    """Single-channel raw mode: bare little-endian u16 words, no header."""
    return np.ascontiguousarray(words, dtype="<u2").tobytes()


def raw_words_from_bytes(data: bytes) -> np.ndarray:
    if len(data) % 2:
        raise TruncatedContainer("raw frame stream has an odd byte count")
    return np.frombuffer(data, dtype="<u2").astype(np.uint16)


def resync_scan(words: Sequence[int] | np.ndarray, width: int = DEFAULT_WIDTH) -> np.ndarray:
    """Decode a stream whose beginning may be missing.

    Everything before the first type E frame is dropped; decoding starts
    from that frame's raw sample. Returns an empty array if there is none.
    """
    words = np.asarray(words, dtype=np.uint16)
    starts = np.flatnonzero((words >> 12) == 3)
    if len(starts) == 0:
        return np.empty(0, dtype=np.int64)
    return kernels.decode_channel(words[starts[0]:], width)


def frame_histogram(words: Sequence[int] | np.ndarray) -> dict[str, int]:
    """Count frames per type; the result always has keys A to E."""
    words = np.asarray(words, dtype=np.uint16)
    counts = {t.name: 0 for t in FrameType}
    top = words >> 12
    counts["A"] = int(np.count_nonzero(words & 0x8000))
    counts["B"] = int(np.count_nonzero((top >> 2) == 1))
    counts["C"] = int(np.count_nonzero(top == 1))
    counts["D"] = int(np.count_nonzero(top == 0))
    counts["E"] = int(np.count_nonzero(top == 3))
    if np.any(top == 2):
        first = int(np.argmax(top == 2))
        raise InvalidHeader(f"frame {first}: unassigned header prefix 0010", first)
    return counts
