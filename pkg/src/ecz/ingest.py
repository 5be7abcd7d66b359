"""Sample sources: WFDB format 212, CSV, raw 16-bit binary, synthetic ECG."""

from __future__ import annotations

import csv
import io
from typing import Sequence

import numpy as np

from .codec import DEFAULT_WIDTH, check_width, sample_range
from .errors import SampleRangeError

FORMATS = ("csv", "bin16", "wfdb212")


def check_range(samples: np.ndarray, width: int, where: str = "") -> np.ndarray:
    lo, hi = sample_range(width)
    bad = np.flatnonzero((samples < lo) | (samples > hi))
    if len(bad):
        i = int(bad[0])
        raise SampleRangeError(f"{where}sample {int(samples[i])} at index {i} outside [{lo}, {hi}]")
    return samples


def read_wfdb212(data: bytes) -> tuple[np.ndarray, np.ndarray]:
    """Decode a format-212 signal file into its two interleaved signals.

    Each 3-byte group holds two 12-bit two's-complement samples: the first
    in byte 0 plus the low nibble of byte 1, the second in byte 2 plus the
    high nibble of byte 1.
    """
    if len(data) % 3:
        raise ValueError(f"format 212 data length {len(data)} is not a multiple of 3")
    b = np.frombuffer(data, dtype=np.uint8).reshape(-1, 3).astype(np.int64)
    s1 = ((b[:, 1] & 0x0F) << 8) | b[:, 0]
    s2 = ((b[:, 1] >> 4) << 8) | b[:, 2]
    return (s1 ^ 0x800) - 0x800, (s2 ^ 0x800) - 0x800


def write_wfdb212(s1: Sequence[int], s2: Sequence[int]) -> bytes:
    a = np.asarray(s1, dtype=np.int64)
    c = np.asarray(s2, dtype=np.int64)
    if a.shape != c.shape:
        raise ValueError("format 212 needs two signals of equal length")
    check_range(a, 12)
    check_range(c, 12)
    a &= 0xFFF
    c &= 0xFFF
    out = np.empty((len(a), 3), dtype=np.uint8)
    out[:, 0] = a & 0xFF
    out[:, 1] = ((c >> 8) << 4) | (a >> 8)
    out[:, 2] = c & 0xFF
    return out.tobytes()


def read_csv(text: str, channels: int = 1, width: int = DEFAULT_WIDTH) -> list[np.ndarray]:
    """One row per sampling instant, one integer column per channel."""
    check_width(width)
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), 1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != channels:
            raise ValueError(f"line {lineno}: expected {channels} columns, got {len(row)}")
        try:
            rows.append([int(cell) for cell in row])
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer value in {row!r}") from None
    table = np.array(rows, dtype=np.int64).reshape(-1, channels)
    check_range(table.ravel(), width)
    return [table[:, c].copy() for c in range(channels)]


def write_csv(streams: Sequence[Sequence[int]]) -> str:
    lengths = {len(s) for s in streams}
    if len(lengths) > 1:
        raise ValueError("CSV output needs channels of equal length")
    table = np.column_stack([np.asarray(s, dtype=np.int64) for s in streams])
    return "".join(",".join(map(str, row)) + "\n" for row in table.tolist())


def read_bin16(data: bytes, width: int = DEFAULT_WIDTH, channels: int = 1) -> list[np.ndarray]:
    """Little-endian signed 16-bit samples, channels interleaved."""
    check_width(width)
    if len(data) % (2 * channels):
        raise ValueError(f"bin16 length {len(data)} is not a multiple of {2 * channels}")
    flat = np.frombuffer(data, dtype="<i2").astype(np.int64)
    check_range(flat, width)
    return [flat[c::channels].copy() for c in range(channels)]


def write_bin16(streams: Sequence[Sequence[int]]) -> bytes:
    lengths = {len(s) for s in streams}
    if len(lengths) > 1:
        raise ValueError("bin16 output needs channels of equal length")
    table = np.column_stack([np.asarray(s, dtype=np.int64) for s in streams])
    return table.astype("<i2").tobytes()


def synth_ecg(
    n: int,
    fs: float = 512.0,
    seed: int = 0,
    width: int = DEFAULT_WIDTH,
    amplitude: float = 200.0,
    noise: float = 1.5,
) -> np.ndarray:
    """Deterministic ECG-like test signal in ADC counts.

    Gaussian P, QRS and T waves per beat with jittered RR intervals,
    slow baseline wander and white noise. ``amplitude`` is counts per unit
    R-wave height (200 matches the 200 adu/mV scaling of MIT/BIH). Output is
    clamped into the ``width``-bit range.
    """
    check_width(width)
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    rng = np.random.default_rng(seed)
    t = np.arange(n) / fs
    duration = n / fs
    beats = [rng.uniform(0.0, 0.3)]
    while beats[-1] < duration + 1.0:
        beats.append(beats[-1] + rng.normal(0.8, 0.05))
    # (offset from R peak in s, width in s, height)
    waves = ((-0.2, 0.025, 0.12), (-0.03, 0.01, -0.1), (0.0, 0.012, 1.0), (0.03, 0.01, -0.25), (0.25, 0.045, 0.3))
    signal = np.zeros(n)
    for r in beats:
        lo = np.searchsorted(t, r - 0.4)
        hi = np.searchsorted(t, r + 0.5)
        seg = t[lo:hi] - r
        scale = rng.normal(1.0, 0.05)
        for offset, sigma, height in waves:
            signal[lo:hi] += scale * height * np.exp(-0.5 * ((seg - offset) / sigma) ** 2)
    phase = rng.uniform(0, 2 * np.pi)
    signal += 0.15 * np.sin(2 * np.pi * 0.25 * t + phase)
    counts = np.rint(amplitude * signal + rng.normal(0.0, noise, n))
    lo, hi = sample_range(width)
    return np.clip(counts, lo, hi).astype(np.int64)
