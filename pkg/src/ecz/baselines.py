"""Huffman size models used as reference points for the frame packer.

Both models work on the histogram of slope-predictor residuals and leave
out the cost of transmitting the codebook.
"""

from __future__ import annotations

import heapq
from collections import Counter
from typing import Hashable, Mapping, Sequence

import numpy as np

DEFAULT_SELECTIVE_M = 16

ESCAPE = "ESC"


def prediction_errors(samples: Sequence[int] | np.ndarray) -> np.ndarray:
    """Slope-predictor residuals of a stream starting from a zeroed predictor."""
    x = np.asarray(samples, dtype=np.int64)
    return np.diff(np.concatenate([np.zeros(2, dtype=np.int64), x]), 2)


def error_histogram(samples: Sequence[int] | np.ndarray) -> Counter:
    values, counts = np.unique(prediction_errors(samples), return_counts=True)
    return Counter(dict(zip(values.tolist(), counts.tolist())))


def huffman_code_lengths(weights: Mapping[Hashable, int], order: Sequence[Hashable] | None = None) -> dict:
    """Codeword length per symbol of a Huffman code for ``weights``.

    Ties between equal weights go to the leaf that comes first in ``order``
    (default: sorted symbols), then to the earlier-created subtree. A lone
    symbol gets a 1-bit code.
    """
    if not weights:
        raise ValueError("cannot build a Huffman code over an empty alphabet")
    symbols = list(order) if order is not None else sorted(weights)
    if len(symbols) == 1:
        return {symbols[0]: 1}
    lengths = dict.fromkeys(symbols, 0)
    heap = [(weights[s], seq, [s]) for seq, s in enumerate(symbols)]
    heapq.heapify(heap)
    seq = len(heap)
    while len(heap) > 1:
        w1, _, left = heapq.heappop(heap)
        w2, _, right = heapq.heappop(heap)
        for s in left:
            lengths[s] += 1
        for s in right:
            lengths[s] += 1
        heapq.heappush(heap, (w1 + w2, seq, left + right))
        seq += 1
    return lengths


def ideal_huffman_bits(hist: Mapping[int, int]) -> int:
    hist = {s: c for s, c in hist.items() if c > 0}
    if not hist:
        raise ValueError("empty histogram")
    lengths = huffman_code_lengths(hist)
    return sum(hist[s] * lengths[s] for s in hist)


def selective_symbols(hist: Mapping[int, int], m: int) -> list[int]:
    """The ``m`` most frequent symbols; ties go to smaller magnitude, then negative."""
    ranked = sorted((s for s, c in hist.items() if c > 0), key=lambda s: (-hist[s], abs(s), s))
    return ranked[:m]


def selective_huffman_bits(hist: Mapping[int, int], m: int = DEFAULT_SELECTIVE_M, width: int = 12) -> int:
    """Bits for Huffman-coding the top ``m`` residuals and escaping the rest.

    An escaped residual costs the escape codeword plus ``width + 2`` bits,
    enough for any residual of a ``width``-bit signal.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    hist = {s: c for s, c in hist.items() if c > 0}
    if not hist:
        raise ValueError("empty histogram")
    coded = selective_symbols(hist, m)
    uncoded = sum(hist.values()) - sum(hist[s] for s in coded)
    weights = {s: hist[s] for s in coded}
    weights[ESCAPE] = uncoded
    lengths = huffman_code_lengths(weights, sorted(coded) + [ESCAPE])
    bits = sum(hist[s] * lengths[s] for s in coded)
    return bits + uncoded * (lengths[ESCAPE] + width + 2)


def compression_ratio(original_samples: int, width: int, compressed_bits: int) -> float:
    if compressed_bits <= 0:
        raise ZeroDivisionError("compressed size must be positive")
    return original_samples * width / compressed_bits
