import itertools
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ecz.codec import (
    FrameType,
    PendingEntry,
    PredictorState,
    WidthClass,
    classify_width,
    compute_error,
    decode_frame,
    encode_frame,
    frame_type_of,
    pack_step,
    predict,
    reconstruct,
    sample_range,
)
from ecz.errors import FrameLayoutError, InvalidHeader, RangeCorruption

from oracles import HEADERS, layout_word, parse_word

GOLDEN = Path(__file__).parent / "data" / "golden_frames.txt"


def golden_vectors():
    for line in GOLDEN.read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        name, *values, word = line.split()
        yield FrameType[name], [int(v) for v in values], int(word, 16)


def entry(error, raw=0):
    return PendingEntry(error, classify_width(error), raw)


@pytest.mark.parametrize(
    "x1,x2,expected", [(0, 0, 0), (100, 100, 100), (10, 5, 15)]
)
def test_predict(x1, x2, expected):
    assert predict(PredictorState(x1, x2)) == expected


def test_compute_error_examples():
    assert compute_error(PredictorState(), 0) == (0, PredictorState(0, 0))
    assert compute_error(PredictorState(940, 935), 943) == (-2, PredictorState(943, 940))


def test_compute_error_extreme_at_12_bits():
    e, _ = compute_error(PredictorState(-2048, 2047), 2047)
    assert e == 8190 == 2**13 - 2


def test_error_extreme_is_separable_maximum():
    # e = x - 2*x1 + x2 is separable, so scanning each variable on its own
    # gives the exhaustive extreme for the full 12-bit cube.
    lo, hi = sample_range(12)
    vals = np.arange(lo, hi + 1)
    assert vals.max() - 2 * vals.min() + vals.max() == 8190
    assert vals.min() - 2 * vals.max() + vals.min() == -8190


def test_reconstruct_examples():
    assert reconstruct(PredictorState(), 0)[0] == 0
    assert reconstruct(PredictorState(943, 940), 5) == (951, PredictorState(951, 943))


def test_reconstruct_rejects_out_of_range():
    with pytest.raises(RangeCorruption):
        reconstruct(PredictorState(2047, 0), 100, width=12)


@given(
    st.integers(-2048, 2047), st.integers(-2048, 2047), st.integers(-2048, 2047)
)
def test_reconstruct_inverts_compute_error(x1, x2, x):
    state = PredictorState(x1, x2)
    e, after = compute_error(state, x)
    assert abs(e) <= 2**13 - 2
    assert reconstruct(state, e) == (x, after)


@pytest.mark.parametrize(
    "error,cls",
    [
        (0, WidthClass.W2), (-2, WidthClass.W2), (1, WidthClass.W2),
        (2, WidthClass.W3), (-4, WidthClass.W3), (15, WidthClass.W5),
        (-64, WidthClass.W7), (63, WidthClass.W7),
        (64, WidthClass.FULL), (-8190, WidthClass.FULL),
    ],
)
def test_classify_width(error, cls):
    assert classify_width(error) is cls


@given(st.integers(-10000, 10000))
def test_classify_width_is_smallest_fitting_class(e):
    cls = classify_width(e)
    bits = (e if e >= 0 else ~e).bit_length() + 1  # minimal two's-complement width
    candidates = [c for c in (2, 3, 5, 7) if c >= bits]
    assert cls == (WidthClass(candidates[0]) if candidates else WidthClass.FULL)


@pytest.mark.parametrize("frame_type,payload,word", list(golden_vectors()))
def test_golden_encode(frame_type, payload, word):
    assert encode_frame(frame_type, payload) == word
    assert layout_word(frame_type.name, payload) == word


@pytest.mark.parametrize("frame_type,payload,word", list(golden_vectors()))
def test_golden_decode(frame_type, payload, word):
    assert decode_frame(word) == (frame_type, payload)


def test_headers_are_prefix_free():
    headers = [t.header for t in FrameType]
    assert sorted(headers) == sorted(HEADERS.values())
    for a, b in itertools.permutations(headers, 2):
        assert not b.startswith(a)
    for t in FrameType:
        assert t.header_bits + t.field_bits * t.count == 16


def test_all_words_decode_or_are_invalid():
    # Every 16-bit word either parses (and re-encodes to itself) or has the
    # unassigned 0010 prefix.
    for word in range(0x10000):
        name, values = parse_word(word)
        if name is None:
            assert word >> 12 == 0b0010
            with pytest.raises(InvalidHeader):
                decode_frame(word)
            continue
        frame_type, fields = decode_frame(word)
        assert (frame_type.name, fields) == (name, values)
        assert encode_frame(frame_type, fields) == word


def test_invalid_header_examples():
    for word in (0x2000, 0x2ABC, 0x2FFF):
        with pytest.raises(InvalidHeader):
            frame_type_of(word)


def test_encode_frame_rejects_bad_payloads():
    with pytest.raises(FrameLayoutError):
        encode_frame(FrameType.D, [0] * 5)
    with pytest.raises(FrameLayoutError):
        encode_frame(FrameType.D, [0, 0, 0, 0, 0, 2])
    with pytest.raises(FrameLayoutError):
        encode_frame(FrameType.A, [16, 0, 0])
    with pytest.raises(FrameLayoutError):
        encode_frame(FrameType.E, [200], width=8)


def test_e_frame_sign_extends_small_widths():
    assert encode_frame(FrameType.E, [-128], width=8) == 0x3F80
    assert decode_frame(0x3F80, width=8) == (FrameType.E, [-128])
    with pytest.raises(RangeCorruption):
        decode_frame(0x3080, width=8)  # +128 does not fit 8 bits


def test_pack_step_not_ready_until_full():
    buf = [entry(0)] * 5
    assert pack_step(buf, flush=False) is None
    assert pack_step([], flush=True) is None


def test_pack_step_type_d():
    buf = [entry(e) for e in (0, 1, -1, -2, 0, 1)]
    assert pack_step(buf) == (0x01E1, 6)


def test_pack_step_falls_back_to_c():
    buf = [entry(e) for e in (0, 1, -1, -2, 0, 40)]
    word, used = pack_step(buf)
    assert used == 4 and frame_type_of(word) is FrameType.C


def test_pack_step_single_full_entry_flushes_as_e():
    buf = [PendingEntry(5000, WidthClass.FULL, 1234)]
    assert pack_step(buf, flush=True) == (0x34D2, 1)


def test_pack_step_rejects_oversized_buffer():
    with pytest.raises(ValueError):
        pack_step([entry(0)] * 7)


RULES = [("D", 6, 2), ("C", 4, 3), ("A", 3, 5), ("B", 2, 7)]


def brute_force_rule(errors, forced):
    for name, n, bits in RULES:
        if len(errors) < n:
            continue
        head = list(zip(errors, forced))[:n]
        if all(not f and -(2 ** (bits - 1)) <= e < 2 ** (bits - 1) for e, f in head):
            return name, n
    return "E", 1


REPRESENTATIVES = [0, 3, -9, 40, 100]  # one residual per width class


@pytest.mark.parametrize("length", range(1, 7))
def test_pack_step_matches_brute_force_enumeration(length):
    for combo in itertools.product(REPRESENTATIVES + ["forced"], repeat=length):
        buf = [
            PendingEntry(0, WidthClass.FULL, 7, forced=True) if c == "forced" else entry(c, raw=7)
            for c in combo
        ]
        errors = [0 if c == "forced" else c for c in combo]
        forced = [c == "forced" or abs(c) >= 64 for c in combo]
        name, n = brute_force_rule(errors, forced)
        word, used = pack_step(buf, flush=True)
        assert (frame_type_of(word).name, used) == (name, n), combo
        if name == "E":
            assert word == layout_word("E", [7])
        else:
            assert word == layout_word(name, errors[:n])
