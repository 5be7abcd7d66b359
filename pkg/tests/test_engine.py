import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ecz.codec import FrameType, PredictorState, decode_frame, frame_type_of
from ecz.engine import (
    RECORD_DTYPE,
    ChannelDecoder,
    ChannelEncoder,
    Container,
    MultiChannelEncoder,
    decode_container,
    demux,
    deserialize_container,
    encode_channels,
    frame_histogram,
    interleave,
    pack_adc_word,
    raw_words_from_bytes,
    raw_words_to_bytes,
    resync_scan,
    serialize_container,
    unpack_adc_word,
)
from ecz.errors import (
    BadMagic,
    CorruptionError,
    InvalidHeader,
    TruncatedContainer,
    UnsupportedVersion,
)
from ecz.ingest import synth_ecg

from oracles import frame_sizes, layout_word


def push_all(enc, samples):
    out = []
    for x in samples:
        out += enc.push(int(x))
    return out


# -- demux -------------------------------------------------------------------


def test_demux_routes_by_tag():
    assert demux([(0, 5), (1, 7), (0, 6)], 2) == [[5, 6], [7]]


def test_demux_single_channel_identity():
    assert demux([(0, v) for v in range(5)], 1) == [list(range(5))]


def test_demux_rejects_unconfigured_channel():
    with pytest.raises(ValueError):
        demux([(3, 1)], 2)


@given(st.integers(0, 3), st.integers(-2048, 2047))
def test_adc_word_round_trip(channel, sample):
    word = pack_adc_word(channel, sample, 12)
    assert word < 1 << 14
    assert unpack_adc_word(word, 12) == (channel, sample)


# -- encoder_push / flush ----------------------------------------------------


def test_encoder_waits_for_full_buffer():
    enc = ChannelEncoder()
    assert push_all(enc, [0] * 5) == []
    assert enc.push(0) == [0x0000]


def test_resync_trace_by_hand():
    enc = ChannelEncoder(width=12, resync_interval=4)
    samples = [0, 0, 0, 0, 500, 500]
    words = push_all(enc, samples) + enc.flush()
    # entries: W2 W2 W2 W2 FORCED(500) W2 -> C(0,0,0,0), E(500), E(500 via flush)
    assert words == [
        layout_word("C", [0, 0, 0, 0]),
        layout_word("E", [500]),
        layout_word("E", [500]),
    ]
    assert enc.state == PredictorState(500, 500)


def test_flush_examples():
    enc = ChannelEncoder()
    assert enc.flush() == []
    push_all(enc, [0, 1])
    assert [frame_type_of(w) for w in enc.flush()] == [FrameType.B]
    enc = ChannelEncoder()
    push_all(enc, [1500])
    assert enc.flush() == [layout_word("E", [1500])]


# -- decoder_push ------------------------------------------------------------


def test_decoder_examples():
    dec = ChannelDecoder()
    assert dec.push(0x0000) == [0] * 6
    dec = ChannelDecoder()
    assert dec.push(0x34D2) == [1234]
    assert dec.state == PredictorState(1234, 1234)
    with pytest.raises(InvalidHeader):
        ChannelDecoder().push(0x2ABC)


def test_lockstep_after_every_frame():
    x = synth_ecg(3000, seed=3)
    x[1000] = 2000  # magnitude escape
    x[1001] = -2000
    enc = ChannelEncoder(resync_interval=500)
    dec = ChannelDecoder()
    decoded = []
    for sample in x:
        for w in enc.push(int(sample)):
            frame = dec.push(w)
            decoded += frame
            # Residual frames carry >= 2 samples; raw frames re-anchor.
            if frame_type_of(w) is FrameType.E:
                assert dec.state == PredictorState(frame[0], frame[0])
            else:
                assert dec.state == PredictorState(decoded[-1], decoded[-2])
    for w in enc.flush():
        decoded += dec.push(w)
    assert decoded == x.tolist()
    assert dec.state == enc.state


# -- multi-channel -----------------------------------------------------------


@st.composite
def multichannel(draw):
    nch = draw(st.integers(1, 4))
    width = draw(st.sampled_from([8, 11, 12]))
    half = 1 << (width - 1)
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    streams = []
    for _ in range(nch):
        n = draw(st.integers(0, 300))
        step = draw(st.sampled_from([1, 4, 40, 200]))
        streams.append(np.clip(np.cumsum(rng.integers(-step, step + 1, n)), -half, half - 1))
    return width, draw(st.sampled_from([0, 7, 2048])), streams


@given(multichannel())
def test_bulk_matches_streaming_emission_order(case):
    width, interval, streams = case
    container = encode_channels(streams, width, interval)
    mc = MultiChannelEncoder(len(streams), width, interval)
    records = []
    for channel, sample in interleave(streams):
        records += mc.push(channel, int(sample))
    records += mc.flush()
    assert [(int(c), int(w)) for c, w in container.records] == records


@given(multichannel())
def test_multichannel_round_trip(case):
    width, interval, streams = case
    container = encode_channels(streams, width, interval)
    restored = deserialize_container(serialize_container(container))
    assert restored == container
    for got, want in zip(decode_container(restored), streams):
        assert got.tolist() == list(want)


@given(multichannel(), st.randoms(use_true_random=False))
def test_channel_independence(case, rnd):
    width, interval, streams = case
    expected = [encode_channels([s], width, interval).channel_words(0) for s in streams]
    # Any interleaving of per-channel records decodes the same.
    container = encode_channels(streams, width, interval)
    perm = list(range(container.frame_count))
    rnd.shuffle(perm)
    by_channel = {c: [] for c in range(len(streams))}
    for i in perm:
        by_channel[int(container.records["channel"][i])].append(i)
    for c, idx in by_channel.items():
        np.testing.assert_array_equal(container.records["word"][sorted(idx)], expected[c])


def test_e_frame_cadence():
    x = synth_ecg(10000, seed=5)
    for interval in (7, 100, 2048):
        words = encode_channels([x], 12, interval).channel_words(0)
        n_e = sum(frame_type_of(int(w)) is FrameType.E for w in words)
        assert n_e >= (len(x) - 1) // interval


# -- resync_scan ---------------------------------------------------------------


def sample_starts(words):
    sizes = frame_sizes(words)
    return np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(int)


def test_resync_scan_after_dropped_frames():
    x = synth_ecg(10000, seed=11)
    words = encode_channels([x], 12, 2048).channel_words(0)
    starts = sample_starts(words)
    cut = 3
    e_after = next(i for i in range(cut, len(words)) if frame_type_of(int(words[i])) is FrameType.E)
    assert resync_scan(words[cut:]).tolist() == x[starts[e_after]:].tolist()


def test_resync_scan_edge_cases():
    x = synth_ecg(3000, seed=12)
    words = encode_channels([x], 12, 2048).channel_words(0)
    # Without loss and without an early E frame the scan starts at the first E.
    first_e = next(i for i, w in enumerate(words) if frame_type_of(int(w)) is FrameType.E)
    assert resync_scan(words).tolist() == x[sample_starts(words)[first_e]:].tolist()
    assert resync_scan([]).tolist() == []
    assert resync_scan([0x0000, 0x8000]).tolist() == []


def test_resync_scan_full_stream_from_leading_e():
    x = np.array([1500] + [1500] * 20)
    words = encode_channels([x], 12, 2048).channel_words(0)
    assert frame_type_of(int(words[0])) is FrameType.E
    assert resync_scan(words).tolist() == x.tolist()


# -- container -----------------------------------------------------------------


def test_empty_container_is_header_only():
    data = serialize_container(encode_channels([[]]))
    assert len(data) == 20
    assert data[:4] == b"ECZ1"
    magic, version, width, nch, reserved, interval = struct.unpack_from("<4sBBBBI", data)
    assert (version, width, nch, reserved, interval) == (1, 12, 1, 0, 2048)


def test_container_layout_is_little_endian():
    c = Container(12, 7, [6, 0], np.array([(0, 0x01E1)], dtype=RECORD_DTYPE))
    data = serialize_container(c)
    assert data[12:20] == (6).to_bytes(8, "little")
    assert data[28:] == bytes([0, 0xE1, 0x01])


def test_container_errors():
    good = serialize_container(encode_channels([[1, 2, 3]]))
    with pytest.raises(BadMagic):
        deserialize_container(b"XYZ1" + good[4:])
    with pytest.raises(UnsupportedVersion):
        deserialize_container(good[:4] + b"\x02" + good[5:])
    with pytest.raises(TruncatedContainer):
        deserialize_container(good[:10])
    with pytest.raises(TruncatedContainer):
        deserialize_container(good[:-1])
    with pytest.raises(TruncatedContainer):
        decode_container(deserialize_container(good[:-3]))


def test_decode_container_names_invalid_frame():
    c = encode_channels([synth_ecg(60, seed=1), synth_ecg(60, seed=2)])
    c.records["word"][5] = 0x2ABC
    with pytest.raises(InvalidHeader) as info:
        decode_container(c)
    assert info.value.index == 5
    assert "frame record 5" in str(info.value)


def test_decode_container_rejects_excess_samples():
    c = encode_channels([[0] * 6])
    c.sample_counts = [5]
    with pytest.raises(CorruptionError):
        decode_container(c)


def test_raw_mode_round_trip():
    words = encode_channels([synth_ecg(500)]).channel_words(0)
    data = raw_words_to_bytes(words)
    assert len(data) == 2 * len(words)
    np.testing.assert_array_equal(raw_words_from_bytes(data), words)
    with pytest.raises(TruncatedContainer):
        raw_words_from_bytes(data[:-1])


def test_frame_histogram():
    words = [0x01E1, 0x9683, 0x5FCE, 0x1701, 0x34D2, 0x0000]
    assert frame_histogram(words) == {"A": 1, "B": 1, "C": 1, "D": 2, "E": 1}
    with pytest.raises(InvalidHeader):
        frame_histogram([0x2000])
