"""Pure-Python bulk kernels, used when the compiled extension is unavailable.

Same contract as ``_kernels.pyx``; keep the two in step.
"""

import numpy as np

from .errors import InvalidHeader, RangeCorruption, SampleRangeError

FULL = 8


def _classify(e):
    if -2 <= e <= 1:
        return 2
    if -4 <= e <= 3:
        return 3
    if -16 <= e <= 15:
        return 5
    if -64 <= e <= 63:
        return 7
    return FULL


def encode_channel(samples, width, resync_interval):
    """Encode one channel; returns ``(words, triggers)``.

    ``triggers[j]`` is the number of samples consumed when frame ``j`` was
    emitted; frames produced by the end-of-stream flush carry -1.
    """
    xs = samples.tolist()
    n = len(xs)
    lo = -(1 << (width - 1))
    hi = (1 << (width - 1)) - 1
    words = []
    triggers = []
    err = []
    cls = []
    raw = []
    forced = []
    x1 = x2 = 0

    def emit(nsamples):
        nonlocal x1, x2
        nbuf = len(cls)
        if nbuf >= 6 and max(cls[:6]) <= 2:
            w = 0
            for e in err[:6]:
                w = (w << 2) | (e & 0x3)
            used = 6
        elif nbuf >= 4 and max(cls[:4]) <= 3:
            w = 1
            for e in err[:4]:
                w = (w << 3) | (e & 0x7)
            used = 4
        elif nbuf >= 3 and max(cls[:3]) <= 5:
            w = 1
            for e in err[:3]:
                w = (w << 5) | (e & 0x1F)
            used = 3
        elif nbuf >= 2 and max(cls[:2]) <= 7:
            w = (1 << 14) | ((err[0] & 0x7F) << 7) | (err[1] & 0x7F)
            used = 2
        else:
            w = 0x3000 | (raw[0] & 0xFFF)
            used = 1
        words.append(w)
        triggers.append(nsamples)
        reanchor = used == 1 and cls[0] != FULL
        anchor = raw[0]
        del err[:used], cls[:used], raw[:used], forced[:used]
        if reanchor:
            # A narrow residual left as a raw frame: both sides re-anchor on
            # it, so everything still queued is re-predicted from there.
            x1 = x2 = anchor
            for k in range(len(cls)):
                x = raw[k]
                if forced[k]:
                    x1 = x2 = x
                    continue
                e = x - 2 * x1 + x2
                c = _classify(e)
                err[k] = e
                cls[k] = c
                if c == FULL:
                    x1 = x2 = x
                else:
                    x2 = x1
                    x1 = x

    for i in range(n):
        x = xs[i]
        if x < lo or x > hi:
            raise SampleRangeError(f"sample {x} at index {i} outside [{lo}, {hi}]")
        if resync_interval > 0 and i > 0 and i % resync_interval == 0:
            err.append(0)
            cls.append(FULL)
            forced.append(True)
            x1 = x2 = x
        else:
            e = x - 2 * x1 + x2
            c = _classify(e)
            err.append(e)
            cls.append(c)
            forced.append(False)
            if c == FULL:
                x1 = x2 = x
            else:
                x2 = x1
                x1 = x
        raw.append(x)
        if len(cls) == 6:
            emit(i + 1)
    while cls:
        emit(-1)
    return np.array(words, dtype=np.uint16), np.array(triggers, dtype=np.int64)


def decode_channel(words, width):
    """Decode frame words of one channel into samples (int64 array)."""
    ws = words.tolist()
    lo = -(1 << (width - 1))
    hi = (1 << (width - 1)) - 1
    out = []
    x1 = x2 = 0
    for j, w in enumerate(ws):
        if w & 0x8000:
            errs = (((w >> 10) & 0x1F) ^ 0x10) - 0x10, (((w >> 5) & 0x1F) ^ 0x10) - 0x10, ((w & 0x1F) ^ 0x10) - 0x10
        elif w & 0x4000:
            errs = (((w >> 7) & 0x7F) ^ 0x40) - 0x40, ((w & 0x7F) ^ 0x40) - 0x40
        else:
            top = w >> 12
            if top == 1:
                errs = tuple((((w >> s) & 0x7) ^ 0x4) - 0x4 for s in (9, 6, 3, 0))
            elif top == 0:
                errs = tuple((((w >> s) & 0x3) ^ 0x2) - 0x2 for s in (10, 8, 6, 4, 2, 0))
            elif top == 3:
                x = ((w & 0xFFF) ^ 0x800) - 0x800
                if x < lo or x > hi:
                    raise RangeCorruption(f"frame {j}: raw sample {x} outside [{lo}, {hi}]", j)
                out.append(x)
                x1 = x2 = x
                continue
            else:
                raise InvalidHeader(f"frame {j}: unassigned header prefix 0010 (0x{w:04X})", j)
        for e in errs:
            x = 2 * x1 - x2 + e
            if x < lo or x > hi:
                raise RangeCorruption(f"frame {j}: reconstructed sample {x} outside [{lo}, {hi}]", j)
            out.append(x)
            x2 = x1
            x1 = x
    return np.array(out, dtype=np.int64)
