# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled bulk kernels; ``_pykernels.py`` is the reference fallback."""

import numpy as np
cimport numpy as cnp

from .errors import InvalidHeader, RangeCorruption, SampleRangeError

cnp.import_array()

cdef enum:
    FULL = 8
    CAP = 6


cdef inline int classify(long long e) noexcept nogil:
    if -2 <= e <= 1:
        return 2
    if -4 <= e <= 3:
        return 3
    if -16 <= e <= 15:
        return 5
    if -64 <= e <= 63:
        return 7
    return FULL


cdef struct Packer:
    long long err[CAP]
    long long raw[CAP]
    int cls[CAP]
    int forced[CAP]
    int n
    long long x1
    long long x2


cdef inline int max_cls(Packer* p, int k) noexcept nogil:
    cdef int i, m = 0
    for i in range(k):
        if p.cls[i] > m:
            m = p.cls[i]
    return m


cdef inline unsigned short emit(Packer* p) noexcept nogil:
    cdef unsigned int w
    cdef int used, i, k, c
    cdef long long x, e
    cdef bint reanchor
    cdef long long anchor = p.raw[0]
    if p.n >= 6 and max_cls(p, 6) <= 2:
        w = 0
        for i in range(6):
            w = (w << 2) | <unsigned int>(p.err[i] & 0x3)
        used = 6
    elif p.n >= 4 and max_cls(p, 4) <= 3:
        w = 1
        for i in range(4):
            w = (w << 3) | <unsigned int>(p.err[i] & 0x7)
        used = 4
    elif p.n >= 3 and max_cls(p, 3) <= 5:
        w = 1
        for i in range(3):
            w = (w << 5) | <unsigned int>(p.err[i] & 0x1F)
        used = 3
    elif p.n >= 2 and max_cls(p, 2) <= 7:
        w = (1 << 14) | (<unsigned int>(p.err[0] & 0x7F) << 7) | <unsigned int>(p.err[1] & 0x7F)
        used = 2
    else:
        w = 0x3000 | <unsigned int>(p.raw[0] & 0xFFF)
        used = 1
    reanchor = used == 1 and p.cls[0] != FULL
    for i in range(p.n - used):
        p.err[i] = p.err[i + used]
        p.raw[i] = p.raw[i + used]
        p.cls[i] = p.cls[i + used]
        p.forced[i] = p.forced[i + used]
    p.n -= used
    if reanchor:
        p.x1 = anchor
        p.x2 = anchor
        for k in range(p.n):
            x = p.raw[k]
            if p.forced[k]:
                p.x1 = x
                p.x2 = x
                continue
            e = x - 2 * p.x1 + p.x2
            c = classify(e)
            p.err[k] = e
            p.cls[k] = c
            if c == FULL:
                p.x1 = x
                p.x2 = x
            else:
                p.x2 = p.x1
                p.x1 = x
    return <unsigned short>w


def encode_channel(samples, int width, long long resync_interval):
    cdef const long long[::1] xs = np.ascontiguousarray(samples, dtype=np.int64)
    cdef Py_ssize_t n = xs.shape[0]
    cdef long long lo = -(1 << (width - 1))
    cdef long long hi = (1 << (width - 1)) - 1
    words_arr = np.empty(n, dtype=np.uint16)
    trig_arr = np.empty(n, dtype=np.int64)
    cdef unsigned short[::1] words = words_arr
    cdef long long[::1] trig = trig_arr
    cdef Py_ssize_t i, nout = 0, bad = -1
    cdef long long x, e
    cdef int c
    cdef Packer p
    p.n = 0
    p.x1 = 0
    p.x2 = 0
    with nogil:
        for i in range(n):
            x = xs[i]
            if x < lo or x > hi:
                bad = i
                break
            if resync_interval > 0 and i > 0 and i % resync_interval == 0:
                p.err[p.n] = 0
                p.cls[p.n] = FULL
                p.forced[p.n] = 1
                p.x1 = x
                p.x2 = x
            else:
                e = x - 2 * p.x1 + p.x2
                c = classify(e)
                p.err[p.n] = e
                p.cls[p.n] = c
                p.forced[p.n] = 0
                if c == FULL:
                    p.x1 = x
                    p.x2 = x
                else:
                    p.x2 = p.x1
                    p.x1 = x
            p.raw[p.n] = x
            p.n += 1
            if p.n == CAP:
                words[nout] = emit(&p)
                trig[nout] = i + 1
                nout += 1
        if bad < 0:
            while p.n > 0:
                words[nout] = emit(&p)
                trig[nout] = -1
                nout += 1
    if bad >= 0:
        raise SampleRangeError(f"sample {xs[bad]} at index {bad} outside [{lo}, {hi}]")
    return words_arr[:nout].copy(), trig_arr[:nout].copy()


cdef inline long long sext(unsigned int field, int bits) noexcept nogil:
    cdef long long sign = 1 << (bits - 1)
    return (<long long>field ^ sign) - sign


def decode_channel(words_in, int width):
    cdef const unsigned short[::1] words = np.ascontiguousarray(words_in, dtype=np.uint16)
    cdef Py_ssize_t m = words.shape[0]
    out_arr = np.empty(6 * m, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef long long lo = -(1 << (width - 1))
    cdef long long hi = (1 << (width - 1)) - 1
    cdef long long x1 = 0, x2 = 0, x
    cdef long long errs[6]
    cdef int cnt, bits, shift, k, top
    cdef unsigned int w
    cdef Py_ssize_t j, n = 0, bad = -1
    cdef int kind = 0  # 1: invalid header, 2: range
    with nogil:
        for j in range(m):
            w = words[j]
            if w & 0x8000:
                cnt = 3
                bits = 5
            elif w & 0x4000:
                cnt = 2
                bits = 7
            else:
                top = w >> 12
                if top == 1:
                    cnt = 4
                    bits = 3
                elif top == 0:
                    cnt = 6
                    bits = 2
                elif top == 3:
                    x = sext(w & 0xFFF, 12)
                    if x < lo or x > hi:
                        bad = j
                        kind = 2
                        break
                    out[n] = x
                    n += 1
                    x1 = x
                    x2 = x
                    continue
                else:
                    bad = j
                    kind = 1
                    break
            shift = bits * (cnt - 1)
            for k in range(cnt):
                errs[k] = sext((w >> shift) & ((1 << bits) - 1), bits)
                shift -= bits
            for k in range(cnt):
                x = 2 * x1 - x2 + errs[k]
                if x < lo or x > hi:
                    bad = j
                    kind = 2
                    break
                out[n] = x
                n += 1
                x2 = x1
                x1 = x
            if bad >= 0:
                break
    if kind == 1:
        raise InvalidHeader(f"frame {bad}: unassigned header prefix 0010 (0x{words[bad]:04X})", bad)
    if kind == 2:
        raise RangeCorruption(f"frame {bad}: reconstructed sample outside [{lo}, {hi}]", bad)
    return out_arr[:n].copy()
