"""Command-line entry point: ``ecz compress|decompress|verify|bench``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import baselines, kernels
from .codec import DEFAULT_WIDTH, check_width
from .engine import (
    DEFAULT_RESYNC_INTERVAL,
    MAX_CHANNELS,
    Container,
    decode_container,
    deserialize_container,
    encode_channels,
    frame_histogram,
    raw_words_from_bytes,
    raw_words_to_bytes,
    serialize_container,
)
from .errors import EczError
from .ingest import FORMATS, check_range, read_bin16, read_csv, read_wfdb212, write_bin16, write_csv, write_wfdb212


def infer_format(path: Path, fmt: str | None) -> str:
    """Explicit ``--format`` wins; otherwise ``.csv`` and ``.dat`` by suffix, else bin16."""
    if fmt:
        return fmt
    return {".csv": "csv", ".dat": "wfdb212"}.get(path.suffix.lower(), "bin16")


def load_streams(path: Path, fmt: str | None, width: int, channels: int) -> list[np.ndarray]:
    fmt = infer_format(path, fmt)
    if fmt == "wfdb212":
        s1, s2 = read_wfdb212(path.read_bytes())
        for s in (s1, s2):
            check_range(s, width)
        return [s1, s2]
    if fmt == "bin16":
        return read_bin16(path.read_bytes(), width, channels)
    return read_csv(path.read_text(), channels, width)


def dump_streams(streams: list[np.ndarray], fmt: str) -> bytes:
    if fmt == "wfdb212":
        if len(streams) != 2:
            raise ValueError("wfdb212 output needs exactly 2 channels")
        return write_wfdb212(*streams)
    if fmt == "bin16":
        return write_bin16(streams)
    return write_csv(streams).encode()


def summary(container: Container) -> str:
    total = sum(container.sample_counts)
    nframes = container.frame_count
    if nframes == 0:
        cr = "n/a"
    else:
        cr = f"{baselines.compression_ratio(total, container.width, 16 * nframes):.3f}"
    hist = frame_histogram(container.records["word"])
    frames = " ".join(f"{k}={v}" for k, v in hist.items())
    return f"samples={total} channels={container.channel_count} frames={nframes} CR={cr} ({frames})"


def cmd_compress(args) -> int:
    streams = load_streams(args.input, args.format, args.width, args.channels)
    container = encode_channels(streams, args.width, args.resync_interval)
    if args.raw:
        if len(streams) != 1:
            raise ValueError("raw mode supports a single channel only")
        args.output.write_bytes(raw_words_to_bytes(container.records["word"]))
    else:
        args.output.write_bytes(serialize_container(container))
    print(summary(container))
    return 0


def cmd_decompress(args) -> int:
    data = args.input.read_bytes()
    if args.raw:
        words = raw_words_from_bytes(data)
        streams = [kernels.decode_channel(words, args.width)]
    else:
        streams = decode_container(deserialize_container(data))
    args.output.write_bytes(dump_streams(streams, infer_format(args.output, args.format)))
    return 0


def cmd_verify(args) -> int:
    streams = load_streams(args.input, args.format, args.width, args.channels)
    container = encode_channels(streams, args.width, args.resync_interval)
    decoded = decode_container(deserialize_container(serialize_container(container)))
    ok = len(decoded) == len(streams) and all(np.array_equal(a, b) for a, b in zip(streams, decoded))
    print(summary(container))
    print("PASS" if ok else "FAIL: decoded samples differ from input")
    return 0 if ok else 1


def cmd_bench(args) -> int:
    from .bench import load_lead, run_bench

    records = []
    for path in args.records:
        signal = load_lead(path, args.format, args.lead, args.channels, args.width, args.max_samples)
        records.append((path.stem, signal))
    report = run_bench(records, args.width, args.resync_interval, args.selective_m)
    text = report.to_json() if args.report == "json" else report.to_text()
    if args.output:
        args.output.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _width(value: str) -> int:
    try:
        return check_width(int(value))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _channels(value: str) -> int:
    n = int(value)
    if not 1 <= n <= MAX_CHANNELS:
        raise argparse.ArgumentTypeError(f"channels must be in 1..{MAX_CHANNELS}")
    return n


def _interval(value: str) -> int:
    n = int(value)
    if n < 0:
        raise argparse.ArgumentTypeError("resync interval must be >= 0")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ecz", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt_default=None):
        p.add_argument("--format", choices=FORMATS, default=fmt_default, help="default: from file suffix")
        p.add_argument("--width", type=_width, default=DEFAULT_WIDTH, help="sample bit depth (8-12)")
        p.add_argument("--channels", type=_channels, default=1)
        p.add_argument(
            "--resync-interval",
            type=_interval,
            default=DEFAULT_RESYNC_INTERVAL,
            help="samples between forced raw frames per channel; 0 disables",
        )

    p = sub.add_parser("compress", help="encode a sample file into a container")
    p.add_argument("input", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--raw", action="store_true", help="write bare u16 frame words (single channel)")
    common(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="decode a container back into samples")
    p.add_argument("input", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--format", choices=FORMATS, default=None, help="output format; default: from file suffix")
    p.add_argument("--width", type=_width, default=DEFAULT_WIDTH, help="bit depth for --raw input")
    p.add_argument("--raw", action="store_true", help="input is bare u16 frame words")
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("verify", help="round-trip a sample file in memory")
    p.add_argument("input", type=Path)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="compare compression ratios against Huffman baselines")
    p.add_argument("records", type=Path, nargs="+")
    common(p, fmt_default="wfdb212")
    p.add_argument("--lead", type=int, default=0, help="signal index within each record")
    p.add_argument("--max-samples", type=int, default=None)
    p.add_argument("--selective-m", type=int, default=baselines.DEFAULT_SELECTIVE_M)
    p.add_argument("--report", choices=("text", "json"), default="text")
    p.add_argument("-o", "--output", type=Path, default=None)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (EczError, ValueError, OSError) as exc:
        print(f"ecz {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
