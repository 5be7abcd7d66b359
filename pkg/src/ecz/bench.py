"""Compression-ratio comparison of the frame packer against Huffman baselines."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import baselines
from .codec import DEFAULT_WIDTH, WidthClass
from .engine import DEFAULT_RESYNC_INTERVAL, VERSION, encode_channels, frame_histogram
from .ingest import read_bin16, read_csv, read_wfdb212

REPORT_VERSION = VERSION
CR_KEYS = ("cr_proposed", "cr_ideal_huffman", "cr_selective_huffman")


@dataclass
class RecordResult:
    name: str
    samples: int
    cr_proposed: float | None
    cr_ideal_huffman: float | None
    cr_selective_huffman: float | None
    frames: dict[str, int]
    errors: dict[str, float | int | dict[str, float]] = field(default_factory=dict)


@dataclass
class BenchReport:
    width: int
    resync_interval: int
    selective_m: int
    records: list[RecordResult]
    version: int = REPORT_VERSION

    def aggregate(self) -> dict[str, dict[str, float | None]]:
        out: dict[str, dict[str, float | None]] = {"average": {}, "maximum": {}}
        for key in CR_KEYS:
            values = [getattr(r, key) for r in self.records if getattr(r, key) is not None]
            out["average"][key] = float(np.mean(values)) if values else None
            out["maximum"][key] = float(np.max(values)) if values else None
        return out

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "width": self.width,
            "resync_interval": self.resync_interval,
            "selective_m": self.selective_m,
            "records": [asdict(r) for r in self.records],
            "aggregate": self.aggregate(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        def fmt(v):
            return "n/a" if v is None else f"{v:.3f}"

        lines = [
            f"width={self.width} resync_interval={self.resync_interval} selective_m={self.selective_m}",
            f"{'record':<24} {'samples':>9} {'proposed':>9} {'ideal':>9} {'selective':>9}  frames A/B/C/D/E",
        ]
        for r in self.records:
            frames = "/".join(str(r.frames[k]) for k in "ABCDE")
            lines.append(
                f"{r.name:<24} {r.samples:>9} {fmt(r.cr_proposed):>9} {fmt(r.cr_ideal_huffman):>9} "
                f"{fmt(r.cr_selective_huffman):>9}  {frames}"
            )
        agg = self.aggregate()
        for label in ("average", "maximum"):
            row = agg[label]
            lines.append(
                f"{label:<24} {'':>9} {fmt(row['cr_proposed']):>9} {fmt(row['cr_ideal_huffman']):>9} "
                f"{fmt(row['cr_selective_huffman']):>9}"
            )
        return "\n".join(lines) + "\n"


def error_summary(errors: np.ndarray) -> dict:
    if len(errors) == 0:
        return {"min": 0, "max": 0, "mean_abs": 0.0, "width_fraction": {}}
    fractions = {}
    remaining = np.ones(len(errors), dtype=bool)
    for cls in (WidthClass.W2, WidthClass.W3, WidthClass.W5, WidthClass.W7):
        half = 1 << (cls.value - 1)
        inside = (errors >= -half) & (errors < half) & remaining
        fractions[cls.name] = float(np.count_nonzero(inside) / len(errors))
        remaining &= ~inside
    fractions["FULL"] = float(np.count_nonzero(remaining) / len(errors))
    return {
        "min": int(errors.min()),
        "max": int(errors.max()),
        "mean_abs": float(np.abs(errors).mean()),
        "width_fraction": fractions,
    }


def evaluate_record(
    name: str,
    samples: Sequence[int] | np.ndarray,
    width: int = DEFAULT_WIDTH,
    resync_interval: int = DEFAULT_RESYNC_INTERVAL,
    selective_m: int = baselines.DEFAULT_SELECTIVE_M,
) -> RecordResult:
    samples = np.asarray(samples, dtype=np.int64)
    n = len(samples)
    container = encode_channels([samples], width, resync_interval)
    words = container.channel_words(0)
    errors = baselines.prediction_errors(samples)
    if n == 0:
        return RecordResult(name, 0, None, None, None, frame_histogram(words), error_summary(errors))
    hist = baselines.error_histogram(samples)
    return RecordResult(
        name=name,
        samples=n,
        cr_proposed=baselines.compression_ratio(n, width, 16 * len(words)),
        cr_ideal_huffman=baselines.compression_ratio(n, width, baselines.ideal_huffman_bits(hist)),
        cr_selective_huffman=baselines.compression_ratio(
            n, width, baselines.selective_huffman_bits(hist, selective_m, width)
        ),
        frames=frame_histogram(words),
        errors=error_summary(errors),
    )


def load_lead(
    path: str | Path,
    fmt: str,
    lead: int = 0,
    channels: int = 1,
    width: int = DEFAULT_WIDTH,
    max_samples: int | None = None,
) -> np.ndarray:
    """One signal from a record file, optionally truncated."""
    path = Path(path)
    if fmt == "wfdb212":
        streams = list(read_wfdb212(path.read_bytes()))
    elif fmt == "bin16":
        streams = read_bin16(path.read_bytes(), width, channels)
    elif fmt == "csv":
        streams = read_csv(path.read_text(), channels, width)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if not 0 <= lead < len(streams):
        raise ValueError(f"{path}: lead {lead} not in 0..{len(streams) - 1}")
    signal = streams[lead]
    return signal[:max_samples] if max_samples is not None else signal


def run_bench(
    records: Sequence[tuple[str, np.ndarray]],
    width: int = DEFAULT_WIDTH,
    resync_interval: int = DEFAULT_RESYNC_INTERVAL,
    selective_m: int = baselines.DEFAULT_SELECTIVE_M,
) -> BenchReport:
    results = [evaluate_record(name, x, width, resync_interval, selective_m) for name, x in records]
    return BenchReport(width, resync_interval, selective_m, results)
