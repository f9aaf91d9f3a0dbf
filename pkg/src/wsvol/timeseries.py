"""Uniform-grid power series: validation, canonical CSV I/O, synthetic fixtures."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

CHANNELS = ("load", "solar", "wind_onshore", "wind_offshore")
SERIES_CHANNELS = CHANNELS + ("derived",)
CSV_HEADER = "timestamp_utc,load_mw,solar_mw,wind_onshore_mw,wind_offshore_mw"


class DataError(ValueError):
    """Base class for input data problems."""


class ParseError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class GridError(DataError):
    """Timestamps are not on a strict uniform grid."""


class ValidationError(DataError):
    """Values violate a channel constraint (non-finite, negative, ...)."""


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_timestamp(text: str) -> datetime:
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        raise ValueError(f"timestamp {text!r} lacks a UTC offset")
    return ts.astimezone(timezone.utc)


@dataclass(frozen=True, eq=False)
class PowerSeries:
    """Instantaneous power samples (MW) on a uniform grid.

    ``values[k]`` is the mean power over ``[start + k*step, start + (k+1)*step)``.
    """

    start_time: datetime
    values: np.ndarray
    step_minutes: int = 15
    channel: str = "derived"

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.start_time.tzinfo is None:
            raise ValidationError("start_time must be timezone-aware (UTC)")
        if self.channel not in SERIES_CHANNELS:
            raise ValidationError(f"unknown channel {self.channel!r}")
        if int(self.step_minutes) != self.step_minutes or self.step_minutes <= 0:
            raise ValidationError("step_minutes must be a positive integer")
        if values.ndim != 1 or values.size < 2:
            raise ValidationError("a series needs at least 2 samples")
        if not np.all(np.isfinite(values)):
            bad = np.flatnonzero(~np.isfinite(values))
            raise ValidationError(f"non-finite samples at rows {bad[:10].tolist()}")
        if self.channel != "derived" and np.any(values < 0):
            bad = np.flatnonzero(values < 0)
            raise ValidationError(
                f"negative {self.channel} samples at rows {bad[:10].tolist()}"
            )

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return (
            self.start_time == other.start_time
            and self.step_minutes == other.step_minutes
            and self.channel == other.channel
            and np.array_equal(self.values, other.values)
        )

    @property
    def dt_hours(self) -> float:
        return self.step_minutes / 60.0

    @property
    def step(self) -> timedelta:
        return timedelta(minutes=self.step_minutes)

    def mean(self) -> float:
        return math.fsum(self.values) / self.values.size

    def timestamps(self, nodes=False):
        """Sample start times; with ``nodes=True`` also the end of the last interval."""
        n = len(self) + (1 if nodes else 0)
        return [self.start_time + k * self.step for k in range(n)]

    def same_grid(self, other: PowerSeries) -> bool:
        return (
            self.start_time == other.start_time
            and self.step_minutes == other.step_minutes
            and len(self) == len(other)
        )

    def with_values(self, values, channel="derived") -> PowerSeries:
        return PowerSeries(self.start_time, values, self.step_minutes, channel)


@dataclass(frozen=True, eq=False)
class Dataset:
    load: PowerSeries
    solar: PowerSeries
    wind_onshore: PowerSeries
    wind_offshore: PowerSeries
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in CHANNELS:
            s = getattr(self, name)
            if s.channel != name:
                raise ValidationError(f"{name} series carries channel {s.channel!r}")
            if not s.same_grid(self.load):
                raise GridError(f"{name} is not on the load grid")

    def __len__(self):
        return len(self.load)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return all(getattr(self, c) == getattr(other, c) for c in CHANNELS)

    @property
    def step_minutes(self):
        return self.load.step_minutes

    def channel_means(self):
        return {c: getattr(self, c).mean() for c in CHANNELS}


def total_volatile(d: Dataset) -> PowerSeries:
    """Combined solar + onshore + offshore generation."""
    total = d.solar.values + d.wind_onshore.values + d.wind_offshore.values
    return d.load.with_values(total)


def _fmt(x: float) -> str:
    # repr gives the shortest string that round-trips a float64
    return repr(float(x))


def dataset_to_csv(d: Dataset, comments=()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    buf.write(CSV_HEADER + "\n")
    cols = [getattr(d, c).values for c in CHANNELS]
    for k, ts in enumerate(d.load.timestamps()):
        buf.write(",".join([format_timestamp(ts)] + [_fmt(col[k]) for col in cols]))
        buf.write("\n")
    return buf.getvalue()


def export_dataset(d: Dataset, path, comments=()) -> None:
    Path(path).write_text(dataset_to_csv(d, comments), encoding="utf-8", newline="\n")


def parse_dataset(path, step_minutes=15, source=None) -> Dataset:
    """Read a canonical CSV file.

    Leading lines starting with ``#`` are treated as provenance comments and
    skipped. ``step_minutes=None`` accepts any uniform spacing. Raises
    ParseError, GridError or ValidationError.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_dataset_text(text, step_minutes, source=source or path.name)


def parse_dataset_text(text: str, step_minutes=15, source="<string>") -> Dataset:
    lines = text.split("\n")
    lineno = 0
    while lineno < len(lines) and lines[lineno].startswith("#"):
        lineno += 1
    if lineno >= len(lines) or not lines[lineno].strip():
        raise ParseError("missing header", line=lineno + 1)
    if lines[lineno].rstrip("\r") != CSV_HEADER:
        raise ParseError(f"header must be exactly {CSV_HEADER!r}", line=lineno + 1)
    header_line = lineno + 1

    stamps = []
    rows = []
    reader = csv.reader(lines[lineno + 1:])
    for offset, row in enumerate(reader):
        line = header_line + 1 + offset
        if not row:
            continue
        if len(row) != 5:
            raise ParseError(f"expected 5 fields, got {len(row)}", line=line)
        try:
            stamps.append(parse_timestamp(row[0]))
        except ValueError as exc:
            raise ParseError(f"bad timestamp: {exc}", line=line) from None
        try:
            vals = [float(x) for x in row[1:]]
        except ValueError:
            raise ParseError(f"non-numeric value in {row[1:]}", line=line) from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError("non-finite value", line=line)
        rows.append(vals)

    if len(rows) < 2:
        raise ValidationError(f"need at least 2 data rows, got {len(rows)}")

    gaps = [b - a for a, b in zip(stamps, stamps[1:])]
    for k, gap in enumerate(gaps):
        if gap <= timedelta(0):
            raise GridError(f"timestamps not increasing at {format_timestamp(stamps[k + 1])}")
    if step_minutes is None:
        # the smallest spacing defines the grid; larger multiples are gaps
        step = min(gaps)
    else:
        step = timedelta(minutes=step_minutes)
    if step % timedelta(minutes=1):
        raise GridError(f"step {step} is not a whole number of minutes")
    for k in range(1, len(stamps)):
        gap = stamps[k] - stamps[k - 1]
        if gap != step:
            if gap > step and gap % step == timedelta(0):
                missing = format_timestamp(stamps[k - 1] + step)
                raise GridError(f"gap: missing slot {missing}")
            raise GridError(
                f"non-uniform spacing {gap} at {format_timestamp(stamps[k])}"
            )

    data = np.array(rows, dtype=float)
    negative = np.flatnonzero(np.any(data < 0, axis=1))
    if negative.size:
        # +1 for 1-based rows in the data section
        raise ValidationError(
            f"negative values in data rows {(negative + 1)[:20].tolist()}"
        )

    step_minutes = int(step / timedelta(minutes=1))
    start = stamps[0]
    series = {
        c: PowerSeries(start, data[:, i], step_minutes, c) for i, c in enumerate(CHANNELS)
    }
    meta = {"source": source, "year": start.year, "rows": len(rows)}
    return Dataset(metadata=meta, **series)


# ---------------------------------------------------------------------------
# synthetic fixtures

GENERATORS = ("constant", "sinusoid", "square", "noise")


@dataclass(frozen=True)
class ChannelSpec:
    """One synthetic channel: ``offset`` plus a shape of size ``amplitude``.

    ``period`` and ``phase`` are in steps and radians. For ``noise`` the
    deviation is uniform in ``[-amplitude, amplitude]``.
    """

    kind: str = "constant"
    offset: float = 0.0
    amplitude: float = 0.0
    period: float = 96.0
    phase: float = 0.0

    def __post_init__(self):
        if self.kind not in GENERATORS:
            raise ValidationError(f"unknown generator {self.kind!r}")
        if self.kind != "constant" and self.period <= 0:
            raise ValidationError("period must be positive")
        if self.amplitude < 0:
            raise ValidationError("amplitude must be non-negative")
        if self.kind != "constant" and self.amplitude > self.offset:
            raise ValidationError(
                f"amplitude {self.amplitude} exceeds offset {self.offset}; "
                "channel would go negative"
            )
        if self.kind == "constant" and self.offset < 0:
            raise ValidationError("constant channel must be non-negative")


@dataclass(frozen=True)
class SyntheticSpec:
    length: int
    load: ChannelSpec = ChannelSpec()
    solar: ChannelSpec = ChannelSpec()
    wind_onshore: ChannelSpec = ChannelSpec()
    wind_offshore: ChannelSpec = ChannelSpec()
    step_minutes: int = 15
    seed: int = 0
    start_time: str = "2019-01-01T00:00:00Z"

    @classmethod
    def from_dict(cls, d: dict) -> SyntheticSpec:
        d = dict(d)
        for c in CHANNELS:
            if c in d:
                d[c] = ChannelSpec(**d[c])
        return cls(**d)


def _generate(spec: ChannelSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    k = np.arange(n, dtype=float)
    if spec.kind == "constant":
        out = np.full(n, spec.offset)
    elif spec.kind == "sinusoid":
        out = spec.offset + spec.amplitude * np.sin(2 * np.pi * k / spec.period + spec.phase)
    elif spec.kind == "square":
        # sign from the phase fraction so each whole period averages to the offset
        frac = np.mod(k / spec.period + spec.phase / (2 * np.pi), 1.0)
        out = spec.offset + spec.amplitude * np.where(frac < 0.5, 1.0, -1.0)
    else:
        out = spec.offset + rng.uniform(-spec.amplitude, spec.amplitude, n)
    # amplitude <= offset is validated; this only removes rounding residue below zero
    return np.maximum(out, 0.0)


def synthesize(spec: SyntheticSpec) -> Dataset:
    rng = np.random.default_rng(spec.seed)
    start = parse_timestamp(spec.start_time)
    series = {}
    # fixed channel order keeps the rng stream reproducible
    for c in CHANNELS:
        series[c] = PowerSeries(
            start, _generate(getattr(spec, c), spec.length, rng), spec.step_minutes, c
        )
    return Dataset(metadata={"source": "synthetic", "seed": spec.seed, "year": start.year}, **series)
