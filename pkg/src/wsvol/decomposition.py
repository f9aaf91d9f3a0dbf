"""Average/fluctuation split, cumulative energies and passive storage sizing.

Energies are cumulative sums on the n+1 grid nodes of a series with n
intervals: ``E[0] = 0`` and ``E[k] = dt * sum(P[:k])`` (left rectangles).
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from datetime import datetime, timedelta

import numpy as np

from ._kernels import kahan_cumsum
from .timeseries import GridError, PowerSeries, ValidationError, format_timestamp


@dataclass(frozen=True, eq=False)
class EnergySeries:
    """Cumulative energy (MWh) at grid nodes ``start + k*step``, k = 0..n."""

    start_time: datetime
    values: np.ndarray
    step_minutes: int = 15

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    def __sub__(self, other: EnergySeries) -> EnergySeries:
        _check_same_grid(self, other)
        return EnergySeries(self.start_time, self.values - other.values, self.step_minutes)

    def timestamps(self):
        step = timedelta(minutes=self.step_minutes)
        return [self.start_time + k * step for k in range(len(self))]

    def to_csv(self, comments=()) -> str:
        buf = io.StringIO()
        for c in comments:
            buf.write(f"# {c}\n")
        buf.write("timestamp_utc,value_mwh\n")
        for ts, v in zip(self.timestamps(), self.values):
            buf.write(f"{format_timestamp(ts)},{float(v)!r}\n")
        return buf.getvalue()


def _check_same_grid(a, b):
    if (
        a.start_time != b.start_time
        or a.step_minutes != b.step_minutes
        or len(a) != len(b)
    ):
        raise GridError("series are not on the same grid")


def integrate(p: PowerSeries, compensated=False) -> EnergySeries:
    """Cumulative energy of a power series by left-rectangle sums.

    The plain sum adds ``P[k] * dt`` one step at a time, which is bit-for-bit
    the accumulation the smart-meter recursion performs; a generation series
    equal to the demand therefore tracks it exactly. ``compensated=True``
    uses Kahan summation instead.
    """
    if compensated:
        values = kahan_cumsum(p.values, p.dt_hours)
    else:
        values = np.concatenate([[0.0], np.cumsum(p.values * p.dt_hours)])
    return EnergySeries(p.start_time, values, p.step_minutes)


@dataclass(frozen=True, eq=False)
class Decomposition:
    average: float
    fluctuation: PowerSeries
    cumulative_fluct: EnergySeries
    cumulative_total: EnergySeries

    def elapsed_hours(self):
        return np.arange(len(self.cumulative_total)) * self.fluctuation.dt_hours


def decompose(p: PowerSeries) -> Decomposition:
    """Split ``p`` into its arithmetic mean and the zero-mean remainder."""
    average = p.mean()
    fluct = p.with_values(p.values - average)
    return Decomposition(
        average=average,
        fluctuation=fluct,
        cumulative_fluct=integrate(fluct, compensated=True),
        cumulative_total=integrate(p),
    )


def storage_fluctuation(v: Decomposition, d: Decomposition) -> EnergySeries:
    """Cumulative generation fluctuation minus cumulative demand fluctuation."""
    return v.cumulative_fluct - d.cumulative_fluct


def passive_storage_requirement(e_sf) -> float:
    """Storage (MWh) needed to absorb ``e_sf`` with a passive buffer: max - min."""
    values = np.asarray(getattr(e_sf, "values", e_sf), dtype=float)
    if values.size == 0:
        raise ValueError("empty energy series")
    return float(values.max() - values.min())


def scaling_factor(v: PowerSeries, target_average: float) -> float:
    mean = v.mean()
    if not mean > 0:
        raise ValidationError("cannot scale a series with non-positive mean")
    if not target_average > 0:
        raise ValidationError("target average must be positive")
    return target_average / mean


def scale_to_demand(v: PowerSeries, target_average: float) -> PowerSeries:
    """Multiply every sample so the mean becomes ``target_average``."""
    factor = scaling_factor(v, target_average)
    return PowerSeries(v.start_time, v.values * factor, v.step_minutes, v.channel)


def format_energy(mwh: float) -> str:
    """GWh with 4 significant digits, switching to TWh above 10^4 GWh."""
    gwh = mwh / 1e3
    if abs(gwh) > 1e4:
        return f"{gwh / 1e3:.4g} TWh"
    return f"{gwh:.4g} GWh"
