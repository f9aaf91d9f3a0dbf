"""Smart-meter delay-band simulation with clamped storage and wasted-energy accounting.

Delivered cumulative energy may run up to ``tau`` ahead of or behind the
cumulative demand curve. Generation that would push it outside the band goes
to (or comes from) storage. Storage is never allowed above zero; any positive
excess is counted as wasted.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .decomposition import EnergySeries, decompose, integrate, scale_to_demand
from .surplus import SurplusModel, generation_increments
from .timeseries import (
    Dataset,
    GridError,
    PowerSeries,
    ValidationError,
    format_timestamp,
    total_volatile,
)

MINUTES_PER_DAY = 1440


@dataclass(frozen=True)
class ScenarioConfig:
    model: SurplusModel = field(default_factory=SurplusModel)
    tau_minutes: int = 0
    track_trajectories: bool = True
    storage_cap_mwh: Optional[float] = None

    def __post_init__(self):
        if self.tau_minutes < 0 or int(self.tau_minutes) != self.tau_minutes:
            raise ValidationError("tau must be a non-negative whole number of minutes")
        if self.storage_cap_mwh is not None and self.storage_cap_mwh < 0:
            raise ValidationError("storage cap must be >= 0")

    @classmethod
    def from_days(cls, model, tau_days, **kw):
        minutes = tau_days * MINUTES_PER_DAY
        if abs(minutes - round(minutes)) > 1e-6:
            raise ValidationError(f"tau of {tau_days} days is not a whole number of minutes")
        return cls(model=model, tau_minutes=int(round(minutes)), **kw)

    @property
    def tau_days(self) -> float:
        return self.tau_minutes / MINUTES_PER_DAY

    def tau_steps(self, step_minutes: int) -> int:
        if self.tau_minutes % step_minutes:
            raise ValidationError(
                f"tau ({self.tau_minutes} min) is not a multiple of the {step_minutes} min step"
            )
        return self.tau_minutes // step_minutes


@dataclass(frozen=True, eq=False)
class SimulationResult:
    e_sfmax: float
    wasted_total: float
    generated_total: float
    shortfall_total: float = 0.0
    delivered: Optional[EnergySeries] = None
    storage: Optional[EnergySeries] = None
    wasted_power: Optional[PowerSeries] = None
    cases: Optional[np.ndarray] = None
    alpha: float = 0.0
    tau_minutes: int = 0

    @property
    def tau_days(self):
        return self.tau_minutes / MINUTES_PER_DAY

    def conservation_residual(self) -> float:
        """Relative imbalance of generated vs delivered + stored + wasted - unserved."""
        if self.delivered is None:
            raise ValueError("trajectories were not tracked")
        ed = self.delivered.values
        booked = (ed[-1] - ed[0]) + self.storage.values[-1] + self.wasted_total
        booked -= self.shortfall_total
        scale = max(abs(self.generated_total), 1e-300)
        return abs(self.generated_total - booked) / scale

    def summary(self) -> str:
        return (
            f"e_sfmax_gwh={self.e_sfmax / 1e3:.6g}, wasted_twh={self.wasted_total / 1e6:.6g}, "
            f"alpha={self.alpha:g}, tau_days={self.tau_days:g}"
        )

    def trajectory_csv(self, comments=()) -> str:
        if self.delivered is None:
            raise ValueError("trajectories were not tracked")
        buf = io.StringIO()
        for c in comments:
            buf.write(f"# {c}\n")
        buf.write("timestamp_utc,delivered_mwh,storage_mwh,wasted_mw\n")
        wasted = np.concatenate([[0.0], self.wasted_power.values])
        for ts, d, s, w in zip(
            self.delivered.timestamps(), self.delivered.values, self.storage.values, wasted
        ):
            buf.write(f"{format_timestamp(ts)},{float(d)!r},{float(s)!r},{float(w)!r}\n")
        return buf.getvalue()


def _check_inputs(demand_energy: EnergySeries, volatile: PowerSeries):
    if (
        demand_energy.start_time != volatile.start_time
        or demand_energy.step_minutes != volatile.step_minutes
        or len(demand_energy) != len(volatile) + 1
    ):
        raise GridError("demand energy and volatile power are not on the same grid")
    if np.any(np.diff(demand_energy.values) < 0):
        raise ValidationError("cumulative demand must be non-decreasing")


def simulate(
    demand_energy: EnergySeries,
    volatile: PowerSeries,
    cfg: ScenarioConfig,
    offshore: Optional[PowerSeries] = None,
) -> SimulationResult:
    """Run the delay-band recursion over the whole horizon.

    Parameters
    ----------
    demand_energy : EnergySeries
        Cumulative demand at the n+1 grid nodes (see ``decomposition.integrate``).
    volatile : PowerSeries
        Base wind-solar generation (n samples), usually scaled to the demand average.
    cfg : ScenarioConfig
    offshore : PowerSeries, optional
        Replaces ``cfg.model.offshore_series`` for the offshore model.

    Near the ends of the horizon the band limits are taken at the first/last
    node rather than extrapolated.
    """
    _check_inputs(demand_energy, volatile)
    model = cfg.model
    if offshore is not None:
        model = SurplusModel(model.kind, model.alpha, model.p_nom, model.gain, offshore)
    n = len(volatile)
    demand_average = demand_energy.values[-1] / (n * volatile.dt_hours)
    model = model.bind(volatile, demand_average)
    tau_steps = cfg.tau_steps(volatile.step_minutes)

    d_ev = np.ascontiguousarray(generation_increments(model, volatile), dtype=float)
    cap = -1.0 if cfg.storage_cap_mwh is None else float(cfg.storage_cap_mwh)
    delivered, storage, wasted, shortfall, cases = _kernels.band_recursion(
        np.ascontiguousarray(demand_energy.values), d_ev, tau_steps, cap
    )
    result = dict(
        e_sfmax=max(0.0, float(-storage.min())),
        wasted_total=math.fsum(wasted),
        generated_total=math.fsum(d_ev),
        shortfall_total=math.fsum(shortfall),
        alpha=model.alpha,
        tau_minutes=cfg.tau_minutes,
    )
    if cfg.track_trajectories:
        start, step = volatile.start_time, volatile.step_minutes
        result.update(
            delivered=EnergySeries(start, delivered, step),
            storage=EnergySeries(start, storage, step),
            wasted_power=volatile.with_values(wasted / volatile.dt_hours),
            cases=cases,
        )
    return SimulationResult(**result)


def wasted_power_stats(r: SimulationResult, window_minutes: int = MINUTES_PER_DAY):
    """Centered rolling mean of wasted power (edges truncated) and its overall mean."""
    if r.wasted_power is None:
        raise ValueError("result carries no wasted-power trajectory")
    w = r.wasted_power
    if window_minutes <= 0 or window_minutes % w.step_minutes:
        raise ValidationError("window must be a positive multiple of the step")
    return rolling_mean(w, window_minutes // w.step_minutes), w.mean()


def rolling_mean(p: PowerSeries, window: int) -> PowerSeries:
    n = len(p)
    csum = _kernels.kahan_cumsum(np.ascontiguousarray(p.values), 1.0)
    k = np.arange(n)
    lo = np.clip(k - window // 2, 0, n)
    hi = np.clip(k - window // 2 + window, 0, n)
    return p.with_values((csum[hi] - csum[lo]) / (hi - lo))


@dataclass(frozen=True)
class EquivalenceReport:
    clamped_e_sfmax: float
    drawdown: float
    passive_max_min: float

    @property
    def consistent(self) -> bool:
        tol = 1e-9 * max(abs(self.drawdown), abs(self.passive_max_min), 1e-12)
        return (
            abs(self.clamped_e_sfmax - self.drawdown) <= tol
            and self.drawdown <= self.passive_max_min + tol
        )


def passive_equivalence_check(demand: PowerSeries, volatile: PowerSeries) -> EquivalenceReport:
    """Compare the clamped recursion (alpha = tau = 0) with a drawdown of the unclamped balance.

    The unclamped balance is the cumulative of ``volatile - demand``. When both
    series have the same mean this equals the generation-minus-demand
    fluctuation energy, and ``passive_max_min`` is the passive requirement.
    """
    if not demand.same_grid(volatile):
        raise GridError("demand and volatile are not on the same grid")
    result = simulate(
        integrate(demand), volatile, ScenarioConfig(track_trajectories=False)
    )
    balance = _kernels.kahan_cumsum(
        np.ascontiguousarray(volatile.values - demand.values), volatile.dt_hours
    )
    return EquivalenceReport(
        clamped_e_sfmax=result.e_sfmax,
        drawdown=float(_kernels.running_drawdown(balance)),
        passive_max_min=float(balance.max() - balance.min()),
    )


@dataclass(frozen=True, eq=False)
class ScenarioInputs:
    """Demand and generation prepared for simulation, scaled to a common average."""

    demand: PowerSeries
    demand_energy: EnergySeries
    volatile: PowerSeries
    offshore: Optional[PowerSeries]
    volatile_factor: float
    offshore_factor: Optional[float]

    @property
    def demand_average(self):
        return self.demand.mean()


def prepare_inputs(d: Dataset, target_average: Optional[float] = None) -> ScenarioInputs:
    """Scale volatile and offshore generation to the demand average (or ``target_average``).

    ``offshore`` is None when the dataset has no offshore generation.
    """
    demand = d.load
    target = demand.mean() if target_average is None else target_average
    raw_v = total_volatile(d)
    offshore = offshore_factor = None
    if d.wind_offshore.mean() > 0:
        offshore_factor = target / d.wind_offshore.mean()
        offshore = scale_to_demand(d.wind_offshore.with_values(d.wind_offshore.values), target)
    return ScenarioInputs(
        demand=demand,
        demand_energy=decompose(demand).cumulative_total,
        volatile=scale_to_demand(raw_v, target),
        offshore=offshore,
        volatile_factor=target / raw_v.mean(),
        offshore_factor=offshore_factor,
    )
