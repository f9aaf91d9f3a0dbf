"""(tau, alpha) grids over the simulator, tau inversion, and fleet/cost arithmetic."""

from __future__ import annotations

import hashlib
import io
import json
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .smartmeter import MINUTES_PER_DAY, ScenarioConfig, ScenarioInputs, prepare_inputs, simulate
from .surplus import SHORT_NAMES, SurplusModel, resolve_kind
from .timeseries import Dataset, ValidationError

DEFAULT_TAUS_MINUTES = tuple(range(0, 2 * MINUTES_PER_DAY + 1, 60))


def inputs_digest(inputs: ScenarioInputs) -> str:
    h = hashlib.sha256()
    h.update(str((inputs.volatile.start_time.isoformat(), inputs.volatile.step_minutes)).encode())
    for arr in (inputs.demand_energy.values, inputs.volatile.values):
        h.update(np.ascontiguousarray(arr).tobytes())
    if inputs.offshore is not None:
        h.update(np.ascontiguousarray(inputs.offshore.values).tobytes())
    return h.hexdigest()


class ResultCache:
    """One small JSON file per grid point; writes are atomic (temp file + rename)."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(digest, model: SurplusModel, tau_minutes, cap):
        parts = (digest, model.kind, repr(float(model.alpha)), repr(model.gain),
                 repr(model.p_nom), int(tau_minutes), repr(cap))
        return hashlib.sha256("|".join(map(str, parts)).encode()).hexdigest()

    def get(self, key):
        path = self.directory / f"{key}.json"
        try:
            return json.loads(path.read_text())
        except (FileNotFoundError, json.JSONDecodeError):
            return None

    def put(self, key, value: dict):
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        with os.fdopen(fd, "w") as f:
            json.dump(value, f)
        os.replace(tmp, self.directory / f"{key}.json")


def model_for(kind: str, inputs: ScenarioInputs, alpha=0.0, p_nom=None, gain=2.0) -> SurplusModel:
    """Build a surplus model, taking the offshore series from ``inputs`` when needed."""
    kind = resolve_kind(kind)
    off = None
    if kind == "offshore_substitution":
        if inputs.offshore is None:
            raise ValidationError("dataset has no offshore generation")
        off = inputs.offshore
    return SurplusModel(kind, alpha, p_nom, gain, off)


@dataclass
class SweepProblem:
    """Everything needed to (re)run one grid point."""

    inputs: ScenarioInputs
    model: SurplusModel
    storage_cap_mwh: Optional[float] = None
    cache: Optional[ResultCache] = None
    digest: str = ""

    def __post_init__(self):
        if isinstance(self.model, str):
            self.model = model_for(self.model, self.inputs)
        if self.cache is not None and not self.digest:
            self.digest = inputs_digest(self.inputs)

    def run(self, alpha, tau_minutes):
        """Return (e_sfmax, wasted_total) in MWh."""
        model = self.model.with_alpha(alpha)
        key = None
        if self.cache is not None:
            key = ResultCache.key(self.digest, model, tau_minutes, self.storage_cap_mwh)
            hit = self.cache.get(key)
            if hit is not None:
                return hit["e_sfmax"], hit["wasted_total"]
        cfg = ScenarioConfig(model, int(tau_minutes), False, self.storage_cap_mwh)
        r = simulate(self.inputs.demand_energy, self.inputs.volatile, cfg)
        if key is not None:
            self.cache.put(key, {"e_sfmax": r.e_sfmax, "wasted_total": r.wasted_total})
        return r.e_sfmax, r.wasted_total

    def run_row(self, alpha, taus):
        return [self.run(alpha, t) for t in taus]


@dataclass(eq=False)
class SweepGrid:
    alphas: tuple
    taus_minutes: tuple
    surface: np.ndarray
    wasted: np.ndarray
    model: str
    problem: Optional[SweepProblem] = field(default=None, repr=False)

    def __post_init__(self):
        shape = (len(self.alphas), len(self.taus_minutes))
        if self.surface.shape != shape or self.wasted.shape != shape:
            raise ValidationError("surface does not match the axes")
        if np.any(self.surface < 0):
            raise ValidationError("negative storage requirement in surface")

    @property
    def taus_days(self):
        return tuple(t / MINUTES_PER_DAY for t in self.taus_minutes)

    def row(self, alpha) -> np.ndarray:
        return self.surface[self.alpha_index(alpha)]

    def alpha_index(self, alpha) -> int:
        for i, a in enumerate(self.alphas):
            if math.isclose(a, alpha, rel_tol=1e-12, abs_tol=1e-12):
                return i
        raise ValidationError(f"alpha {alpha} is not on the grid axis {self.alphas}")

    def non_monotone(self, tol=1e-9):
        """(alpha, tau) pairs where storage rises with tau or with alpha."""
        bad = []
        scale = tol * max(float(self.surface.max(initial=0.0)), 1.0)
        for i in range(len(self.alphas)):
            for j in range(1, len(self.taus_minutes)):
                if self.surface[i, j] > self.surface[i, j - 1] + scale:
                    bad.append(("tau", self.alphas[i], self.taus_minutes[j]))
        for i in range(1, len(self.alphas)):
            for j in range(len(self.taus_minutes)):
                if self.surface[i, j] > self.surface[i - 1, j] + scale:
                    bad.append(("alpha", self.alphas[i], self.taus_minutes[j]))
        return bad

    def to_csv(self, comments=()) -> str:
        buf = io.StringIO()
        for c in comments:
            buf.write(f"# {c}\n")
        buf.write("alpha,tau_days,e_sfmax_gwh,wasted_twh,model\n")
        name = SHORT_NAMES.get(self.model, self.model)
        for i, a in enumerate(self.alphas):
            for j, t in enumerate(self.taus_days):
                buf.write(
                    f"{a:g},{t:.10g},{self.surface[i, j] / 1e3:.10g},"
                    f"{self.wasted[i, j] / 1e6:.10g},{name}\n"
                )
        return buf.getvalue()


def _check_axis(values, name):
    values = tuple(values)
    if not values:
        raise ValidationError(f"{name} axis is empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValidationError(f"{name} axis must be strictly ascending")
    return values


def _row_job(args):
    problem, alpha, taus = args
    return problem.run_row(alpha, taus)


def sweep_surface(
    data,
    model,
    alphas: Sequence[float],
    taus_minutes: Sequence[int] = DEFAULT_TAUS_MINUTES,
    storage_cap_mwh=None,
    cache_dir=None,
    workers: int = 1,
) -> SweepGrid:
    """Storage requirement for every (alpha, tau) pair.

    ``data`` is a Dataset (scaled with :func:`prepare_inputs`) or ready
    ScenarioInputs. ``model`` is a SurplusModel (its alpha is ignored) or a
    model name. Rows run in separate processes when ``workers > 1``.
    """
    inputs = prepare_inputs(data) if isinstance(data, Dataset) else data
    alphas = _check_axis(alphas, "alpha")
    taus = tuple(int(t) for t in _check_axis(taus_minutes, "tau"))
    cache = ResultCache(cache_dir) if cache_dir is not None else None
    problem = SweepProblem(inputs, model, storage_cap_mwh, cache)

    jobs = [(problem, a, taus) for a in alphas]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_row_job, jobs))
    else:
        rows = [_row_job(j) for j in jobs]
    arr = np.array(rows, dtype=float).reshape(len(alphas), len(taus), 2)
    return SweepGrid(alphas, taus, arr[:, :, 0].copy(), arr[:, :, 1].copy(), problem.model.kind, problem)


@dataclass(frozen=True)
class Inversion:
    alpha: float
    target_mwh: float
    tau_minutes: Optional[int]
    status: str
    row_min_mwh: float
    non_monotone: bool = False

    @property
    def tau_days(self):
        return None if self.tau_minutes is None else self.tau_minutes / MINUTES_PER_DAY

    def csv_row(self):
        tau = "" if self.tau_minutes is None else f"{self.tau_days:.10g}"
        status = self.status + (";non_monotone" if self.non_monotone else "")
        return f"{self.alpha:g},{self.target_mwh / 1e3:.10g},{tau},{status}"


INVERSION_HEADER = "alpha,target_gwh,tau_days,status"


def invert_tau(grid: SweepGrid, alpha: float, target_mwh: float, refine=True) -> Inversion:
    """Smallest delay whose storage requirement is at most ``target_mwh``.

    The coarse answer comes from the grid row; with ``refine`` the interval
    to the preceding grid point is bisected down to one time step by
    re-running the simulator.
    """
    row = grid.row(alpha)
    scale = 1e-9 * max(float(row.max(initial=0.0)), 1.0)
    non_mono = bool(np.any(np.diff(row) > scale))
    hits = np.flatnonzero(row <= target_mwh)
    if hits.size == 0:
        return Inversion(alpha, target_mwh, None, "unreachable", float(row.min()), non_mono)
    j = int(hits[0])
    tau = grid.taus_minutes[j]
    if refine and j > 0 and grid.problem is not None:
        step = grid.problem.inputs.volatile.step_minutes
        lo, hi = grid.taus_minutes[j - 1] // step, tau // step
        while hi - lo > 1:
            mid = (lo + hi) // 2
            e, _ = grid.problem.run(alpha, mid * step)
            if e <= target_mwh:
                hi = mid
            else:
                lo = mid
        tau = hi * step
    return Inversion(alpha, target_mwh, tau, "ok", float(row.min()), non_mono)


def demand_rescale_preview(grid: SweepGrid, factor: float) -> SweepGrid:
    """Grid with every storage value multiplied by ``factor`` (tau curves kept)."""
    if not factor > 0:
        raise ValidationError("factor must be positive")
    return SweepGrid(grid.alphas, grid.taus_minutes, grid.surface * factor,
                     grid.wasted * factor, grid.model, None)


def cost_factor(alpha: float) -> float:
    """Running-cost multiplier for a fleet over-provisioned by ``alpha``."""
    if not alpha >= 0:
        raise ValidationError("alpha must be >= 0")
    return 1.0 + alpha


@dataclass(frozen=True)
class FleetSpec:
    target_average_power: float  # MW
    wind_capacity_factor: float = 0.25
    solar_share: float = 1.0 / 3.0
    turbine_nominal_power: float = 1.5  # MW

    def __post_init__(self):
        if not self.target_average_power > 0:
            raise ValidationError("target_average_power must be > 0")
        if not 0 < self.wind_capacity_factor <= 1:
            raise ValidationError("wind_capacity_factor must be in (0, 1]")
        if not 0 <= self.solar_share < 1:
            raise ValidationError("solar_share must be in [0, 1)")
        if not self.turbine_nominal_power > 0:
            raise ValidationError("turbine_nominal_power must be > 0")


def fleet_size(spec: FleetSpec):
    """(nominal wind power in MW, number of turbines) to supply the wind share on average."""
    nominal = spec.target_average_power * (1.0 - spec.solar_share) / spec.wind_capacity_factor
    count = math.ceil(nominal / spec.turbine_nominal_power - 1e-9)
    return nominal, count
