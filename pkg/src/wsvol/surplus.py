"""Surplus-generation models: how much energy the over-provisioned fleet delivers per step."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .timeseries import PowerSeries, ValidationError

KINDS = ("constant_scaling", "low_output_tanh", "offshore_substitution")
# short names used in config files and on the command line
ALIASES = {
    "constant": "constant_scaling",
    "low_tanh": "low_output_tanh",
    "offshore": "offshore_substitution",
}
SHORT_NAMES = {v: k for k, v in ALIASES.items()}


def resolve_kind(name: str) -> str:
    kind = ALIASES.get(name, name)
    if kind not in KINDS:
        raise ValidationError(f"unknown surplus model {name!r}")
    return kind


@dataclass(frozen=True)
class SurplusModel:
    """Surplus strength ``alpha`` plus the shape of the extra generation.

    * ``constant_scaling``: the whole fleet is ``1 + alpha`` times larger.
    * ``low_output_tanh``: the extra fleet saturates at ``p_nom`` and yields
      ``gain`` times the base output at low resource levels.
    * ``offshore_substitution``: the extra fleet follows ``offshore_series``,
      which must already be scaled to the demand average.

    ``p_nom=None`` means "use the mean of the volatile series" and is
    resolved by :meth:`bind`.
    """

    kind: str = "constant_scaling"
    alpha: float = 0.0
    p_nom: Optional[float] = None
    gain: float = 2.0
    offshore_series: Optional[PowerSeries] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", resolve_kind(self.kind))
        if not self.alpha >= 0:
            raise ValidationError("alpha must be >= 0")
        if not self.gain > 0:
            raise ValidationError("gain must be > 0")
        if self.p_nom is not None and not self.p_nom > 0:
            raise ValidationError("p_nom must be > 0")
        has_off = self.offshore_series is not None
        if has_off != (self.kind == "offshore_substitution"):
            raise ValidationError(
                "offshore_series is required for, and only for, offshore_substitution"
            )

    def with_alpha(self, alpha: float) -> SurplusModel:
        return SurplusModel(self.kind, alpha, self.p_nom, self.gain, self.offshore_series)

    def bind(self, volatile: PowerSeries, demand_average: Optional[float] = None) -> SurplusModel:
        """Fill defaults from data and check the offshore series against the demand average."""
        p_nom = self.p_nom
        if p_nom is None and self.kind == "low_output_tanh":
            p_nom = volatile.mean()
            if not p_nom > 0:
                raise ValidationError("cannot default p_nom from a zero-mean volatile series")
        if self.offshore_series is not None:
            if not self.offshore_series.same_grid(volatile):
                raise ValidationError("offshore series is not on the volatile grid")
            if demand_average is not None:
                off_mean = self.offshore_series.mean()
                if abs(off_mean - demand_average) > 1e-6 * abs(demand_average):
                    raise ValidationError(
                        f"offshore series mean {off_mean} != demand average {demand_average}"
                    )
        return SurplusModel(self.kind, self.alpha, p_nom, self.gain, self.offshore_series)


def low_output_power(p_v, p_nom, gain=2.0):
    """Saturating output of a fleet tuned for weak wind / low light.

    Behaves like ``gain * p_v`` for small input and levels off at ``p_nom``.
    """
    return p_nom * np.tanh(gain * np.asarray(p_v, dtype=float) / p_nom)


def step_generation(model: SurplusModel, p_v, p_off=None, dt=0.25):
    """Energy increment (MWh) over one step of ``dt`` hours.

    Works elementwise on arrays. ``model.p_nom`` must be set for the tanh model.
    """
    p_v = np.asarray(p_v, dtype=float)
    if model.kind == "constant_scaling":
        power = (1.0 + model.alpha) * p_v
    elif model.kind == "low_output_tanh":
        if model.p_nom is None:
            raise ValidationError("p_nom unresolved; call SurplusModel.bind first")
        power = p_v + model.alpha * low_output_power(p_v, model.p_nom, model.gain)
    else:
        if p_off is None:
            raise ValidationError("offshore sample required for offshore_substitution")
        power = p_v + model.alpha * np.asarray(p_off, dtype=float)
    return power * dt


def generation_increments(model: SurplusModel, volatile: PowerSeries) -> np.ndarray:
    """Per-step increments over a whole series (model must be bound)."""
    p_off = None if model.offshore_series is None else model.offshore_series.values
    return step_generation(model, volatile.values, p_off, volatile.dt_hours)
