"""Flat ``key = value`` run configuration with command-line overrides."""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

from .timeseries import ValidationError


def _floats(text):
    if isinstance(text, (list, tuple)):
        return tuple(float(x) for x in text)
    return tuple(float(x) for x in str(text).replace(";", ",").split(",") if x.strip())


@dataclass
class RunConfig:
    data: Optional[str] = None
    step_minutes: Optional[int] = 15
    model: str = "constant"
    alpha: float = 0.0
    gain: float = 2.0
    p_nom_mw: Optional[float] = None
    tau_days: float = 0.0
    storage_cap_gwh: Optional[float] = None
    out: str = "out"
    seed: Optional[int] = None
    spec: Optional[str] = None
    alphas: tuple = (0.3, 0.5, 0.7, 1.0)
    taus_days: Optional[tuple] = None
    targets_gwh: tuple = ()
    window_hours: Optional[float] = None
    workers: int = 1
    cache_dir: Optional[str] = None
    target_average_mw: float = 250000.0
    capacity_factor: float = 0.25
    solar_share: float = 1.0 / 3.0
    turbine_mw: tuple = (1.5, 6.0)

    _converters = {
        "alpha": float, "gain": float, "p_nom_mw": float, "tau_days": float,
        "storage_cap_gwh": float, "seed": int, "step_minutes": int, "alphas": _floats, "taus_days": _floats,
        "targets_gwh": _floats, "window_hours": float, "workers": int,
        "target_average_mw": float, "capacity_factor": float, "solar_share": float,
        "turbine_mw": _floats,
    }

    @classmethod
    def keys(cls):
        return [f.name for f in fields(cls)]

    def update(self, values: dict):
        known = set(self.keys())
        for key, raw in values.items():
            if raw is None:
                continue
            key = key.replace("-", "_")
            if key not in known:
                raise ValidationError(f"unknown config key {key!r}")
            conv = self._converters.get(key)
            try:
                setattr(self, key, conv(raw) if conv else raw)
            except ValueError:
                raise ValidationError(f"bad value for {key}: {raw!r}") from None
        return self

    def echo(self) -> str:
        """One-line, deterministic rendering for provenance headers."""
        return "; ".join(f"{k}={getattr(self, k)!r}" for k in self.keys())


def read_config_file(path) -> dict:
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = value
    return out


def load_config(path=None, overrides: Optional[dict] = None) -> RunConfig:
    cfg = RunConfig()
    if path is not None:
        cfg.update(read_config_file(path))
    if overrides:
        cfg.update(overrides)
    return cfg
