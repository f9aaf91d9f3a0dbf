from datetime import datetime, timezone

import numpy as np
import pytest

from wsvol import PowerSeries, SurplusModel

T0 = datetime(2019, 1, 1, tzinfo=timezone.utc)

ACCEPTANCE_LINES = []


def series(values, step=15, channel="derived", start=T0):
    return PowerSeries(start, np.asarray(values, dtype=float), step, channel)


def random_instance(rng, max_len=400, kinds=("constant_scaling", "low_output_tanh", "offshore_substitution")):
    """A random (load, volatile, model, tau_steps, step) tuple with volatile scaled to the load mean."""
    n = int(rng.integers(2, max_len + 1))
    step = int(rng.choice([15, 30, 60]))
    load = rng.uniform(0.2, 2.0, n) * rng.uniform(1, 100)
    vol = rng.uniform(0.0, 3.0, n) ** rng.uniform(0.5, 3)
    if vol.sum() == 0:
        vol[0] = 1.0
    vol *= load.mean() / vol.mean()
    kind = str(rng.choice(list(kinds)))
    alpha = float(rng.uniform(0, 1.5))
    off = None
    if kind == "offshore_substitution":
        o = rng.uniform(0.01, 1.0, n)
        off = series(o * load.mean() / o.mean(), step)
    model = SurplusModel(kind, alpha, gain=float(rng.uniform(0.5, 4)), offshore_series=off)
    tau_steps = int(rng.integers(0, min(n, 30) + 1))
    return series(load, step, "load"), series(vol, step), model, tau_steps, step


def check_invariants(r, e_d, d_ev, tau_steps):
    """Assert the per-step properties of a tracked simulation result."""
    n = d_ev.size
    delivered = r.delivered.values
    storage = r.storage.values
    assert np.all(storage <= 0.0)
    assert np.all(r.wasted_power.values >= 0.0)
    assert r.e_sfmax == pytest.approx(max(0.0, -storage.min()), abs=0)
    assert r.conservation_residual() <= 1e-6
    scale = max(e_d[-1], 1.0) * 1e-12
    for k in range(n):
        s = k + 1
        lo = e_d[max(s - tau_steps, 0)]
        hi = e_d[min(s + tau_steps, n)]
        assert lo - scale <= delivered[s] <= hi + scale
        trial = delivered[k] + d_ev[k]
        fired = [lo <= trial <= hi, trial > hi, trial < lo]
        assert sum(fired) == 1
        assert fired[r.cases[k]]


@pytest.fixture
def rng():
    return np.random.default_rng(20190101)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
