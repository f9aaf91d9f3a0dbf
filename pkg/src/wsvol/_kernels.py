"""Compiled inner loops. Everything here works on plain float64 arrays."""

import numpy as np
from numba import njit

CASE_INSIDE = 0
CASE_ABOVE = 1
CASE_BELOW = 2


@njit(cache=True)
def kahan_cumsum(x, scale):
    """Prefix sums of ``x * scale`` with a leading zero (length ``len(x) + 1``)."""
    n = x.size
    out = np.empty(n + 1)
    out[0] = 0.0
    total = 0.0
    comp = 0.0
    for k in range(n):
        y = x[k] * scale - comp
        t = total + y
        comp = (t - total) - y
        total = t
        out[k + 1] = total
    return out


@njit(cache=True)
def band_recursion(e_d, d_ev, tau_steps, cap):
    """Delay-band demand shifting with storage clamped to ``[-cap, 0]``.

    ``e_d`` holds cumulative demand at the n+1 grid nodes, ``d_ev`` the n
    generation increments. ``cap < 0`` disables the lower storage limit.

    Returns delivered (n+1), storage (n+1), wasted (n), shortfall (n), cases (n).
    """
    n = d_ev.size
    delivered = np.empty(n + 1)
    storage = np.empty(n + 1)
    wasted = np.zeros(n)
    shortfall = np.zeros(n)
    cases = np.empty(n, dtype=np.int8)
    delivered[0] = 0.0
    storage[0] = 0.0
    ed = 0.0
    es = 0.0
    for k in range(n):
        s = k + 1
        lo_i = s - tau_steps
        if lo_i < 0:
            lo_i = 0
        hi_i = s + tau_steps
        if hi_i > n:
            hi_i = n
        lo = e_d[lo_i]
        hi = e_d[hi_i]
        trial = ed + d_ev[k]
        if trial > hi:
            es += trial - hi
            ed = hi
            cases[k] = CASE_ABOVE
        elif trial < lo:
            es += trial - lo
            ed = lo
            cases[k] = CASE_BELOW
        else:
            ed = trial
            cases[k] = CASE_INSIDE
        if es > 0.0:
            wasted[k] = es
            es = 0.0
        elif cap >= 0.0 and es < -cap:
            shortfall[k] = -cap - es
            es = -cap
        delivered[s] = ed
        storage[s] = es
    return delivered, storage, wasted, shortfall, cases


@njit(cache=True)
def running_drawdown(x):
    """Largest drop of ``x`` from any earlier (or same) point."""
    peak = x[0]
    worst = 0.0
    for k in range(x.size):
        if x[k] > peak:
            peak = x[k]
        d = peak - x[k]
        if d > worst:
            worst = d
    return worst
