"""Accumulative squeezing: kick, wait for the next minimum of O, kick again.

Works with any state exposing ``kick(P)``, ``drift(dtau)``, ``factor()``,
``factor_curve(taus)`` and ``revival_period`` (None for classical
ensembles). Both QuantumState2D and ClassicalEnsemble2D qualify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .csvout import csv_text
from .errors import FlatObjective, MonotonicityViolation
from .pulses import PulseSequence

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
CLASSICAL_HORIZON_CAP = 200.0


class Evolvable(Protocol):
    revival_period: float | None

    def kick(self, P: float) -> "Evolvable": ...
    def drift(self, dtau: float) -> "Evolvable": ...
    def factor(self) -> float: ...
    def factor_curve(self, taus) -> np.ndarray: ...


def golden_section(f, a: float, b: float, xtol: float = 1e-10) -> tuple[float, float]:
    """Minimize a unimodal f on [a, b]; returns (x, f(x))."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _local_minima(vals: np.ndarray) -> np.ndarray:
    return np.nonzero((vals[1:-1] < vals[:-2]) & (vals[1:-1] <= vals[2:]))[0] + 1


def _brackets(ts: np.ndarray, vals: np.ndarray) -> list[tuple]:
    idx = _local_minima(vals)
    curv = vals[idx - 1] - 2.0 * vals[idx] + vals[idx + 1]
    return [(ts[i - 1], ts[i + 1], ts[i], vals[i], c) for i, c in zip(idx, curv)]


def next_minimum(
    state: Evolvable,
    horizon: float | None = None,
    grid: int = 4096,
    xtol: float = 1e-10,
    cap: float = CLASSICAL_HORIZON_CAP,
) -> tuple[float, float]:
    """Lowest interior minimum of O(state.tau + t) for t in (0, horizon].

    Dense scan on ``grid`` points, then golden-section refinement inside the
    bracketing grid cells. Ties go to the earlier minimum. When O rises over
    the first grid cell the cell is rescanned, so a minimum closer to t = 0
    than one cell is still found. Without a revival period, a scan that ends
    still descending with no interior minimum doubles the horizon (up to
    ``cap``). ``state`` is never modified.
    """
    if horizon is None:
        horizon = state.revival_period
        if horizon is None:
            raise ValueError("a horizon is required for states without revivals")
    if horizon <= 0:
        raise ValueError("horizon must be > 0")
    if grid < 8:
        raise ValueError("grid must be >= 8")
    f = lambda t: float(state.factor_curve([t])[0])
    f0 = state.factor()
    while True:
        ts = np.linspace(0.0, horizon, grid + 1)
        vals = np.empty(grid + 1)
        vals[0] = f0
        vals[1:] = state.factor_curve(ts[1:])
        if np.ptp(vals) < 1e-14:
            raise FlatObjective(f"factor varies by {np.ptp(vals):.1e} over (0, {horizon}]")
        brackets = _brackets(ts, vals)
        # Zoom into the first cell when the minimum may hide inside it.
        hi, v_hi = ts[1], vals[1]
        for _ in range(4):
            if v_hi < f0:
                break
            sub = np.linspace(0.0, hi, 65)
            sv = np.concatenate([[f0], state.factor_curve(sub[1:])])
            # Minima that do not beat O(0) are rounding noise around a state
            # already sitting at a minimum.
            found = [br for br in _brackets(sub, sv) if br[3] < f0 - 1e-13 * max(1.0, abs(f0))]
            if found:
                brackets += found
                break
            hi, v_hi = sub[1], sv[1]
        if brackets:
            break
        if state.revival_period is None and vals[-1] < vals[-2] and horizon < cap:
            horizon = min(2.0 * horizon, cap)
            continue
        raise FlatObjective("no interior minimum inside the horizon")
    # Inside its bracket a minimum lies below the grid value by at most the
    # local second difference, so candidates above that margin cannot win.
    brackets.sort(key=lambda br: (br[3], br[2]))
    vmin = brackets[0][3]
    best = []
    for a, b, tg, vg, curv in brackets:
        if vg > vmin + max(curv, brackets[0][4]):
            continue
        x, fx = golden_section(f, a, b, xtol)
        if fx > vg:
            x, fx = tg, vg
        best.append((fx, x))
    fmin = min(fx for fx, _ in best)
    x = min(x for fx, x in best if fx <= fmin + 1e-12)
    return x, f(x)


def classical_horizon(P: float, O: float, cap: float = CLASSICAL_HORIZON_CAP) -> float:
    """Parabolic-limit refocusing window 2 / (P sqrt(O))."""
    return min(2.0 / (abs(P) * math.sqrt(max(O, 1e-300))), cap)


@dataclass
class SqueezeTrace:
    engine: str
    P: float
    tau: list[float] = field(default_factory=list)
    delta_tau: list[float] = field(default_factory=list)
    O: list[float] = field(default_factory=list)
    u: list[float] = field(default_factory=list)
    w: list[float] = field(default_factory=list)

    def __len__(self):
        return len(self.O)

    @property
    def k(self) -> np.ndarray:
        return np.arange(1, len(self) + 1)

    def schedule(self) -> PulseSequence:
        return PulseSequence([self.P] * len(self), list(self.delta_tau), "accumulative")

    def to_csv(self) -> str:
        return csv_text(
            ["k", "tau_k", "delta_tau_k", "O_k", "u_k", "w_k"],
            [self.k, self.tau, self.delta_tau, self.O, self.u, self.w],
            [f"engine={self.engine} P={self.P!r}"],
        )


def _moments(state, P: float) -> tuple[float, float]:
    if getattr(state, "kind", None) == "quantum":
        from .quantum2d import momentum_variance, theta_squared

        return theta_squared(state), momentum_variance(state) / P**2
    return float(np.mean(state.theta**2)), float(np.mean(state.omega**2)) / P**2


def run_accumulative(
    state: Evolvable,
    P: float,
    n_kicks: int,
    horizon: float | None = None,
    grid: int = 4096,
    xtol: float = 1e-10,
    return_state: bool = False,
):
    """Kick with P, drift to the next minimum of O, repeat ``n_kicks`` times.

    ``tau`` in the trace holds kick times; ``delta_tau`` the wait after each
    kick; ``O``, ``u`` = <theta^2>, ``w`` = <omega^2>/P^2 are taken at the
    minimum. For classical ensembles the default horizon is
    2 / (P sqrt(O_current)).
    """
    if n_kicks < 1:
        raise ValueError("n_kicks must be >= 1")
    engine = getattr(state, "kind", "unknown")
    trace = SqueezeTrace(engine, P)
    O_cur = state.factor()
    for _ in range(n_kicks):
        trace.tau.append(state.tau)
        state = state.kick(P)
        h = horizon
        if h is None and state.revival_period is None:
            h = classical_horizon(P, O_cur)
        dt, O_new = next_minimum(state, h, grid, xtol)
        state = state.drift(dt)
        O_new = state.factor()
        if trace.O and O_new >= trace.O[-1]:
            raise MonotonicityViolation(f"O rose from {trace.O[-1]:.6g} to {O_new:.6g} at kick {len(trace) + 1}")
        u, w = _moments(state, P)
        trace.delta_tau.append(dt)
        trace.O.append(O_new)
        trace.u.append(u)
        trace.w.append(w)
        O_cur = O_new
    return (trace, state) if return_state else trace


def parabolic_recurrence(u0: float, w0: float, n: int) -> np.ndarray:
    """Iterate the parabolic-limit recurrence for n steps.

    dt_k = u_k / (u_k + w_k), u_{k+1} = u_k - u_k^2 / (u_k + w_k),
    w_{k+1} = w_k + u_k, with time in units of 1/P. Returns an (n, 3) array
    of (dt_k, u_k, w_k) for k = 1..n (u_1 = u0, w_1 = w0).
    """
    if not u0 > 0 or w0 < 0:
        raise ValueError("need u0 > 0 and w0 >= 0")
    out = np.empty((n, 3))
    u, w = float(u0), float(w0)
    for k in range(n):
        s = u + w
        out[k] = (u / s, u, w)
        # u - u^2/(u + w) written as u w/(u + w): same value, never negative
        u, w = u * w / s, w + u
    return out


def revival_shifted_schedule(trace: SqueezeTrace) -> PulseSequence:
    """Same kicks with one revival period T_rev = 4 pi added to every delay."""
    if trace.engine != "quantum":
        raise ValueError("revival shifting needs a quantum trace; classical rotors do not revive")
    from .quantum2d import T_REV

    return PulseSequence([trace.P] * len(trace), [d + T_REV for d in trace.delta_tau], "accumulative")
