"""Focusing times from the small-angle equation theta'' + k eps(tau) theta = 0.

k is the small-angle restoring factor: 1 for a -eps cos(theta) potential,
2 for -eps cos^2(theta) (second derivative at theta = 0). The equation is
linear, so the zeros of theta(tau) do not depend on the starting angle; we
start from theta = theta0, theta' = 0 before the pulse and report every
zero crossing.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NoFocus
from .pulses import PulseEnvelope

RESTORING = {"dipole": 1.0, "polarization": 2.0}


@dataclass
class FocusReport:
    focal_times: list[float]
    slopes: list[float]
    pulse: dict
    restoring: float
    tau0: float
    tau_end: float
    nfev: int = 0
    nsteps: int = 0
    samples: np.ndarray | None = field(default=None, repr=False)

    def to_json(self) -> str:
        d = asdict(self)
        d.pop("samples")
        return json.dumps(d, indent=2)


def _bisect(f, a: float, b: float, fa: float, xtol: float) -> float:
    while b - a > xtol:
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def solve_linearized(
    pulse: PulseEnvelope,
    tau0: float,
    tau_end: float,
    tol: float = 1e-10,
    restoring: float | str = 1.0,
    theta0: float = 1.0,
    samples_per_step: int = 16,
) -> FocusReport:
    """Integrate the linearized equation and return all zeros of theta in [tau0, tau_end].

    RK45 with rtol = atol = tol/10, restarted at every pulse breakpoint; a delta
    pulse is applied as the jump theta' -> theta' - k P theta. Zeros are
    bracketed on the dense output and bisected to 1e-12.
    """
    if isinstance(restoring, str):
        restoring = RESTORING[restoring]
    k = float(restoring)
    if tau_end <= tau0:
        raise ValueError("tau_end must exceed tau0")
    sup = pulse.support()
    if sup is not None and sup[0] < tau0:
        raise ValueError("tau0 must precede the pulse onset")

    cuts = sorted({t for t in pulse.breakpoints() if tau0 < t < tau_end})
    edges = [tau0, *cuts, tau_end]
    max_step = np.inf
    if pulse.kind in ("gaussian",):
        max_step = pulse.width / 4.0
    elif pulse.kind == "tabulated":
        max_step = float(np.min(np.diff(np.asarray(pulse.table)[:, 0])))

    def rhs(t, y):
        return [y[1], -k * float(pulse(t)) * y[0]]

    y = np.array([theta0, 0.0])
    zeros, slopes = [], []
    nfev = nsteps = 0
    ts_all, ys_all = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        if pulse.is_impulsive and a == pulse.center:
            y = np.array([y[0], y[1] - k * pulse.amplitude * y[0]])
        if b <= a:
            continue
        sol = solve_ivp(rhs, (a, b), y, method="RK45", rtol=0.1 * tol, atol=0.1 * tol, dense_output=True, max_step=max_step)
        nfev += sol.nfev
        nsteps += sol.t.size - 1
        # Sample each accepted step finely so close zero pairs are bracketed.
        fine = np.unique(
            np.concatenate([np.linspace(t0, t1, samples_per_step + 1) for t0, t1 in zip(sol.t[:-1], sol.t[1:])])
        )
        th = sol.sol(fine)[0]
        ts_all.append(fine)
        ys_all.append(sol.sol(fine).T)
        f = lambda t: float(sol.sol(t)[0])
        for i in np.nonzero(np.sign(th[:-1]) * np.sign(th[1:]) < 0)[0]:
            z = _bisect(f, fine[i], fine[i + 1], th[i], 1e-12)
            zeros.append(z)
            slopes.append(float(sol.sol(z)[1]))
        for i in np.nonzero(th[1:-1] == 0.0)[0]:
            zeros.append(float(fine[i + 1]))
            slopes.append(float(sol.sol(fine[i + 1])[1]))
        y = sol.y[:, -1]

    if not zeros:
        raise NoFocus(f"no zero of theta in [{tau0}, {tau_end}]")
    order = np.argsort(zeros)
    keep = []
    for i in order:
        # A zero on a segment boundary is seen from both sides.
        if not keep or zeros[i] - zeros[keep[-1]] > 1e-12:
            keep.append(i)
    samples = np.column_stack([np.concatenate(ts_all), np.concatenate(ys_all)])
    return FocusReport(
        [float(zeros[i]) for i in keep],
        [slopes[i] for i in keep],
        pulse.to_dict(),
        k,
        tau0,
        tau_end,
        nfev,
        nsteps,
        samples,
    )
