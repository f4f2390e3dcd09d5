"""Delay optimization for a fixed number of identical delta-kicks.

A DelayVector (d_1..d_n) means: kick, wait d_1, kick, wait d_2, ..., kick,
wait d_n, measure O. A zero delay merges two kicks into one of double
strength.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from .classical2d import (
    ClassicalEnsemble2D,
    ThermalSpec,
    localization_factor,
    quadrature_ensemble,
    sample_uniform,
)
from .errors import BudgetExhausted
from .squeeze import run_accumulative

QUADRATURE_POINTS = 4096
MERGE_SNAP = 1e-2  # in units of tau_f = 1/P


def _sigma(thermal) -> float:
    if isinstance(thermal, ThermalSpec):
        return thermal.sigma_omega
    return float(thermal)


def make_ensemble(P: float, thermal=0.0, n_particles: int = 100_000, seed: int = 0) -> ClassicalEnsemble2D:
    """Evaluation ensemble: midpoint quadrature when cold, Monte-Carlo otherwise."""
    if _sigma(thermal) == 0.0:
        return quadrature_ensemble(QUADRATURE_POINTS)
    return sample_uniform(n_particles, thermal, seed)


def _chain(ens: ClassicalEnsemble2D, delays, strengths) -> float:
    theta, omega = ens.theta, ens.omega
    for P, d in zip(strengths, delays):
        omega = omega - P * np.sin(theta)
        theta = theta + omega * d
    return float(1.0 - np.mean(np.cos(theta)))


def evaluate_sequence(
    delays,
    P: float = 1.0,
    thermal=0.0,
    n_particles: int = 100_000,
    seed: int = 0,
    strengths=None,
    ensemble: ClassicalEnsemble2D | None = None,
) -> float:
    """Localization factor after the kick/drift chain given by ``delays``.

    The same (n_particles, seed) always draws the same ensemble, so candidate
    delay vectors are compared with common random numbers.
    """
    if n_particles < 1:
        raise ValueError("n_particles must be >= 1")
    delays = np.asarray(delays, dtype=float)
    if np.any(delays < 0):
        raise ValueError("delays must be >= 0")
    strengths = [P] * delays.size if strengths is None else list(strengths)
    if len(strengths) != delays.size:
        raise ValueError("strengths and delays must have equal length")
    ens = make_ensemble(P, thermal, n_particles, seed) if ensemble is None else ensemble
    if delays.size == 0:
        return localization_factor(ens)
    return _chain(ens, delays, strengths)


@dataclass
class OptimizationResult:
    best_delays: list[float]
    best_O: float
    evaluations: int
    restarts: int
    seed: int
    n_kicks: int
    P: float
    sigma: float
    converged: bool = True
    history: list[float] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def accumulative_delays(n_kicks: int, P: float = 1.0, ensemble: ClassicalEnsemble2D | None = None) -> list[float]:
    ens = quadrature_ensemble(QUADRATURE_POINTS) if ensemble is None else ensemble
    trace = run_accumulative(ens, P, n_kicks, grid=1024)
    return list(trace.delta_tau)


def _starts(n: int, P: float, restarts: int, rng: np.random.Generator, acc: list[float]):
    yield np.asarray(acc, dtype=float)
    for r in range(1, restarts):
        x = rng.uniform(0.0, 4.0 / abs(P), n)
        if r % 3 == 0 and n > 1:
            # probe merged pulses
            x[rng.random(n) < 0.35] = 0.0
            x[-1] = max(x[-1], 0.1 / abs(P))
        yield x


def optimize_delays(
    n_kicks: int,
    P: float = 1.0,
    thermal=0.0,
    restarts: int = 20,
    maxfev: int = 3000,
    seed: int = 0,
    n_particles: int = 100_000,
) -> OptimizationResult:
    """Multistart Nelder-Mead over delays >= 0 (|x| reflects the boundary)."""
    if not 1 <= n_kicks <= 16:
        raise ValueError("n_kicks must be in [1, 16]")
    if restarts < 1 or maxfev < 1:
        raise ValueError("restarts and maxfev must be >= 1")
    sigma = _sigma(thermal)
    ens = make_ensemble(P, thermal, n_particles, seed)
    strengths = [P] * n_kicks
    evals = 0

    def obj(x):
        nonlocal evals
        evals += 1
        return _chain(ens, np.abs(x), strengths)

    rng = np.random.default_rng(seed)
    acc = accumulative_delays(n_kicks, P, ens)
    tau_f = 1.0 / abs(P)
    best_x, best_f, any_ok = None, math.inf, False
    history = []
    for x0 in _starts(n_kicks, P, restarts, rng, acc):
        step = np.where(x0 > 0, 0.1 * x0, 0.05 * tau_f)
        simplex = np.vstack([x0, x0 + np.diag(step)])
        res = minimize(
            obj,
            x0,
            method="Nelder-Mead",
            options={"maxfev": maxfev, "xatol": 1e-7 * tau_f, "fatol": 1e-12, "initial_simplex": simplex},
        )
        x, fx = np.abs(res.x), float(res.fun)
        # Delays that end up tiny are tried at exactly zero: a merged pulse
        # sits on the boundary where the simplex only creeps toward it.
        small = x < MERGE_SNAP * tau_f
        if small.any():
            xs = np.where(small, 0.0, x)
            fs = obj(xs)
            if fs <= fx + 1e-12:
                x, fx = xs, fs
        any_ok |= bool(res.success)
        history.append(fx)
        if fx < best_f:
            best_x, best_f = x, fx
    result = OptimizationResult(
        [float(v) for v in best_x], best_f, evals, restarts, seed, n_kicks, P, sigma, any_ok, history
    )
    if not any_ok:
        raise BudgetExhausted(f"no restart converged within maxfev={maxfev}", result)
    return result


def compare_accumulative(
    n_kicks: int,
    P: float = 1.0,
    thermal=0.0,
    restarts: int = 20,
    maxfev: int = 3000,
    seed: int = 0,
    n_particles: int = 100_000,
) -> tuple[float, float, OptimizationResult]:
    """(O_acc, O_opt, optimizer result) on one shared ensemble."""
    ens = make_ensemble(P, thermal, n_particles, seed)
    acc = accumulative_delays(n_kicks, P, ens)
    O_acc = _chain(ens, acc, [P] * n_kicks)
    opt = optimize_delays(n_kicks, P, thermal, restarts, maxfev, seed, n_particles)
    return O_acc, opt.best_O, opt
