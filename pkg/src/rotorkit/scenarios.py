"""Built-in reproduction scenarios and the pipelines that compute them.

Every pipeline takes a validated ExperimentConfig and returns the output
files as {filename: text}; nothing touches the disk here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import classical2d as c2
from . import classical3d as c3
from . import quantum2d as q2
from . import quantum3d as q3
from .csvout import csv_text
from .focal import solve_linearized
from .pulse_opt import compare_accumulative, make_ensemble, optimize_delays
from .pulses import PulseEnvelope, PulseSequence
from .squeeze import revival_shifted_schedule, run_accumulative


@dataclass(frozen=True)
class Scenario:
    name: str
    engine: str
    pipeline: str
    description: str
    defaults: dict = field(default_factory=dict)

    def config(self):
        from .config import ExperimentConfig

        d = {"scenario": self.name, "engine": self.engine, **self.defaults}
        d.setdefault("output_dir", "rotorkit-out/" + self.name.replace(":", "-"))
        return ExperimentConfig.from_dict(d)


_TF85 = 1.0 / 85.0
_TR = q2.T_REV

CATALOG: dict[str, Scenario] = {
    s.name: s
    for s in [
        Scenario(
            "figure:1",
            "quantum2d",
            "single_kick",
            "quantum angular density after one P=85 kick at nine times around focusing and fractional revivals",
            {
                "P": 85.0,
                "bins": 2048,
                "taus": [
                    0.5 * _TF85,
                    _TF85,
                    2 * _TF85,
                    _TF85 + _TR / 2,
                    _TF85 + _TR / 3,
                    _TF85 + _TR / 4,
                    1.8 * _TF85 + _TR / 2,
                    1.8 * _TF85 + _TR / 3,
                    1.8 * _TF85 + _TR / 4,
                ],
            },
        ),
        Scenario(
            "figure:1b",
            "quantum2d",
            "single_kick",
            "quantum angular density at the focal time of a P=85 kick",
            {"P": 85.0, "bins": 2048, "taus": [_TF85]},
        ),
        Scenario(
            "figure:2",
            "classical2d",
            "map",
            "classical map theta(theta0) at 0.5, 1, 3 and 10 focal times",
            {"P": 1.0, "bins": 1024, "taus": [0.5, 1.0, 3.0, 10.0]},
        ),
        Scenario(
            "figure:3",
            "quantum2d",
            "accumulate",
            "quantum accumulative squeezing, P=3, 100 kicks",
            {"P": 3.0, "n_kicks": 100, "basis": 360},
        ),
        Scenario(
            "figure:4",
            "classical2d",
            "single_kick",
            "classical spatial distribution after one kick, cold and warm, at 1 and 2.5 focal times",
            {"P": 1.0, "temperatures": [0.0, 1.0 / 6.0], "taus": [1.0, 2.5], "n_particles": 1_000_000},
        ),
        Scenario(
            "figure:5",
            "classical2d",
            "accumulate",
            "classical accumulative squeezing at several temperatures, 100 kicks",
            {
                "P": 1.0,
                "n_kicks": 100,
                "temperatures": [0.0, 1.0 / 6.0, 1.0 / 3.0, 2.0 / 3.0],
                "n_particles": 20_000,
                "grid": 512,
            },
        ),
        Scenario(
            "figure:6",
            "classical2d",
            "optimized_snapshots",
            "distributions along the optimized four-kick sequence",
            {"P": 1.0, "n_kicks": 4, "n_particles": 500_000, "bins": 256},
        ),
        Scenario(
            "figure:7",
            "classical3d",
            "sphere",
            "warm 3D classical ensemble after one kick at 0, 1, 3.3 and 5 focal times",
            {"P": 1.0, "temperatures": [0.1], "taus": [0.0, 1.0, 3.3, 5.0], "n_particles": 1_000_000, "bins": 64},
        ),
        Scenario(
            "figure:8",
            "quantum3d",
            "contour",
            "3D quantum rotor under a gaussian cos^2 pulse: density contour, <cos^2>, pole density, focal prediction",
            {
                "pulse": PulseEnvelope.gaussian(3e3, 0.01, 0.0).to_dict(),
                "tau_range": [-0.05, 0.5],
                "grid": 551,
                "bins": 181,
                "dt": 2e-5,
            },
        ),
        Scenario(
            "figure:table1",
            "classical2d",
            "table1",
            "minimal localization factor, accumulative vs optimized delays, 2 to 5 kicks",
            {"P": 1.0, "n_kicks": 5},
        ),
    ]
}


def list_scenarios() -> list[Scenario]:
    """Catalog in a fixed order."""
    return list(CATALOG.values())


def pipeline_for(cfg) -> str:
    return CATALOG[cfg.scenario].pipeline if cfg.scenario.startswith("figure:") else cfg.scenario


def _tag(x: float) -> str:
    return f"{x:.6g}"


def _circle_grid(bins: int) -> np.ndarray:
    # Includes theta = 0 exactly for even bins.
    return -math.pi + 2.0 * math.pi * np.arange(bins) / bins


def _single_kick(cfg) -> dict[str, str]:
    P = cfg.P
    taus = cfg.taus or [1.0 / abs(P)]
    seeds = f"seed={cfg.seed}"
    if cfg.engine == "quantum2d":
        s0 = q2.QuantumState2D.ground(n_max=cfg.basis, total_kick=P) if cfg.basis else q2.QuantumState2D.ground(total_kick=P)
        s = s0.kick(P)
        grid = _circle_grid(cfg.bins)
        states = [s.drift(t) for t in taus]
        dens = [q2.angular_density(st, grid) for st in states]
        return {
            "density.csv": csv_text(["theta", *(f"tau={_tag(t)}" for t in taus)], [grid, *dens]),
            "factor.csv": csv_text(
                ["tau", "O", "norm"], [taus, [st.factor() for st in states], [st.norm() for st in states]]
            ),
        }
    if cfg.engine == "classical2d":
        cols, names, rows = [], [], []
        centers = None
        for T in cfg.temperatures:
            ens = c2.sample_uniform(cfg.n_particles, T, cfg.seed).kick(P)
            for t in taus:
                e = ens.drift(t)
                centers, d = c2.histogram(e, cfg.bins)
                cols.append(d)
                names.append(f"sigma={_tag(T)};tau={_tag(t)}")
                rows.append((T, t, e.factor(), c2.localization_stderr(e)))
        r = np.array(rows)
        return {
            "density.csv": csv_text(["theta", *names], [centers, *cols], [seeds]),
            "factor.csv": csv_text(["sigma", "tau", "O", "O_stderr"], r.T, [seeds]),
        }
    if cfg.engine == "classical3d":
        cols, names, rows = [], [], []
        centers = None
        for T in cfg.temperatures:
            ens = c3.kick3d(c3.sample_isotropic(cfg.n_particles, T, cfg.seed), P)
            for t in taus:
                e = c3.drift3d(ens, t)
                centers, d = c3.polar_angle_density(e, cfg.bins)
                cols.append(d)
                names.append(f"sigma={_tag(T)};tau={_tag(t)}")
                rows.append((T, t, 1.0 - float(np.mean(e.cos_theta()))))
        r = np.array(rows)
        return {
            "density.csv": csv_text(["theta", *names], [centers, *cols], [seeds]),
            "factor.csv": csv_text(["sigma", "tau", "O"], r.T, [seeds]),
        }
    # quantum3d
    pulse = PulseEnvelope.from_dict(cfg.pulse) if cfg.pulse else PulseEnvelope.delta(P, 0.0)
    J_max = cfg.basis or q3.default_jmax(pulse.area())
    sup = pulse.support()
    t0 = min(sup[0], min(taus)) if sup else min(taus)
    st = q3.QuantumState3D.ground(J_max, t0)
    states = q3.trajectory(st, pulse, taus, cfg.dt)
    grid = np.linspace(0.0, math.pi, cfg.bins)
    dens = [q3.angular_density_3d(s, grid) for s in states]
    return {
        "density.csv": csv_text(["theta", *(f"tau={_tag(t)}" for t in taus)], [grid, *dens]),
        "factor.csv": csv_text(
            ["tau", "cos2", "pole_density", "norm"],
            [taus, [q3.alignment_factor(s) for s in states], [q3.pole_density(s) for s in states], [s.norm() for s in states]],
        ),
    }


def _map(cfg) -> dict[str, str]:
    theta0 = -math.pi + (np.arange(cfg.bins) + 0.5) * 2.0 * math.pi / cfg.bins
    taus = cfg.taus or [1.0 / abs(cfg.P)]
    cols = [c2.map_angle(theta0, cfg.P, t) for t in taus]
    return {"map.csv": csv_text(["theta0", *(f"tau={_tag(t)}" for t in taus)], [theta0, *cols])}


def _loglog_slope(k, O, kmin: int = 20) -> float:
    k = np.asarray(k, dtype=float)
    sel = k >= kmin
    if sel.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(k[sel]), np.log(np.asarray(O)[sel]), 1)[0])


def _accumulate(cfg) -> dict[str, str]:
    P = cfg.P
    if cfg.engine == "quantum2d":
        s0 = q2.QuantumState2D.ground(n_max=cfg.basis) if cfg.basis else q2.QuantumState2D.ground(total_kick=P)
        trace = run_accumulative(s0, P, cfg.n_kicks, grid=cfg.grid)
        out = {
            "trace.csv": trace.to_csv(),
            "schedule.json": trace.schedule().to_json(),
            "summary.json": json.dumps({"slope_k20": _loglog_slope(trace.k, trace.O)}, indent=2),
        }
        if cfg.revival_shift:
            seq = revival_shifted_schedule(trace)
            s, O = s0, []
            for p, d in seq:
                s = s.kick(p).drift(d)
                O.append(s.factor())
            out["shifted.json"] = seq.to_json()
            out["shifted.csv"] = csv_text(
                ["k", "O_k", "O_shifted", "abs_diff"], [trace.k, trace.O, O, np.abs(np.subtract(O, trace.O))]
            )
        return out
    traces = []
    for T in cfg.temperatures:
        ens = c2.sample_uniform(cfg.n_particles, T, cfg.seed)
        traces.append(run_accumulative(ens, P, cfg.n_kicks, grid=cfg.grid))
    k = traces[0].k
    names = [f"sigma={_tag(T)}" for T in cfg.temperatures]
    summary = {n: {"slope_k20": _loglog_slope(k, t.O), "O_final": t.O[-1]} for n, t in zip(names, traces)}
    return {
        "trace.csv": csv_text(
            ["k", *(f"O;{n}" for n in names), *(f"delta_tau;{n}" for n in names)],
            [k, *(t.O for t in traces), *(t.delta_tau for t in traces)],
            [f"seed={cfg.seed} n_particles={cfg.n_particles}"],
        ),
        "summary.json": json.dumps(summary, indent=2),
    }


def _optimize(cfg) -> dict[str, str]:
    T = cfg.temperatures[0]
    O_acc, O_opt, res = compare_accumulative(cfg.n_kicks, cfg.P, T, cfg.restarts, cfg.maxfev, cfg.seed, cfg.n_particles)
    d = json.loads(res.to_json())
    d["O_acc"] = O_acc
    return {
        "result.json": json.dumps(d, indent=2),
        "schedule.json": PulseSequence([cfg.P] * cfg.n_kicks, res.best_delays, "optimized").to_json(),
        "row.csv": csv_text(["n_kicks", "O_acc", "O_opt"], [[cfg.n_kicks], [O_acc], [O_opt]]),
    }


def _table1(cfg) -> dict[str, str]:
    T = cfg.temperatures[0]
    rows, delays = [], {}
    for n in range(2, cfg.n_kicks + 1):
        O_acc, O_opt, res = compare_accumulative(n, cfg.P, T, cfg.restarts, cfg.maxfev, cfg.seed, cfg.n_particles)
        rows.append((n, O_acc, O_opt))
        delays[str(n)] = res.best_delays
    r = np.array(rows)
    return {
        "table1.csv": csv_text(["n_kicks", "O_acc", "O_opt"], r.T, [f"P={cfg.P!r} sigma={T!r}"]),
        "delays.json": json.dumps(delays, indent=2),
    }


def _optimized_snapshots(cfg) -> dict[str, str]:
    P = cfg.P
    res = optimize_delays(cfg.n_kicks, P, 0.0, cfg.restarts, cfg.maxfev, cfg.seed)
    ens = c2.sample_uniform(cfg.n_particles, cfg.temperatures[0], cfg.seed)
    names, cols, centers = [], [], None
    for i, d in enumerate(res.best_delays):
        ens = ens.kick(P).drift(d)
        if d == 0.0 and i < len(res.best_delays) - 1:
            continue
        label = "final" if i == len(res.best_delays) - 1 else f"before_kick_{i + 2}"
        centers, h = c2.histogram(ens, cfg.bins)
        names.append(label)
        cols.append(h)
    return {
        "snapshots.csv": csv_text(["theta", *names], [centers, *cols], [f"seed={cfg.seed}"]),
        "schedule.json": PulseSequence([P] * cfg.n_kicks, res.best_delays, "optimized").to_json(),
        "result.json": res.to_json(),
    }


def _sphere(cfg) -> dict[str, str]:
    out = _single_kick(cfg)
    taus = cfg.taus or [1.0 / abs(cfg.P)]
    names, cols, centers = [], [], None
    for T in cfg.temperatures:
        ens = c3.kick3d(c3.sample_isotropic(cfg.n_particles, T, cfg.seed), cfg.P)
        for t in taus:
            h = c3.solid_angle_density(c3.drift3d(ens, t), bins=4 * cfg.bins)
            centers = h.cos_centers
            names.append(f"sigma={_tag(T)};tau={_tag(t)}")
            cols.append(h.values)
    out["solid_angle.csv"] = csv_text(["cos_theta", *names], [centers, *cols], [f"seed={cfg.seed}"])
    return out


def _contour(cfg) -> dict[str, str]:
    pulse = PulseEnvelope.from_dict(cfg.pulse)
    t_lo, t_hi = cfg.tau_range or [-0.05, 0.5]
    taus = np.linspace(t_lo, t_hi, cfg.grid)
    sup = pulse.support()
    t0 = min(sup[0], t_lo) if sup else t_lo
    J_max = cfg.basis or q3.default_jmax(pulse.area())
    states = q3.trajectory(q3.QuantumState3D.ground(J_max, t0), pulse, taus, cfg.dt)
    theta = np.linspace(0.0, math.pi, cfg.bins)
    dens = np.array([q3.angular_density_3d(s, theta) for s in states])
    out = {
        "grid.csv": csv_text(["index", "theta"], [np.arange(theta.size), theta]),
        "contour.csv": csv_text(
            ["tau", *(f"d{i}" for i in range(theta.size))],
            [taus, *dens.T],
            ["d<i> is 2 pi sin(theta_i) |Psi|^2 with theta_i from grid.csv"],
        ),
        "observables.csv": csv_text(
            ["tau", "cos2", "pole_density", "norm", "odd_J_population"],
            [
                taus,
                [q3.alignment_factor(s) for s in states],
                [q3.pole_density(s) for s in states],
                [s.norm() for s in states],
                [float(np.sum(np.abs(s.coeffs[1::2]) ** 2)) for s in states],
            ],
        ),
    }
    rep = solve_linearized(pulse, t0, t_hi, restoring="polarization")
    out["focal.json"] = rep.to_json()
    return out


def _focal(cfg) -> dict[str, str]:
    pulse = PulseEnvelope.from_dict(cfg.pulse)
    sup = pulse.support() or (0.0, 0.0)
    if cfg.tau_range:
        t0, t1 = cfg.tau_range
    else:
        t0 = sup[0]
        t1 = sup[1] + 10.0 / max(abs(pulse.area()), 1e-12)
    k = "polarization" if cfg.engine == "quantum3d" else "dipole"
    rep = solve_linearized(pulse, t0, t1, restoring=k)
    s = rep.samples
    return {
        "focal.json": rep.to_json(),
        "trajectory.csv": csv_text(["tau", "theta", "dtheta"], [s[:, 0], s[:, 1], s[:, 2]]),
    }


PIPELINES = {
    "single_kick": _single_kick,
    "map": _map,
    "accumulate": _accumulate,
    "optimize": _optimize,
    "table1": _table1,
    "optimized_snapshots": _optimized_snapshots,
    "sphere": _sphere,
    "contour": _contour,
    "focal": _focal,
}
