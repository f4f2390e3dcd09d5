"""Experiment configuration: one JSON file describes one run."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields

from .errors import ConfigError

ENGINES = ("quantum2d", "classical2d", "classical3d", "quantum3d")
SCENARIOS = ("single_kick", "accumulate", "optimize", "focal")

# Which engines each generic scenario accepts.
_SCENARIO_ENGINES = {
    "single_kick": ENGINES,
    "accumulate": ("quantum2d", "classical2d"),
    "optimize": ("classical2d",),
    "focal": ENGINES,
}

_FLOAT_LISTS = ("taus", "temperatures", "tau_range")


@dataclass
class ExperimentConfig:
    scenario: str
    engine: str
    P: float = 1.0
    n_kicks: int = 1
    taus: list[float] = field(default_factory=list)
    temperatures: list[float] = field(default_factory=lambda: [0.0])
    n_particles: int = 100_000
    seed: int = 0
    basis: int | None = None
    bins: int = 512
    grid: int = 4096
    pulse: dict | None = None
    tau_range: list[float] = field(default_factory=list)
    dt: float = 2e-5
    restarts: int = 20
    maxfev: int = 3000
    revival_shift: bool = False
    output_dir: str = "rotorkit-out"

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(d) - set(known))
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(unknown)}")
        for req in ("scenario", "engine"):
            if req not in d:
                raise ConfigError(f"{req}: required")
        kw = {}
        for k, v in d.items():
            kw[k] = _coerce(k, v)
        return cls(**kw)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON: {e}") from None
        return cls.from_dict(d)

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    def validate(self) -> "ExperimentConfig":
        """Raise ConfigError naming the offending field; returns self."""
        from .scenarios import CATALOG

        if self.engine not in ENGINES:
            raise ConfigError(f"engine: {self.engine!r} not in {ENGINES}")
        if self.scenario.startswith("figure:"):
            if self.scenario not in CATALOG:
                raise ConfigError(f"scenario: unknown figure {self.scenario!r}")
            want = CATALOG[self.scenario].engine
            if self.engine != want:
                raise ConfigError(f"engine: {self.scenario} runs on {want}, not {self.engine}")
        elif self.scenario in _SCENARIO_ENGINES:
            if self.engine not in _SCENARIO_ENGINES[self.scenario]:
                raise ConfigError(f"engine: scenario {self.scenario} does not support {self.engine}")
        else:
            raise ConfigError(f"scenario: {self.scenario!r} not in {SCENARIOS} or figure:<id>")
        if not math.isfinite(self.P) or self.P == 0:
            raise ConfigError("P: must be finite and nonzero")
        if self.n_kicks < 1:
            raise ConfigError("n_kicks: must be >= 1")
        if self.n_particles < 1:
            raise ConfigError("n_particles: must be >= 1")
        if not self.temperatures or any(not math.isfinite(t) or t < 0 for t in self.temperatures):
            raise ConfigError("temperatures: need at least one finite value >= 0")
        if any(not math.isfinite(t) or t < 0 for t in self.taus):
            raise ConfigError("taus: must be finite and >= 0")
        if self.bins < 8:
            raise ConfigError("bins: must be >= 8")
        if self.grid < 8:
            raise ConfigError("grid: must be >= 8")
        if self.basis is not None and self.basis < 2:
            raise ConfigError("basis: must be >= 2")
        if not self.dt > 0:
            raise ConfigError("dt: must be > 0")
        if self.restarts < 1 or self.maxfev < 1:
            raise ConfigError("restarts/maxfev: must be >= 1")
        if self.tau_range and (len(self.tau_range) != 2 or not self.tau_range[0] < self.tau_range[1]):
            raise ConfigError("tau_range: need [start, end] with start < end")
        if self.revival_shift and not (self.engine == "quantum2d" and self.scenario == "accumulate"):
            raise ConfigError("revival_shift: only quantum2d accumulate runs have revivals")
        if self.scenario == "optimize" and not 1 <= self.n_kicks <= 16:
            raise ConfigError("n_kicks: optimize supports 1..16 kicks")
        if self.scenario == "focal" and self.pulse is None:
            raise ConfigError("pulse: required for focal runs")
        if self.pulse is not None:
            from .pulses import PulseEnvelope

            try:
                PulseEnvelope.from_dict(self.pulse)
            except (TypeError, ValueError) as e:
                raise ConfigError(f"pulse: {e}") from None
        return self


def _coerce(name: str, v):
    try:
        if name in ("P", "dt"):
            return float(v)
        if name in ("n_kicks", "n_particles", "seed", "bins", "grid", "restarts", "maxfev"):
            if isinstance(v, bool) or (isinstance(v, float) and not v.is_integer()):
                raise TypeError
            return int(v)
        if name == "basis":
            return None if v is None else int(v)
        if name in _FLOAT_LISTS:
            return [float(x) for x in v]
        if name == "revival_shift":
            if not isinstance(v, bool):
                raise TypeError
            return v
        if name in ("scenario", "engine", "output_dir"):
            if not isinstance(v, str):
                raise TypeError
            return v
        if name == "pulse":
            if v is not None and not isinstance(v, dict):
                raise TypeError
            return v
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: bad value {v!r}") from None
    return v
