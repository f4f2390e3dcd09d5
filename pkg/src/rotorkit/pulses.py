"""Pulse envelopes eps(tau) and kick sequences."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import trapezoid

# exp(-x^2) < 3e-19 beyond |x| = 6.5
_GAUSS_REACH = 6.5


@dataclass(frozen=True)
class PulseEnvelope:
    """Dimensionless field strength eps(tau).

    kind: "gaussian" (amplitude * exp(-((tau - center)/width)^2)),
    "delta" (impulse of area ``amplitude`` at ``center``),
    "step" (``amplitude`` on [center, center + width)),
    "tabulated" (linear interpolation of ``table``; zero outside),
    "zero".
    """

    kind: str
    amplitude: float = 0.0
    width: float = 0.0
    center: float = 0.0
    table: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.kind not in ("gaussian", "delta", "step", "tabulated", "zero"):
            raise ValueError(f"unknown pulse kind {self.kind!r}")
        if self.kind in ("gaussian", "step") and not self.width > 0:
            raise ValueError("width must be > 0")
        if self.kind == "tabulated":
            t = np.asarray(self.table, dtype=float)
            if t.ndim != 2 or t.shape[1] != 2 or t.shape[0] < 2 or np.any(np.diff(t[:, 0]) <= 0):
                raise ValueError("table must be increasing (tau, eps) pairs")

    @classmethod
    def gaussian(cls, amplitude, width, center=0.0):
        return cls("gaussian", float(amplitude), float(width), float(center))

    @classmethod
    def delta(cls, strength, center=0.0):
        return cls("delta", float(strength), 0.0, float(center))

    @classmethod
    def step(cls, amplitude, duration, start=0.0):
        return cls("step", float(amplitude), float(duration), float(start))

    @classmethod
    def tabulated(cls, taus, values):
        return cls("tabulated", table=tuple(zip(map(float, taus), map(float, values))))

    @classmethod
    def zero(cls):
        return cls("zero")

    @property
    def is_impulsive(self) -> bool:
        return self.kind == "delta"

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.kind == "gaussian":
            return self.amplitude * np.exp(-(((tau - self.center) / self.width) ** 2))
        if self.kind == "step":
            on = (tau >= self.center) & (tau < self.center + self.width)
            return np.where(on, self.amplitude, 0.0)
        if self.kind == "tabulated":
            t = np.asarray(self.table)
            return np.interp(tau, t[:, 0], t[:, 1], left=0.0, right=0.0)
        # A delta has no finite pointwise value; its effect is the impulse.
        return np.zeros_like(tau)

    def area(self) -> float:
        if self.kind == "gaussian":
            return self.amplitude * self.width * math.sqrt(math.pi)
        if self.kind in ("delta",):
            return self.amplitude
        if self.kind == "step":
            return self.amplitude * self.width
        if self.kind == "tabulated":
            t = np.asarray(self.table)
            return float(trapezoid(t[:, 1], t[:, 0]))
        return 0.0

    def peak(self) -> float:
        if self.kind in ("gaussian", "step"):
            return abs(self.amplitude)
        if self.kind == "tabulated":
            return float(np.max(np.abs(np.asarray(self.table)[:, 1])))
        return 0.0

    def support(self) -> tuple[float, float] | None:
        """Interval outside which eps is zero (to double precision), or None."""
        if self.kind == "gaussian":
            r = _GAUSS_REACH * self.width
            return (self.center - r, self.center + r)
        if self.kind == "step":
            return (self.center, self.center + self.width)
        if self.kind == "tabulated":
            t = np.asarray(self.table)
            return (float(t[0, 0]), float(t[-1, 0]))
        if self.kind == "delta":
            return (self.center, self.center)
        return None

    def breakpoints(self) -> list[float]:
        """Times where eps or its derivatives jump; integrators stop there."""
        if self.kind == "step":
            return [self.center, self.center + self.width]
        if self.kind == "tabulated":
            return [float(x) for x in np.asarray(self.table)[:, 0]]
        if self.kind == "delta":
            return [self.center]
        if self.kind == "gaussian":
            return [self.center - _GAUSS_REACH * self.width, self.center, self.center + _GAUSS_REACH * self.width]
        return []

    def scaled(self, factor: float) -> "PulseEnvelope":
        """Same shape with eps multiplied by ``factor``."""
        if self.kind == "tabulated":
            return PulseEnvelope.tabulated([t for t, _ in self.table], [factor * v for _, v in self.table])
        return PulseEnvelope(self.kind, self.amplitude * factor, self.width, self.center, self.table)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["table"] = [list(r) for r in self.table]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PulseEnvelope":
        d = dict(d)
        d["table"] = tuple(tuple(r) for r in d.get("table", ()))
        return cls(**d)


@dataclass
class PulseSequence:
    """Ordered kicks: each kick of strength P is followed by a free flight ``delay``."""

    strengths: list[float] = field(default_factory=list)
    delays: list[float] = field(default_factory=list)
    provenance: str = "manual"

    def __post_init__(self):
        if len(self.strengths) != len(self.delays):
            raise ValueError("strengths and delays must have equal length")
        if any(d < 0 for d in self.delays):
            raise ValueError("delays must be >= 0")
        if self.provenance not in ("accumulative", "optimized", "manual"):
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def __len__(self):
        return len(self.delays)

    def __iter__(self):
        return iter(zip(self.strengths, self.delays))

    def kick_times(self, start: float = 0.0) -> np.ndarray:
        return start + np.concatenate([[0.0], np.cumsum(self.delays)[:-1]]) if self.delays else np.array([])

    def to_json(self) -> str:
        return json.dumps(
            {"provenance": self.provenance, "kicks": [{"P": p, "delay": d} for p, d in self]},
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "PulseSequence":
        d = json.loads(text)
        kicks = d["kicks"]
        return cls([k["P"] for k in kicks], [k["delay"] for k in kicks], d.get("provenance", "manual"))
