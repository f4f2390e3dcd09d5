"""Linear molecule in the m = 0 sector under a cos^2(theta) (polarizability) pulse.

H = L^2/2 - eps(tau) cos^2(theta) in units hbar = I = 1, where eps is the
cycle-averaged field term E^2 (alpha_par - alpha_perp) I / (4 hbar^2); the
isotropic alpha_perp part only shifts the phase. The state is expanded in
Y_J0, J = 0..J_max.

The coupling <J|cos^2|J'> connects J to J and J +- 2 only, so even and odd J
never mix. Each parity block is diagonalized once; the potential factor
exp(+i eps dt C) of a Strang step is then exact for any eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import StepSizeError, TruncationError
from .pulses import PulseEnvelope

EDGE_TOL = 1e-12


def _cos_ladder(size: int) -> np.ndarray:
    """<J|cos theta|J'> for m = 0 on J = 0..size-1."""
    J = np.arange(1, size, dtype=float)
    a = J / np.sqrt((2.0 * J - 1.0) * (2.0 * J + 1.0))
    return np.diag(a, 1) + np.diag(a, -1)


def build_coupling(J_max: int) -> np.ndarray:
    """Matrix of <J,0|cos^2 theta|J',0> for J, J' = 0..J_max."""
    if J_max < 2:
        raise ValueError("J_max must be >= 2")
    # Square on a basis one larger so the last diagonal entry keeps its J_max+1 term.
    c = _cos_ladder(J_max + 2)
    return (c @ c)[: J_max + 1, : J_max + 1]


@lru_cache(maxsize=16)
def _eigensystem(J_max: int):
    C = build_coupling(J_max)
    blocks = []
    for parity in (0, 1):
        idx = np.arange(parity, J_max + 1, 2)
        w, v = np.linalg.eigh(C[np.ix_(idx, idx)])
        blocks.append((idx, w, v))
    return C, blocks


def default_jmax(area: float) -> int:
    """Cutoff for a pulse of integrated strength ``area``.

    The impulsive limit exp(i P cos^2) populates J up to about P; the margin
    keeps the edge population below 1e-12.
    """
    a = abs(area)
    return max(math.ceil(2.0 * math.sqrt(a)) + 40, math.ceil(a) + 8 * math.ceil(a ** (1.0 / 3.0)) + 40)


def legendre_y(J_max: int, x) -> np.ndarray:
    """Y_J0(theta) for J = 0..J_max at x = cos(theta); shape (len(x), J_max+1)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    P = np.empty((x.size, J_max + 1))
    P[:, 0] = 1.0
    if J_max >= 1:
        P[:, 1] = x
    for J in range(1, J_max):
        P[:, J + 1] = ((2 * J + 1) * x * P[:, J] - J * P[:, J - 1]) / (J + 1)
    J = np.arange(J_max + 1)
    return P * np.sqrt((2 * J + 1) / (4.0 * math.pi))


@dataclass(frozen=True, eq=False)
class QuantumState3D:
    coeffs: np.ndarray
    tau: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size < 3:
            raise ValueError("coeffs must be 1-D with J_max >= 2")
        object.__setattr__(self, "coeffs", c)

    @property
    def J_max(self) -> int:
        return self.coeffs.size - 1

    @classmethod
    def ground(cls, J_max: int, tau: float = 0.0) -> "QuantumState3D":
        c = np.zeros(J_max + 1, dtype=complex)
        c[0] = 1.0
        return cls(c, tau)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def edge_population(self) -> float:
        # Both parities: a pure-parity state has a zero in one of the last two slots.
        return float(np.max(np.abs(self.coeffs[-2:]) ** 2))

    def resized(self, J_max: int) -> "QuantumState3D":
        c = np.zeros(J_max + 1, dtype=complex)
        m = min(J_max, self.J_max) + 1
        c[:m] = self.coeffs[:m]
        return replace(self, coeffs=c)


def _free(c: np.ndarray, dtau: float) -> np.ndarray:
    J = np.arange(c.size, dtype=float)
    return c * np.exp(-0.5j * J * (J + 1.0) * dtau)


def free_evolve3d(state: QuantumState3D, dtau: float) -> QuantumState3D:
    return replace(state, coeffs=_free(state.coeffs, dtau), tau=state.tau + dtau)


def _potential(c: np.ndarray, blocks, phase: float) -> np.ndarray:
    out = np.empty_like(c)
    for idx, w, v in blocks:
        out[idx] = v @ (np.exp(1j * phase * w) * (v.T @ c[idx]))
    return out


def impulsive_kick(state: QuantumState3D, P: float) -> QuantumState3D:
    """Apply exp(+i P cos^2 theta) instantaneously."""
    _, blocks = _eigensystem(state.J_max)
    return replace(state, coeffs=_potential(state.coeffs, blocks, P))


def _check_dt(envelope: PulseEnvelope, dt: float):
    if envelope.kind in ("gaussian", "step") and envelope.width / dt < 50:
        raise StepSizeError(f"dt={dt:g} gives fewer than 50 steps across the pulse width {envelope.width:g}")
    if dt * envelope.peak() >= 0.1:
        # ||cos^2|| <= 1
        raise StepSizeError(f"dt * eps_max = {dt * envelope.peak():.3g} must be < 0.1")


def _run(c: np.ndarray, envelope: PulseEnvelope, t0: float, t1: float, dt: float) -> np.ndarray:
    J_max = c.size - 1
    _, blocks = _eigensystem(J_max)
    if envelope.kind == "zero":
        return _free(c, t1 - t0)
    if envelope.kind == "delta":
        tk = envelope.center
        if t0 <= tk < t1:
            c = _free(c, tk - t0)
            c = _potential(c, blocks, envelope.amplitude)
            return _free(c, t1 - tk)
        return _free(c, t1 - t0)
    a, b = envelope.support()
    a, b = max(a, t0), min(b, t1)
    if b <= a:
        return _free(c, t1 - t0)
    c = _free(c, a - t0)
    nsteps = max(1, math.ceil((b - a) / dt - 1e-9))
    h = (b - a) / nsteps
    mids = a + (np.arange(nsteps) + 0.5) * h
    eps = envelope(mids)
    J = np.arange(c.size, dtype=float)
    half = np.exp(-0.25j * J * (J + 1.0) * h)
    full = half * half
    c = half * c
    for k in range(nsteps):
        c = _potential(c, blocks, eps[k] * h)
        c = (full if k < nsteps - 1 else half) * c
    return _free(c, t1 - b)


def propagate(
    state: QuantumState3D,
    envelope: PulseEnvelope,
    t0: float,
    t1: float,
    dt: float,
    check_step: bool = False,
    auto_grow: bool = True,
) -> QuantumState3D:
    """Evolve from t0 to t1 with Strang splitting inside the pulse.

    Field-free stretches are propagated exactly in one phase multiplication.
    With ``check_step`` the run is repeated at dt/2 and StepSizeError is
    raised if the alignment factor moves by more than 1e-6.
    """
    if t1 < t0:
        raise ValueError("t1 must be >= t0")
    if not envelope.is_impulsive and envelope.kind != "zero":
        _check_dt(envelope, dt)
    c = _run(state.coeffs, envelope, t0, t1, dt)
    out = replace(state, coeffs=c, tau=t1)
    if out.edge_population() > EDGE_TOL:
        if not auto_grow:
            raise TruncationError(f"edge population {out.edge_population():.3e} at J_max={state.J_max}")
        return propagate(state.resized(2 * state.J_max), envelope, t0, t1, dt, check_step, auto_grow)
    if check_step:
        fine = replace(state, coeffs=_run(state.coeffs, envelope, t0, t1, dt / 2), tau=t1)
        diff = abs(alignment_factor(fine) - alignment_factor(out))
        if diff > 1e-6:
            raise StepSizeError(f"halving dt changed <cos^2> by {diff:.2e}")
    return out


def trajectory(state: QuantumState3D, envelope: PulseEnvelope, taus, dt: float) -> list[QuantumState3D]:
    """States at each (increasing) time in ``taus``, starting from state.tau."""
    out = []
    t = state.tau
    for tau in np.asarray(taus, dtype=float):
        state = propagate(state, envelope, t, float(tau), dt)
        t = float(tau)
        out.append(state)
    return out


def alignment_factor(state: QuantumState3D) -> float:
    """<cos^2 theta>."""
    C, _ = _eigensystem(state.J_max)
    c = state.coeffs
    return float(np.vdot(c, C @ c).real)


def wavefunction3d(state: QuantumState3D, theta) -> np.ndarray:
    return legendre_y(state.J_max, np.cos(theta)) @ state.coeffs


def angular_density_3d(state: QuantumState3D, grid) -> np.ndarray:
    """2 pi sin(theta) |Psi(theta)|^2 on theta values in [0, pi]."""
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if np.any((grid < 0) | (grid > math.pi)):
        raise ValueError("grid must lie in [0, pi]")
    return 2.0 * math.pi * np.sin(grid) * np.abs(wavefunction3d(state, grid)) ** 2


def pole_density(state: QuantumState3D) -> float:
    """|Psi(theta = 0)|^2, probability per unit solid angle at the pole."""
    J = np.arange(state.J_max + 1)
    return float(abs(np.dot(np.sqrt((2 * J + 1) / (4.0 * math.pi)), state.coeffs)) ** 2)
