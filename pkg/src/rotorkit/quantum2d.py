"""Planar quantum rotor driven by delta-kicks.

State: coefficients c_n of Psi(theta) = (2 pi)^(-1/2) sum_n c_n exp(i n theta)
on n = -n_max..n_max. Free flight multiplies c_n by exp(-i n^2 dtau / 2); a
kick of strength P multiplies Psi by exp(+i P cos theta), i.e. convolves the
coefficients with i^k J_k(P). With this sign the potential -eps(tau) cos theta
pushes the rotor toward theta = 0; negative P orients toward theta = pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .bessel import bessel_band
from .errors import TruncationError

T_REV = 4.0 * math.pi
EDGE_TOL = 1e-12
_DROP = 1e-30


def basis_cutoff(total_kick: float) -> int:
    """Default n_max for a history of kicks with summed |P| = total_kick."""
    p = math.ceil(abs(total_kick))
    return p + 4 * math.ceil(p ** (1.0 / 3.0)) + 32


@dataclass(frozen=True)
class KickSpec:
    strength: float
    tau: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.strength):
            raise ValueError("kick strength must be finite")


@dataclass(frozen=True, eq=False)
class QuantumState2D:
    coeffs: np.ndarray
    tau: float = 0.0
    edge_tolerance: float = EDGE_TOL
    truncation_safe: bool = True
    kind: str = field(default="quantum", init=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size % 2 != 1:
            raise ValueError("coeffs must be a 1-D array of odd length 2*n_max+1")
        object.__setattr__(self, "coeffs", c)

    @property
    def n_max(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def n(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    @classmethod
    def ground(cls, n_max: int | None = None, total_kick: float = 0.0) -> "QuantumState2D":
        """The s-state c_n = delta_{n0}."""
        n_max = basis_cutoff(total_kick) if n_max is None else int(n_max)
        c = np.zeros(2 * n_max + 1, dtype=complex)
        c[n_max] = 1.0
        return cls(c)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def edge_population(self) -> float:
        return float(abs(self.coeffs[0]) ** 2 + abs(self.coeffs[-1]) ** 2)

    def resized(self, n_max: int) -> "QuantumState2D":
        """Zero-pad (or crop) the basis to a new cutoff."""
        old = self.n_max
        c = np.zeros(2 * n_max + 1, dtype=complex)
        m = min(old, n_max)
        c[n_max - m : n_max + m + 1] = self.coeffs[old - m : old + m + 1]
        return replace(self, coeffs=c)

    def occupied_extent(self) -> int:
        """Largest |n| whose population exceeds 1e-30."""
        idx = np.nonzero(np.abs(self.coeffs) ** 2 > _DROP)[0]
        if idx.size == 0:
            return 0
        return int(max(abs(idx[0] - self.n_max), abs(idx[-1] - self.n_max)))

    # Evolvable protocol used by the squeezing scheduler.
    revival_period = T_REV

    def kick(self, P: float) -> "QuantumState2D":
        return apply_kick(self, KickSpec(P, self.tau))

    def drift(self, dtau: float) -> "QuantumState2D":
        return free_evolve(self, dtau)

    def factor(self) -> float:
        return orientation_factor(self)

    def factor_curve(self, taus) -> np.ndarray:
        return orientation_curve(self, taus)


def free_evolve(state: QuantumState2D, dtau: float) -> QuantumState2D:
    """Field-free propagation by dtau >= 0.

    Phases are applied with dtau reduced modulo the revival period, where
    exp(-i n^2 T_rev / 2) = 1 exactly, so long waits do not lose precision.
    """
    if dtau < 0:
        raise ValueError("dtau must be >= 0")
    n = state.n.astype(float)
    phase_time = math.fmod(dtau, T_REV)
    c = state.coeffs * np.exp(-0.5j * n * n * phase_time)
    return replace(state, coeffs=c, tau=state.tau + dtau)


def apply_kick(state: QuantumState2D, kick: KickSpec | float, auto_grow: bool = True) -> QuantumState2D:
    """c_n <- sum_m i^(n-m) J_(n-m)(P) c_m.

    With ``auto_grow`` the basis is enlarged beforehand so the kicked state
    fits; otherwise an edge population above the state's tolerance raises
    TruncationError.
    """
    if not isinstance(kick, KickSpec):
        kick = KickSpec(float(kick), state.tau)
    P = kick.strength
    if P == 0.0:
        return state
    if auto_grow:
        needed = basis_cutoff(state.occupied_extent() + abs(P))
        if needed > state.n_max:
            state = state.resized(needed)
    band = bessel_band(P)
    K = band.size // 2
    k = np.arange(-K, K + 1)
    kernel = band * (1j ** (k % 4))
    full = np.convolve(state.coeffs, kernel)
    c = full[K:-K] if K else full
    lost = float(np.sum(np.abs(full[:K]) ** 2) + np.sum(np.abs(full[-K:]) ** 2)) if K else 0.0
    out = replace(state, coeffs=c)
    edge = out.edge_population() + lost
    if edge > state.edge_tolerance:
        if not auto_grow:
            raise TruncationError(
                f"edge population {edge:.3e} exceeds {state.edge_tolerance:.1e} "
                f"(n_max={state.n_max}, P={P})"
            )
        # Occupied extent underestimated a long tail; grow and redo.
        return apply_kick(state.resized(2 * state.n_max), kick, auto_grow=True)
    return out


def _synthesis(n: np.ndarray, grid: np.ndarray) -> np.ndarray:
    return np.exp(1j * np.outer(grid, n)) / math.sqrt(2.0 * math.pi)


def wavefunction(state: QuantumState2D, grid) -> np.ndarray:
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    lo, hi = _support(state)
    n = state.n[lo:hi]
    c = state.coeffs[lo:hi]
    out = np.empty(grid.size, dtype=complex)
    for s in range(0, grid.size, 2048):
        out[s : s + 2048] = _synthesis(n, grid[s : s + 2048]) @ c
    return out


def angular_density(state: QuantumState2D, grid) -> np.ndarray:
    """|Psi(theta)|^2 on the given angles."""
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    return np.abs(wavefunction(state, grid)) ** 2


def _support(state: QuantumState2D) -> tuple[int, int]:
    idx = np.nonzero(np.abs(state.coeffs) ** 2 > _DROP)[0]
    if idx.size == 0:
        return 0, state.coeffs.size
    return int(idx[0]), int(idx[-1]) + 1


def mean_exp_itheta(state: QuantumState2D) -> complex:
    """<exp(i theta)> = sum_n conj(c_n) c_{n-1}."""
    c = state.coeffs
    return complex(np.vdot(c[1:], c[:-1]))


def orientation_factor(state: QuantumState2D) -> float:
    """O = 1 - <cos theta>, exact in the basis."""
    return 1.0 - mean_exp_itheta(state).real


def orientation_curve(state: QuantumState2D, taus) -> np.ndarray:
    """O(state.tau + t) for each free-flight delay t in ``taus``."""
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    lo, hi = _support(state)
    lo = max(lo - 1, 0)
    hi = min(hi + 1, state.coeffs.size)
    c = state.coeffs[lo:hi]
    n = state.n[lo:hi].astype(float)
    prod = np.conj(c[:-1]) * c[1:]
    # (n+1)^2 - n^2 = 2n + 1
    freq = 2.0 * n[:-1] + 1.0
    t = np.fmod(taus, T_REV)
    out = np.empty(taus.size)
    for s in range(0, taus.size, 512):
        ph = np.exp(-0.5j * np.outer(t[s : s + 512], freq))
        out[s : s + 512] = 1.0 - (ph @ prod).real
    return out


def theta_squared(state: QuantumState2D) -> float:
    """<theta^2> with theta taken in [-pi, pi)."""
    lo, hi = _support(state)
    c = state.coeffs[lo:hi]
    m = c.size
    k = np.arange(-(m - 1), m)
    kernel = np.empty(k.size)
    nz = k != 0
    kernel[nz] = 2.0 * np.where(k[nz] % 2 == 0, 1.0, -1.0) / k[nz] ** 2
    kernel[~nz] = math.pi**2 / 3.0
    # sum_{a,b} conj(c_a) c_b kernel[b - a]
    conv = np.convolve(c, kernel[::-1])[m - 1 : 2 * m - 1]
    return float(np.vdot(c, conv).real)


def momentum_variance(state: QuantumState2D) -> float:
    """<(-i d/dtheta)^2> = sum n^2 |c_n|^2."""
    n = state.n.astype(float)
    return float(np.sum(n * n * np.abs(state.coeffs) ** 2))


def evolve_sequence(state: QuantumState2D, kicks) -> QuantumState2D:
    """Apply (P, delay) pairs: kick then free flight."""
    for P, delay in kicks:
        state = free_evolve(apply_kick(state, P), delay)
    return state


def resonance_equivalence_check(
    P: float,
    N: int,
    spacing: float = T_REV,
    grid_points: int = 1024,
    tol: float = 1e-8,
    probe: float | None = None,
) -> bool:
    """True if N kicks spaced by ``spacing`` match one kick of N*P (density sup-norm).

    A kick only changes phases, so both states are compared after a common
    free flight ``probe`` (default: the focal time 1/(N|P|) of the single kick).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    total = abs(N * P)
    if probe is None:
        probe = 1.0 / total if total > 0 else 1.0
    s = QuantumState2D.ground(total_kick=total)
    for i in range(N):
        s = apply_kick(s, P)
        if i < N - 1:
            s = free_evolve(s, spacing)
    single = apply_kick(QuantumState2D.ground(total_kick=total), N * P)
    grid = -math.pi + 2.0 * math.pi * np.arange(grid_points) / grid_points
    a = angular_density(free_evolve(s, probe), grid)
    b = angular_density(free_evolve(single, probe), grid)
    return bool(np.max(np.abs(a - b)) < tol)
