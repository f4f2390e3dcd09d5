"""Classical ensembles of planar kicked rotors.

The same equations describe two-level atoms in a pulsed standing wave with
theta = 2 k_l x and omega = 2 k_l v: a kick sends omega -> omega - P sin theta
and free flight sends theta -> theta + omega * dtau.

For a cold ensemble kicked once at tau = 0 the map

    theta = theta0 - P tau sin(theta0)   (mod 2 pi)

is inverted branch by branch to give the density
f(theta) = sum_a f0 / |1 - P tau cos(theta0_a)|, with caustics where the
denominator vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate

from .errors import CausticProximity

TWO_PI = 2.0 * math.pi
CAUSTIC_EPS = 1e-8


_ANCHOR = 256


def wrap(theta):
    """Map angles to [-pi, pi)."""
    w = np.mod(np.asarray(theta, dtype=float) + math.pi, TWO_PI)
    w = np.where(w >= TWO_PI, w - TWO_PI, w)
    return w - math.pi


@dataclass(frozen=True)
class ThermalSpec:
    sigma_omega: float = 0.0
    distribution: str = "gaussian"

    def __post_init__(self):
        if not self.sigma_omega >= 0:
            raise ValueError("sigma_omega must be >= 0")
        if self.distribution != "gaussian":
            raise ValueError("only gaussian thermal distributions are supported")


@dataclass(frozen=True, eq=False)
class ClassicalEnsemble2D:
    theta: np.ndarray
    omega: np.ndarray
    tau: float = 0.0
    rng_seed: int | None = None
    kind: str = field(default="classical", init=False)

    def __post_init__(self):
        th = wrap(self.theta)
        om = np.asarray(self.omega, dtype=float)
        if th.shape != om.shape or th.ndim != 1:
            raise ValueError("theta and omega must be 1-D arrays of equal length")
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "omega", om)

    def __len__(self):
        return self.theta.size

    revival_period = None

    def kick(self, P: float) -> "ClassicalEnsemble2D":
        return kick(self, P)

    def drift(self, dtau: float) -> "ClassicalEnsemble2D":
        return drift(self, dtau)

    def factor(self) -> float:
        return localization_factor(self)

    def factor_curve(self, taus) -> np.ndarray:
        return localization_curve(self, taus)


def sample_uniform(n: int, thermal: ThermalSpec | float = 0.0, seed: int = 0) -> ClassicalEnsemble2D:
    """theta0 uniform on [-pi, pi), omega0 gaussian with sd sigma_omega."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not isinstance(thermal, ThermalSpec):
        thermal = ThermalSpec(float(thermal))
    rng = np.random.default_rng(seed)
    theta = rng.uniform(-math.pi, math.pi, n)
    z = rng.standard_normal(n)
    return ClassicalEnsemble2D(theta, thermal.sigma_omega * z, 0.0, seed)


def quadrature_ensemble(n: int) -> ClassicalEnsemble2D:
    """Cold ensemble on equally spaced initial angles (midpoint rule).

    Ensemble averages over it are the periodic trapezoid rule for the
    theta0 integral, so smooth observables converge spectrally instead of
    as 1/sqrt(n).
    """
    theta = -math.pi + (np.arange(n) + 0.5) * TWO_PI / n
    return ClassicalEnsemble2D(theta, np.zeros(n), 0.0, None)


def kick(ens: ClassicalEnsemble2D, P: float) -> ClassicalEnsemble2D:
    return replace(ens, omega=ens.omega - P * np.sin(ens.theta))


def drift(ens: ClassicalEnsemble2D, dtau: float) -> ClassicalEnsemble2D:
    if dtau < 0:
        raise ValueError("dtau must be >= 0")
    if dtau == 0:
        return ens
    return replace(ens, theta=wrap(ens.theta + ens.omega * dtau), tau=ens.tau + dtau)


def localization_factor(ens: ClassicalEnsemble2D) -> float:
    """O = 1 - mean(cos theta)."""
    return float(1.0 - np.mean(np.cos(ens.theta)))


def localization_stderr(ens: ClassicalEnsemble2D) -> float:
    """Monte-Carlo standard error of localization_factor."""
    c = np.cos(ens.theta)
    return float(np.std(c, ddof=1) / math.sqrt(c.size)) if c.size > 1 else 0.0


def localization_curve(ens: ClassicalEnsemble2D, taus) -> np.ndarray:
    """O after free flight of each duration in ``taus`` (ensemble untouched)."""
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    z = np.exp(1j * ens.theta)
    out = np.empty(taus.size)
    if taus.size > 8:
        d = np.diff(taus)
        if np.allclose(d, d[0], rtol=1e-12, atol=0.0):
            # Even grid: advance phases by one multiplication per step,
            # re-anchoring periodically so rounding does not accumulate.
            step = np.exp(1j * ens.omega * d[0])
            for j, t in enumerate(taus):
                if j % _ANCHOR == 0:
                    acc = z * np.exp(1j * ens.omega * t)
                else:
                    acc *= step
                out[j] = 1.0 - acc.sum().real / len(ens)
            return out
    chunk = max(1, int(2_000_000 // max(len(ens), 1)))
    for s in range(0, taus.size, chunk):
        t = taus[s : s + chunk]
        ph = np.exp(1j * np.outer(ens.omega, t))
        out[s : s + chunk] = 1.0 - (z @ ph).real / len(ens)
    return out


def histogram(ens: ClassicalEnsemble2D, bins: int = 512) -> tuple[np.ndarray, np.ndarray]:
    """Normalized angular density on ``bins`` equal bins of [-pi, pi).

    Returns (bin_centers, density).
    """
    if bins < 2:
        raise ValueError("bins must be >= 2")
    counts, edges = np.histogram(ens.theta, bins=bins, range=(-math.pi, math.pi))
    width = edges[1] - edges[0]
    return 0.5 * (edges[1:] + edges[:-1]), counts / (len(ens) * width)


def map_angle(theta0, P: float, tau: float, wrapped: bool = True):
    """Cold single-kick map theta(theta0)."""
    th = np.asarray(theta0, dtype=float) - P * tau * np.sin(theta0)
    return wrap(th) if wrapped else th


@dataclass
class BranchSet:
    tau: float
    P: float
    theta: float
    roots: np.ndarray
    derivs: np.ndarray
    weights: np.ndarray
    caustic: bool = False

    def __len__(self):
        return self.roots.size


def _bisect_all(f, a: np.ndarray, b: np.ndarray, fa: np.ndarray, xtol: float) -> np.ndarray:
    a = a.copy()
    b = b.copy()
    fa = fa.copy()
    while np.any(b - a > xtol):
        m = 0.5 * (a + b)
        fm = f(m)
        left = np.sign(fm) == np.sign(fa)
        a = np.where(left, m, a)
        fa = np.where(left, fm, fa)
        b = np.where(left, b, m)
    return 0.5 * (a + b)


def _dedupe_circle(x: np.ndarray, tol: float) -> np.ndarray:
    """Sorted angles in [-pi, pi) with near-duplicates (also across +-pi) removed.

    The root search scans the closed interval [-pi, pi], so one root can show
    up at both ends, or a hair outside after bisection.
    """
    x = np.sort(wrap(x))
    x = np.sort(np.where(x >= math.pi, x - TWO_PI, x))
    if x.size < 2:
        return x
    x = x[np.concatenate([[True], np.diff(x) > tol])]
    if x.size > 1 and x[-1] - x[0] > TWO_PI - tol:
        x = x[:-1]
    return x


def find_branches(tau: float, P: float, theta: float, xtol: float = 1e-12, strict: bool = False) -> BranchSet:
    """All theta0 in [-pi, pi) with theta0 - P tau sin(theta0) = theta (mod 2 pi).

    Sign changes are bracketed on 16*(1 + ceil(P tau)) intervals per
    2-pi image shift and refined by bisection. A root with
    |dtheta/dtheta0| < 1e-8 sets ``caustic`` and caps its weight; with
    ``strict`` it raises CausticProximity instead.
    """
    if tau <= 0:
        raise ValueError("tau must be > 0")
    s = P * tau
    theta = float(wrap(theta))
    nint = 16 * (1 + math.ceil(abs(s)))
    grid = np.linspace(-math.pi, math.pi, nint + 1)
    # Overhang both ends: a root exactly at +-pi hides between rounding
    # errors of sin(pi) and is then seen from neither side.
    grid[0] -= 1e-6
    grid[-1] += 1e-6
    crit = np.array([])
    if abs(s) >= 1.0:
        # Critical points as nodes: F is monotone between nodes, so roots
        # merging at a caustic cannot hide inside one cell.
        c = math.acos(1.0 / s)
        crit = np.unique([-c, c])
        grid = np.union1d(grid, crit)
    base = grid - s * np.sin(grid)
    # The unwrapped image of [-pi, pi) spans [-pi - |s|, pi + |s|].
    mmax = math.ceil((abs(s) + 2 * math.pi) / TWO_PI)
    roots = []
    for m in range(-mmax, mmax + 1):
        target = theta + TWO_PI * m
        g = base - target
        exact = grid[:-1][g[:-1] == 0.0]
        roots.extend(exact.tolist())
        sa, sb = np.sign(g[:-1]), np.sign(g[1:])
        idx = np.nonzero((sa * sb < 0))[0]
        if idx.size:
            f = lambda x, t=target: x - s * np.sin(x) - t
            roots.extend(_bisect_all(f, grid[idx], grid[idx + 1], g[idx], xtol).tolist())
    roots = _dedupe_circle(np.array(roots, dtype=float), 1e-11)
    # A target on a caustic makes a double root at a critical point, where
    # rounding decides whether F changes sign at all. Take the critical
    # point itself and drop bisection roots that collapsed onto it.
    for c in crit:
        g = math.remainder(c - s * math.sin(c) - theta, TWO_PI)
        if abs(g) < 1e-12 * (1.0 + abs(s)):
            roots = np.append(roots[np.abs(roots - c) > 1e-6], c)
    roots = _dedupe_circle(roots, 1e-11)
    derivs = 1.0 - s * np.cos(roots)
    mag = np.abs(derivs)
    caustic = bool(np.any(mag < CAUSTIC_EPS))
    if caustic and strict:
        raise CausticProximity(f"theta={theta:.6g} sits on a caustic at P*tau={s:.6g}")
    weights = 1.0 / np.maximum(mag, CAUSTIC_EPS)
    return BranchSet(tau, P, theta, roots, derivs, weights, caustic)


def caustic_angles(tau: float, P: float) -> np.ndarray:
    """Angles where the cold single-kick density diverges (empty if P tau < 1)."""
    s = abs(P * tau)
    if s < 1.0:
        return np.array([])
    c = math.acos(1.0 / s)
    th0 = np.array([-c, c]) if c > 0 else np.array([0.0])
    return np.sort(np.unique(map_angle(th0, P, tau)))


def classical_density(tau: float, P: float, grid) -> tuple[np.ndarray, np.ndarray]:
    """Branch-summed cold density f(theta) = (1/2pi) sum_a 1/|dtheta/dtheta0|.

    Returns (density, caustic_flags); flagged points carry capped weights and
    should be excluded from pointwise comparisons.
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    dens = np.empty(grid.size)
    flags = np.zeros(grid.size, dtype=bool)
    for i, th in enumerate(grid):
        b = find_branches(tau, P, th)
        dens[i] = b.weights.sum() / TWO_PI
        flags[i] = b.caustic
    return dens, flags


def density_integral(tau: float, P: float) -> float:
    """Integral of the branch-sum density over [-pi, pi).

    Inverse-square-root caustic singularities are handled by splitting the
    range at the caustic angles and integrating adaptively up to them.
    """
    pts = [-math.pi, *caustic_angles(tau, P).tolist(), math.pi]
    pts = sorted(set(pts))
    f = lambda th: find_branches(tau, P, th).weights.sum() / TWO_PI
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if b - a <= 0:
            continue
        val, _ = integrate.quad(f, a, b, epsabs=1e-11, epsrel=1e-11, limit=400)
        total += val
    return total


def bin_probabilities(tau: float, P: float, edges, nodes: int = 8) -> np.ndarray:
    """Probability of each bin under the branch-sum density (Gauss-Legendre).

    Only meaningful for bins that do not contain a caustic.
    """
    edges = np.asarray(edges, dtype=float)
    x, w = np.polynomial.legendre.leggauss(nodes)
    out = np.empty(edges.size - 1)
    for i, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        pts = 0.5 * (b - a) * x + 0.5 * (b + a)
        d, _ = classical_density(tau, P, pts)
        out[i] = 0.5 * (b - a) * np.dot(w, d)
    return out


def thermal_sigma_from_lattice(ratio_kT: float, convention: str = "mv2") -> float:
    """sigma_omega / P for an optical-lattice temperature k_B T = ratio * k_l^2 (int V dt)^2 / m.

    With theta = 2 k_l x the kick is P = 4 k_l^2 int V dt / m and
    sigma_omega = 2 k_l sigma_v. ``convention`` selects k_B T = m <v^2>
    ("mv2") or k_B T = m <v^2> / 2 ("half_mv2").
    """
    if convention == "mv2":
        return math.sqrt(ratio_kT) / 2.0
    if convention == "half_mv2":
        return math.sqrt(2.0 * ratio_kT) / 2.0
    raise ValueError(f"unknown convention {convention!r}")
