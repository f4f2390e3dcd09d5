"""Classical linear rotors in 3D under delta-kicks from a field along z.

Each particle is stored as its unit axis ``n`` and the tangential velocity
of the axis ``v = dn/dtau`` (v . n = 0); this avoids the coordinate
singularities of (theta, phi, p_theta, p_phi) at the poles. In these terms

* the kick from the potential -eps(tau) cos(theta) adds P (z - (n.z) n),
  i.e. -P sin(theta) along e_theta, toward the north pole;
* free motion is uniform rotation along the great circle spanned by
  (n, v) at angular rate |v|;
* p_phi = (n x v) . z is conserved by both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

Z = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True, eq=False)
class ClassicalEnsemble3D:
    axis: np.ndarray
    angvel: np.ndarray
    tau: float = 0.0
    rng_seed: int | None = None

    def __len__(self):
        return self.axis.shape[0]

    def cos_theta(self) -> np.ndarray:
        return np.clip(self.axis[:, 2], -1.0, 1.0)

    def theta(self) -> np.ndarray:
        return np.arccos(self.cos_theta())

    def p_phi(self) -> np.ndarray:
        return np.cross(self.axis, self.angvel)[:, 2]


def _tangent(axis: np.ndarray, vec: np.ndarray) -> np.ndarray:
    return vec - np.sum(vec * axis, axis=1)[:, None] * axis


def sample_isotropic(n: int, sigma: float = 0.0, seed: int = 0) -> ClassicalEnsemble3D:
    """Axes uniform on the sphere; tangential velocities gaussian, sd sigma per component."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    rng = np.random.default_rng(seed)
    axis = rng.standard_normal((n, 3))
    axis /= np.linalg.norm(axis, axis=1)[:, None]
    # Projecting an isotropic 3D gaussian onto the tangent plane gives an
    # isotropic 2D gaussian with the same per-component sd.
    g = sigma * rng.standard_normal((n, 3))
    return ClassicalEnsemble3D(axis, _tangent(axis, g), 0.0, seed)


def kick3d(ens: ClassicalEnsemble3D, P: float) -> ClassicalEnsemble3D:
    """Impulse -P sin(theta) e_theta on every axis."""
    n = ens.axis
    return replace(ens, angvel=ens.angvel + P * (Z[None, :] - n[:, 2:3] * n))


def drift3d(ens: ClassicalEnsemble3D, dtau: float) -> ClassicalEnsemble3D:
    """Exact free rotation for a time dtau."""
    if dtau < 0:
        raise ValueError("dtau must be >= 0")
    if dtau == 0:
        return ens
    n, v = ens.axis, ens.angvel
    speed = np.linalg.norm(v, axis=1)
    moving = speed > 0
    u = np.zeros_like(v)
    u[moving] = v[moving] / speed[moving, None]
    ang = speed * dtau
    c = np.cos(ang)[:, None]
    s = np.sin(ang)[:, None]
    axis = n * c + u * s
    vel = speed[:, None] * (u * c - n * s)
    axis /= np.linalg.norm(axis, axis=1)[:, None]
    vel = _tangent(axis, vel)
    return replace(ens, axis=axis, angvel=vel, tau=ens.tau + dtau)


def meridian_angle(ens: ClassicalEnsemble3D, phi0: np.ndarray) -> np.ndarray:
    """Signed polar angle measured in each particle's initial meridian plane.

    For a cold kicked ensemble the motion stays in that plane and this equals
    the planar map angle (wrapped to [-pi, pi)).
    """
    radial = np.stack([np.cos(phi0), np.sin(phi0), np.zeros_like(phi0)], axis=1)
    return np.arctan2(np.sum(ens.axis * radial, axis=1), ens.axis[:, 2])


@dataclass
class SphereHistogram:
    cos_edges: np.ndarray
    values: np.ndarray
    phi_edges: np.ndarray | None = None

    @property
    def cos_centers(self) -> np.ndarray:
        return 0.5 * (self.cos_edges[1:] + self.cos_edges[:-1])

    def total(self) -> float:
        dcos = np.diff(self.cos_edges)
        if self.phi_edges is None:
            return float(np.sum(self.values * 2.0 * math.pi * dcos))
        dphi = np.diff(self.phi_edges)
        return float(np.sum(self.values * np.outer(dcos, dphi)))


def solid_angle_density(ens: ClassicalEnsemble3D, bins: int = 256, phi_bins: int | None = None) -> SphereHistogram:
    """Probability per unit solid angle on bins uniform in cos(theta)."""
    if bins < 8:
        raise ValueError("bins must be >= 8")
    ct = ens.cos_theta()
    N = len(ens)
    if phi_bins is None:
        counts, edges = np.histogram(ct, bins=bins, range=(-1.0, 1.0))
        return SphereHistogram(edges, counts / (N * 2.0 * math.pi * np.diff(edges)))
    phi = np.arctan2(ens.axis[:, 1], ens.axis[:, 0])
    counts, ce, pe = np.histogram2d(ct, phi, bins=(bins, phi_bins), range=((-1.0, 1.0), (-math.pi, math.pi)))
    return SphereHistogram(ce, counts / (N * np.outer(np.diff(ce), np.diff(pe))), pe)


def polar_angle_density(ens: ClassicalEnsemble3D, bins: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Probability per unit polar angle theta (azimuth integrated), on [0, pi].

    This is 2 pi sin(theta) times the solid-angle density, the same quantity
    the quantum code reports as 2 pi sin(theta) |Psi|^2. Returns
    (bin_centers, density).
    """
    counts, edges = np.histogram(ens.theta(), bins=bins, range=(0.0, math.pi))
    return 0.5 * (edges[1:] + edges[:-1]), counts / (len(ens) * np.diff(edges))
