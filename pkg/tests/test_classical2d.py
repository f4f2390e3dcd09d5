import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import j1

from rotorkit.classical2d import (
    ClassicalEnsemble2D,
    bin_probabilities,
    caustic_angles,
    classical_density,
    density_integral,
    drift,
    find_branches,
    histogram,
    kick,
    localization_factor,
    map_angle,
    quadrature_ensemble,
    sample_uniform,
    thermal_sigma_from_lattice,
    wrap,
)
from rotorkit.errors import CausticProximity
from rotorkit.squeeze import run_accumulative


def test_sampling_small_cold_is_reproducible():
    a, b = sample_uniform(4, 0.0, 7), sample_uniform(4, 0.0, 7)
    assert np.array_equal(a.theta, b.theta) and not np.any(a.omega)
    assert np.all((a.theta >= -math.pi) & (a.theta < math.pi))


def test_sampling_moments():
    n = 1_000_000
    cold = sample_uniform(n, 0.0, 1)
    assert abs(np.mean(np.cos(cold.theta))) < 3 / math.sqrt(n)
    warm = sample_uniform(n, 0.5, 2)
    assert abs(np.std(warm.omega) / 0.5 - 1) < 0.01


def test_kick_examples():
    ens = ClassicalEnsemble2D(np.array([0.0, math.pi / 2]), np.zeros(2))
    k = kick(ens, 85.0)
    assert k.omega[0] == 0.0 and k.omega[1] == pytest.approx(-85.0)
    assert np.array_equal(k.theta, ens.theta)


def test_cold_single_kick_orientation():
    n = 1_000_000
    ens = kick(sample_uniform(n, 0.0, 3), 85.0)
    at_focus = localization_factor(drift(ens, 1 / 85))
    assert abs(at_focus - (1 - j1(1.0))) < 3 / math.sqrt(n)
    assert 0.40 <= localization_factor(drift(ens, 1.84 / 85)) <= 0.44


def test_drift_zero_is_identity():
    ens = sample_uniform(100, 0.3, 4)
    assert drift(ens, 0.0) is ens


def test_small_angle_aberration():
    th0 = 0.01
    ens = drift(kick(ClassicalEnsemble2D(np.array([th0]), np.zeros(1)), 85.0), 1 / 85)
    # theta0 - sin(theta0) ~ theta0^3 / 6
    assert abs(ens.theta[0]) < 2e-7
    assert ens.theta[0] == pytest.approx(th0 - math.sin(th0), rel=1e-6)


def test_rainbow_pair_at_2p5():
    ens = drift(kick(sample_uniform(1_000_000, 0.0, 5), 1.0), 2.5)
    c, d = histogram(ens, 512)
    left, right = c[np.argmax(np.where(c < 0, d, 0))], c[np.argmax(np.where(c > 0, d, 0))]
    assert left < -0.3 and right > 0.3
    assert np.allclose(sorted([left, right]), caustic_angles(2.5, 1.0), atol=0.05)


def test_localization_limits():
    n = 100_000
    assert abs(localization_factor(sample_uniform(n, 0.0, 6)) - 1) < 3 / math.sqrt(n)
    assert localization_factor(ClassicalEnsemble2D(np.zeros(5), np.zeros(5))) == 0.0


def test_accumulative_slope_cold():
    trace = run_accumulative(sample_uniform(20_000, 0.0, 8), 1.0, 100, grid=512)
    k = trace.k
    sel = k >= 20
    slope = np.polyfit(np.log(k[sel]), np.log(np.array(trace.O)[sel]), 1)[0]
    assert -0.6 <= slope <= -0.4


def test_one_branch_before_focus():
    for th in np.linspace(-3.1, 3.1, 17):
        b = find_branches(0.5, 1.0, th)
        assert len(b) == 1 and not b.caustic


def test_focus_is_caustic():
    b = find_branches(1.0, 1.0, 0.0)
    assert b.caustic and np.any(np.abs(b.roots) < 1e-12)
    with pytest.raises(CausticProximity):
        find_branches(1.0, 1.0, 0.0, strict=True)


def test_three_branches_against_brute_force():
    # oracle: sign changes of theta0 - 3 sin(theta0) on 1e6 grid points
    g = np.linspace(-math.pi, math.pi, 1_000_001)
    f = g - 3.0 * np.sin(g)
    brute = int(np.count_nonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0) + np.count_nonzero(f[:-1] == 0))
    b = find_branches(3.0, 1.0, 0.0)
    assert brute == 3 and len(b) == 3


@given(st.floats(0.05, 8.0), st.floats(-math.pi, math.pi - 1e-9))
def test_branch_roots_solve_map(s, theta):
    b = find_branches(s, 1.0, theta)
    assert len(b) >= 1
    resid = np.angle(np.exp(1j * (map_angle(b.roots, 1.0, s, wrapped=False) - theta)))
    assert np.all(np.abs(resid) < 1e-9)
    assert np.all(b.weights > 0) and np.all(np.isfinite(b.weights))


@pytest.mark.parametrize("s", [0.5, 1.5, 2.5, 5.0])
def test_liouville_normalization(s):
    assert abs(density_integral(s, 1.0) - 1.0) < 1e-6


def test_density_before_focus_integrates():
    g = -math.pi + 2 * math.pi * (np.arange(2048) + 0.5) / 2048
    d, flags = classical_density(0.5, 1.0, g)
    assert not flags.any()
    assert abs(d.sum() * 2 * math.pi / g.size - 1) < 1e-6


def test_caustic_flags():
    _, flags = classical_density(1.0, 1.0, np.array([0.0, 0.5, -1.0]))
    assert flags.tolist() == [True, False, False]
    ang = caustic_angles(2.5, 1.0)
    assert ang.size == 2 and ang[0] == pytest.approx(-ang[1])
    _, flags = classical_density(2.5, 1.0, np.concatenate([ang, [0.0, 2.0]]))
    assert flags.tolist() == [True, True, False, False]


@pytest.mark.parametrize("s", [0.5, 1.5, 2.5, 5.0])
def test_monte_carlo_matches_branch_sum(s):
    n, bins = 10_000_000, 512
    ens = drift(kick(sample_uniform(n, 0.0, 11), 1.0), s)
    counts, edges = np.histogram(ens.theta, bins=bins, range=(-math.pi, math.pi))
    p = bin_probabilities(s, 1.0, edges)
    keep = np.ones(bins, dtype=bool)
    for a in caustic_angles(s, 1.0):
        i = int(np.searchsorted(edges, a)) - 1
        keep[max(i - 2, 0) : i + 3] = False
    z = (counts - n * p) / np.sqrt(n * p * (1 - p))
    z = z[keep]
    # 3 sigma for nearly every bin; with ~500 bins a few 3-sigma hits are
    # expected by chance, so allow 1% of them but nothing past 5 sigma.
    assert np.mean(np.abs(z) > 3) <= 0.01
    assert np.max(np.abs(z)) < 5


def test_energy_after_kick():
    n = 1_000_000
    ens = kick(sample_uniform(n, 0.0, 12), 3.0)
    assert abs(np.mean(ens.omega**2 / 2) - 9 / 4) < 3 * 9 / math.sqrt(n)


def test_histogram_examples():
    n = 1_000_000
    c, d = histogram(sample_uniform(n, 0.0, 13), 512)
    width = 2 * math.pi / 512
    sd = np.sqrt(n * width / (2 * math.pi)) / (n * width)
    assert np.all(np.abs(d - 1 / (2 * math.pi)) < 5 * sd)
    _, d1 = histogram(ClassicalEnsemble2D(np.array([0.3]), np.zeros(1)), 64)
    assert np.count_nonzero(d1) == 1
    c, d = histogram(drift(kick(sample_uniform(n, 0.0, 14), 2.0), 0.5), 512)
    assert abs(c[np.argmax(d)]) < 2 * width


def test_thermal_flattening():
    O = []
    for sig in (0.0, 0.1, 0.3, 0.6, 1.0):
        ens = drift(kick(sample_uniform(200_000, sig, 15), 1.0), 1.0)
        O.append(localization_factor(ens))
    assert all(b >= a for a, b in zip(O, O[1:]))


def test_caption_temperature_mapping():
    assert thermal_sigma_from_lattice(1 / 9) == pytest.approx(1 / 6)
    assert thermal_sigma_from_lattice(4 / 9) == pytest.approx(1 / 3)
    assert thermal_sigma_from_lattice(1 / 9, "half_mv2") == pytest.approx(math.sqrt(2) / 6)


def test_quadrature_ensemble_is_spectral():
    # cold O after one kick at tau has the closed form 1 - J1(P tau)
    for n in (64, 256):
        ens = drift(kick(quadrature_ensemble(n), 1.0), 0.7)
        assert abs(localization_factor(ens) - (1 - j1(0.7))) < 1e-13


@given(st.floats(-1e3, 1e3))
def test_wrap_range(x):
    w = wrap(x)
    assert -math.pi <= w < math.pi
    assert abs(math.remainder(w - x, 2 * math.pi)) < 1e-9


@pytest.mark.parametrize("theta", [-math.pi, -3.1415926535897927, 3.1415926535897927, math.pi])
@pytest.mark.parametrize("s", [0.5, 2.0, 7.3])
def test_branches_at_the_seam(s, theta):
    # theta0 = +-pi is a fixed point of the map for every s
    b = find_branches(s, 1.0, theta)
    assert len(b) >= 1
    assert np.min(np.abs(np.angle(np.exp(1j * (b.roots - math.pi))))) < 1e-12
    assert np.all((b.roots >= -math.pi) & (b.roots < math.pi))
