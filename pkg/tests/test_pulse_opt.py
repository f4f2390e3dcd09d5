import json
import math

import numpy as np
import pytest

from rotorkit.classical2d import drift, kick, localization_factor, localization_stderr, sample_uniform
from rotorkit.errors import BudgetExhausted
from rotorkit.pulse_opt import (
    accumulative_delays,
    compare_accumulative,
    evaluate_sequence,
    make_ensemble,
    optimize_delays,
)

SIGMA = 1 / 3


def _mc(delays, n, seed, P=1.0, sigma=SIGMA):
    e = sample_uniform(n, sigma, seed)
    for d in delays:
        e = drift(kick(e, P), d)
    return localization_factor(e), localization_stderr(e)


@pytest.fixture(scope="module")
def opt4():
    return optimize_delays(4, 1.0, 0.0, restarts=20, seed=0)


def test_single_kick_delay_scan():
    ens = make_ensemble(1.0)
    ds = np.linspace(1.5, 2.2, 701)
    O = np.array([evaluate_sequence([d], ensemble=ens) for d in ds])
    i = int(np.argmin(O))
    assert ds[i] == pytest.approx(1.84, abs=0.02)
    assert O[i] == pytest.approx(0.418, abs=1e-3)


@pytest.mark.parametrize("k", [1, 2, 5])
def test_zero_delays_leave_the_ensemble_unmoved(k):
    assert evaluate_sequence([0.0] * k) == pytest.approx(1.0, abs=1e-15)


def test_accumulative_pair():
    acc = accumulative_delays(2)
    assert evaluate_sequence(acc) == pytest.approx(0.33, abs=0.01)


def test_common_random_numbers():
    a = evaluate_sequence([1.0, 2.0], thermal=SIGMA, n_particles=5000, seed=4)
    b = evaluate_sequence([1.0, 2.0], thermal=SIGMA, n_particles=5000, seed=4)
    assert a == b


def test_evaluate_validation():
    with pytest.raises(ValueError):
        evaluate_sequence([1.0], n_particles=0)
    with pytest.raises(ValueError):
        evaluate_sequence([-1.0])
    with pytest.raises(ValueError):
        evaluate_sequence([1.0, 1.0], strengths=[1.0])


def test_two_kicks():
    assert optimize_delays(2, restarts=10).best_O <= 0.31 + 0.01


def test_four_kicks_merge_two_pulses(opt4):
    assert opt4.best_O <= 0.11 + 0.01
    assert min(opt4.best_delays) < 1e-3  # tau_f = 1 at P = 1
    assert evaluate_sequence(opt4.best_delays) == pytest.approx(opt4.best_O, abs=1e-14)


def test_five_kicks():
    assert optimize_delays(5, restarts=20).best_O <= 0.07 + 0.01


def test_three_kick_comparison():
    O_acc, O_opt, res = compare_accumulative(3)
    assert O_acc == pytest.approx(0.26, abs=0.01)
    assert O_opt <= 0.21
    assert O_opt <= O_acc


def test_one_kick_schedules_coincide():
    O_acc, O_opt, _ = compare_accumulative(1, restarts=5)
    assert O_opt == pytest.approx(O_acc, abs=1e-9)


def test_delays_scale_with_kick_strength():
    r = optimize_delays(2, P=4.0, restarts=10)
    assert r.best_O == pytest.approx(optimize_delays(2, restarts=10).best_O, abs=1e-7)


def test_temperature_never_helps(opt4):
    hot = optimize_delays(4, 1.0, SIGMA, restarts=6, seed=0, n_particles=20_000)
    assert hot.best_O >= opt4.best_O


def test_optimized_not_worse_than_accumulative_thermal():
    O_acc, O_opt, _ = compare_accumulative(3, 1.0, SIGMA, restarts=4, n_particles=10_000)
    assert O_opt <= O_acc


def test_reevaluation_with_fresh_seed():
    r = optimize_delays(3, 1.0, SIGMA, restarts=6, seed=1, n_particles=10_000)
    a = _mc(r.best_delays, 10_000, 1)
    b = _mc(r.best_delays, 100_000, 99)
    assert a[0] == pytest.approx(r.best_O, abs=1e-15)
    assert abs(b[0] - a[0]) < 3 * math.hypot(a[1], b[1])


def test_zero_strength_append():
    d = [1.2, 0.4, 2.0]
    base = evaluate_sequence(d, thermal=SIGMA, n_particles=3000)
    more = evaluate_sequence(d + [0.0], thermal=SIGMA, n_particles=3000, strengths=[1.0] * 3 + [0.0])
    assert more == base


def test_budget_exhausted_carries_best():
    with pytest.raises(BudgetExhausted) as e:
        optimize_delays(3, restarts=2, maxfev=5)
    assert e.value.result is not None and len(e.value.result.best_delays) == 3


def test_result_json(opt4):
    d = json.loads(opt4.to_json())
    assert d["best_delays"] == opt4.best_delays and d["n_kicks"] == 4


def test_argument_checks():
    with pytest.raises(ValueError):
        optimize_delays(0)
    with pytest.raises(ValueError):
        optimize_delays(17)
