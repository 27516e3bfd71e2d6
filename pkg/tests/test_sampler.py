import math

import numpy as np
import pytest

from ballistic_bell import bell
from ballistic_bell.bell import OPTIMAL_SETTINGS, AngleSettings, correlation_analytic
from ballistic_bell.qcore import RejectedInput
from ballistic_bell.sampler import (
    ShotPlan,
    calibration_dataset,
    derive_seed,
    estimate_chsh,
    estimate_correlation,
    estimate_correlation_batched,
    measured_state,
)

TSIRELSON = 2 * math.sqrt(2)
POINTS = [(math.pi, 0.0, 0.6), (2.0, 0.3, 1.1), (1.0, 0.0, 2.5), (4.0, -0.5, 0.2), (math.pi / 2, 0.0, 0.0)]


def test_equal_settings_at_pi_are_perfectly_anticorrelated():
    probs = measured_state(math.pi, 0.4, 0.4).probabilities()
    assert probs[0] < 1e-30 and probs[3] < 1e-30
    for seed in (0, 1, 99):
        est = estimate_correlation(math.pi, 0.4, 0.4, ShotPlan(1000, seed))
        assert est.mean == -1.0
        assert est.stderr == 0.0


def test_orthogonal_settings_unbiased():
    est = estimate_correlation(math.pi, 0.0, math.pi / 2, ShotPlan(100_000, 5))
    assert abs(est.mean) < 5 * est.stderr


def test_stderr_halves_when_shots_quadruple():
    def mean_err(n):
        return np.mean([estimate_correlation(2.0, 0.3, 1.1, ShotPlan(n, s)).stderr for s in range(20)])

    ratio = mean_err(1000) / mean_err(4000)
    assert abs(ratio - 2) < 0.2 * 2


def test_determinism_bit_exact():
    a = estimate_correlation(2.0, 0.3, 1.1, ShotPlan(5000, 123))
    b = estimate_correlation(2.0, 0.3, 1.1, ShotPlan(5000, 123))
    assert a == b
    assert estimate_correlation(2.0, 0.3, 1.1, ShotPlan(5000, 124)) != a


@pytest.mark.parametrize("alpha,t1,t2", POINTS[:4])
def test_unbiased_over_seeds(alpha, t1, t2):
    means = np.array([estimate_correlation(alpha, t1, t2, ShotPlan(10_000, s)).mean for s in range(100)])
    grand_err = means.std(ddof=1) / math.sqrt(means.size)
    assert abs(means.mean() - correlation_analytic(alpha, t2 - t1)) < 3 * grand_err


@pytest.mark.parametrize("alpha,t1,t2", POINTS[:4])
def test_stderr_is_honest(alpha, t1, t2):
    ests = [estimate_correlation(alpha, t1, t2, ShotPlan(10_000, s)) for s in range(100)]
    spread = np.std([e.mean for e in ests], ddof=1)
    reported = np.mean([e.stderr for e in ests])
    assert 0.7 <= spread / reported <= 1.3


def test_antithetic_estimator():
    est = estimate_correlation(2.0, 0.3, 1.1, ShotPlan(20_000, 8, antithetic=True))
    assert abs(est.mean - correlation_analytic(2.0, 0.8)) < 5 * est.stderr
    with pytest.raises(RejectedInput):
        ShotPlan(3, 1, antithetic=True)


def test_single_shot_estimate():
    est = estimate_correlation(2.0, 0.0, 0.0, ShotPlan(1, 3))
    assert est.mean in (-1.0, 1.0)
    assert est.stderr >= 0


def test_shot_plan_validation():
    with pytest.raises(RejectedInput):
        ShotPlan(0, 1)
    with pytest.raises(RejectedInput):
        ShotPlan(10, -1)


# ------------------------------------------------------------------ CHSH


def test_chsh_estimate_at_pi():
    est = estimate_chsh(math.pi, OPTIMAL_SETTINGS, ShotPlan(400_000, 2026))
    assert abs(abs(est.mean) - TSIRELSON) < 5 * est.stderr
    assert est.shots == 400_000


def test_chsh_estimate_at_zero():
    est = estimate_chsh(0.0, AngleSettings(0.2, 1.0, -0.7, 2.2), ShotPlan(40_000, 4))
    assert abs(est.mean) < 5 * est.stderr


def test_chsh_single_shot_per_setting():
    values = {estimate_chsh(2.3, OPTIMAL_SETTINGS, ShotPlan(4, s)).mean for s in range(40)}
    assert values <= {-4.0, -2.0, 0.0, 2.0, 4.0}


def test_chsh_needs_divisible_budget():
    with pytest.raises(RejectedInput):
        estimate_chsh(math.pi, OPTIMAL_SETTINGS, ShotPlan(10, 1))


def test_chsh_stderr_scaling():
    errs = [estimate_chsh(math.pi, OPTIMAL_SETTINGS, ShotPlan(n, 11)).stderr for n in (1000, 4000, 16_000)]
    for a, b in zip(errs, errs[1:]):
        assert abs(a / b - 2) < 0.2 * 2


# ----------------------------------------------------------- calibration


def test_calibration_dataset_converges_with_shots():
    thetas = np.linspace(0, 2 * math.pi, 8, endpoint=False)
    rows = calibration_dataset(2.0, thetas, ShotPlan(400_000, 1))
    for theta, s, err in rows:
        assert abs(s - correlation_analytic(2.0, theta)) < 5 * err + 1e-12


def test_calibration_dataset_reproducible():
    thetas = [0.0, 1.0, 2.0]
    assert calibration_dataset(1.0, thetas, ShotPlan(500, 9)) == calibration_dataset(1.0, thetas, ShotPlan(500, 9))
    with pytest.raises(RejectedInput):
        calibration_dataset(1.0, [], ShotPlan(10, 1))


def test_calibration_from_samples_over_20_seeds():
    thetas = np.arange(16) * 2 * math.pi / 16
    worst = max(
        bell.angular_distance(bell.calibrate_alpha(calibration_dataset(2.0, thetas, ShotPlan(10_000, s))).alpha_hat, 2.0)
        for s in range(20)
    )
    assert worst < 0.05


# --------------------------------------------------------------- batching


def test_derive_seed_is_stable():
    assert derive_seed(7, 0) == derive_seed(7, 0)
    assert len({derive_seed(7, i) for i in range(100)}) == 100
    assert 0 <= derive_seed(7, 3) < 2**64


def test_parallel_batches_equal_sequential_batches():
    plan = ShotPlan(50_000, 31)
    seq = estimate_correlation_batched(2.0, 0.3, 1.1, plan, batches=8)
    par = estimate_correlation_batched(2.0, 0.3, 1.1, plan, batches=8, workers=4)
    assert seq == par
    assert seq.shots == plan.shots


def test_batched_distribution_matches_single_stream():
    batched = [estimate_correlation_batched(2.0, 0.3, 1.1, ShotPlan(10_000, s), batches=5).mean for s in range(60)]
    single = [estimate_correlation(2.0, 0.3, 1.1, ShotPlan(10_000, 1000 + s)).mean for s in range(60)]
    pooled_err = math.sqrt(np.var(batched, ddof=1) / 60 + np.var(single, ddof=1) / 60)
    assert abs(np.mean(batched) - np.mean(single)) < 4 * pooled_err
    assert 0.6 < np.std(batched) / np.std(single) < 1.6
