"""Finite-shot estimates of correlations and CHSH values.

Stream derivation: a root seed ``s`` drives ``numpy.random.Generator(PCG64(SeedSequence(s)))``.
Sub-streams (per CHSH setting, per calibration angle, per batch, per sweep
row) use the child seed ``derive_seed(s, i)``, the first 64-bit word of
``SeedSequence(s, spawn_key=(i,))``. SeedSequence hashing is
platform-independent, so datasets reproduce bit for bit across machines.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .bell import (
    CHSH_SIGNS,
    AngleSettings,
    prepare_bell,
)
from .qcore import (
    MeasurementDirection,
    RejectedInput,
    StateVector,
    ZZ_PARITY,
    apply_gate,
    measurement_unitary,
    sample_outcomes,
)


@dataclass(frozen=True)
class ShotPlan:
    shots: int
    seed: int
    antithetic: bool = False

    def __post_init__(self) -> None:
        if int(self.shots) != self.shots or self.shots < 1:
            raise RejectedInput(f"shots must be a positive integer, got {self.shots!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise RejectedInput("seed must fit in 64 unsigned bits")
        if self.antithetic and self.shots % 2:
            raise RejectedInput("antithetic sampling needs an even number of shots")


@dataclass(frozen=True)
class EstimateWithError:
    mean: float
    stderr: float
    shots: int


def derive_seed(seed: int, index: int) -> int:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def measured_state(alpha: float, theta1: float, theta2: float) -> StateVector:
    """Imperfect singlet rotated so that a z readout measures the two Oyz analyzers."""
    state = prepare_bell(alpha)
    state = apply_gate(state, measurement_unitary(MeasurementDirection.in_yz_plane(theta1)), 1)
    return apply_gate(state, measurement_unitary(MeasurementDirection.in_yz_plane(theta2)), 2)


def _parity_counts(state: StateVector, plan: ShotPlan) -> tuple[int, int]:
    """(number of +1 scores, number of -1 scores)."""
    outcomes = sample_outcomes(state, make_rng(plan.seed), plan.shots, plan.antithetic)
    minus = int(np.count_nonzero(ZZ_PARITY[outcomes] < 0))
    return plan.shots - minus, minus


def _estimate_from_counts(plus: int, minus: int) -> EstimateWithError:
    n = plus + minus
    mean = (plus - minus) / n
    if n == 1:
        # one +-1 draw carries no spread estimate; report the worst-case std
        return EstimateWithError(mean, 1.0, 1)
    var = n / (n - 1) * (1.0 - mean * mean)
    return EstimateWithError(mean, math.sqrt(max(var, 0.0) / n), n)


def _antithetic_estimate(state: StateVector, plan: ShotPlan) -> EstimateWithError:
    outcomes = sample_outcomes(state, make_rng(plan.seed), plan.shots, antithetic=True)
    scores = ZZ_PARITY[outcomes]
    half = plan.shots // 2
    pair_means = 0.5 * (scores[:half] + scores[half:])
    mean = float(np.sum(scores)) / plan.shots
    if half == 1:
        return EstimateWithError(mean, 1.0, plan.shots)
    stderr = float(np.std(pair_means, ddof=1)) / math.sqrt(half)
    return EstimateWithError(mean, stderr, plan.shots)


def estimate_correlation(
    alpha: float, theta1: float, theta2: float, plan: ShotPlan
) -> EstimateWithError:
    """Shot estimate of <sigma_a x sigma_b> with a, b in the Oyz plane.

    Each shot is scored (-1)^(bit1 + bit2). The error bar is the sample
    standard deviation over sqrt(shots). Scores are +-1, so the mean is an
    exact count ratio and does not depend on summation order.
    """
    state = measured_state(alpha, theta1, theta2)
    if plan.antithetic:
        return _antithetic_estimate(state, plan)
    return _estimate_from_counts(*_parity_counts(state, plan))


def estimate_correlation_batched(
    alpha: float,
    theta1: float,
    theta2: float,
    plan: ShotPlan,
    batches: int,
    workers: int | None = None,
) -> EstimateWithError:
    """Split ``plan.shots`` into batches on independent sub-streams and pool the counts.

    Batch ``i`` uses ``derive_seed(plan.seed, i)``. Counts are integers, so the
    pooled result is the same whether batches run in order or in parallel.
    """
    if batches < 1 or batches > plan.shots:
        raise RejectedInput("batches must be between 1 and shots")
    if plan.antithetic:
        raise RejectedInput("batched sampling does not support antithetic pairs")
    state = measured_state(alpha, theta1, theta2)
    sizes = [plan.shots // batches + (1 if i < plan.shots % batches else 0) for i in range(batches)]
    sub_plans = [ShotPlan(n, derive_seed(plan.seed, i)) for i, n in enumerate(sizes)]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda p: _parity_counts(state, p), sub_plans))
    else:
        counts = [_parity_counts(state, p) for p in sub_plans]
    plus = sum(c[0] for c in counts)
    minus = sum(c[1] for c in counts)
    return _estimate_from_counts(plus, minus)


def estimate_chsh(alpha: float, settings: AngleSettings, plan: ShotPlan) -> EstimateWithError:
    """Shot estimate of P(a,b) + P(a',b) + P(a',b') - P(a,b').

    ``plan.shots`` is the total budget, split evenly across the four setting
    pairs; pair ``i`` samples from ``derive_seed(plan.seed, i)``. Error bars
    add in quadrature.
    """
    if plan.shots % 4:
        raise RejectedInput("CHSH shots must split evenly over the four settings")
    per = plan.shots // 4
    if plan.antithetic and per % 2:
        raise RejectedInput("antithetic CHSH needs an even number of shots per setting")
    estimates = [
        estimate_correlation(alpha, t1, t2, replace(plan, shots=per, seed=derive_seed(plan.seed, i)))
        for i, (t1, t2) in enumerate(settings.pairs())
    ]
    mean = sum(sign * e.mean for sign, e in zip(CHSH_SIGNS, estimates))
    stderr = math.sqrt(sum(e.stderr**2 for e in estimates))
    return EstimateWithError(mean, stderr, plan.shots)


def calibration_dataset(
    alpha_true: float, thetas: Sequence[float], plan: ShotPlan
) -> list[tuple[float, float, float]]:
    """(theta, S estimate, stderr) rows with qubit 1 along z and qubit 2 at theta.

    Row ``i`` samples ``plan.shots`` shots from ``derive_seed(plan.seed, i)``.
    """
    if len(thetas) == 0:
        raise RejectedInput("calibration needs at least one angle")
    rows = []
    for i, theta in enumerate(thetas):
        est = estimate_correlation(
            alpha_true, 0.0, float(theta), replace(plan, seed=derive_seed(plan.seed, i))
        )
        rows.append((float(theta), est.mean, est.stderr))
    return rows
