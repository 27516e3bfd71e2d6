"""Bell-state preparation, measurement networks, CHSH evaluation and coupler calibration."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import least_squares, minimize

from .qcore import (
    PAULI_Y,
    PAULI_Z,
    GateOp,
    MeasurementDirection,
    RejectedInput,
    StateVector,
    ZZ_PARITY,
    expectation_pair,
    run_circuit,
)

TWO_PI = 2.0 * math.pi
TSIRELSON = 2.0 * math.sqrt(2.0)
CLASSICAL_BOUND = 2.0
# |S| must clear the classical bound by this much to count as a violation
VIOLATION_MARGIN = 1e-9


def canonical_alpha(alpha: float) -> float:
    """Reduce a coupler phase to [0, 2 pi)."""
    a = math.fmod(alpha, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    if a >= TWO_PI - 1e-12:
        a = 0.0
    return a


def angular_distance(a: float, b: float) -> float:
    d = abs(canonical_alpha(a) - canonical_alpha(b))
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class AngleSettings:
    """Analyzer angles in the Oyz plane for directions a, b, a', b'."""

    theta_a: float
    theta_b: float
    theta_a2: float
    theta_b2: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(t) for t in self.as_tuple()):
            raise RejectedInput("analyzer angles must be finite")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.theta_a, self.theta_b, self.theta_a2, self.theta_b2)

    def pairs(self) -> tuple[tuple[float, float], ...]:
        """(qubit-1 angle, qubit-2 angle) for P(a,b), P(a',b), P(a',b'), P(a,b')."""
        a, b, a2, b2 = self.as_tuple()
        return ((a, b), (a2, b), (a2, b2), (a, b2))

    def shifted(self, delta: float) -> "AngleSettings":
        return AngleSettings(*(t + delta for t in self.as_tuple()))


# a.b = b.a' = a'.b' = -b'.a = sqrt(2)/2
OPTIMAL_SETTINGS = AngleSettings(0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4)

CHSH_SIGNS = (1.0, 1.0, 1.0, -1.0)


def chsh_combination(correlations: Sequence[float]) -> float:
    return sum(s * c for s, c in zip(CHSH_SIGNS, correlations))


@dataclass(frozen=True)
class ChshResult:
    correlations: tuple[float, float, float, float]
    chsh_value: float
    violated: bool
    settings: AngleSettings
    alpha: float = 0.0


@dataclass(frozen=True)
class CalibrationFit:
    alpha_hat: float
    residual_rms: float
    num_points: int
    low_identifiability: bool = False


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 8
    grid_points: int = 4
    maxiter: int = 4000
    xatol: float = 1e-10
    fatol: float = 1e-14

    def __post_init__(self) -> None:
        if self.restarts < 1 or self.grid_points < 1 or self.maxiter < 1:
            raise RejectedInput("optimizer bounds must be positive")
        if self.xatol <= 0 or self.fatol <= 0:
            raise RejectedInput("optimizer tolerances must be positive")


class OptimizerError(RuntimeError):
    """The CHSH search did not converge; ``best`` holds the best point found."""

    def __init__(self, message: str, best: ChshResult | None = None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class ViolationInterval:
    alpha_lo: float
    alpha_hi: float
    tolerance: float
    scan: tuple[tuple[float, float], ...] = field(default=(), repr=False)


# ---------------------------------------------------------------- networks


def bell_preparation_ops(alpha: float) -> list[GateOp]:
    """H on both qubits, the coupler, then H on qubit 2 (coupler + H pair = CNOT at alpha = pi)."""
    return [
        GateOp("H", (1,)),
        GateOp("H", (2,)),
        GateOp("CP", (1, 2), alpha),
        GateOp("H", (2,)),
    ]


def prepare_bell(alpha: float) -> StateVector:
    """Imperfect singlet from injecting |11> into the preparation network.

    At alpha = pi this is (|01> - |10>)/sqrt(2).
    """
    return run_circuit(bell_preparation_ops(alpha), StateVector.basis("11"))


def five_gate_ops(alpha: float, theta: float) -> list[GateOp]:
    """Reduced network: prepares the pair and sets qubit 2's analyzer to (0, sin theta, cos theta).

    Qubit 1 is read along z. The phase shifter commutes with the coupler, so
    it may sit on either side of it.
    """
    return [
        GateOp("H", (1,)),
        GateOp("H", (2,)),
        GateOp("CP", (1, 2), alpha),
        GateOp("P", (2,), theta),
        GateOp("H", (2,)),
    ]


def five_gate_network(alpha: float, theta: float) -> StateVector:
    return run_circuit(five_gate_ops(alpha, theta), StateVector.basis("11"))


def aspect_ops(alpha: float, theta1: float, theta2: float) -> list[GateOp]:
    """Eight-gate network with independent analyzers chosen after the coupler.

    Qubit 1 gets H P(theta1) H and qubit 2 gets P(theta2) H, so the pair is read
    along (0, sin theta1, cos theta1) and (0, sin theta2, cos theta2).
    """
    return [
        GateOp("H", (1,)),
        GateOp("H", (2,)),
        GateOp("CP", (1, 2), alpha),
        GateOp("H", (1,)),
        GateOp("P", (1,), theta1),
        GateOp("H", (1,)),
        GateOp("P", (2,), theta2),
        GateOp("H", (2,)),
    ]


def aspect_network(alpha: float, theta1: float, theta2: float) -> StateVector:
    return run_circuit(aspect_ops(alpha, theta1, theta2), StateVector.basis("11"))


def zz_expectation(state: StateVector) -> float:
    return float(np.dot(ZZ_PARITY, state.probabilities()))


# ------------------------------------------------------------ correlations


def singlet_correlation(a: MeasurementDirection, b: MeasurementDirection) -> float:
    return -float(np.dot(a.vector, b.vector))


def correlation_analytic(alpha: float, theta: float) -> float:
    return -math.sin(alpha / 2) * math.sin(theta + alpha / 2)


def correlation_simulated(alpha: float, theta1: float, theta2: float) -> float:
    return expectation_pair(
        prepare_bell(alpha),
        MeasurementDirection.in_yz_plane(theta1),
        MeasurementDirection.in_yz_plane(theta2),
    )


def chsh_value(alpha: float, settings: AngleSettings) -> ChshResult:
    state = prepare_bell(alpha)
    corr = tuple(
        expectation_pair(
            state,
            MeasurementDirection.in_yz_plane(t1),
            MeasurementDirection.in_yz_plane(t2),
        )
        for t1, t2 in settings.pairs()
    )
    value = chsh_combination(corr)
    return ChshResult(
        correlations=corr,  # type: ignore[arg-type]
        chsh_value=value,
        violated=abs(value) > CLASSICAL_BOUND + VIOLATION_MARGIN,
        settings=settings,
        alpha=alpha,
    )


def _yz_correlation_tensor(state: StateVector) -> tuple[float, float, float, float]:
    """(Tyy, Tyz, Tzy, Tzz) with T_ij = <sigma_i x sigma_j> on ``state``."""
    psi = state.amps
    out = []
    for p1, p2 in itertools.product((PAULI_Y, PAULI_Z), repeat=2):
        out.append(float(np.real(np.vdot(psi, np.kron(p1, p2) @ psi))))
    return tuple(out)  # type: ignore[return-value]


class _ChshObjective:
    """Signed CHSH value from the simulated state's Oyz correlation tensor.

    The tensor is read once from the prepared state, after which every
    candidate setting costs a handful of float operations.
    """

    def __init__(self, state: StateVector):
        self.tyy, self.tyz, self.tzy, self.tzz = _yz_correlation_tensor(state)

    def corr(self, t1: float, t2: float) -> float:
        s1, c1, s2, c2 = math.sin(t1), math.cos(t1), math.sin(t2), math.cos(t2)
        return s1 * (self.tyy * s2 + self.tyz * c2) + c1 * (self.tzy * s2 + self.tzz * c2)

    def __call__(self, x: Sequence[float]) -> float:
        a, b, a2, b2 = x
        return (
            self.corr(a, b) + self.corr(a2, b) + self.corr(a2, b2) - self.corr(a, b2)
        )


def chsh_max(alpha: float, opt: OptimizerConfig | None = None) -> ChshResult:
    """Maximize the CHSH combination over the four Oyz analyzer angles.

    Nelder-Mead is restarted from the best ``opt.restarts`` points of a coarse
    grid over all four angles. The reported value is recomputed from the gate
    network at the optimum and is non-negative (flipping a and a' by pi
    flips the sign, so the signed maximum equals the maximum of |S|).
    """
    opt = opt or OptimizerConfig()
    objective = _ChshObjective(prepare_bell(alpha))
    grid = np.arange(opt.grid_points) * (TWO_PI / opt.grid_points)
    starts = sorted(
        itertools.product(grid, repeat=4), key=lambda x: -objective(x)
    )[: opt.restarts]

    best_x, best_f, any_converged = None, -math.inf, False
    for x0 in starts:
        res = minimize(
            lambda x: -objective(x),
            np.asarray(x0, dtype=float),
            method="Nelder-Mead",
            options={
                "maxiter": opt.maxiter,
                "xatol": opt.xatol,
                "fatol": opt.fatol,
                "initial_simplex": np.asarray(x0) + np.vstack([np.zeros(4), 0.4 * np.eye(4)]),
            },
        )
        any_converged |= bool(res.success)
        if -res.fun > best_f:
            best_x, best_f = res.x, -res.fun

    settings = AngleSettings(*(float(t) for t in best_x))
    result = chsh_value(alpha, settings)
    if not any_converged:
        raise OptimizerError(f"CHSH search did not converge at alpha={alpha!r}", best=result)
    return result


# -------------------------------------------------------- violation search


def _chsh_max_value(alpha: float, opt: OptimizerConfig) -> float:
    return chsh_max(alpha, opt).chsh_value


def violation_interval(
    step: float = 0.01,
    opt: OptimizerConfig | None = None,
    tol: float = 1e-4,
    workers: int | None = None,
) -> ViolationInterval:
    """Scan alpha over [0, 2 pi), then bisect the edges of {alpha : max |S| > 2}.

    Returns the first rising edge and the last falling edge of the predicate,
    each refined to ``tol``. With ``workers`` > 1 the scan points are farmed
    out to a process pool; every point is independent and deterministic, so
    the result is identical to the sequential scan.
    """
    if not (0 < step <= 0.01):
        raise RejectedInput("alpha step must be in (0, 0.01] rad")
    opt = opt or OptimizerConfig()

    def violates(a: float) -> bool:
        return chsh_max(a, opt).chsh_value > CLASSICAL_BOUND + VIOLATION_MARGIN

    n = int(math.ceil(TWO_PI / step - 1e-12))
    alphas = [k * step for k in range(n)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_chsh_max_value, alphas, itertools.repeat(opt), chunksize=16))
    else:
        values = [_chsh_max_value(a, opt) for a in alphas]
    flags = [v > CLASSICAL_BOUND + VIOLATION_MARGIN for v in values]
    if not any(flags):
        raise RejectedInput("no violating alpha found on the scan grid")
    if all(flags):
        raise RejectedInput("every scanned alpha violates; no interval boundary")

    first = flags.index(True)
    last = len(flags) - 1 - flags[::-1].index(True)
    if first == 0 or last == len(flags) - 1:
        raise RejectedInput("violation region wraps around alpha = 0")

    def bisect(outside: float, inside: float) -> float:
        while abs(inside - outside) > tol:
            mid = 0.5 * (inside + outside)
            if violates(mid):
                inside = mid
            else:
                outside = mid
        return 0.5 * (inside + outside)

    lo = bisect(alphas[first - 1], alphas[first])
    hi = bisect(alphas[last + 1], alphas[last])
    return ViolationInterval(lo, hi, tol, scan=tuple(zip(alphas, values)))


# -------------------------------------------------------------- calibration

CALIBRATION_GRID_STEP = math.pi / 64


def _calibration_arrays(
    data: Iterable[Sequence[float | None]],
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows = [tuple(r) for r in data]
    if len(rows) < 4:
        raise RejectedInput(f"calibration needs at least 4 points, got {len(rows)}")
    thetas = np.array([float(r[0]) for r in rows])
    s = np.array([float(r[1]) for r in rows])
    stderr = np.array(
        [float(r[2]) if len(r) > 2 and r[2] is not None else np.nan for r in rows]
    )
    if not (np.all(np.isfinite(thetas)) and np.all(np.isfinite(s))):
        raise RejectedInput("calibration data must be finite")
    folded = np.mod(thetas - thetas[0], math.pi)
    folded = np.minimum(folded, math.pi - folded)
    if np.all(folded < 1e-9):
        raise RejectedInput("all calibration angles are congruent mod pi; alpha is not identifiable")
    return thetas, s, stderr


def _calibration_weights(stderr: np.ndarray) -> np.ndarray:
    positive = stderr[np.isfinite(stderr) & (stderr > 0)]
    if positive.size == 0:
        return np.ones_like(stderr)
    # zero or missing errors are floored at the smallest reported one
    sigma = np.where(np.isfinite(stderr) & (stderr > 0), stderr, positive.min())
    return 1.0 / sigma**2


def calibrate_alpha(data: Iterable[Sequence[float | None]]) -> CalibrationFit:
    """Fit the coupler phase to (theta, S estimate, stderr) rows.

    Weighted least squares of S = -sin(alpha/2) sin(theta + alpha/2): a global
    grid over [0, 2 pi) in steps of pi/64, then a trust-region refinement
    bounded to the neighbouring grid cells. Weights are inverse variances when
    error bars are given, uniform otherwise.
    """
    thetas, s, stderr = _calibration_arrays(data)
    w = _calibration_weights(stderr)

    def model(alpha: float) -> np.ndarray:
        return -np.sin(alpha / 2) * np.sin(thetas + alpha / 2)

    def cost(alpha: float) -> float:
        r = s - model(alpha)
        return float(np.sum(w * r * r))

    grid = np.arange(128) * CALIBRATION_GRID_STEP
    costs = np.array([cost(a) for a in grid])
    a0 = float(grid[int(np.argmin(costs))])
    sqrt_w = np.sqrt(w)
    res = least_squares(
        lambda x: sqrt_w * (s - model(x[0])),
        x0=[a0],
        bounds=([a0 - CALIBRATION_GRID_STEP], [a0 + CALIBRATION_GRID_STEP]),
        xtol=1e-15,
        ftol=1e-15,
        gtol=1e-15,
    )
    alpha_hat = float(res.x[0]) if cost(float(res.x[0])) <= cost(a0) else a0
    alpha_hat = canonical_alpha(alpha_hat)
    resid = s - model(alpha_hat)
    rms = float(np.sqrt(np.mean(resid**2)))

    # data indistinguishable from S == 0 everywhere carries no entanglement signal
    noise = np.where(np.isfinite(stderr), stderr, 0.0)
    low_ident = bool(np.all(np.abs(s) <= np.maximum(2.0 * noise, 1e-12)))
    return CalibrationFit(alpha_hat, rms, len(thetas), low_ident)
