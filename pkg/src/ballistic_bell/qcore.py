"""Exact state vectors and gates for one or two dual-rail qubits.

Basis order is |0>, |1> for one qubit and |00>, |01>, |10>, |11> for two,
with qubit 1 as the left bit. Qubits are labelled 1 and 2, as in circuit
diagrams. Gate products read right to left: the rightmost factor acts first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12
UNITARY_TOL = 1e-10

SQRT2_INV = 1.0 / np.sqrt(2.0)

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# (-1)^(bit1 + bit2) for |00>, |01>, |10>, |11>
ZZ_PARITY = np.array([1.0, -1.0, -1.0, 1.0])

_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


class RejectedInput(ValueError):
    """Raised when an argument violates an operation's precondition."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    amps: np.ndarray

    def __post_init__(self) -> None:
        amps = _frozen(self.amps).reshape(-1)
        if amps.size not in (2, 4):
            raise RejectedInput(f"expected 2 or 4 amplitudes, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise RejectedInput("amplitudes must be finite")
        norm2 = float(np.sum(np.abs(amps) ** 2))
        if abs(norm2 - 1.0) > NORM_TOL:
            raise RejectedInput(f"state is not normalized (|psi|^2 = {norm2!r})")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        """Computational basis state from a bit string such as ``"11"``."""
        if bits not in ("0", "1", "00", "01", "10", "11"):
            raise RejectedInput(f"invalid basis label {bits!r}")
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(amps)

    @property
    def num_qubits(self) -> int:
        return 1 if self.amps.size == 2 else 2

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.probabilities())))

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amps, other.amps))

    def equals_up_to_phase(self, other: "StateVector", tol: float = NORM_TOL) -> bool:
        if self.amps.size != other.amps.size:
            return False
        return abs(abs(self.overlap(other)) - 1.0) <= tol

    def __repr__(self) -> str:
        return f"StateVector({np.array2string(self.amps, precision=6)})"


@dataclass(frozen=True, eq=False)
class GateMatrix:
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = _frozen(self.matrix)
        if m.shape not in ((2, 2), (4, 4)):
            raise RejectedInput(f"gate must be 2x2 or 4x4, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise RejectedInput("gate entries must be finite")
        defect = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
        if defect > UNITARY_TOL:
            raise RejectedInput(f"gate is not unitary (max |M^dag M - I| = {defect:.3e})")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other: "GateMatrix") -> "GateMatrix":
        return GateMatrix(self.matrix @ other.matrix)

    def dagger(self) -> "GateMatrix":
        return GateMatrix(self.matrix.conj().T)


@dataclass(frozen=True)
class MeasurementDirection:
    """Analyzer axis n = (sin t cos p, sin t sin p, cos t)."""

    theta: float
    phi: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.theta) and np.isfinite(self.phi)):
            raise RejectedInput("direction angles must be finite")

    @classmethod
    def in_yz_plane(cls, theta: float) -> "MeasurementDirection":
        """Direction (0, sin theta, cos theta)."""
        return cls(theta, np.pi / 2)

    @property
    def vector(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])

    def pauli(self) -> np.ndarray:
        nx, ny, nz = self.vector
        return nx * PAULI_X + ny * PAULI_Y + nz * PAULI_Z


def hadamard() -> GateMatrix:
    return GateMatrix(SQRT2_INV * np.array([[1, 1], [1, -1]], dtype=complex))


def phase_shift(phi: float, rail: int = 1) -> GateMatrix:
    """Phase ``e^{i phi}`` on one rail: rail 1 gives diag(1, e^{i phi}), rail 0 diag(e^{i phi}, 1)."""
    if not np.isfinite(phi):
        raise RejectedInput("phase must be finite")
    if rail == 1:
        return GateMatrix(np.diag([1.0, np.exp(1j * phi)]))
    if rail == 0:
        return GateMatrix(np.diag([np.exp(1j * phi), 1.0]))
    raise RejectedInput(f"rail must be 0 or 1, got {rail!r}")


def controlled_phase(phi: float) -> GateMatrix:
    if not np.isfinite(phi):
        raise RejectedInput("phase must be finite")
    return GateMatrix(np.diag([1.0, 1.0, 1.0, np.exp(1j * phi)]))


def measurement_unitary(direction: MeasurementDirection) -> GateMatrix:
    """U = H P(-theta) H P(-phi - pi/2), so that U^dag sigma_z U = sigma_n."""
    h = hadamard()
    return h @ phase_shift(-direction.theta) @ h @ phase_shift(-direction.phi - np.pi / 2)


def _normalize_targets(targets: int | Sequence[int]) -> tuple[int, ...]:
    if isinstance(targets, (int, np.integer)):
        return (int(targets),)
    return tuple(int(t) for t in targets)


def embed(gate: GateMatrix, targets: int | Sequence[int], num_qubits: int) -> np.ndarray:
    """Full-register matrix of ``gate`` acting on ``targets`` (1-based)."""
    tgt = _normalize_targets(targets)
    if any(t not in range(1, num_qubits + 1) for t in tgt) or len(set(tgt)) != len(tgt):
        raise RejectedInput(f"invalid targets {tgt} for a {num_qubits}-qubit state")
    if gate.dim != 2 ** len(tgt):
        raise RejectedInput(f"{gate.dim}x{gate.dim} gate cannot act on {len(tgt)} qubit(s)")
    m = gate.matrix
    if num_qubits == 1:
        return m
    if len(tgt) == 1:
        return np.kron(m, PAULI_I) if tgt[0] == 1 else np.kron(PAULI_I, m)
    if tgt == (2, 1):
        return _SWAP @ m @ _SWAP
    return m


def apply_gate(state: StateVector, gate: GateMatrix, targets: int | Sequence[int]) -> StateVector:
    return StateVector(embed(gate, targets, state.num_qubits) @ state.amps)


def expectation_pair(
    state: StateVector, a: MeasurementDirection, b: MeasurementDirection
) -> float:
    """<sigma_a x sigma_b>, by rotating each qubit onto z and reading the ZZ parity."""
    if state.num_qubits != 2:
        raise RejectedInput("expectation_pair needs a two-qubit state")
    rotated = apply_gate(state, measurement_unitary(a), 1)
    rotated = apply_gate(rotated, measurement_unitary(b), 2)
    return float(np.dot(ZZ_PARITY, rotated.probabilities()))


def sample_outcome(state: StateVector, rng: np.random.Generator) -> int:
    """Draw one basis-state index from the Born distribution."""
    return int(sample_outcomes(state, rng, 1)[0])


def sample_outcomes(
    state: StateVector, rng: np.random.Generator, shots: int, antithetic: bool = False
) -> np.ndarray:
    """Draw ``shots`` basis-state indices by inverse-CDF sampling.

    With ``antithetic`` the uniforms come in pairs ``(u, 1 - u)``; ``shots``
    must then be even.
    """
    if shots < 1:
        raise RejectedInput("shots must be >= 1")
    cdf = np.cumsum(state.probabilities())
    cdf[-1] = 1.0
    if antithetic:
        if shots % 2:
            raise RejectedInput("antithetic sampling needs an even number of shots")
        u = rng.random(shots // 2)
        u = np.concatenate([u, 1.0 - u])
    else:
        u = rng.random(shots)
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, cdf.size - 1)


@dataclass(frozen=True)
class GateOp:
    """One logical gate in a network.

    ``kind`` is ``"H"``, ``"P"`` (1-rail phase), ``"P0"`` (0-rail phase) or
    ``"CP"`` (controlled phase on qubits 1 and 2).
    """

    kind: str
    targets: tuple[int, ...]
    angle: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", _normalize_targets(self.targets))
        if self.kind not in ("H", "P", "P0", "CP"):
            raise RejectedInput(f"unknown gate kind {self.kind!r}")
        expected = 2 if self.kind == "CP" else 1
        if len(self.targets) != expected:
            raise RejectedInput(f"{self.kind} acts on {expected} qubit(s), got {self.targets}")

    def matrix(self) -> GateMatrix:
        if self.kind == "H":
            return hadamard()
        if self.kind == "P":
            return phase_shift(self.angle, rail=1)
        if self.kind == "P0":
            return phase_shift(self.angle, rail=0)
        return controlled_phase(self.angle)


def run_circuit(ops: Iterable[GateOp], state: StateVector) -> StateVector:
    for op in ops:
        state = apply_gate(state, op.matrix(), op.targets)
    return state
