"""Physical waveguide parameters compiled into logical gate angles.

Units: nm, fs, meV. The effective mass is a ratio to the free electron mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from .qcore import GateOp, RejectedInput

HBAR = 658.2119569  # meV fs
ELECTRON_MASS = 5685.630  # meV fs^2 / nm^2, m_e c^2 / c^2 with c = 299.792458 nm/fs

TWO_PI = 2.0 * math.pi
SPECIAL_POINT_TOL = 1e-6
NO_REFLECTION_TOL = 1e-6


@dataclass(frozen=True)
class MaterialParams:
    effective_mass_ratio: float

    def __post_init__(self) -> None:
        if not 0.0 < self.effective_mass_ratio < 10.0:
            raise RejectedInput("effective mass ratio must lie in (0, 10)")

    @property
    def mass(self) -> float:
        return self.effective_mass_ratio * ELECTRON_MASS


GAAS = MaterialParams(0.067)


@dataclass(frozen=True)
class WavePacket:
    energy: float
    wave_vector: float
    group_velocity: float
    wavelength: float


def wave_vector(energy: float, mat: MaterialParams) -> float:
    return math.sqrt(2.0 * mat.mass * energy) / HBAR


def wavepacket_from_energy(energy: float, mat: MaterialParams) -> WavePacket:
    if not (math.isfinite(energy) and energy > 0):
        raise RejectedInput(f"energy must be positive, got {energy!r} meV")
    k = wave_vector(energy, mat)
    return WavePacket(energy, k, HBAR * k / mat.mass, TWO_PI / k)


def transfer_length(wp: WavePacket, tau: float) -> float:
    """Length for complete inter-wire transfer, v tau / 2."""
    if not tau > 0:
        raise RejectedInput("tunneling period must be positive")
    return wp.group_velocity * tau / 2.0


# ----------------------------------------------------------------- splitter


@dataclass(frozen=True)
class SplitterSpec:
    coupling_length: float
    tunneling_period: float

    def __post_init__(self) -> None:
        if not (self.coupling_length > 0 and self.tunneling_period > 0):
            raise RejectedInput("coupling length and tunneling period must be positive")


@dataclass(frozen=True)
class SplitterResult:
    transfer_fraction: float  # L_c / L_t
    rotation_angle: float  # state 0 -> cos(r)|0> + sin(r)|1>
    transfer_probability: float
    classification: str  # balanced | not | off | generic


def classify_transfer_fraction(chi: float, tol: float = SPECIAL_POINT_TOL) -> str:
    reduced = math.fmod(chi, 2.0)
    for point, label in ((0.5, "balanced"), (1.0, "not"), (1.5, "balanced"), (2.0, "off"), (0.0, "off")):
        if abs(reduced - point) <= tol:
            return label
    return "generic"


def splitter_rotation(spec: SplitterSpec, wp: WavePacket) -> SplitterResult:
    """Rotation of a coupling window, normalized so L_c = L_t is a full transfer.

    The transferred population is sin^2(pi L_c / (2 L_t)): L_t/2 splits 50/50,
    L_t swaps the rails, 2 L_t returns the electron to its rail.
    """
    chi = spec.coupling_length / transfer_length(wp, spec.tunneling_period)
    r = 0.5 * math.pi * chi
    return SplitterResult(chi, r, math.sin(r) ** 2, classify_transfer_fraction(chi))


# ------------------------------------------------------------ phase shifters


@dataclass(frozen=True)
class PhaseWellSpec:
    depth: float  # V in meV; negative for a well, 0 < V < E for a step
    width: float  # nm
    mode: str = "well"

    def __post_init__(self) -> None:
        if self.mode not in ("well", "step"):
            raise RejectedInput(f"mode must be 'well' or 'step', got {self.mode!r}")
        if not self.width > 0:
            raise RejectedInput("width must be positive")
        if self.mode == "well" and self.depth > 0:
            raise RejectedInput("a well needs V <= 0; use mode='step' for a barrier")


@dataclass(frozen=True)
class WellResult:
    phase: float
    reflection_ok: bool
    region_wave_vector: float
    half_wavelengths: float  # width in units of the region half wavelength


def well_phase(spec: PhaseWellSpec, wp: WavePacket, mat: MaterialParams) -> WellResult:
    """Extra phase (k' - k) L picked up across the region, and the no-reflection verdict.

    The region is reflectionless when L is an integer number n >= 1 of half
    wavelengths pi / k'.
    """
    if spec.mode == "step" and not 0 < spec.depth < wp.energy:
        raise RejectedInput(
            f"step height must satisfy 0 < V < E (V={spec.depth}, E={wp.energy} meV)"
        )
    k_region = wave_vector(wp.energy - spec.depth, mat)
    phase = (k_region - wp.wave_vector) * spec.width if spec.depth != 0 else 0.0
    n = spec.width * k_region / math.pi
    n_int = round(n)
    ok = n_int >= 1 and abs(n - n_int) <= NO_REFLECTION_TOL * n_int
    return WellResult(phase, ok, k_region, n)


@dataclass(frozen=True)
class ABLoopSpec:
    flux: float  # in flux quanta

    def __post_init__(self) -> None:
        if not math.isfinite(self.flux):
            raise RejectedInput("flux must be finite")


def ab_phase(spec: ABLoopSpec) -> float:
    return TWO_PI * spec.flux


# ------------------------------------------------------------------ timing


@dataclass(frozen=True)
class TimingPlan:
    path_lengths: tuple[float, float]
    offsets: tuple[float, float]
    group_velocity: float
    tolerance: float

    def __post_init__(self) -> None:
        if not self.group_velocity > 0:
            raise RejectedInput("group velocity must be positive")
        if not self.tolerance > 0:
            raise RejectedInput("skew tolerance must be positive")


@dataclass(frozen=True)
class SyncResult:
    skew: float
    ok: bool
    arrival_times: tuple[float, float]


def check_synchronization(plan: TimingPlan) -> SyncResult:
    t = tuple(o + p / plan.group_velocity for o, p in zip(plan.offsets, plan.path_lengths))
    skew = abs(t[0] - t[1])
    return SyncResult(skew, skew <= plan.tolerance, t)  # type: ignore[arg-type]


# ----------------------------------------------------------------- compiler


@dataclass(frozen=True)
class DeviceParams:
    material: MaterialParams = GAAS
    energy: float = 10.0
    tunneling_period: float = 1000.0
    skew_tolerance: float = 1.0
    leads: tuple[float, float] = (0.0, 0.0)
    offsets: tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class LogicalGate:
    """A logical gate plus optional realization choices and geometry overrides.

    ``options`` may hold ``realization`` (well, step, ab), ``coupling_length``,
    ``depth``, ``width``, ``order`` (half wavelengths) or ``flux``.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    options: Mapping[str, Any] = field(default_factory=dict)
    name: str = ""

    @classmethod
    def from_op(cls, op: GateOp) -> "LogicalGate":
        return cls(op.kind, op.targets, None if op.kind == "H" else op.angle)


@dataclass(frozen=True)
class PhysicalElement:
    index: int
    element: str  # splitter | well | step | ab_loop | coulomb_coupler
    logical: str
    qubits: tuple[int, ...]
    geometry: dict[str, float]
    verdicts: dict[str, bool]
    length: float = 0.0
    name: str = ""

    @property
    def ok(self) -> bool:
        return all(self.verdicts.values())


class CompilationError(ValueError):
    def __init__(self, message: str, elements: Sequence[PhysicalElement] = ()):
        super().__init__(message)
        self.elements = list(elements)


def _wrap_phase(phi: float) -> float:
    return math.fmod(math.fmod(phi, TWO_PI) + TWO_PI, TWO_PI)


def _phase_match(realized: float, target: float) -> bool:
    d = _wrap_phase(realized - target)
    return min(d, TWO_PI - d) <= 1e-6


def design_well(phase0: float, wp: WavePacket, mat: MaterialParams, order: int | None = None) -> PhaseWellSpec:
    """Reflectionless well giving 0-rail phase ``phase0`` in [0, 2 pi).

    Across n half wavelengths the phase is n pi (1 - k/k'), so the smallest
    admissible order is floor(phase0 / pi) + 1.
    """
    n = order if order is not None else int(phase0 // math.pi) + 1
    if n < 1 or phase0 >= n * math.pi:
        raise RejectedInput(f"a well of order {n} cannot reach phase {phase0:.6g}")
    k_region = wp.wave_vector / (1.0 - phase0 / (n * math.pi))
    depth = wp.energy - (HBAR * k_region) ** 2 / (2.0 * mat.mass)
    return PhaseWellSpec(min(depth, 0.0), n * math.pi / k_region, "well")


def design_step(phase0: float, wp: WavePacket, mat: MaterialParams, order: int | None = None) -> PhaseWellSpec:
    """Reflectionless step (0 < V < E); it retards, so it realizes phase0 - 2 pi."""
    n = order if order is not None else 1
    if n < 1:
        raise RejectedInput("step order must be >= 1")
    lag = TWO_PI - phase0
    k_region = wp.wave_vector / (1.0 + lag / (n * math.pi))
    depth = wp.energy - (HBAR * k_region) ** 2 / (2.0 * mat.mass)
    return PhaseWellSpec(depth, n * math.pi / k_region, "step")


def _as_logical(gate: GateOp | LogicalGate) -> LogicalGate:
    return gate if isinstance(gate, LogicalGate) else LogicalGate.from_op(gate)


def _compile_splitter(gate: LogicalGate, wp: WavePacket, params: DeviceParams) -> tuple[str, dict, dict, float]:
    lt = transfer_length(wp, params.tunneling_period)
    lc = float(gate.options.get("coupling_length", lt / 2.0))
    res = splitter_rotation(SplitterSpec(lc, params.tunneling_period), wp)
    geom = {
        "coupling_length": lc,
        "transfer_length": lt,
        "transfer_fraction": res.transfer_fraction,
        "rotation_angle": res.rotation_angle,
    }
    return "splitter", geom, {"balanced": res.classification == "balanced"}, lc


def _compile_phase(gate: LogicalGate, wp: WavePacket, params: DeviceParams) -> tuple[str, dict, dict, float]:
    opts = gate.options
    realization = opts.get("realization", "well")
    # P(theta) on the 1-rail equals e^{i theta} P(-theta) on the 0-rail
    target = None
    if gate.angle is not None:
        target = _wrap_phase(-gate.angle if gate.kind == "P" else gate.angle)
    mat = params.material

    if realization == "ab":
        flux = float(opts["flux"]) if "flux" in opts else (target or 0.0) / TWO_PI
        realized = ab_phase(ABLoopSpec(flux))
        verdicts = {} if target is None else {"phase_match": _phase_match(realized, target)}
        return "ab_loop", {"flux": flux, "rail0_phase": realized}, verdicts, 0.0

    if realization not in ("well", "step"):
        raise CompilationError(f"{gate.name or gate.kind}: unknown phase realization {realization!r}")
    order = int(opts["order"]) if "order" in opts else None
    if "depth" in opts or "width" in opts:
        if not ("depth" in opts and "width" in opts):
            raise CompilationError(f"{gate.name or gate.kind}: give both depth and width, or neither")
        spec = PhaseWellSpec(float(opts["depth"]), float(opts["width"]), realization)
    else:
        if target is None:
            raise CompilationError(f"{gate.name or gate.kind}: phase gate needs an angle or explicit geometry")
        designer = design_well if realization == "well" else design_step
        spec = designer(target, wp, mat, order)
    res = well_phase(spec, wp, mat)
    verdicts = {"no_reflection": res.reflection_ok}
    if target is not None:
        verdicts["phase_match"] = _phase_match(res.phase, target)
    geom = {
        "depth": spec.depth,
        "width": spec.width,
        "half_wavelengths": res.half_wavelengths,
        "rail0_phase": res.phase,
    }
    return spec.mode, geom, verdicts, spec.width


def compile_network(
    network: Iterable[GateOp | LogicalGate], params: DeviceParams | None = None
) -> list[PhysicalElement]:
    """Map logical gates, in order, onto splitters, phase shifters and Coulomb couplers.

    H becomes a balanced coupling window, phase gates become a 0-rail well,
    step or Aharonov-Bohm loop, and CP becomes a Coulomb coupler whose arrival
    skew is checked against the electron paths laid down so far. Raises
    :class:`CompilationError` naming the first failing element; the error
    carries the full element list.
    """
    params = params or DeviceParams()
    wp = wavepacket_from_energy(params.energy, params.material)
    travelled = list(params.leads)
    elements: list[PhysicalElement] = []

    for i, raw in enumerate(network):
        gate = _as_logical(raw)
        label = gate.name or f"#{i + 1} {gate.kind}"
        try:
            if gate.kind == "H":
                kind, geom, verdicts, length = _compile_splitter(gate, wp, params)
            elif gate.kind in ("P", "P0"):
                kind, geom, verdicts, length = _compile_phase(gate, wp, params)
            elif gate.kind == "CP":
                if gate.angle is None:
                    raise CompilationError(f"{label}: Coulomb coupler needs alpha")
                sync = check_synchronization(
                    TimingPlan(
                        (travelled[0], travelled[1]),
                        params.offsets,
                        wp.group_velocity,
                        params.skew_tolerance,
                    )
                )
                kind = "coulomb_coupler"
                geom = {"alpha": gate.angle, "skew": sync.skew}
                verdicts = {"synchronized": sync.ok}
                length = 0.0
            else:
                raise CompilationError(f"{label}: no device realization for gate {gate.kind!r}")
        except RejectedInput as exc:
            raise CompilationError(f"{label}: {exc}", elements) from exc

        for q in gate.qubits:
            travelled[q - 1] += length
        elements.append(PhysicalElement(i, kind, gate.kind, gate.qubits, geom, verdicts, length, label))

    failed = [e for e in elements if not e.ok]
    if failed:
        bad = failed[0]
        which = ", ".join(k for k, v in bad.verdicts.items() if not v)
        raise CompilationError(f"{bad.name} ({bad.element}): failed {which}", elements)
    return elements
