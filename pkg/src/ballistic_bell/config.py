"""Device config files and angle literals.

Config layout: ``key = value`` lines, ``#`` comments, one ``[device]``
section and one ``[gate]`` section per logical gate in circuit order.

    [device]
    mass_ratio = 0.067
    energy = 10        # meV
    tau = 1000         # fs

    [gate]
    type = P
    qubit = 2
    theta = pi/4
    realization = well

``configparser`` is not used because it rejects repeated section names and
does not keep line numbers for individual keys.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

from .device import DeviceParams, LogicalGate, MaterialParams
from .qcore import RejectedInput

_ANGLE_RE = re.compile(
    r"^(?P<sign>[+-]?)\s*(?P<num>(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)?\s*\*?\s*(?P<pi>pi)?\s*(/\s*(?P<den>(\d+(\.\d*)?|\.\d+)))?$"
)


def parse_angle(text: str) -> float:
    """Radians from ``1.2``, ``pi``, ``-pi/2``, ``3pi/4``, ``0.5*pi`` and the like."""
    s = text.strip().lower()
    m = _ANGLE_RE.match(s)
    if not m or not (m.group("num") or m.group("pi")):
        raise ValueError(f"not an angle: {text!r}")
    value = float(m.group("num")) if m.group("num") else 1.0
    if m.group("pi"):
        value *= math.pi
    elif m.group("den") and not m.group("num"):
        raise ValueError(f"not an angle: {text!r}")
    if m.group("den"):
        den = float(m.group("den"))
        if den == 0:
            raise ValueError(f"division by zero in angle {text!r}")
        value /= den
    return -value if m.group("sign") == "-" else value


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (stop included when hit), a comma list, or one angle."""
    s = text.strip()
    if ":" in s:
        parts = s.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be start:stop:step, got {text!r}")
        start, stop, step = (parse_angle(p) for p in parts)
        if step <= 0:
            raise ValueError("grid step must be positive")
        if stop < start:
            raise ValueError("grid stop must not precede start")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + k * step for k in range(n)]
    values = [parse_angle(p) for p in s.split(",") if p.strip()]
    if not values:
        raise ValueError("empty grid")
    return values


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"field '{key}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.key = key


@dataclass
class _Section:
    name: str
    line: int
    entries: dict[str, tuple[str, int]]


_DEVICE_KEYS = {
    "mass_ratio", "energy", "tau", "skew_tolerance",
    "lead_q1", "lead_q2", "offset_q1", "offset_q2",
}
_GATE_KEYS = {
    "type", "qubit", "qubits", "theta", "alpha", "realization",
    "coupling_length", "depth", "width", "order", "flux", "name",
}
_ANGLE_KEYS = {"theta", "alpha"}


def _split_sections(text: str) -> list[_Section]:
    sections: list[_Section] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {raw.strip()!r}", lineno)
            name = line[1:-1].strip().lower()
            if name not in ("device", "gate"):
                raise ConfigError(f"unknown section [{name}]", lineno)
            if name == "device" and any(s.name == "device" for s in sections):
                raise ConfigError("duplicate [device] section", lineno)
            sections.append(_Section(name, lineno, {}))
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        if not sections:
            raise ConfigError("key outside of any section", lineno)
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.lower()
        sec = sections[-1]
        allowed = _DEVICE_KEYS if sec.name == "device" else _GATE_KEYS
        if key not in allowed:
            raise ConfigError(f"unknown key in [{sec.name}]", lineno, key)
        if key in sec.entries:
            raise ConfigError("duplicate key", lineno, key)
        sec.entries[key] = (value, lineno)
    return sections


def _number(sec: _Section, key: str, default: float | None = None) -> float | None:
    if key not in sec.entries:
        return default
    value, lineno = sec.entries[key]
    try:
        x = parse_angle(value) if key in _ANGLE_KEYS else float(value)
    except ValueError:
        raise ConfigError(f"not a number: {value!r}", lineno, key) from None
    if not math.isfinite(x):
        raise ConfigError(f"not finite: {value!r}", lineno, key)
    return x


def _device_params(sec: _Section | None) -> DeviceParams:
    if sec is None:
        return DeviceParams()
    d = DeviceParams()
    try:
        material = MaterialParams(_number(sec, "mass_ratio", d.material.effective_mass_ratio))
    except RejectedInput as exc:
        line = sec.entries.get("mass_ratio", ("", sec.line))[1]
        raise ConfigError(str(exc), line, "mass_ratio") from None
    params = DeviceParams(
        material=material,
        energy=_number(sec, "energy", d.energy),
        tunneling_period=_number(sec, "tau", d.tunneling_period),
        skew_tolerance=_number(sec, "skew_tolerance", d.skew_tolerance),
        leads=(_number(sec, "lead_q1", 0.0), _number(sec, "lead_q2", 0.0)),
        offsets=(_number(sec, "offset_q1", 0.0), _number(sec, "offset_q2", 0.0)),
    )
    for key, value in (("energy", params.energy), ("tau", params.tunneling_period), ("skew_tolerance", params.skew_tolerance)):
        if value <= 0:
            raise ConfigError("must be positive", sec.entries.get(key, ("", sec.line))[1], key)
    return params


def _gate(sec: _Section, index: int) -> LogicalGate:
    if "type" not in sec.entries:
        raise ConfigError("gate section needs a type", sec.line, "type")
    kind, type_line = sec.entries["type"]
    kind = kind.upper()
    if kind not in ("H", "P", "P0", "CP"):
        raise ConfigError(f"unknown gate type {kind!r}", type_line, "type")

    if kind == "CP":
        qubits_text, qline = sec.entries.get("qubits", ("1,2", sec.line))
        try:
            qubits = tuple(int(q) for q in qubits_text.split(","))
        except ValueError:
            raise ConfigError(f"bad qubit list {qubits_text!r}", qline, "qubits") from None
        if sorted(qubits) != [1, 2]:
            raise ConfigError("a coupler acts on qubits 1,2", qline, "qubits")
        angle = _number(sec, "alpha")
        if angle is None:
            raise ConfigError("coupler needs alpha", sec.line, "alpha")
    else:
        if "qubit" not in sec.entries:
            raise ConfigError("gate needs a qubit", sec.line, "qubit")
        qtext, qline = sec.entries["qubit"]
        if qtext not in ("1", "2"):
            raise ConfigError(f"qubit must be 1 or 2, got {qtext!r}", qline, "qubit")
        qubits = (int(qtext),)
        angle = _number(sec, "theta") if kind != "H" else None

    options: dict[str, object] = {}
    for key in ("coupling_length", "depth", "width", "flux"):
        if key in sec.entries:
            options[key] = _number(sec, key)
    if "order" in sec.entries:
        value, lineno = sec.entries["order"]
        if not value.isdigit() or int(value) < 1:
            raise ConfigError(f"order must be a positive integer, got {value!r}", lineno, "order")
        options["order"] = int(value)
    if "realization" in sec.entries:
        value, lineno = sec.entries["realization"]
        if value.lower() not in ("well", "step", "ab"):
            raise ConfigError(f"unknown realization {value!r}", lineno, "realization")
        options["realization"] = value.lower()

    name = sec.entries.get("name", (f"#{index} {kind}", 0))[0]
    return LogicalGate(kind, qubits, angle, options, name)


def parse_device_config(text: str) -> tuple[DeviceParams, list[LogicalGate]]:
    sections = _split_sections(text)
    device = next((s for s in sections if s.name == "device"), None)
    gates = [s for s in sections if s.name == "gate"]
    return _device_params(device), [_gate(s, i + 1) for i, s in enumerate(gates)]


def load_device_config(path: str | Path) -> tuple[DeviceParams, list[LogicalGate]]:
    return parse_device_config(Path(path).read_text(encoding="utf-8"))
