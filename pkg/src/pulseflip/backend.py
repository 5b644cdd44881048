"""Backend calibration files.

A backend file is JSON with a ``format`` tag, a list of gate calibrations
and one readout-error pair per qubit. Amplitudes and phases are decimal
strings so the file states exactly what gets rounded to single precision
on load. See ``configs/`` for the shipped backends.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .float32_bits import Float32Word, decode_f32, pattern_of
from .pulse_model import ComplexAmp, DragEnvelope

FORMAT_TAG = "pulseflip-backend/1"
BASE_GATES = ("X", "SX", "H", "CNOT")


class ConfigError(ValueError):
    """Malformed or inconsistent backend configuration."""


class UnknownGateError(ValueError):
    """Gate name not calibrated by the backend."""


@dataclass(frozen=True)
class ReadoutModel:
    """Per-qubit confusion pairs ``(p01, p10)``.

    ``p01`` is P(read 1 | state 0), ``p10`` is P(read 0 | state 1).
    """

    pairs: tuple[tuple[float, float], ...]

    def __post_init__(self):
        for p01, p10 in self.pairs:
            if not (0.0 <= p01 <= 0.5 and 0.0 <= p10 <= 0.5):
                raise ConfigError(f"readout error out of [0, 0.5]: {(p01, p10)}")

    @classmethod
    def ideal(cls, n_qubits: int = 2) -> "ReadoutModel":
        return cls(((0.0, 0.0),) * n_qubits)

    def restrict(self, n_qubits: int) -> "ReadoutModel":
        if n_qubits > len(self.pairs):
            raise ConfigError(f"readout model covers {len(self.pairs)} qubits, need {n_qubits}")
        return ReadoutModel(self.pairs[:n_qubits])


@dataclass(frozen=True)
class GateCalibration:
    """Stored pulse parameters of one gate.

    ``ref_amp`` is the calibrated amplitude that produces ``theta_nom``;
    perturbations change ``amp`` and ``phase_word`` only.
    """

    gate: str
    n_qubits: int
    amp: ComplexAmp
    phase_word: Float32Word
    theta_nom: float
    duration: int
    sigma: float
    beta: float
    uses_imag: bool = True
    ref_amp: ComplexAmp | None = None

    def __post_init__(self):
        if self.ref_amp is None:
            object.__setattr__(self, "ref_amp", self.amp)
        if not self.theta_nom > 0:
            raise ConfigError(f"{self.gate}: theta_nom must be positive")

    @property
    def phase(self) -> float:
        return decode_f32(self.phase_word)

    @property
    def envelope(self) -> DragEnvelope:
        return DragEnvelope(self.duration, self.sigma, self.beta, self.amp)


@dataclass(frozen=True)
class BackendConfig:
    name: str
    gates: dict[str, GateCalibration]
    readout: ReadoutModel
    notes: tuple[str, ...] = field(default=())

    def calibration(self, gate: str) -> GateCalibration:
        key, angle = parse_gate_name(gate)
        if key == "RX":
            return rx_calibration(self.gates["X"], angle)
        try:
            return self.gates[key]
        except KeyError:
            raise UnknownGateError(f"backend {self.name!r} has no calibration for gate {gate!r}") from None

    def with_gate(self, cal: GateCalibration) -> "BackendConfig":
        """Copy with one gate calibration replaced (or added, for RX)."""
        return replace(self, gates={**self.gates, cal.gate: cal})


_ANGLE_RE = re.compile(r"^\s*(-)?\s*(\d*\.?\d*)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$", re.I)


def parse_angle(text) -> float:
    """Parse radians given as a number or as ``[-][k*]pi[/m]``."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _ANGLE_RE.match(str(text))
    if m and not (m.group(2) or "x").replace(".", ""):
        m = None
    if m:
        sign = -1.0 if m.group(1) else 1.0
        k = float(m.group(2)) if m.group(2) else 1.0
        d = float(m.group(3)) if m.group(3) else 1.0
        return sign * k * math.pi / d
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse angle {text!r}") from None


def parse_gate_name(name: str) -> tuple[str, float | None]:
    """``'RX(pi/3)'`` -> ``('RX', pi/3)``; other names are upper-cased."""
    s = name.strip()
    m = re.match(r"^rx\s*\((.*)\)$", s, re.I) or re.match(r"^rx[_:](.*)$", s, re.I)
    if m:
        try:
            angle = parse_angle(m.group(1).replace("_", "/"))
        except ConfigError:
            raise UnknownGateError(f"cannot parse gate {name!r}") from None
        if not angle > 0:
            raise UnknownGateError(f"RX angle must be positive, got {name!r}")
        return "RX", angle
    return s.upper(), None


def rx_calibration(x_cal: GateCalibration, theta: float) -> GateCalibration:
    """RX(theta) drive scaled linearly from the X calibration."""
    scale = theta / math.pi
    amp = ComplexAmp.from_values(x_cal.ref_amp.re * scale, x_cal.ref_amp.im * scale)
    return replace(
        x_cal,
        gate=f"RX({theta!r})",
        amp=amp,
        ref_amp=amp,
        theta_nom=theta,
    )


def _gate_from_dict(d: dict) -> GateCalibration:
    try:
        amp = ComplexAmp(pattern_of(float(d["amp_re"])), pattern_of(float(d.get("amp_im", "0"))))
        name = str(d["name"]).upper()
        return GateCalibration(
            gate=name,
            n_qubits=int(d.get("qubits", 2 if name == "CNOT" else 1)),
            amp=amp,
            phase_word=pattern_of(parse_angle(d.get("phase", 0.0))),
            theta_nom=parse_angle(d["theta_nom"]),
            duration=int(d["duration"]),
            sigma=float(d["sigma"]),
            beta=float(d.get("beta", 0.0)),
            uses_imag=bool(d.get("uses_imag", True)),
        )
    except KeyError as exc:
        raise ConfigError(f"gate entry missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad gate entry {d.get('name')!r}: {exc}") from None


def backend_from_dict(doc: dict) -> BackendConfig:
    if doc.get("format") != FORMAT_TAG:
        raise ConfigError(f"expected format {FORMAT_TAG!r}, got {doc.get('format')!r}")
    gates = {}
    for entry in doc.get("gates", []):
        cal = _gate_from_dict(entry)
        if cal.gate in gates:
            raise ConfigError(f"duplicate gate {cal.gate}")
        gates[cal.gate] = cal
    missing = [g for g in BASE_GATES if g not in gates]
    if missing:
        raise ConfigError(f"missing gate calibrations: {missing}")
    try:
        pairs = tuple((float(q["p01"]), float(q["p10"])) for q in doc["readout"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad readout section: {exc}") from None
    if len(pairs) < 2:
        raise ConfigError("readout section must cover two qubits")
    return BackendConfig(
        name=str(doc.get("name", "unnamed")),
        gates=gates,
        readout=ReadoutModel(pairs),
        notes=tuple(doc.get("notes", ())),
    )


def load_backend(path) -> BackendConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read backend file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return backend_from_dict(doc)
