"""Analytic pulse-to-unitary model and a 1-2 qubit statevector simulator.

A drive pulse is a rotation about an equatorial axis. Its angle scales
linearly with ``|amp| / |ref_amp|`` (so the calibrated pulse gives exactly
``theta_nom``) and its axis is the frame phase plus the stored phase plus
any change in ``arg(amp)``.

Frames: ``ShiftPhase(d)`` only advances the channel frame, which rotates
the axis of later pulses. Simulation runs in the lab frame; at the end the
accumulated frame ``f`` of each qubit is undone with ``RZ(-f)`` so the
returned state is the textbook (logical) state. This is a Z rotation and
never changes measurement probabilities.

Gates (time order):

* ``X``, ``SX``, ``RX``, ``H``: ``shift(phase)``, drive pulse,
  ``shift(phase)``. Nominal phase is 0 except for ``H`` where the stored
  value ``-pi/2`` turns the ``pi/2`` pulse into a Hadamard.
* ``CNOT``: ``shift(phase)`` on the target frame, cross-resonance pulse
  ``exp(-i theta/2 Z (x) n.sigma)``, a fixed ``RX(-pi/2)`` correction on
  the target, ``shift(phase)`` on the target frame and a fixed
  ``shift(+pi/2)`` on the control frame.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .backend import BackendConfig, GateCalibration, ReadoutModel, parse_gate_name
from .pulse_model import FrameState, Target, check_validity, perturb_parameter, shift_phase

I2 = np.eye(2, dtype=complex)
PX = np.array([[0, 1], [1, 0]], dtype=complex)
PY = np.array([[0, -1j], [1j, 0]], dtype=complex)
PZ = np.array([[1, 0], [0, -1]], dtype=complex)

NORM_TOL = 1e-9


class PulseHalted(RuntimeError):
    """A perturbed pulse failed the validity check and was not played."""

    def __init__(self, gate: str, reason: str):
        super().__init__(f"{gate}: {reason}")
        self.gate = gate
        self.reason = reason


def rz(angle: float) -> np.ndarray:
    return np.diag([cmath.exp(-0.5j * angle), cmath.exp(0.5j * angle)])


def axis_rotation(theta: float, phi: float) -> np.ndarray:
    """``exp(-i theta/2 (cos(phi) X + sin(phi) Y))``."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [[c, -1j * s * cmath.exp(-1j * phi)], [-1j * s * cmath.exp(1j * phi), c]],
        dtype=complex,
    )


def zx_rotation(theta: float, phi: float) -> np.ndarray:
    """``exp(-i theta/2 Z (x) (cos(phi) X + sin(phi) Y))``, control first."""
    n = math.cos(phi) * PX + math.sin(phi) * PY
    return math.cos(theta / 2) * np.eye(4) - 1j * math.sin(theta / 2) * np.kron(PZ, n)


def _drive_angles(cal: GateCalibration) -> tuple[float, float]:
    ref = cal.ref_amp.value
    amp = cal.amp.value
    theta = cal.theta_nom * abs(amp) / abs(ref)
    dphi = (cmath.phase(amp) - cmath.phase(ref)) if amp != 0 else 0.0
    return theta, dphi


def _check_playable(cal: GateCalibration) -> None:
    validity = check_validity(cal.envelope)
    if not validity.valid:
        raise PulseHalted(cal.gate, f"invalid pulse, max norm {validity.max_norm!r}")
    if not math.isfinite(cal.phase):
        raise PulseHalted(cal.gate, f"non-finite phase {cal.phase!r}")


def pulse_to_unitary(cal: GateCalibration, frame: FrameState = FrameState()) -> np.ndarray:
    """Lab-frame unitary of a gate's pulses given the incoming drive frame.

    For CNOT ``frame`` is the target qubit's frame and the result is 4x4
    with the control as the first tensor factor. Raises :class:`PulseHalted`
    for pulses that fail :func:`check_validity`.
    """
    _check_playable(cal)
    theta, dphi = _drive_angles(cal)
    axis = frame.phase + cal.phase + dphi
    if cal.n_qubits == 1:
        return axis_rotation(theta, axis)
    correction = axis_rotation(math.pi / 2, frame.phase + cal.phase + math.pi)
    return np.kron(I2, correction) @ zx_rotation(theta, axis)


def frame_updates(cal: GateCalibration) -> tuple[float, ...]:
    """Frame advance per qubit of the gate (control first for CNOT)."""
    if cal.n_qubits == 1:
        return (2.0 * cal.phase,)
    return (math.pi / 2, 2.0 * cal.phase)


def gate_unitary(cal: GateCalibration) -> np.ndarray:
    """Logical unitary of one gate starting from zero frames."""
    u = pulse_to_unitary(cal)
    shifts = frame_updates(cal)
    undo = rz(-shifts[0])
    for s in shifts[1:]:
        undo = np.kron(undo, rz(-s))
    return undo @ u


IDEAL_GATES = {
    "X": PX,
    "SX": 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
}


def ideal_unitary(gate: str) -> np.ndarray:
    key, angle = parse_gate_name(gate)
    if key == "RX":
        return axis_rotation(angle, 0.0)
    return IDEAL_GATES[key]


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    ops: tuple[tuple[str, tuple[int, ...]], ...]

    def __post_init__(self):
        if self.n_qubits not in (1, 2):
            raise ValueError("circuits have 1 or 2 qubits")
        for gate, qubits in self.ops:
            if any(not 0 <= q < self.n_qubits for q in qubits) or len(set(qubits)) != len(qubits):
                raise ValueError(f"bad qubits {qubits} for {gate}")
            two = parse_gate_name(gate)[0] == "CNOT"
            if len(qubits) != (2 if two else 1):
                raise ValueError(f"{gate} expects {2 if two else 1} qubit(s)")


def _apply(state: np.ndarray, u: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    psi = state.reshape((2,) * n)
    k = len(qubits)
    ut = u.reshape((2,) * (2 * k))
    psi = np.tensordot(ut, psi, axes=(list(range(k, 2 * k)), list(qubits)))
    psi = np.moveaxis(psi, list(range(k)), list(qubits))
    return psi.reshape(-1)


def _same_gate(a: str, b: str) -> bool:
    return parse_gate_name(a) == parse_gate_name(b)


def run_circuit(
    circuit: Circuit,
    backend: BackendConfig,
    perturbation: tuple[str, object, int] | None = None,
    overrides: dict[str, GateCalibration] | None = None,
) -> np.ndarray:
    """Final logical state vector starting from ``|0...0>``.

    ``perturbation`` is ``(gate, target, bit_index)`` and applies to every
    occurrence of that gate. ``overrides`` maps gate names to replacement
    calibrations (used to play ECC-decoded words). Raises
    :class:`PulseHalted` if any played pulse is invalid.
    """
    n = circuit.n_qubits
    cals: dict[str, GateCalibration] = {}
    for gate, _ in circuit.ops:
        if gate in cals:
            continue
        cal = None
        for name, c in (overrides or {}).items():
            if _same_gate(name, gate):
                cal = c
        if cal is None:
            cal = backend.calibration(gate)
        if perturbation is not None and _same_gate(perturbation[0], gate):
            cal = perturb_parameter(cal, Target.parse(perturbation[1]), perturbation[2])
        cals[gate] = cal

    state = np.zeros(2**n, dtype=complex)
    state[0] = 1.0
    frames = [FrameState() for _ in range(n)]
    for gate, qubits in circuit.ops:
        cal = cals[gate]
        drive_frame = frames[qubits[-1]]
        u = pulse_to_unitary(cal, drive_frame)
        state = _apply(state, u, qubits, n)
        for q, d in zip(qubits, frame_updates(cal)):
            frames[q] = shift_phase(frames[q], d)
    for q, f in enumerate(frames):
        state = _apply(state, rz(-f.phase), (q,), n)
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > NORM_TOL:
        raise ArithmeticError(f"state norm drifted to {norm}")
    return state


def ideal_state(circuit: Circuit) -> np.ndarray:
    n = circuit.n_qubits
    state = np.zeros(2**n, dtype=complex)
    state[0] = 1.0
    for gate, qubits in circuit.ops:
        state = _apply(state, ideal_unitary(gate), qubits, n)
    return state


def bitstrings(n: int) -> list[str]:
    """Outcome labels, qubit 0 leftmost."""
    return ["".join(b) for b in itertools.product("01", repeat=n)]


def probabilities(state: np.ndarray) -> np.ndarray:
    p = np.abs(state) ** 2
    return p / p.sum()


def apply_readout(p: np.ndarray, readout: ReadoutModel) -> np.ndarray:
    n = int(round(math.log2(p.size)))
    t = p.reshape((2,) * n)
    for q, (p01, p10) in enumerate(readout.restrict(n).pairs):
        confusion = np.array([[1 - p01, p10], [p01, 1 - p10]])
        t = np.moveaxis(np.tensordot(confusion, t, axes=([1], [q])), 0, q)
    return t.reshape(-1)


def measure(
    state: np.ndarray, readout: ReadoutModel, shots: int | None, seed: int | None = None
) -> dict[str, float]:
    """Outcome distribution after readout confusion.

    ``shots=None`` returns the exact distribution; otherwise ``shots``
    samples are drawn with a generator seeded by ``seed``.
    """
    p = apply_readout(probabilities(state), readout)
    labels = bitstrings(int(round(math.log2(p.size))))
    if shots is None:
        return dict(zip(labels, (float(x) for x in p)))
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, np.clip(p, 0.0, None) / p.sum())
    return {k: int(c) / shots for k, c in zip(labels, counts)}


def ideal_distribution(circuit: Circuit) -> dict[str, float]:
    return measure(ideal_state(circuit), ReadoutModel.ideal(circuit.n_qubits), None)


def _check_normalized(p: dict[str, float], name: str) -> None:
    if any(v < 0 for v in p.values()):
        raise ValueError(f"{name} has negative probabilities")
    total = math.fsum(p.values())
    if abs(total - 1.0) > NORM_TOL:
        raise ValueError(f"{name} is not normalized (sum={total!r})")


def l1_distance(p: dict[str, float], q: dict[str, float]) -> float:
    keys = sorted(set(p) | set(q))
    return math.fsum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def tvd(p: dict[str, float], q: dict[str, float]) -> float:
    _check_normalized(p, "P")
    _check_normalized(q, "Q")
    return 0.5 * l1_distance(p, q)


def tvd_increase_pct(
    flipped: dict[str, float], original: dict[str, float], ideal: dict[str, float]
) -> float:
    """Extra deviation from ``ideal`` caused by the flip, as an un-halved percent.

    Ranges over [-200, 200]; shot noise can make it slightly negative.
    """
    for d, name in ((flipped, "flipped"), (original, "original"), (ideal, "ideal")):
        _check_normalized(d, name)
    return 100.0 * (l1_distance(flipped, ideal) - l1_distance(original, ideal))
