"""Pulse parameters as they sit in controller memory.

Amplitudes and phases are stored in single precision; every perturbation
acts on the stored 32-bit pattern of exactly one parameter.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

import numpy as np

from .float32_bits import Float32Word, decode_f32, flip_bit, pattern_of

if TYPE_CHECKING:
    from .backend import GateCalibration

TWO_PI = 2.0 * math.pi


class Target(enum.Enum):
    AMP_REAL = "real"
    AMP_IMAG = "imag"
    PHASE = "phase"

    @classmethod
    def parse(cls, s) -> "Target":
        if isinstance(s, cls):
            return s
        aliases = {"re": "real", "ampreal": "real", "im": "imag", "ampimag": "imag"}
        key = str(s).strip().lower().replace("_", "")
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValueError(f"unknown target {s!r}; expected real, imag or phase") from None


class InvalidTargetError(ValueError):
    """Target parameter is not used by the gate's calibration."""


@dataclass(frozen=True)
class ComplexAmp:
    """I/Q amplitude held as two raw single-precision words.

    Keeping the patterns (not Python floats) makes every flip exactly
    reversible, NaN payloads included.
    """

    re_word: Float32Word
    im_word: Float32Word = Float32Word(0)

    @classmethod
    def from_values(cls, re, im=0.0) -> "ComplexAmp":
        return cls(pattern_of(re), pattern_of(im))

    @property
    def re(self) -> float:
        return decode_f32(self.re_word)

    @property
    def im(self) -> float:
        return decode_f32(self.im_word)

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def __abs__(self) -> float:
        return abs(self.value)

    def is_finite(self) -> bool:
        return math.isfinite(self.re) and math.isfinite(self.im)


@dataclass(frozen=True)
class DragEnvelope:
    duration: int
    sigma: float
    beta: float
    amp: ComplexAmp

    def __post_init__(self):
        if int(self.duration) != self.duration or self.duration < 1:
            raise ValueError(f"duration must be a positive integer, got {self.duration!r}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")


@dataclass(frozen=True)
class FrameState:
    """Accumulated modulation phase of one drive channel (radians)."""

    phase: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.phase):
            raise ValueError("frame phase must be finite")

    @property
    def reduced(self) -> float:
        r = math.fmod(self.phase, TWO_PI) % TWO_PI
        return 0.0 if r == TWO_PI else r


@dataclass(frozen=True)
class PulseValidity:
    valid: bool
    max_norm: float


def render_drag(env: DragEnvelope) -> np.ndarray:
    """Complex DRAG samples ``amp * g(t) * (1 - i*beta*(t - T/2)/sigma**2)``.

    Samples sit at ``t_j = j + 0.5`` with the Gaussian centred at ``T/2``.
    """
    t = np.arange(env.duration, dtype=float) + 0.5
    x = t - env.duration / 2.0
    g = np.exp(-(x**2) / (2.0 * env.sigma**2))
    shape = g * (1.0 + 1j * env.beta * (-x / env.sigma**2))
    with np.errstate(invalid="ignore", over="ignore"):
        return env.amp.value * shape


def check_validity(env: DragEnvelope) -> PulseValidity:
    samples = render_drag(env)
    with np.errstate(invalid="ignore", over="ignore"):
        mags = np.abs(samples)
    finite = bool(np.all(np.isfinite(samples)))
    max_norm = float(np.max(mags)) if finite else math.inf
    return PulseValidity(finite and max_norm <= 1.0, max_norm)


def shift_phase(frame: FrameState, dphi: float) -> FrameState:
    if not math.isfinite(dphi):
        raise ValueError(f"phase shift must be finite, got {dphi!r}")
    return FrameState(frame.phase + dphi)


def perturb_parameter(cal: "GateCalibration", target, i: int) -> "GateCalibration":
    """Return ``cal`` with bit ``i`` of one stored parameter flipped."""
    target = Target.parse(target)
    if target is Target.AMP_IMAG and not cal.uses_imag:
        raise InvalidTargetError(f"gate {cal.gate} does not use an imaginary amplitude component")
    return with_parameter_word(cal, target, flip_bit(parameter_word(cal, target), i))


def parameter_word(cal: "GateCalibration", target) -> Float32Word:
    target = Target.parse(target)
    if target is Target.AMP_REAL:
        return cal.amp.re_word
    if target is Target.AMP_IMAG:
        return cal.amp.im_word
    return cal.phase_word


def with_parameter_word(cal: "GateCalibration", target, word: Float32Word) -> "GateCalibration":
    """Replace the stored pattern of one parameter."""
    target = Target.parse(target)
    if target is Target.AMP_REAL:
        return replace(cal, amp=replace(cal.amp, re_word=word))
    if target is Target.AMP_IMAG:
        return replace(cal, amp=replace(cal.amp, im_word=word))
    return replace(cal, phase_word=word)
