"""Bit-exact views of IEEE 754 single-precision words.

Bit indices count from the most significant end: index 0 is the sign,
1-8 the exponent (MSB first) and 9-31 the mantissa (MSB first).
"""

from __future__ import annotations

import enum
import math
import struct
from dataclasses import dataclass

N_BITS = 32
EXPONENT_BIAS = 127


class BitClass(enum.Enum):
    SIGN = "sign"
    EXPONENT = "exponent"
    MANTISSA_HIGH = "mantissa_high"
    MANTISSA_LOW = "mantissa_low"


@dataclass(frozen=True)
class Float32Word:
    """A raw 32-bit pattern."""

    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << N_BITS):
            raise ValueError(f"pattern out of range: {self.bits:#x}")

    @classmethod
    def from_bitstring(cls, s: str) -> "Float32Word":
        s = s.replace(" ", "").replace("_", "")
        if len(s) != N_BITS or set(s) - {"0", "1"}:
            raise ValueError(f"expected 32 binary digits, got {s!r}")
        return cls(int(s, 2))

    @property
    def sign(self) -> int:
        return self.bits >> 31

    @property
    def exponent(self) -> int:
        return (self.bits >> 23) & 0xFF

    @property
    def mantissa(self) -> int:
        return self.bits & 0x7FFFFF

    def bit(self, i: int) -> int:
        _check_index(i)
        return (self.bits >> (31 - i)) & 1

    def bitstring(self) -> str:
        return format(self.bits, "032b")

    def fields(self) -> tuple[str, str, str]:
        s = self.bitstring()
        return s[0], s[1:9], s[9:]

    @property
    def value(self) -> float:
        return decode_f32(self)


def _check_index(i: int) -> None:
    if isinstance(i, bool) or not isinstance(i, int) or not 0 <= i < N_BITS:
        raise ValueError(f"bit index must be an integer in [0, 31], got {i!r}")


def encode_f32(value: float) -> Float32Word:
    """Round ``value`` to the nearest single-precision pattern (ties to even)."""
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"cannot encode non-finite value {value!r}")
    try:
        packed = struct.pack(">f", value)
    except OverflowError as exc:
        raise ValueError(f"{value!r} overflows single precision") from exc
    return Float32Word(struct.unpack(">I", packed)[0])


def decode_f32(word: Float32Word) -> float:
    return struct.unpack(">f", struct.pack(">I", word.bits))[0]


def to_f32(value: float) -> float:
    """Truncate a Python float to the nearest single-precision value."""
    return decode_f32(encode_f32(value))


def flip_bit(word: Float32Word, i: int) -> Float32Word:
    _check_index(i)
    return Float32Word(word.bits ^ (1 << (31 - i)))


def set_bit(word: Float32Word, i: int, b: int) -> Float32Word:
    _check_index(i)
    mask = 1 << (31 - i)
    return Float32Word((word.bits | mask) if b else (word.bits & ~mask))


def classify_bit(i: int) -> BitClass:
    _check_index(i)
    if i == 0:
        return BitClass.SIGN
    if i <= 8:
        return BitClass.EXPONENT
    if i <= 17:
        return BitClass.MANTISSA_HIGH
    return BitClass.MANTISSA_LOW


def pattern_of(value: float) -> Float32Word:
    """Like :func:`encode_f32` but also accepts infinities and NaN.

    Used on stored parameters, which may already hold a non-finite flip.
    """
    value = float(value)
    if math.isfinite(value):
        return encode_f32(value)
    return Float32Word(struct.unpack(">I", struct.pack(">f", value))[0])


def flip_value(value: float, i: int) -> float:
    """Flip bit ``i`` of the single-precision encoding of ``value``."""
    return decode_f32(flip_bit(pattern_of(value), i))


def describe(word: Float32Word) -> str:
    """Multi-line annotated layout, used by ``inspect-float``."""
    sign, exp, man = word.fields()
    e = word.exponent
    if e == 0xFF:
        kind = "nan" if word.mantissa else "infinity"
    elif e == 0:
        kind = "zero" if word.mantissa == 0 else "subnormal"
    else:
        kind = "normal"
    lines = [
        f"pattern  : {word.bitstring()}",
        f"sign     : {sign}            (index 0)",
        f"exponent : {exp}     (indices 1-8, stored {e}, unbiased {e - EXPONENT_BIAS if e not in (0, 255) else '-'})",
        f"mantissa : {man} (indices 9-31)",
        f"class    : {kind}",
        f"value    : {decode_f32(word)!r}",
    ]
    return "\n".join(lines)
