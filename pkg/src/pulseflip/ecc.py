"""In-word error-correcting codecs for single-precision amplitude words.

Both schemes fit inside the 32-bit word by repurposing the low mantissa,
so the stored footprint never grows.

``rep3``
    The seven most damaging non-halting bits (2, 3, 4, 5, 7, 8, 9) are each
    triplicated; the two copies of protected bit ``p[i]`` live at
    ``18 + i`` and ``25 + i``. Bits 18-31 lose their original content.

``hamming5``
    A Hamming(29, 24) single-error-correcting code over bits 0-23 with the
    five parity bits stored at 24-28. Bits 29-31 are zeroed. Passing
    ``secded=True`` additionally stores an overall parity bit at index 29
    so double errors are detected rather than miscorrected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .float32_bits import Float32Word, set_bit

REP3_PROTECTED = (2, 3, 4, 5, 7, 8, 9)
REP3_COPIES = tuple((18 + i, 25 + i) for i in range(len(REP3_PROTECTED)))
REP3_SACRIFICED = tuple(range(18, 32))

HAMMING_N = 29
HAMMING_K = 24
HAMMING_PARITY = 5
HAMMING_DATA_INDICES = tuple(range(24))
HAMMING_PARITY_INDICES = tuple(range(24, 29))
HAMMING_ZEROED = (29, 30, 31)
SECDED_INDEX = 29

# codeword positions are 1-based; parities sit at powers of two
_PARITY_POSITIONS = tuple(1 << j for j in range(HAMMING_PARITY))
_DATA_POSITIONS = tuple(p for p in range(1, HAMMING_N + 1) if p not in _PARITY_POSITIONS)

# word index -> codeword position
WORD_TO_POSITION = {
    **dict(zip(HAMMING_DATA_INDICES, _DATA_POSITIONS)),
    **dict(zip(HAMMING_PARITY_INDICES, _PARITY_POSITIONS)),
}
POSITION_TO_WORD = {p: i for i, p in WORD_TO_POSITION.items()}


@dataclass(frozen=True)
class DecodeReport:
    corrected_word: Float32Word
    corrections: list[tuple[int, int, int]] = field(default_factory=list)
    detected_uncorrectable: bool = False


def majority3(a: int, b: int, c: int) -> int:
    return 1 if (a + b + c) >= 2 else 0


def _mask(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << (31 - i)
    return m


def rep3_encode(word: Float32Word) -> Float32Word:
    out = Float32Word(word.bits & ~_mask(REP3_SACRIFICED))
    for p, (c1, c2) in zip(REP3_PROTECTED, REP3_COPIES):
        b = word.bit(p)
        out = set_bit(set_bit(out, c1, b), c2, b)
    return out


def rep3_decode(stored: Float32Word) -> DecodeReport:
    out = Float32Word(stored.bits & ~_mask(REP3_SACRIFICED))
    corrections = []
    for p, (c1, c2) in zip(REP3_PROTECTED, REP3_COPIES):
        orig = stored.bit(p)
        voted = majority3(orig, stored.bit(c1), stored.bit(c2))
        if voted != orig:
            out = set_bit(out, p, voted)
            corrections.append((p, orig, voted))
    return DecodeReport(out, corrections)


def parity_check_matrix():
    """5 x 29 parity-check matrix over codeword positions 1..29.

    Column ``p - 1`` is the binary expansion of ``p`` (LSB in row 0).
    """
    cols = np.arange(1, HAMMING_N + 1)
    return np.array([(cols >> r) & 1 for r in range(HAMMING_PARITY)], dtype=np.uint8)


def _syndrome_of(word: Float32Word) -> int:
    s = 0
    for i, pos in WORD_TO_POSITION.items():
        if word.bit(i):
            s ^= pos
    return s


def hamming_syndrome(word: Float32Word) -> int:
    return _syndrome_of(word)


def _overall_parity(word: Float32Word) -> int:
    return bin(word.bits & _mask(range(SECDED_INDEX + 1))).count("1") & 1


def hamming_encode(word: Float32Word, secded: bool = False) -> Float32Word:
    out = Float32Word(word.bits & ~_mask(HAMMING_PARITY_INDICES + HAMMING_ZEROED))
    s = _syndrome_of(out)
    for j, idx in enumerate(HAMMING_PARITY_INDICES):
        out = set_bit(out, idx, (s >> j) & 1)
    if secded:
        out = set_bit(out, SECDED_INDEX, _overall_parity(out))
    return out


def hamming_decode(stored: Float32Word, secded: bool = False) -> DecodeReport:
    s = _syndrome_of(stored)
    zeroed = Float32Word(stored.bits & ~_mask(HAMMING_ZEROED))
    if secded:
        odd = _overall_parity(stored)
        if s and not odd:
            return DecodeReport(stored, [], True)
        if not s:
            # zero syndrome with odd parity: only the overall bit was hit
            return DecodeReport(zeroed)
    if s == 0:
        return DecodeReport(zeroed)
    if s not in POSITION_TO_WORD:
        return DecodeReport(stored, [], True)
    idx = POSITION_TO_WORD[s]
    orig = stored.bit(idx)
    fixed = set_bit(zeroed, idx, 1 - orig)
    return DecodeReport(fixed, [(idx, orig, 1 - orig)])


SCHEMES = {
    "rep3": (rep3_encode, rep3_decode),
    "hamming5": (hamming_encode, hamming_decode),
}


def codec(scheme: str):
    """(encode, decode) pair for a scheme name."""
    try:
        return SCHEMES[scheme]
    except KeyError:
        raise ValueError(f"unknown ECC scheme {scheme!r}; choose from {sorted(SCHEMES)}") from None
