import itertools
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pulseflip import ecc
from pulseflip.ecc import (
    REP3_COPIES,
    REP3_PROTECTED,
    WORD_TO_POSITION,
    hamming_decode,
    hamming_encode,
    hamming_syndrome,
    majority3,
    parity_check_matrix,
    rep3_decode,
    rep3_encode,
)
from pulseflip.float32_bits import Float32Word, flip_bit

words = st.integers(0, 2**32 - 1).map(Float32Word)
LOW_MASK = (1 << 14) - 1  # indices 18-31


def random_words(n, seed):
    rng = random.Random(seed)
    return [Float32Word(rng.getrandbits(32)) for _ in range(n)]


def set_bits(w: Float32Word, indices) -> Float32Word:
    for i in indices:
        w = Float32Word(w.bits | (1 << (31 - i)))
    return w


# ---------------------------------------------------------------- repetition


@pytest.mark.parametrize("a, b, c", list(itertools.product((0, 1), repeat=3)))
def test_majority_truth_table(a, b, c):
    assert majority3(a, b, c) == Counter((a, b, c)).most_common(1)[0][0]


def test_majority_examples():
    assert majority3(0, 1, 0) == 0
    assert majority3(1, 1, 1) == 1
    assert majority3(1, 0, 1) == 1


def test_layout_is_disjoint():
    copies = [i for pair in REP3_COPIES for i in pair]
    assert len(copies) == 14 and sorted(copies) == list(range(18, 32))
    assert not set(copies) & set(REP3_PROTECTED)
    assert 1 not in REP3_PROTECTED and 6 not in REP3_PROTECTED


def test_rep3_encode_all_protected_set():
    w = set_bits(Float32Word(0), REP3_PROTECTED)
    w = Float32Word(w.bits | 0b10110010011101)  # arbitrary low bits
    enc = rep3_encode(w)
    assert enc.bitstring()[18:25] == "1111111"
    assert enc.bitstring()[25:32] == "1111111"
    assert rep3_decode(enc).corrections == []


def test_rep3_zero_word():
    assert rep3_encode(Float32Word(0)) == Float32Word(0)


@given(words)
def test_rep3_encode_preserves_high_bits_and_is_idempotent(w):
    enc = rep3_encode(w)
    assert enc.bits >> 14 == w.bits >> 14
    assert rep3_encode(enc) == enc


@given(words)
def test_rep3_clean_round_trip_zeroes_sacrificed_bits(w):
    rep = rep3_decode(rep3_encode(w))
    assert rep.corrected_word.bits == w.bits & ~LOW_MASK
    assert rep.corrections == []


def test_rep3_flip_of_protected_bit_is_restored():
    w = Float32Word(0x3DC4FE7C)
    rep = rep3_decode(flip_bit(rep3_encode(w), 3))
    assert rep.corrected_word.bit(3) == w.bit(3)
    assert [c[0] for c in rep.corrections] == [3]
    assert rep.corrected_word.bits == w.bits & ~LOW_MASK


def test_rep3_every_triplet_position_exhaustively():
    positions = list(REP3_PROTECTED) + [i for pair in REP3_COPIES for i in pair]
    assert len(positions) == 21
    for w in random_words(200, seed=1):
        clean = rep3_decode(rep3_encode(w)).corrected_word
        for i in positions:
            assert rep3_decode(flip_bit(rep3_encode(w), i)).corrected_word == clean


def test_rep3_triplet_distance_three():
    # each triplet: corrects any 1 error, and any 2-error pattern is never a codeword
    codewords = {(0, 0, 0), (1, 1, 1)}
    for pattern in itertools.product((0, 1), repeat=3):
        errs = sum(pattern)
        for cw in codewords:
            received = tuple(a ^ b for a, b in zip(cw, pattern))
            if errs <= 1:
                assert majority3(*received) == cw[0]
            elif errs == 2:
                assert received not in codewords
    dmin = min(sum(a != b for a, b in zip(x, y)) for x, y in itertools.combinations(codewords, 2))
    assert dmin == 3


@given(words, st.integers(0, 31))
def test_rep3_unprotected_bits_pass_through(w, i):
    rep = rep3_decode(flip_bit(rep3_encode(w), i))
    for j in (0, 1, 6, *range(10, 18)):
        expected = w.bit(j) ^ (1 if i == j else 0)
        assert rep.corrected_word.bit(j) == expected


# ---------------------------------------------------------------- Hamming


def independent_check_matrix():
    cols = [[(p >> r) & 1 for r in range(5)] for p in range(1, 30)]
    return np.array(cols, dtype=int).T


def codeword_vector(w: Float32Word):
    v = np.zeros(29, dtype=int)
    for i, pos in WORD_TO_POSITION.items():
        v[pos - 1] = w.bit(i)
    return v


def test_sizing_inequality_and_parameters():
    assert 2**ecc.HAMMING_PARITY - 1 >= ecc.HAMMING_K + ecc.HAMMING_PARITY
    assert 2 ** (ecc.HAMMING_PARITY - 1) - 1 < ecc.HAMMING_K + ecc.HAMMING_PARITY - 1
    assert (ecc.HAMMING_N, ecc.HAMMING_K) == (29, 24)


def test_parity_check_matrix_has_distinct_nonzero_columns():
    h = parity_check_matrix()
    assert np.array_equal(h, independent_check_matrix())
    cols = {tuple(c) for c in h.T}
    assert len(cols) == 29 and (0,) * 5 not in cols


def test_layout_bijection_and_parity_at_powers_of_two():
    assert sorted(WORD_TO_POSITION.values()) == list(range(1, 30))
    assert [WORD_TO_POSITION[i] for i in ecc.HAMMING_PARITY_INDICES] == [1, 2, 4, 8, 16]


def test_hamming_zero_codeword():
    assert hamming_encode(Float32Word(0)) == Float32Word(0)


def test_hamming_bit0_parities_equal_its_column():
    enc = hamming_encode(Float32Word(1 << 31))
    pos = WORD_TO_POSITION[0]
    parities = [enc.bit(i) for i in ecc.HAMMING_PARITY_INDICES]
    assert parities == [(pos >> r) & 1 for r in range(5)]
    assert enc.bits & 0b111 == 0


@given(words)
def test_hamming_codewords_have_zero_syndrome(w):
    enc = hamming_encode(w)
    assert not (independent_check_matrix() @ codeword_vector(enc) % 2).any()
    assert hamming_syndrome(enc) == 0
    assert enc.bits >> 8 == w.bits >> 8


def test_hamming_clean_decode():
    for w in random_words(50, seed=2):
        rep = hamming_decode(hamming_encode(w))
        assert rep.corrections == [] and not rep.detected_uncorrectable
        assert rep.corrected_word == hamming_encode(w)


def test_hamming_single_flip_recovery_exhaustive():
    for w in random_words(200, seed=3):
        enc = hamming_encode(w)
        for i in range(29):
            rep = hamming_decode(flip_bit(enc, i))
            assert rep.corrected_word.bits >> 8 == w.bits >> 8
            assert rep.corrected_word == enc
            assert [c[0] for c in rep.corrections] == [i]


def test_hamming_double_flips_never_silently_recover():
    enc = hamming_encode(Float32Word(0x3DF2FF1A))
    for i, j in itertools.combinations(range(29), 2):
        rep = hamming_decode(flip_bit(flip_bit(enc, i), j))
        assert rep.detected_uncorrectable or rep.corrected_word != enc


def test_secded_mode_detects_all_double_flips():
    enc = hamming_encode(Float32Word(0x3DF2FF1A), secded=True)
    for i, j in itertools.combinations(range(30), 2):
        assert hamming_decode(flip_bit(flip_bit(enc, i), j), secded=True).detected_uncorrectable
    for i in range(30):
        rep = hamming_decode(flip_bit(enc, i), secded=True)
        assert not rep.detected_uncorrectable
        assert rep.corrected_word.bits >> 8 == enc.bits >> 8


@given(words)
def test_encoders_touch_only_their_slots(w):
    assert (rep3_encode(w).bits ^ w.bits) & ~LOW_MASK == 0
    assert (hamming_encode(w).bits ^ w.bits) >> 8 == 0


def test_unknown_scheme():
    with pytest.raises(ValueError):
        ecc.codec("golay")
