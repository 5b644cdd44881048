import math

import numpy as np
import pytest

from pulseflip import ecc
from pulseflip.float32_bits import encode_f32
from pulseflip.harness import (
    HIST_EDGES,
    INTERPOLATED,
    MEASURED,
    decoded_calibration,
    derive_seed,
    ecc_eval,
    histogram,
    interpolate_invalid,
    monte_carlo,
    sweep_bits,
)
from pulseflip.pulse_model import InvalidTargetError


def test_interpolation_examples():
    assert interpolate_invalid([10, None, 30]) == [10, 20, 30]
    assert interpolate_invalid([1.5, 2.5]) == [1.5, 2.5]
    assert interpolate_invalid([None, 10, 20]) == [10, 10, 20]
    assert interpolate_invalid([0, None, None, 30, None]) == [0, 10, 20, 30, 30]
    with pytest.raises(ValueError):
        interpolate_invalid([None, None])


def test_derive_seed_depends_on_all_coordinates():
    a = derive_seed(1, "sweep", 3)
    assert a == derive_seed(1, "sweep", 3)
    assert len({a, derive_seed(2, "sweep", 3), derive_seed(1, "sweep", 4),
                derive_seed(1, "mc", 3)}) == 4


def test_histogram_sums_to_count():
    vals = [-50.0, -1.0, 0.0, 13.0, 199.0, 250.0]
    h = histogram(vals)
    assert sum(h) == len(vals) and len(h) == len(HIST_EDGES) - 1


def test_sweep_x_real_valencia(valencia):
    r = sweep_bits(valencia, "X", "real", shots=None)
    assert [e.index for e in r.entries] == list(range(32))
    assert r.invalid_indices() == [1, 6]
    for e in r.entries:
        if e.index in (1, 6):
            assert e.status == INTERPOLATED and e.measured_pct is None
        else:
            assert e.status == MEASURED and e.measured_pct == e.tvd_increase_pct
    measured = [e.measured_pct for e in r.entries if e.measured_pct is not None]
    assert max(measured) >= 180.0
    assert all(e.tvd_increase_pct < 5.0 for e in r.entries if e.index >= 18)
    assert r.entries[1].tvd_increase_pct == pytest.approx(
        (r.entries[0].tvd_increase_pct + r.entries[2].tvd_increase_pct) / 2)


def test_sweep_sign_bit_negligible_for_h(valencia):
    for shots in (None, 1024):
        r = sweep_bits(valencia, "H", "real", shots=shots, seed=5)
        assert r.entries[0].tvd_increase_pct < 5.0


def test_exact_sign_flip_is_exactly_harmless(valencia):
    for gate in ("X", "H", "SX", "RX(pi/3)"):
        r = sweep_bits(valencia, gate, "real", shots=None)
        assert abs(r.entries[0].tvd_increase_pct) < 1e-12


@pytest.mark.parametrize("gate", ["X", "H"])
def test_sensitivity_ordering(valencia, gate):
    s = sweep_bits(valencia, gate, "real", shots=None).series()
    exp_mean = np.mean(s[1:9])
    high_mean = np.mean(s[9:18])
    low_mean = np.mean(s[18:])
    assert exp_mean > high_mean > low_mean


def test_imag_target_rejected_for_x(valencia):
    with pytest.raises(InvalidTargetError):
        sweep_bits(valencia, "X", "imag")


def test_phase_sweep_runs(valencia):
    r = sweep_bits(valencia, "H", "phase", shots=None)
    assert len(r.entries) == 32
    # only the NaN-producing exponent flip of the stored -pi/2 halts
    assert r.invalid_indices() == [1]


def test_sweep_workers_do_not_change_results(valencia):
    a = sweep_bits(valencia, "H", "real", shots=256, seed=9, workers=1)
    b = sweep_bits(valencia, "H", "real", shots=256, seed=9, workers=3)
    assert a == b


def test_ecc_soundness_protected_flips_decode_to_nominal(any_backend):
    for gate in ("X", "H", "SX"):
        cal = any_backend.calibration(gate)
        nominal, _ = decoded_calibration(cal, "rep3", None)
        protected = list(ecc.REP3_PROTECTED) + [i for p in ecc.REP3_COPIES for i in p]
        for i in protected:
            decoded, report = decoded_calibration(cal, "rep3", i)
            assert decoded.amp.re_word == nominal.amp.re_word
        for i in range(29):
            decoded, _ = decoded_calibration(cal, "hamming5", i)
            assert decoded.amp.re_word.bits >> 8 == encode_f32(cal.amp.re).bits >> 8


def test_rep3_eval_exact(valencia):
    r = ecc_eval(valencia, "X", "rep3", shots=None)
    assert abs(r.nominal_overhead_pct) < 0.5
    for e in r.entries:
        if e.index in ecc.REP3_PROTECTED:
            # residual comes only from zeroing bits 18-31
            assert e.protected and e.post_ecc_pct == r.nominal_overhead_pct
        if 10 <= e.index <= 17:
            assert e.post_ecc_pct < 40.0
    assert [e.index for e in r.entries if e.status != MEASURED] == [1, 6]


def test_hamming_eval_exact(valencia):
    r = ecc_eval(valencia, "X", "hamming5", shots=None)
    assert abs(r.nominal_overhead_pct) < 0.5
    assert all(e.status == MEASURED for e in r.entries)
    assert max(e.post_ecc_pct for e in r.entries) < 0.5


def test_ecc_eval_pre_values_match_sweep(valencia):
    s = sweep_bits(valencia, "X", "real", shots=1024, seed=3)
    r = ecc_eval(valencia, "X", "rep3", shots=1024, seed=3)
    assert [e.pre_ecc_pct for e in r.entries] == [e.measured_pct for e in s.entries]


def test_monte_carlo_structure(valencia):
    r = monte_carlo(valencia, "X", runs=100, shots=1024, seed=42)
    assert len(r.samples) == 100
    assert sum(r.pre_hist) == sum(r.post_hist) == 100
    assert all(s.index not in (1, 6) for s in r.samples)
    pre = [s.pre_ecc_pct for s in r.samples]
    assert max(pre) >= 180.0
    # two populations: many small increases and some catastrophic ones
    assert sum(p < 20 for p in pre) >= 30 and sum(p > 150 for p in pre) >= 5
    assert max(s.post_ecc_pct for s in r.samples) < 40.0


def test_monte_carlo_single_run(valencia):
    r = monte_carlo(valencia, "X", runs=1, seed=0)
    assert len(r.samples) == 1
    s = r.samples[0]
    assert math.isfinite(s.pre_ecc_pct) and math.isfinite(s.post_ecc_pct)
    with pytest.raises(ValueError):
        monte_carlo(valencia, "X", runs=0)


def test_monte_carlo_deterministic_across_workers(valencia):
    a = monte_carlo(valencia, "X", runs=20, seed=8, workers=1)
    b = monte_carlo(valencia, "X", runs=20, seed=8, workers=2)
    assert a == b


def test_cnot_sweep_uses_bell_circuit(valencia):
    r = sweep_bits(valencia, "CNOT", "real", shots=None)
    assert r.invalid_indices() == [1, 6]
    assert all(abs(e.tvd_increase_pct) < 1e-3 for e in r.entries if e.index >= 18)
