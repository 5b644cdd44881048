"""Fault-injection campaigns: per-bit sweeps, Monte-Carlo flips, ECC evaluation.

Every campaign item gets its own seed derived from the master seed and the
item's coordinates, so results do not depend on execution order or on the
number of workers.
"""

from __future__ import annotations

import logging
import math
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import ecc
from .backend import BackendConfig, GateCalibration, parse_gate_name
from .float32_bits import N_BITS, classify_bit, flip_bit
from .pulse_model import (
    InvalidTargetError,
    Target,
    check_validity,
    parameter_word,
    perturb_parameter,
    with_parameter_word,
)
from .quantum_sim import (
    Circuit,
    PulseHalted,
    ideal_distribution,
    measure,
    run_circuit,
    tvd_increase_pct,
)

log = logging.getLogger(__name__)

MEASURED = "measured"
HALTED = "halted"
INTERPOLATED = "invalid_interpolated"

DEFAULT_SHOTS = 1024
HIST_EDGES = tuple(float(x) for x in range(-10, 211, 10))


def derive_seed(master: int, *coords) -> int:
    """64-bit seed from a master seed and item coordinates (ints or strings)."""
    key = [c if isinstance(c, int) else zlib.crc32(str(c).encode()) for c in coords]
    ss = np.random.SeedSequence(entropy=int(master), spawn_key=key)
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class Experiment:
    """Prep-and-measure circuit exercising one gate."""

    backend: BackendConfig
    gate: str
    shots: int | None = DEFAULT_SHOTS
    seed: int = 0

    @property
    def circuit(self) -> Circuit:
        if parse_gate_name(self.gate)[0] == "CNOT":
            return Circuit(2, (("H", (0,)), (self.gate, (0, 1))))
        return Circuit(1, ((self.gate, (0,)),))

    @property
    def calibration(self) -> GateCalibration:
        return self.backend.calibration(self.gate)

    def ideal(self) -> dict[str, float]:
        return ideal_distribution(self.circuit)

    def distribution(self, cal: GateCalibration | None, *coords) -> dict[str, float]:
        """Measured distribution with ``cal`` substituted for the gate under test.

        Raises :class:`PulseHalted` when the substituted pulse is invalid.
        """
        overrides = {self.gate: cal} if cal is not None else None
        state = run_circuit(self.circuit, self.backend, overrides=overrides)
        seed = derive_seed(self.seed, self.backend.name, self.gate, *coords)
        readout = self.backend.readout.restrict(self.circuit.n_qubits)
        return measure(state, readout, self.shots, seed)

    def original(self) -> dict[str, float]:
        return self.distribution(None, "original")

    def increase(self, cal: GateCalibration, *coords) -> float:
        return tvd_increase_pct(self.distribution(cal, *coords), self.original(), self.ideal())


def _pool_map(fn, items, workers: int | None):
    items = list(items)
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _is_playable(cal: GateCalibration) -> bool:
    return check_validity(cal.envelope).valid and math.isfinite(cal.phase)


# --------------------------------------------------------------------------- sweeps


@dataclass
class SweepEntry:
    index: int
    bit_class: str
    flipped_word: str
    status: str
    measured_pct: float | None
    tvd_increase_pct: float


@dataclass
class SweepResult:
    backend: str
    gate: str
    target: str
    shots: int | None
    seed: int
    entries: list[SweepEntry]

    def series(self) -> list[float]:
        return [e.tvd_increase_pct for e in self.entries]

    def invalid_indices(self) -> list[int]:
        return [e.index for e in self.entries if e.status != MEASURED]


def interpolate_invalid(series) -> list[float]:
    """Fill ``None`` gaps linearly on the index; edge gaps copy the nearest value."""
    values = list(series)
    known = [i for i, v in enumerate(values) if v is not None]
    if not known:
        raise ValueError("cannot interpolate a series with no measured values")
    xs = np.array(known, dtype=float)
    ys = np.array([values[i] for i in known], dtype=float)
    filled = np.interp(np.arange(len(values), dtype=float), xs, ys)
    return [values[i] if values[i] is not None else float(filled[i]) for i in range(len(values))]


def _sweep_item(args):
    exp, target, i = args
    cal = perturb_parameter(exp.calibration, target, i)
    word = f"{parameter_word(cal, target).bits:#010x}"
    try:
        pct = exp.increase(cal, "sweep", target.value, i)
    except PulseHalted as halt:
        log.info("bit %d halted: %s", i, halt.reason)
        return word, None
    return word, pct


def sweep_bits(
    backend: BackendConfig,
    gate: str,
    target,
    shots: int | None = DEFAULT_SHOTS,
    seed: int = 0,
    workers: int | None = 1,
) -> SweepResult:
    target = Target.parse(target)
    exp = Experiment(backend, gate, shots, seed)
    cal = exp.calibration
    if target is Target.AMP_IMAG and not cal.uses_imag:
        raise InvalidTargetError(f"gate {gate} does not use an imaginary amplitude component")
    raw = _pool_map(_sweep_item, [(exp, target, i) for i in range(N_BITS)], workers)
    filled = interpolate_invalid([pct for _, pct in raw])
    entries = [
        SweepEntry(
            index=i,
            bit_class=classify_bit(i).value,
            flipped_word=word,
            status=MEASURED if pct is not None else INTERPOLATED,
            measured_pct=pct,
            tvd_increase_pct=filled[i],
        )
        for i, (word, pct) in enumerate(raw)
    ]
    return SweepResult(backend.name, gate, target.value, shots, seed, entries)


# --------------------------------------------------------------------------- ECC


def decoded_calibration(cal: GateCalibration, scheme: str, flip: int | None, target=Target.AMP_REAL):
    """Encode the stored word, optionally flip one bit, decode; return (cal, report)."""
    encode, decode = ecc.codec(scheme)
    stored = encode(parameter_word(cal, target))
    if flip is not None:
        stored = flip_bit(stored, flip)
    report = decode(stored)
    return with_parameter_word(cal, target, report.corrected_word), report


@dataclass
class EccEntry:
    index: int
    bit_class: str
    protected: bool
    decoded_word: str
    status: str
    pre_ecc_pct: float | None
    post_ecc_measured_pct: float | None
    post_ecc_pct: float


@dataclass
class EccEvalResult:
    backend: str
    gate: str
    scheme: str
    shots: int | None
    seed: int
    nominal_word: str
    nominal_overhead_pct: float
    entries: list[EccEntry]

    def post_series(self) -> list[float]:
        return [e.post_ecc_pct for e in self.entries]


def protected_indices(scheme: str) -> tuple[int, ...]:
    if scheme == "rep3":
        return ecc.REP3_PROTECTED + tuple(i for pair in ecc.REP3_COPIES for i in pair)
    ecc.codec(scheme)
    return ecc.HAMMING_DATA_INDICES + ecc.HAMMING_PARITY_INDICES


def _ecc_item(args):
    exp, scheme, i = args
    nominal = exp.calibration
    pre_cal = perturb_parameter(nominal, Target.AMP_REAL, i)
    try:
        pre = exp.increase(pre_cal, "sweep", Target.AMP_REAL.value, i)
    except PulseHalted:
        pre = None
    cal, _ = decoded_calibration(nominal, scheme, i)
    word = f"{cal.amp.re_word.bits:#010x}"
    try:
        post = exp.increase(cal, "ecc", scheme, i)
    except PulseHalted:
        post = None
    return word, pre, post


def ecc_eval(
    backend: BackendConfig,
    gate: str,
    scheme: str,
    shots: int | None = DEFAULT_SHOTS,
    seed: int = 0,
    workers: int | None = 1,
) -> EccEvalResult:
    ecc.codec(scheme)
    exp = Experiment(backend, gate, shots, seed)
    nominal_cal, _ = decoded_calibration(exp.calibration, scheme, None)
    overhead = exp.increase(nominal_cal, "ecc", scheme, "nominal")
    raw = _pool_map(_ecc_item, [(exp, scheme, i) for i in range(N_BITS)], workers)
    filled = interpolate_invalid([post for _, _, post in raw])
    prot = set(protected_indices(scheme))
    entries = [
        EccEntry(
            index=i,
            bit_class=classify_bit(i).value,
            protected=i in prot,
            decoded_word=word,
            status=MEASURED if post is not None else INTERPOLATED,
            pre_ecc_pct=pre,
            post_ecc_measured_pct=post,
            post_ecc_pct=filled[i],
        )
        for i, (word, pre, post) in enumerate(raw)
    ]
    return EccEvalResult(
        backend.name,
        gate,
        scheme,
        shots,
        seed,
        f"{nominal_cal.amp.re_word.bits:#010x}",
        overhead,
        entries,
    )


# --------------------------------------------------------------------------- Monte Carlo


@dataclass
class McSample:
    run: int
    index: int
    redraws: int
    pre_ecc_pct: float
    post_ecc_pct: float


@dataclass
class MonteCarloResult:
    backend: str
    gate: str
    scheme: str
    runs: int
    shots: int | None
    seed: int
    samples: list[McSample]
    bin_edges: list[float] = field(default_factory=lambda: list(HIST_EDGES))
    pre_hist: list[int] = field(default_factory=list)
    post_hist: list[int] = field(default_factory=list)


def histogram(values, edges=HIST_EDGES) -> list[int]:
    """Counts per bin; values outside the edges land in the end bins."""
    clipped = np.clip(np.asarray(values, dtype=float), edges[0], edges[-1])
    counts, _ = np.histogram(clipped, bins=np.asarray(edges))
    return [int(c) for c in counts]


def _mc_item(args):
    exp, scheme, run, i = args
    pre = exp.increase(perturb_parameter(exp.calibration, Target.AMP_REAL, i), "mc", run, "pre")
    cal, _ = decoded_calibration(exp.calibration, scheme, i)
    post = exp.increase(cal, "mc", run, "post")
    return pre, post


def monte_carlo(
    backend: BackendConfig,
    gate: str,
    runs: int,
    shots: int | None = DEFAULT_SHOTS,
    seed: int = 0,
    scheme: str = "rep3",
    workers: int | None = 1,
) -> MonteCarloResult:
    """Random single flips in the real amplitude, before and after ECC.

    Draws that would halt the pulse (before or after decoding) are redrawn.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    ecc.codec(scheme)
    exp = Experiment(backend, gate, shots, seed)
    nominal = exp.calibration
    halting = {
        i
        for i in range(N_BITS)
        if not _is_playable(perturb_parameter(nominal, Target.AMP_REAL, i))
        or not _is_playable(decoded_calibration(nominal, scheme, i)[0])
    }
    if len(halting) == N_BITS:
        raise ValueError("every bit flip halts the pulse; nothing to sample")
    rng = np.random.default_rng(derive_seed(seed, backend.name, gate, "mc-draws"))
    draws = []
    for run in range(runs):
        redraws = 0
        i = int(rng.integers(N_BITS))
        while i in halting:
            redraws += 1
            i = int(rng.integers(N_BITS))
        if redraws:
            log.info("run %d: redrew %d halting index draw(s)", run, redraws)
        draws.append((i, redraws))
    values = _pool_map(_mc_item, [(exp, scheme, r, i) for r, (i, _) in enumerate(draws)], workers)
    samples = [
        McSample(r, i, n, pre, post) for r, ((i, n), (pre, post)) in enumerate(zip(draws, values))
    ]
    return MonteCarloResult(
        backend.name,
        gate,
        scheme,
        runs,
        shots,
        seed,
        samples,
        pre_hist=histogram([s.pre_ecc_pct for s in samples]),
        post_hist=histogram([s.post_ecc_pct for s in samples]),
    )
