"""Single-bit-flip fault injection into stored quantum gate pulse parameters."""

from .backend import BackendConfig, GateCalibration, ReadoutModel, load_backend
from .ecc import hamming_decode, hamming_encode, majority3, rep3_decode, rep3_encode
from .float32_bits import Float32Word, classify_bit, decode_f32, encode_f32, flip_bit
from .harness import ecc_eval, interpolate_invalid, monte_carlo, sweep_bits
from .pulse_model import ComplexAmp, DragEnvelope, FrameState, check_validity, render_drag
from .quantum_sim import measure, pulse_to_unitary, run_circuit, tvd, tvd_increase_pct

__version__ = "0.1.0"
