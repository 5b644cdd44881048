"""Command-line interface: ``pulseflip <subcommand> [flags]``.

Exit status: 0 report written, 2 usage error, 3 backend configuration
error, 4 invalid gate/target combination, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace

from . import harness, reports
from .backend import ConfigError, UnknownGateError, load_backend
from .ecc import SCHEMES
from .float32_bits import N_BITS, describe, encode_f32, flip_bit
from .pulse_model import ComplexAmp, InvalidTargetError, Target, perturb_parameter, render_drag

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_GATE = 4
EXIT_IO = 5

DEFAULT_SEED = 1234


class UsageError(Exception):
    pass


def _shots(text: str) -> int | None:
    if text.lower() == "exact":
        return None
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'exact', got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("shots must be >= 1")
    return n


def _bit_index(text: str) -> int:
    try:
        i = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bit index must be an integer, got {text!r}") from None
    if not 0 <= i < N_BITS:
        raise argparse.ArgumentTypeError(f"bit index must be in [0, 31], got {i}")
    return i


def _seed(text: str) -> int:
    try:
        s = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= s < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return s


def _workers(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("workers must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pulseflip",
        description="Single-bit-flip fault injection into stored quantum gate pulse parameters.",
    )
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def campaign(name, help_text, target=True):
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("--backend", required=True, help="backend calibration file (JSON)")
        sp.add_argument("--gate", default="X", help="X, SX, H, CNOT or RX(<angle>), e.g. 'RX(pi/3)'")
        if target:
            sp.add_argument("--target", default="real", choices=["real", "imag", "phase"],
                            help="stored parameter to flip (default: real)")
        sp.add_argument("--shots", type=_shots, default=harness.DEFAULT_SHOTS,
                        help="shots per distribution, or 'exact' (default: 1024)")
        sp.add_argument("--seed", type=_seed, default=DEFAULT_SEED,
                        help=f"master seed (default: {DEFAULT_SEED})")
        sp.add_argument("--out", required=True, help="report path")
        sp.add_argument("--format", choices=reports.FORMATS,
                        help="report format (default: from --out suffix)")
        sp.add_argument("--workers", type=_workers, default=None,
                        help="worker processes (default: CPU count)")
        return sp

    campaign("sweep", "Flip each of the 32 bits of one parameter in turn.")
    mc = campaign("mc", "Random single flips in the real amplitude, before and after ECC.",
                  target=False)
    mc.add_argument("--runs", type=int, default=100, help="number of random flips (default: 100)")
    mc.add_argument("--scheme", default="rep3", help="ECC scheme: rep3 or hamming5")
    ec = campaign("ecc", "Per-bit TVD increase with the real amplitude stored under ECC.",
                  target=False)
    ec.add_argument("--scheme", default="rep3", help="ECC scheme: rep3 or hamming5")

    rd = sub.add_parser("render", help="Draw a gate's pulse envelope, optionally with a flipped bit.",
                        description="Draw a gate's pulse envelope as SVG.")
    rd.add_argument("--backend", required=True, help="backend calibration file (JSON)")
    rd.add_argument("--gate", default="H", help="gate whose pulse to draw (default: H)")
    rd.add_argument("--target", default="real", choices=["real", "imag", "phase"],
                    help="parameter to flip (default: real)")
    rd.add_argument("--flip", type=_bit_index, default=None, help="bit index to flip")
    rd.add_argument("--out", required=True, help="SVG output path")
    rd.add_argument("--format", choices=["svg"], default="svg", help="only svg is supported")

    ins = sub.add_parser("inspect-float", help="Show the single-precision bit layout of a value.",
                         description="Show the single-precision bit layout of a value.")
    ins.add_argument("value", help="decimal value")
    ins.add_argument("--flip", type=_bit_index, default=None, help="bit index to flip")
    p.add_argument("-v", "--verbose", action="store_true", help="log per-item decisions to stderr")
    return p


def _fmt_pct(v) -> str:
    return "halted" if v is None else f"{v:8.3f}"


def cmd_sweep(args) -> int:
    backend = load_backend(args.backend)
    result = harness.sweep_bits(backend, args.gate, args.target, args.shots, args.seed,
                                args.workers)
    reports.write_report(result, args.format, args.out)
    measured = [e for e in result.entries if e.measured_pct is not None]
    top = max(measured, key=lambda e: e.measured_pct)
    print(f"sweep {backend.name} {args.gate} {args.target}  shots={args.shots or 'exact'}  "
          f"seed={args.seed}")
    print(f"max increase : {top.measured_pct:.3f}% at bit {top.index}")
    print(f"invalid bits : {result.invalid_indices() or 'none'}")
    print("bit  class          status                 tvd_increase_pct")
    for e in result.entries:
        print(f"{e.index:3d}  {e.bit_class:<14} {e.status:<22} {e.tvd_increase_pct:8.3f}")
    print(f"report       : {args.out}")
    return EXIT_OK


def cmd_mc(args) -> int:
    if args.runs < 1:
        raise UsageError("--runs must be >= 1")
    if args.scheme not in SCHEMES:
        raise UsageError(f"unknown scheme {args.scheme!r}; choose from {sorted(SCHEMES)}")
    backend = load_backend(args.backend)
    result = harness.monte_carlo(backend, args.gate, args.runs, args.shots, args.seed,
                                 args.scheme, args.workers)
    reports.write_report(result, args.format, args.out)
    pre = [s.pre_ecc_pct for s in result.samples]
    post = [s.post_ecc_pct for s in result.samples]
    redraws = sum(s.redraws for s in result.samples)
    print(f"mc {backend.name} {args.gate}  runs={args.runs}  scheme={args.scheme}  "
          f"shots={args.shots or 'exact'}  seed={args.seed}")
    print(f"pre-ECC  : max {max(pre):.3f}%  median {sorted(pre)[len(pre) // 2]:.3f}%")
    print(f"post-ECC : max {max(post):.3f}%  median {sorted(post)[len(post) // 2]:.3f}%")
    print(f"redraws of halting indices: {redraws}")
    print(f"report   : {args.out}")
    return EXIT_OK


def cmd_ecc(args) -> int:
    if args.scheme not in SCHEMES:
        raise UsageError(f"unknown scheme {args.scheme!r}; choose from {sorted(SCHEMES)}")
    backend = load_backend(args.backend)
    result = harness.ecc_eval(backend, args.gate, args.scheme, args.shots, args.seed, args.workers)
    reports.write_report(result, args.format, args.out)
    print(f"ecc {backend.name} {args.gate} {args.scheme}  shots={args.shots or 'exact'}  "
          f"seed={args.seed}")
    print(f"nominal overhead: {result.nominal_overhead_pct:.3f}%")
    print("bit  protected  pre_ecc_pct  post_ecc_pct")
    for e in result.entries:
        print(f"{e.index:3d}  {'yes' if e.protected else 'no ':<9}  {_fmt_pct(e.pre_ecc_pct)}"
              f"     {_fmt_pct(e.post_ecc_measured_pct)}")
    print(f"report: {args.out}")
    return EXIT_OK


def cmd_render(args) -> int:
    backend = load_backend(args.backend)
    nominal = backend.calibration(args.gate)
    panels = [("nominal", nominal)]
    if args.flip is not None:
        flipped = perturb_parameter(nominal, Target.parse(args.target), args.flip)
        panels.insert(0, (f"bit {args.flip} of {args.target} part flipped", flipped))

    def draw(fig):
        for k, (label, cal) in enumerate(panels):
            ax = fig.add_subplot(len(panels), 1, k + 1)
            s = render_drag(cal.envelope)
            ax.plot(s.real, color="tab:blue", label="I (real)")
            ax.plot(s.imag, color="tab:orange", label="Q (imag)")
            ax.set_title(f"{args.gate} on {backend.name}: {label}, amp = {cal.amp.value!r}",
                         fontsize=9)
            ax.set_ylabel("amplitude")
            ax.legend(loc="upper right", fontsize=7)
        ax.set_xlabel("sample")
        fig.tight_layout()

    text = reports.render_svg(draw, figsize=(8, 3 * len(panels)))
    reports.atomic_write(args.out, text)
    # I-channel envelope peak, i.e. the real amplitude times the Gaussian peak
    peaks = {}
    for label, cal in panels:
        i_only = replace(cal.envelope, amp=ComplexAmp(cal.amp.re_word))
        peaks[label] = float(abs(render_drag(i_only).real).max())
        print(f"{label:<32} I-envelope peak = {peaks[label]!r}")
    if len(panels) == 2:
        a, b = peaks.values()
        print(f"flipped / nominal I peak ratio: {(a / b if b else math.inf)!r}")
    print(f"report: {args.out}")
    return EXIT_OK


def cmd_inspect_float(args) -> int:
    try:
        word = encode_f32(float(args.value))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(describe(word))
    if args.flip is not None:
        print()
        print(f"after flipping bit {args.flip}:")
        print(describe(flip_bit(word, args.flip)))
    return EXIT_OK


COMMANDS = {
    "sweep": cmd_sweep,
    "mc": cmd_mc,
    "ecc": cmd_ecc,
    "render": cmd_render,
    "inspect-float": cmd_inspect_float,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except ConfigError as exc:
        print(f"pulseflip: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvalidTargetError, UnknownGateError) as exc:
        print(f"pulseflip: invalid gate/target: {exc}", file=sys.stderr)
        return EXIT_GATE
    except OSError as exc:
        print(f"pulseflip: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
