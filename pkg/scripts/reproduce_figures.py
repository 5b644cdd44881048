#!/usr/bin/env python3
"""Run every campaign on the shipped backends and write reports to results/.

    python scripts/reproduce_figures.py [--shots N|exact] [--seed S] [--out DIR]
"""

import argparse
import time
from pathlib import Path

from pulseflip import reports
from pulseflip.backend import load_backend
from pulseflip.cli import main as cli_main
from pulseflip.harness import ecc_eval, monte_carlo, sweep_bits

ROOT = Path(__file__).resolve().parent.parent
GATES = ["X", "SX", "H", "CNOT", "RX(pi/4)", "RX(pi/3)"]


def slug(gate: str) -> str:
    return gate.lower().replace("(", "_").replace(")", "").replace("/", "_")


def save(result, out: Path, stem: str):
    for fmt in ("csv", "json", "svg"):
        reports.write_report(result, fmt, out / f"{stem}.{fmt}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--shots", default="1024")
    ap.add_argument("--seed", type=int, default=1234)
    ap.add_argument("--out", type=Path, default=ROOT / "results")
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()
    shots = None if args.shots == "exact" else int(args.shots)
    args.out.mkdir(parents=True, exist_ok=True)
    t0 = time.time()

    backends = {p.stem: load_backend(p) for p in sorted((ROOT / "configs").glob("*.json"))}
    valencia = backends["valencia-like"]

    print("backend comparison, real amplitude (max measured / invalid bits)")
    for name, b in backends.items():
        for gate in ("X", "H"):
            r = sweep_bits(b, gate, "real", shots, args.seed, args.workers)
            save(r, args.out, f"sweep_{name}_{slug(gate)}_real")
            top = max(e.measured_pct for e in r.entries if e.measured_pct is not None)
            print(f"  {name:<14} {gate:<3} {top:7.2f}%  {r.invalid_indices()}")

    print("per-gate sweeps on valencia-like (mean % over exponent / 9-17 / 18-31)")
    for target in ("real", "imag", "phase"):
        for gate in GATES:
            cal = valencia.calibration(gate)
            if target == "imag" and not cal.uses_imag:
                continue
            r = sweep_bits(valencia, gate, target, shots, args.seed, args.workers)
            save(r, args.out, f"sweep_valencia_{slug(gate)}_{target}")
            s = r.series()
            means = [sum(s[a:b]) / (b - a) for a, b in ((1, 9), (9, 18), (18, 32))]
            print(f"  {target:<5} {gate:<9} " + " / ".join(f"{m:7.2f}" for m in means))

    print("ECC on the real amplitude (max post-ECC %, nominal overhead %)")
    for scheme in ("rep3", "hamming5"):
        for gate in GATES:
            r = ecc_eval(valencia, gate, scheme, shots, args.seed, args.workers)
            save(r, args.out, f"ecc_valencia_{slug(gate)}_{scheme}")
            worst = max(e.post_ecc_pct for e in r.entries)
            print(f"  {scheme:<8} {gate:<9} {worst:7.2f}  {r.nominal_overhead_pct:6.2f}")

    mc = monte_carlo(valencia, "X", 100, shots, args.seed, "rep3", args.workers)
    save(mc, args.out, "mc_valencia_x_rep3")
    print(f"Monte Carlo, 100 runs: pre max {max(s.pre_ecc_pct for s in mc.samples):.2f}%, "
          f"post max {max(s.post_ecc_pct for s in mc.samples):.2f}%")

    cli_main(["render", "--backend", str(ROOT / "configs" / "valencia-like.json"), "--gate", "H",
              "--flip", "3", "--out", str(args.out / "render_valencia_h_flip3.svg")])
    print(f"done in {time.time() - t0:.1f}s -> {args.out}")


if __name__ == "__main__":
    main()
