"""Report serialization: csv, json and svg.

JSON documents carry a top-level ``format`` tag (``pulseflip/<kind>/1``)
and mirror the result dataclasses field for field; ``shots`` is ``null``
for exact-mode runs. Floats are written as shortest round-trip decimals,
so ``read_report(write_report(r))`` reproduces ``r`` exactly.

Files are written to a temporary sibling and renamed into place; a failed
write never leaves a partial report behind.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import asdict, fields
from pathlib import Path

from .harness import (
    MEASURED,
    EccEntry,
    EccEvalResult,
    McSample,
    MonteCarloResult,
    SweepEntry,
    SweepResult,
)

FORMATS = ("csv", "json", "svg")
_KINDS = {SweepResult: "sweep", MonteCarloResult: "montecarlo", EccEvalResult: "ecc"}
_ROWS = {SweepResult: ("entries", SweepEntry), MonteCarloResult: ("samples", McSample),
         EccEvalResult: ("entries", EccEntry)}


class ReportError(OSError):
    pass


def format_tag(result) -> str:
    return f"pulseflip/{_KINDS[type(result)]}/1"


def to_dict(result) -> dict:
    return {"format": format_tag(result), **asdict(result)}


def from_dict(doc: dict):
    kind = doc.get("format", "")
    for cls, name in _KINDS.items():
        if kind == f"pulseflip/{name}/1":
            break
    else:
        raise ValueError(f"unknown report format {kind!r}")
    rows_field, row_cls = _ROWS[cls]
    kwargs = {f.name: doc[f.name] for f in fields(cls)}
    kwargs[rows_field] = [row_cls(**r) for r in doc[rows_field]]
    return cls(**kwargs)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(result) -> str:
    rows_field, row_cls = _ROWS[type(result)]
    meta = [f.name for f in fields(type(result)) if f.name not in (rows_field, "bin_edges",
                                                                   "pre_hist", "post_hist")]
    cols = [f.name for f in fields(row_cls)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(meta + cols)
    head = [_fmt(getattr(result, m)) for m in meta]
    for row in getattr(result, rows_field):
        w.writerow(head + [_fmt(getattr(row, c)) for c in cols])
    return buf.getvalue()


def to_json(result) -> str:
    return json.dumps(to_dict(result), indent=2, allow_nan=False) + "\n"


def _svg_sweep(result, ax):
    xs = [e.index for e in result.entries]
    ax.plot(xs, [e.tvd_increase_pct for e in result.entries], "-", color="tab:blue", lw=1.2)
    meas = [e for e in result.entries if e.status == MEASURED]
    gaps = [e for e in result.entries if e.status != MEASURED]
    ax.plot([e.index for e in meas], [e.tvd_increase_pct for e in meas], "o", color="tab:blue",
            ms=4, label="measured")
    if gaps:
        ax.plot([e.index for e in gaps], [e.tvd_increase_pct for e in gaps], "o", mfc="white",
                mec="tab:red", ms=6, label="invalid pulse (interpolated)")
    ax.axvspan(0.5, 17.5, color="0.85", zorder=0)
    ax.set_xlabel("bit index (0 = sign, 1-8 exponent, 9-31 mantissa)")
    ax.set_ylabel("TVD increase (%)")
    ax.set_title(f"{result.backend}: {result.gate}, {result.target} part")


def _svg_ecc(result, ax):
    xs = [e.index for e in result.entries]
    pre = [e.pre_ecc_pct for e in result.entries]
    ax.plot(xs, [float("nan") if v is None else v for v in pre], "o-", color="tab:red", ms=3,
            label="without ECC")
    ax.plot(xs, result.post_series(), "s-", color="tab:green", ms=3, label=f"with {result.scheme}")
    gaps = [e for e in result.entries if e.status != MEASURED]
    if gaps:
        ax.plot([e.index for e in gaps], [e.post_ecc_pct for e in gaps], "o", mfc="white",
                mec="black", ms=6, label="invalid pulse (interpolated)")
    ax.set_xlabel("bit index")
    ax.set_ylabel("TVD increase (%)")
    ax.set_title(f"{result.backend}: {result.gate}, {result.scheme} "
                 f"(nominal overhead {result.nominal_overhead_pct:.2f}%)")


def _svg_mc(result, ax):
    edges = result.bin_edges
    centers = [(a + b) / 2 for a, b in zip(edges, edges[1:])]
    width = (edges[1] - edges[0]) * 0.45
    ax.bar([c - width / 2 for c in centers], result.pre_hist, width, color="tab:red",
           label="before ECC")
    ax.bar([c + width / 2 for c in centers], result.post_hist, width, color="tab:green",
           label=f"after {result.scheme}")
    ax.set_xlabel("TVD increase (%)")
    ax.set_ylabel("runs")
    ax.set_title(f"{result.backend}: {result.runs} random flips, {result.gate} real amplitude")


def render_svg(draw, figsize=(8, 4)) -> str:
    """Run ``draw(fig)`` on a fresh figure and return reproducible SVG text."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "pulseflip", "svg.fonttype": "none"}):
        fig = plt.figure(figsize=figsize)
        try:
            draw(fig)
            buf = io.StringIO()
            fig.savefig(buf, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    return buf.getvalue()


def to_svg(result) -> str:
    drawer = {SweepResult: _svg_sweep, EccEvalResult: _svg_ecc, MonteCarloResult: _svg_mc}[
        type(result)
    ]

    def draw(fig):
        ax = fig.add_subplot(111)
        drawer(result, ax)
        ax.legend(loc="best", fontsize=8)
        fig.tight_layout()

    return render_svg(draw)


def atomic_write(path, text: str) -> Path:
    path = Path(path)
    parent = path.parent if str(path.parent) else Path(".")
    try:
        fd, tmp = tempfile.mkstemp(dir=parent, prefix=f".{path.name}.", suffix=".tmp")
    except OSError as exc:
        raise ReportError(f"cannot write report to {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        Path(tmp).unlink(missing_ok=True)
        raise ReportError(f"cannot write report to {path}: {exc}") from exc
    return path


def infer_format(path, fmt: str | None = None) -> str:
    fmt = fmt or Path(path).suffix.lstrip(".").lower()
    if fmt not in FORMATS:
        raise ValueError(f"unknown report format {fmt!r}; use one of {FORMATS}")
    return fmt


def write_report(result, fmt: str | None, path) -> Path:
    fmt = infer_format(path, fmt)
    text = {"csv": to_csv, "json": to_json, "svg": to_svg}[fmt](result)
    return atomic_write(path, text)


def read_report(path):
    """Load a JSON report back into its result dataclass."""
    return from_dict(json.loads(Path(path).read_text()))
