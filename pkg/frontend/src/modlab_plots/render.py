"""Render convergence, trace, and residual-order figures from modlab CSVs.

Input schemas (produced by the solver package):

* convergence:      epsilon, sup_r_hse, sup_rt_hse, sup_rtt_hse
  with a fits CSV:  norm, slope, intercept, r_squared
* trace:            t plus any numeric diagnostic columns
  (e.g. r_hse, lambda, energy, ... or the penalty ledger columns)
* residual-order:   depth, epsilon, sup_res_l2
  with a fits CSV:  depth, slope, intercept, r_squared

Slopes are read from the fits CSV and printed on the figure verbatim; this
module never refits anything.  Rendering is deterministic: fixed style, a
fixed SVG hash salt, and no date metadata, so identical inputs give
byte-identical vector output.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

matplotlib.rcParams.update({
    "svg.hashsalt": "modlab-plots",
    "svg.fonttype": "none",        # keep annotations as text, not paths
    "figure.figsize": (6.0, 4.2),
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
})

KINDS = ("convergence", "trace", "residual-order")


class SchemaError(Exception):
    """Input CSV does not match the documented schema."""


@dataclass(frozen=True)
class PlotJob:
    """One figure: input CSV path(s), figure kind, output image path."""

    inputs: tuple[str, ...]
    kind: str
    out: str

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; "
                              f"choose from {KINDS}")
        if not self.inputs:
            raise SchemaError("at least one input CSV is required")


def _read_rows(path: str) -> list[dict[str, str]]:
    p = Path(path)
    if not p.exists():
        raise SchemaError(f"input file {path} does not exist")
    with open(p, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _require(rows: list[dict], cols: tuple[str, ...], path: str) -> None:
    have = set(rows[0])
    missing = [c for c in cols if c not in have]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing} "
                          f"(have {sorted(have)})")


def _floats(rows: list[dict], col: str) -> list[float]:
    try:
        return [float(r[col]) for r in rows]
    except ValueError as exc:
        raise SchemaError(f"column {col!r}: non-numeric cell ({exc})") from exc


def _save(fig, out: str) -> None:
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, metadata={"Date": None} if path.suffix == ".svg" else None)
    plt.close(fig)


def _slope_label(slope_text: str) -> str:
    return f"slope = {float(slope_text):.6f}"


def _render_convergence(job: PlotJob) -> None:
    rows = _read_rows(job.inputs[0])
    _require(rows, ("epsilon", "sup_r_hse", "sup_rt_hse", "sup_rtt_hse"),
             job.inputs[0])
    if len(job.inputs) < 2:
        raise SchemaError("convergence figures need the fits CSV as the "
                          "second input (slopes are never recomputed here)")
    fits = _read_rows(job.inputs[1])
    _require(fits, ("norm", "slope"), job.inputs[1])
    slopes = {r["norm"]: r["slope"] for r in fits}
    eps = _floats(rows, "epsilon")
    fig, ax = plt.subplots()
    for col, name, marker in (("sup_r_hse", "r", "o"),
                              ("sup_rt_hse", "rt", "s"),
                              ("sup_rtt_hse", "rtt", "^")):
        label = name
        if name in slopes:
            label += f" ({_slope_label(slopes[name])})"
        ax.loglog(eps, _floats(rows, col), marker=marker, label=label)
    ax.set_xlabel("eps")
    ax.set_ylabel("sup-t weighted remainder norm")
    ax.set_title("remainder convergence")
    ax.legend()
    _save(fig, job.out)


def _render_trace(job: PlotJob) -> None:
    rows = _read_rows(job.inputs[0])
    _require(rows, ("t",), job.inputs[0])
    t = _floats(rows, "t")
    cols = [c for c in rows[0] if c != "t"]
    if not cols:
        raise SchemaError(f"{job.inputs[0]}: no diagnostic columns besides t")
    fig, ax = plt.subplots()
    for col in cols:
        vals = _floats(rows, col)
        ax.plot(t, vals, label=col)
    ax.set_xlabel("t")
    ax.set_yscale("symlog", linthresh=1e-12)
    ax.set_title("diagnostic traces")
    ax.legend(fontsize=8)
    _save(fig, job.out)


def _render_residual_order(job: PlotJob) -> None:
    rows = _read_rows(job.inputs[0])
    _require(rows, ("depth", "epsilon", "sup_res_l2"), job.inputs[0])
    slopes: dict[str, str] = {}
    if len(job.inputs) > 1:
        fits = _read_rows(job.inputs[1])
        _require(fits, ("depth", "slope"), job.inputs[1])
        slopes = {str(int(float(r["depth"]))): r["slope"] for r in fits}
    by_depth: dict[str, list[tuple[float, float]]] = {}
    for r in rows:
        d = str(int(float(r["depth"])))
        by_depth.setdefault(d, []).append((float(r["epsilon"]),
                                           float(r["sup_res_l2"])))
    fig, ax = plt.subplots()
    for d in sorted(by_depth):
        pts = sorted(by_depth[d])
        label = f"depth {d}"
        if d in slopes:
            label += f" ({_slope_label(slopes[d])})"
        ax.loglog([p[0] for p in pts], [p[1] for p in pts], marker="o",
                  label=label)
    ax.set_xlabel("eps")
    ax.set_ylabel("sup-t L2 residual")
    ax.set_title("approximate-equation residual vs corrector depth")
    ax.legend()
    _save(fig, job.out)


_RENDERERS = {
    "convergence": _render_convergence,
    "trace": _render_trace,
    "residual-order": _render_residual_order,
}


def render(job: PlotJob) -> str:
    """Render one figure; returns the output path."""
    _RENDERERS[job.kind](job)
    return job.out
