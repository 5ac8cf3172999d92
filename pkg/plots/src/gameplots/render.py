"""Render figures from the experiment summary CSV.

The input contract is the summary file written by `dirgame experiment`:
header ``n,count,mean,var,t,tail,tail_ucl,bound,verdict,family`` with one
row per (horizon, tail threshold).  Three figure kinds:

* ``convergence``: mean value per horizon with confidence bars and the
  fitted ``v + c * n^(-delta)`` curve.
* ``tails``: log empirical tail against the exponent of its theoretical
  bound, with the ``y = -x`` reference line; concentration puts every
  point below the line.
* ``oscillation``: mean value across horizons of a branch-interval tree
  with the branchy regime shaded.

Rendering is read-only over the input; identical CSV + spec yield
identical image bytes on a pinned matplotlib.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

KINDS = ("convergence", "tails", "oscillation")

REQUIRED_COLUMNS = {
    "convergence": ("n", "count", "mean", "var"),
    "tails": ("n", "t", "tail", "bound"),
    "oscillation": ("n", "count", "mean", "var"),
}

Z95 = 1.96
Z99 = 2.5758


class RenderError(Exception):
    pass


@dataclass
class FigureSpec:
    input_csv: str
    kind: str
    output: str
    delta: float = 0.25
    title: str | None = None
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None
    branch_end: float | None = None  # oscillation regime boundary
    dpi: int = 150


def load_rows(path: str, kind: str) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in REQUIRED_COLUMNS[kind]:
            if col not in header:
                raise RenderError(f"input is missing required column: {col}")
        rows = list(reader)
    if not rows:
        raise RenderError("input contains no data rows")
    return rows


def _per_horizon(rows: list[dict]):
    """One (mean, variance, count) per horizon; rows repeat them per t."""
    seen: dict[int, tuple[float, float, int]] = {}
    for r in rows:
        n = int(r["n"])
        if n not in seen:
            seen[n] = (float(r["mean"]), float(r["var"]), int(r["count"]))
    ns = sorted(seen)
    mean = np.array([seen[n][0] for n in ns])
    var = np.array([seen[n][1] for n in ns])
    count = np.array([seen[n][2] for n in ns])
    return np.array(ns, dtype=float), mean, var, count


def _apply_axes(ax, spec: FigureSpec, default_title: str):
    ax.set_title(spec.title or default_title)
    if spec.xlim:
        ax.set_xlim(*spec.xlim)
    if spec.ylim:
        ax.set_ylim(*spec.ylim)


def _render_convergence(rows, spec: FigureSpec, ax) -> dict:
    ns, mean, var, count = _per_horizon(rows)
    err = Z95 * np.sqrt(var / np.maximum(count, 1))
    ax.errorbar(ns, mean, yerr=err, fmt="o", capsize=3, label="mean value")
    meta: dict = {"n": ns.tolist(), "mean": mean.tolist()}
    if len(ns) >= 2:
        design = np.column_stack([np.ones_like(ns), ns ** (-spec.delta)])
        coef, *_ = np.linalg.lstsq(design, mean, rcond=None)
        grid = np.linspace(ns.min(), ns.max(), 200)
        ax.plot(
            grid,
            coef[0] + coef[1] * grid ** (-spec.delta),
            "-",
            label=f"fit: {coef[0]:.3f} + {coef[1]:.3f} n^(-{spec.delta:g})",
        )
        meta["fit"] = [float(coef[0]), float(coef[1])]
    ax.set_xlabel("horizon n")
    ax.set_ylabel("mean value")
    ax.legend()
    _apply_axes(ax, spec, "value convergence")
    return meta


def _render_tails(rows, spec: FigureSpec, ax) -> dict:
    xs, ys, ns, zero_tails = [], [], [], 0
    for r in rows:
        if not r["bound"]:
            continue  # rows without a bound check
        bound = float(r["bound"])
        tail = float(r["tail"])
        if bound <= 0:
            continue
        x = math.log(2.0 / bound)  # = t^2 n^2 / (2 h(n))
        if tail > 0:
            xs.append(x)
            ys.append(math.log(tail))
            ns.append(int(r["n"]))
        else:
            zero_tails += 1
    if not xs and zero_tails == 0:
        raise RenderError("no rows carry a tail bound; nothing to plot")
    if xs:
        sc = ax.scatter(xs, ys, c=ns, cmap="viridis", label="log empirical tail")
        plt.colorbar(sc, ax=ax, label="horizon n")
        lo, hi = min(xs + [0.0]), max(xs)
    else:
        lo, hi = 0.0, 1.0
        ax.text(0.5, 0.5, "all empirical tails are zero", transform=ax.transAxes,
                ha="center", va="center")
    ref = np.linspace(lo, hi * 1.05 + 1e-9, 50)
    ax.plot(ref, -ref, "k--", label="y = -x")
    ax.set_xlabel("bound exponent  t^2 n^2 / (2 h(n))")
    ax.set_ylabel("log tail frequency")
    ax.legend()
    _apply_axes(ax, spec, "concentration tails")
    return {"points": len(xs), "zero_tails": zero_tails}


def _render_oscillation(rows, spec: FigureSpec, ax) -> dict:
    ns, mean, var, count = _per_horizon(rows)
    err = Z99 * np.sqrt(var / np.maximum(count, 1))
    ax.errorbar(ns, mean, yerr=err, fmt="o-", capsize=3, label="mean value")
    boundary = spec.branch_end
    if boundary is None and len(ns) > 1:
        boundary = float(ns[0]) * 1.5
    if boundary is not None:
        ax.axvspan(ns.min() * 0.9, boundary, alpha=0.15, color="tab:red",
                   label="branchy regime")
        ax.axvspan(boundary, ns.max() * 1.05, alpha=0.15, color="tab:blue",
                   label="path regime")
    ax.set_xscale("log")
    ax.set_xlabel("horizon n")
    ax.set_ylabel("mean value")
    ax.legend()
    _apply_axes(ax, spec, "value oscillation across regimes")
    return {"n": ns.tolist(), "mean": mean.tolist()}


def render(spec: FigureSpec) -> dict:
    """Render one figure; returns the computed plot metadata."""
    if spec.kind not in KINDS:
        raise RenderError(f"unknown figure kind {spec.kind!r}")
    rows = load_rows(spec.input_csv, spec.kind)
    fig, ax = plt.subplots(figsize=(7, 4.5), constrained_layout=True)
    try:
        if spec.kind == "convergence":
            meta = _render_convergence(rows, spec, ax)
        elif spec.kind == "tails":
            meta = _render_tails(rows, spec, ax)
        else:
            meta = _render_oscillation(rows, spec, ax)
        fig.savefig(spec.output, dpi=spec.dpi, metadata={"Software": "gameplots"})
    finally:
        plt.close(fig)
    return meta


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gameplots", description=__doc__)
    p.add_argument("--input", required=True, help="summary CSV path")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--output", required=True, help="image file to write")
    p.add_argument("--delta", type=float, default=0.25, help="fit exponent")
    p.add_argument("--title", default=None)
    p.add_argument("--xlim", type=float, nargs=2, default=None)
    p.add_argument("--ylim", type=float, nargs=2, default=None)
    p.add_argument("--branch-end", type=float, default=None,
                   help="regime boundary for oscillation shading")
    p.add_argument("--dpi", type=int, default=150)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        input_csv=args.input,
        kind=args.kind,
        output=args.output,
        delta=args.delta,
        title=args.title,
        xlim=tuple(args.xlim) if args.xlim else None,
        ylim=tuple(args.ylim) if args.ylim else None,
        branch_end=args.branch_end,
        dpi=args.dpi,
    )
    try:
        render(spec)
    except (RenderError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
