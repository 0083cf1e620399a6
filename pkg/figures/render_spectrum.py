#!/usr/bin/env python3
"""Render spectral scatter figures from blockspec CLI output files.

Reads the documented CSV/JSON contracts only — bands.json from ``blockspec
scan``, spectrum.csv from ``blockspec spectrum`` and optionally
edge_modes.json from ``blockspec edge`` — and draws the eigenvalues of the
finite sections against their index, with certified gaps and each block's
non-hyperbolic region shaded.

Usage: python3 render_spectrum.py CONFIG.json

Config keys:
  bands        path to bands.json (required)
  spectrum     path to spectrum.csv (required; may contain zero rows)
  edge_modes   path to edge_modes.json (optional)
  output       image path, .png or .svg (required)
  palette      optional mapping {"gap": color, "shared": color,
               "hybrid": color, "points": color, "edge": color}
  lambda_range optional [lo, hi] axis limits
"""

from __future__ import annotations

import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
# deterministic output bytes for identical inputs
matplotlib.rcParams["svg.hashsalt"] = "render_spectrum"
import matplotlib.pyplot as plt

_DEFAULT_PALETTE = {
    "gap": "#d9d9d9",
    "shared": "#c6dbef",
    "hybrid": "#fdd0a2",
    "points": "#08306b",
    "edge": "#d7301f",
}


@dataclass(frozen=True)
class PlotSpec:
    bands: Path
    spectrum: Path
    output: Path
    edge_modes: Path | None = None
    palette: dict = field(default_factory=dict)
    lambda_range: tuple[float, float] | None = None

    @classmethod
    def from_config(cls, config: dict, base: Path) -> "PlotSpec":
        def path_of(key, required=True):
            raw = config.get(key)
            if raw is None:
                if required:
                    raise ValueError(f"config key {key!r} is required")
                return None
            p = Path(raw)
            return p if p.is_absolute() else base / p

        rng = config.get("lambda_range")
        spec = cls(
            bands=path_of("bands"),
            spectrum=path_of("spectrum"),
            output=path_of("output"),
            edge_modes=path_of("edge_modes", required=False),
            palette={**_DEFAULT_PALETTE, **config.get("palette", {})},
            lambda_range=None if rng is None else (float(rng[0]), float(rng[1])),
        )
        for p in (spec.bands, spec.spectrum):
            if not p.is_file():
                raise ValueError(f"input file not found: {p}")
        if spec.edge_modes is not None and not spec.edge_modes.is_file():
            raise ValueError(f"input file not found: {spec.edge_modes}")
        if spec.output.suffix not in (".png", ".svg"):
            raise ValueError("output must end in .png or .svg")
        return spec


def read_bands(path: Path) -> list[dict]:
    data = json.loads(path.read_text(encoding="utf-8"))
    return data["intervals"]


def read_spectrum(path: Path) -> list[tuple[int, int, float]]:
    """(seed, index, lambda) rows of a spectrum.csv file."""
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    for rec in csv.DictReader(lines):
        rows.append((int(rec["seed"]), int(rec["index"]), float(rec["lambda"])))
    return rows


def read_edge_modes(path: Path) -> list[float]:
    data = json.loads(path.read_text(encoding="utf-8"))
    return [float(m["lambda"]) for m in data["modes"]]


def render_spectrum_figure(spec: PlotSpec):
    """Draw the figure and save it; returns (figure, plotted lambda values)."""
    intervals = read_bands(spec.bands)
    rows = read_spectrum(spec.spectrum)
    edge_lams = [] if spec.edge_modes is None else read_edge_modes(spec.edge_modes)
    pal = {**_DEFAULT_PALETTE, **spec.palette}

    num_blocks = 0
    for iv in intervals:
        num_blocks = max(num_blocks, max(iv["nonhyperbolic_blocks"], default=0))

    fig, ax = plt.subplots(figsize=(8, 5))
    for iv in intervals:
        lo, hi, verdict = iv["lambda_lo"], iv["lambda_hi"], iv["verdict"]
        nonhyp = set(iv["nonhyperbolic_blocks"])
        if verdict == "CertifiedGap":
            ax.axvspan(lo, hi, color=pal["gap"], alpha=0.8, lw=0, zorder=0)
        elif verdict == "InSpectrum":
            # all blocks pass -> shared pass band; otherwise the spectrum
            # here comes from hybridisation between differing blocks
            shared = num_blocks > 0 and nonhyp == set(range(1, num_blocks + 1))
            ax.axvspan(
                lo, hi,
                color=pal["shared"] if shared else pal["hybrid"],
                alpha=0.6, lw=0, zorder=0,
            )
        # per-block strip under the main axis: where each block alone is
        # non-hyperbolic
        for d in nonhyp:
            ax.axvspan(
                lo, hi,
                ymin=0.0, ymax=0.025 * d,
                color=plt.cm.tab10((d - 1) % 10),
                alpha=0.9, lw=0, zorder=1,
            )

    lams = [lam for _, _, lam in rows]
    idx = [i for _, i, _ in rows]
    ax.scatter(lams, idx, s=4, color=pal["points"], zorder=2, label="eigenvalues")
    for k, lam in enumerate(edge_lams):
        ax.axvline(lam, color=pal["edge"], lw=1.2, ls="--", zorder=3)
        ax.plot(
            [lam], [0.5 * (max(idx) if idx else 1)],
            marker="*", ms=12, color=pal["edge"], zorder=4,
            label="edge mode" if k == 0 else None,
        )
    if spec.lambda_range is not None:
        ax.set_xlim(*spec.lambda_range)
    ax.set_xlabel(r"$\lambda$")
    ax.set_ylabel("eigenvalue index")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    if spec.output.suffix == ".svg":
        fig.savefig(spec.output, metadata={"Date": None})
    else:
        fig.savefig(spec.output)
    return fig, lams


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: render_spectrum.py CONFIG.json", file=sys.stderr)
        return 2
    cfg_path = Path(argv[0])
    try:
        config = json.loads(cfg_path.read_text(encoding="utf-8"))
        spec = PlotSpec.from_config(config, cfg_path.resolve().parent)
        fig, _ = render_spectrum_figure(spec)
        plt.close(fig)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
