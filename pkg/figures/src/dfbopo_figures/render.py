"""Render publication-style figures from dfbopo CLI CSV files.

Each recipe maps one CSV schema to one plot; the scripts never recompute any
physics. Supported figure ids:

* ``fig3_left``  - squeezing vs pump-power product, one curve per geometry
                   (cavity-squeeze CSV, optionally with a leading sweep column)
* ``fig3_right`` - threshold pump product over (L2, L3) on a log color scale
                   (threshold CSV)
* ``fig4``       - forward photon-number profile with the defect at z = 0
                   (profile CSV)
* ``spectrum``   - normalized grating transmission vs detuning
                   (grating-spectrum CSV)
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
from matplotlib.colors import LogNorm  # noqa: E402

plt.rcParams.update({
    "figure.figsize": (4.8, 3.4),
    "figure.dpi": 150,
    "savefig.dpi": 150,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
})

SCHEMAS = {
    "fig3_left": ["pump_product", "squeezing_db_b", "antisqueezing_db_b",
                  "squeezing_db_g", "n_b", "n_g", "status"],
    "fig3_right": ["L2", "L3", "pump_product_threshold", "status"],
    "fig4": ["z", "n_forward", "n_backward"],
    "spectrum": ["rho", "transmission", "reflection", "photon_gain", "status"],
}


class SchemaError(ValueError):
    """Input CSV does not carry the schema the recipe expects."""


@dataclass(frozen=True)
class FigureRecipe:
    figure: str
    input_path: str
    output_path: str
    defect: float | None = None    # fig4 axis shift; inferred when omitted

    def __post_init__(self):
        if self.figure not in SCHEMAS:
            raise SchemaError(f"unknown figure id {self.figure!r}; "
                              f"choose from {sorted(SCHEMAS)}")


def _read_rows(recipe: FigureRecipe):
    try:
        with open(recipe.input_path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError(f"{recipe.input_path}: file is empty")
            rows = list(reader)
    except OSError as exc:
        raise SchemaError(f"cannot read {recipe.input_path}: {exc}")

    expected = SCHEMAS[recipe.figure]
    if recipe.figure == "fig3_left":
        # zero or one leading sweep column ahead of the fixed block
        if header == expected:
            lead = None
        elif len(header) == len(expected) + 1 and header[1:] == expected:
            lead = header[0]
        else:
            raise SchemaError(
                f"{recipe.input_path}: header {header} does not end with the "
                f"cavity-squeeze schema {expected}")
    else:
        if header != expected:
            raise SchemaError(
                f"{recipe.input_path}: header {header} does not match the "
                f"{recipe.figure} schema {expected}")
        lead = None
    if not rows:
        raise SchemaError(f"{recipe.input_path}: no data rows")
    return lead, rows


def _floats(row, indices):
    return [float(row[i]) for i in indices]


def _render_fig3_left(recipe: FigureRecipe, lead, rows):
    offset = 1 if lead else 0
    fig, ax = plt.subplots()
    curves: dict = {}
    for row in rows:
        if row[offset + 6] != "ok":
            continue
        key = row[0] if lead else ""
        pump, sq = _floats(row, [offset + 0, offset + 1])
        curves.setdefault(key, ([], []))
        curves[key][0].append(pump)
        curves[key][1].append(sq)
    if not curves:
        raise SchemaError(f"{recipe.input_path}: no usable (status ok) rows")
    for key in sorted(curves):
        x, y = curves[key]
        label = f"{lead} = {key}" if lead else None
        ax.plot(x, y, label=label)
    ax.set_xlabel("pump power product $P_1 P_2$ (W$^2$)")
    ax.set_ylabel("squeezing at first facet (dB)")
    if lead:
        ax.legend(fontsize=7)
    return fig


def _render_fig3_right(recipe: FigureRecipe, lead, rows):
    l2s = sorted({float(r[0]) for r in rows})
    l3s = sorted({float(r[1]) for r in rows})
    grid = np.full((len(l2s), len(l3s)), np.nan)
    for row in rows:
        if row[3] != "ok":
            continue
        i = l2s.index(float(row[0]))
        j = l3s.index(float(row[1]))
        grid[i, j] = float(row[2])
    if np.all(np.isnan(grid)):
        raise SchemaError(f"{recipe.input_path}: no usable (status ok) rows")
    fig, ax = plt.subplots()
    masked = np.ma.masked_invalid(grid)
    mesh = ax.pcolormesh(l3s, l2s, masked, shading="nearest",
                         norm=LogNorm(vmin=float(masked.min()),
                                      vmax=float(masked.max())),
                         cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="threshold $P_1 P_2$ (W$^2$)")
    ax.set_xlabel("gap length $L_3$ (m)")
    ax.set_ylabel("output grating length $L_2$ (m)")
    ax.grid(False)
    return fig


def _infer_defect(z):
    # section interfaces are sampled from both sides, so the defect shows up
    # as the first repeated z value
    for a, b in zip(z, z[1:]):
        if a == b:
            return a
    return 0.0


def _render_fig4(recipe: FigureRecipe, lead, rows):
    z = [float(r[0]) for r in rows]
    n_fwd = [float(r[1]) for r in rows]
    shift = recipe.defect if recipe.defect is not None else _infer_defect(z)
    fig, ax = plt.subplots()
    ax.plot(np.array(z) - shift, n_fwd, color="tab:blue")
    ax.axvline(0.0, color="0.6", linestyle=":", linewidth=0.9)
    ax.set_xlabel("position from defect (m)")
    ax.set_ylabel("forward photon number per mode")
    return fig


def _render_spectrum(recipe: FigureRecipe, lead, rows):
    rho, trans = [], []
    for row in rows:
        if row[4] != "ok":
            continue
        rho.append(float(row[0]))
        trans.append(float(row[1]))
    if not rho:
        raise SchemaError(f"{recipe.input_path}: no usable (status ok) rows")
    fig, ax = plt.subplots()
    ax.plot(rho, trans, color="tab:red")
    ax.set_xlabel(r"detuning $\rho$ (1/m)")
    ax.set_ylabel("normalized transmission")
    ax.set_ylim(-0.05, 1.05)
    return fig


_RENDERERS = {
    "fig3_left": _render_fig3_left,
    "fig3_right": _render_fig3_right,
    "fig4": _render_fig4,
    "spectrum": _render_spectrum,
}


def render(recipe: FigureRecipe) -> str:
    """Validate the CSV against the recipe schema and write the image."""
    lead, rows = _read_rows(recipe)
    fig = _RENDERERS[recipe.figure](recipe, lead, rows)
    try:
        fig.savefig(recipe.output_path, metadata={"Software": None})
    finally:
        plt.close(fig)
    return recipe.output_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dfbopo-figures",
        description="Render figures from dfbopo CSV outputs.")
    parser.add_argument("--figure", required=True, choices=sorted(SCHEMAS),
                        help="figure id / expected CSV schema")
    parser.add_argument("--input", required=True, help="input CSV path")
    parser.add_argument("--output", required=True, help="output image path")
    parser.add_argument("--defect", type=float, default=None,
                        help="defect position for the fig4 axis shift "
                             "(default: inferred from the doubled interface sample)")
    args = parser.parse_args(argv)
    try:
        recipe = FigureRecipe(figure=args.figure, input_path=args.input,
                              output_path=args.output, defect=args.defect)
        render(recipe)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
