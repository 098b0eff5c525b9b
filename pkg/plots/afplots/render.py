"""File-to-file figure rendering for the solver's CSV schemas.

Consumes exactly the delimited outputs of the solver CLI (eigenvalue dumps,
snapshot fields, radial profiles, convergence tables) and writes image files.
No numerics beyond plotting transforms and a least-squares slope fit.
"""

from __future__ import annotations

import csv

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class SchemaError(ValueError):
    """Input CSV does not match the declared schema."""


def load_csv(path, required):
    """Read a CSV, requiring the named columns; empty cells become NaN."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column {missing[0]!r} "
                              f"(have {header})")
        rows = [[float(cell) if cell else np.nan for cell in row]
                for row in reader if row]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    data = np.asarray(rows)
    return {name: data[:, k] for k, name in enumerate(header)}


def eig_scatter(csv_path, out_path, title=None):
    """Eigenvalue cloud with the unit circle overlay; returns max modulus."""
    cols = load_csv(csv_path, ["re", "im"])
    rho = float(np.hypot(cols["re"], cols["im"]).max())
    fig, ax = plt.subplots(figsize=(5, 5))
    theta = np.linspace(0, 2 * np.pi, 400)
    ax.plot(np.cos(theta), np.sin(theta), "k-", lw=0.8)
    ax.scatter(cols["re"], cols["im"], s=4, alpha=0.6)
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_title(title or f"max |lambda| = {rho:.9f}")
    lim = max(1.05, 1.02 * rho)
    ax.set_xlim(-lim, lim)
    ax.set_ylim(-lim, lim)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return rho


def _field_grid(cols, field):
    x = np.unique(cols["x"])
    y = np.unique(cols["y"])
    z = np.full((len(y), len(x)), np.nan)
    ix = np.searchsorted(x, cols["x"])
    iy = np.searchsorted(y, cols["y"])
    z[iy, ix] = cols[field]
    return x, y, z


SNAPSHOT_COLUMNS = ["x", "y", "p", "u", "v", "speed"]


def field_surface(csv_path, out_path, field="speed", title=None):
    """3D surface of one snapshot column over the cell centres."""
    cols = load_csv(csv_path, SNAPSHOT_COLUMNS)
    if field not in cols:
        raise SchemaError(f"{csv_path}: missing column {field!r}")
    x, y, z = _field_grid(cols, field)
    fig = plt.figure(figsize=(6, 5))
    ax = fig.add_subplot(projection="3d")
    X, Y = np.meshgrid(x, y)
    ax.plot_surface(X, Y, z, cmap="viridis", linewidth=0, antialiased=False)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(title or field)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def field_contour(csv_path, out_path, field="speed", levels=30, title=None):
    cols = load_csv(csv_path, SNAPSHOT_COLUMNS)
    if field not in cols:
        raise SchemaError(f"{csv_path}: missing column {field!r}")
    x, y, z = _field_grid(cols, field)
    fig, ax = plt.subplots(figsize=(5.5, 5))
    cs = ax.contourf(x, y, z, levels=levels, cmap="viridis")
    fig.colorbar(cs, ax=ax)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(title or field)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def radial_profile(csv_path, out_path, title=None):
    cols = load_csv(csv_path, ["r", "speed"])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(cols["r"], cols["speed"], "o-", ms=3)
    ax.set_xlabel("r")
    ax.set_ylabel("mean tangential speed")
    ax.set_title(title or "radial speed profile")
    ax.grid(alpha=0.3)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def convergence_loglog(csv_path, out_path, var="p", title=None):
    """Log-log error plot with slope-3 reference; returns the fitted slope."""
    col = f"l1_{var}"
    cols = load_csv(csv_path, ["nx", "ny", col])
    n = cols["nx"]
    err = cols[col]
    slope, offset = np.polyfit(np.log2(n), np.log2(err), 1)
    slope = -float(slope)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(n, err, "o-", base=2, label=f"L1({var}), slope {slope:.2f}")
    ref = err[0] * (n / n[0]) ** -3.0
    ax.loglog(n, ref, "k--", base=2, label="third order")
    ax.set_xlabel("cells per direction")
    ax.set_ylabel("L1 error")
    ax.legend()
    ax.grid(alpha=0.3, which="both")
    ax.set_title(title or f"fitted order {slope:.2f}")
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return slope
