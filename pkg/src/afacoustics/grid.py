"""Cartesian grid, degree-of-freedom storage, boundary filling and error norms.

The solver carries four classes of degrees of freedom per variable (p, u, v):
cell averages, midpoints of vertical edges, midpoints of horizontal edges and
cell corners.  Point values on the outer boundary are stored explicitly, so
the arrays have shapes (nx, ny), (nx+1, ny), (nx, ny+1) and (nx+1, ny+1).
Under doubly periodic boundary conditions the duplicated boundary entries
(index 0 vs nx) are kept equal at all times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

P, U, V = 0, 1, 2
VARS = ("p", "u", "v")

#: ghost width in cells; sufficient for CFL <= 0.7 circles plus inner circles
GHOST = 2

PERIODIC = "periodic"
DIAGONAL = "diagonal"


@dataclass(frozen=True)
class Grid:
    """Uniform rectangular mesh on [x_min, x_max] x [y_min, y_max]."""

    nx: int
    ny: int
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    bc: str = PERIODIC

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.nx

    @property
    def dy(self) -> float:
        return (self.y_max - self.y_min) / self.ny

    def x_centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.nx) + 0.5) * self.dx

    def y_centers(self) -> np.ndarray:
        return self.y_min + (np.arange(self.ny) + 0.5) * self.dy

    def x_faces(self) -> np.ndarray:
        return self.x_min + np.arange(self.nx + 1) * self.dx

    def y_faces(self) -> np.ndarray:
        return self.y_min + np.arange(self.ny + 1) * self.dy


def build_grid(nx: int, ny: int, extents, bc: str = PERIODIC) -> Grid:
    """Validate sizes/extents and return a Grid with derived spacings."""
    x_min, x_max, y_min, y_max = (float(e) for e in extents)
    if nx < 4 or ny < 4:
        raise ValueError(f"grid needs at least 4 cells per direction, got {nx}x{ny}")
    if x_max <= x_min or y_max <= y_min:
        raise ValueError("inverted or empty domain extents")
    if bc not in (PERIODIC, DIAGONAL):
        raise ValueError(f"unknown bc mode {bc!r}")
    return Grid(nx, ny, x_min, x_max, y_min, y_max, bc)


@dataclass
class AfState:
    """All degrees of freedom of one time level.

    avg
        (3, nx, ny) cell averages.
    xedge
        (3, nx+1, ny) values at vertical-edge midpoints (x_{i-1/2}, y_j).
    yedge
        (3, nx, ny+1) values at horizontal-edge midpoints (x_i, y_{j-1/2}).
    corner
        (3, nx+1, ny+1) values at cell corners (x_{i-1/2}, y_{j-1/2}).
    """

    time: float
    avg: np.ndarray
    xedge: np.ndarray
    yedge: np.ndarray
    corner: np.ndarray

    @classmethod
    def zeros(cls, grid: Grid, time: float = 0.0) -> "AfState":
        nx, ny = grid.nx, grid.ny
        return cls(
            time=time,
            avg=np.zeros((3, nx, ny)),
            xedge=np.zeros((3, nx + 1, ny)),
            yedge=np.zeros((3, nx, ny + 1)),
            corner=np.zeros((3, nx + 1, ny + 1)),
        )

    def copy(self) -> "AfState":
        return AfState(self.time, self.avg.copy(), self.xedge.copy(),
                       self.yedge.copy(), self.corner.copy())

    def all_finite(self) -> bool:
        return all(np.isfinite(a).all() for a in
                   (self.avg, self.xedge, self.yedge, self.corner))

    def sync_periodic(self) -> None:
        """Copy the unique sets onto the duplicated boundary entries."""
        self.xedge[:, -1, :] = self.xedge[:, 0, :]
        self.yedge[:, :, -1] = self.yedge[:, :, 0]
        self.corner[:, -1, :-1] = self.corner[:, 0, :-1]
        self.corner[:, :-1, -1] = self.corner[:, :-1, 0]
        self.corner[:, -1, -1] = self.corner[:, 0, 0]


@dataclass
class PaddedDofs:
    """Ghost-extended DOF arrays; interior block starts at index GHOST."""

    avg: np.ndarray      # (3, nx+2G, ny+2G)
    xedge: np.ndarray    # (3, nx+2G+1, ny+2G)
    yedge: np.ndarray    # (3, nx+2G, ny+2G+1)
    corner: np.ndarray   # (3, nx+2G+1, ny+2G+1)


def _pad_periodic(a: np.ndarray, extra_x: int, extra_y: int) -> np.ndarray:
    g = GHOST
    return np.pad(a, ((0, 0), (g, g + extra_x), (g, g + extra_y)), mode="wrap")


def _fill_diagonal_ghosts(arr: np.ndarray, n_int_x: int, n_int_y: int,
                          mid_x: float, mid_y: float, coords_x: np.ndarray,
                          coords_y: np.ndarray) -> None:
    """Zero-order extrapolation shifted one cell along the outgoing diagonal.

    Left/right ghost columns copy the adjacent column shifted one row toward
    the domain midline rule: nodes on or above the midline source row j-1,
    nodes below source row j+1 (and symmetrically for the other boundaries).
    Filled ring by ring so the outer ghosts reuse the inner ones.
    """
    g = GHOST
    # left and right ghost columns, interior rows only
    rows = np.arange(g, g + n_int_y)
    shift = np.where(coords_y[rows - g] >= mid_y, -1, +1)
    for ring in range(1, g + 1):
        arr[:, g - ring, rows] = arr[:, g - ring + 1, rows + shift]
        arr[:, g + n_int_x - 1 + ring, rows] = arr[:, g + n_int_x - 2 + ring, rows + shift]
    # bottom and top ghost rows, all columns (ghost columns included)
    cols = np.arange(1, arr.shape[1] - 1)
    colshift = np.where(
        (coords_x[np.clip(cols - g, 0, n_int_x - 1)] >= mid_x), -1, +1)
    for ring in range(1, g + 1):
        arr[:, cols, g - ring] = arr[:, cols + colshift, g - ring + 1]
        arr[:, cols, g + n_int_y - 1 + ring] = arr[:, cols + colshift, g + n_int_y - 2 + ring]
    # ghost-row entries of the two extreme columns: copy horizontally inward
    for xi in (0, arr.shape[1] - 1):
        step = 1 if xi == 0 else -1
        arr[:, xi, :g] = arr[:, xi + step, :g]
        arr[:, xi, g + n_int_y:] = arr[:, xi + step, g + n_int_y:]


def apply_bc(state: AfState, grid: Grid) -> PaddedDofs:
    """Return ghost-extended DOF arrays for the grid's boundary mode."""
    g = GHOST
    if grid.bc == PERIODIC:
        return PaddedDofs(
            avg=_pad_periodic(state.avg, 0, 0),
            xedge=_pad_periodic(state.xedge[:, :-1, :], 1, 0),
            yedge=_pad_periodic(state.yedge[:, :, :-1], 0, 1),
            corner=_pad_periodic(state.corner[:, :-1, :-1], 1, 1),
        )

    nx, ny = grid.nx, grid.ny
    mid_x = 0.5 * (grid.x_min + grid.x_max)
    mid_y = 0.5 * (grid.y_min + grid.y_max)

    def padded(a, n_int_x, n_int_y, coords_x, coords_y):
        out = np.zeros((3, n_int_x + 2 * g, n_int_y + 2 * g))
        out[:, g:g + n_int_x, g:g + n_int_y] = a
        _fill_diagonal_ghosts(out, n_int_x, n_int_y, mid_x, mid_y,
                              coords_x, coords_y)
        return out

    xc, yc = grid.x_centers(), grid.y_centers()
    xf, yf = grid.x_faces(), grid.y_faces()
    return PaddedDofs(
        avg=padded(state.avg, nx, ny, xc, yc),
        xedge=padded(state.xedge, nx + 1, ny, xf, yc),
        yedge=padded(state.yedge, nx, ny + 1, xc, yf),
        corner=padded(state.corner, nx + 1, ny + 1, xf, yf),
    )


@dataclass
class ErrorReport:
    """L1 errors of cell averages per variable, with EOC between rows."""

    resolutions: list = field(default_factory=list)   # [(nx, ny), ...]
    errors: dict = field(default_factory=lambda: {v: [] for v in VARS})
    orders: dict = field(default_factory=lambda: {v: [] for v in VARS})

    def add(self, nx: int, ny: int, errs: dict) -> None:
        self.resolutions.append((nx, ny))
        for v in VARS:
            self.errors[v].append(float(errs[v]))
        for v in VARS:
            self.orders[v] = eoc(self.errors[v]) if len(self.errors[v]) > 1 else []


def eoc(errors) -> list:
    """Experimental orders log2(E_h / E_{h/2}) for grid-doubling sequences."""
    errs = [float(e) for e in errors]
    if len(errs) < 2:
        raise ValueError("need at least two errors to compute an order")
    if any(e <= 0 for e in errs):
        raise ValueError("errors must be positive")
    return [math.log2(errs[k] / errs[k + 1]) for k in range(len(errs) - 1)]


def l1_error(state: AfState, problem, grid: Grid) -> dict:
    """Domain-averaged L1 norm of the cell-average error per variable.

    (1/|domain|) sum_ij |Q_ij - Qexact_ij| dx dy, i.e. the plain mean of the
    per-cell errors, with exact cell averages from the problem (closed form
    where available, tensor Gauss otherwise).
    """
    exact = problem.exact_cell_averages(grid, state.time)
    if not np.isfinite(state.avg).all():
        raise FloatingPointError("state contains non-finite averages")
    diff = np.abs(state.avg - exact).mean(axis=(1, 2))
    return {v: float(diff[k]) for k, v in enumerate(VARS)}
