"""The four standard test problems for the 2D acoustic system.

Two smooth time-periodic exact solutions (one irrotational, one rotational)
drive the convergence studies; a stationary vortex probes long-time behaviour;
a diagonal Riemann problem probes discontinuous solutions with outgoing-wave
boundary treatment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .grid import DIAGONAL, PERIODIC, AfState, Grid

TWO_PI = 2.0 * np.pi


def _avg_sin(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cell average of sin(2 pi s) over [a, b]."""
    return (np.cos(TWO_PI * a) - np.cos(TWO_PI * b)) / (TWO_PI * (b - a))


def _avg_cos(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cell average of cos(2 pi s) over [a, b]."""
    return (np.sin(TWO_PI * b) - np.sin(TWO_PI * a)) / (TWO_PI * (b - a))


@dataclass
class Problem:
    name: str
    c: float
    extents: tuple
    bc: str
    exact: Optional[Callable] = None          # (x, y, t) -> (p, u, v)
    initial: Callable = None                  # (x, y) -> (p, u, v)
    _exact_averages: Optional[Callable] = None
    _initial_averages: Optional[Callable] = None

    @property
    def has_exact(self) -> bool:
        return self.exact is not None

    def exact_cell_averages(self, grid: Grid, t: float) -> np.ndarray:
        """Exact per-cell averages (3, nx, ny); closed form where available."""
        if self._exact_averages is not None:
            return self._exact_averages(grid, t)
        if self.exact is not None:
            return gauss_cell_averages(lambda x, y: self.exact(x, y, t), grid)
        raise ValueError(f"problem {self.name!r} has no exact solution")

    def initial_state(self, grid: Grid) -> AfState:
        """Initial DOFs: exact point values at nodes, exact/quadrature averages."""
        state = AfState.zeros(grid, time=0.0)
        xf, yf = grid.x_faces(), grid.y_faces()
        xc, yc = grid.x_centers(), grid.y_centers()
        state.xedge[:] = _stack3(self.initial(xf[:, None], yc[None, :]))
        state.yedge[:] = _stack3(self.initial(xc[:, None], yf[None, :]))
        state.corner[:] = _stack3(self.initial(xf[:, None], yf[None, :]))
        if self._initial_averages is not None:
            state.avg[:] = self._initial_averages(grid)
        elif self._exact_averages is not None:
            state.avg[:] = self._exact_averages(grid, 0.0)
        else:
            state.avg[:] = gauss_cell_averages(self.initial, grid)
        return state


def _stack3(tup) -> np.ndarray:
    p, u, v = tup
    shape = np.broadcast_shapes(np.shape(p), np.shape(u), np.shape(v))
    return np.stack([np.broadcast_to(np.asarray(f, float), shape)
                     for f in (p, u, v)])


def gauss_cell_averages(f, grid: Grid, npts: int = 8) -> np.ndarray:
    """Tensor Gauss-Legendre cell averages of f(x, y) -> (p, u, v)."""
    nodes, weights = np.polynomial.legendre.leggauss(npts)
    xc, yc = grid.x_centers(), grid.y_centers()
    out = np.zeros((3, grid.nx, grid.ny))
    for gx, wx in zip(nodes, weights):
        x = xc + 0.5 * grid.dx * gx
        for gy, wy in zip(nodes, weights):
            y = yc + 0.5 * grid.dy * gy
            out += 0.25 * wx * wy * _stack3(f(x[:, None], y[None, :]))
    return out


# -- smooth irrotational standing wave --------------------------------------

def _p1(c):
    def exact(x, y, t):
        p = -np.cos(TWO_PI * c * t) / c * (np.sin(TWO_PI * x) + np.sin(TWO_PI * y))
        u = np.sin(TWO_PI * c * t) / c * np.cos(TWO_PI * x)
        v = np.sin(TWO_PI * c * t) / c * np.cos(TWO_PI * y)
        return p, u, v

    def averages(grid, t):
        xa, xb = grid.x_faces()[:-1, None], grid.x_faces()[1:, None]
        ya, yb = grid.y_faces()[None, :-1], grid.y_faces()[None, 1:]
        sx, sy = _avg_sin(xa, xb), _avg_sin(ya, yb)
        cx, cy = _avg_cos(xa, xb), _avg_cos(ya, yb)
        one = np.ones((grid.nx, grid.ny))
        p = -np.cos(TWO_PI * c * t) / c * (sx + sy)
        u = np.sin(TWO_PI * c * t) / c * (cx * one)
        v = np.sin(TWO_PI * c * t) / c * (cy * one)
        return np.stack([p * one, u, v])

    return exact, averages


# -- smooth rotational solution ----------------------------------------------

def _p2(c):
    def exact(x, y, t):
        p = (np.cos(TWO_PI * x) - np.cos(TWO_PI * y)) / c * np.sin(TWO_PI * c * t)
        u = -(np.sin(TWO_PI * x) * np.cos(TWO_PI * c * t) + np.sin(TWO_PI * y)) / c
        v = (np.sin(TWO_PI * x) + np.sin(TWO_PI * y) * np.cos(TWO_PI * c * t)) / c
        return p, u, v

    def averages(grid, t):
        xa, xb = grid.x_faces()[:-1, None], grid.x_faces()[1:, None]
        ya, yb = grid.y_faces()[None, :-1], grid.y_faces()[None, 1:]
        sx, sy = _avg_sin(xa, xb), _avg_sin(ya, yb)
        cx, cy = _avg_cos(xa, xb), _avg_cos(ya, yb)
        one = np.ones((grid.nx, grid.ny))
        ct = np.cos(TWO_PI * c * t)
        p = (cx - cy) / c * np.sin(TWO_PI * c * t)
        u = -(sx * ct + sy * one) / c
        v = (sx * one + sy * ct) / c
        return np.stack([p * one, u, v])

    return exact, averages


# -- stationary vortex ---------------------------------------------------------

def _vortex_speed(r):
    return np.where(r <= 0.2, 5.0 * r, np.where(r <= 0.4, 2.0 - 5.0 * r, 0.0))


def _p3_initial(x, y):
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    r = np.hypot(x, y)
    s = _vortex_speed(r)
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.where(r > 0, -y / np.where(r > 0, r, 1.0) * s, 0.0)
        v = np.where(r > 0, x / np.where(r > 0, r, 1.0) * s, 0.0)
    return np.zeros(np.broadcast_shapes(x.shape, y.shape)), u, v


# -- diagonal Riemann problem ---------------------------------------------------

SQ2 = 1.0 / np.sqrt(2.0)


def _p4_initial(x, y):
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    # the |y| >= |x| branch owns the discontinuity lines
    uv = np.where(np.abs(y) < np.abs(x), SQ2, -SQ2)
    shape = np.broadcast_shapes(x.shape, y.shape)
    return np.ones(shape), np.broadcast_to(uv, shape).copy(), \
        np.broadcast_to(uv, shape).copy()


def _clip_halfplane(poly, a, b, rhs):
    """Keep the part of a convex polygon with a*x + b*y <= rhs."""
    out = []
    n = len(poly)
    for k in range(n):
        x0, y0 = poly[k]
        x1, y1 = poly[(k + 1) % n]
        in0 = a * x0 + b * y0 <= rhs
        in1 = a * x1 + b * y1 <= rhs
        if in0:
            out.append((x0, y0))
        if in0 != in1:
            t = (rhs - a * x0 - b * y0) / (a * (x1 - x0) + b * (y1 - y0))
            out.append((x0 + t * (x1 - x0), y0 + t * (y1 - y0)))
    return out


def _poly_area(poly):
    if len(poly) < 3:
        return 0.0
    s = 0.0
    for k in range(len(poly)):
        x0, y0 = poly[k]
        x1, y1 = poly[(k + 1) % len(poly)]
        s += x0 * y1 - x1 * y0
    return 0.5 * abs(s)


def _p4_averages(grid: Grid) -> np.ndarray:
    """Exact averages of the piecewise-constant data against |y| = |x|."""
    out = np.zeros((3, grid.nx, grid.ny))
    out[0] = 1.0
    xf, yf = grid.x_faces(), grid.y_faces()
    for i in range(grid.nx):
        for j in range(grid.ny):
            xs = (xf[i], xf[i + 1])
            ys = (yf[j], yf[j + 1])
            corners = [(xs[0], ys[0]), (xs[1], ys[0]), (xs[1], ys[1]), (xs[0], ys[1])]
            above = [abs(cy) >= abs(cx) for cx, cy in corners]
            # corner signs decide only if the cell straddles no axis
            off_axes = xs[0] * xs[1] >= 0 and ys[0] * ys[1] >= 0
            if off_axes and all(above):
                frac = 1.0
            elif off_axes and not any(above):
                frac = 0.0
            else:
                rect = corners
                up = _clip_halfplane(_clip_halfplane(rect, 1, -1, 0.0), -1, -1, 0.0)
                dn = _clip_halfplane(_clip_halfplane(rect, -1, 1, 0.0), 1, 1, 0.0)
                frac = (_poly_area(up) + _poly_area(dn)) / (grid.dx * grid.dy)
            out[1, i, j] = out[2, i, j] = SQ2 * (1.0 - 2.0 * frac)
    return out


def get_problem(name: str, c: float = 1.0) -> Problem:
    key = name.lower().replace("_", "-")
    if key in ("example1", "smooth-irrotational"):
        exact, averages = _p1(c)
        return Problem("example1", c, (-1, 1, -1, 1), PERIODIC, exact=exact,
                       initial=lambda x, y: exact(x, y, 0.0),
                       _exact_averages=averages)
    if key in ("example2", "smooth-rotational"):
        exact, averages = _p2(c)
        return Problem("example2", c, (-1, 1, -1, 1), PERIODIC, exact=exact,
                       initial=lambda x, y: exact(x, y, 0.0),
                       _exact_averages=averages)
    if key in ("example3", "stationary-vortex"):
        return Problem("example3", c, (-1, 1, -1, 1), PERIODIC,
                       initial=_p3_initial,
                       _initial_averages=lambda grid: gauss_cell_averages(
                           _p3_initial, grid, npts=8))
    if key in ("example4", "diagonal-riemann"):
        if c != 1.0:
            raise ValueError("the diagonal Riemann problem is defined for c = 1")
        return Problem("example4", 1.0, (-1, 1, -1, 1), DIAGONAL,
                       initial=_p4_initial, _initial_averages=_p4_averages)
    raise ValueError(f"unknown problem {name!r}")


def vortex_diagnostics(state: AfState, grid: Grid) -> dict:
    """Max speed and radially binned mean tangential speed from cell averages."""
    speed = np.hypot(state.avg[1], state.avg[2])
    xc, yc = grid.x_centers(), grid.y_centers()
    r = np.hypot(xc[:, None], yc[None, :])
    nbins = int(np.ceil(r.max() / grid.dx)) + 1
    idx = np.minimum((r / grid.dx).astype(int), nbins - 1)
    sums = np.bincount(idx.ravel(), weights=speed.ravel(), minlength=nbins)
    counts = np.bincount(idx.ravel(), minlength=nbins)
    radii = (np.arange(nbins) + 0.5) * grid.dx
    mask = counts > 0
    profile = list(zip(radii[mask], sums[mask] / counts[mask]))
    return {"max_speed": float(speed.max()), "profile": profile}


def cross_section(state: AfState, grid: Grid, which: str):
    """Cell-average profiles along y = 0 (row above the axis) or y = x."""
    xc = grid.x_centers()
    if which == "y0":
        j = grid.ny // 2
        s = xc
        vals = state.avg[:, :, j]
    elif which == "diag":
        k = np.arange(min(grid.nx, grid.ny))
        s = xc[k] * np.sqrt(2.0)
        vals = state.avg[:, k, k]
    else:
        raise ValueError("cross section must be 'y0' or 'diag'")
    return s, vals
