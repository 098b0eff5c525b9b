"""One full time step of the Active Flux method and its CWENO variant.

A step performs: reconstruction snapshot, evolution of every boundary point
value to t + dt/2 and t + dt, assembly of Simpson space-time fluxes on all
edges, conservative update of the cell averages, and adoption of the fully
evolved point values as the new point DOFs.  The CWENO variant differs only
in the reconstruction; it carries the same point-value DOF set.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .evolution import EvolutionConfig, evolve_nodes
from .grid import GHOST, PERIODIC, AfState, ErrorReport, Grid, apply_bc, l1_error
from .reconstruction import AF, CWENO, af_coeffs, cweno_coeffs


@dataclass
class SchemeConfig:
    evolution: EvolutionConfig = field(default_factory=EvolutionConfig)
    recon: str = AF
    cfl: float = 0.25
    # CWENO blending scale used by the scheme: O(1) keeps the smooth-regime
    # weights near the linear ones (third order at practical resolutions)
    # while undivided-difference indicators still react to O(1) jumps.
    cweno_eps: float = 1.0
    cweno_r: int = 2

    def __post_init__(self):
        if self.recon not in (AF, CWENO):
            raise ValueError(f"unknown reconstruction {self.recon!r}")
        if self.cfl <= 0:
            raise ValueError("cfl must be positive")

    @property
    def c(self) -> float:
        return self.evolution.c


class BlowUpError(RuntimeError):
    """Raised when a step produces non-finite values (instability witness)."""

    def __init__(self, time: float, step_index: int):
        super().__init__(f"solution blew up at t = {time:.6g} (step {step_index})")
        self.time = time
        self.step_index = step_index


def flux_function(q, direction: str, c: float) -> np.ndarray:
    """Physical flux of the acoustic system: f = (c u, c p, 0), g = (c v, 0, c p)."""
    q = np.asarray(q, float)
    out = np.zeros_like(q)
    if direction == "x":
        out[0] = c * q[1]
        out[1] = c * q[0]
    elif direction == "y":
        out[0] = c * q[2]
        out[2] = c * q[0]
    else:
        raise ValueError("direction must be 'x' or 'y'")
    return out


def simpson_flux(nodes, direction: str, c: float) -> np.ndarray:
    """Tensor Simpson (1,4,1)x(1,4,1)/36 of the flux over 3 space x 3 time nodes.

    nodes[s, t] is the state 3-vector at space node s and time node t.
    """
    nodes = np.asarray(nodes, float)
    if nodes.shape[:2] != (3, 3):
        raise ValueError("expected a 3x3 array of state vectors")
    w = np.array([1.0, 4.0, 1.0]) / 6.0
    total = np.zeros(3)
    for s in range(3):
        for t in range(3):
            total += w[s] * w[t] * flux_function(nodes[s, t], direction, c)
    return total


_CLASS_OFFSET = {"xedge": (0.0, 0.5), "yedge": (0.5, 0.0), "corner": (0.0, 0.0)}


def _batches(state: AfState, grid: Grid):
    """Node batches (class, dof0, shape) covering the unique (periodic) or
    full (extrapolated) point sets."""
    nx, ny = grid.nx, grid.ny
    if grid.bc == PERIODIC:
        return {
            "xedge": state.xedge[:, :nx, :],
            "yedge": state.yedge[:, :, :ny],
            "corner": state.corner[:, :nx, :ny],
        }
    return {"xedge": state.xedge, "yedge": state.yedge, "corner": state.corner}


def step(state: AfState, grid: Grid, cfg: SchemeConfig, dt: float) -> AfState:
    """Advance the full DOF set by one time increment dt."""
    padded = apply_bc(state, grid)
    if cfg.recon == AF:
        coeffs = af_coeffs(padded)
    else:
        coeffs = cweno_coeffs(padded.avg, eps=cfg.cweno_eps, r=cfg.cweno_r)

    origin = (GHOST, GHOST)
    half, full = {}, {}
    for cls, dof0 in _batches(state, grid).items():
        shape = dof0.shape[1:]
        half[cls] = evolve_nodes(coeffs, _CLASS_OFFSET[cls], origin, shape,
                                 0.5 * dt, cfg.evolution, grid)
        full[cls] = evolve_nodes(coeffs, _CLASS_OFFSET[cls], origin, shape,
                                 dt, cfg.evolution, grid)

    new = state.copy()
    new.time = state.time + dt
    c = cfg.c
    nx, ny = grid.nx, grid.ny
    periodic = grid.bc == PERIODIC
    t0 = _batches(state, grid)

    # Simpson in space along each edge, then Simpson in time; the flux is
    # linear so it commutes with the quadrature averaging.
    def edge_mean_x(levels):
        acc = 0.0
        for wt, (co, xe) in zip((1.0, 4.0, 1.0), levels):
            up = np.roll(co, -1, axis=2) if periodic else co[:, :, 1:]
            lo = co if periodic else co[:, :, :-1]
            acc = acc + wt * (lo + 4.0 * xe + up) / 6.0
        return acc / 6.0

    def edge_mean_y(levels):
        acc = 0.0
        for wt, (co, ye) in zip((1.0, 4.0, 1.0), levels):
            rt = np.roll(co, -1, axis=1) if periodic else co[:, 1:, :]
            lf = co if periodic else co[:, :-1, :]
            acc = acc + wt * (lf + 4.0 * ye + rt) / 6.0
        return acc / 6.0

    qx = edge_mean_x([(t0["corner"], t0["xedge"]),
                      (half["corner"], half["xedge"]),
                      (full["corner"], full["xedge"])])
    qy = edge_mean_y([(t0["corner"], t0["yedge"]),
                      (half["corner"], half["yedge"]),
                      (full["corner"], full["yedge"])])
    F = np.stack([c * qx[1], c * qx[0], np.zeros_like(qx[0])])
    G = np.stack([c * qy[2], np.zeros_like(qy[0]), c * qy[0]])

    if periodic:
        dF = np.roll(F, -1, axis=1) - F
        dG = np.roll(G, -1, axis=2) - G
    else:
        dF = F[:, 1:, :] - F[:, :-1, :]
        dG = G[:, :, 1:] - G[:, :, :-1]
    new.avg = state.avg - dt / grid.dx * dF - dt / grid.dy * dG

    if periodic:
        new.xedge[:, :nx, :] = full["xedge"]
        new.yedge[:, :, :ny] = full["yedge"]
        new.corner[:, :nx, :ny] = full["corner"]
        new.sync_periodic()
    else:
        new.xedge, new.yedge, new.corner = (full["xedge"], full["yedge"],
                                            full["corner"])
    return new


def run(problem, grid: Grid, cfg: SchemeConfig, t_end: float,
        snapshot_times=(), on_snapshot=None) -> AfState:
    """March from the problem's initial state to exactly t_end.

    dt = cfl * min(dx, dy) / c, with steps clamped to land exactly on each
    requested snapshot time and on t_end.
    """
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")
    state = problem.initial_state(grid)
    dt0 = cfg.cfl * min(grid.dx, grid.dy) / cfg.c
    targets = sorted({t for t in snapshot_times if 0.0 < t < t_end} | {t_end})
    k = 0
    # overflow during a step is the blow-up witness, reported via the guard
    with np.errstate(over="ignore", invalid="ignore"):
        for target in targets:
            while state.time < target - 1e-13 * max(dt0, 1.0):
                dt = min(dt0, target - state.time)
                state = step(state, grid, cfg, dt)
                k += 1
                if not np.isfinite(state.avg).all():
                    raise BlowUpError(state.time, k)
            state.time = target
            if on_snapshot is not None and target != t_end:
                on_snapshot(state)
    if not state.all_finite():
        raise BlowUpError(state.time, k)
    return state


def convergence_study(problem, cfg: SchemeConfig, resolutions,
                      t_end: float) -> ErrorReport:
    """L1 errors and EOC across a resolution sequence (one operator)."""
    from .grid import build_grid

    report = ErrorReport()
    for n in resolutions:
        grid = build_grid(n, n, problem.extents, problem.bc)
        state = run(problem, grid, cfg, t_end)
        report.add(n, n, l1_error(state, problem, grid))
    return report


def write_snapshot(state: AfState, grid: Grid, path) -> None:
    """CSV dump of cell-centre averages: x,y,p,u,v,speed (y outer, x inner)."""
    xc, yc = grid.x_centers(), grid.y_centers()
    speed = np.hypot(state.avg[1], state.avg[2])
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["x", "y", "p", "u", "v", "speed"])
        for j in range(grid.ny):
            for i in range(grid.nx):
                wr.writerow([f"{val:.17g}" for val in
                             (xc[i], yc[j], state.avg[0, i, j],
                              state.avg[1, i, j], state.avg[2, i, j],
                              speed[i, j])])
