"""Linear stability of the one-step update on a doubly periodic m x m grid.

The scheme is linear, so one step is a matrix B acting on the vector of all
12 m^2 degrees of freedom (3 variables x {averages, x-edges, y-edges,
corners}).  B commutes with grid translations, hence it is block-circulant:
its full spectrum equals the union over the m^2 discrete wave vectors of the
eigenvalues of a 12 x 12 Fourier symbol assembled from 12 unit-impulse
responses.  The dense matrix is also assembled explicitly (from the same
responses, by translation) for consistency checks and eigenvalue dumps.

A method is accepted as stable when the spectral radius stays within
1 + 1e-9; constants are exact eigenvectors with eigenvalue 1, so the unit
circle itself is always touched.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import AfState, Grid, build_grid
from .scheme import SchemeConfig, step

RHO_TOL = 1e-9


class BracketError(RuntimeError):
    """Raised when [cfl_lo, cfl_hi] does not bracket the stability boundary."""


@dataclass
class StabilityReport:
    m: int
    cfl: float
    eigenvalues: np.ndarray
    spectral_radius: float
    stable: bool
    tolerance: float = RHO_TOL


def _unit_grid(m: int) -> Grid:
    return build_grid(m, m, (0.0, float(m), 0.0, float(m)), "periodic")


def embed(vec: np.ndarray, m: int) -> AfState:
    """State whose unique DOFs are the given flat vector (class-major)."""
    grid = _unit_grid(m)
    state = AfState.zeros(grid)
    blocks = vec.reshape(3, 4, m, m)
    state.avg[:] = blocks[:, 0]
    state.xedge[:, :m, :] = blocks[:, 1]
    state.yedge[:, :, :m] = blocks[:, 2]
    state.corner[:, :m, :m] = blocks[:, 3]
    state.sync_periodic()
    return state


def extract(state: AfState, m: int) -> np.ndarray:
    out = np.stack([state.avg, state.xedge[:, :m, :],
                    state.yedge[:, :, :m], state.corner[:, :m, :m]], axis=1)
    return out.reshape(-1)


def step_vector(vec: np.ndarray, cfg: SchemeConfig, m: int) -> np.ndarray:
    """One scheme step applied to a flat DOF vector (dt from the CFL number)."""
    grid = _unit_grid(m)
    dt = cfg.cfl * min(grid.dx, grid.dy) / cfg.c
    return extract(step(embed(vec, m), grid, cfg, dt), m)


def impulse_responses(cfg: SchemeConfig, m: int) -> np.ndarray:
    """Responses (12, 12, m, m) to unit impulses in each DOF class at the
    centre cell; by translation equivariance they determine B completely."""
    if m < 6:
        raise ValueError("stability grids need m >= 6 (stencil must not wrap)")
    if cfg.recon != "af":
        raise ValueError("impulse-response analysis applies to the linear "
                         "interpolating-reconstruction scheme only")
    i0 = m // 2
    n = 12 * m * m
    resp = np.empty((12, 12, m, m))
    for s in range(12):
        e = np.zeros(n)
        e.reshape(12, m, m)[s, i0, i0] = 1.0
        resp[s] = step_vector(e, cfg, m).reshape(12, m, m)
    return resp


def assemble_B(cfg: SchemeConfig, m: int) -> np.ndarray:
    """Dense one-step matrix, columns ordered class-major then cell (i, j)."""
    resp = impulse_responses(cfg, m)
    i0 = m // 2
    n = 12 * m * m
    B = np.empty((n, n))
    for s in range(12):
        for a in range(m):
            for b in range(m):
                col = (s * m + a) * m + b
                B[:, col] = np.roll(resp[s], (a - i0, b - i0),
                                    axis=(1, 2)).reshape(-1)
    return B


def eigenvalues(B: np.ndarray) -> np.ndarray:
    """Full nonsymmetric spectrum via the LAPACK QR eigensolver."""
    return np.linalg.eigvals(B)


def spectral_radius(B: np.ndarray) -> float:
    return float(np.abs(eigenvalues(B)).max())


def symbol_eigenvalues(cfg: SchemeConfig, m: int) -> np.ndarray:
    """Exact spectrum of B from the block-circulant Fourier decomposition."""
    resp = impulse_responses(cfg, m)
    i0 = m // 2
    fh = np.fft.fft2(resp, axes=(2, 3))              # (s, r, kx, ky)
    k = np.arange(m)
    phase = np.exp(2j * np.pi * i0 * (k[:, None] + k[None, :]) / m)
    sym = np.transpose(fh, (2, 3, 1, 0)) * phase[:, :, None, None]
    return np.linalg.eigvals(sym.reshape(-1, 12, 12)).reshape(-1)


def analyze(cfg: SchemeConfig, m: int, method: str = "symbol",
            tolerance: float = RHO_TOL) -> StabilityReport:
    if method == "symbol":
        eig = symbol_eigenvalues(cfg, m)
    elif method == "dense":
        eig = eigenvalues(assemble_B(cfg, m))
    else:
        raise ValueError("method must be 'symbol' or 'dense'")
    rho = float(np.abs(eig).max())
    return StabilityReport(m=m, cfl=cfg.cfl, eigenvalues=eig,
                           spectral_radius=rho, stable=rho <= 1.0 + tolerance,
                           tolerance=tolerance)


def max_cfl(make_cfg, m: int, cfl_lo: float, cfl_hi: float,
            tol: float = 5e-4, method: str = "symbol") -> float:
    """Largest admissible CFL by bisection on rho(B(cfl)) <= 1 + 1e-9.

    make_cfg(cfl) must return the SchemeConfig to analyze at that CFL.
    """
    def stable(cfl):
        return analyze(make_cfg(cfl), m, method=method).stable

    if not stable(cfl_lo):
        raise BracketError(f"cfl_lo = {cfl_lo} is already unstable")
    if stable(cfl_hi):
        raise BracketError(f"cfl_hi = {cfl_hi} is still stable")
    lo, hi = cfl_lo, cfl_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if stable(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
