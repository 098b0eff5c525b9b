"""Per-cell biquadratic reconstructions.

Two reconstructions produce, per cell and per variable, a quadratic polynomial
in reference coordinates (xi, eta) in [-1, 1]^2:

* the interpolating reconstruction uses the 9 local degrees of freedom
  (4 corners, 4 edge midpoints, cell average) and spans the full tensor
  space {xi^a eta^b : a, b <= 2}; it is globally continuous because adjacent
  cells share the 3 nodes of each edge and are quadratic along it;
* the CWENO reconstruction uses only the 3x3 neighbourhood of cell averages,
  blending one central and four one-sided candidate polynomials with
  data-dependent weights; its basis has zero cell mean except the constant,
  so the reconstruction conserves the cell average exactly.

Both are stored internally as coefficients of the tensor monomial basis so
the evolution engine evaluates them uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GHOST, AfState, Grid, PaddedDofs

#: exponent pairs (a, b) of the tensor monomial basis xi^a eta^b
MONO_EXP = [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1), (0, 2), (1, 2), (2, 2)]

CWENO_EPS = 1e-12
CWENO_R = 2
CWENO_GAMMA = (0.5, 0.125, 0.125, 0.125, 0.125)

AF, CWENO = "af", "cweno"


def monomial_values(xi, eta) -> np.ndarray:
    """Values of the 9 tensor monomials, stacked along the first axis."""
    xi = np.asarray(xi, float)
    eta = np.asarray(eta, float)
    return np.stack([xi ** a * eta ** b for a, b in MONO_EXP])


def _interpolation_matrix() -> np.ndarray:
    # row order: cell mean, corners (-1,-1),(1,-1),(-1,1),(1,1),
    # x-edge midpoints (-1,0),(1,0), y-edge midpoints (0,-1),(0,1)
    mean_1d = {0: 1.0, 1: 0.0, 2: 1.0 / 3.0}
    rows = [[mean_1d[a] * mean_1d[b] for a, b in MONO_EXP]]
    nodes = [(-1, -1), (1, -1), (-1, 1), (1, 1), (-1, 0), (1, 0), (0, -1), (0, 1)]
    for x, e in nodes:
        rows.append([x ** a * e ** b for a, b in MONO_EXP])
    return np.array(rows)


_M = _interpolation_matrix()
AF_INV = np.linalg.inv(_M)
assert np.abs(_M @ AF_INV - np.eye(9)).max() < 1e-12


@dataclass
class CellPoly:
    """Quadratic polynomial on one cell, coefficients in the monomial basis."""

    coeffs: np.ndarray          # (9,)
    cell: tuple
    dx: float
    dy: float
    kind: str = AF
    modal: np.ndarray = None    # CWENO modal coefficients C0..C5, if applicable


def eval_poly(poly: CellPoly, xi, eta):
    """Polynomial value at reference coordinates."""
    return np.tensordot(poly.coeffs, monomial_values(xi, eta), axes=(0, 0))


def eval_grad(poly: CellPoly, xi, eta):
    """Physical-space gradient (d/dx, d/dy) via the chain rule 2/dx, 2/dy."""
    xi = np.asarray(xi, float)
    eta = np.asarray(eta, float)
    dxi = sum(poly.coeffs[k] * a * xi ** max(a - 1, 0) * eta ** b
              for k, (a, b) in enumerate(MONO_EXP) if a > 0)
    deta = sum(poly.coeffs[k] * b * xi ** a * eta ** max(b - 1, 0)
               for k, (a, b) in enumerate(MONO_EXP) if b > 0)
    return dxi * 2.0 / poly.dx, deta * 2.0 / poly.dy


def af_reconstruct(state: AfState, grid: Grid, cell: tuple):
    """Interpolating polynomials of one interior cell, one CellPoly per variable."""
    i, j = cell
    d = np.stack([
        state.avg[:, i, j],
        state.corner[:, i, j], state.corner[:, i + 1, j],
        state.corner[:, i, j + 1], state.corner[:, i + 1, j + 1],
        state.xedge[:, i, j], state.xedge[:, i + 1, j],
        state.yedge[:, i, j], state.yedge[:, i, j + 1],
    ])
    coeffs = AF_INV @ d          # (9, 3)
    return tuple(CellPoly(coeffs[:, v].copy(), cell, grid.dx, grid.dy, AF)
                 for v in range(3))


def af_coeffs(padded: PaddedDofs) -> np.ndarray:
    """Monomial coefficients (3, 9, NX, NY) for every ghost-extended cell."""
    d = np.stack([
        padded.avg,
        padded.corner[:, :-1, :-1], padded.corner[:, 1:, :-1],
        padded.corner[:, :-1, 1:], padded.corner[:, 1:, 1:],
        padded.xedge[:, :-1, :], padded.xedge[:, 1:, :],
        padded.yedge[:, :, :-1], padded.yedge[:, :, 1:],
    ], axis=1)                   # (3, 9, NX, NY)
    return np.einsum("kc,vcij->vkij", AF_INV, d)


def _cweno_core(QC, QE, QW, QN, QS, QNE, QSE, QNW, QSW,
                eps=CWENO_EPS, r=CWENO_R, gamma=CWENO_GAMMA):
    """Modal CWENO coefficients C0..C5 plus the blending workspace."""
    c1 = 0.5 * (QE - QW)
    c2 = 0.5 * (QN - QS)
    c3 = 0.5 * (QE + QW) - QC
    c4 = 0.5 * (QN + QS) - QC
    c5 = 0.25 * (QNE - QSE - QNW + QSW)
    a = (QE - QC, QC - QW, QC - QW, QE - QC)
    b = (QN - QC, QN - QC, QC - QS, QC - QS)
    Sa = 0.125 * (a[0] + a[1] + a[2] + a[3])
    Sb = 0.125 * (b[0] + b[1] + b[2] + b[3])
    beta = [4.0 * (c1 - Sa) ** 2 + 4.0 * (c2 - Sb) ** 2
            + 5.0 / 3.0 * (c3 ** 2 + c4 ** 2) + 4.0 / 3.0 * c5 ** 2]
    beta += [a[m] ** 2 + b[m] ** 2 for m in range(4)]
    wt = [gamma[m] / (eps + beta[m]) ** r for m in range(5)]
    wsum = wt[0] + wt[1] + wt[2] + wt[3] + wt[4]
    om = [w / wsum for w in wt]
    C = [
        QC,
        2.0 * om[0] * (c1 - Sa) + sum(om[m + 1] * a[m] for m in range(4)),
        2.0 * om[0] * (c2 - Sb) + sum(om[m + 1] * b[m] for m in range(4)),
        2.0 * om[0] * c3,
        2.0 * om[0] * c4,
        2.0 * om[0] * c5,
    ]
    work = {"c": (QC, c1, c2, c3, c4, c5), "a": a, "b": b,
            "Sa": Sa, "Sb": Sb, "beta": beta, "omega": om}
    return C, work


def _modal_to_monomial(C) -> np.ndarray:
    """CWENO basis {1, xi/2, eta/2, xi^2/4 - 1/12, eta^2/4 - 1/12, xi eta/4}."""
    out = np.zeros((9,) + np.shape(C[0]))
    out[0] = C[0] - (C[3] + C[4]) / 12.0
    out[1] = C[1] / 2.0
    out[2] = C[3] / 4.0
    out[3] = C[2] / 2.0
    out[4] = C[5] / 4.0
    out[6] = C[4] / 4.0
    return out


def cweno_reconstruct(stencil, cell=(0, 0), dx: float = 1.0, dy: float = 1.0,
                      eps=CWENO_EPS, r=CWENO_R) -> CellPoly:
    """CWENO polynomial of one cell from its 3x3 stencil of cell averages.

    stencil[di + 1, dj + 1] holds the average of cell (i + di, j + dj).
    """
    s = np.asarray(stencil, float)
    if s.shape != (3, 3) or not np.isfinite(s).all():
        raise ValueError("stencil must be a finite 3x3 array")
    C, work = _cweno_core(s[1, 1], s[2, 1], s[0, 1], s[1, 2], s[1, 0],
                          s[2, 2], s[2, 0], s[0, 2], s[0, 0], eps=eps, r=r)
    poly = CellPoly(_modal_to_monomial(C), cell, dx, dy, CWENO,
                    modal=np.array(C))
    poly.workspace = work
    return poly


def cweno_coeffs(avg_padded: np.ndarray, eps=CWENO_EPS, r=CWENO_R) -> np.ndarray:
    """Monomial coefficients (3, 9, NX, NY); outermost ghost ring left zero."""
    nv, NX, NY = avg_padded.shape
    out = np.zeros((nv, 9, NX, NY))
    Q = avg_padded
    C, _ = _cweno_core(
        Q[:, 1:-1, 1:-1], Q[:, 2:, 1:-1], Q[:, :-2, 1:-1],
        Q[:, 1:-1, 2:], Q[:, 1:-1, :-2],
        Q[:, 2:, 2:], Q[:, 2:, :-2], Q[:, :-2, 2:], Q[:, :-2, :-2],
        eps=eps, r=r)
    out[:, :, 1:-1, 1:-1] = np.moveaxis(_modal_to_monomial(C), 0, 1)
    return out


class ReconstructionField:
    """Piecewise-polynomial view of one time level over the padded domain.

    Points on shared edges or corners are owned by the cell with the smallest
    (i, j), i.e. the left/lower neighbour; irrelevant for the continuous
    interpolating reconstruction, deterministic for CWENO.
    """

    def __init__(self, grid: Grid, coeffs: np.ndarray):
        self.grid = grid
        self.coeffs = coeffs                      # (3, 9, NX, NY)

    def locate(self, x: float, y: float):
        """Owning padded cell (I, J) and reference coordinates of (x, y)."""
        g = self.grid
        px = (x - g.x_min) / g.dx + GHOST
        py = (y - g.y_min) / g.dy + GHOST
        I, xi = _owner_1d(px)
        J, eta = _owner_1d(py)
        if not (0 <= I < self.coeffs.shape[2] and 0 <= J < self.coeffs.shape[3]):
            raise ValueError(
                f"point ({x}, {y}) outside the ghost-padded domain")
        return I, J, xi, eta

    def eval(self, var: int, x: float, y: float) -> float:
        I, J, xi, eta = self.locate(x, y)
        return float(self.coeffs[var, :, I, J] @ monomial_values(xi, eta))

    def eval3(self, x: float, y: float) -> np.ndarray:
        I, J, xi, eta = self.locate(x, y)
        return self.coeffs[:, :, I, J] @ monomial_values(xi, eta)


def _owner_1d(p: float):
    """Cell index and reference coordinate for a fractional lattice position."""
    snapped = round(p)
    if abs(p - snapped) < 1e-9:
        p = float(snapped)
    i = int(np.floor(p))
    if p == i:
        i -= 1                  # boundary point: left/lower cell owns it
    return i, 2.0 * (p - i) - 1.0


class AnalyticField:
    """Smooth closed-form field with the same evaluation interface."""

    grid = None

    def __init__(self, p, u, v):
        self._f = (p, u, v)

    def eval(self, var: int, x: float, y: float) -> float:
        return float(self._f[var](x, y))

    def eval3(self, x: float, y: float) -> np.ndarray:
        return np.array([f(x, y) for f in self._f], float)


def reconstruct_field(state: AfState, grid: Grid, recon: str,
                      eps=CWENO_EPS, r=CWENO_R) -> ReconstructionField:
    """Build the global piecewise reconstruction snapshot for one time level."""
    from .grid import apply_bc

    padded = apply_bc(state, grid)
    if recon == AF:
        coeffs = af_coeffs(padded)
    elif recon == CWENO:
        coeffs = cweno_coeffs(padded.avg, eps=eps, r=r)
    else:
        raise ValueError(f"unknown reconstruction {recon!r}")
    return ReconstructionField(grid, coeffs)
