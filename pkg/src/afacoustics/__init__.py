"""Fully discrete third-order Active Flux methods for 2D linear acoustics."""

from .evolution import (EvolutionConfig, center_approx, circle_integral,
                        evolve_point, quad_circle_sum)
from .grid import AfState, ErrorReport, Grid, apply_bc, build_grid, eoc, l1_error
from .problems import get_problem, vortex_diagnostics
from .reconstruction import (AnalyticField, CellPoly, ReconstructionField,
                             af_reconstruct, cweno_reconstruct, eval_grad,
                             eval_poly, reconstruct_field)
from .scheme import (BlowUpError, SchemeConfig, convergence_study,
                     flux_function, run, simpson_flux, step, write_snapshot)
from .stability import (BracketError, StabilityReport, analyze, assemble_B,
                        eigenvalues, max_cfl, spectral_radius,
                        symbol_eigenvalues)

__version__ = "0.1.0"

__all__ = [
    "AfState", "AnalyticField", "BlowUpError", "BracketError", "CellPoly",
    "ErrorReport", "EvolutionConfig", "Grid", "ReconstructionField",
    "SchemeConfig", "StabilityReport", "af_reconstruct", "analyze",
    "apply_bc", "assemble_B", "build_grid", "center_approx",
    "circle_integral", "convergence_study", "cweno_reconstruct",
    "eigenvalues", "eoc", "eval_grad", "eval_poly", "evolve_point",
    "flux_function", "get_problem", "l1_error", "max_cfl",
    "quad_circle_sum", "reconstruct_field", "run", "simpson_flux",
    "spectral_radius", "step", "symbol_eigenvalues", "vortex_diagnostics",
    "write_snapshot",
]
