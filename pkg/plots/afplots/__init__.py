"""Figure rendering for the acoustic Active Flux solver's CSV outputs."""

from .render import (SchemaError, convergence_loglog, eig_scatter,
                     field_contour, field_surface, load_csv, radial_profile)

__version__ = "0.1.0"

__all__ = ["SchemaError", "convergence_loglog", "eig_scatter",
           "field_contour", "field_surface", "load_csv", "radial_profile"]
