"""Pseudospectral operator splitting for ``u_t + sigma (-Laplacian)^beta u = F(t, u)``
on a periodic 1-D grid, with tools for periodic-plus-decaying decompositions."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BlowUpError,
    ConfigError,
    DegenerateDurationError,
    FracSplitError,
    GridError,
    NonFiniteFieldError,
)
from .grid import Field, GridSpec, SpectralField, circular_shift, make_grid, sup_norm  # noqa: E402
from .kernel import DiffusionParams, apply_semigroup, build_symbol, synthesize_kernel  # noqa: E402
from .reaction import OdeOptions, ReactionSpec, flow  # noqa: E402
from .splitting import SplitScheme, evolve, estimate_order, reference_solution, step  # noqa: E402
