"""Exact free-fermion numerics for the Kitaev chain with long-range pairing.

String-operator Fisher densities and entanglement-depth witnesses, winding
numbers, fidelity susceptibilities and finite-size scaling fits.
"""
__version__ = "0.1.0"

from kitaev_mpe.errors import (  # noqa: E402
    ConvergenceWarning, KitaevError, NumericalError, ParameterError, UnresolvedWindingError,
    VarianceBoundError,
)
from kitaev_mpe.model import (  # noqa: E402
    NEAREST_NEIGHBOR_ALPHA, ModelParams, build_grid, f_alpha, f_alpha_dalpha, f_alpha_infinite,
    f_alpha_infinite_dalpha, solve, winding,
)
from kitaev_mpe.correlators import (  # noqa: E402
    ALL_KINDS, X, X_ST, Y, Y_ST, OperatorKind, best_operator, correlation, correlation_profile,
    correlation_profiles, fisher_densities, fisher_density, kernel_for,
)
from kitaev_mpe.analysis import (  # noqa: E402
    DEFAULT_SIZES, LARGE_SIZES, check_derivative_decomposition, chi_alpha_single_mode,
    collapse_deviation, fisher_density_scaling, fit_scaling, susceptibility, weighted_derivative,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
