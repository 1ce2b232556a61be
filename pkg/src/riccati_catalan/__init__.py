"""Finite and infinite Riccati systems behind the Catalan functions."""

__version__ = "0.1.0"

from .catalan import catalan_asymptotic_ratio, catalan_sequence, stationary_solution
from .errors import (
    CatalanOverflowError,
    DomainError,
    ResidueError,
    RiccatiError,
    SingularityError,
)
from .finite import (
    dft,
    idft,
    matrix_exponential,
    solve_direct,
    solve_matrix,
    solve_spectral,
)
from .infinite import fourier_coefficients, solve_triangular, sup_bound_cT
from .scalar import (
    RiccatiParams,
    f_closed,
    f_ode_oracle,
    generating_function,
    m_eigenvalues,
    polar_root,
)

__all__ = [
    "__version__",
    "RiccatiParams",
    "catalan_sequence",
    "catalan_asymptotic_ratio",
    "stationary_solution",
    "polar_root",
    "f_closed",
    "f_ode_oracle",
    "generating_function",
    "m_eigenvalues",
    "dft",
    "idft",
    "matrix_exponential",
    "solve_direct",
    "solve_spectral",
    "solve_matrix",
    "solve_triangular",
    "fourier_coefficients",
    "sup_bound_cT",
    "RiccatiError",
    "DomainError",
    "CatalanOverflowError",
    "SingularityError",
    "ResidueError",
]
