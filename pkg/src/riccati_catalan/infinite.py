"""Catalan functions: the infinite Riccati system and its Fourier representation.

The right-hand side for index ``i`` only involves indices ``<= i``, so the
first ``k_max + 1`` equations form a closed system and truncating there is
exact.  :func:`fourier_coefficients` reaches the same functions through the
Fourier coefficients of the auxiliary solution ``f_t``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._ode import rk4_backward, time_grid
from .errors import DomainError, ResidueError
from .scalar import RiccatiParams, f_closed

__all__ = [
    "InfiniteSolution",
    "triangular_self_convolution",
    "solve_triangular",
    "fourier_quadrature",
    "fourier_coefficients",
    "sup_bound_cT",
    "fourier_coefficients_grid",
]

QUADRATURE_RESIDUE_TOL = 1e-9


@dataclass(frozen=True)
class InfiniteSolution:
    """``values[m, j]`` holds ``phi^j`` at ``time_grid[m]`` for ``j <= k_max``."""

    k_max: int
    params: RiccatiParams
    time_grid: np.ndarray
    values: np.ndarray


def triangular_self_convolution(phi: np.ndarray) -> np.ndarray:
    """``sum_{j=0}^{i} phi[j] phi[i-j]``, accumulated left to right in ``j``.

    Entry ``i`` sees the same operations in the same order whatever the
    length of ``phi``, which keeps truncations bitwise consistent.
    """
    n = len(phi)
    acc = np.zeros(n)
    for j in range(n):
        acc[j:] += phi[j] * phi[: n - j]
    return acc


def solve_triangular(params: RiccatiParams, k_max: int, n_steps: int = 1000) -> InfiniteSolution:
    """RK4 on the first ``k_max + 1`` equations of the infinite system."""
    if not isinstance(k_max, (int, np.integer)) or k_max < 0:
        raise DomainError(f"k_max must be a non-negative integer, got {k_max!r}")
    if not isinstance(n_steps, (int, np.integer)) or n_steps < 10:
        raise DomainError(f"n_steps must be an integer >= 10, got {n_steps!r}")
    size = k_max + 1
    forcing = params.forcing_vector(size)
    values = rk4_backward(
        lambda phi: triangular_self_convolution(phi) - forcing,
        params.terminal_vector(size),
        params.t_final,
        n_steps,
    )
    return InfiniteSolution(k_max, params, time_grid(params.t_final, n_steps), values)


def fourier_quadrature(
    g: Callable[[np.ndarray], np.ndarray], j_max: int, m_points: int
) -> np.ndarray:
    """``int_0^1 g(x) exp(2 pi i j x) dx`` for ``j <= j_max`` by the uniform rule.

    For smooth 1-periodic ``g`` the rule converges faster than any power of
    ``m_points``; it is exact for trigonometric polynomials of low degree.
    """
    samples = np.asarray(g(np.arange(m_points) / m_points), dtype=complex)
    return np.fft.ifft(samples)[: j_max + 1]


def fourier_coefficients(
    params: RiccatiParams, t: float, j_max: int, m_points: int = 256
) -> np.ndarray:
    """``phi^0_t .. phi^{j_max}_t`` as Fourier coefficients of ``x -> f_t(x)``."""
    if j_max < 0:
        raise DomainError(f"j_max must be >= 0, got {j_max}")
    if m_points < 16 or m_points < 4 * (j_max + 1):
        raise DomainError(
            f"m_points must be >= max(16, 4*(j_max+1)) = {max(16, 4 * (j_max + 1))}, got {m_points}"
        )
    coeffs = fourier_quadrature(lambda x: f_closed(params, t, x), j_max, m_points)
    residue = float(np.max(np.abs(coeffs.imag)))
    if residue > QUADRATURE_RESIDUE_TOL:
        raise ResidueError(f"Fourier coefficients carry imaginary residue {residue:.3e}")
    return coeffs.real.copy()


def sup_bound_cT(params: RiccatiParams, t_grid_size: int = 1001, x_grid_size: int = 1001) -> float:
    """Grid maximum of ``|f_t(x)|``, a lower estimate of the true supremum ``c_T``.

    An odd ``x_grid_size`` puts ``x = 1/2`` on the grid.
    """
    if t_grid_size < 32 or x_grid_size < 32:
        raise DomainError("grid sizes must be >= 32")
    t = np.linspace(0.0, params.t_final, t_grid_size)
    x = np.linspace(0.0, 1.0, x_grid_size)
    return float(np.max(np.abs(f_closed(params, t[:, None], x[None, :]))))


def fourier_coefficients_grid(
    params: RiccatiParams, j_max: int, n_steps: int = 1000, m_points: int = 256
) -> InfiniteSolution:
    """:func:`fourier_coefficients` evaluated on every point of the time grid."""
    if m_points < 16 or m_points < 4 * (j_max + 1):
        raise DomainError(
            f"m_points must be >= max(16, 4*(j_max+1)) = {max(16, 4 * (j_max + 1))}, got {m_points}"
        )
    grid = time_grid(params.t_final, n_steps)
    samples = f_closed(params, grid[:, None], (np.arange(m_points) / m_points)[None, :])
    coeffs = np.fft.ifft(samples, axis=1)[:, : j_max + 1]
    residue = float(np.max(np.abs(coeffs.imag)))
    if residue > QUADRATURE_RESIDUE_TOL:
        raise ResidueError(f"Fourier coefficients carry imaginary residue {residue:.3e}")
    return InfiniteSolution(j_max, params, grid, coeffs.real.copy())
