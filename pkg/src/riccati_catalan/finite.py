"""The N-player periodic Riccati system, solved three independent ways.

* :func:`solve_direct` integrates the cyclic-convolution ODE with RK4.
* :func:`solve_spectral` evaluates the closed form mode by mode and inverts
  the discrete Fourier transform.
* :func:`solve_matrix` steps the circulant matrix Riccati equation with a
  fixed block matrix exponential (Vaughan's iteration).

All three return a :class:`FiniteSolution` on the grid ``t_m = m T / n_steps``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
import scipy.linalg

from ._ode import rk4_backward, time_grid
from .errors import DomainError, ResidueError, SingularityError
from .scalar import RiccatiParams, f_closed

__all__ = [
    "FiniteSolution",
    "SpectralCoefficients",
    "MatrixSystem",
    "dft",
    "idft",
    "circulant",
    "cyclic_self_convolution",
    "solve_direct",
    "solve_spectral",
    "matrix_exponential",
    "build_matrix_system",
    "vaughan_iterates",
    "solve_matrix",
    "solve",
]

IMAG_RESIDUE_TOL = 1e-10
PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class FiniteSolution:
    """``values[m, i]`` holds ``phi^i`` at ``time_grid[m]``."""

    n: int
    params: RiccatiParams
    time_grid: np.ndarray
    values: np.ndarray
    method: str = ""

    @property
    def n_steps(self) -> int:
        return len(self.time_grid) - 1


@dataclass(frozen=True)
class SpectralCoefficients:
    """``coeffs[m, k]`` holds the DFT mode ``k`` at ``time_grid[m]``."""

    n: int
    time_grid: np.ndarray
    coeffs: np.ndarray


@dataclass(frozen=True)
class MatrixSystem:
    n: int
    E: np.ndarray
    C: np.ndarray
    M: np.ndarray

    def O(self, tau: float) -> np.ndarray:
        return matrix_exponential(self.M, tau)

    def blocks(self, tau: float):
        """``(O11, O12, O21, O22)`` of ``exp(M tau)``."""
        o = self.O(tau)
        n = self.n
        return o[:n, :n], o[:n, n:], o[n:, :n], o[n:, n:]


def _check_n(n):
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n!r}")


def _check_steps(n_steps):
    if not isinstance(n_steps, (int, np.integer)) or n_steps < 10:
        raise DomainError(f"n_steps must be an integer >= 10, got {n_steps!r}")


def dft(seq) -> np.ndarray:
    """Unnormalised forward transform ``sum_j seq[j] exp(-2 pi i j k / n)``."""
    return np.fft.fft(np.asarray(seq))


def idft(seq) -> np.ndarray:
    """Inverse of :func:`dft`, carrying the ``1/n`` factor."""
    return np.fft.ifft(np.asarray(seq))


def circulant(column) -> np.ndarray:
    """Circulant matrix with ``A[i, j] = column[(i - j) mod n]``."""
    column = np.asarray(column)
    n = len(column)
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return column[idx]


def cyclic_self_convolution(phi: np.ndarray) -> np.ndarray:
    """``sum_j phi[j] phi[(i - j) mod n]`` for every ``i``."""
    return circulant(phi) @ phi


def solve_direct(params: RiccatiParams, n: int, n_steps: int = 1000) -> FiniteSolution:
    """RK4 on ``d phi^i/dt = (phi * phi)_i - eps^i`` from the terminal row."""
    _check_n(n)
    _check_steps(n_steps)
    forcing = params.forcing_vector(n)
    values = rk4_backward(
        lambda phi: cyclic_self_convolution(phi) - forcing,
        params.terminal_vector(n),
        params.t_final,
        n_steps,
    )
    return FiniteSolution(n, params, time_grid(params.t_final, n_steps), values, "direct")


def solve_spectral(
    params: RiccatiParams, n: int, n_steps: int = 1000
) -> tuple[FiniteSolution, SpectralCoefficients]:
    """Modes ``f_t(k/n)`` from the closed form, then the inverse DFT per row."""
    _check_n(n)
    _check_steps(n_steps)
    grid = time_grid(params.t_final, n_steps)
    coeffs = f_closed(params, grid[:, None], np.arange(n)[None, :] / n)
    complex_values = np.fft.ifft(coeffs, axis=1)
    residue = float(np.max(np.abs(complex_values.imag)))
    if residue > IMAG_RESIDUE_TOL:
        raise ResidueError(f"inverse DFT left imaginary residue {residue:.3e}")
    solution = FiniteSolution(n, params, grid, complex_values.real.copy(), "spectral")
    return solution, SpectralCoefficients(n, grid, coeffs)


def matrix_exponential(A, tau: float = 1.0) -> np.ndarray:
    """``exp(A tau)`` by scaling and squaring around a truncated Taylor series."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"matrix_exponential needs a square matrix, got shape {A.shape}")
    if tau < 0 or not math.isfinite(tau):
        raise DomainError(f"tau must be finite and >= 0, got {tau}")
    B = A * tau
    identity = np.eye(A.shape[0])
    norm = float(np.max(np.sum(np.abs(B), axis=0))) if B.size else 0.0
    if norm == 0.0:
        return identity + B
    squarings = max(0, math.ceil(math.log2(norm / 0.5)))
    B = B / 2.0**squarings
    result = identity.copy()
    term = identity
    for k in range(1, 40):
        term = term @ B / k
        result = result + term
        if np.max(np.abs(term)) <= 1e-17 * np.max(np.abs(result)):
            break
    for _ in range(squarings):
        result = result @ result
    return result


def build_matrix_system(params: RiccatiParams, n: int) -> MatrixSystem:
    _check_n(n)
    E = circulant(params.forcing_vector(n))
    C = circulant(params.terminal_vector(n))
    M = np.block([[np.zeros((n, n)), np.eye(n)], [E, np.zeros((n, n))]])
    return MatrixSystem(n=n, E=E, C=C, M=M)


def _steps_for(params: RiccatiParams, d_tau: float) -> int:
    if not d_tau > 0 or d_tau > params.t_final:
        raise DomainError(f"d_tau must lie in (0, {params.t_final}], got {d_tau}")
    steps = round(params.t_final / d_tau)
    if abs(steps * d_tau - params.t_final) > 1e-9 * params.t_final:
        raise DomainError(f"t_final / d_tau must be an integer, got {params.t_final / d_tau}")
    return steps


def vaughan_iterates(params: RiccatiParams, n: int, d_tau: float) -> Iterator[np.ndarray]:
    """Yield ``Psi(k d_tau)`` for ``k = 0 .. T/d_tau`` with ``Psi(0) = C``."""
    steps = _steps_for(params, d_tau)
    system = build_matrix_system(params, n)
    o11, o12, o21, o22 = system.blocks(d_tau)
    psi = system.C.copy()
    yield psi
    for _ in range(steps):
        lhs = o11 + o12 @ psi
        rhs = o21 + o22 @ psi
        lu, piv = scipy.linalg.lu_factor(lhs, check_finite=True)
        if np.min(np.abs(np.diag(lu))) < PIVOT_TOL:
            raise SingularityError("pivot below 1e-12 in Vaughan step; reduce d_tau")
        # psi_new @ lhs = rhs  <=>  lhs.T @ psi_new.T = rhs.T
        psi = scipy.linalg.lu_solve((lu, piv), rhs.T, trans=1).T
        yield psi


def solve_matrix(params: RiccatiParams, n: int, d_tau: float = 1e-3) -> FiniteSolution:
    """First column of ``Phi(t) = Psi(T - t)`` from Vaughan stepping."""
    _check_n(n)
    steps = _steps_for(params, d_tau)
    values = np.empty((steps + 1, n))
    for k, psi in enumerate(vaughan_iterates(params, n, d_tau)):
        values[steps - k] = psi[:, 0]
    return FiniteSolution(n, params, time_grid(params.t_final, steps), values, "matrix")


def solve(params: RiccatiParams, n: int, method: str = "spectral", n_steps: int = 1000) -> FiniteSolution:
    """Dispatch by method name; the matrix path uses ``d_tau = T / n_steps``."""
    if method == "direct":
        return solve_direct(params, n, n_steps)
    if method == "spectral":
        return solve_spectral(params, n, n_steps)[0]
    if method == "matrix":
        _check_steps(n_steps)
        return solve_matrix(params, n, params.t_final / n_steps)
    raise DomainError(f"unknown method {method!r}")
