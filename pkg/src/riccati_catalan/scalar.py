"""Scalar auxiliary Riccati equation, its generating function and the spectrum of M.

For a fixed frequency ``x`` in ``[0, 1]`` the auxiliary equation

    d/dt f_t(x) = f_t(x)**2 - (1 - exp(-2 pi i x)) * eps,   f_T(x) = c (1 - exp(-2 pi i x))

has the closed form returned by :func:`f_closed`.  :func:`f_ode_oracle` solves
the same terminal value problem with RK4 and never touches the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._ode import rk4_backward
from .errors import DomainError, SingularityError

__all__ = [
    "RiccatiParams",
    "PolarRoot",
    "polar_root",
    "root_of_unity_gap",
    "f_closed",
    "f_ode_oracle",
    "generating_function",
    "m_eigenvalues",
]

SINGULARITY_THRESHOLD = 1e-300


@dataclass(frozen=True)
class RiccatiParams:
    """Problem constants: forcing ``eps``, terminal weight ``c`` and horizon ``T``."""

    eps: float = 1.0
    c: float = 1.0
    t_final: float = 1.0

    def __post_init__(self):
        for name in ("eps", "c", "t_final"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise DomainError(f"{name} must be a finite real, got {value!r}")
        if self.eps <= 0:
            raise DomainError(f"eps must be > 0, got {self.eps}")
        if self.c < 0:
            raise DomainError(f"c must be >= 0, got {self.c}")
        if self.t_final <= 0:
            raise DomainError(f"t_final must be > 0, got {self.t_final}")

    def forcing(self, i: int) -> float:
        """``eps^i``: ``eps`` at 0, ``-eps`` at 1, zero elsewhere."""
        return self.eps if i == 0 else -self.eps if i == 1 else 0.0

    def terminal(self, i: int) -> float:
        """Terminal value ``phi^i_T``: ``c`` at 0, ``-c`` at 1, zero elsewhere."""
        return self.c if i == 0 else -self.c if i == 1 else 0.0

    def forcing_vector(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        out[0] = self.eps
        if n > 1:
            out[1] = -self.eps
        return out

    def terminal_vector(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        out[0] = self.c
        if n > 1:
            out[1] = -self.c
        return out


@dataclass(frozen=True)
class PolarRoot:
    x: float
    r: float
    theta: float
    w: complex


def _check_unit(x, name="x"):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError(f"{name} must lie in [0, 1]")
    return x


def _check_time(params: RiccatiParams, t):
    t = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t < 0.0) or np.any(t > params.t_final):
        raise DomainError(f"t must lie in [0, {params.t_final}]")
    return t


def root_of_unity_gap(x):
    """``1 - exp(-2 pi i x)`` without cancellation near ``x = 0`` and ``x = 1``."""
    x = np.asarray(x, dtype=float)
    half = np.pi * np.minimum(x, 1.0 - x)
    return 2.0 * np.sin(half) ** 2 + 1j * np.sin(2.0 * np.pi * x)


def _w(x):
    """Principal square root of ``1 - exp(-2 pi i x)`` for ``x`` in ``[0, 1]``.

    Modulus ``sqrt(2 sin(pi x))`` and argument ``pi/4 - pi x / 2``; the
    symmetric sine keeps ``w`` exactly zero at both endpoints.
    """
    x = np.asarray(x, dtype=float)
    r = np.sqrt(2.0 * np.sin(np.pi * np.minimum(x, 1.0 - x)))
    interior = (x > 0.0) & (x < 1.0)
    theta = np.where(interior, 0.25 * np.pi - 0.5 * np.pi * x, 0.0)
    return r, theta, r * np.exp(1j * theta)


def polar_root(x: float) -> PolarRoot:
    """Polar data ``(r, theta, w)`` with ``w**2 = 1 - exp(-2 pi i x)``.

    >>> p = polar_root(0.5)
    >>> round(p.r ** 2, 12), p.theta
    (2.0, 0.0)
    """
    _check_unit(x)
    r, theta, w = _w(float(x))
    return PolarRoot(x=float(x), r=float(r), theta=float(theta), w=complex(w))


def f_closed(params: RiccatiParams, t, x):
    """Closed-form solution ``f_t(x)`` of the auxiliary Riccati equation.

    ``t`` and ``x`` broadcast against each other; a scalar pair returns a
    Python ``complex``.  Raises :class:`SingularityError` when the denominator
    drops below ``1e-300`` in modulus.
    """
    scalar = np.ndim(t) == 0 and np.ndim(x) == 0
    t = _check_time(params, t)
    x = _check_unit(x)
    _, _, w = _w(x)
    root_eps = math.sqrt(params.eps)
    s = root_eps * w
    a_plus = root_eps + params.c * w
    a_minus = root_eps - params.c * w
    tau = params.t_final - t
    e_plus = np.exp(s * tau)
    e_minus = np.exp(-s * tau)
    den = a_plus * e_plus + a_minus * e_minus
    if np.any(np.abs(den) < SINGULARITY_THRESHOLD):
        raise SingularityError("closed-form denominator vanished")
    out = s * (a_plus * e_plus - a_minus * e_minus) / den
    return complex(out) if scalar else out


def f_ode_oracle(params: RiccatiParams, x, n_steps: int) -> np.ndarray:
    """RK4 solution of the auxiliary equation on ``t_m = m T / n_steps``.

    ``x`` may be an array, in which case all frequencies are integrated
    together and row ``m`` has the shape of ``x``.
    """
    if n_steps < 10:
        raise DomainError(f"n_steps must be >= 10, got {n_steps}")
    x = _check_unit(x)
    gap = np.asarray(root_of_unity_gap(x), dtype=complex)
    if gap.ndim == 0:
        gap = complex(gap)
    kappa = gap * params.eps
    terminal = np.asarray(params.c * gap, dtype=complex)
    return rk4_backward(lambda f: f * f - kappa, terminal, params.t_final, n_steps)


def generating_function(params: RiccatiParams, t, z):
    """``S_t(z) = sum_k z**k phi^k_t`` for ``|z| < 1`` in closed form."""
    scalar = np.ndim(t) == 0 and np.ndim(z) == 0
    t = _check_time(params, t)
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0):
        raise DomainError("generating function requires |z| < 1")
    one_minus = 1.0 - z
    root = np.sqrt(params.eps * one_minus)
    a_plus = root + params.c * one_minus
    a_minus = root - params.c * one_minus
    tau = params.t_final - t
    e_plus = np.exp(root * tau)
    e_minus = np.exp(-root * tau)
    den = a_plus * e_plus + a_minus * e_minus
    if np.any(np.abs(den) < SINGULARITY_THRESHOLD):
        raise SingularityError("generating-function denominator vanished")
    out = root * (a_plus * e_plus - a_minus * e_minus) / den
    return complex(out) if scalar else out


def m_eigenvalues(params: RiccatiParams, n: int) -> np.ndarray:
    """The ``2n`` eigenvalues ``+-sqrt(eps (1 - exp(2 pi i k / n)))`` of M.

    Returned as ``[+l_0, -l_0, +l_1, -l_1, ...]``; ``k = 0`` contributes the
    double eigenvalue zero.
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n!r}")
    k = np.arange(n)
    angle = 2.0 * np.pi * k / n
    # 1 - exp(i a) = 2 sin^2(a/2) - i sin(a); exact zero at k = 0
    base = 2.0 * np.sin(0.5 * angle) ** 2 - 1j * np.sin(angle)
    base[0] = 0.0
    roots = np.sqrt(params.eps * base)
    out = np.empty(2 * n, dtype=complex)
    out[0::2] = roots
    out[1::2] = -roots
    return out
