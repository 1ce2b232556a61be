"""Fixed-step classical RK4 for terminal value problems."""

from __future__ import annotations

from typing import Callable

import numpy as np


def rk4_backward(
    rhs: Callable[[np.ndarray], np.ndarray],
    terminal: np.ndarray,
    t_final: float,
    n_steps: int,
) -> np.ndarray:
    """Integrate the autonomous system ``dy/dt = rhs(y)`` backward from ``y(T)``.

    The problem is solved forward in reversed time ``tau = T - t``.  Row ``m``
    of the result holds ``y(t_m)`` with ``t_m = m * T / n_steps``, so the last
    row is the terminal value itself.
    """
    terminal = np.asarray(terminal)
    h = t_final / n_steps
    out = np.empty((n_steps + 1,) + terminal.shape, dtype=terminal.dtype)
    # 0-d problems run on Python scalars, several times faster than numpy scalars
    y = terminal.item() if terminal.ndim == 0 else terminal.copy()
    out[n_steps] = y
    for m in range(n_steps, 0, -1):
        k1 = -rhs(y)
        k2 = -rhs(y + 0.5 * h * k1)
        k3 = -rhs(y + 0.5 * h * k2)
        k4 = -rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[m - 1] = y
    return out


def time_grid(t_final: float, n_steps: int) -> np.ndarray:
    return np.arange(n_steps + 1) * (t_final / n_steps)
