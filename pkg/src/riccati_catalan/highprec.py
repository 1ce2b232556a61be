"""Multiple-precision kernels for the convergence measurements.

Finite-N gaps shrink geometrically in N (about ``1.7**-N`` at ``t = 0`` for
``eps = c = T = 1``), so beyond ``N ~ 64`` they sit below double-precision
round-off.  These kernels evaluate both sides of each comparison with MPFR
numbers (``gmpy2``) at a chosen binary precision:

* the finite side from the closed form per DFT mode, followed by the inverse
  DFT restricted to low indices;
* the infinite side from a Taylor-series integrator of the lower-triangular
  system, which shares nothing with the closed form.

Arrays returned here have ``dtype=object`` and hold ``mpfr``/``mpc`` values
created under the requested precision.
"""

from __future__ import annotations

import contextlib
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .errors import DomainError, RiccatiError, SingularityError
from .scalar import SINGULARITY_THRESHOLD, RiccatiParams

__all__ = [
    "DEFAULT_PREC_BITS",
    "precision",
    "closed_form_grid",
    "closed_form_points",
    "mode_points",
    "low_index_sums",
    "taylor_triangular",
    "to_float",
]

DEFAULT_PREC_BITS = 512
_MAX_TAYLOR_ORDER = 2000

_real = np.frompyfunc(lambda z: z.real, 1, 1)
_imag = np.frompyfunc(lambda z: z.imag, 1, 1)
_square = np.frompyfunc(lambda z: z * z, 1, 1)
_abs = np.frompyfunc(abs, 1, 1)


@contextlib.contextmanager
def precision(bits: int):
    if not isinstance(bits, int) or bits < 53:
        raise DomainError(f"precision must be an integer >= 53 bits, got {bits!r}")
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        yield


def to_float(arr) -> np.ndarray:
    return np.asarray(arr, dtype=object).astype(float)


def mode_points(n_list: Iterable[int]) -> list[Fraction]:
    """Sorted union of the frequencies ``k/N``, ``0 <= k <= N/2``, over ``n_list``."""
    points = set()
    for n in n_list:
        points.update(Fraction(k, n) for k in range(n // 2 + 1))
    return sorted(points)


def _mode_constants(params: RiccatiParams, x: Fraction):
    """``s = sqrt(eps) w`` and ``a+-`` for one frequency, at the current precision."""
    pi = gmpy2.const_pi()
    angle = pi * x.numerator / x.denominator
    # 1 - exp(-2 pi i x) = 2 sin^2(pi x) + i sin(2 pi x)
    gap = mpc(2 * gmpy2.sin(angle) ** 2, gmpy2.sin(2 * angle))
    w = gmpy2.sqrt(gap)
    root_eps = gmpy2.sqrt(mpfr(params.eps))
    c = mpfr(params.c)
    return root_eps * w, root_eps + c * w, root_eps - c * w


def _ratio(s, a_plus, a_minus, e_plus, e_minus):
    num_plus = a_plus * e_plus
    num_minus = a_minus * e_minus
    den = num_plus + num_minus
    if abs(den) < SINGULARITY_THRESHOLD:
        raise SingularityError("closed-form denominator vanished")
    return s * (num_plus - num_minus) / den


def closed_form_grid(
    params: RiccatiParams, xs: Sequence[Fraction], n_steps: int
) -> np.ndarray:
    """``f_{t_m}(x)`` on ``t_m = m T / n_steps`` for each rational ``x`` in ``xs``.

    ``exp(+-s tau)`` is advanced by repeated multiplication with
    ``exp(+-s h)``, which costs ``n_steps`` rounding errors of size
    ``2**-prec``.  Call inside :func:`precision`.
    """
    h = mpfr(params.t_final) / n_steps
    out = np.empty((n_steps + 1, len(xs)), dtype=object)
    for col, x in enumerate(xs):
        s, a_plus, a_minus = _mode_constants(params, x)
        step_plus = gmpy2.exp(s * h)
        step_minus = gmpy2.exp(-s * h)
        e_plus = mpc(1)
        e_minus = mpc(1)
        for m in range(n_steps, -1, -1):
            out[m, col] = _ratio(s, a_plus, a_minus, e_plus, e_minus)
            e_plus *= step_plus
            e_minus *= step_minus
    return out


def closed_form_points(
    params: RiccatiParams, ts: Sequence[float], xs: Sequence[Fraction]
) -> np.ndarray:
    """``f_t(x)`` at arbitrary times, one exponential per point."""
    big_t = mpfr(params.t_final)
    out = np.empty((len(ts), len(xs)), dtype=object)
    for col, x in enumerate(xs):
        s, a_plus, a_minus = _mode_constants(params, x)
        for row, t in enumerate(ts):
            tau = big_t - mpfr(t)
            out[row, col] = _ratio(s, a_plus, a_minus, gmpy2.exp(s * tau), gmpy2.exp(-s * tau))
    return out


def low_index_sums(samples: np.ndarray, xs: Sequence[Fraction], n: int, k_max: int) -> np.ndarray:
    """Real parts of ``(1/n) sum_k g(k/n) exp(2 pi i j k / n)`` for ``j <= k_max``.

    ``samples[:, col]`` holds ``g`` at ``xs[col]``; only ``k <= n/2`` is read,
    the other half following from ``g(1 - x) = conj(g(x))``.  With
    ``g = f_t`` this is the finite solution ``phi^j`` of the ``n``-player
    system; with ``g = f_t**2`` it is the full cyclic product sum.
    """
    index = {x: col for col, x in enumerate(xs)}
    half = n // 2
    cols = [index[Fraction(k, n)] for k in range(half + 1)]
    g = samples[:, cols]
    pi = gmpy2.const_pi()
    cos_table = [gmpy2.cos(2 * pi * r / n) / n for r in range(n)]
    sin_table = [gmpy2.sin(2 * pi * r / n) / n for r in range(n)]
    cos_w = np.empty((half + 1, k_max + 1), dtype=object)
    sin_w = np.empty((half + 1, k_max + 1), dtype=object)
    for k in range(half + 1):
        weight = 1 if k == 0 or 2 * k == n else 2
        for j in range(k_max + 1):
            r = (j * k) % n
            cos_w[k, j] = weight * cos_table[r]
            sin_w[k, j] = weight * sin_table[r]
    return _real(g) @ cos_w - _imag(g) @ sin_w


def square(samples: np.ndarray) -> np.ndarray:
    return _square(samples)


def taylor_triangular(params: RiccatiParams, k_max: int, n_steps: int) -> np.ndarray:
    """Catalan functions ``phi^0 .. phi^{k_max}`` on ``t_m = m T / n_steps``.

    Integrates the reversed-time system
    ``d/dtau phi^i = eps^i - sum_{j<=i} phi^j phi^{i-j}`` with Taylor series
    whose coefficients come from Cauchy products; each series is extended
    until its terms fall below the working precision and is then evaluated
    at every grid point it covers.  Call inside :func:`precision`.
    """
    if k_max < 0 or n_steps < 1:
        raise DomainError("need k_max >= 0 and n_steps >= 1")
    prec = gmpy2.get_context().precision
    tol = mpfr(2) ** (-prec - 8)
    size = k_max + 1
    h = mpfr(params.t_final) / n_steps
    reach = 0.1 / max(1.0, params.eps**0.5, params.c)
    stride = max(1, min(n_steps, int(reach / float(h))))
    forcing = [mpfr(params.forcing(i)) for i in range(size)]
    state = [mpfr(params.terminal(i)) for i in range(size)]
    zero = mpfr(0)

    out = np.empty((n_steps + 1, size), dtype=object)
    out[n_steps, :] = state
    done = 0
    while done < n_steps:
        span = min(stride, n_steps - done)
        big_h = span * h
        coeffs = np.full((_MAX_TAYLOR_ORDER + 1, size), zero, dtype=object)
        coeffs[0, :] = state
        small = 0
        order = 0
        while small < 2:
            if order >= _MAX_TAYLOR_ORDER:
                raise RiccatiError("Taylor series failed to converge; reduce the step")
            for i in range(size):
                total = zero
                for j in range(i + 1):
                    total += np.dot(coeffs[: order + 1, j], coeffs[order::-1, i - j])
                lead = forcing[i] if order == 0 else zero
                coeffs[order + 1, i] = (lead - total) / (order + 1)
            order += 1
            term = max(abs(v) for v in coeffs[order]) * big_h**order
            small = small + 1 if term < tol and order >= 4 else 0
        offsets = np.array([l * h for l in range(1, span + 1)], dtype=object)[:, None]
        acc = np.broadcast_to(coeffs[order], (span, size)).astype(object)
        for n in range(order - 1, -1, -1):
            acc = acc * offsets + coeffs[n]
        for l in range(span):
            out[n_steps - done - l - 1, :] = acc[l]
        state = list(acc[-1])
        done += span
    return out
