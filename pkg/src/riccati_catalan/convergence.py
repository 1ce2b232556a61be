"""Numerical evidence for the N -> infinity convergence of the periodic system.

Finite-N quantities come from the spectral route (closed form per DFT mode,
then inverse DFT); the infinite side comes from the triangular system.  Both
are evaluated at ``prec_bits`` binary digits (see :mod:`.highprec`), because
the gaps fall geometrically in N and leave double precision well before
``N = 256``.  ``prec_bits=None`` runs the same measurements in float64 with
:func:`~riccati_catalan.finite.solve_spectral` and the RK4
:func:`~riccati_catalan.infinite.solve_triangular`; those results bottom out
at round-off (about ``1e-13``) and are meant for quick looks and cross-checks.

Gaps are differenced at working precision and only then rounded to float64.
"""

from __future__ import annotations

import contextlib
import functools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import highprec as hp
from ._ode import time_grid
from .errors import DomainError, RiccatiError
from .finite import solve_spectral
from .infinite import solve_triangular
from .scalar import RiccatiParams, f_closed

__all__ = [
    "DEFAULT_N_LIST",
    "GronwallTriple",
    "ProductSumTerms",
    "ConvergenceReport",
    "pointwise_gap",
    "product_sum_terms",
    "product_sum_gap",
    "tail_sum",
    "uniform_gap",
    "gronwall_bound",
    "convergence_report",
]

DEFAULT_N_LIST = (8, 16, 32, 64, 128, 256)
RIEMANN_TOL = 1e-10


@dataclass(frozen=True)
class GronwallTriple:
    c_n1: float
    int_c_n2: float
    bound: float


@dataclass(frozen=True)
class ProductSumTerms:
    """Pieces of the cyclic product sum for one ``(N, i, t)``.

    ``full`` is the direct cyclic sum, ``riemann`` its Fourier-side form
    ``(1/N) sum_k f_t(k/N)**2 exp(2 pi i i k / N)``; ``riemann_gap`` is their
    difference taken at working precision.
    """

    n: int
    i: int
    t: float
    full: float
    riemann: float
    riemann_gap: float
    head_finite: float
    tail: float
    head_infinite: float
    product_gap: float


@dataclass
class ConvergenceReport:
    params: RiccatiParams
    K: int
    n_list: tuple[int, ...]
    n_steps: int
    prec_bits: int | None
    time_grid: np.ndarray
    pointwise_gaps: dict[int, np.ndarray] = field(default_factory=dict)
    uniform_gaps: dict[int, float] = field(default_factory=dict)
    product_gaps: dict[int, np.ndarray] = field(default_factory=dict)
    tail_sums: dict[int, np.ndarray] = field(default_factory=dict)
    gronwall: dict[int, GronwallTriple] = field(default_factory=dict)
    decay_rate: float | None = None

    def to_dict(self) -> dict:
        def arrays(d):
            return {str(n): a.tolist() for n, a in d.items()}

        return {
            "params": {"eps": self.params.eps, "c": self.params.c, "t_final": self.params.t_final},
            "K": self.K,
            "n_list": list(self.n_list),
            "n_steps": self.n_steps,
            "prec_bits": self.prec_bits,
            "time_grid": self.time_grid.tolist(),
            "pointwise_gaps": arrays(self.pointwise_gaps),
            "uniform_gaps": {str(n): v for n, v in self.uniform_gaps.items()},
            "product_gaps": arrays(self.product_gaps),
            "tail_sums": arrays(self.tail_sums),
            "gronwall": {
                str(n): [g.c_n1, g.int_c_n2, g.bound] for n, g in self.gronwall.items()
            },
            "decay_rate": self.decay_rate,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConvergenceReport":
        def arrays(d):
            return {int(n): np.array(v, dtype=float) for n, v in d.items()}

        return cls(
            params=RiccatiParams(**data["params"]),
            K=data["K"],
            n_list=tuple(data["n_list"]),
            n_steps=data["n_steps"],
            prec_bits=data["prec_bits"],
            time_grid=np.array(data["time_grid"], dtype=float),
            pointwise_gaps=arrays(data["pointwise_gaps"]),
            uniform_gaps={int(n): float(v) for n, v in data["uniform_gaps"].items()},
            product_gaps=arrays(data["product_gaps"]),
            tail_sums=arrays(data["tail_sums"]),
            gronwall={int(n): GronwallTriple(*v) for n, v in data["gronwall"].items()},
            decay_rate=data["decay_rate"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ConvergenceReport":
        return cls.from_dict(json.loads(text))


def _workers() -> int:
    raw = os.environ.get("RCL_THREADS", "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"RCL_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise DomainError(f"RCL_THREADS must be a positive integer, got {raw!r}")
    return value


def _map_ordered(fn, items):
    """Apply ``fn`` to ``items``, possibly in threads; results keep input order."""
    items = list(items)
    workers = min(_workers(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _check_n_list(n_list: Sequence[int]) -> tuple[int, ...]:
    n_list = tuple(int(n) for n in n_list)
    if not n_list or any(n < 2 for n in n_list):
        raise DomainError("n_list must be a non-empty list of integers >= 2")
    if list(n_list) != sorted(set(n_list)):
        raise DomainError("n_list must be strictly increasing")
    return n_list


def _grid_index(params: RiccatiParams, t: float, n_steps: int) -> int:
    if not 0.0 <= t <= params.t_final:
        raise DomainError(f"t must lie in [0, {params.t_final}], got {t}")
    pos = t * n_steps / params.t_final
    m = round(pos)
    if abs(pos - m) > 1e-9:
        raise DomainError(f"t={t} is not a point of the {n_steps}-step time grid")
    return m


def _head(rows):
    """Triangular self-convolution along the last axis (works on object arrays)."""
    size = rows.shape[-1]
    out = np.empty_like(rows)
    for i in range(size):
        acc = rows[..., 0] * rows[..., i]
        for j in range(1, i + 1):
            acc = acc + rows[..., j] * rows[..., i - j]
        out[..., i] = acc
    return out


def _as_float(arr, prec_bits):
    return hp.to_float(arr) if prec_bits is not None else np.asarray(arr, dtype=float)


# ---------------------------------------------------------------- snapshots


def _working(prec_bits):
    return hp.precision(prec_bits) if prec_bits is not None else contextlib.nullcontext()


def _frozen(arr):
    arr.setflags(write=False)
    return arr


@functools.lru_cache(maxsize=32)
def _infinite_grid(params, k_max, n_steps, prec_bits):
    if prec_bits is None:
        return _frozen(solve_triangular(params, k_max, n_steps).values)
    with hp.precision(prec_bits):
        return _frozen(hp.taylor_triangular(params, k_max, n_steps))


@functools.lru_cache(maxsize=64)
def _finite_at(params, t, n, prec_bits):
    """Full spectrum ``phi^0 .. phi^{n-1}`` at one time and the Riemann product sums."""
    if prec_bits is None:
        samples = f_closed(params, t, np.arange(n) / n)
        phi = np.fft.ifft(samples).real
        riemann = np.fft.ifft(samples**2).real
        return _frozen(phi), _frozen(riemann)
    with hp.precision(prec_bits):
        xs = hp.mode_points([n])
        f = hp.closed_form_points(params, [t], xs)
        phi = hp.low_index_sums(f, xs, n, n - 1)[0]
        riemann = hp.low_index_sums(hp.square(f), xs, n, n - 1)[0]
        return _frozen(phi), _frozen(riemann)


# ---------------------------------------------------------------- point measurements


def pointwise_gap(
    params: RiccatiParams,
    j: int,
    t: float,
    n_list: Sequence[int] = DEFAULT_N_LIST,
    n_steps: int = 1000,
    prec_bits: int | None = hp.DEFAULT_PREC_BITS,
) -> list[float]:
    """``|phi^j_t(N) - phi^j_t|`` for each N in ``n_list``.

    ``t`` must be a point of the ``n_steps`` grid on which the infinite
    reference is integrated.
    """
    n_list = _check_n_list(n_list)
    if not 0 <= j <= min(n_list) - 1:
        raise DomainError(f"j must lie in [0, {min(n_list) - 1}], got {j}")
    m = _grid_index(params, t, n_steps)
    ref = _infinite_grid(params, j, n_steps, prec_bits)[m, j]
    gaps = []
    for n in n_list:
        phi, _ = _finite_at(params, float(t), n, prec_bits)
        with _working(prec_bits):
            gaps.append(float(abs(phi[j] - ref)))
    return gaps


def product_sum_terms(
    params: RiccatiParams,
    i: int,
    t: float,
    n: int,
    n_steps: int = 1000,
    prec_bits: int | None = hp.DEFAULT_PREC_BITS,
) -> ProductSumTerms:
    """Direct and Riemann-form cyclic product sums, head and tail, for one N.

    Raises :class:`RiccatiError` if the two forms of the full sum differ by
    more than ``1e-10``.
    """
    if not 0 <= i <= n - 2:
        raise DomainError(f"i must lie in [0, {n - 2}], got {i}")
    m = _grid_index(params, t, n_steps)
    ref = _infinite_grid(params, i, n_steps, prec_bits)[m]
    phi, riemann = _finite_at(params, float(t), n, prec_bits)
    with _working(prec_bits):
        return _product_terms(phi, riemann, ref, n, i, t)


def _product_terms(phi, riemann, ref, n, i, t):
    def partial(lo, hi):
        acc = phi[lo] * phi[(n + i - lo) % n]
        for j in range(lo + 1, hi):
            acc = acc + phi[j] * phi[(n + i - j) % n]
        return acc

    head_fin = partial(0, i + 1)
    tail = partial(i + 1, n) if i + 1 < n else 0 * head_fin
    full = partial(0, n)
    head_inf = _head(np.asarray(ref)[None, :])[0, i]
    riemann_gap = float(abs(full - riemann[i]))
    if riemann_gap > RIEMANN_TOL:
        raise RiccatiError(
            f"cyclic sum and its Riemann form disagree by {riemann_gap:.3e} (N={n}, i={i})"
        )
    return ProductSumTerms(
        n=n,
        i=i,
        t=float(t),
        full=float(full),
        riemann=float(riemann[i]),
        riemann_gap=riemann_gap,
        head_finite=float(head_fin),
        tail=float(abs(tail)),
        head_infinite=float(head_inf),
        product_gap=float(abs(full - head_inf)),
    )


def product_sum_gap(
    params: RiccatiParams,
    i: int,
    t: float,
    n_list: Sequence[int] = DEFAULT_N_LIST,
    n_steps: int = 1000,
    prec_bits: int | None = hp.DEFAULT_PREC_BITS,
) -> list[float]:
    """``|sum_{j<N} phi^j phi^{N+i-j} - sum_{j<=i} varphi^j varphi^{i-j}|`` per N."""
    n_list = _check_n_list(n_list)
    if not 0 <= i <= min(n_list) - 2:
        raise DomainError(f"i must lie in [0, {min(n_list) - 2}], got {i}")
    return [product_sum_terms(params, i, t, n, n_steps, prec_bits).product_gap for n in n_list]


def tail_sum(
    params: RiccatiParams,
    i: int,
    t: float,
    n_list: Sequence[int] = DEFAULT_N_LIST,
    n_steps: int = 1000,
    prec_bits: int | None = hp.DEFAULT_PREC_BITS,
) -> list[float]:
    """``|sum_{j=i+1}^{N-1} phi^j phi^{N+i-j}|`` per N."""
    n_list = _check_n_list(n_list)
    if not 0 <= i <= min(n_list) - 2:
        raise DomainError(f"i must lie in [0, {min(n_list) - 2}], got {i}")
    return [product_sum_terms(params, i, t, n, n_steps, prec_bits).tail for n in n_list]


# ---------------------------------------------------------------- grid measurements


def _gronwall(params, K, tails, fin_abs, inf_abs, grid):
    c_n1 = params.t_final * float(np.max(tails))
    # c_{N,2}(t) looks at u in [T - t, T]: a running max taken from the terminal end
    level = np.maximum(fin_abs, inf_abs).max(axis=1)
    from_end = np.maximum.accumulate(level[::-1])
    c_n2 = K * from_end
    taus = params.t_final - grid[::-1]
    integral = float(np.sum(0.5 * (c_n2[1:] + c_n2[:-1]) * np.diff(taus)))
    return GronwallTriple(c_n1=c_n1, int_c_n2=integral, bound=c_n1 * math.exp(integral))


def _finite_measurements(params, n_list, k_max, n_steps, prec_bits, inf, inf_head):
    """Per N: pointwise gaps, product-sum gaps, tail sums and ``|phi|`` on the grid.

    The full cyclic sums use the Riemann form; their equality with the direct
    sum is checked pointwise by :func:`product_sum_terms`.
    """

    def measure(phi, full):
        with _working(prec_bits):
            return (
                np.abs(_as_float(phi - inf, prec_bits)),
                np.abs(_as_float(full - inf_head, prec_bits)),
                np.abs(_as_float(full - _head(phi), prec_bits)),
                np.abs(_as_float(phi, prec_bits)),
            )

    if prec_bits is None:

        def one(n):
            sol, spec = solve_spectral(params, n, n_steps)
            full = np.fft.ifft(spec.coeffs**2, axis=1).real
            return measure(sol.values[:, : k_max + 1], full[:, : k_max + 1])

        return _map_ordered(one, n_list)

    with hp.precision(prec_bits):
        xs = hp.mode_points(n_list)
        f = hp.closed_form_grid(params, xs, n_steps)
        f2 = hp.square(f)

    def one(n):
        with hp.precision(prec_bits):
            phi = hp.low_index_sums(f, xs, n, k_max)
            full = hp.low_index_sums(f2, xs, n, k_max)
        return measure(phi, full)

    return _map_ordered(one, n_list)


def convergence_report(
    params: RiccatiParams,
    K: int = 4,
    n_list: Sequence[int] = DEFAULT_N_LIST,
    n_steps: int = 1000,
    prec_bits: int | None = hp.DEFAULT_PREC_BITS,
) -> ConvergenceReport:
    """Every grid-based measurement for ``j, i <= K`` and each N in ``n_list``."""
    n_list = _check_n_list(n_list)
    if not 0 <= K <= min(n_list) - 1:
        raise DomainError(f"K must lie in [0, {min(n_list) - 1}], got {K}")
    if n_steps < 10:
        raise DomainError(f"n_steps must be >= 10, got {n_steps}")
    grid = time_grid(params.t_final, n_steps)
    inf = _infinite_grid(params, K, n_steps, prec_bits)
    with _working(prec_bits):
        inf_head = _head(inf)
    inf_abs = np.abs(_as_float(inf, prec_bits))
    report = ConvergenceReport(params, K, n_list, n_steps, prec_bits, grid)
    for n, (gaps, products, tails, fin_abs) in zip(
        n_list, _finite_measurements(params, n_list, K, n_steps, prec_bits, inf, inf_head)
    ):
        report.pointwise_gaps[n] = gaps
        report.uniform_gaps[n] = float(np.max(gaps))
        report.product_gaps[n] = products
        report.tail_sums[n] = tails
        report.gronwall[n] = _gronwall(params, K, tails, fin_abs, inf_abs, grid)
    report.decay_rate = _fit_decay(report.uniform_gaps)
    return report


def _fit_decay(uniform_gaps: dict[int, float]) -> float | None:
    """Slope of ``-log D_N`` against N; reported, never asserted."""
    pts = [(n, d) for n, d in uniform_gaps.items() if d > 0]
    if len(pts) < 2:
        return None
    ns = np.array([p[0] for p in pts], dtype=float)
    logs = np.log([p[1] for p in pts])
    return float(-np.polyfit(ns, logs, 1)[0])


def uniform_gap(
    params: RiccatiParams,
    K: int = 4,
    n_list: Sequence[int] = DEFAULT_N_LIST,
    n_steps: int = 1000,
    prec_bits: int | None = hp.DEFAULT_PREC_BITS,
) -> ConvergenceReport:
    """``D_N(T) = max_{j<=K, t} |phi^j_t(N) - phi^j_t|``; see :func:`convergence_report`."""
    return convergence_report(params, K, n_list, n_steps, prec_bits)


def gronwall_bound(
    params: RiccatiParams,
    K: int,
    N: int,
    n_steps: int = 1000,
    prec_bits: int | None = hp.DEFAULT_PREC_BITS,
) -> GronwallTriple:
    """``(c_{N,1}(T), int_0^T c_{N,2}, c_{N,1} exp(int c_{N,2}))`` for one N."""
    return convergence_report(params, K, [N], n_steps, prec_bits).gronwall[N]
