"""Acceptance gate: twelve criteria, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py`` (the lines are printed in the
terminal summary) or directly with ``python tests/test_acceptance.py``.
Runtime budgets are asserted alongside the numerical tolerances.
"""

from __future__ import annotations

import math
import sys
import time
from contextlib import contextmanager
from math import comb

import numpy as np
import pytest

from riccati_catalan import cli
from riccati_catalan.catalan import catalan_sequence, stationary_solution
from riccati_catalan.convergence import (
    convergence_report,
    pointwise_gap,
    product_sum_terms,
)
from riccati_catalan.finite import (
    build_matrix_system,
    solve_direct,
    solve_matrix,
    solve_spectral,
)
from riccati_catalan.infinite import (
    fourier_coefficients,
    solve_triangular,
    sup_bound_cT,
)
from riccati_catalan.scalar import (
    RiccatiParams,
    f_closed,
    f_ode_oracle,
    generating_function,
    m_eigenvalues,
)

RESULTS: list[str] = []
DOUBLINGS = (16, 32, 64, 128, 256)


@contextmanager
def criterion(number: int, title: str, budget: float):
    """Time the block, record a one-line verdict, then re-raise any failure."""
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        RESULTS.append(f"[{number:2d}] FAIL  {title} ({elapsed:.2f}s): {exc}")
        raise
    elapsed = time.perf_counter() - start
    ok = elapsed < budget
    RESULTS.append(
        f"[{number:2d}] {'PASS' if ok else 'FAIL'}  {title} ({elapsed:.2f}s of {budget:g}s)"
    )
    assert ok, f"criterion {number} took {elapsed:.2f}s, budget {budget}s"


def strictly_decreasing(values) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def test_01_catalan_exactness():
    with criterion(1, "Catalan recurrence equals factorial formula, n <= 30", 0.1):
        seq = catalan_sequence(30).values
        for n, value in enumerate(seq):
            assert value == math.factorial(2 * n) // (math.factorial(n) * math.factorial(n + 1))
            assert value == comb(2 * n, n) // (n + 1)
        assert seq[:3] == (1, 1, 2)


def test_02_stationary_identity():
    with criterion(2, "stationary phi^i = -2 C_{i-1} / 4^i, i <= 20", 0.1):
        phi = stationary_solution(20).values
        cat = catalan_sequence(19).values
        for i in range(1, 21):
            assert abs(phi[i] + 2 * cat[i - 1] / 4**i) <= 1e-12 * abs(phi[i])


def test_03_closed_form_vs_ode():
    with criterion(3, "closed form matches RK4 (1e4 steps) within 1e-8", 1.0):
        grid = np.arange(10001) / 10000
        worst = 0.0
        for eps in (0.5, 1.0, 2.0):
            for c in (0.0, 1.0):
                params = RiccatiParams(eps, c, 1.0)
                for x in (0.05, 0.25, 0.5, 0.75, 0.95):
                    ode = f_ode_oracle(params, x, 10000)
                    worst = max(worst, float(np.max(np.abs(ode - f_closed(params, grid, x)))))
        assert worst <= 1e-8, worst


def test_04_three_way_agreement():
    with criterion(4, "direct, spectral and matrix solutions agree within 1e-5", 30.0):
        worst = 0.0
        for n in (4, 8, 16):
            for eps in (0.5, 1.0, 2.0):
                for c in (0.0, 1.0):
                    params = RiccatiParams(eps, c, 1.0)
                    sols = [
                        solve_direct(params, n, 1000).values,
                        solve_spectral(params, n, 1000)[0].values,
                        solve_matrix(params, n, 1e-3).values,
                    ]
                    for a in range(3):
                        for b in range(a + 1, 3):
                            worst = max(worst, float(np.max(np.abs(sols[a] - sols[b]))))
        assert worst <= 1e-5, worst


def test_05_conservation_and_bounds():
    with criterion(5, "zero row sums, conjugate symmetry, bounds by c_T", 10.0):
        for eps, c in ((1.0, 1.0), (2.0, 0.0), (0.5, 1.0)):
            params = RiccatiParams(eps, c, 1.0)
            c_t = sup_bound_cT(params)
            for n in (4, 8, 16):
                sol, spec = solve_spectral(params, n, 1000)
                assert np.max(np.abs(sol.values.sum(axis=1))) <= 1e-10
                for method in (solve_direct(params, n, 1000), solve_matrix(params, n, 1e-3)):
                    assert np.max(np.abs(method.values.sum(axis=1))) <= 1e-10
                coeffs = spec.coeffs
                mirrored = coeffs[:, (n - np.arange(1, n)) % n]
                assert np.max(np.abs(mirrored - np.conj(coeffs[:, 1:]))) <= 1e-12
                assert np.max(np.abs(sol.values)) <= np.max(np.abs(coeffs)) + 1e-12
                assert np.max(np.abs(coeffs)) <= c_t + 1e-8
            inf = solve_triangular(params, 8, 1000)
            assert np.max(np.abs(inf.values)) <= c_t + 1e-8


def test_06_pointwise_convergence():
    params = RiccatiParams(1.0, 1.0, 1.0)
    with criterion(6, "pointwise gaps shrink at each doubling, gap(256) <= 1e-6", 10.0):
        for t in (0.0, 0.5):
            for j in range(5):
                gaps = pointwise_gap(params, j, t, DOUBLINGS)
                assert strictly_decreasing(gaps), (j, t, gaps)
                assert gaps[-1] <= 1e-6, (j, t, gaps)


def test_07_product_sums():
    params = RiccatiParams(1.0, 1.0, 1.0)
    with criterion(7, "product-sum gaps and tails shrink, Riemann form within 1e-10", 10.0):
        for t in (0.0, 0.5):
            for i in range(5):
                terms = [product_sum_terms(params, i, t, n) for n in DOUBLINGS]
                assert strictly_decreasing([p.product_gap for p in terms]), (i, t)
                assert strictly_decreasing([p.tail for p in terms]), (i, t)
                assert max(p.riemann_gap for p in terms) <= 1e-10


def test_08_uniform_gap_and_gronwall():
    params = RiccatiParams(1.0, 1.0, 1.0)
    with criterion(8, "D_N shrinks, D_256 <= 1e-6, D_N <= Gronwall bound", 20.0):
        report = convergence_report(params, 4, DOUBLINGS)
        d = [report.uniform_gaps[n] for n in DOUBLINGS]
        assert strictly_decreasing(d), d
        assert d[-1] <= 1e-6
        for n in DOUBLINGS:
            assert report.uniform_gaps[n] <= report.gronwall[n].bound, n


def test_09_spectrum():
    with criterion(9, "eigenvalues of M: det test, modulus bound, N=4 list", 1.0):
        for eps in (0.5, 1.0, 2.0):
            params = RiccatiParams(eps, 1.0, 1.0)
            for n in (4, 8):
                m = build_matrix_system(params, n).M
                eye = np.eye(2 * n)
                lams = m_eigenvalues(params, n)
                for lam in lams:
                    det = abs(np.linalg.det(lam * eye - m))
                    scale = abs(np.linalg.det((lam + 0.1) * eye - m))
                    assert det <= 1e-8 * scale, (n, lam, det, scale)
                assert np.max(np.abs(lams)) <= math.sqrt(2 * eps) + 1e-15
            listed = [0, 0]
            for z in (np.sqrt((1 + 1j) * eps), np.sqrt((1 - 1j) * eps), np.sqrt(2 * eps + 0j)):
                listed += [z, -z]
            remaining = list(m_eigenvalues(params, 4))
            for z in listed:
                k = int(np.argmin([abs(z - r) for r in remaining]))
                assert abs(z - remaining.pop(k)) <= 1e-12, z
            assert not remaining


def test_10_generating_function():
    with criterion(10, "circle-sampled Taylor coefficients match phi^j within 1e-8", 1.0):
        params = RiccatiParams(1.0, 1.0, 1.0)
        sol = solve_triangular(params, 8, 1000)
        rho, points = 0.5, 64
        z = rho * np.exp(2j * np.pi * np.arange(points) / points)
        for m in (0, 500, 1000):
            t = sol.time_grid[m]
            taylor = np.fft.fft(generating_function(params, t, z)) / points
            coeffs = taylor[:9].real / rho ** np.arange(9)
            assert np.max(np.abs(coeffs - sol.values[m])) <= 1e-8, t


def test_11_representation_identity():
    with criterion(11, "Fourier quadrature matches the triangular ODE within 1e-8", 2.0):
        params = RiccatiParams(1.0, 1.0, 1.0)
        sol = solve_triangular(params, 8, 1000)
        for m in range(0, 1001, 100):
            quad = fourier_coefficients(params, sol.time_grid[m], 8, 256)
            assert np.max(np.abs(quad - sol.values[m])) <= 1e-8, m


CLI_RUNS = [
    ["catalan", "--n-max", "12"],
    ["stationary", "--i-max", "15", "--format", "json"],
    ["finite", "--n-players", "6", "--method", "all", "--n-steps", "200"],
    ["infinite", "--k-max", "6", "--method", "all", "--n-steps", "200"],
    ["converge", "--k-max", "2", "--n-list", "8,16", "--n-steps", "50", "--format", "json"],
    ["spectrum", "--n-players", "8"],
    ["genfun", "--n-times", "3", "--m-points", "16"],
]

CLI_FAILURES = [
    (["finite", "--eps", "-1"], cli.EXIT_CONFIG, "--eps"),
    (["finite", "--n-players", "1"], cli.EXIT_CONFIG, "--n-players"),
    (["converge", "--n-list", "8,16", "--k-max", "9"], cli.EXIT_CONFIG, "--k-max"),
    (["genfun", "--radius", "1.5"], cli.EXIT_CONFIG, "--radius"),
    (["catalan", "--n-max", "40"], cli.EXIT_SOLVER, "C_36"),
]


def test_12_cli_determinism(tmp_path, capsys):
    with criterion(12, "CLI reruns are byte-identical, exit codes 2/3/4 exercised", 5.0):
        for n, argv in enumerate(CLI_RUNS):
            path = tmp_path / f"run{n}.out"
            agreement = tmp_path / f"run{n}.out.agreement.csv"
            outputs = []
            for _ in range(2):
                assert cli.main(argv + ["--output", str(path)]) == cli.EXIT_OK
                outputs.append(path.read_bytes())
                if agreement.exists():
                    outputs.append(agreement.read_bytes())
                    agreement.unlink()
                path.unlink()
            half = len(outputs) // 2
            assert outputs[:half] == outputs[half:], argv
        for argv, status, field in CLI_FAILURES:
            path = tmp_path / "never.csv"
            assert cli.main(argv + ["--output", str(path)]) == status, argv
            assert field in capsys.readouterr().err
            assert not path.exists()
        missing = tmp_path / "no" / "such" / "dir" / "x.csv"
        assert cli.main(["catalan", "--output", str(missing)]) == cli.EXIT_IO
        assert not list(tmp_path.glob("no*"))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
