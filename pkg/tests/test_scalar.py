import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riccati_catalan.errors import DomainError
from riccati_catalan.finite import build_matrix_system
from riccati_catalan.infinite import solve_triangular
from riccati_catalan.scalar import (
    RiccatiParams,
    f_closed,
    f_ode_oracle,
    generating_function,
    m_eigenvalues,
    polar_root,
    root_of_unity_gap,
)

unit = st.floats(min_value=0.0, max_value=1.0)
params_st = st.builds(
    RiccatiParams,
    eps=st.floats(min_value=0.1, max_value=3.0),
    c=st.floats(min_value=0.0, max_value=2.0),
    t_final=st.floats(min_value=0.1, max_value=2.0),
)


@pytest.mark.parametrize(
    "kwargs", [dict(eps=0.0), dict(eps=-1.0), dict(c=-0.1), dict(t_final=0.0), dict(eps=math.nan)]
)
def test_params_validation(kwargs):
    with pytest.raises(DomainError):
        RiccatiParams(**kwargs)


def test_params_housing():
    p = RiccatiParams(eps=2.0, c=3.0)
    assert [p.forcing(i) for i in range(3)] == [2.0, -2.0, 0.0]
    assert [p.terminal(i) for i in range(3)] == [3.0, -3.0, 0.0]
    assert list(p.forcing_vector(4)) == [2.0, -2.0, 0.0, 0.0]
    assert list(p.terminal_vector(4)) == [3.0, -3.0, 0.0, 0.0]


def test_polar_root_examples():
    half = polar_root(0.5)
    assert half.r == pytest.approx(math.sqrt(2), abs=1e-15)
    assert half.theta == 0.0
    assert half.w == pytest.approx(math.sqrt(2), abs=1e-15)
    zero = polar_root(0.0)
    assert zero.r == 0.0 and zero.w == 0.0
    quarter = polar_root(0.25)
    assert quarter.r == pytest.approx(2**0.25, abs=1e-15)
    assert quarter.theta == pytest.approx(math.pi / 8, abs=1e-15)


@pytest.mark.parametrize("bad", [-0.01, 1.01, math.nan])
def test_polar_root_domain(bad):
    with pytest.raises(DomainError):
        polar_root(bad)


@given(unit)
def test_polar_root_invariants(x):
    p = polar_root(x)
    assert abs(p.w**2 - (1 - cmath.exp(-2j * math.pi * x))) <= 1e-13
    assert p.w.real >= 0
    assert p.r**4 == pytest.approx(2 * (1 - math.cos(2 * math.pi * x)), abs=1e-13)
    assert abs(p.w) == pytest.approx(p.r, abs=1e-15)


@given(unit)
def test_root_of_unity_gap(x):
    assert abs(complex(root_of_unity_gap(x)) - (1 - cmath.exp(-2j * math.pi * x))) <= 1e-15


def test_f_closed_examples():
    p = RiccatiParams(1.0, 1.0, 1.0)
    expected = 1.0 * (1 - cmath.exp(-0.6j * math.pi))
    assert abs(f_closed(p, 1.0, 0.3) - expected) <= 1e-14
    for t in (0.0, 0.4, 1.0):
        assert f_closed(p, t, 0.0) == 0
    p0 = RiccatiParams(1.0, 0.0, 1.0)
    value = f_closed(p0, 0.0, 0.5)
    assert value.imag == 0.0
    assert value.real == pytest.approx(math.sqrt(2) * math.tanh(math.sqrt(2)), abs=1e-14)
    assert value.real == pytest.approx(1.2564, abs=5e-5)


def test_f_closed_broadcasts():
    p = RiccatiParams()
    out = f_closed(p, np.linspace(0, 1, 5)[:, None], np.linspace(0, 1, 7)[None, :])
    assert out.shape == (5, 7)
    assert isinstance(f_closed(p, 0.5, 0.5), complex)


def test_f_closed_domain():
    p = RiccatiParams()
    with pytest.raises(DomainError):
        f_closed(p, 1.5, 0.2)
    with pytest.raises(DomainError):
        f_closed(p, 0.5, -0.2)


@settings(max_examples=40, deadline=None)
@given(params_st, st.floats(min_value=0.02, max_value=0.98))
def test_f_closed_conjugate_symmetry(p, x):
    t = 0.3 * p.t_final
    assert abs(f_closed(p, t, 1 - x) - f_closed(p, t, x).conjugate()) <= 1e-12


@pytest.mark.parametrize("x", [0.05, 0.3, 0.5, 0.9])
def test_f_closed_ode_residual(x):
    p = RiccatiParams(1.5, 0.7, 1.0)
    t = 0.4
    kappa = complex(root_of_unity_gap(x)) * p.eps
    errs = []
    for h in (1e-2, 5e-3):
        deriv = (f_closed(p, t + h, x) - f_closed(p, t - h, x)) / (2 * h)
        errs.append(abs(deriv - (f_closed(p, t, x) ** 2 - kappa)))
    assert errs[1] < errs[0] / 3.5


def test_ode_oracle_examples():
    p = RiccatiParams(1.0, 0.0, 1.0)
    assert np.all(f_ode_oracle(RiccatiParams(), 0.0, 100) == 0)
    ode = f_ode_oracle(p, 0.5, 1000)
    t = np.linspace(0.0, 1.0, 1001)
    assert np.max(np.abs(ode - math.sqrt(2) * np.tanh(math.sqrt(2) * (1 - t)))) <= 1e-10


@pytest.mark.parametrize("x", [1e-4, 0.05, 0.5, 0.95, 1 - 1e-4])
def test_ode_oracle_agreement(x):
    p = RiccatiParams(2.0, 1.0, 1.0)
    grid = np.linspace(0, 1, 10001)
    assert np.max(np.abs(f_ode_oracle(p, x, 10000) - f_closed(p, grid, x))) <= 1e-8


def test_ode_oracle_vector_x():
    p = RiccatiParams()
    xs = np.array([0.1, 0.6])
    both = f_ode_oracle(p, xs, 50)
    assert both.shape == (51, 2)
    assert np.allclose(both[:, 1], f_ode_oracle(p, 0.6, 50), atol=1e-15)


def test_generating_function_examples():
    p = RiccatiParams(1.0, 1.0, 1.0)
    assert generating_function(p, 1.0, 0.0) == pytest.approx(1.0)
    assert generating_function(p, 1.0, 0.5) == pytest.approx(0.5)
    sol = solve_triangular(p, 0, 1000)
    s0 = generating_function(p, sol.time_grid, 0.0)
    assert np.max(np.abs(s0 - sol.values[:, 0])) <= 1e-8
    with pytest.raises(DomainError):
        generating_function(p, 0.5, 1.0)


def test_generating_function_matches_f_on_circle():
    # f_t(x) = S_t(exp(-2 pi i x)); checked just inside the unit circle
    p = RiccatiParams(1.0, 1.0, 1.0)
    x = 0.3
    z = 0.999999 * cmath.exp(-2j * math.pi * x)
    assert abs(generating_function(p, 0.2, z) - f_closed(p, 0.2, x)) < 1e-4


def test_eigenvalues_small_cases():
    lam = m_eigenvalues(RiccatiParams(eps=1.0), 2)
    assert sorted(lam, key=lambda z: (z.real, z.imag)) == pytest.approx(
        [-math.sqrt(2), 0, 0, math.sqrt(2)]
    )
    assert lam[0] == 0 and lam[1] == 0


@settings(max_examples=20, deadline=None)
@given(st.floats(min_value=0.1, max_value=4.0), st.integers(min_value=2, max_value=12))
def test_eigenvalue_properties(eps, n):
    p = RiccatiParams(eps=eps)
    lam = m_eigenvalues(p, n)
    assert len(lam) == 2 * n
    assert np.max(np.abs(lam)) <= math.sqrt(2 * eps) * (1 + 1e-15)
    # roots of (lambda^2 - eps)^N - (-eps)^N
    residual = np.abs((lam**2 - eps) ** n - (-eps) ** n)
    assert np.max(residual) <= 1e-9 * max(1.0, eps**n)


def test_eigenvalues_match_numpy():
    p = RiccatiParams(eps=1.3)
    m = build_matrix_system(p, 6).M
    ours = np.sort_complex(np.round(m_eigenvalues(p, 6), 6))
    ref = np.sort_complex(np.round(np.linalg.eigvals(m), 6))
    assert np.allclose(ours, ref, atol=1e-5)
