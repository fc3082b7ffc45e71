"""Tests for kernel evaluations: closed forms, quadratures, cross-checks."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import erfcx

from youngwalk.kernels import (
    KernelQuery,
    f_deterministic_unit,
    f_exponential,
    f_fourier_inversion,
    f_stable_quadrature,
    f_value,
    factorization_defect_main_term,
    g_alpha,
    g_alpha_asymptote,
    kernel_table,
    prop_limits,
)
from youngwalk.sampling import (
    DeterministicUnit,
    Exponential,
    OneSidedStable,
    f_monte_carlo,
)


def g_half_closed_form(u: float) -> float:
    # e^(u/2) erfc(sqrt(u/2)), the alpha = 1/2 limit kernel in closed form
    return float(erfcx(math.sqrt(u / 2)))


def test_query_validation():
    with pytest.raises(ValueError):
        KernelQuery(5, 4, 1.0, Exponential(1.0))
    with pytest.raises(ValueError):
        KernelQuery(2, 4, -1.0, Exponential(1.0))
    with pytest.raises(TypeError):
        f_exponential(KernelQuery(2, 4, 1.0, DeterministicUnit()))
    with pytest.raises(TypeError):
        f_stable_quadrature(KernelQuery(2, 4, 1.0, Exponential(1.0)))
    with pytest.raises(ValueError):
        f_fourier_inversion(KernelQuery(2, 4, 1.0, DeterministicUnit()))


def test_f_exponential_closed_form():
    q = KernelQuery(2, 100, 100.0, Exponential(1.0))
    assert f_exponential(q) == pytest.approx(math.exp(-2.0), rel=1e-14)
    assert f_exponential(KernelQuery(2, 100, 0.0, Exponential(1.0))) == 1.0
    est, se = f_monte_carlo(3, 100, 50.0, Exponential(1.0), trials=60_000,
                            rng=np.random.default_rng(5))
    assert abs(est - math.exp(-3 * 0.5)) < 4 * se + 1e-12


def test_f_deterministic_unit_convention():
    law = DeterministicUnit()
    z = 1 - 2 / 10
    assert f_deterministic_unit(KernelQuery(2, 10, 3.0, law)) == pytest.approx(z**3)
    assert f_deterministic_unit(KernelQuery(2, 10, 3.5, law)) == pytest.approx(z**3)
    assert f_deterministic_unit(KernelQuery(2, 10, 0.0, law)) == 1.0


def test_g_alpha_basics():
    assert g_alpha(0.0, 0.5) == 1.0
    assert g_alpha(0.0, 0.8) == 1.0
    for u in (0.1, 1.0, 4.0, 16.0, 1000.0):
        assert g_alpha(u, 0.5) == pytest.approx(g_half_closed_form(u), abs=1e-9)
    # strictly decreasing in u
    vals = [g_alpha(u, 0.7) for u in (0.0, 0.3, 1.0, 3.0, 10.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert all(0 < v <= 1 for v in vals)


def test_g_alpha_asymptote():
    for alpha in (0.5, 0.8):
        ratio = g_alpha(1000.0, alpha) / g_alpha_asymptote(1000.0, alpha)
        assert 0.98 <= ratio <= 1.02, (alpha, ratio)


def test_g_alpha_matches_cauchy_gaussian_form():
    # for alpha = 1/2: g(t k^2) = (2k/pi) Int exp(-t y^2/2) / (y^2 + k^2) dy
    for k, t in ((1, 1.0), (2, 0.25), (3, 0.5)):
        val, _ = quad(
            lambda y: math.exp(-t * y * y / 2) / (y * y + k * k), 0, np.inf, limit=300
        )
        assert g_alpha(t * k * k, 0.5) == pytest.approx(2 * k / math.pi * val, abs=1e-9)


def test_f_stable_at_zero_time():
    for n in (50, 100):
        q = KernelQuery(2, n, 0.0, OneSidedStable(0.5))
        assert f_stable_quadrature(q) == pytest.approx(1.0, abs=1e-6)


def test_f_stable_vs_monte_carlo():
    rng = np.random.default_rng(61)
    n = 100
    law = OneSidedStable(0.5)
    for t in (0.25, 1.0):
        s = t * n * n
        quad_val = f_stable_quadrature(KernelQuery(2, n, s, law))
        est, se = f_monte_carlo(2, n, s, law, trials=40_000, rng=rng)
        assert abs(quad_val - est) < 4 * se, (t, quad_val, est, se)


def test_f_stable_vs_fourier_inversion_grid():
    n = 100
    for alpha in (0.5, 0.8):
        law = OneSidedStable(alpha)
        for k in (2, 3, 5):
            for s in (100.0, 2500.0, 10_000.0):
                q = KernelQuery(k, n, s, law)
                a = f_stable_quadrature(q)
                b = f_fourier_inversion(q)
                assert abs(a - b) < 1e-4, (alpha, k, s, a, b)


def test_f_fourier_exponential_oracle():
    law = Exponential(1.0)
    q = KernelQuery(2, 50, 25.0, law)
    assert f_fourier_inversion(q) == pytest.approx(math.exp(-1.0), abs=1e-5)
    assert f_fourier_inversion(KernelQuery(2, 50, 0.0, law)) == pytest.approx(
        1.0, abs=1e-4
    )
    # another point against the closed form
    q2 = KernelQuery(5, 80, 32.0, Exponential(2.0))
    assert f_fourier_inversion(q2) == pytest.approx(f_exponential(q2), abs=1e-6)


def test_f_monotone_in_s_and_range():
    law = OneSidedStable(0.5)
    vals = [
        f_stable_quadrature(KernelQuery(2, 100, s, law))
        for s in (0.0, 100.0, 1_000.0, 10_000.0, 100_000.0)
    ]
    assert all(a >= b - 1e-9 for a, b in zip(vals, vals[1:]))
    for v in vals:
        assert -1e-9 <= v <= 1 + 1e-9
    for alpha in (0.3, 0.8):
        v = f_stable_quadrature(KernelQuery(3, 40, 7.0, OneSidedStable(alpha)))
        assert -1e-9 <= v <= 1 + 1e-9


def test_f_converges_to_g_half():
    # |f(2, n, t n^2) - g(4t)| decreasing along n at t = 1
    law = OneSidedStable(0.5)
    target = g_alpha(4.0, 0.5)
    errs = [
        abs(f_stable_quadrature(KernelQuery(2, n, float(n) ** 2, law)) - target)
        for n in (100, 1_000, 10_000)
    ]
    assert errs[0] > errs[1] > errs[2], errs


def test_first_period_truncation_is_strict_lower_bound():
    # truncating the alpha=1/2 integral to its first period undershoots:
    # every later full-period cell is positive
    k, n, s = 2, 50, 0.01
    qq, z = k / n, 1 - k / n

    def integrand(x):
        den = qq * qq + 4 * z * math.sin(x / math.sqrt(2)) ** 2
        return math.exp(-s * x * x) * math.sin(math.sqrt(2) * x) / (x * den)

    period = math.sqrt(2) * math.pi
    cell0, _ = quad(integrand, 0, period, limit=200)
    pref = 2 * k / (math.pi * n)
    full = f_stable_quadrature(KernelQuery(k, n, s, OneSidedStable(0.5)))
    assert pref * cell0 < full <= 1 + 1e-12
    # and a handful of later cells are individually positive
    for j in range(1, 6):
        cell, _ = quad(integrand, j * period, (j + 1) * period, limit=200)
        assert cell > 0


def test_prop_limits():
    assert prop_limits(2, 1.0, regime="sub") == 1.0
    assert prop_limits(2, 1.0, regime="super") == 0.0
    assert prop_limits(2, 1.0, alpha=0.5, regime="critical") == pytest.approx(
        g_alpha(4.0, 0.5), rel=1e-12
    )
    assert prop_limits(3, 0.5, regime="diffusive", m=2.0) == pytest.approx(
        math.exp(-0.75)
    )
    with pytest.raises(ValueError):
        prop_limits(2, 1.0, regime="weird")


def test_factorization_defect():
    assert abs(factorization_defect_main_term(2, 1, 1e-12, 0.5)) < 1e-6
    # ratio g(u2)/g(u1)^2 exceeds 1 and grows with the repetition count
    ratios = []
    for mrep in (2, 8, 32):
        u2 = (2 * 2 * mrep) ** 2
        u1 = (2 * mrep) ** 2
        ratios.append(g_alpha(u2, 0.5) / g_alpha(u1, 0.5) ** 2)
    assert ratios[0] > 1 and ratios[1] > ratios[0] and ratios[2] > ratios[1]
    # defect itself is positive here (covariance obstruction)
    assert factorization_defect_main_term(2, 2, 1.0, 0.5) > 0


def test_f_value_dispatch_and_table():
    assert f_value(KernelQuery(2, 10, 2.0, Exponential(1.0))) == pytest.approx(
        math.exp(-0.4)
    )
    assert f_value(KernelQuery(2, 10, 2.0, DeterministicUnit())) == pytest.approx(
        0.8**2
    )
    rows = kernel_table(
        [KernelQuery(2, 100, 25.0, Exponential(1.0))],
        ["exponential", "fourier_inversion"],
    )
    assert len(rows) == 2
    assert abs(rows[0]["value"] - rows[1]["value"]) < 1e-5
    assert {"k", "n", "s", "method", "value", "error_estimate"} <= set(rows[0])
