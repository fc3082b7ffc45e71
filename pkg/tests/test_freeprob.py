"""Free-probability engine: limit curve, cumulant flow, Markov inversion,
logarithmic energy, and the evolving-transform PDE."""

import math

import numpy as np
import pytest

from youngwalk import freeprob as fp
from youngwalk.characters import (
    cumulants_from_moments,
    moments_from_cumulants,
    scaled_transition_cumulants,
    transition_moments_exact,
)
from youngwalk.diagrams import (
    ContinuousDiagram,
    YoungDiagram,
    profile,
    sup_distance,
    transition_measure,
)
from youngwalk.sampling import rectangle_initializer


def _exact_flow_stieltjes(mu0, t, z, mean=1.0):
    """Exact Stieltjes transform of an atomic measure evolved for time ``t``.

    The evolved measure is the free convolution of ``mu0`` compressed by
    ``c = exp(-t/mean)`` with a semicircle of variance ``1 - c``, so its
    transform ``g`` satisfies ``G0(z - 1/g + 1/(c*g) - (1-c)*g) = c*g``
    where ``G0`` is the exact rational transform of ``mu0``.  Solved by
    Newton continuation from high in the upper half plane.
    """
    c = math.exp(-t / mean)
    a = np.asarray(mu0.atoms, dtype=float)
    w = np.asarray(mu0.weights, dtype=float)
    zz = np.atleast_1d(np.asarray(z, dtype=complex))

    def g0(y):
        return np.sum(w[None, :] / (y[:, None] - a[None, :]), axis=1)

    def g0p(y):
        return -np.sum(w[None, :] / (y[:, None] - a[None, :]) ** 2, axis=1)

    g = 1.0 / (zz + 8.0j)
    for lift in (8.0, 4.0, 2.0, 1.0, 0.5, 0.25, 0.1, 0.0):
        zl = zz + 1j * lift
        for _ in range(200):
            y = zl - 1.0 / g + 1.0 / (c * g) - (1 - c) * g
            f_val = g0(y) - c * g
            f_der = g0p(y) * (1.0 / g**2 - 1.0 / (c * g**2) - (1 - c)) - c
            step = f_val / f_der
            g = g - step
            if np.max(np.abs(step)) < 1e-14:
                break
    assert np.all(g.imag < 1e-12)  # physical branch
    return g


def test_vk_ls_fixtures():
    assert abs(fp.vk_ls(0.0) - 4.0 / np.pi) < 1e-15
    assert fp.vk_ls(2.0) == 2.0
    assert fp.vk_ls(-2.0) == 2.0
    assert fp.vk_ls(5.0) == 5.0
    assert fp.vk_ls(-3.7) == 3.7
    assert abs(fp.vk_ls(1.0) - (2.0 / np.pi) * (np.pi / 6 + np.sqrt(3.0))) < 1e-15
    xs = np.linspace(-2.5, 2.5, 101)
    vals = fp.vk_ls(xs)
    assert np.allclose(vals, vals[::-1])  # even function
    slopes = np.diff(vals) / np.diff(xs)
    assert np.all(np.abs(slopes) <= 1.0 + 1e-9)
    assert np.all(vals >= np.abs(xs))


def test_free_convolve_and_compress():
    semi = fp.semicircle_cumulants(6)
    two = fp.free_convolve(semi, semi)
    assert two[2] == 2.0 and all(two[k] == 0.0 for k in (1, 3, 4, 5, 6))
    # delta_0 has all cumulants zero
    assert fp.free_convolve(semi, [0.0] * 7) == semi
    with pytest.raises(ValueError):
        fp.free_convolve(semi, fp.semicircle_cumulants(5))

    assert fp.free_compress(semi, 1.0) == semi
    half = fp.free_compress(semi, 0.5)
    assert abs(half[2] - 0.5) < 1e-15
    R = [0.0, 0.0, 1.0, -0.5, 2.0]
    c = 0.3
    comp = fp.free_compress(R, c)
    assert np.allclose(comp, [0.0, 0.0, c, -0.5 * c**2, 2.0 * c**3])
    for bad in (0.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            fp.free_compress(R, bad)
    # compress to c plus an independent semicircle compressed to 1-c keeps R_2 = 1
    mix = fp.free_convolve(
        fp.free_compress(R, 0.4), fp.free_compress(fp.semicircle_cumulants(4), 0.6)
    )
    assert abs(mix[2] - 1.0) < 1e-15


def test_bernoulli_free_convolution_is_arcsine():
    # (delta_-1 + delta_1)/2 freely convolved with itself gives the arcsine
    # law on [-2, 2]: even moments are the central binomials 2, 6, 20
    bern = [1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0]
    R = cumulants_from_moments(bern)
    M = moments_from_cumulants(fp.free_convolve(R, R))
    assert np.allclose(M, [1.0, 0.0, 2.0, 0.0, 6.0, 0.0, 20.0], atol=1e-12)


def test_omega_t_cumulant_flow():
    R0 = [0.0, 0.0, 1.0, 0.7, -0.3, 0.25]
    assert np.allclose(fp.omega_t_cumulants(R0, 0.0), R0, atol=1e-15)
    out = fp.omega_t_cumulants(R0, 0.9, m=2.0)
    assert out[1] == 0.0 and out[2] == 1.0
    for j in (3, 4, 5):
        assert abs(out[j] - R0[j] * math.exp(-(j - 1) * 0.9 / 2.0)) < 1e-15
    # long times forget everything but the semicircle
    late = fp.omega_t_cumulants(R0, 60.0)
    assert np.allclose(late, fp.semicircle_cumulants(5), atol=1e-20)
    with pytest.raises(ValueError):
        fp.omega_t_cumulants([0.0, 0.5, 1.0, 0.1], 1.0)  # R_1 != 0
    with pytest.raises(ValueError):
        fp.omega_t_cumulants([0.0, 0.0, 2.0, 0.1], 1.0)  # R_2 != 1
    with pytest.raises(ValueError):
        fp.omega_t_cumulants(R0, -0.1)
    with pytest.raises(ValueError):
        fp.omega_t_cumulants(R0, 1.0, m=0.0)


def test_omega_t_equals_compress_convolve_composition():
    # the flow is free compression by c = e^{-t/m} plus an independent
    # semicircle compressed by 1-c
    rng = np.random.default_rng(20240817)
    for _ in range(20):
        K = int(rng.integers(3, 11))
        R0 = [0.0, 0.0, 1.0] + [float(v) for v in rng.uniform(-1, 1, K - 2)]
        for t in (0.1, 1.0, 5.0):
            c = math.exp(-t)
            comp = fp.free_convolve(
                fp.free_compress(R0, c),
                fp.free_compress(fp.semicircle_cumulants(K), 1.0 - c),
            )
            flow = fp.omega_t_cumulants(R0, t)
            assert max(abs(a - b) for a, b in zip(flow, comp)) < 1e-12
    # and composing two flow steps is one longer step
    R0 = [0.0, 0.0, 1.0, 0.4, -0.6, 0.2, 0.35]
    one = fp.omega_t_cumulants(fp.omega_t_cumulants(R0, 0.7), 0.5)
    two = fp.omega_t_cumulants(R0, 1.2)
    assert max(abs(a - b) for a, b in zip(one, two)) < 1e-12


def test_jacobi_from_moments():
    # semicircle: a_k = 0, b_k = 1 for every level
    M = [float(v) for v in moments_from_cumulants(fp.semicircle_cumulants(16))]
    jac = fp.jacobi_from_moments(M)
    assert not jac.terminated
    assert np.max(np.abs(jac.a)) < 1e-12
    assert np.max(np.abs(np.asarray(jac.b) - 1.0)) < 1e-12
    # two atoms at +-1: terminates after two levels
    jac2 = fp.jacobi_from_moments([1.0, 0.0, 1.0, 0.0, 1.0])
    assert jac2.terminated
    assert len(jac2.a) == 2 and abs(jac2.b[0] - 1.0) < 1e-12
    # M_4 < M_2^2 violates Cauchy-Schwarz
    with pytest.raises(ValueError, match="invalid moment sequence"):
        fp.jacobi_from_moments([1.0, 0.0, 1.0, 0.0, 0.5])
    with pytest.raises(ValueError):
        fp.jacobi_from_moments([2.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        fp.JacobiCoefficients((0.0, 0.0), (0.0,))
    with pytest.raises(ValueError):
        fp.JacobiCoefficients((0.0, 0.0), (1.0, 1.0))


def test_stieltjes_transform_routes_agree():
    z = np.array([0.3 + 0.5j, -1.2 + 1.0j, 2.5 + 0.7j, 0.0 + 2.0j, -2.8 + 0.5j])
    # closed form for the semicircle (branch with Im G < 0 up top)
    w = np.sqrt(z * z - 4.0 + 0j)
    closed = (z - np.where(((z.conjugate()) * w).real < 0, -w, w)) / 2.0
    semi = fp.semicircle_cumulants(12)
    jac = fp.jacobi_from_moments([float(v) for v in moments_from_cumulants(semi)])
    g_cf = fp.stieltjes_continued_fraction(jac, z)
    g_nw = fp.stieltjes_from_cumulants(semi, z)
    assert np.max(np.abs(g_cf - closed)) < 1e-12
    assert np.max(np.abs(g_nw - closed)) < 1e-12
    # a genuinely non-semicircular measure: both routes converge to the
    # exact transform of the evolved measure as the cumulant order grows
    # (the CF route through its genuine-depth Jacobi levels, the Newton
    # route through the truncated R-transform)
    lam = rectangle_initializer(10000, 2.0)
    mu0 = transition_measure(lam).rescale(1.0 / np.sqrt(10000.0))
    g_exact = _exact_flow_stieltjes(mu0, 1.0, z)
    bounds = {12: (1e-5, 1e-4), 22: (1e-8, 1e-6)}
    for K, (cf_tol, nw_tol) in bounds.items():
        R = fp.omega_t_cumulants(
            [float(v) for v in scaled_transition_cumulants(lam, K)], 1.0
        )
        jac = fp.jacobi_from_moments(
            [float(v) for v in moments_from_cumulants(R)]
        )
        g_cf = fp.stieltjes_continued_fraction(jac, z)
        g_nw = fp.stieltjes_from_cumulants(R, z)
        assert np.max(np.abs(g_cf - g_exact)) < cf_tol
        assert np.max(np.abs(g_nw - g_exact)) < nw_tol
    # scalar input comes back as a scalar
    assert isinstance(fp.stieltjes_continued_fraction(jac, 1.0 + 1.0j), complex)


def test_markov_inverse_semicircle_gives_limit_curve():
    M = [float(v) for v in moments_from_cumulants(fp.semicircle_cumulants(16))]
    om = fp.markov_inverse(M)
    assert np.max(np.abs(om.ys - fp.vk_ls(om.xs))) <= 1e-2
    assert abs(om.area() - 2.0) <= 2e-2


def test_markov_inverse_atomic_fixtures():
    # delta_0: profile is |x| itself
    om = fp.markov_inverse([1.0] + [0.0] * 8)
    assert np.max(np.abs(om.ys - np.abs(om.xs))) < 1e-12
    # two atoms at +-1 with equal weight: the single-box tent profile
    omt = fp.markov_inverse([1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0])
    tent = np.where(np.abs(omt.xs) <= 1.0, 2.0 - np.abs(omt.xs), np.abs(omt.xs))
    assert np.max(np.abs(omt.ys - tent)) <= 2e-2
    # sharper imaginary offset sharpens the corners
    omt = fp.markov_inverse([1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0], eps=1e-4)
    tent = np.where(np.abs(omt.xs) <= 1.0, 2.0 - np.abs(omt.xs), np.abs(omt.xs))
    assert np.max(np.abs(omt.ys - tent)) <= 5e-3


def test_markov_inverse_round_trip():
    # cumulants -> moments -> profile -> transition moments of the profile
    fixtures = [fp.semicircle_cumulants(12)]
    lam = rectangle_initializer(10000, 2.0)
    R0 = [float(v) for v in scaled_transition_cumulants(lam, 12)]
    fixtures.append(R0)  # two-atom limit (t = 0)
    fixtures.append(fp.omega_t_cumulants(R0, 1.0))
    for R in fixtures:
        Mref = [float(v) for v in moments_from_cumulants(R)]
        om = fp.markov_inverse(Mref)
        assert abs(om.area() - 2.0) <= 2e-2
        back = fp.profile_moments(om, 6)
        assert max(abs(a - b) for a, b in zip(back[2:7], Mref[2:7])) <= 2e-2


def test_markov_inverse_errors():
    with pytest.raises(ValueError, match="invalid moment sequence"):
        fp.markov_inverse([1.0, 0.0, 1.0, 0.0, 0.5])
    M = [float(v) for v in moments_from_cumulants(fp.semicircle_cumulants(12))]
    with pytest.raises(ArithmeticError, match="branch"):
        fp.markov_inverse(M, grid=(-1.5, 1.5, 3001))  # semicircle sticks out
    with pytest.raises(ValueError):
        fp.markov_inverse(M, eps=0.0)
    with pytest.raises(ValueError):
        fp.markov_inverse(M, grid=(2.0, -2.0, 100))


def test_monotone_convergence_to_limit_curve():
    # rectangle start: distance to the limit curve decreases along the flow
    lam = rectangle_initializer(10000, 2.0)
    R0 = tuple(float(v) for v in scaled_transition_cumulants(lam, 12))
    spec = fp.LimitShapeSpec(R0, eps=1e-4)
    Om = fp.vk_ls_profile()
    dists = [sup_distance(spec.shape_at(t), Om) for t in (0.0, 0.5, 1.0, 2.0, 4.0)]
    assert all(a > b for a, b in zip(dists, dists[1:])), dists
    assert dists[-1] < 5e-3


def test_profile_moments_exact_on_staircase():
    # piecewise-linear profile of a finite diagram: transition-measure
    # moments come out exactly (same data as the atomic computation)
    for rows in [(4, 2), (3, 2, 1), (1,), (5, 5, 2)]:
        lam = YoungDiagram(rows)
        om = profile(lam)
        got = fp.profile_moments(om, 6)
        expect = [float(v) for v in transition_moments_exact(lam, 6)]
        assert max(abs(a - b) for a, b in zip(got, expect)) < 1e-10


def test_theta_energy_values():
    # |x| itself: the double integral vanishes identically
    assert fp.theta_energy(ContinuousDiagram([-2, 0, 2], [2, 0, 2])) == 1.0
    # one-box tent: evaluates in closed form to 4 log 2 - 2
    tent = ContinuousDiagram([-3, -1, 0, 1, 3], [3, 1, 2, 1, 3])
    assert abs(fp.theta_energy(tent) - (4.0 * math.log(2.0) - 2.0)) < 1e-12
    # independent quadrature oracle for the tent: the only contribution is
    # 4 * int_{-1<s<0, 0<t<1} log(t-s)
    from scipy.integrate import dblquad

    val, err = dblquad(lambda t, s: math.log(t - s), -1.0, 0.0, 0.0, 1.0)
    assert abs((1.0 + 2.0 * val) - fp.theta_energy(tent)) < 1e-8
    # the limit curve is the minimizer with energy 0
    assert abs(fp.theta_energy(fp.vk_ls_profile())) <= 1e-3
    # anything else is strictly positive
    assert fp.theta_energy(tent) > 0.1


def test_pde_residual_semicircle_stationary():
    resid = fp.pde_residual(fp.semicircle_cumulants(8))
    assert resid <= 1e-6


def test_pde_residual_rectangle_flow():
    lam = rectangle_initializer(10000, 2.0)
    R0 = [float(v) for v in scaled_transition_cumulants(lam, 12)]
    r1 = fp.pde_residual(R0, step_t=1e-3, step_z=1e-3)
    r2 = fp.pde_residual(R0, step_t=5e-4, step_z=5e-4)
    assert r2 <= 1e-4
    assert 3.0 < r1 / r2 < 5.0  # centred differences: residual ~ O(h^2)
    with pytest.raises(ValueError):
        fp.pde_residual(R0, z_grid=[0.5 + 0.1j])


def test_limit_shape_spec():
    lam = rectangle_initializer(10000, 2.0)
    R0 = tuple(float(v) for v in scaled_transition_cumulants(lam, 8))
    spec = fp.LimitShapeSpec(R0, m=1.5)
    out = spec.cumulants_at(3.0)
    assert abs(out[3] - R0[3] * math.exp(-2 * 3.0 / 1.5)) < 1e-15
    sh = spec.shape_at(0.5)
    assert abs(sh.area() - 2.0) < 2e-2
    with pytest.raises(ValueError):
        fp.LimitShapeSpec((0.0, 0.0, 2.0))  # R_2 != 1
    with pytest.raises(ValueError):
        fp.LimitShapeSpec(R0, m=-1.0)
    with pytest.raises(ValueError):
        fp.LimitShapeSpec(R0, alpha=1.5)
