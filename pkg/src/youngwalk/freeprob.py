"""Free-probability engine for limit shapes of the rescaled profiles.

Everything here works on two interchangeable encodings of a (compactly
supported) probability measure:

* a moment list ``[M_0, M_1, ..., M_K]`` with ``M_0 = 1``,
* a free-cumulant list ``[0, R_1, ..., R_K]`` (leading placeholder so the
  index equals the order, same convention as :mod:`.characters`).

The centred, variance-1 rescaled profile of an n-box diagram has R_1 = 0 and
R_2 = 1.  Under the continuous-time dynamics started from such a profile the
cumulants evolve autonomously,

    R_2(t) = 1,      R_{k+1}(t) = R_{k+1}(0) * exp(-k t / m),   k >= 2,

which is the same map as "free-compress by c = e^{-t/m}, then free-convolve
with a semicircle compressed by 1-c".  `markov_inverse` turns a moment list
back into a continuous profile omega(x) by the classical chain

    moments -> Jacobi recurrence coefficients -> continued-fraction Stieltjes
    transform G(x + i*eps) -> sigma'(x) = Im log(zG)/pi ->
    omega(x) = |x| + 2 * integral of sigma',

and `theta_energy` evaluates the logarithmic energy functional whose unique
minimizer (value 0) is the Vershik--Kerov / Logan--Shepp curve `vk_ls`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath as mp
import numpy as np

from .characters import cumulants_from_moments, moments_from_cumulants
from .diagrams import ContinuousDiagram

__all__ = [
    "vk_ls",
    "vk_ls_profile",
    "semicircle_cumulants",
    "free_convolve",
    "free_compress",
    "omega_t_cumulants",
    "JacobiCoefficients",
    "jacobi_from_moments",
    "stieltjes_continued_fraction",
    "stieltjes_from_cumulants",
    "markov_inverse",
    "profile_moments",
    "theta_energy",
    "pde_residual",
    "LimitShapeSpec",
]


# ---------------------------------------------------------------------------
# The limit curve
# ---------------------------------------------------------------------------


def vk_ls(x):
    """The Vershik-Kerov/Logan-Shepp curve: (2/pi)(x asin(x/2) + sqrt(4-x^2))
    for |x| <= 2 and |x| outside.  Accepts scalars or arrays."""
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.abs(arr)
    inside = out < 2.0
    xi = arr[inside]
    out[inside] = (2.0 / np.pi) * (xi * np.arcsin(xi / 2.0) + np.sqrt(4.0 - xi * xi))
    return float(out[0]) if scalar else out


def vk_ls_profile(lo: float = -3.0, hi: float = 3.0, npts: int = 6001) -> ContinuousDiagram:
    """`vk_ls` sampled on a uniform grid, as a ContinuousDiagram."""
    xs = np.linspace(lo, hi, npts)
    return ContinuousDiagram(xs, vk_ls(xs))


# ---------------------------------------------------------------------------
# Cumulant arithmetic
# ---------------------------------------------------------------------------


def semicircle_cumulants(K: int) -> list[float]:
    """[0, R_1, ..., R_K] of the standard semicircle: R_2 = 1, all else 0."""
    R = [0.0] * (K + 1)
    if K >= 2:
        R[2] = 1.0
    return R


def free_convolve(Ra: Sequence[float], Rb: Sequence[float]) -> list[float]:
    """Free cumulants add under free convolution."""
    if len(Ra) != len(Rb):
        raise ValueError("cumulant sequences must have the same truncation order")
    out = [float(a) + float(b) for a, b in zip(Ra, Rb)]
    out[0] = 0.0
    return out


def free_compress(R: Sequence[float], c: float) -> list[float]:
    """Free compression by a trace-c projection: R_k -> c^(k-1) R_k, c in (0,1]."""
    if not 0.0 < c <= 1.0:
        raise ValueError("compression parameter must lie in (0, 1]")
    return [0.0] + [c ** (k - 1) * float(R[k]) for k in range(1, len(R))]


def _check_centred_unit(R: Sequence[float]) -> None:
    if len(R) < 3:
        raise ValueError("need cumulants at least through order 2")
    if abs(R[1]) > 1e-9 or abs(R[2] - 1.0) > 1e-9:
        raise ValueError("expected centred cumulants with R_1 = 0 and R_2 = 1")


def omega_t_cumulants(R0: Sequence[float], t: float, m: float = 1.0) -> list[float]:
    """Cumulants of the evolved profile: R_2 stays 1, R_{k+1} decays e^{-kt/m}.

    Equal (to rounding) to free_convolve(free_compress(R0, c),
    free_compress(semicircle, 1-c)) with c = exp(-t/m).
    """
    _check_centred_unit(R0)
    if t < 0:
        raise ValueError("t must be >= 0")
    if m <= 0:
        raise ValueError("m must be > 0")
    out = [0.0, 0.0, 1.0]
    for j in range(3, len(R0)):
        out.append(float(R0[j]) * math.exp(-(j - 1) * t / m))
    return out


# ---------------------------------------------------------------------------
# Moments -> Jacobi recurrence coefficients (Chebyshev algorithm)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JacobiCoefficients:
    """Three-term recurrence data of the orthogonal polynomials of a measure.

    a = (a_0, ..., a_{N-1}) diagonal, b = (b_1, ..., b_{N-1}) off-diagonal.
    ``terminated`` means the recurrence ended exactly (purely atomic measure
    with N atoms); otherwise the coefficients are a truncation.
    """

    a: tuple[float, ...]
    b: tuple[float, ...]
    terminated: bool = False

    def __post_init__(self) -> None:
        if len(self.a) != len(self.b) + 1:
            raise ValueError("need exactly one more diagonal than off-diagonal entry")
        if any(not bi > 0 for bi in self.b):
            raise ValueError("off-diagonal Jacobi coefficients must be positive")


def _to_mpf(v) -> mp.mpf:
    if isinstance(v, Fraction):
        return mp.mpf(v.numerator) / v.denominator
    return mp.mpf(v)


def _chebyshev_recurrence(m: list, depth: int):
    """(a, b2, terminated) from mp moments m_0..m_K.

    Runs for ``depth`` levels or until the moments run out: b2_k needs
    M_{2k} and a_k needs M_{2k+1}, so the last b2 may only be probed for
    termination.  A b2_k below the noise floor stops the recurrence
    (finitely many atoms, or atoms the data cannot distinguish from that);
    one clearly negative means the input was not a moment sequence.

    The floor is not a fixed tolerance: the input moments are typically
    float64 data, so each carries relative rounding ~2^-52, and the
    recurrence's cancellations amplify it.  A first-order error estimate is
    carried through the same three-term recursion as the values themselves,
    which keeps high-order moments of wide measures (magnitudes 1e6 and up)
    from drowning a genuinely vanishing coefficient.
    """
    eps_in = mp.mpf(2) ** -52
    safety = 8  # covers error terms the first-order estimate neglects
    width = len(m)
    K = width - 1
    sig_prev = [mp.mpf(0)] * width  # sigma_{k-1, l}
    sig = list(m)  # sigma_{k, l}, row k = 0
    err_prev = [mp.mpf(0)] * width
    err = [eps_in * abs(v) for v in m]
    a = [m[1] / m[0]]
    b2 = [m[0]]  # b2_0 = m_0, never used as an off-diagonal
    terminated = False
    for k in range(1, depth):
        if 2 * k > K:
            break
        row = [mp.mpf(0)] * width
        err_row = [mp.mpf(0)] * width
        for l in range(k, width - k):
            row[l] = sig[l + 1] - a[k - 1] * sig[l]
            err_row[l] = err[l + 1] + abs(a[k - 1]) * err[l]
            if k >= 2:
                row[l] -= b2[k - 1] * sig_prev[l]
                err_row[l] += b2[k - 1] * err_prev[l]
        beta = row[k] / sig[k - 1]
        noise = safety * err_row[k] / abs(sig[k - 1])
        if beta <= noise:
            if beta < -noise:
                raise ValueError("invalid moment sequence")
            terminated = True
            break
        if 2 * k + 1 > K:
            break  # b2_k checked out but a_k is past the data; stop here
        alpha = row[k + 1] / row[k] - sig[k] / sig[k - 1]
        a.append(alpha)
        b2.append(beta)
        sig_prev, sig = sig, row
        err_prev, err = err, err_row
    return a, b2, terminated


def jacobi_from_moments(M: Sequence, depth: int = 24, dps: int = 60) -> JacobiCoefficients:
    """Jacobi coefficients from a raw moment list [M_0=1, M_1, ..., M_K].

    The recurrence runs to at most (K+1)//2 levels -- the depth the data
    genuinely determines -- and ``depth`` only caps it further.  (Extending
    the data by zero-padding its free cumulants looks harmless but the
    padded sequence need not be positive definite, which poisons every
    coefficient past the genuine ones; each level kept here is exact for
    the measure behind the moments, and the square-root terminator covers
    the rest.)  Raises ValueError("invalid moment sequence") if the input
    moments are not positive semi-definite.
    """
    if not M or abs(float(M[0]) - 1.0) > 1e-12:
        raise ValueError("moment list must start with M_0 = 1")
    K = len(M) - 1
    if K < 1:
        raise ValueError("need at least M_0 and M_1")
    with mp.workdps(dps):
        mm = [mp.mpf(1)] + [_to_mpf(v) for v in M[1:]]
        a, b2, terminated = _chebyshev_recurrence(mm, depth)
        a_f = tuple(float(v) for v in a)
        b_f = tuple(float(mp.sqrt(v)) for v in b2[1:])
    return JacobiCoefficients(a_f, b_f, terminated)


# ---------------------------------------------------------------------------
# Stieltjes transforms
# ---------------------------------------------------------------------------


def stieltjes_continued_fraction(jac: JacobiCoefficients, z):
    """G(z) from Jacobi data via the continued fraction

        G = 1/(z - a_0 - b_1^2/(z - a_1 - b_2^2/(... )))

    For a terminated (atomic) recurrence the fraction is finite; otherwise
    the tail beyond the last level is summed with the square-root terminator
    for constant coefficients, with the branch fixed so the tail -> 0 as
    |z| -> infinity.
    """
    zarr = np.asarray(z, dtype=complex)
    scalar = zarr.ndim == 0
    zz = np.atleast_1d(zarr).ravel()
    a = np.asarray(jac.a, dtype=float)
    b2 = np.square(np.asarray(jac.b, dtype=float))
    if jac.terminated or len(a) == 1:
        r = np.zeros_like(zz)
    else:
        astar = a[-1]
        b2star = b2[-1]
        d = (zz - astar) ** 2 - 4.0 * b2star
        w = np.sqrt(d)
        w = np.where(((zz - astar).conjugate() * w).real < 0, -w, w)
        r = ((zz - astar) - w) / 2.0
    for k in range(len(a) - 1, 0, -1):
        r = b2[k - 1] / (zz - a[k] - r)
    g = 1.0 / (zz - a[0] - r)
    if scalar:
        return complex(g[0])
    return g.reshape(zarr.shape)


def stieltjes_from_cumulants(R: Sequence[float], z, tol: float = 1e-13, maxiter: int = 80):
    """G(z) by solving G = 1/(z - R(G)), R(w) = sum_k R_k w^{k-1}, with Newton.

    Independent of the continued-fraction route (no moments involved); used
    to cross-check it.  Continuation from high up in the half plane keeps
    Newton on the physical branch.
    """
    zarr = np.asarray(z, dtype=complex)
    scalar = zarr.ndim == 0
    zz = np.atleast_1d(zarr).ravel()
    c = np.asarray(R[1:], dtype=float) if len(R) > 1 else np.zeros(1)
    cd = c[1:] * np.arange(1, len(c)) if len(c) > 1 else np.zeros(1)

    g = 1.0 / (zz + 8.0j)
    for lift in (8.0, 4.0, 2.0, 1.0, 0.5, 0.25, 0.0):
        zl = zz + 1j * lift
        for _ in range(maxiter):
            rg = np.polynomial.polynomial.polyval(g, c)
            fp = zl - rg - g * np.polynomial.polynomial.polyval(g, cd)
            step = (g * (zl - rg) - 1.0) / fp
            g = g - step
            if np.max(np.abs(step)) < tol:
                break
    upper = zz.imag > 0
    if np.any(g[upper].imag > 1e-9):
        raise ArithmeticError("Stieltjes solve left the physical branch (Im G > 0)")
    if scalar:
        return complex(g[0])
    return g.reshape(zarr.shape)


# ---------------------------------------------------------------------------
# Markov-transform inversion: moments -> continuous profile
# ---------------------------------------------------------------------------


def markov_inverse(
    M: Sequence,
    grid: tuple[float, float, int] = (-3.0, 3.0, 6001),
    eps: float = 1e-3,
    depth: int = 24,
    dps: int = 60,
) -> ContinuousDiagram:
    """Reconstruct the continuous profile whose transition measure has moments M.

    M = [M_0=1, M_1, ..., M_K].  Pipeline: Jacobi coefficients, Stieltjes
    transform on the line z = x + i*eps, sigma'(x) = Im log(zG(z)) / pi
    (branch tracked by continuity, anchored far left where zG ~ 1),
    omega(x) = |x| + 2 * cumulative integral of sigma', then re-centred so
    omega = |x| at the grid edges and projected onto the 1-Lipschitz cone.

    Raises ValueError("invalid moment sequence") for non-positive-definite
    input and ArithmeticError if the branch tracking loses its anchor
    (grid too narrow for the measure's support, or eps too small).
    """
    if eps <= 0:
        raise ValueError("eps must be > 0")
    lo, hi, npts = grid
    if not (lo < hi and npts >= 2):
        raise ValueError("grid must be (lo, hi, npts) with lo < hi, npts >= 2")
    jac = jacobi_from_moments(M, depth=depth, dps=dps)

    x = np.linspace(float(lo), float(hi), int(npts))
    g = stieltjes_continued_fraction(jac, x + 1j * eps)
    ang = np.unwrap(np.angle(x * g + 1j * eps * g))
    ang -= 2.0 * np.pi * np.round(ang[0] / (2.0 * np.pi))
    if abs(ang[0]) > 0.5 or abs(ang[-1]) > 0.5:
        raise ArithmeticError(
            "branch tracking failed: arg(zG) at the grid edges is "
            f"({ang[0]:.3f}, {ang[-1]:.3f}) instead of (~0, ~0); widen the "
            "grid beyond the support of the measure or increase eps"
        )
    sigma_p = np.clip(ang / np.pi, -1.0, 1.0)

    absx = np.abs(x)
    dx = np.diff(x)
    omega = absx + 2.0 * np.concatenate(
        ([0.0], np.cumsum(0.5 * (sigma_p[1:] + sigma_p[:-1]) * dx))
    )
    # re-centre: linear ramp so both ends sit exactly on |x|
    omega -= (omega[-1] - absx[-1]) * (x - x[0]) / (x[-1] - x[0])
    omega[0] = absx[0]
    omega[-1] = absx[-1]
    # project onto the 1-Lipschitz cone: forward/backward min-envelopes,
    # then lift back above |x| (max of 1-Lipschitz functions is 1-Lipschitz)
    ramp = np.concatenate(([0.0], np.cumsum(dx)))
    omega = np.minimum.accumulate(omega - ramp) + ramp
    rev = omega[::-1]
    ramp_r = np.concatenate(([0.0], np.cumsum(dx[::-1])))
    omega = (np.minimum.accumulate(rev - ramp_r) + ramp_r)[::-1]
    omega = np.maximum(omega, absx)
    return ContinuousDiagram(x, omega)


def profile_moments(omega: ContinuousDiagram, K: int) -> list[float]:
    """Moments [M_0..M_K] of the transition measure of a continuous profile.

    Uses log(zG(z)) = -sum_{j>=1} p_j z^{-(j+1)} with p_j = int x^j sigma'(x) dx,
    evaluated exactly on the piecewise-linear profile, then exponentiates the
    series.  Inverse of `markov_inverse` up to truncation/smoothing error.
    """
    xs = np.asarray(omega.xs, dtype=float)
    ys = np.asarray(omega.ys, dtype=float)
    # split segments at x = 0 where sign(x) jumps
    if xs[0] < 0.0 < xs[-1] and not np.any(xs == 0.0):
        y0 = float(omega(0.0))
        i = int(np.searchsorted(xs, 0.0))
        xs = np.insert(xs, i, 0.0)
        ys = np.insert(ys, i, y0)
    slopes = np.diff(ys) / np.diff(xs)
    mid = 0.5 * (xs[1:] + xs[:-1])
    sp = (slopes - np.sign(mid)) / 2.0  # sigma' per segment
    # p_j = sum over segments of sp * (r^{j+1} - l^{j+1}) / (j+1)
    p = np.empty(K + 1)
    l = xs[:-1]
    r = xs[1:]
    pl = np.ones_like(l)
    pr = np.ones_like(r)
    for j in range(K + 1):
        pl = pl * l
        pr = pr * r
        p[j] = np.sum(sp * (pr - pl)) / (j + 1)
    # h_m = coefficient of z^{-m} in log(zG): h_{j+1} = -p_j (p_0 = 0)
    h = np.zeros(K + 1)
    for j in range(1, K):
        h[j + 1] = -p[j]
    # exponentiate: k M_k = sum_{m=1..k} m h_m M_{k-m}
    Mout = [1.0] + [0.0] * K
    for k in range(1, K + 1):
        acc = 0.0
        for m in range(1, k + 1):
            acc += m * h[m] * Mout[k - m]
        Mout[k] = acc / k
    return Mout


# ---------------------------------------------------------------------------
# Logarithmic energy
# ---------------------------------------------------------------------------


def _phi_log(u: np.ndarray) -> np.ndarray:
    """Double antiderivative of log: Phi'' = log u, Phi(0) = Phi'(0) = 0."""
    out = np.zeros_like(u)
    pos = u > 0
    up = u[pos]
    out[pos] = up * up * (2.0 * np.log(up) - 3.0) / 4.0
    return out


def theta_energy(omega: ContinuousDiagram) -> float:
    """Logarithmic energy Theta(omega) >= 0, zero exactly at the `vk_ls` curve.

    Theta = 1 + (1/2) * double integral over {s < t} of
    (1 + omega'(s)) (1 - omega'(t)) log(t - s).  Outside the stored range
    omega = |x| makes the integrand vanish, and on the piecewise-linear
    interior the integral is evaluated in closed form segment by segment.
    """
    xs = np.asarray(omega.xs, dtype=float)
    ys = np.asarray(omega.ys, dtype=float)
    slopes = np.diff(ys) / np.diff(xs)
    # merge runs of equal slope so staircase profiles cost O(rows), not O(n)
    keep = np.concatenate(([True], np.abs(np.diff(slopes)) > 1e-12))
    starts = np.nonzero(keep)[0]
    u = np.append(xs[starts], xs[-1])  # breakpoints of merged segments
    g = slopes[starts]  # slopes of merged segments
    left = 1.0 + g
    right = 1.0 - g
    lo = u[:-1]
    hi = u[1:]
    # same-segment contribution: (1-g^2) * Phi(h)
    total = float(np.sum(left * right * _phi_log(hi - lo)))
    # cross terms: segment j strictly left of segment i
    for i in range(1, len(g)):
        if right[i] == 0.0:
            continue
        a = lo[:i]
        b = hi[:i]
        bracket = (
            _phi_log(hi[i] - a)
            - _phi_log(hi[i] - b)
            - _phi_log(lo[i] - a)
            + _phi_log(lo[i] - b)
        )
        total += float(right[i] * np.dot(left[:i], bracket))
    return 1.0 + 0.5 * total


# ---------------------------------------------------------------------------
# PDE residual for the evolving Stieltjes transform
# ---------------------------------------------------------------------------


def pde_residual(
    R0: Sequence[float],
    m: float = 1.0,
    t_grid: Sequence[float] | None = None,
    z_grid: Sequence[complex] | None = None,
    step_t: float = 1e-3,
    step_z: float = 1e-3,
) -> float:
    """max |m dG/dt + G dG/dz - (1/G) dG/dz - G| over the (t, z) grid.

    G(t, z) is the Stieltjes transform of the profile with cumulants
    omega_t_cumulants(R0, t, m), obtained by solving the functional equation
    G = 1/(z - R_t(G)) directly.  (The moment/continued-fraction route gives
    the same G whenever the truncated-cumulant moment sequence is positive
    definite, but for strongly non-semicircular starts at small t it is not,
    while the functional equation stays well-posed.)  Derivatives are centred
    differences with the given steps, so the residual of the exact solution
    is O(step^2).
    """
    _check_centred_unit(R0)
    if t_grid is None:
        t_grid = (0.25, 0.5, 1.0)
    if z_grid is None:
        z_grid = [
            complex(xr, yi)
            for yi in (0.5, 1.0, 2.0)
            for xr in np.linspace(-2.5, 2.5, 11)
        ]
    z = np.asarray(z_grid, dtype=complex)
    if np.any(z.imag < 0.25):
        raise ValueError("z_grid should stay well inside the upper half plane")

    def g_at(t: float, zz: np.ndarray) -> np.ndarray:
        return stieltjes_from_cumulants(omega_t_cumulants(R0, t, m), zz)

    worst = 0.0
    for t in t_grid:
        tm = max(float(t) - step_t, 0.0)
        tp = float(t) + step_t
        g0 = g_at(float(t), z)
        gt = (g_at(tp, z) - g_at(tm, z)) / (tp - tm)
        gz = (g_at(float(t), z + step_z) - g_at(float(t), z - step_z)) / (2.0 * step_z)
        resid = m * gt + g0 * gz - gz / g0 - g0
        worst = max(worst, float(np.max(np.abs(resid))))
    return worst


# ---------------------------------------------------------------------------
# Bundle describing an evolving limit shape
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LimitShapeSpec:
    """Initial cumulants plus the numerical knobs for recovering omega_t.

    cumulants = [0, R_1, ..., R_K] with R_1 = 0, R_2 = 1; ``m`` is the mean
    of the pausing law in the diffusive case; ``alpha`` is set instead for
    anomalous (heavy-tailed) scalings and is carried as metadata here.
    """

    cumulants: tuple[float, ...]
    m: float = 1.0
    alpha: float | None = None
    grid: tuple[float, float, int] = (-3.0, 3.0, 6001)
    eps: float = 1e-3

    def __post_init__(self) -> None:
        _check_centred_unit(self.cumulants)
        if self.m <= 0:
            raise ValueError("m must be > 0")
        if self.alpha is not None and not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        object.__setattr__(self, "cumulants", tuple(float(v) for v in self.cumulants))

    def cumulants_at(self, t: float) -> list[float]:
        return omega_t_cumulants(self.cumulants, t, self.m)

    def shape_at(self, t: float) -> ContinuousDiagram:
        M = [float(v) for v in moments_from_cumulants(self.cumulants_at(t))]
        return markov_inverse(M, grid=self.grid, eps=self.eps)

    def theta_at(self, t: float) -> float:
        return theta_energy(self.shape_at(t))
