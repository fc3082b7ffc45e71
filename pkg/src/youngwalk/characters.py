"""Symmetric-group characters and cumulant coordinates on Young diagrams.

Three layers live here:

* exact irreducible character values chi^lambda(rho) via the
  Murnaghan-Nakayama border-strip recursion on beta-sets;
* the central character functionals
      Sigma_rho(lambda) = n(n-1)...(n-|rho|+1) * chi^lambda(rho, 1, 1, ...)
                          / dim(lambda)
  (zero when |lambda| < |rho|), which form the standard polynomial
  coordinates on the set of all diagrams;
* free moment <-> free cumulant conversion, plus the expression of
  Sigma_k in the free cumulants R_j of the transition measure
  (Sigma_1 = R_2, Sigma_2 = R_3, Sigma_3 = R_4 + R_2, ...).  The
  coefficient tables are frozen below and re-derived from scratch by
  an exact linear fit in the test suite.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .diagrams import YoungDiagram, dim_exact, partitions, transition_weights_exact

__all__ = [
    "mn_character",
    "normalized_character",
    "sigma_exact",
    "sigma",
    "falling_factorial",
    "moments_from_cumulants",
    "cumulants_from_moments",
    "transition_moments_exact",
    "transition_cumulants_exact",
    "scaled_transition_cumulants",
    "KEROV_POLYNOMIALS",
    "SIGMA_22_POLYNOMIAL",
    "sigma_from_cumulants",
    "sigma22_from_cumulants",
    "monomials_of_weight",
    "fit_sigma_polynomial",
]


def falling_factorial(n: int, k: int) -> int:
    """n (n-1) ... (n-k+1), exact; 0 when k > n."""
    out = 1
    for i in range(k):
        out *= n - i
    return out


# ---------------------------------------------------------------------------
# Murnaghan-Nakayama recursion on beta-sets
# ---------------------------------------------------------------------------


def _beta_set(rows: tuple[int, ...]) -> tuple[int, ...]:
    l = len(rows)
    return tuple(rows[i] + l - 1 - i for i in range(l))


def _partition_from_beta(beta: Iterable[int]) -> tuple[int, ...]:
    bs = sorted(beta, reverse=True)
    l = len(bs)
    rows = tuple(b - (l - 1 - i) for i, b in enumerate(bs))
    return tuple(r for r in rows if r > 0)


@lru_cache(maxsize=None)
def _mn(rows: tuple[int, ...], rho: tuple[int, ...]) -> int:
    if not rho or rho[0] == 1:
        # remaining cycle type is all fixed points: character value is the
        # number of standard tableaux of the remaining shape
        return dim_exact(YoungDiagram(rows))
    r = rho[0]
    rest = rho[1:]
    beta = set(_beta_set(rows))
    total = 0
    for b in sorted(beta):
        lo = b - r
        if lo < 0 or lo in beta:
            continue
        height = sum(1 for bp in beta if lo < bp < b)
        sign = -1 if height % 2 else 1
        new_rows = _partition_from_beta((beta - {b}) | {lo})
        total += sign * _mn(new_rows, rest)
    return total


def mn_character(lam: YoungDiagram | Sequence[int], rho: Sequence[int]) -> int:
    """Exact character value chi^lam at cycle type rho (|rho| == |lam|)."""
    rows = tuple(lam.rows) if isinstance(lam, YoungDiagram) else tuple(lam)
    rho_t = tuple(sorted((int(p) for p in rho), reverse=True))
    if sum(rows) != sum(rho_t):
        raise ValueError("cycle type and diagram must have the same size")
    if any(p <= 0 for p in rho_t):
        raise ValueError("cycle lengths must be positive")
    return _mn(rows, rho_t)


def normalized_character(lam: YoungDiagram, rho: Sequence[int]) -> Fraction:
    """chi^lam(rho, 1, ..., 1) / dim(lam), exact; rho is padded with fixed points."""
    k = sum(rho)
    n = lam.n
    if k > n:
        raise ValueError("support of rho exceeds the diagram size")
    full = tuple(sorted(rho, reverse=True)) + (1,) * (n - k)
    return Fraction(mn_character(lam, full), dim_exact(lam))


def sigma_exact(rho: Sequence[int], lam: YoungDiagram) -> Fraction:
    """Central character functional Sigma_rho(lam), exact.

    Sigma_rho(lam) = n^(falling |rho|) * normalized character at rho,
    and 0 by convention when the diagram has fewer than |rho| boxes.
    """
    rho_t = tuple(sorted((int(p) for p in rho), reverse=True))
    k = sum(rho_t)
    n = lam.n
    if k > n:
        return Fraction(0)
    return falling_factorial(n, k) * normalized_character(lam, rho_t)


def sigma(rho: Sequence[int], lam: YoungDiagram) -> float:
    return float(sigma_exact(rho, lam))


# ---------------------------------------------------------------------------
# Free moments <-> free cumulants
# ---------------------------------------------------------------------------


def moments_from_cumulants(cumulants: Sequence) -> list:
    """Moments M_0..M_K from free cumulants [R_0(ignored), R_1, ..., R_K].

    Uses the recursion M_n = sum_{s=1..n} R_s * sum over compositions
    (i_1,...,i_s) of n-s of M_{i_1} ... M_{i_s}; exact for Fraction input,
    works unchanged for float or mpmath values.
    """
    K = len(cumulants) - 1
    zero = cumulants[0] * 0
    one = zero + 1
    M = [one]
    # conv[s][t] = sum over s-tuples of moments with total degree t,
    # maintained incrementally as M grows
    for n in range(1, K + 1):
        total = zero
        for s in range(1, n + 1):
            if cumulants[s] == 0:
                continue
            total = total + cumulants[s] * _composition_sum(M, s, n - s, zero)
        M.append(total)
    return M


def _composition_sum(M: list, s: int, t: int, zero):
    """sum over (i_1..i_s >= 0, sum = t) of prod M_{i_j}; all i_j < len(M)."""
    # s-fold convolution of the moment sequence evaluated at t
    cur = [zero] * (t + 1)
    for i in range(min(t, len(M) - 1) + 1):
        cur[i] = M[i]
    out = cur
    for _ in range(s - 1):
        nxt = [zero] * (t + 1)
        for a in range(t + 1):
            if out[a] == 0:
                continue
            for b in range(0, t + 1 - a):
                if b < len(M):
                    nxt[a + b] = nxt[a + b] + out[a] * M[b]
        out = nxt
    return out[t]


def cumulants_from_moments(moments: Sequence) -> list:
    """Free cumulants [0, R_1, ..., R_K] from moments M_0..M_K (M_0 == 1)."""
    if moments[0] != 1:
        raise ValueError("M_0 must be 1")
    K = len(moments) - 1
    zero = moments[0] * 0
    M = list(moments)
    R = [zero]
    for n in range(1, K + 1):
        tail = zero
        for s in range(1, n):
            if R[s] == 0:
                continue
            tail = tail + R[s] * _composition_sum(M[: n], s, n - s, zero)
        R.append(M[n] - tail)
    return R


def transition_moments_exact(lam: YoungDiagram, order: int) -> list[Fraction]:
    """Exact moments M_0..M_order of the transition measure of lam."""
    atoms, weights = transition_weights_exact(lam)
    out = []
    for k in range(order + 1):
        out.append(sum((w * atom**k for atom, w in zip(atoms, weights)), Fraction(0)))
    return out


def transition_cumulants_exact(lam: YoungDiagram, order: int) -> list[Fraction]:
    """Exact free cumulants [0, R_1, ..., R_order] of the transition measure."""
    return cumulants_from_moments(transition_moments_exact(lam, order))


def scaled_transition_cumulants(lam: YoungDiagram, order: int) -> np.ndarray:
    """Float cumulants of the transition measure rescaled by 1/sqrt(n).

    Under this scaling R_1 = 0 and R_2 = 1 for every diagram; R_3, R_4, ...
    measure the shape.  Cumulants scale as R_k -> n^(-k/2) R_k.
    """
    n = lam.n
    exact = transition_cumulants_exact(lam, order)
    return np.array(
        [float(r) / n ** (k / 2.0) for k, r in enumerate(exact)], dtype=float
    )


# ---------------------------------------------------------------------------
# Sigma_k as polynomials in the free cumulants of the transition measure
# ---------------------------------------------------------------------------

# Monomials are weakly decreasing tuples of cumulant indices, () = constant:
# Sigma_3 = R_4 + R_2 is {(4,): 1, (2,): 1}.  Frozen from the exact fit in
# tests/test_characters.py (fit_sigma_polynomial re-derives these tables).
KEROV_POLYNOMIALS: dict[int, dict[tuple[int, ...], int]] = {
    1: {(2,): 1},
    2: {(3,): 1},
    3: {(4,): 1, (2,): 1},
    4: {(5,): 1, (3,): 5},
    5: {(6,): 1, (4,): 15, (2, 2): 5, (2,): 8},
    6: {(7,): 1, (5,): 35, (3, 2): 35, (3,): 84},
}

# Sigma_{(2,2)} (two disjoint 2-cycles) in the same coordinates.
SIGMA_22_POLYNOMIAL: dict[tuple[int, ...], int] = {
    (3, 3): 1,
    (4,): -4,
    (2, 2): -2,
    (2,): -2,
}


def _eval_poly(poly: dict[tuple[int, ...], int], R: Sequence):
    total = 0
    for mono, coeff in poly.items():
        term = coeff
        for idx in mono:
            term = term * R[idx]
        total = total + term
    return total


def sigma_from_cumulants(k: int, R: Sequence):
    """Sigma_k evaluated from cumulants [*, R_1, ..., R_m], m >= k+1."""
    if k not in KEROV_POLYNOMIALS:
        raise ValueError(f"no frozen polynomial for Sigma_{k}")
    return _eval_poly(KEROV_POLYNOMIALS[k], R)


def sigma22_from_cumulants(R: Sequence):
    """Sigma_(2,2) evaluated from cumulants [*, R_1, ..., R_m], m >= 4."""
    return _eval_poly(SIGMA_22_POLYNOMIAL, R)


def monomials_of_weight(w: int) -> list[tuple[int, ...]]:
    """Weakly decreasing tuples of indices >= 2 with the given total, desc-lex."""
    if w == 0:
        return [()]
    out: list[tuple[int, ...]] = []

    def rec(remaining: int, maxpart: int, prefix: list[int]) -> None:
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for part in range(min(maxpart, remaining), 1, -1):
            prefix.append(part)
            rec(remaining - part, part, prefix)
            prefix.pop()

    rec(w, w, [])
    return out


def fit_sigma_polynomial(
    rho: Sequence[int], max_boxes: int = 12
) -> dict[tuple[int, ...], Fraction]:
    """Express Sigma_rho as a polynomial in transition-measure cumulants.

    Builds the exact data matrix over all diagrams with 1..max_boxes boxes,
    using candidate monomials of weight |rho| + len(rho), |rho| + len(rho) - 2,
    ..., and solves the linear system over the rationals.  Raises if the data
    does not pin a unique polynomial or if any diagram fails the fit.
    """
    rho_t = tuple(sorted((int(p) for p in rho), reverse=True))
    top = sum(rho_t) + len(rho_t)
    weights = list(range(top, -1, -2))
    basis: list[tuple[int, ...]] = []
    for w in weights:
        basis.extend(monomials_of_weight(w))

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    max_index = top + 1
    for n in range(1, max_boxes + 1):
        for lam in partitions(n):
            R = transition_cumulants_exact(lam, max_index)
            rows.append([_eval_monomial(m, R) for m in basis])
            rhs.append(sigma_exact(rho_t, lam))

    coeffs = _solve_exact(rows, rhs)
    if coeffs is None:
        raise RuntimeError("data does not determine the polynomial uniquely")
    for row, target in zip(rows, rhs):
        assert sum(c * v for c, v in zip(coeffs, row)) == target
    return {m: c for m, c in zip(basis, coeffs) if c != 0}


def _eval_monomial(mono: tuple[int, ...], R: Sequence[Fraction]) -> Fraction:
    out = Fraction(1)
    for idx in mono:
        out *= R[idx]
    return out


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]):
    """Solve an overdetermined rational system exactly; None if rank-deficient."""
    ncols = len(rows[0])
    aug = [row[:] + [b] for row, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        pv = aug[r][c]
        aug[r] = [v / pv for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [v - f * w for v, w in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == ncols:
            break
    if len(pivots) < ncols:
        return None
    sol = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        sol[c] = aug[i][ncols]
    return sol


def clear_caches() -> None:
    """Drop memoized character values (frees memory after large tables)."""
    _mn.cache_clear()
