"""Tests for characters.py.

Oracles:
* chi^lambda(rho) by the Frobenius coefficient formula — expand
  p_rho * vandermonde and read off the coefficient of x^(lambda+delta) by
  brute-force cycle-to-coordinate assignment counting (independent of the
  border-strip recursion);
* moments from cumulants by summation over non-crossing set partitions;
* the Sigma_k coefficient tables by an exact rational re-fit.
"""

import itertools
from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from youngwalk.characters import (
    KEROV_POLYNOMIALS,
    SIGMA_22_POLYNOMIAL,
    cumulants_from_moments,
    falling_factorial,
    fit_sigma_polynomial,
    mn_character,
    moments_from_cumulants,
    monomials_of_weight,
    normalized_character,
    scaled_transition_cumulants,
    sigma22_from_cumulants,
    sigma_exact,
    sigma_from_cumulants,
    transition_cumulants_exact,
)
from youngwalk.diagrams import YoungDiagram, dim_exact, partitions

# ---------------------------------------------------------------------------
# Frobenius-formula character oracle
# ---------------------------------------------------------------------------


def _perm_sign(perm: tuple[int, ...]) -> int:
    inv = sum(
        1
        for i in range(len(perm))
        for j in range(i + 1, len(perm))
        if perm[i] > perm[j]
    )
    return -1 if inv % 2 else 1


@lru_cache(maxsize=None)
def _count_assignments(v: tuple[int, ...], cycles: tuple[int, ...]) -> int:
    """Ways to assign each cycle to one coordinate so coordinate sums are v."""
    if not cycles:
        return 0 if any(v) else 1
    c, rest = cycles[0], cycles[1:]
    total = 0
    for i, vi in enumerate(v):
        if vi >= c:
            total += _count_assignments(v[:i] + (vi - c,) + v[i + 1 :], rest)
    return total


def frobenius_character(lam: YoungDiagram, rho: tuple[int, ...]) -> int:
    """chi^lam(rho) = sum_w sgn(w) * [assignments hitting lam + delta - w.delta]."""
    l = lam.nrows
    rows = lam.rows
    delta = tuple(range(l - 1, -1, -1))
    total = 0
    for w in itertools.permutations(range(l)):
        v = tuple(rows[i] + delta[i] - delta[w[i]] for i in range(l))
        if any(x < 0 for x in v):
            continue
        total += _perm_sign(w) * _count_assignments(v, tuple(sorted(rho, reverse=True)))
    return total


def test_character_against_frobenius_oracle():
    for n in range(1, 7):
        for lam in partitions(n):
            for rho in partitions(n):
                assert mn_character(lam, rho.rows) == frobenius_character(
                    lam, rho.rows
                ), (lam, rho)


def test_character_seven_box_spot_checks():
    for lam, rho in [
        ((4, 2, 1), (3, 2, 1, 1)),
        ((3, 3, 1), (7,)),
        ((5, 1, 1), (2, 2, 2, 1)),
        ((2, 2, 2, 1), (4, 3)),
    ]:
        assert mn_character(YoungDiagram(lam), rho) == frobenius_character(
            YoungDiagram(lam), rho
        )


def test_character_known_values():
    assert mn_character(YoungDiagram((2, 1)), (1, 1, 1)) == 2
    assert mn_character(YoungDiagram((2, 1)), (2, 1)) == 0
    assert mn_character(YoungDiagram((2, 1)), (3,)) == -1
    for n in range(1, 9):
        for rho in partitions(n):
            # trivial and sign characters
            assert mn_character(YoungDiagram((n,)), rho.rows) == 1
            assert mn_character(YoungDiagram((1,) * n), rho.rows) == (-1) ** (
                n - rho.nrows
            )
    # hooks at the full cycle
    for n in range(2, 9):
        for a in range(1, n + 1):
            hook = YoungDiagram((a,) + (1,) * (n - a))
            assert mn_character(hook, (n,)) == (-1) ** (n - a)


def test_character_orthogonality_n6():
    import math

    n = 6
    lams = list(partitions(n))
    rhos = list(partitions(n))
    table = {
        (lam.rows, rho.rows): mn_character(lam, rho.rows)
        for lam in lams
        for rho in rhos
    }

    def z(rho):
        out = 1
        for part in set(rho.rows):
            m = rho.rows.count(part)
            out *= part**m * math.factorial(m)
        return out

    # column orthogonality: sum_lam chi(rho) chi(sigma) = z_rho delta
    for r1 in rhos:
        for r2 in rhos:
            s = sum(table[(l.rows, r1.rows)] * table[(l.rows, r2.rows)] for l in lams)
            assert s == (z(r1) if r1 == r2 else 0)
    # dimension consistency
    for lam in lams:
        assert table[(lam.rows, (1,) * n)] == dim_exact(lam)


# ---------------------------------------------------------------------------
# Sigma functionals
# ---------------------------------------------------------------------------


def test_sigma_basics():
    lam = YoungDiagram((3, 1))
    assert sigma_exact((1,), lam) == 4
    assert sigma_exact((5,), lam) == 0  # support larger than the diagram
    assert sigma_exact((2,), YoungDiagram((2,))) == 2
    assert sigma_exact((2,), YoungDiagram((1, 1))) == -2
    assert falling_factorial(6, 3) == 120
    assert falling_factorial(2, 5) == 0


def test_sigma_agrees_with_plancherel_orthogonality():
    # E_Plancherel[Sigma_rho] = 0 for any rho with a part >= 2
    import math

    for n in (5, 6):
        nf = math.factorial(n)
        for rho in [(2,), (3,), (2, 2), (4,)]:
            if sum(rho) > n:
                continue
            mean = sum(
                Fraction(dim_exact(lam) ** 2, nf) * sigma_exact(rho, lam)
                for lam in partitions(n)
            )
            assert mean == 0


# ---------------------------------------------------------------------------
# Moment <-> cumulant conversion
# ---------------------------------------------------------------------------


def _set_partitions(items: tuple[int, ...]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [first]] + part[i + 1 :]
        yield [[first]] + part


def _is_noncrossing(part: list[list[int]]) -> bool:
    # crossing: a < b < c < d with {a, c} in one block, {b, d} in another
    for b1, b2 in itertools.combinations(part, 2):
        for a, c in itertools.combinations(sorted(b1), 2):
            if any(a < b < c for b in b2) and any(d < a or d > c for d in b2):
                return False
    return True


def moments_by_noncrossing(R: list[Fraction], order: int) -> list[Fraction]:
    """M_n = sum over non-crossing partitions of products of R_{|block|}."""
    out = [Fraction(1)]
    for n in range(1, order + 1):
        total = Fraction(0)
        for part in _set_partitions(tuple(range(n))):
            if _is_noncrossing(part):
                prod = Fraction(1)
                for block in part:
                    prod *= R[len(block)]
                total += prod
        out.append(total)
    return out


def test_moments_from_cumulants_against_noncrossing_oracle():
    R = [Fraction(0), Fraction(1, 2), Fraction(2), Fraction(-1, 3), Fraction(1),
         Fraction(3, 7), Fraction(-2), Fraction(1, 5)]
    assert moments_from_cumulants(R) == moments_by_noncrossing(R, 7)


def test_semicircle_moments_are_catalan():
    R = [0.0, 0.0, 1.0] + [0.0] * 8
    M = moments_from_cumulants(R)
    assert M == pytest.approx([1, 0, 1, 0, 2, 0, 5, 0, 14, 0, 42])


@given(
    st.lists(
        st.fractions(min_value=-3, max_value=3, max_denominator=6),
        min_size=2,
        max_size=7,
    )
)
@settings(max_examples=40, deadline=None)
def test_cumulant_moment_roundtrip(tail):
    R = [Fraction(0)] + tail
    M = moments_from_cumulants(R)
    assert M[0] == 1
    assert cumulants_from_moments(M) == R


def test_cumulants_from_moments_rejects_bad_m0():
    with pytest.raises(ValueError):
        cumulants_from_moments([Fraction(2), Fraction(0)])


# ---------------------------------------------------------------------------
# Sigma_k in cumulant coordinates
# ---------------------------------------------------------------------------


def test_monomials_of_weight():
    assert monomials_of_weight(0) == [()]
    assert monomials_of_weight(6) == [(6,), (4, 2), (3, 3), (2, 2, 2)]


def test_frozen_tables_reproduce_sigma_exactly():
    # Sigma_k(lam) == polynomial(R(lam)) exactly, for every diagram up to 10
    # boxes; same for the double 2-cycle functional
    for n in range(1, 11):
        for lam in partitions(n):
            R = transition_cumulants_exact(lam, 8)
            for k in range(1, 7):
                assert sigma_from_cumulants(k, R) == sigma_exact((k,), lam), (lam, k)
            assert sigma22_from_cumulants(R) == sigma_exact((2, 2), lam), lam


def test_refit_recovers_frozen_tables_small():
    # the exact fit over diagrams up to 9 boxes re-derives the low tables
    got3 = fit_sigma_polynomial((3,), max_boxes=9)
    assert got3 == {(4,): 1, (2,): 1}
    got4 = fit_sigma_polynomial((4,), max_boxes=9)
    assert got4 == {(5,): 1, (3,): 5}
    got22 = fit_sigma_polynomial((2, 2), max_boxes=9)
    assert got22 == {k: Fraction(v) for k, v in SIGMA_22_POLYNOMIAL.items()}


def test_scaled_cumulants_normalization():
    for rows in [(4, 2), (5, 5, 3, 1), (3, 3, 3)]:
        R = scaled_transition_cumulants(YoungDiagram(rows), 4)
        assert R[1] == pytest.approx(0.0, abs=1e-14)
        assert R[2] == pytest.approx(1.0, rel=1e-13)


def test_sigma_2_equals_r3_numerically():
    # Sigma_2 = R_3 on the nose (unscaled cumulants)
    for rows in [(2,), (4, 2), (3, 2, 1), (6, 4, 1)]:
        lam = YoungDiagram(rows)
        R = transition_cumulants_exact(lam, 4)
        assert R[3] == sigma_exact((2,), lam)
