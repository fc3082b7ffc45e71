"""The restriction-induction Markov chain on n-box Young diagrams.

One step from lambda: remove a uniform box of a uniform standard tableau
(down move, probability dim(nu)/dim(lambda) to each nu = lambda minus a
corner), then add a box the same way conditioned on returning to n boxes
(up move, probability dim(mu)/((n) dim(nu)) * ... = dim(mu)/(n dim(nu)) to
each mu = nu plus a corner).  The composite kernel

    P(lambda, mu) = (dim(mu) / (n dim(lambda))) * #{nu below both}

is reversible with respect to the Plancherel measure dim(lambda)^2 / n!,
and the normalized characters lambda -> chi^lambda(sigma)/dim(lambda) are
its eigenvectors with eigenvalue (#fixed points of sigma) / n.

Transition probabilities are computed through hook-length ratios touching
only the changed row and column, in log space; exact rational variants are
provided for the small-n matrix tests.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .characters import normalized_character
from .diagrams import YoungDiagram, dim_exact, partitions

__all__ = [
    "down_distribution",
    "up_distribution",
    "res_ind_step",
    "step_distribution",
    "step_distribution_exact",
    "full_matrix",
    "full_matrix_exact",
    "plancherel_vector",
    "plancherel_vector_exact",
    "eigenvalue_for_cycle_type",
    "eigen_identity_residual",
    "sample_from_row",
]

_SUM_TOL_RENORM = 1e-9
_SUM_TOL_ERROR = 1e-6


def _column_heights(rows: tuple[int, ...]) -> list[int]:
    if not rows:
        return []
    return [sum(1 for r in rows if r > j) for j in range(rows[0])]


def _hook(rows: tuple[int, ...], cols: list[int], i: int, j: int) -> int:
    return rows[i] - j + cols[j] - i - 1


def _log_down_prob(lam: YoungDiagram, corner_row: int) -> float:
    """log P(remove the corner box ending row corner_row)."""
    rows = lam.rows
    cols = _column_heights(rows)
    i = corner_row
    c = rows[i] - 1  # column of the removed box
    logp = -math.log(lam.n)
    for j in range(c):  # same row, to the left
        h = _hook(rows, cols, i, j)
        logp += math.log(h) - math.log(h - 1)
    for i2 in range(i):  # same column, above
        h = _hook(rows, cols, i2, c)
        logp += math.log(h) - math.log(h - 1)
    return logp


def _log_up_prob(nu: YoungDiagram, corner_row: int) -> float:
    """log P(add a box at the end of row corner_row | growing nu by one box)."""
    rows = nu.rows
    cols = _column_heights(rows)
    i = corner_row
    c = rows[i] if i < len(rows) else 0  # column of the new box
    logp = 0.0
    for j in range(c):  # same row, to the left of the new box
        h = _hook(rows, cols, i, j)
        logp += math.log(h) - math.log(h + 1)
    for i2 in range(i):  # same column, above the new box
        h = _hook(rows, cols, i2, c)
        logp += math.log(h) - math.log(h + 1)
    return logp


def _normalize(probs: np.ndarray) -> np.ndarray:
    s = probs.sum()
    if abs(s - 1.0) > _SUM_TOL_ERROR:
        raise ArithmeticError(f"transition row sums to {s}")
    if abs(s - 1.0) > _SUM_TOL_RENORM:
        probs = probs / s
    return probs


def down_distribution(lam: YoungDiagram) -> tuple[list[YoungDiagram], np.ndarray]:
    """Diagrams one box below lam with their restriction probabilities.

    Targets are ordered by the row of the removed corner, top to bottom.
    """
    if lam.n == 0:
        raise ValueError("cannot restrict the empty diagram")
    targets, probs = [], []
    for i, _ in lam.removable_corners():
        targets.append(lam.remove_box(i))
        probs.append(math.exp(_log_down_prob(lam, i)))
    return targets, _normalize(np.array(probs))


def up_distribution(nu: YoungDiagram) -> tuple[list[YoungDiagram], np.ndarray]:
    """Diagrams one box above nu with their induction probabilities.

    Targets are ordered by the row of the added corner, top to bottom; the
    probabilities are the transition-measure weights of nu.
    """
    targets, probs = [], []
    for i, _ in nu.addable_corners():
        targets.append(nu.add_box(i))
        probs.append(math.exp(_log_up_prob(nu, i)))
    return targets, _normalize(np.array(probs))


def sample_from_row(
    targets: Sequence[YoungDiagram], probs: np.ndarray, u: float
) -> YoungDiagram:
    """Inverse-CDF pick from one transition row using a uniform in [0,1)."""
    acc = 0.0
    for t, p in zip(targets, probs):
        acc += p
        if u < acc:
            return t
    return targets[-1]


def res_ind_step(lam: YoungDiagram, rng: np.random.Generator) -> YoungDiagram:
    """One restriction-induction step from lam (n unchanged)."""
    nus, dprobs = down_distribution(lam)
    nu = sample_from_row(nus, dprobs, rng.random())
    mus, uprobs = up_distribution(nu)
    return sample_from_row(mus, uprobs, rng.random())


def _down_exact(lam: YoungDiagram) -> list[tuple[YoungDiagram, Fraction]]:
    d = dim_exact(lam)
    out = []
    for i, _ in lam.removable_corners():
        nu = lam.remove_box(i)
        out.append((nu, Fraction(dim_exact(nu), d)))
    return out


def _up_exact(nu: YoungDiagram) -> list[tuple[YoungDiagram, Fraction]]:
    d = dim_exact(nu) * (nu.n + 1)
    out = []
    for i, _ in nu.addable_corners():
        mu = nu.add_box(i)
        out.append((mu, Fraction(dim_exact(mu), d)))
    return out


def step_distribution_exact(lam: YoungDiagram) -> dict[YoungDiagram, Fraction]:
    """Exact one-step law from lam as a dict (down then up composed)."""
    out: dict[YoungDiagram, Fraction] = {}
    for nu, p1 in _down_exact(lam):
        for mu, p2 in _up_exact(nu):
            out[mu] = out.get(mu, Fraction(0)) + p1 * p2
    assert sum(out.values()) == 1
    return out


def step_distribution(lam: YoungDiagram) -> dict[YoungDiagram, float]:
    """One-step law from lam using the log-hook transition rows."""
    out: dict[YoungDiagram, float] = {}
    nus, dprobs = down_distribution(lam)
    for nu, p1 in zip(nus, dprobs):
        mus, uprobs = up_distribution(nu)
        for mu, p2 in zip(mus, uprobs):
            out[mu] = out.get(mu, 0.0) + p1 * p2
    return out


def full_matrix(n: int) -> tuple[list[YoungDiagram], np.ndarray]:
    """All of Y_n in descending lexicographic order with the step matrix."""
    states = list(partitions(n))
    index = {lam.rows: k for k, lam in enumerate(states)}
    P = np.zeros((len(states), len(states)))
    for k, lam in enumerate(states):
        for mu, p in step_distribution(lam).items():
            P[k, index[mu.rows]] = p
    return states, P


def full_matrix_exact(n: int) -> tuple[list[YoungDiagram], list[list[Fraction]]]:
    states = list(partitions(n))
    index = {lam.rows: k for k, lam in enumerate(states)}
    P = [[Fraction(0)] * len(states) for _ in states]
    for k, lam in enumerate(states):
        for mu, p in step_distribution_exact(lam).items():
            P[k][index[mu.rows]] = p
    return states, P


def plancherel_vector_exact(n: int) -> list[Fraction]:
    nf = math.factorial(n)
    return [Fraction(dim_exact(lam) ** 2, nf) for lam in partitions(n)]


def plancherel_vector(n: int) -> np.ndarray:
    return np.array([float(x) for x in plancherel_vector_exact(n)])


def eigenvalue_for_cycle_type(rho: Sequence[int], n: int) -> Fraction:
    """Eigenvalue of the step kernel on the character eigenvector for rho.

    For sigma = (rho, 1, ..., 1) padded to n the eigenvalue is
    (#fixed points of sigma)/n = 1 - (|rho| - m_1(rho))/n.
    """
    k = sum(rho)
    if k > n:
        raise ValueError("rho does not fit in n boxes")
    moved = k - sum(1 for p in rho if p == 1)
    return Fraction(n - moved, n)


def eigen_identity_residual(rho: Sequence[int], n: int) -> float:
    """max_lambda |(P v)(lambda) - theta v(lambda)| for the character eigenvector.

    v(lambda) = chi^lambda(rho, 1...1)/dim(lambda), theta from
    :func:`eigenvalue_for_cycle_type`; the kernel rows are the floating-point
    log-hook ones, so the residual measures their numerical quality.
    """
    states, P = full_matrix(n)
    v = np.array([float(normalized_character(lam, rho)) for lam in states])
    theta = float(eigenvalue_for_cycle_type(rho, n))
    return float(np.max(np.abs(P @ v - theta * v)))
