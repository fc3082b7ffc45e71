"""Young diagrams, their profiles, and corner measures.

A Young diagram with n boxes is stored as a weakly decreasing tuple of
positive row lengths.  Throughout we use the "Russian" picture: the diagram
is rotated 45 degrees and scaled by sqrt(2) so that its boundary becomes a
1-Lipschitz function omega(x) that coincides with |x| outside a compact
interval.  In these coordinates the box (i, j) (row i, column j, both
1-based) sits at content j - i, and the boundary is a zigzag whose local
minima ("valleys", at the contents of addable corners) and local maxima
("peaks", at the contents of removable corners) interlace:

    x_1 < y_1 < x_2 < ... < y_{r-1} < x_r,   sum(x) == sum(y).

Two measures on the real line are attached to a diagram:

* the transition measure: atoms at the valleys, weight at valley x_i equal
  to the probability that Plancherel growth adds the next box there;
* the co-transition measure: atoms at the peaks, weight at peak y_j equal
  to dim(lambda minus that corner) / dim(lambda) scaled by n.

Both follow from partial fractions of the rational function
prod(z - y_j) / prod(z - x_i).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "YoungDiagram",
    "AtomicMeasure",
    "ContinuousDiagram",
    "partitions",
    "partition_count",
    "dim_exact",
    "log_dimension",
    "hook_lengths",
    "interlacing",
    "diagram_from_interlacing",
    "transition_weights_exact",
    "transition_measure",
    "cotransition_weights_exact",
    "cotransition_measure",
    "profile",
    "rescaled_profile",
    "sup_distance",
    "read_partitions",
    "write_partitions",
    "profile_table",
    "write_profile_csv",
]


@dataclass(frozen=True)
class YoungDiagram:
    """An integer partition drawn as a Young diagram.

    ``rows`` is a weakly decreasing tuple of positive ints.  The empty
    diagram is ``YoungDiagram(())``.
    """

    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        rows = tuple(int(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        for r in rows:
            if r <= 0:
                raise ValueError(f"row lengths must be positive, got {rows}")
        if any(rows[i] < rows[i + 1] for i in range(len(rows) - 1)):
            raise ValueError(f"rows must be weakly decreasing, got {rows}")

    @property
    def n(self) -> int:
        """Number of boxes."""
        return sum(self.rows)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def conjugate(self) -> "YoungDiagram":
        """Transpose along the main diagonal."""
        if not self.rows:
            return self
        cols = [sum(1 for r in self.rows if r > j) for j in range(self.rows[0])]
        return YoungDiagram(tuple(cols))

    def row(self, i: int) -> int:
        """Row length with zero padding for i beyond the last row (0-based)."""
        return self.rows[i] if 0 <= i < len(self.rows) else 0

    def contains(self, other: "YoungDiagram") -> bool:
        return all(other.row(i) <= self.row(i) for i in range(other.nrows))

    def removable_corners(self) -> list[tuple[int, int]]:
        """(row, col) of boxes whose removal leaves a Young diagram, 0-based."""
        out = []
        for i, r in enumerate(self.rows):
            if i + 1 == len(self.rows) or self.rows[i + 1] < r:
                out.append((i, r - 1))
        return out

    def addable_corners(self) -> list[tuple[int, int]]:
        """(row, col) of boxes whose addition gives a Young diagram, 0-based."""
        out = [(0, self.rows[0])] if self.rows else [(0, 0)]
        for i in range(1, len(self.rows)):
            if self.rows[i] < self.rows[i - 1]:
                out.append((i, self.rows[i]))
        if self.rows:
            out.append((len(self.rows), 0))
        return out

    def remove_box(self, i: int) -> "YoungDiagram":
        """Remove the box at the end of row i (must be a removable corner)."""
        rows = list(self.rows)
        rows[i] -= 1
        if rows[i] == 0:
            rows.pop(i)
        return YoungDiagram(tuple(rows))

    def add_box(self, i: int) -> "YoungDiagram":
        """Add a box at the end of row i (i may equal nrows to open a row)."""
        rows = list(self.rows)
        if i == len(rows):
            rows.append(1)
        else:
            rows[i] += 1
        return YoungDiagram(tuple(rows))

    def to_text(self) -> str:
        return ",".join(str(r) for r in self.rows) if self.rows else "-"

    @classmethod
    def from_text(cls, text: str) -> "YoungDiagram":
        text = text.strip()
        if text in ("", "-"):
            return cls(())
        return cls(tuple(int(p) for p in text.split(",")))

    def __str__(self) -> str:  # pragma: no cover
        return self.to_text()


def partitions(n: int) -> Iterator[YoungDiagram]:
    """All partitions of n in descending lexicographic order.

    This is the canonical ordering used for transition matrices:
    partitions(3) yields (3), (2,1), (1,1,1).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        yield YoungDiagram(())
        return

    def rec(remaining: int, maxpart: int, prefix: list[int]) -> Iterator[tuple[int, ...]]:
        if remaining == 0:
            yield tuple(prefix)
            return
        for part in range(min(maxpart, remaining), 0, -1):
            prefix.append(part)
            yield from rec(remaining - part, part, prefix)
            prefix.pop()

    for rows in rec(n, n, []):
        yield YoungDiagram(rows)


@lru_cache(maxsize=None)
def partition_count(n: int) -> int:
    """p(n) via Euler's pentagonal number recurrence."""
    if n < 0:
        return 0
    if n == 0:
        return 1
    total = 0
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 > n and g2 > n:
            break
        sign = -1 if k % 2 == 0 else 1
        if g1 <= n:
            total += sign * partition_count(n - g1)
        if g2 <= n:
            total += sign * partition_count(n - g2)
        k += 1
    return total


def hook_lengths(lam: YoungDiagram) -> list[list[int]]:
    """Hook length of every box: h(i,j) = lam_i - j + lam'_j - i + 1 (0-based i, j)."""
    rows = lam.rows
    conj = lam.conjugate().rows
    return [
        [rows[i] - j + conj[j] - i - 1 for j in range(rows[i])]
        for i in range(len(rows))
    ]


def dim_exact(lam: YoungDiagram) -> int:
    """Number of standard Young tableaux of shape lam (exact integer)."""
    n = lam.n
    if n == 0:
        return 1
    num = math.factorial(n)
    den = 1
    for row in hook_lengths(lam):
        for h in row:
            den *= h
    q, r = divmod(num, den)
    assert r == 0
    return q


def log_dimension(lam: YoungDiagram) -> float:
    """log dim(lam), computed from hook lengths in floating point."""
    n = lam.n
    if n == 0:
        return 0.0
    total = math.lgamma(n + 1)
    for row in hook_lengths(lam):
        for h in row:
            total -= math.log(h)
    return total


# ---------------------------------------------------------------------------
# Interlacing coordinates of the zigzag boundary
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interlacing:
    """Valley/peak contents of a diagram boundary.

    valleys x_1 < ... < x_r are the contents of addable corners, peaks
    y_1 < ... < y_{r-1} the contents of removable corners, and they satisfy
    x_1 < y_1 < x_2 < ... < y_{r-1} < x_r with sum(x) == sum(y).
    """

    valleys: tuple[int, ...]
    peaks: tuple[int, ...]

    def __post_init__(self) -> None:
        x, y = self.valleys, self.peaks
        if len(x) != len(y) + 1:
            raise ValueError("need exactly one more valley than peaks")
        merged = [v for pair in zip(x, y) for v in pair] + [x[-1]]
        if any(merged[i] >= merged[i + 1] for i in range(len(merged) - 1)):
            raise ValueError(f"coordinates do not interlace: x={x} y={y}")
        if sum(x) != sum(y):
            raise ValueError("valley and peak sums must agree")


def interlacing(lam: YoungDiagram) -> Interlacing:
    """Interlacing coordinates (valley/peak contents) of lam."""
    valleys = tuple(sorted(j - i for i, j in lam.addable_corners()))
    peaks = tuple(sorted(j - i for i, j in lam.removable_corners()))
    return Interlacing(valleys, peaks)


def diagram_from_interlacing(coords: Interlacing) -> YoungDiagram:
    """Inverse of :func:`interlacing`."""
    x, y = coords.valleys, coords.peaks
    # Between peak y_j and the valley x_{j+1} above it the boundary has a
    # descending run of x_{j+1} - y_j unit segments, one per row; every row
    # in that run has length x_{j+1} + (#rows in runs above it).
    rows: list[int] = []
    above = 0
    for j in range(len(y) - 1, -1, -1):
        block = x[j + 1] - y[j]
        rows.extend([x[j + 1] + above] * block)
        above += block
    rows_desc = tuple(sorted(rows, reverse=True))
    lam = YoungDiagram(rows_desc)
    if -x[0] != lam.nrows:
        raise ValueError("inconsistent interlacing coordinates")
    return lam


# ---------------------------------------------------------------------------
# Transition / co-transition measures
# ---------------------------------------------------------------------------


def transition_weights_exact(lam: YoungDiagram) -> tuple[tuple[int, ...], list[Fraction]]:
    """Atoms (valley contents) and exact weights of the transition measure.

    Weight at valley x_i is the partial-fraction residue
    prod_j (x_i - y_j) / prod_{k != i} (x_i - x_k); the weights are positive
    and sum to 1, and growing the diagram by one box at valley x_i with this
    probability is exactly the conditioned dimension ratio
    dim(lam + box) / ((n+1) dim(lam)).
    """
    c = interlacing(lam)
    x, y = c.valleys, c.peaks
    weights = []
    for i, xi in enumerate(x):
        num = Fraction(1)
        for yj in y:
            num *= xi - yj
        den = Fraction(1)
        for k, xk in enumerate(x):
            if k != i:
                den *= xi - xk
        weights.append(num / den)
    assert sum(weights) == 1
    return x, weights


def transition_measure(lam: YoungDiagram) -> "AtomicMeasure":
    atoms, weights = transition_weights_exact(lam)
    return AtomicMeasure(
        np.array(atoms, dtype=float), np.array([float(w) for w in weights])
    )


def cotransition_weights_exact(lam: YoungDiagram) -> tuple[tuple[int, ...], list[Fraction]]:
    """Atoms (peak contents) and exact weights of the co-transition measure.

    Weight at peak y_j is dim(lam minus the corner at y_j) / dim(lam), the
    probability that removing a uniform box of a uniform standard tableau
    leaves that sub-diagram.  It equals the partial-fraction residue
    -prod_i (y_j - x_i) / prod_{k != j} (y_j - y_k) divided by n, and the
    weights sum to 1.
    """
    c = interlacing(lam)
    x, y = c.valleys, c.peaks
    n = lam.n
    if n == 0:
        raise ValueError("empty diagram has no co-transition measure")
    weights = []
    for j, yj in enumerate(y):
        num = Fraction(-1)
        for xi in x:
            num *= yj - xi
        den = Fraction(1)
        for k, yk in enumerate(y):
            if k != j:
                den *= yj - yk
        weights.append(num / den / n)
    assert sum(weights) == 1
    return y, weights


def cotransition_measure(lam: YoungDiagram) -> "AtomicMeasure":
    atoms, weights = cotransition_weights_exact(lam)
    return AtomicMeasure(
        np.array(atoms, dtype=float), np.array([float(w) for w in weights])
    )


@dataclass(frozen=True)
class AtomicMeasure:
    """A purely atomic probability measure on the line.

    Atoms are strictly increasing; weights are positive and sum to 1
    (renormalized when the deviation is below 1e-9, rejected beyond that).
    """

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        atoms = np.asarray(self.atoms, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if atoms.ndim != 1 or atoms.shape != weights.shape:
            raise ValueError("atoms and weights must be 1-d arrays of equal length")
        if np.any(np.diff(atoms) <= 0):
            raise ValueError("atoms must be strictly increasing")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        s = weights.sum()
        if abs(s - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {s}, not 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights / s)

    def moments(self, order: int) -> np.ndarray:
        """Moments M_0..M_order as an array of length order+1."""
        return np.array(
            [np.sum(self.weights * self.atoms**k) for k in range(order + 1)]
        )

    def rescale(self, c: float) -> "AtomicMeasure":
        """Pushforward under x -> c*x (same weights)."""
        return AtomicMeasure(self.atoms * c, self.weights.copy())

    def mean(self) -> float:
        return float(np.sum(self.weights * self.atoms))

    def variance(self) -> float:
        m = self.mean()
        return float(np.sum(self.weights * (self.atoms - m) ** 2))


# ---------------------------------------------------------------------------
# Profiles (1-Lipschitz boundary functions)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContinuousDiagram:
    """A 1-Lipschitz function omega with omega(x) = |x| for large |x|.

    Stored as a piecewise-linear interpolant through (xs, ys); outside the
    stored range the function is |x| by definition.  ``xs`` is strictly
    increasing.
    """

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self) -> None:
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise ValueError("need matching 1-d arrays with at least 2 points")
        dx = np.diff(xs)
        if np.any(dx <= 0):
            raise ValueError("xs must be strictly increasing")
        slopes = np.diff(ys) / dx
        if np.any(np.abs(slopes) > 1 + 1e-8):
            raise ValueError("profile is not 1-Lipschitz")
        # boundary consistency: at the stored endpoints the profile should
        # have already merged with |x| (tolerance keeps room for numerics)
        if abs(ys[0] - abs(xs[0])) > 1e-6 or abs(ys[-1] - abs(xs[-1])) > 1e-6:
            raise ValueError("profile must equal |x| at the ends of its range")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        inside = np.interp(x, self.xs, self.ys)
        return np.where((x < self.xs[0]) | (x > self.xs[-1]), np.abs(x), inside)

    def area(self) -> float:
        """integral of (omega(x) - |x|) dx; equals 2 for a rescaled n-box diagram."""
        # insert x=0 so the kink of |x| falls on the integration mesh
        xs = np.union1d(self.xs, [0.0])
        return float(np.trapezoid(self(xs) - np.abs(xs), xs))

    def support(self) -> tuple[float, float]:
        """Smallest interval outside which omega(x) == |x| (up to 1e-12)."""
        dev = np.nonzero(self.ys - np.abs(self.xs) > 1e-12)[0]
        if dev.size == 0:
            return (0.0, 0.0)
        lo = self.xs[max(dev[0] - 1, 0)]
        hi = self.xs[min(dev[-1] + 1, self.xs.size - 1)]
        return (float(lo), float(hi))


def profile(lam: YoungDiagram) -> ContinuousDiagram:
    """The zigzag boundary of lam in rotated coordinates (unscaled)."""
    c = interlacing(lam)
    breaks = sorted(set(c.valleys) | set(c.peaks))
    lo = c.valleys[0] - 1 if breaks else -1
    hi = c.valleys[-1] + 1 if breaks else 1
    xs = [lo] + breaks + [hi]
    # heights: start on |x| at the far left and integrate the +-1 slopes;
    # between consecutive corner contents the slope alternates
    ys = [abs(lo)]
    for a, b in zip(xs, xs[1:]):
        mid = 0.5 * (a + b)
        slope = _zigzag_slope(c, mid)
        ys.append(ys[-1] + slope * (b - a))
    return ContinuousDiagram(np.array(xs, dtype=float), np.array(ys))


def _zigzag_slope(c: Interlacing, x: float) -> int:
    """Slope of the zigzag at a non-corner abscissa x."""
    # slope is -1 before the first valley, +1 after the last, and flips at
    # each valley (to +1) and peak (to -1) as x increases
    k = sum(1 for v in c.valleys if v < x) + sum(1 for p in c.peaks if p < x)
    return -1 if k % 2 == 0 else 1


def rescaled_profile(lam: YoungDiagram, scale_boxes: int | None = None) -> ContinuousDiagram:
    """Profile shrunk by 1/sqrt(n) in both axes so the excess area is 2.

    ``scale_boxes`` overrides the number of boxes used for the scale factor
    (useful when comparing diagrams of slightly different sizes on one grid).
    """
    n = lam.n if scale_boxes is None else scale_boxes
    if n <= 0:
        raise ValueError("need a positive box count to rescale")
    p = profile(lam)
    s = 1.0 / math.sqrt(n)
    return ContinuousDiagram(p.xs * s, p.ys * s)


def sup_distance(a: ContinuousDiagram, b: ContinuousDiagram) -> float:
    """sup_x |a(x) - b(x)|, exact for piecewise-linear profiles.

    Both functions are piecewise linear with breakpoints in the merged grid
    (plus the |x| kink at 0), so the sup is attained at a merged breakpoint.
    """
    xs = np.union1d(np.union1d(a.xs, b.xs), [0.0])
    return float(np.max(np.abs(a(xs) - b(xs))))


# ---------------------------------------------------------------------------
# Text / CSV formats
# ---------------------------------------------------------------------------


def write_partitions(diagrams: Sequence[YoungDiagram]) -> str:
    """One diagram per line as comma-separated row lengths ('-' for empty)."""
    return "\n".join(d.to_text() for d in diagrams) + "\n"


def read_partitions(text: str) -> list[YoungDiagram]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        out.append(YoungDiagram.from_text(line))
    return out


def profile_table(omega: ContinuousDiagram) -> list[tuple[float, float, float]]:
    """(x, omega(x), sigma'(x)) rows at the stored breakpoints.

    sigma'(x) = (omega'(x) - sign(x)) / 2 is reported as the right-hand
    derivative at each breakpoint (0 on the last row).
    """
    xs, ys = omega.xs, omega.ys
    slopes = np.append(np.diff(ys) / np.diff(xs), 0.0)
    sgn = np.sign(xs)
    rows = [
        (float(x), float(y), float((sl - sg) / 2.0))
        for x, y, sl, sg in zip(xs, ys, slopes, sgn)
    ]
    return rows


def write_profile_csv(omega: ContinuousDiagram) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "omega", "sigma_prime"])
    for row in profile_table(omega):
        w.writerow([repr(v) for v in row])
    return buf.getvalue()
