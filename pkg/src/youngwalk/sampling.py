"""Pausing laws, jump counting, and random diagram generation.

The continuous-time walk pauses for i.i.d. positive times between chain
steps.  Three pausing laws are supported:

* ``Exponential(mean)`` — the walk is a Poisson-subordinated chain; the
  number of jumps before time s is Poisson(s/mean) and is sampled that way
  (exact, no partial-sum simulation);
* ``OneSidedStable(alpha)`` — totally skewed positive stable pauses with
  characteristic function exp(-|xi|^alpha (1 - i tan(pi alpha/2) sgn xi)),
  equivalently Laplace transform exp(-lambda^alpha / cos(pi alpha/2));
  infinite mean, anomalously slow jump counts N_s ~ s^alpha;
* ``DeterministicUnit()`` — unit pauses, N_s = #{j >= 1 : j < s}.

The stable sampler is the Kanter construction: with U uniform on (0,1) and
W standard exponential,

    S = sin(alpha pi U) sin((1-alpha) pi U)^((1-alpha)/alpha)
        / sin(pi U)^(1/alpha) / W^((1-alpha)/alpha)

has Laplace transform exp(-lambda^alpha); the returned variate is
S / cos(pi alpha / 2)^(1/alpha).  For alpha = 1/2 this is exactly the Levy
distribution with unit scale (inverse square of a standard normal over 2),
which the tests use as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .diagrams import YoungDiagram
from .engine import ChainState

__all__ = [
    "Exponential",
    "OneSidedStable",
    "DeterministicUnit",
    "PausingLaw",
    "parse_law",
    "law_tag",
    "is_continuous",
    "characteristic_function",
    "stable_standard",
    "sample_pauses",
    "count_jumps",
    "counts_at_times",
    "count_jumps_batch",
    "f_monte_carlo",
    "plancherel_growth",
    "rectangle_initializer",
    "ctrw_checkpoints",
    "ctrw_evolve",
]


@dataclass(frozen=True)
class Exponential:
    mean: float = 1.0

    def __post_init__(self) -> None:
        if not self.mean > 0:
            raise ValueError("mean must be positive")


@dataclass(frozen=True)
class OneSidedStable:
    alpha: float

    def __post_init__(self) -> None:
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")


@dataclass(frozen=True)
class DeterministicUnit:
    pass


PausingLaw = Union[Exponential, OneSidedStable, DeterministicUnit]


def parse_law(kind: str, mean: float = 1.0, alpha: float | None = None) -> PausingLaw:
    """Build a pausing law from config-style fields."""
    kind = kind.strip().lower()
    if kind in ("exponential", "exp"):
        return Exponential(mean=mean)
    if kind in ("stable", "one_sided_stable", "onesidedstable"):
        if alpha is None:
            raise ValueError("stable pausing law needs alpha")
        return OneSidedStable(alpha=alpha)
    if kind in ("unit", "deterministic", "deterministic_unit"):
        return DeterministicUnit()
    raise ValueError(f"unknown pausing law {kind!r}")


def law_tag(law: PausingLaw) -> str:
    if isinstance(law, Exponential):
        return f"exponential(mean={law.mean:g})"
    if isinstance(law, OneSidedStable):
        return f"stable(alpha={law.alpha:g})"
    return "deterministic_unit"


def is_continuous(law: PausingLaw) -> bool:
    return not isinstance(law, DeterministicUnit)


def characteristic_function(law: PausingLaw, xi: np.ndarray) -> np.ndarray:
    """E[exp(i xi tau)] for the pause length tau."""
    xi = np.asarray(xi, dtype=float)
    if isinstance(law, Exponential):
        return 1.0 / (1.0 - 1j * law.mean * xi)
    if isinstance(law, OneSidedStable):
        a = law.alpha
        return np.exp(
            -np.abs(xi) ** a * (1.0 - 1j * math.tan(math.pi * a / 2) * np.sign(xi))
        )
    if isinstance(law, DeterministicUnit):
        return np.exp(1j * xi)
    raise TypeError(f"not a pausing law: {law!r}")


# ---------------------------------------------------------------------------
# Stable sampling
# ---------------------------------------------------------------------------


def stable_standard(alpha: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Positive stable variates with Laplace transform exp(-lambda^alpha)."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    u = np.clip(rng.random(size), 1e-12, 1 - 1e-12) * math.pi
    w = np.maximum(rng.exponential(1.0, size), 1e-300)
    c = (1.0 - alpha) / alpha
    return (
        np.sin(alpha * u)
        * np.sin((1.0 - alpha) * u) ** c
        / np.sin(u) ** (1.0 / alpha)
        / w**c
    )


def sample_pausing(law: PausingLaw, rng: np.random.Generator) -> float:
    """One pause length drawn from the law."""
    return float(sample_pauses(law, 1, rng)[0])


def sample_pauses(law: PausingLaw, size: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. pause lengths."""
    if isinstance(law, Exponential):
        return rng.exponential(law.mean, size)
    if isinstance(law, OneSidedStable):
        scale = math.cos(math.pi * law.alpha / 2) ** (-1.0 / law.alpha)
        return scale * stable_standard(law.alpha, size, rng)
    if isinstance(law, DeterministicUnit):
        return np.ones(size)
    raise TypeError(f"not a pausing law: {law!r}")


# ---------------------------------------------------------------------------
# Jump counting
# ---------------------------------------------------------------------------


def counts_at_times(
    law: PausingLaw, times: Sequence[float], rng: np.random.Generator
) -> np.ndarray:
    """Jump counts N_t of one walk path at each time (times sorted ascending).

    N_t = #{j >= 1 : S_j < t} with S_j the j-th partial sum of pauses.  For
    the exponential law the counts are assembled from independent Poisson
    increments (exact by the memoryless property); the other laws follow the
    partial sums directly.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(times < 0):
        raise ValueError("times must be nonnegative")
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be sorted ascending")
    if isinstance(law, Exponential):
        increments = rng.poisson(np.diff(np.concatenate(([0.0], times))) / law.mean)
        return np.cumsum(increments)
    if isinstance(law, DeterministicUnit):
        return np.array([max(0, math.ceil(t) - 1) for t in times], dtype=np.int64)
    # stable: walk partial sums in blocks until the largest time is passed
    out = np.zeros(len(times), dtype=np.int64)
    if len(times) == 0:
        return out
    horizon = times[-1]
    total = 0.0
    count = 0
    block = 1024
    done_upto = 0  # indices with counts already fixed
    while done_upto < len(times):
        pauses = sample_pauses(law, block, rng)
        sums = total + np.cumsum(pauses)
        for idx in range(done_upto, len(times)):
            t = times[idx]
            pos = int(np.searchsorted(sums, t, side="left"))
            # sums[pos-1] < t <= sums[pos]; count so far = count + pos
            if pos < len(sums):
                out[idx] = count + pos
            else:
                break
        else:
            idx = len(times)
        done_upto = idx
        total = float(sums[-1])
        count += block
        if total >= horizon and done_upto >= len(times):
            break
        block = min(2 * block, 1 << 20)
    return out


def count_jumps(law: PausingLaw, s: float, rng: np.random.Generator) -> int:
    """Number of jumps strictly before time s on one walk path."""
    return int(counts_at_times(law, [s], rng)[0])


def count_jumps_batch(
    law: PausingLaw, s: float, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Independent copies of N_s (vectorized across paths)."""
    if isinstance(law, Exponential):
        return rng.poisson(s / law.mean, size)
    if isinstance(law, DeterministicUnit):
        return np.full(size, max(0, math.ceil(s) - 1), dtype=np.int64)
    counts = np.zeros(size, dtype=np.int64)
    totals = np.zeros(size)
    active = np.arange(size)
    block = 64
    while active.size:
        pauses = sample_pauses(law, active.size * block, rng).reshape(
            active.size, block
        )
        sums = totals[active, None] + np.cumsum(pauses, axis=1)
        crossed = sums >= s
        first = np.argmax(crossed, axis=1)
        has = crossed[np.arange(active.size), first]
        counts[active] += np.where(has, first, block)
        totals[active] = sums[:, -1]
        active = active[~has]
        block = min(2 * block, 1 << 14)
    return counts


# ---------------------------------------------------------------------------
# Kernel estimates and diagram sources
# ---------------------------------------------------------------------------


def f_monte_carlo(
    k: int,
    n: int,
    s: float,
    law: PausingLaw,
    trials: int = 100_000,
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """Monte-Carlo estimate of f(k, n, s) = E[(1 - k/n)^{N_s}].

    Returns (estimate, standard error).
    """
    if rng is None:
        rng = np.random.default_rng(0)
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    counts = count_jumps_batch(law, s, trials, rng)
    vals = (1.0 - k / n) ** counts
    est = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(trials))
    return est, se


def plancherel_growth(n: int, rng: np.random.Generator) -> YoungDiagram:
    """A Plancherel-distributed n-box diagram grown box by box."""
    st = ChainState(YoungDiagram(()))
    st.grow(n, rng)
    return st.diagram()


def rectangle_initializer(n: int, aspect: float = 1.0) -> YoungDiagram:
    """Near-rectangular diagram with n boxes and height/width about aspect.

    p = round(sqrt(n*aspect)) rows of q = n // p boxes; any remainder is one
    extra row of its own length (sorted into place), which perturbs the
    rescaled profile by O(1/sqrt(n)).
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if aspect <= 0:
        raise ValueError("aspect must be positive")
    p = min(max(1, round(math.sqrt(n * aspect))), n)
    q = n // p
    r = n - p * q
    rows = [q] * p + ([r] if r else [])
    return YoungDiagram(tuple(sorted(rows, reverse=True)))


def ctrw_checkpoints(
    lam0: YoungDiagram,
    law: PausingLaw,
    times: Sequence[float],
    rng: np.random.Generator,
) -> list[YoungDiagram]:
    """State of the continuous-time walk at each requested time.

    One path: pause times and chain moves share the supplied generator.
    The walk state is advanced incrementally between checkpoints.
    """
    counts = counts_at_times(law, times, rng)
    st = ChainState(lam0)
    out = []
    done = 0
    for c in counts:
        st.run_steps(int(c) - done, rng)
        done = int(c)
        out.append(st.diagram())
    return out


def ctrw_evolve(
    lam0: YoungDiagram, law: PausingLaw, s: float, rng: np.random.Generator
) -> YoungDiagram:
    """State of the continuous-time walk at time s (one fresh path)."""
    return ctrw_checkpoints(lam0, law, [s], rng)[-1]
