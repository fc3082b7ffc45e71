"""Ensemble experiments over the restriction-induction walk.

Three layers live here:

* ``run_ensemble`` -- Monte-Carlo trajectories of the continuous-time walk
  over a grid of diagram sizes, reduced to per-(n, t) statistics of the
  rescaled transition measure (moments, free cumulants, mixed moment
  products, mean profile).  Every trajectory is seeded independently from
  ``(master_seed, n, index)``, so results are bitwise reproducible and
  independent of the worker count.
* ``propagation_check`` -- exact verification, at small n, that the cycle
  observables decay through the walk by the scalar kernel f(k, n, s):
  the time-s distribution is built from the full transition matrix and the
  jump-count law, with no sampling.
* ``theorem11_reproduction`` / ``theorem12_reproduction`` -- desk-scale
  tables comparing ensemble means against the predicted limit behaviour
  under the diffusive clock (s = t*n, exponential pauses) and the anomalous
  clock (s = t*theta_n, heavy-tailed pauses).

Moment/cumulant indexing follows the rest of the package: a sequence of
length K+1 whose entry j is the order-j quantity (entry 0 is M_0 = 1 for
moments and a 0 placeholder for cumulants).
"""

from __future__ import annotations

import hashlib
import math
import multiprocessing
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .characters import (
    cumulants_from_moments,
    moments_from_cumulants,
    scaled_transition_cumulants,
    sigma22_from_cumulants,
    sigma_exact,
    sigma_from_cumulants,
)
from .diagrams import YoungDiagram, read_partitions, rescaled_profile
from .engine import ChainState
from .freeprob import markov_inverse, omega_t_cumulants, semicircle_cumulants
from .kernels import KernelQuery, f_value, factorization_defect_main_term, g_alpha
from .resind import full_matrix
from .sampling import (
    DeterministicUnit,
    Exponential,
    OneSidedStable,
    PausingLaw,
    counts_at_times,
    law_tag,
    parse_law,
    plancherel_growth,
    rectangle_initializer,
)

__all__ = [
    "ExperimentSpec",
    "EnsembleRecord",
    "EnsembleStats",
    "run_ensemble",
    "propagation_check",
    "concentration_report",
    "theorem11_reproduction",
    "theorem12_reproduction",
    "stats_csv",
    "profiles_csv",
    "stats_json",
]

# x-grid on which per-trajectory rescaled profiles are recorded and averaged
PROFILE_GRID = (-3.0, 3.0, 601)

# moment orders whose pairwise products are tracked (mixed moments)
MIXED_ORDERS = (2, 3, 4)

# covariance below this is treated as converged when judging trends
COV_FLOOR = 1e-12

_INITIALIZERS = ("plancherel", "rectangle", "file")
_SCALINGS = ("diffusive", "anomalous")
_REGIMES = ("sub", "critical", "super")

# exponent bump of the super-critical clock over the critical one;
# large enough that at accessible n the shape has fully relaxed, small
# enough that trajectories stay affordable
_SUPER_EXTRA = 0.85


def _law_from_token(token: str) -> PausingLaw:
    """One-token law syntax: 'exponential[:mean]', 'stable:alpha', 'unit'."""
    kind, _, param = token.partition(":")
    kind = kind.strip().lower()
    if kind in ("exponential", "exp"):
        return parse_law(kind, mean=float(param) if param else 1.0)
    if kind in ("stable", "one_sided_stable", "onesidedstable"):
        if not param:
            raise ValueError("stable pausing law needs alpha, e.g. 'stable:0.5'")
        return parse_law(kind, alpha=float(param))
    if param:
        raise ValueError(f"pausing law {kind!r} takes no parameter")
    return parse_law(kind)


@dataclass(frozen=True)
class ExperimentSpec:
    """Full description of one ensemble experiment.

    ``scaling`` chooses the physical clock: ``diffusive`` runs the walk to
    s = t*n; ``anomalous`` (heavy-tailed pauses only) runs to s = t*theta(n)
    where the scale theta(n) depends on the ``regime``:

    * ``sub``      theta = n               (short of critical: the shape
                                            should barely move),
    * ``critical`` theta = n^(1/alpha)     (order-one evolution),
    * ``super``    theta = n^(1/alpha+0.85) (past critical: the shape should
                                            have fully relaxed).
    """

    n_grid: tuple[int, ...]
    initializer: str
    law: PausingLaw
    time_points: tuple[float, ...]
    scaling: str = "diffusive"
    regime: str = "critical"
    aspect: float = 1.0
    init_path: str | None = None
    trajectories: int = 1
    k_max: int = 6
    master_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(
            self, "time_points", tuple(float(t) for t in self.time_points)
        )
        if isinstance(self.law, str):
            object.__setattr__(self, "law", _law_from_token(self.law))
        if not self.n_grid or any(n < 1 for n in self.n_grid):
            raise ValueError("n_grid must be nonempty positive integers")
        if self.initializer not in _INITIALIZERS:
            raise ValueError(f"unknown initializer {self.initializer!r}")
        if self.initializer == "file" and not self.init_path:
            raise ValueError("initializer 'file' needs init_path")
        if not self.time_points or any(t < 0 for t in self.time_points):
            raise ValueError("time_points must be nonempty and nonnegative")
        if any(b <= a for a, b in zip(self.time_points, self.time_points[1:])):
            raise ValueError("time_points must be strictly increasing")
        if self.scaling not in _SCALINGS:
            raise ValueError(f"unknown scaling {self.scaling!r}")
        if self.scaling == "anomalous":
            if not isinstance(self.law, OneSidedStable):
                raise ValueError("anomalous scaling needs a one-sided stable law")
            if self.regime not in _REGIMES:
                raise ValueError(f"unknown regime {self.regime!r}")
        if self.trajectories < 1:
            raise ValueError("trajectories must be >= 1")
        if self.k_max < 4:
            raise ValueError("k_max must be >= 4")
        if self.aspect <= 0:
            raise ValueError("aspect must be positive")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must fit in 64 bits")

    # ----- clocks -------------------------------------------------------

    def theta(self, n: int) -> float:
        """Anomalous chain-time scale at diagram size n (see class doc)."""
        if self.scaling != "anomalous":
            raise ValueError("theta is defined for anomalous scaling only")
        alpha = self.law.alpha
        if self.regime == "sub":
            return float(n)
        if self.regime == "critical":
            return float(n) ** (1.0 / alpha)
        return float(n) ** (1.0 / alpha + _SUPER_EXTRA)

    def physical_time(self, t: float, n: int) -> float:
        """Chain time s corresponding to macroscopic time t at size n."""
        if self.scaling == "diffusive":
            return t * n
        return t * self.theta(n)

    # ----- initial shapes ----------------------------------------------

    def initial_diagram(self, n: int, rng: np.random.Generator) -> YoungDiagram:
        """Starting diagram for one trajectory (may consume the generator)."""
        if self.initializer == "plancherel":
            return plancherel_growth(n, rng)
        if self.initializer == "rectangle":
            return rectangle_initializer(n, self.aspect)
        lam = _diagrams_from_file(self.init_path).get(n)
        if lam is None:
            raise ValueError(f"initializer file has no partition of {n}")
        return lam

    def reference_cumulants(self, n: int, order: int | None = None) -> np.ndarray:
        """Scaled free cumulants [0..order] of the t=0 shape at size n.

        For the plancherel initializer the start is random but concentrated
        on the semicircle curve, whose cumulants are used instead.  ``order``
        defaults to ``k_max``; shape-reconstruction targets want more.
        """
        if order is None:
            order = self.k_max
        if self.initializer == "plancherel":
            return np.asarray(semicircle_cumulants(order), dtype=float)
        lam = self.initial_diagram(n, _null_rng())
        return scaled_transition_cumulants(lam, order)

    # ----- canonical config text ---------------------------------------

    def config_items(self) -> list[tuple[str, str]]:
        """Canonical (key, value) pairs; basis for files and the hash."""
        items = [
            ("n_grid", ",".join(str(n) for n in self.n_grid)),
            ("initializer", self.initializer),
            ("time_points", ",".join(repr(t) for t in self.time_points)),
            ("scaling", self.scaling),
            ("trajectories", str(self.trajectories)),
            ("k_max", str(self.k_max)),
            ("master_seed", str(self.master_seed)),
        ]
        if isinstance(self.law, Exponential):
            items += [("law", "exponential"), ("mean", repr(self.law.mean))]
        elif isinstance(self.law, OneSidedStable):
            items += [("law", "stable"), ("alpha", repr(self.law.alpha))]
        else:
            items += [("law", "unit")]
        if self.initializer == "rectangle":
            items.append(("aspect", repr(self.aspect)))
        if self.initializer == "file":
            items.append(("init_path", str(self.init_path)))
        if self.scaling == "anomalous":
            items.append(("regime", self.regime))
        return sorted(items)

    def config_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.config_items())

    def config_hash(self) -> str:
        return hashlib.sha256(self.config_text().encode()).hexdigest()

    @staticmethod
    def from_config(text: str) -> "ExperimentSpec":
        """Parse the flat ``key = value`` config format (# starts a comment)."""
        fields: dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line {lineno}: expected key = value")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key in fields:
                raise ValueError(f"config line {lineno}: duplicate key {key!r}")
            fields[key] = value

        known = {
            "n_grid", "initializer", "aspect", "init_path", "law", "mean",
            "alpha", "time_points", "scaling", "regime", "trajectories",
            "k_max", "master_seed",
        }
        unknown = sorted(set(fields) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        missing = sorted(
            k for k in ("n_grid", "initializer", "law", "time_points",
                        "scaling", "trajectories", "master_seed")
            if k not in fields
        )
        if missing:
            raise ValueError(f"missing config keys: {', '.join(missing)}")

        def split(v: str) -> list[str]:
            return [p for p in v.replace(",", " ").split() if p]

        try:
            law = parse_law(
                fields["law"],
                mean=float(fields.get("mean", 1.0)),
                alpha=float(fields["alpha"]) if "alpha" in fields else None,
            )
            return ExperimentSpec(
                n_grid=tuple(int(p) for p in split(fields["n_grid"])),
                initializer=fields["initializer"],
                law=law,
                time_points=tuple(float(p) for p in split(fields["time_points"])),
                scaling=fields["scaling"],
                regime=fields.get("regime", "critical"),
                aspect=float(fields.get("aspect", 1.0)),
                init_path=fields.get("init_path"),
                trajectories=int(fields["trajectories"]),
                k_max=int(fields.get("k_max", 6)),
                master_seed=int(fields["master_seed"]),
            )
        except (TypeError, ValueError) as exc:
            raise ValueError(f"invalid config: {exc}") from exc


@dataclass(frozen=True)
class EnsembleRecord:
    """Reduced statistics of one (n, t) cell of an ensemble.

    ``mean_moments``/``var_moments`` cover the rescaled transition-measure
    moments M_0..M_K (variance is the unbiased sample variance, 0 when only
    one trajectory ran).  ``mixed_moments`` holds (k1, k2, E[M_k1*M_k2])
    triples for the tracked order pairs.  ``cycle2``/``cycle22`` are the
    unscaled single 2-cycle observable and the disjoint 2-cycle pair
    observable, kept for factorization-defect estimates.
    """

    n: int
    t: float
    s: float
    count: int
    mean_moments: tuple[float, ...]
    var_moments: tuple[float, ...]
    mean_cumulants: tuple[float, ...]
    var_cumulants: tuple[float, ...]
    mixed_moments: tuple[tuple[int, int, float], ...]
    mean_cycle2: float
    var_cycle2: float
    mean_cycle22: float
    var_cycle22: float
    mean_profile: tuple[float, ...]

    def mixed(self, k1: int, k2: int) -> float:
        for a, b, v in self.mixed_moments:
            if (a, b) == (k1, k2):
                return v
        raise KeyError((k1, k2))


@dataclass(frozen=True)
class EnsembleStats:
    """All reduced records of one ensemble run, keyed by (n, t)."""

    spec: ExperimentSpec
    grid: tuple[float, float, int]
    records: tuple[EnsembleRecord, ...]

    def __post_init__(self):
        for rec in self.records:
            if rec.count != self.spec.trajectories:
                raise ValueError("record count does not match trajectories")
            if any(v < 0 for v in rec.var_moments):
                raise ValueError("negative moment variance")

    @property
    def grid_x(self) -> np.ndarray:
        lo, hi, npts = self.grid
        return np.linspace(lo, hi, npts)

    def n_values(self) -> tuple[int, ...]:
        return tuple(sorted({rec.n for rec in self.records}))

    def record(self, n: int, t: float) -> EnsembleRecord:
        for rec in self.records:
            if rec.n == n and rec.t == t:
                return rec
        raise KeyError((n, t))


def _null_rng() -> np.random.Generator:
    # for deterministic initializers only; must never actually be consumed
    return np.random.Generator(np.random.PCG64(0))


@lru_cache(maxsize=8)
def _diagrams_from_file(path: str) -> dict[int, YoungDiagram]:
    """Partitions listed in a text file, keyed by size (one per size)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            diagrams = read_partitions(fh.read())
    except OSError as exc:
        raise ValueError(f"cannot read initializer file {path!r}: {exc}") from exc
    out: dict[int, YoungDiagram] = {}
    for lam in diagrams:
        if lam.n in out:
            raise ValueError(f"initializer file lists two partitions of {lam.n}")
        out[lam.n] = lam
    if not out:
        raise ValueError(f"initializer file {path!r} holds no partitions")
    return out


def _trajectory_observables(spec: ExperimentSpec, n: int, idx: int):
    """Observables of trajectory ``idx`` at size ``n``, one entry per time.

    The generator is seeded from (master_seed, n, idx) and consumed in a
    fixed order: initializer draws first, then jump counts, then chain
    moves, so the trajectory is a pure function of ``spec`` and ``idx``.
    """
    rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence((int(spec.master_seed), n, idx)))
    )
    lam0 = spec.initial_diagram(n, rng)
    times = [spec.physical_time(t, n) for t in spec.time_points]
    counts = counts_at_times(spec.law, times, rng)
    grid_x = np.linspace(*PROFILE_GRID)
    state = ChainState(lam0)
    done = 0
    out = []
    for target in counts:
        target = int(target)
        state.run_steps(target - done, rng)
        done = target
        moments = state.scaled_moments(spec.k_max)
        moments[0] = 1.0  # exact by normalization; drop the summation ulp
        if abs(moments[2] - 1.0) > 1e-9:
            raise ArithmeticError(
                f"rescaled M_2 drifted to {moments[2]!r} (n={n}, trajectory {idx})"
            )
        cumulants = np.asarray(
            cumulants_from_moments([float(v) for v in moments]), dtype=float
        )
        unscaled = [c * float(n) ** (j / 2.0) for j, c in enumerate(cumulants)]
        cycle2 = float(sigma_from_cumulants(2, unscaled))
        cycle22 = float(sigma22_from_cumulants(unscaled))
        prof = rescaled_profile(state.diagram())(grid_x)
        out.append((moments, cumulants, prof, cycle2, cycle22))
    return out


def _trajectory_task(args):
    return _trajectory_observables(*args)


def _warm_engine() -> None:
    """Trigger jit compilation in the parent before forking workers."""
    rng = _null_rng()
    plancherel_growth(4, rng)
    ChainState(YoungDiagram((2, 1))).run_steps(4, rng)


def _sample_var(stack: np.ndarray) -> np.ndarray:
    count = stack.shape[0]
    if count < 2:
        return np.zeros(stack.shape[1:])
    # identical samples (deterministic start, t=0) must give exactly 0, not
    # the square of the rounding error of their mean
    var = np.var(stack, axis=0, ddof=1)
    return np.where(np.ptp(stack, axis=0) == 0, 0.0, var)


def run_ensemble(spec: ExperimentSpec, workers: int = 1) -> EnsembleStats:
    """Run every trajectory of the experiment and reduce to EnsembleStats.

    ``workers`` > 1 farms trajectories out to forked processes; the
    reduction always happens in trajectory order in the parent, so the
    result is bitwise identical for any worker count.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if spec.initializer == "file":
        _diagrams_from_file(spec.init_path)  # fail fast on a bad file
    tasks = [(spec, n, idx) for n in spec.n_grid for idx in range(spec.trajectories)]
    if workers > 1 and len(tasks) > 1:
        _warm_engine()
        ctx = multiprocessing.get_context("fork")
        chunk = max(1, len(tasks) // (4 * workers))
        with ctx.Pool(processes=workers) as pool:
            results = pool.map(_trajectory_task, tasks, chunksize=chunk)
    else:
        results = [_trajectory_observables(*task) for task in tasks]

    records = []
    base = 0
    for n in spec.n_grid:
        block = results[base : base + spec.trajectories]
        base += spec.trajectories
        for ti, t in enumerate(spec.time_points):
            cells = [traj[ti] for traj in block]
            moments = np.stack([c[0] for c in cells])
            cumulants = np.stack([c[1] for c in cells])
            profiles = np.stack([c[2] for c in cells])
            cycle2 = np.array([c[3] for c in cells])
            cycle22 = np.array([c[4] for c in cells])
            mixed = tuple(
                (k1, k2, float(np.mean(moments[:, k1] * moments[:, k2])))
                for k1 in MIXED_ORDERS
                for k2 in MIXED_ORDERS
            )
            records.append(
                EnsembleRecord(
                    n=n,
                    t=t,
                    s=spec.physical_time(t, n),
                    count=spec.trajectories,
                    mean_moments=tuple(float(v) for v in moments.mean(axis=0)),
                    var_moments=tuple(float(v) for v in _sample_var(moments)),
                    mean_cumulants=tuple(float(v) for v in cumulants.mean(axis=0)),
                    var_cumulants=tuple(float(v) for v in _sample_var(cumulants)),
                    mixed_moments=mixed,
                    mean_cycle2=float(cycle2.mean()),
                    var_cycle2=float(_sample_var(cycle2[:, None])[0]),
                    mean_cycle22=float(cycle22.mean()),
                    var_cycle22=float(_sample_var(cycle22[:, None])[0]),
                    mean_profile=tuple(float(v) for v in profiles.mean(axis=0)),
                )
            )
    return EnsembleStats(spec=spec, grid=PROFILE_GRID, records=tuple(records))


# ---------------------------------------------------------------------------
# exact small-n propagation of cycle observables
# ---------------------------------------------------------------------------


def propagation_check(
    n: int,
    rho,
    law: PausingLaw,
    s: float,
    lam0: YoungDiagram | None = None,
) -> float:
    """Residual of E_s[Sigma_rho] = f(k, n, s) * Sigma_rho(lam0), exactly.

    The left side evolves a point mass at ``lam0`` through the full n-box
    transition matrix, mixing over the jump count at time s (Poisson weights
    for exponential pauses, summed until the tail is below 1e-12; the single
    term P^floor(s) for unit pauses).  The right side multiplies the initial
    observable by the kernel at k = |rho| minus its fixed points.  The
    identity is exact; the returned residual is pure floating-point error.
    """
    if not 1 <= n <= 8:
        raise ValueError("exact series evolution supports 1 <= n <= 8")
    if s < 0:
        raise ValueError("s must be nonnegative")
    rho = tuple(sorted((int(p) for p in rho), reverse=True))
    if not rho or rho[-1] < 1 or sum(rho) > n:
        raise ValueError("rho must be a partition with at most n boxes")
    if not isinstance(law, (Exponential, DeterministicUnit)):
        raise ValueError("exact series needs exponential or unit pauses")
    if lam0 is None:
        lam0 = YoungDiagram((n - 1, 1)) if n >= 2 else YoungDiagram((1,))
    if lam0.n != n:
        raise ValueError("lam0 must have n boxes")

    states, P = full_matrix(n)
    sig = np.array([float(sigma_exact(rho, lam)) for lam in states])
    v = np.zeros(len(states))
    v[states.index(lam0)] = 1.0
    start = float(v @ sig)

    if isinstance(law, DeterministicUnit):
        for _ in range(math.floor(s)):
            v = v @ P
        series = float(v @ sig)
    else:
        mu = s / law.mean
        weight = math.exp(-mu)
        covered = weight
        series = weight * float(v @ sig)
        j = 0
        while 1.0 - covered > 1e-12:
            j += 1
            if j > 1_000_000:
                raise ArithmeticError(
                    "jump-count series did not reach tail 1e-12 within 1e6 terms"
                )
            v = v @ P
            weight *= mu / j
            covered += weight
            series += weight * float(v @ sig)

    k = sum(rho) - rho.count(1)
    product = f_value(KernelQuery(k=k, n=n, s=s, law=law)) * start
    return abs(series - product)


# ---------------------------------------------------------------------------
# concentration across the n-grid
# ---------------------------------------------------------------------------


def concentration_report(stats: EnsembleStats, reference) -> dict:
    """Concentration diagnostics across the size grid.

    For each tracked order pair the report lists |E[M_k1 M_k2] -
    E[M_k1] E[M_k2]| along n and whether the trend decreases (values below
    ``COV_FLOOR`` count as converged ties); non-decreasing trends are
    flagged.  ``reference`` is a cumulant sequence [0, R_1, ...] of the
    comparison shape; the report includes the sup distance of the mean
    moments to its moments.
    """
    n_values = stats.n_values()
    if len(n_values) < 2:
        raise ValueError("need grid of at least two n values")
    ref_moments = [float(v) for v in moments_from_cumulants(list(reference))]
    k_top = min(stats.spec.k_max, len(ref_moments) - 1)

    pairs = []
    flagged = []
    for t in stats.spec.time_points:
        for k1 in MIXED_ORDERS:
            for k2 in MIXED_ORDERS:
                covs = []
                for n in n_values:
                    rec = stats.record(n, t)
                    covs.append(
                        abs(
                            rec.mixed(k1, k2)
                            - rec.mean_moments[k1] * rec.mean_moments[k2]
                        )
                    )
                decreasing = all(
                    later < earlier or later <= COV_FLOOR
                    for earlier, later in zip(covs, covs[1:])
                )
                pairs.append(
                    {
                        "k1": k1,
                        "k2": k2,
                        "t": t,
                        "covariances": covs,
                        "decreasing": decreasing,
                    }
                )
                if not decreasing:
                    flagged.append(f"({k1},{k2}) at t={t!r}")

    distances = []
    for t in stats.spec.time_points:
        for n in n_values:
            rec = stats.record(n, t)
            distances.append(
                {
                    "n": n,
                    "t": t,
                    "distance": max(
                        abs(rec.mean_moments[k] - ref_moments[k])
                        for k in range(k_top + 1)
                    ),
                }
            )

    return {
        "n_values": list(n_values),
        "pairs": pairs,
        "reference_distance": distances,
        "flagged": flagged,
    }


# ---------------------------------------------------------------------------
# desk-scale reproduction tables
# ---------------------------------------------------------------------------


def _zscore(mean: float, predicted: float, se: float) -> float:
    if se > 0:
        return (mean - predicted) / se
    return 0.0 if abs(mean - predicted) <= 1e-9 else math.inf


def _cumulant_rows(spec, stats, predictor) -> list[dict]:
    """One row per (n, t, cumulant order >= 3) comparing mean to prediction."""
    rows = []
    for n in spec.n_grid:
        ref = spec.reference_cumulants(n)
        for t in spec.time_points:
            rec = stats.record(n, t)
            for order in range(3, spec.k_max + 1):
                pred = predictor(ref, order, t)
                mean = rec.mean_cumulants[order]
                se = math.sqrt(rec.var_cumulants[order] / rec.count)
                rows.append(
                    {
                        "n": n,
                        "t": t,
                        "order": order,
                        "mean": mean,
                        "se": se,
                        "predicted": pred,
                        "z": _zscore(mean, pred, se),
                        "ratio": mean / pred if abs(pred) > 1e-12 else math.nan,
                    }
                )
    return rows


def theorem11_reproduction(
    spec: ExperimentSpec,
    stats: EnsembleStats | None = None,
    inversion_eps: float = 1e-3,
    profile_order: int = 16,
) -> dict:
    """Diffusive-limit table: cumulant decay and mean-profile convergence.

    Under exponential pauses with mean m and the diffusive clock s = t*n,
    the scaled free cumulants of the mean evolve as R_j(t) =
    R_j(0) * exp(-(j-1) t / m) and the mean profile approaches the shape
    recovered from those cumulants.  Returns ``rows`` (one per n, t, order,
    with z-score and ratio) and ``profiles`` (sup distance of the mean
    empirical profile to the predicted shape).  The profile target is
    rebuilt from ``profile_order`` cumulants of the evolved flow; the
    default 16 puts the reconstruction error near 1e-3, well under the
    sampling noise of any affordable ensemble.
    """
    if not isinstance(spec.law, Exponential):
        raise ValueError("diffusive reproduction needs the exponential law")
    if spec.scaling != "diffusive":
        raise ValueError("diffusive reproduction needs diffusive scaling")
    if stats is None:
        stats = run_ensemble(spec)
    m = spec.law.mean

    rows = _cumulant_rows(
        spec, stats, lambda ref, order, t: ref[order] * math.exp(-(order - 1) * t / m)
    )

    profiles = []
    grid_x = stats.grid_x
    for n in spec.n_grid:
        ref = [float(v) for v in spec.reference_cumulants(n, profile_order)]
        for t in spec.time_points:
            rec = stats.record(n, t)
            target_moments = moments_from_cumulants(omega_t_cumulants(ref, t, m=m))
            shape = markov_inverse(target_moments, eps=inversion_eps)
            sup = float(np.max(np.abs(np.asarray(rec.mean_profile) - shape(grid_x))))
            profiles.append({"n": n, "t": t, "sup_distance": sup})
    return {"rows": rows, "profiles": profiles}


def theorem12_reproduction(
    spec: ExperimentSpec, stats: EnsembleStats | None = None
) -> dict:
    """Anomalous-limit table for heavy-tailed pauses.

    Predictions depend on the clock regime: ``sub`` leaves the initial
    cumulants unchanged, ``super`` relaxes every order >= 3 to the
    semicircle value 0, and ``critical`` damps order j by
    g_alpha(t * (j-1)^(1/alpha)).  In the critical regime the table also
    carries the factorization-defect estimate
    E[Sigma_{2,2}]/Sigma_{2,2}(0) - (E[Sigma_2]/Sigma_2(0))^2 next to its
    predicted main term (meaningful in sign and order of magnitude only).
    Defect rows are omitted when the initial 2-cycle observable vanishes
    (symmetric starts) or the start is random.
    """
    if not isinstance(spec.law, OneSidedStable):
        raise ValueError("anomalous reproduction needs the one-sided stable law")
    if spec.scaling != "anomalous":
        raise ValueError("anomalous reproduction needs anomalous scaling")
    if stats is None:
        stats = run_ensemble(spec)
    alpha = spec.law.alpha

    if spec.regime == "sub":
        predictor = lambda ref, order, t: float(ref[order])
    elif spec.regime == "super":
        predictor = lambda ref, order, t: 0.0
    else:
        predictor = lambda ref, order, t: float(ref[order]) * g_alpha(
            t * (order - 1) ** (1.0 / alpha), alpha
        )
    rows = _cumulant_rows(spec, stats, predictor)

    defects = []
    if spec.regime == "critical" and spec.initializer != "plancherel":
        for n in spec.n_grid:
            ref = spec.reference_cumulants(n)
            unscaled = [float(c) * float(n) ** (j / 2.0) for j, c in enumerate(ref)]
            cycle2_0 = float(sigma_from_cumulants(2, unscaled))
            cycle22_0 = float(sigma22_from_cumulants(unscaled))
            if abs(cycle2_0) < 1e-9 or abs(cycle22_0) < 1e-9:
                continue
            for t in spec.time_points:
                rec = stats.record(n, t)
                estimate = (
                    rec.mean_cycle22 / cycle22_0
                    - (rec.mean_cycle2 / cycle2_0) ** 2
                )
                predicted = factorization_defect_main_term(2, 1, t, alpha)
                defects.append(
                    {
                        "n": n,
                        "t": t,
                        "estimate": estimate,
                        "predicted": predicted,
                        "sign_agrees": bool(estimate * predicted > 0),
                    }
                )
    return {"regime": spec.regime, "rows": rows, "defects": defects}


# ---------------------------------------------------------------------------
# output writers
# ---------------------------------------------------------------------------


def _metadata_lines(stats: EnsembleStats) -> list[str]:
    from . import __version__

    return [
        f"# version={__version__}",
        f"# config_sha256={stats.spec.config_hash()}",
        f"# master_seed={stats.spec.master_seed}",
    ]


def _cell(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def stats_csv(stats: EnsembleStats) -> str:
    """Per-(n, t) statistics as CSV (floats via repr, exact round-trip)."""
    K = stats.spec.k_max
    header = (
        ["n", "t", "s", "count"]
        + [f"mean_m{k}" for k in range(K + 1)]
        + [f"var_m{k}" for k in range(K + 1)]
        + [f"mean_r{k}" for k in range(K + 1)]
        + [f"var_r{k}" for k in range(K + 1)]
        + [f"mixed_{k1}_{k2}" for k1 in MIXED_ORDERS for k2 in MIXED_ORDERS]
        + ["mean_cycle2", "var_cycle2", "mean_cycle22", "var_cycle22"]
    )
    lines = _metadata_lines(stats) + [",".join(header)]
    for rec in stats.records:
        cells = (
            [rec.n, rec.t, rec.s, rec.count]
            + list(rec.mean_moments)
            + list(rec.var_moments)
            + list(rec.mean_cumulants)
            + list(rec.var_cumulants)
            + [v for (_, _, v) in rec.mixed_moments]
            + [rec.mean_cycle2, rec.var_cycle2, rec.mean_cycle22, rec.var_cycle22]
        )
        lines.append(",".join(_cell(c) for c in cells))
    return "\n".join(lines) + "\n"


def profiles_csv(stats: EnsembleStats) -> str:
    """Mean profiles in long form (n, t, x, omega), one row per grid node."""
    lines = _metadata_lines(stats) + ["n,t,x,omega"]
    grid_x = stats.grid_x
    for rec in stats.records:
        for x, w in zip(grid_x, rec.mean_profile):
            lines.append(f"{rec.n},{rec.t!r},{float(x)!r},{w!r}")
    return "\n".join(lines) + "\n"


def stats_json(stats: EnsembleStats) -> str:
    """JSON summary with metadata; keys sorted for stable bytes."""
    import json

    from . import __version__

    payload = {
        "version": __version__,
        "config_sha256": stats.spec.config_hash(),
        "master_seed": stats.spec.master_seed,
        "law": law_tag(stats.spec.law),
        "config": dict(stats.spec.config_items()),
        "grid": list(stats.grid),
        "records": [
            {
                "n": rec.n,
                "t": rec.t,
                "s": rec.s,
                "count": rec.count,
                "mean_moments": list(rec.mean_moments),
                "var_moments": list(rec.var_moments),
                "mean_cumulants": list(rec.mean_cumulants),
                "var_cumulants": list(rec.var_cumulants),
                "mixed_moments": [
                    {"k1": a, "k2": b, "value": v} for a, b, v in rec.mixed_moments
                ],
                "mean_cycle2": rec.mean_cycle2,
                "var_cycle2": rec.var_cycle2,
                "mean_cycle22": rec.mean_cycle22,
                "var_cycle22": rec.var_cycle22,
            }
            for rec in stats.records
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"
