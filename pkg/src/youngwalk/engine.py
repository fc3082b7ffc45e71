"""Fast interlacing-coordinate engine for the restriction-induction walk.

State is the zigzag boundary of the diagram: integer valleys x_0 < ... <
x_{r-1} (addable-corner contents) and peaks y_0 < ... < y_{r-2}
(removable-corner contents), plus two cached weight arrays

    w_i = prod_j |x_i - y_j| / prod_{k != i} |x_i - x_k|      (sum = 1)
    D_j = prod_i |y_j - x_i| / prod_{k != j} |y_j - y_k|      (sum = n)

w is the transition measure (up-step law), D/n the co-transition measure
(down-step law).  A step edits at most three coordinates per move, so both
caches are maintained multiplicatively in O(r) per step, with a full O(r^2)
rebuild every few thousand steps to stop roundoff drift (the rebuild also
cross-checks the cached values and flags disagreement).

All randomness enters through caller-supplied uniform buffers, two numbers
per step, so identical seeds give identical trajectories regardless of how
the work is chunked or parallelized.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .diagrams import Interlacing, YoungDiagram, diagram_from_interlacing, interlacing

__all__ = ["ChainState", "RUN_OK", "RUN_OUT_OF_UNIFORMS", "RUN_DRIFT", "RUN_CAPACITY"]

RUN_OK = 0
RUN_OUT_OF_UNIFORMS = 1
RUN_DRIFT = 2
RUN_CAPACITY = 3

REFRESH_INTERVAL = 4096
DRIFT_TOL = 1e-8


@njit(cache=True)
def _fresh_valley_weight(x, y, rv, i):
    # interleave peak and valley factors so the running product stays O(1)
    xi = x[i]
    w = 1.0
    for k in range(rv):
        if k < rv - 1:
            w *= abs(xi - y[k])
        if k != i:
            w /= abs(xi - x[k])
    return w


@njit(cache=True)
def _fresh_peak_weight(x, y, rv, j):
    yj = y[j]
    w = 1.0
    for k in range(rv):
        w *= abs(yj - x[k])
        if k < rv - 1 and k != j:
            w /= abs(yj - y[k])
    return w


@njit(cache=True)
def _refresh(x, y, w, D, rv):
    for i in range(rv):
        w[i] = _fresh_valley_weight(x, y, rv, i)
    for j in range(rv - 1):
        D[j] = _fresh_peak_weight(x, y, rv, j)


@njit(cache=True)
def _refresh_check(x, y, w, D, rv):
    """Rebuild both caches; return max abs discrepancy against cached values."""
    drift = 0.0
    for i in range(rv):
        fresh = _fresh_valley_weight(x, y, rv, i)
        d = abs(fresh - w[i])
        if d > drift:
            drift = d
        w[i] = fresh
    for j in range(rv - 1):
        fresh = _fresh_peak_weight(x, y, rv, j)
        d = abs(fresh - D[j]) / max(1.0, abs(fresh))
        if d > drift:
            drift = d
        D[j] = fresh
    return drift


@njit(cache=True)
def _apply_ratios(coord, weights, size, skip_a, skip_b,
                  oa0, oa1, n_oa, orm0, orm1, n_or,
                  sa0, sa1, n_sa, sr0, sr1, n_sr):
    """In-place ratio update of `weights` for entries whose coordinate array
    is `coord`; indices skip_a/skip_b (-1 = none) are left untouched.

    Numerator gains opposite-side additions oa*, loses removals orm*;
    denominator gains same-side additions sa*, loses removals sr*.
    """
    for i in range(size):
        if i == skip_a or i == skip_b:
            continue
        c = coord[i]
        f = 1.0
        if n_oa > 0:
            f *= abs(c - oa0)
        if n_oa > 1:
            f *= abs(c - oa1)
        if n_or > 0:
            f /= abs(c - orm0)
        if n_or > 1:
            f /= abs(c - orm1)
        if n_sr > 0:
            f *= abs(c - sr0)
        if n_sr > 1:
            f *= abs(c - sr1)
        if n_sa > 0:
            f /= abs(c - sa0)
        if n_sa > 1:
            f /= abs(c - sa1)
        weights[i] *= f


@njit(cache=True)
def _insert(arr, size, pos, val):
    for k in range(size, pos, -1):
        arr[k] = arr[k - 1]
    arr[pos] = val


@njit(cache=True)
def _delete(arr, size, pos):
    for k in range(pos, size - 1):
        arr[k] = arr[k + 1]


@njit(cache=True)
def _remove_at_peak(x, y, w, D, rv, p):
    """Remove the corner at peak index p; returns the new valley count."""
    v = y[p]
    vf = 1.0 * v
    left = x[p] == v - 1
    right = x[p + 1] == v + 1
    if left and right:
        # [valley v-1, peak v, valley v+1] collapses to a single valley at v
        _delete(x, rv, p + 1)
        _delete(w, rv, p + 1)
        _delete(y, rv - 1, p)
        _delete(D, rv - 1, p)
        rv -= 1
        x[p] = v
        # valleys: removed v-1 and v+1, added v (fresh at p); peak v removed
        _apply_ratios(x, w, rv, p, -1,
                      0.0, 0.0, 0, vf, 0.0, 1,
                      vf, 0.0, 1, vf - 1.0, vf + 1.0, 2)
        _apply_ratios(y, D, rv - 1, -1, -1,
                      vf, 0.0, 1, vf - 1.0, vf + 1.0, 2,
                      0.0, 0.0, 0, vf, 0.0, 1)
        w[p] = _fresh_valley_weight(x, y, rv, p)
    elif left:
        # valley v-1 -> v, peak v -> v+1
        x[p] = v
        y[p] = v + 1
        _apply_ratios(x, w, rv, p, -1,
                      vf + 1.0, 0.0, 1, vf, 0.0, 1,
                      vf, 0.0, 1, vf - 1.0, 0.0, 1)
        _apply_ratios(y, D, rv - 1, p, -1,
                      vf, 0.0, 1, vf - 1.0, 0.0, 1,
                      vf + 1.0, 0.0, 1, vf, 0.0, 1)
        w[p] = _fresh_valley_weight(x, y, rv, p)
        D[p] = _fresh_peak_weight(x, y, rv, p)
    elif right:
        # valley v+1 -> v, peak v -> v-1
        x[p + 1] = v
        y[p] = v - 1
        _apply_ratios(x, w, rv, p + 1, -1,
                      vf - 1.0, 0.0, 1, vf, 0.0, 1,
                      vf, 0.0, 1, vf + 1.0, 0.0, 1)
        _apply_ratios(y, D, rv - 1, p, -1,
                      vf, 0.0, 1, vf + 1.0, 0.0, 1,
                      vf - 1.0, 0.0, 1, vf, 0.0, 1)
        w[p + 1] = _fresh_valley_weight(x, y, rv, p + 1)
        D[p] = _fresh_peak_weight(x, y, rv, p)
    else:
        # peak v splits into peaks v-1, v+1 around a new valley at v
        _insert(x, rv, p + 1, v)
        _insert(w, rv, p + 1, 0.0)
        y[p] = v - 1
        _insert(y, rv - 1, p + 1, v + 1)
        _insert(D, rv - 1, p + 1, 0.0)
        rv += 1
        _apply_ratios(x, w, rv, p + 1, -1,
                      vf - 1.0, vf + 1.0, 2, vf, 0.0, 1,
                      vf, 0.0, 1, 0.0, 0.0, 0)
        _apply_ratios(y, D, rv - 1, p, p + 1,
                      vf, 0.0, 1, 0.0, 0.0, 0,
                      vf - 1.0, vf + 1.0, 2, vf, 0.0, 1)
        w[p + 1] = _fresh_valley_weight(x, y, rv, p + 1)
        D[p] = _fresh_peak_weight(x, y, rv, p)
        D[p + 1] = _fresh_peak_weight(x, y, rv, p + 1)
    return rv


@njit(cache=True)
def _add_at_valley(x, y, w, D, rv, q):
    """Add a box at valley index q; returns the new valley count."""
    v = x[q]
    vf = 1.0 * v
    left = q >= 1 and y[q - 1] == v - 1
    right = q <= rv - 2 and y[q] == v + 1
    if left and right:
        # [peak v-1, valley v, peak v+1] collapses to a single peak at v
        _delete(y, rv - 1, q)
        _delete(D, rv - 1, q)
        _delete(x, rv, q)
        _delete(w, rv, q)
        rv -= 1
        y[q - 1] = v
        _apply_ratios(y, D, rv - 1, q - 1, -1,
                      0.0, 0.0, 0, vf, 0.0, 1,
                      vf, 0.0, 1, vf - 1.0, vf + 1.0, 2)
        _apply_ratios(x, w, rv, -1, -1,
                      vf, 0.0, 1, vf - 1.0, vf + 1.0, 2,
                      0.0, 0.0, 0, vf, 0.0, 1)
        D[q - 1] = _fresh_peak_weight(x, y, rv, q - 1)
    elif left:
        # peak v-1 -> v, valley v -> v+1
        y[q - 1] = v
        x[q] = v + 1
        _apply_ratios(y, D, rv - 1, q - 1, -1,
                      vf + 1.0, 0.0, 1, vf, 0.0, 1,
                      vf, 0.0, 1, vf - 1.0, 0.0, 1)
        _apply_ratios(x, w, rv, q, -1,
                      vf, 0.0, 1, vf - 1.0, 0.0, 1,
                      vf + 1.0, 0.0, 1, vf, 0.0, 1)
        D[q - 1] = _fresh_peak_weight(x, y, rv, q - 1)
        w[q] = _fresh_valley_weight(x, y, rv, q)
    elif right:
        # peak v+1 -> v, valley v -> v-1
        y[q] = v
        x[q] = v - 1
        _apply_ratios(y, D, rv - 1, q, -1,
                      vf - 1.0, 0.0, 1, vf, 0.0, 1,
                      vf, 0.0, 1, vf + 1.0, 0.0, 1)
        _apply_ratios(x, w, rv, q, -1,
                      vf, 0.0, 1, vf + 1.0, 0.0, 1,
                      vf - 1.0, 0.0, 1, vf, 0.0, 1)
        D[q] = _fresh_peak_weight(x, y, rv, q)
        w[q] = _fresh_valley_weight(x, y, rv, q)
    else:
        # valley v splits into valleys v-1, v+1 around a new peak at v
        x[q] = v - 1
        _insert(x, rv, q + 1, v + 1)
        _insert(w, rv, q + 1, 0.0)
        _insert(y, rv - 1, q, v)
        _insert(D, rv - 1, q, 0.0)
        rv += 1
        _apply_ratios(y, D, rv - 1, q, -1,
                      vf - 1.0, vf + 1.0, 2, vf, 0.0, 1,
                      vf, 0.0, 1, 0.0, 0.0, 0)
        _apply_ratios(x, w, rv, q, q + 1,
                      vf, 0.0, 1, 0.0, 0.0, 0,
                      vf - 1.0, vf + 1.0, 2, vf, 0.0, 1)
        w[q] = _fresh_valley_weight(x, y, rv, q)
        w[q + 1] = _fresh_valley_weight(x, y, rv, q + 1)
        D[q] = _fresh_peak_weight(x, y, rv, q)
    return rv


@njit(cache=True)
def _pick(weights, size, target):
    acc = 0.0
    for i in range(size):
        acc += weights[i]
        if target < acc:
            return i
    return size - 1


@njit(cache=True)
def _run_steps(x, y, w, D, state, uniforms, nsteps):
    """Advance the walk by nsteps; state = [rv, steps_since_refresh, used].

    Returns a RUN_* code; on RUN_OUT_OF_UNIFORMS the caller refills the
    buffer and calls again with the remaining step count.
    """
    rv = state[0]
    since = state[1]
    used = 0
    cap = x.shape[0]
    done = 0
    while done < nsteps:
        if used + 2 > uniforms.shape[0]:
            state[0] = rv
            state[1] = since
            state[2] = used
            state[3] = done
            return RUN_OUT_OF_UNIFORMS
        if rv + 2 >= cap:
            state[0] = rv
            state[2] = used
            state[3] = done
            return RUN_CAPACITY
        # down move: pick a peak from D / sum(D)
        total = 0.0
        for j in range(rv - 1):
            total += D[j]
        p = _pick(D, rv - 1, uniforms[used] * total)
        used += 1
        rv = _remove_at_peak(x, y, w, D, rv, p)
        # up move: pick a valley from w / sum(w)
        total = 0.0
        for i in range(rv):
            total += w[i]
        q = _pick(w, rv, uniforms[used] * total)
        used += 1
        rv = _add_at_valley(x, y, w, D, rv, q)
        done += 1
        since += 1
        if since >= REFRESH_INTERVAL:
            drift = _refresh_check(x, y, w, D, rv)
            since = 0
            if drift > DRIFT_TOL:
                state[0] = rv
                state[1] = since
                state[2] = used
                state[3] = done
                return RUN_DRIFT
    state[0] = rv
    state[1] = since
    state[2] = used
    state[3] = done
    return RUN_OK


@njit(cache=True)
def _run_growth(x, y, w, D, state, uniforms, nsteps):
    """Plancherel growth: nsteps up-moves (one uniform each)."""
    rv = state[0]
    since = state[1]
    used = 0
    cap = x.shape[0]
    done = 0
    while done < nsteps:
        if used + 1 > uniforms.shape[0]:
            state[0] = rv
            state[1] = since
            state[2] = used
            state[3] = done
            return RUN_OUT_OF_UNIFORMS
        if rv + 2 >= cap:
            state[0] = rv
            state[2] = used
            state[3] = done
            return RUN_CAPACITY
        total = 0.0
        for i in range(rv):
            total += w[i]
        q = _pick(w, rv, uniforms[used] * total)
        used += 1
        rv = _add_at_valley(x, y, w, D, rv, q)
        done += 1
        since += 1
        if since >= REFRESH_INTERVAL:
            drift = _refresh_check(x, y, w, D, rv)
            since = 0
            if drift > DRIFT_TOL:
                state[0] = rv
                state[1] = since
                state[2] = used
                state[3] = done
                return RUN_DRIFT
    state[0] = rv
    state[1] = since
    state[2] = used
    state[3] = done
    return RUN_OK


@njit(cache=True)
def _scaled_moments(x, w, rv, scale, out):
    """Moments of the cached transition measure pushed through x -> x*scale."""
    K = out.shape[0] - 1
    total = 0.0
    for i in range(rv):
        total += w[i]
    for k in range(K + 1):
        out[k] = 0.0
    for i in range(rv):
        xi = x[i] * scale
        wi = w[i] / total
        pw = 1.0
        for k in range(K + 1):
            out[k] += wi * pw
            pw *= xi
    return out


class ChainState:
    """Mutable walk state with cached corner weights.

    The uniform stream comes from a numpy Generator supplied per call; the
    engine consumes exactly 2 uniforms per step (1 per growth step) in a
    fixed order, so trajectories are reproducible from the seed alone.
    """

    def __init__(self, lam: YoungDiagram, capacity: int | None = None):
        coords = interlacing(lam)
        self.n = lam.n
        if capacity is None:
            capacity = self._capacity_for(max(self.n, 1))
        rv = len(coords.valleys)
        if rv + 2 > capacity:
            capacity = rv + 8
        self.x = np.zeros(capacity, dtype=np.int64)
        self.y = np.zeros(capacity, dtype=np.int64)
        self.w = np.zeros(capacity, dtype=np.float64)
        self.D = np.zeros(capacity, dtype=np.float64)
        self.x[:rv] = coords.valleys
        self.y[: rv - 1] = coords.peaks
        # state vector: [valley count, steps since refresh, uniforms used,
        # steps done] -- the last two are per-call scratch
        self.state = np.array([rv, 0, 0, 0], dtype=np.int64)
        _refresh(self.x, self.y, self.w, self.D, rv)

    @staticmethod
    def _capacity_for(n: int) -> int:
        # a partition of n has at most sqrt(2n)+1 distinct corner contents
        return int(math.isqrt(2 * n)) + 8

    @property
    def rv(self) -> int:
        return int(self.state[0])

    def coords(self) -> Interlacing:
        rv = self.rv
        return Interlacing(
            tuple(int(v) for v in self.x[:rv]),
            tuple(int(v) for v in self.y[: rv - 1]),
        )

    def diagram(self) -> YoungDiagram:
        return diagram_from_interlacing(self.coords())

    def up_measure(self) -> tuple[np.ndarray, np.ndarray]:
        rv = self.rv
        w = self.w[:rv].copy()
        return self.x[:rv].astype(float), w / w.sum()

    def down_measure(self) -> tuple[np.ndarray, np.ndarray]:
        rv = self.rv
        D = self.D[: rv - 1].copy()
        return self.y[: rv - 1].astype(float), D / D.sum()

    def scaled_moments(self, order: int, scale_boxes: int | None = None) -> np.ndarray:
        n = self.n if scale_boxes is None else scale_boxes
        out = np.zeros(order + 1)
        _scaled_moments(self.x, self.w, self.rv, 1.0 / math.sqrt(n), out)
        return out

    def consistency_error(self) -> float:
        """Max discrepancy between cached and freshly rebuilt weights."""
        return float(
            _refresh_check(self.x, self.y, self.w, self.D, self.rv)
        )

    def _drive(self, kernel, nsteps: int, per_step: int, rng: np.random.Generator,
               chunk: int = 1 << 20) -> None:
        remaining = nsteps
        while remaining > 0:
            need = min(chunk, remaining * per_step)
            buf = rng.random(need)
            code = kernel(self.x, self.y, self.w, self.D, self.state, buf, remaining)
            remaining -= int(self.state[3])
            if code == RUN_OK:
                break
            if code == RUN_OUT_OF_UNIFORMS:
                continue
            if code == RUN_DRIFT:
                raise ArithmeticError(
                    "cached corner weights drifted beyond tolerance"
                )
            raise RuntimeError("engine capacity exceeded")

    def run_steps(self, nsteps: int, rng: np.random.Generator) -> None:
        """Advance the restriction-induction walk by nsteps."""
        if self.n == 0 and nsteps > 0:
            raise ValueError("cannot run the fixed-size walk from the empty diagram")
        self._drive(_run_steps, nsteps, 2, rng)

    def grow(self, added_boxes: int, rng: np.random.Generator) -> None:
        """Plancherel growth by added_boxes boxes."""
        needed = self._capacity_for(self.n + added_boxes)
        if needed > self.x.shape[0]:
            self._grow_capacity(needed)
        self._drive(_run_growth, added_boxes, 1, rng)
        self.n += added_boxes

    def _grow_capacity(self, capacity: int) -> None:
        for name in ("x", "y", "w", "D"):
            old = getattr(self, name)
            new = np.zeros(capacity, dtype=old.dtype)
            new[: old.shape[0]] = old
            setattr(self, name, new)
