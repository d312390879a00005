"""Time scales and the delta-calculus primitives on finite sampling grids.

A time scale is stored canonically as a sorted tuple of disjoint closed
segments; a degenerate segment ``(a, a)`` is an isolated point.  Only the last
segment may be right-infinite.  Unbounded discrete structure (periodic
repeats, explicit point sequences, seeded random scales) is carried by an
*extension rule* and materialized per window, so that every numeric operation
works on a finite grid.

Conventions fixed here and relied on everywhere else:

* membership and endpoint comparisons use the absolute tolerance ``EPS``;
* the forward jump of the maximum of a bounded scale is the point itself;
* the right endpoint of a dense interval followed by a gap is right-scattered
  and uses the exact difference-quotient derivative;
* dense sub-intervals are integrated with the composite trapezoid rule at the
  grid step, scattered contributions are exact sums ``mu(t) * f(t)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NotInScaleError, NotOnGridError, SchemaError, StencilError

EPS = 1e-12

Segment = tuple[float, float]

RIGHT_DENSE = "right-dense"
RIGHT_SCATTERED = "right-scattered"
LEFT_DENSE = "left-dense"
LEFT_SCATTERED = "left-scattered"


def canonicalize(raw: Iterable[Segment]) -> tuple[Segment, ...]:
    """Sort, merge and validate a list of closed intervals.

    Touching or overlapping intervals merge; the result is set-equal to the
    union of the inputs.  At most one interval may be unbounded to the right.
    """
    segs = [(float(l), float(r)) for l, r in raw]
    if not segs:
        raise SchemaError("empty interval list")
    n_unbounded = 0
    for l, r in segs:
        if math.isnan(l) or math.isnan(r):
            raise SchemaError("NaN interval endpoint")
        if math.isinf(l):
            raise SchemaError("left endpoint must be finite")
        if math.isinf(r):
            n_unbounded += 1
        elif r < l - EPS:
            raise SchemaError(f"interval ({l}, {r}) has right < left")
    if n_unbounded > 1:
        raise SchemaError("more than one unbounded interval")
    segs.sort(key=lambda s: (s[0], s[1]))
    merged = [segs[0]]
    for l, r in segs[1:]:
        pl, pr = merged[-1]
        if l <= pr + EPS:
            merged[-1] = (pl, max(pr, r))
        else:
            merged.append((l, r))
    return tuple((l, max(l, r)) for l, r in merged)


class PeriodicExtension:
    """Repeats ``block`` shifted by ``k * period`` for k = 0, 1, 2, ...

    ``block`` holds the absolute segments of the first repeated instance;
    it must be bounded and must not span more than one period.
    """

    def __init__(self, block: Iterable[Segment], period: float):
        self.block = canonicalize(block)
        self.period = float(period)
        if self.period <= 0:
            raise SchemaError("period must be positive")
        if math.isinf(self.block[-1][1]):
            raise SchemaError("periodic block must be bounded")
        if self.block[-1][1] - self.block[0][0] > self.period + EPS:
            raise SchemaError("periodic block spans more than one period")

    def segments_upto(self, bound: float) -> list[Segment]:
        out: list[Segment] = []
        k = 0
        while True:
            shift = k * self.period
            out.extend((l + shift, r + shift) for l, r in self.block)
            # emit one instance past the bound so the last in-window point
            # has a well-defined forward jump
            if self.block[0][0] + shift > bound:
                break
            k += 1
        return out

    def gap_sup(self) -> float:
        two = canonicalize(self.segments_upto(self.block[0][0] + 2 * self.period))
        gaps = [two[i + 1][0] - two[i][1] for i in range(len(two) - 1)]
        return max(gaps, default=0.0)

    def descriptor(self) -> dict:
        return {"kind": "periodic", "period": self.period,
                "block": [list(s) for s in self.block]}


class PointSequence:
    """Isolated points ``point_fn(n)`` for n = n0, n0+1, ...; strictly increasing.

    ``gap_sup`` is the *declared* supremum of the gaps this tail induces
    (``inf`` marks a non-syndetic tail); it is trusted, not computed.
    """

    def __init__(self, point_fn: Callable[[int], float], gap_sup: float = math.inf,
                 n0: int = 0, name: str | None = None):
        self.point_fn = point_fn
        self._gap_sup = float(gap_sup)
        self.n0 = n0
        self.name = name

    def segments_upto(self, bound: float) -> list[Segment]:
        out: list[Segment] = []
        prev = -math.inf
        n = self.n0
        while True:
            t = float(self.point_fn(n))
            if t <= prev:
                raise SchemaError("point sequence must be strictly increasing")
            out.append((t, t))
            prev = t
            if t > bound:
                break
            n += 1
            if n - self.n0 > 10_000_000:
                raise SchemaError("point sequence materialization exceeds guard")
        return out

    def gap_sup(self) -> float:
        return self._gap_sup

    def descriptor(self) -> dict:
        return {"kind": "sequence", "name": self.name or "<callable>"}


class RandomSyndetic:
    """Seeded random scale mixing isolated points and short dense intervals.

    Gaps are drawn from ``[0.1, 1.0] * mu_max``; dense intervals of length
    0.3..1.0 appear with probability ``dense_prob``.  Regeneration from the
    seed is deterministic, so repeated materializations agree on the prefix.
    """

    def __init__(self, seed: int, mu_max: float = 1.5, dense_prob: float = 0.25):
        if mu_max <= 0:
            raise SchemaError("mu_max must be positive")
        self.seed = int(seed)
        self.mu_max = float(mu_max)
        self.dense_prob = float(dense_prob)
        self._cache_bound = -math.inf
        self._cache: list[Segment] = []

    def segments_upto(self, bound: float) -> list[Segment]:
        if bound <= self._cache_bound:
            return list(self._cache)
        rng = np.random.default_rng(self.seed)
        out: list[Segment] = []
        t = 0.0
        while True:
            if rng.random() < self.dense_prob:
                length = rng.uniform(0.3, 1.0)
                out.append((t, t + length))
                t += length
            else:
                out.append((t, t))
            done = t > bound
            t += rng.uniform(0.1, 1.0) * self.mu_max
            if done:
                break
        self._cache_bound = bound
        self._cache = out
        return list(out)

    def gap_sup(self) -> float:
        return self.mu_max

    def descriptor(self) -> dict:
        return {"kind": "random-syndetic", "seed": self.seed, "mu_max": self.mu_max}


class TimeScale:
    """Canonical closed subset of the reals, queried through finite windows.

    Instances are immutable in their logical content; materialization of the
    extension rule is cached internally.
    """

    def __init__(self, segments: Iterable[Segment], extension=None, name: str | None = None):
        self.segments = canonicalize(segments)
        self.extension = extension
        self.name = name
        if extension is not None and math.isinf(self.segments[-1][1]):
            raise SchemaError("extension rule cannot follow an unbounded segment")
        self._mat = list(self.segments)
        # force the first query to materialize when a tail rule is present
        self._mat_bound = self.segments[-1][1] if extension is None else -math.inf
        self._lefts = np.array([s[0] for s in self._mat])
        self._rights = np.array([s[1] for s in self._mat])

    # -- materialization -------------------------------------------------

    def _materialize(self, bound: float) -> None:
        if self.extension is None or bound <= self._mat_bound:
            return
        tail = self.extension.segments_upto(bound)
        merged = canonicalize(list(self.segments) + tail)
        self._mat = list(merged)
        self._mat_bound = bound
        self._lefts = np.array([s[0] for s in self._mat])
        self._rights = np.array([s[1] for s in self._mat])

    def segments_in(self, a: float, b: float) -> list[Segment]:
        """Segments of the scale intersected with the closed window [a, b]."""
        self._materialize(b)
        out = []
        for l, r in self._mat:
            if r < a - EPS or l > b + EPS:
                continue
            out.append((max(l, a), min(r, b)))
        return out

    # -- point queries ---------------------------------------------------

    def _locate(self, t: float) -> int:
        self._materialize(t)
        i = int(np.searchsorted(self._lefts, t + EPS)) - 1
        if i < 0 or t > self._rights[i] + EPS:
            raise NotInScaleError(f"t = {t} is not in the time scale")
        return i

    def contains(self, t: float) -> bool:
        try:
            self._locate(t)
            return True
        except NotInScaleError:
            return False

    def sigma(self, t: float) -> float:
        """Forward jump: least scale point strictly after t, or t at the maximum."""
        i = self._locate(t)
        l, r = self._mat[i]
        if t < r - EPS:
            return t
        if i + 1 < len(self._mat):
            return self._mat[i + 1][0]
        return t

    def rho(self, t: float) -> float:
        """Backward jump: greatest scale point strictly before t, or t at the minimum."""
        i = self._locate(t)
        l, r = self._mat[i]
        if t > l + EPS:
            return t
        if i > 0:
            return self._mat[i - 1][1]
        return t

    def mu(self, t: float) -> float:
        return self.sigma(t) - t

    def mu_vec(self, points: np.ndarray) -> np.ndarray:
        """Vectorized graininess for points already known to lie in the scale."""
        self._materialize(float(points[-1]))
        idx = np.searchsorted(self._lefts, points + EPS) - 1
        rights = self._rights[idx]
        next_left = np.append(self._lefts[1:], math.inf)[idx]
        at_right = points >= rights - EPS
        has_next = np.isfinite(next_left)
        return np.where(at_right & has_next, next_left - points, 0.0)

    def classify(self, t: float) -> tuple[str, str]:
        right = RIGHT_SCATTERED if self.mu(t) > EPS else RIGHT_DENSE
        left = LEFT_SCATTERED if t - self.rho(t) > EPS else LEFT_DENSE
        return right, left

    # -- global structure ------------------------------------------------

    @property
    def inf_t(self) -> float:
        return self.segments[0][0]

    def sup_t(self) -> float:
        if self.extension is not None:
            return math.inf
        return self.segments[-1][1]

    def mu_star(self, window: tuple[float, float] | None = None) -> float:
        """Max gap.  Windowed: internal gaps of the clipped scale.  Without a
        window the encoded generator determines the supremum."""
        if window is not None:
            segs = self.segments_in(*window)
            gaps = [segs[i + 1][0] - segs[i][1] for i in range(len(segs) - 1)]
            return max(gaps, default=0.0)
        canon_gaps = [self.segments[i + 1][0] - self.segments[i][1]
                      for i in range(len(self.segments) - 1)]
        if self.extension is None:
            return max(canon_gaps, default=0.0)
        tail_sup = self.extension.gap_sup()
        if math.isinf(tail_sup):
            return math.inf
        # include the junction between the canonical part and the pattern
        end = self.segments[-1][1]
        span = 3 * getattr(self.extension, "period", tail_sup + 1.0)
        probe = self.mu_star(window=(self.inf_t, end + span))
        return max(max(canon_gaps, default=0.0), tail_sup, probe)

    def is_syndetic(self) -> bool:
        return math.isfinite(self.mu_star())

    def nu_star(self) -> float:
        m = self.mu_star()
        if m == 0.0:
            return math.inf
        return 1.0 / m

    def descriptor(self) -> dict:
        d: dict = {"segments": [list(s) for s in self.segments]}
        if self.extension is not None:
            d["pattern"] = self.extension.descriptor()
        if self.name:
            d["name"] = self.name
        return d

    def __repr__(self) -> str:  # pragma: no cover
        return f"TimeScale({self.name or self.segments}, extension={self.extension})"


# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True, eq=False)
class Grid:
    """Finite ordered sampling of a time-scale window.

    ``mus`` holds the scale graininess at each sample; a point is
    right-scattered on the grid iff its graininess is positive.  Consecutive
    dense samples differ by at most ``h``.
    """

    scale: TimeScale
    points: np.ndarray
    mus: np.ndarray
    h: float
    window: tuple[float, float]

    @property
    def m(self) -> int:
        return len(self.points)

    @property
    def scattered(self) -> np.ndarray:
        return self.mus > EPS

    @property
    def kinds(self) -> list[str]:
        return [RIGHT_SCATTERED if s else "dense-sample" for s in self.scattered]

    def index_of(self, t: float) -> int:
        i = int(np.searchsorted(self.points, t))
        for j in (i - 1, i, i + 1):
            if 0 <= j < len(self.points) and abs(self.points[j] - t) <= 1e-9 * max(1.0, abs(t)) + EPS:
                return j
        raise NotOnGridError(f"t = {t} is not a grid point")

    def step_dts(self) -> np.ndarray:
        return np.diff(self.points)

    def __len__(self) -> int:
        return len(self.points)


def build_grid(scale: TimeScale, window: tuple[float, float], h: float = 0.1) -> Grid:
    """Sample ``scale`` over ``window``; every scattered point in the window
    appears exactly once, dense intervals are subdivided into steps <= h."""
    a, b = float(window[0]), float(window[1])
    if not (h > 0):
        raise SchemaError("h must be positive")
    if math.isinf(b):
        raise SchemaError("window must be bounded; unbounded scales are truncated explicitly")
    if b < a:
        raise SchemaError("empty window")
    segs = scale.segments_in(a, b)
    if not segs:
        raise SchemaError("window does not intersect the time scale")
    pts: list[float] = []
    for l, r in segs:
        if r - l <= EPS:
            pts.append(l)
        else:
            n = max(1, int(math.ceil((r - l) / h - 1e-9)))
            pts.extend(np.linspace(l, r, n + 1).tolist())
    points = np.array(pts)
    keep = np.concatenate([[True], np.diff(points) > EPS])
    points = points[keep]
    mus = scale.mu_vec(points)
    return Grid(scale=scale, points=points, mus=mus, h=float(h), window=(points[0], points[-1]))


# ---------------------------------------------------------------------------
# delta calculus on grids


def _sample_values(f, grid: Grid) -> np.ndarray:
    if callable(f):
        return np.array([np.asarray(f(t), dtype=float) for t in grid.points])
    v = np.asarray(f, dtype=float)
    if len(v) != grid.m:
        raise SchemaError("sampled values do not match the grid length")
    return v


def delta_integral(f, a: float, b: float, grid: Grid) -> float | np.ndarray:
    """Delta integral over [a, b]: exact scattered sums plus composite
    trapezoid on dense runs.  Endpoints must be grid points."""
    i, j = grid.index_of(a), grid.index_of(b)
    if j < i:
        raise SchemaError("b must not precede a")
    fv = _sample_values(f, grid)
    mus = grid.mus[i:j]
    dts = np.diff(grid.points[i:j + 1])
    scattered = mus > EPS
    lo, hi = fv[i:j], fv[i + 1:j + 1]
    shape_tail = (1,) * (fv.ndim - 1)
    w_sc = np.where(scattered, mus, 0.0).reshape(-1, *shape_tail)
    w_tr = np.where(scattered, 0.0, dts).reshape(-1, *shape_tail)
    total = (w_sc * lo).sum(axis=0) + (0.5 * w_tr * (lo + hi)).sum(axis=0)
    return float(total) if np.ndim(total) == 0 else total


def _node_derivative(ts: Sequence[float], vals: np.ndarray, t: float) -> np.ndarray:
    """Derivative at t of the Lagrange interpolant through (ts, vals)."""
    k = len(ts)
    out = np.zeros_like(np.asarray(vals[0], dtype=float))
    for i in range(k):
        w = 0.0
        for j in range(k):
            if j == i:
                continue
            p = 1.0
            for l in range(k):
                if l in (i, j):
                    continue
                p *= (t - ts[l]) / (ts[i] - ts[l])
            w += p / (ts[i] - ts[j])
        out = out + w * np.asarray(vals[i], dtype=float)
    return out


def _dense_run(grid: Grid, i: int) -> tuple[int, int]:
    """Indices [lo, hi] of the maximal dense run of samples containing i.

    A run is broken after any scattered point: the sample following it lies
    across a gap.
    """
    lo = i
    while lo > 0 and grid.mus[lo - 1] <= EPS:
        lo -= 1
    hi = i
    while hi < grid.m - 1 and grid.mus[hi] <= EPS:
        hi += 1
    return lo, hi


def delta_derivative(f, t: float, grid: Grid, order: int = 2) -> float | np.ndarray:
    """Numerical delta derivative at a grid point.

    Right-scattered points use the exact difference quotient
    ``(f(sigma(t)) - f(t)) / mu(t)``; right-dense points use a central (or
    one-sided) finite difference of the requested order on the dense run.
    """
    fv = _sample_values(f, grid)
    i = grid.index_of(t)
    if grid.mus[i] > EPS:
        if i + 1 >= grid.m or abs(grid.points[i + 1] - (t + grid.mus[i])) > 1e-9 * max(1.0, abs(t)):
            raise StencilError("sigma(t) is outside the grid window")
        return (fv[i + 1] - fv[i]) / grid.mus[i]
    lo, hi = _dense_run(grid, i)
    half = order // 2
    width = order  # nodes = order + 1 gives order-`order` accuracy one-sided, order+ for centered
    left = max(lo, i - half)
    right = min(hi, left + width)
    left = max(lo, right - width)
    if right - left < 1:
        raise StencilError("no admissible dense stencil at the window edge")
    idx = range(left, right + 1)
    out = _node_derivative([grid.points[k] for k in idx], fv[left:right + 1], t)
    return float(out) if np.ndim(out) == 0 else out


def delta_derivative_curve(values: np.ndarray, grid: Grid, order: int = 2
                           ) -> tuple[np.ndarray, np.ndarray]:
    """Delta derivative at every grid point with an admissible stencil.

    Returns (derivatives, indices); points without a stencil (window edges)
    are skipped.
    """
    fv = np.asarray(values, dtype=float)
    idx: list[int] = []
    ders: list[np.ndarray] = []
    for i in range(grid.m):
        try:
            d = delta_derivative(fv, grid.points[i], grid, order=order)
        except StencilError:
            continue
        idx.append(i)
        ders.append(np.asarray(d, dtype=float))
    return np.array(ders), np.array(idx, dtype=int)


# ---------------------------------------------------------------------------
# built-in scales


def make_real() -> TimeScale:
    return TimeScale([(0.0, math.inf)], name="real")


def make_integers(h: float = 1.0) -> TimeScale:
    if h <= 0:
        raise SchemaError("integers step must be positive")
    return TimeScale([(0.0, 0.0)], PeriodicExtension([(h, h)], h), name=f"integers:{h:g}")


def make_union() -> TimeScale:
    """[0, 1] followed by the integers 2, 3, 4, ..."""
    return TimeScale([(0.0, 1.0)], PeriodicExtension([(2.0, 2.0)], 1.0), name="union")


def make_geometric(q: float = 2.0) -> TimeScale:
    if q <= 1:
        raise SchemaError("geometric ratio must exceed 1")
    return TimeScale([(1.0, 1.0)],
                     PointSequence(lambda n: q ** n, gap_sup=math.inf, n0=1, name=f"geometric:{q:g}"),
                     name=f"geometric:{q:g}")


def _tower_point(n: int) -> float:
    return 3.0 ** (3 ** n)


def make_tower3(nmax: int | None = None) -> TimeScale:
    """Points 3^(3^n); gaps grow without bound (non-syndetic)."""
    if nmax is None:
        return TimeScale([(3.0, 3.0)],
                         PointSequence(_tower_point, gap_sup=math.inf, n0=1, name="tower3"),
                         name="tower3")
    if nmax < 0:
        raise SchemaError("tower3 truncation must be >= 0")
    return TimeScale([(_tower_point(n),) * 2 for n in range(nmax + 1)], name=f"tower3:{nmax}")


def make_random_syndetic(seed: int, mu_max: float = 1.5) -> TimeScale:
    return TimeScale([(0.0, 0.0)], RandomSyndetic(seed, mu_max),
                     name=f"random-syndetic:{seed},{mu_max:g}")


_SCALE_DOCS = {
    "real": "the half line [0, inf); parameters: none",
    "integers": "h * {0, 1, 2, ...}; parameters: h (default 1)",
    "union": "[0, 1] followed by the integers >= 2; parameters: none",
    "geometric": "points q^n, n >= 0 (non-syndetic); parameters: q (default 2)",
    "tower3": "points 3^(3^n) (non-syndetic); parameters: optional truncation nmax",
    "random-syndetic": "seeded random mix of isolated points and dense intervals; "
                       "parameters: seed, mu_max (default 1.5)",
}


def scale_catalog() -> dict:
    return dict(_SCALE_DOCS)


def parse_scale(desc: str | dict) -> TimeScale:
    """Parse a named scale (``"integers:0.5"``) or a JSON descriptor."""
    if isinstance(desc, str):
        text = desc.strip()
        if text.startswith("{"):
            try:
                desc = json.loads(text)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"bad scale JSON: {exc}") from exc
        else:
            name, _, argstr = text.partition(":")
            args = [a for a in argstr.split(",") if a] if argstr else []
            try:
                if name == "real":
                    return make_real()
                if name == "integers":
                    return make_integers(float(args[0]) if args else 1.0)
                if name == "union":
                    return make_union()
                if name == "geometric":
                    return make_geometric(float(args[0]) if args else 2.0)
                if name == "tower3":
                    return make_tower3(int(args[0]) if args else None)
                if name == "random-syndetic":
                    seed = int(args[0]) if args else 0
                    mu_max = float(args[1]) if len(args) > 1 else 1.5
                    return make_random_syndetic(seed, mu_max)
            except (ValueError, IndexError) as exc:
                raise SchemaError(f"bad parameters for scale '{name}': {exc}") from exc
            raise SchemaError(f"unknown scale '{name}'")
    if not isinstance(desc, dict) or "segments" not in desc:
        raise SchemaError("scale descriptor must contain 'segments'")
    segments = [(float(s[0]), float(s[1])) for s in desc["segments"]]
    pattern = desc.get("pattern")
    extension = None
    if pattern is not None:
        kind = pattern.get("kind")
        if kind == "periodic":
            extension = PeriodicExtension([tuple(map(float, s)) for s in pattern["block"]],
                                          float(pattern["period"]))
        elif kind == "sequence":
            name = pattern.get("name", "")
            base = name.partition(":")[0]
            if base == "tower3":
                extension = PointSequence(_tower_point, math.inf, n0=1, name="tower3")
            elif base == "geometric":
                q = float(pattern.get("q", name.partition(":")[2] or 2.0))
                extension = PointSequence(lambda n: q ** n, math.inf, n0=1, name=f"geometric:{q:g}")
            else:
                raise SchemaError(f"unknown sequence pattern '{name}'")
        elif kind == "random-syndetic":
            extension = RandomSyndetic(int(pattern["seed"]), float(pattern.get("mu_max", 1.5)))
        else:
            raise SchemaError(f"unknown pattern kind '{kind}'")
    return TimeScale(segments, extension, name=desc.get("name"))
