"""Growth-rate estimation: classical and time-scale Lyapunov exponents,
exact-exponent tests, the determinant trace surrogate, and the regularity
defect of fundamental systems.

All estimators work on log-magnitude curves so that exponentials over long
windows never overflow.  A limsup cannot be computed from a finite window;
the declared surrogate for "ratio tends to zero" is: the windowed maxima are
non-increasing over the tail AND the last-quarter maximum sits three decades
below the window maximum.  Resolution-delta detection therefore needs windows
of span roughly ``ln(1e3) * (1 + mu* a) / delta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (IndeterminateError, NonSyndeticError, NotRegressiveError,
                     RefusalError, SchemaError)
from .hilger import ScalarCoefficient, exp_curve, ominus, oplus
from .linsys import MatrixFunction, Trajectory
from .timescale import EPS, Grid

_DROP = math.log(1e3)       # required decades below the window max
_TREND_MIN = 1e-6           # minimal total log-drop to call a trend


@dataclass(frozen=True, eq=False)
class LogSamples:
    """log|f| sampled on a grid (-inf marks zeros); overflow-safe trajectory stand-in."""

    grid: Grid
    logabs: np.ndarray


@dataclass(frozen=True)
class ExponentEstimate:
    value: float
    band: float
    method: str
    window: tuple[float, float]


def _log_curve(f, grid: Grid | None = None) -> tuple[Grid, np.ndarray]:
    if isinstance(f, LogSamples):
        return f.grid, np.asarray(f.logabs, dtype=float)
    if isinstance(f, Trajectory):
        norms = np.linalg.norm(np.atleast_2d(f.samples.T).T, axis=1)
        with np.errstate(divide="ignore"):
            return f.grid, np.log(norms)
    if grid is None:
        raise SchemaError("a grid is required for raw samples")
    arr = np.asarray(f, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    with np.errstate(divide="ignore"):
        return grid, np.log(np.linalg.norm(arr, axis=1))


def classic_exponent(f, grid: Grid | None = None) -> ExponentEstimate:
    """limsup surrogate: max of log|f(t)| / t over the last third of the window."""
    grid, logf = _log_curve(f, grid)
    pts = grid.points
    span = pts[-1] - pts[0]
    tail = (pts >= pts[0] + 2.0 * span / 3.0) & (pts > EPS)
    vals = logf[tail] / pts[tail]
    finite = vals[np.isfinite(vals)]
    if len(finite) < 2:
        raise SchemaError("f vanishes (or is unsampled) on the tail window")
    value = float(finite.max())
    band = float(0.5 * (finite.max() - finite.min()))
    return ExponentEstimate(value=value, band=band, method="log-ratio",
                            window=(float(pts[0]), float(pts[-1])))


def _chunk_maxima(vals: np.ndarray, pts: np.ndarray, chunks: int) -> np.ndarray:
    edges = np.linspace(pts[0], pts[-1], chunks + 1)
    out = np.full(chunks, -np.inf)
    idx = np.clip(np.searchsorted(edges, pts, side="right") - 1, 0, chunks - 1)
    for k in range(chunks):
        sel = vals[idx == k]
        if len(sel):
            out[k] = sel.max()
    return out


def tends_to_zero(logratio: np.ndarray, pts: np.ndarray, chunks: int = 8) -> bool:
    """Finite-window surrogate for ratio -> 0 (ratio given in log scale)."""
    finite = np.isfinite(logratio)
    if not finite.any():
        return True  # identically zero ratio
    top = logratio[finite].max()
    span = pts[-1] - pts[0]
    last_q = pts >= pts[0] + 0.75 * span
    tail_vals = logratio[last_q & finite]
    tail_max = tail_vals.max() if len(tail_vals) else -np.inf
    if not (tail_max <= top - _DROP):
        return False
    m = _chunk_maxima(np.where(finite, logratio, -np.inf), pts, chunks)
    half = m[chunks // 2:]
    half = half[np.isfinite(half)]
    if len(half) < 2:
        return True  # tail already vanished entirely
    non_increasing = bool(np.all(np.diff(half) <= 1e-9))
    return non_increasing and (half[-1] <= half[0] - _TREND_MIN)


def tends_to_infinity(logratio: np.ndarray, pts: np.ndarray, chunks: int = 8) -> bool:
    finite = np.isfinite(logratio)
    if not finite.any():
        return False
    return tends_to_zero(np.where(finite, -logratio, -np.inf), pts, chunks)


def _const_exp_log(a: float, grid: Grid) -> np.ndarray:
    """log e_a(t, t_start) along the grid for a constant rate a."""
    mus = grid.mus[:-1]
    dts = grid.step_dts()
    scat = grid.scattered[:-1]
    w = 1.0 + mus * a
    if (w[scat] <= 0).any():
        raise NotRegressiveError(f"constant rate {a} is not positively regressive on the grid")
    steps = np.where(scat, np.log1p(mus * a), a * dts)
    return np.concatenate([[0.0], np.cumsum(steps)])


def ts_exponent(f, t0: float | None = None, *, a_max: float = 4.0,
                resolution: float = 1e-3, chunks: int = 8) -> ExponentEstimate:
    """Time-scale Lyapunov exponent by bisection on the comparison rate.

    Finds (to ``resolution``) the least constant a such that f(t)/e_a(t, t0)
    passes the tends-to-zero surrogate; saturates at -nu* when every
    admissible rate dominates f.
    """
    grid, logf = _log_curve(f)
    scale = grid.scale
    if not scale.is_syndetic():
        raise NonSyndeticError("Lyapunov exponents need uniformly bounded gaps")
    nu = scale.nu_star()
    lo = max(-a_max, -nu + resolution)
    hi = a_max
    pts = grid.points
    i0 = grid.index_of(t0) if t0 is not None else 0

    def decays(a: float) -> bool:
        la = _const_exp_log(a, grid)
        return tends_to_zero(logf - (la - la[i0]), pts, chunks)

    window = (float(pts[0]), float(pts[-1]))
    if decays(lo):
        if math.isfinite(nu):
            return ExponentEstimate(value=-nu, band=resolution,
                                    method="bisection-saturated", window=window)
        return ExponentEstimate(value=lo, band=math.inf,
                                method="bisection-lower-saturated", window=window)
    if not decays(hi):
        raise RefusalError(f"f grows faster than e_a for every a <= {a_max}; raise a_max")
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if decays(mid):
            hi = mid
        else:
            lo = mid
    return ExponentEstimate(value=hi, band=max(hi - lo, resolution),
                            method="bisection-on-a", window=window)


def exact_exponent_check(f, alpha: float, eps: float) -> bool | None:
    """Both-limit test for an exact exponent; None means the window is inconclusive."""
    if eps <= 0:
        raise SchemaError("eps must be positive")
    grid, logf = _log_curve(f)
    pts = grid.points
    up = oplus(alpha, eps, grid)
    down = ominus(alpha, eps, grid)
    _, log_up = exp_curve(up, pts[0], grid, log=True)
    _, log_dn = exp_curve(down, pts[0], grid, log=True)
    r1 = logf - log_up
    r2 = logf - log_dn
    if tends_to_zero(r1, pts) and tends_to_infinity(r2, pts):
        return True
    if tends_to_infinity(r1, pts) or tends_to_zero(r2, pts):
        return False
    return None


def alpha_function(A: MatrixFunction, t: float, grid: Grid,
                   paper_literal: bool = False) -> float:
    """Trace surrogate: (det(E + mu A) - 1) / mu at scattered points, trace at
    dense points.  ``paper_literal`` evaluates det(E + mu A) / mu instead (the
    variant without the continuous mu -> 0 limit), for comparison."""
    i = grid.index_of(t)
    mu = grid.mus[i]
    M = A(grid.points[i])
    if mu <= EPS:
        return float(np.trace(M))
    d = float(np.linalg.det(np.eye(A.n) + mu * M))
    if paper_literal:
        return d / mu
    return (d - 1.0) / mu


def alpha_coefficient(A: MatrixFunction, grid: Grid,
                      paper_literal: bool = False) -> ScalarCoefficient:
    vals = np.array([alpha_function(A, t, grid, paper_literal) for t in grid.points])
    return ScalarCoefficient(grid, vals)


def fundamental_exponents(columns, **ts_kwargs) -> tuple[list[ExponentEstimate], float]:
    """Per-column time-scale exponents of a fundamental system and their sum."""
    ests = sorted((ts_exponent(c, **ts_kwargs) for c in columns), key=lambda e: e.value)
    return ests, float(sum(e.value for e in ests))


@dataclass(frozen=True)
class DefectReport:
    defect: float
    band: float
    lhs: ExponentEstimate
    rhs: ExponentEstimate
    column_estimates: tuple


def regularity_defect(A: MatrixFunction, columns, grid: Grid | None = None,
                      **ts_kwargs) -> DefectReport:
    """Exponent of e_{a1 (+) ... (+) an} (a_k = column exponents) minus the
    exponent of e_alpha; nonnegative within the band for any system."""
    if grid is None:
        first = columns[0]
        grid = first.grid
    ests = [ts_exponent(c, **ts_kwargs) for c in columns]
    fold = np.full(grid.m, ests[0].value)
    for e in ests[1:]:
        fold = fold + e.value + grid.mus * fold * e.value
    lhs_coef = ScalarCoefficient(grid, fold)
    sgn, lhs_log = exp_curve(lhs_coef, grid.points[0], grid, log=True)
    if (sgn <= 0).any():
        raise IndeterminateError("folded exponential hits the degenerate branch")
    lhs = ts_exponent(LogSamples(grid, lhs_log), **ts_kwargs)
    acoef = alpha_coefficient(A, grid)
    sgn2, rhs_log = exp_curve(acoef, grid.points[0], grid, log=True)
    if (sgn2 <= 0).any():
        raise IndeterminateError("trace-surrogate exponential hits the degenerate branch")
    rhs = ts_exponent(LogSamples(grid, rhs_log), **ts_kwargs)
    band = lhs.band + rhs.band + float(sum(e.band for e in ests))
    return DefectReport(defect=lhs.value - rhs.value, band=band, lhs=lhs, rhs=rhs,
                        column_estimates=tuple(ests))
