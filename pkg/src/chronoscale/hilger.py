"""Cylinder transform, circle-plus coefficient algebra, regressivity classes,
and the time-scale exponential.

The exponential is evaluated through per-step growth factors along a grid:
an exact factor ``1 + mu(t) p(t)`` across every scattered step and
``exp(trapezoid of p)`` across every dense step.  The product form reproduces
sign-alternating exponentials (factors < 0) and the degenerate case
(a factor of exactly 0 annihilates everything after it) without complex
arithmetic.  Log-scale curves are provided for growth-rate estimation on
long windows where the raw values overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotRegressiveError, SchemaError
from .timescale import EPS, Grid

NOT_REGRESSIVE = "not-regressive"
REGRESSIVE = "R"
POSITIVELY_REGRESSIVE = "R+"
UNIFORMLY_POSITIVELY_REGRESSIVE = "UR+"

_UR_WITNESS = 1e-10


def cylinder(z: float, h: float) -> float:
    """xi_h(z) = log(1 + z h) / h for h > 0, with xi_0(z) = z (real branch)."""
    if h < 0:
        raise SchemaError("cylinder step must be nonnegative")
    if h == 0:
        return float(z)
    w = 1.0 + z * h
    if w <= 0:
        raise NotRegressiveError(f"1 + z*h = {w} <= 0: z is not positively regressive at step {h}")
    return math.log(w) / h


@dataclass(frozen=True, eq=False)
class ScalarCoefficient:
    """A scalar coefficient sampled on a grid."""

    grid: Grid
    values: np.ndarray

    @classmethod
    def sample(cls, p, grid: Grid) -> "ScalarCoefficient":
        if isinstance(p, ScalarCoefficient):
            if p.grid is not grid:
                raise SchemaError("coefficient sampled on a different grid")
            return p
        if callable(p):
            return cls(grid, np.array([float(p(t)) for t in grid.points]))
        arr = np.asarray(p, dtype=float)
        if arr.ndim == 0:
            return cls(grid, np.full(grid.m, float(arr)))
        if arr.shape != (grid.m,):
            raise SchemaError("coefficient samples do not match the grid")
        return cls(grid, arr)


def _two(p, q, grid: Grid | None) -> tuple[ScalarCoefficient, ScalarCoefficient, Grid]:
    if grid is None:
        grid = p.grid if isinstance(p, ScalarCoefficient) else q.grid
    return ScalarCoefficient.sample(p, grid), ScalarCoefficient.sample(q, grid), grid


def oplus(p, q, grid: Grid | None = None) -> ScalarCoefficient:
    """(p + q + mu p q) pointwise."""
    pc, qc, grid = _two(p, q, grid)
    return ScalarCoefficient(grid, pc.values + qc.values + grid.mus * pc.values * qc.values)


def ominus(p, q, grid: Grid | None = None) -> ScalarCoefficient:
    """(p - q) / (1 + mu q) pointwise; q must be regressive on the grid."""
    pc, qc, grid = _two(p, q, grid)
    denom = 1.0 + grid.mus * qc.values
    bad = np.abs(denom) <= EPS
    if bad.any():
        t = grid.points[int(np.argmax(bad))]
        raise NotRegressiveError(f"1 + mu*q vanishes at t = {t}")
    return ScalarCoefficient(grid, (pc.values - qc.values) / denom)


def neg(q, grid: Grid | None = None) -> ScalarCoefficient:
    """Circle-minus inverse: -q / (1 + mu q)."""
    return ominus(0.0, q, grid)


@dataclass(frozen=True)
class RegressivityClass:
    kind: str
    witness: float


def regressivity_class(p, grid: Grid) -> RegressivityClass:
    """Classify 1 + mu p over the grid; witness is its minimum."""
    pc = ScalarCoefficient.sample(p, grid)
    w = 1.0 + grid.mus * pc.values
    wmin = float(w.min())
    if np.abs(w).min() <= EPS:
        return RegressivityClass(NOT_REGRESSIVE, wmin)
    if wmin < 0:
        return RegressivityClass(REGRESSIVE, wmin)
    if wmin > _UR_WITNESS:
        return RegressivityClass(UNIFORMLY_POSITIVELY_REGRESSIVE, wmin)
    return RegressivityClass(POSITIVELY_REGRESSIVE, wmin)


def _coeff(p, grid: Grid | None) -> ScalarCoefficient:
    if isinstance(p, ScalarCoefficient):
        return p
    if grid is None:
        raise SchemaError("a grid is required to sample this coefficient")
    return ScalarCoefficient.sample(p, grid)


def growth_factors(p, grid: Grid | None = None) -> np.ndarray:
    """Per-step multipliers of e_p along the grid (length m - 1)."""
    pc = _coeff(p, grid)
    grid = pc.grid
    v = pc.values
    dts = grid.step_dts()
    scattered = grid.scattered[:-1]
    dense = np.exp(0.5 * (v[:-1] + v[1:]) * dts)
    jump = 1.0 + grid.mus[:-1] * v[:-1]
    return np.where(scattered, jump, dense)


def log_growth_steps(p, grid: Grid | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Per-step (sign, log|factor|); log is -inf across a degenerate step."""
    pc = _coeff(p, grid)
    grid = pc.grid
    v = pc.values
    dts = grid.step_dts()
    scattered = grid.scattered[:-1]
    jump = 1.0 + grid.mus[:-1] * v[:-1]
    with np.errstate(divide="ignore"):
        logj = np.log(np.abs(jump))
    logs = np.where(scattered, logj, 0.5 * (v[:-1] + v[1:]) * dts)
    signs = np.where(scattered, np.sign(jump), 1.0)
    return signs, logs


def hilger_exp(p, t: float, s: float, grid: Grid) -> float:
    """e_p(t, s) evaluated along the grid.

    Forward (t >= s) multiplies the step factors; backward evaluation inverts
    the product and requires p regressive across the span.
    """
    pc = ScalarCoefficient.sample(p, grid)
    i, j = grid.index_of(s), grid.index_of(t)
    factors = growth_factors(pc)
    if j >= i:
        return float(np.prod(factors[i:j])) if j > i else 1.0
    span = factors[j:i]
    if np.abs(span).min(initial=np.inf) <= EPS:
        raise NotRegressiveError("backward evaluation across a degenerate step")
    return float(1.0 / np.prod(span))


def exp_curve(p, s: float, grid: Grid, log: bool = False):
    """e_p(., s) over the whole grid.

    With ``log=True`` returns ``(signs, logabs)`` suitable for growth-rate
    estimation (no overflow).  Points before ``s`` that lie behind a
    degenerate step come out as NaN: the backward value does not exist.
    """
    pc = ScalarCoefficient.sample(p, grid)
    i0 = grid.index_of(s)
    signs, logs = log_growth_steps(pc)
    m = grid.m
    logabs = np.zeros(m)
    sgn = np.ones(m)
    if i0 < m - 1:
        logabs[i0 + 1:] = np.cumsum(logs[i0:])
        sgn[i0 + 1:] = np.cumprod(signs[i0:])
    if i0 > 0:
        rev_sum = np.cumsum(logs[:i0][::-1])[::-1]
        rev_sgn = np.cumprod(signs[:i0][::-1])[::-1]
        logabs[:i0] = -rev_sum
        sgn[:i0] = rev_sgn
        invalid = rev_sgn == 0.0  # backward across a degenerate step
        logabs[:i0][invalid] = np.nan
        sgn[:i0][invalid] = np.nan
    if log:
        return sgn, logabs
    with np.errstate(over="ignore", invalid="ignore"):
        vals = sgn * np.exp(logabs)
    return vals
