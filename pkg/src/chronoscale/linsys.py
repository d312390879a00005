"""Linear dynamic systems x^Delta = A(t) x + f(t) on sampling grids.

Scattered steps use the exact affine update x(sigma(t)) = (E + mu A) x + mu f;
dense steps integrate the ODE with classical RK4 at the grid resolution.
The Cauchy matrix is the forward-propagated fundamental matrix normalized to
the identity at the anchor; column sets are cached per (system, grid, anchor).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import NotRegressiveError, SchemaError
from .timescale import EPS, Grid, delta_derivative_curve


@dataclass(frozen=True, eq=False)
class MatrixFunction:
    """Time-dependent n x n system matrix with a declared (or lazy) sup-norm bound."""

    n: int
    fn: Callable[[float], np.ndarray]
    bound: float | None = None

    @classmethod
    def constant(cls, A) -> "MatrixFunction":
        M = np.atleast_2d(np.asarray(A, dtype=float))
        if M.shape[0] != M.shape[1]:
            raise SchemaError("system matrix must be square")
        return cls(n=M.shape[0], fn=lambda t, _M=M: _M, bound=float(operator_norm(M)))

    def __call__(self, t: float) -> np.ndarray:
        M = np.atleast_2d(np.asarray(self.fn(t), dtype=float))
        if M.shape != (self.n, self.n):
            raise SchemaError(f"A({t}) has shape {M.shape}, expected ({self.n}, {self.n})")
        return M

    def sample(self, grid: Grid) -> np.ndarray:
        return np.array([self(t) for t in grid.points])


@dataclass(frozen=True, eq=False)
class Forcing:
    """Time-dependent n-vector right-hand side."""

    n: int
    fn: Callable[[float], np.ndarray]

    @classmethod
    def constant(cls, v) -> "Forcing":
        vec = np.atleast_1d(np.asarray(v, dtype=float))
        return cls(n=len(vec), fn=lambda t, _v=vec: _v)

    @classmethod
    def zero(cls, n: int) -> "Forcing":
        z = np.zeros(n)
        return cls(n=n, fn=lambda t, _z=z: _z)

    def __call__(self, t: float) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.fn(t), dtype=float))

    def sample(self, grid: Grid) -> np.ndarray:
        return np.array([self(t) for t in grid.points])


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Vector samples aligned with a grid."""

    grid: Grid
    samples: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.samples.shape[1]

    def value_at(self, t: float) -> np.ndarray:
        return self.samples[self.grid.index_of(t)]

    def component(self, k: int) -> np.ndarray:
        return self.samples[:, k]

    def sup_norm(self) -> float:
        return float(np.linalg.norm(self.samples, axis=1).max())


def _as_state(x0, n: int | None = None) -> np.ndarray:
    v = np.atleast_1d(np.asarray(x0, dtype=float))
    if n is not None and len(v) != n:
        raise SchemaError(f"state has length {len(v)}, expected {n}")
    return v


def _forcing_samples(f, grid: Grid, n: int) -> tuple[np.ndarray, Callable | None]:
    """Sampled forcing plus the callable (midpoint-capable) form when available."""
    if f is None:
        return np.zeros((grid.m, n)), None
    if isinstance(f, Forcing):
        return f.sample(grid), f
    if callable(f):
        fv = np.array([np.atleast_1d(np.asarray(f(t), dtype=float)) for t in grid.points])
        return fv, f
    fv = np.asarray(f, dtype=float)
    if fv.ndim == 1:
        fv = fv[:, None]
    if fv.shape != (grid.m, n):
        raise SchemaError(f"forcing samples have shape {fv.shape}, expected ({grid.m}, {n})")
    return fv, None


def _rk4_step(rhs, t: float, x: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(t, x)
    k2 = rhs(t + 0.5 * dt, x + 0.5 * dt * k1)
    k3 = rhs(t + 0.5 * dt, x + 0.5 * dt * k2)
    k4 = rhs(t + dt, x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_ivp(A: MatrixFunction, f, t0: float, x0, grid: Grid) -> Trajectory:
    """Forward initial-value solve from t0 = start of the grid."""
    if abs(grid.points[0] - t0) > 1e-9 * max(1.0, abs(t0)):
        raise SchemaError("grid must start at t0 (forward solving only)")
    x = _as_state(x0, A.n)
    fv, fcall = _forcing_samples(f, grid, A.n)
    out = np.empty((grid.m, A.n))
    out[0] = x
    for i in range(grid.m - 1):
        t = grid.points[i]
        mu = grid.mus[i]
        if mu > EPS:
            x = x + mu * (A(t) @ x + fv[i])
        else:
            dt = grid.points[i + 1] - t
            if fcall is not None:
                def rhs(s, y):
                    return A(s) @ y + np.atleast_1d(np.asarray(fcall(s), dtype=float))
            else:
                fmid = 0.5 * (fv[i] + fv[i + 1])

                def rhs(s, y, _t=t, _dt=dt, _i=i, _fm=fmid):
                    if abs(s - _t) < 1e-14:
                        return A(s) @ y + fv[_i]
                    if abs(s - (_t + _dt)) < 1e-14:
                        return A(s) @ y + fv[_i + 1]
                    return A(s) @ y + _fm
            x = _rk4_step(rhs, t, x, dt)
        out[i + 1] = x
    return Trajectory(grid=grid, samples=out)


def _rk4_homogeneous(A: MatrixFunction, t: float, X: np.ndarray, dt: float) -> np.ndarray:
    return _rk4_step(lambda s, Y: A(s) @ Y, t, X, dt)


@functools.lru_cache(maxsize=32)
def _fundamental(A: MatrixFunction, grid: Grid, i0: int) -> np.ndarray:
    """Phi(t_j, t_{i0}) for j = i0..m-1, stacked (m - i0, n, n)."""
    n = A.n
    X = np.eye(n)
    out = np.empty((grid.m - i0, n, n))
    out[0] = X
    for k, i in enumerate(range(i0, grid.m - 1)):
        t = grid.points[i]
        mu = grid.mus[i]
        if mu > EPS:
            X = X + mu * (A(t) @ X)
        else:
            X = _rk4_homogeneous(A, t, X, grid.points[i + 1] - t)
        out[k + 1] = X
    return out


def cauchy_matrix(A: MatrixFunction, t: float, s: float, grid: Grid) -> np.ndarray:
    """Phi(t, s) with Phi(s, s) = E; backward values exist only under regressivity."""
    i, j = grid.index_of(s), grid.index_of(t)
    if j >= i:
        return _fundamental(A, grid, i)[j - i].copy()
    F = _fundamental(A, grid, j)[i - j]
    try:
        return np.linalg.solve(F, np.eye(A.n))
    except np.linalg.LinAlgError as exc:
        raise NotRegressiveError(
            "backward Cauchy matrix undefined: the system is not regressive on the span"
        ) from exc


@dataclass(frozen=True)
class RegressivityReport:
    ok: bool
    first_failure: float | None
    min_abs_det: float


def regressive_check(A: MatrixFunction, grid: Grid, tol: float = 1e-12) -> RegressivityReport:
    """det(E + mu A) at every scattered grid point."""
    E = np.eye(A.n)
    min_det = np.inf
    first = None
    for t, mu in zip(grid.points, grid.mus):
        if mu <= EPS:
            continue
        d = abs(float(np.linalg.det(E + mu * A(t))))
        if d < min_det:
            min_det = d
        if d <= tol and first is None:
            first = float(t)
    if not np.isfinite(min_det):
        min_det = 1.0  # no scattered points
    return RegressivityReport(ok=first is None, first_failure=first, min_abs_det=min_det)


def variation_of_constants(A: MatrixFunction, f, t0: float, x0, grid: Grid) -> Trajectory:
    """x(t) = Phi(t, t0) x0 + integral of Phi(t, sigma(s)) f(s).

    The kernel integral is evaluated by quadrature (exact scattered terms,
    trapezoid on dense runs) with the kernel built from forward one-step maps,
    so no regressivity is required.
    """
    if abs(grid.points[0] - t0) > 1e-9 * max(1.0, abs(t0)):
        raise SchemaError("grid must start at t0")
    x0v = _as_state(x0, A.n)
    fv, _ = _forcing_samples(f, grid, A.n)
    X = _fundamental(A, grid, 0)
    R = np.zeros(A.n)
    out = np.empty((grid.m, A.n))
    out[0] = X[0] @ x0v
    for i in range(grid.m - 1):
        t = grid.points[i]
        mu = grid.mus[i]
        if mu > EPS:
            R = R + mu * (A(t) @ R)  # homogeneous push of accumulated pieces
            R = R + mu * fv[i]       # the scattered piece enters at sigma(t)
        else:
            dt = grid.points[i + 1] - t
            R = _rk4_homogeneous_vec(A, t, R + 0.5 * dt * fv[i], dt) + 0.5 * dt * fv[i + 1]
        out[i + 1] = X[i + 1] @ x0v + R
    return Trajectory(grid=grid, samples=out)


def _rk4_homogeneous_vec(A: MatrixFunction, t: float, x: np.ndarray, dt: float) -> np.ndarray:
    return _rk4_step(lambda s, y: A(s) @ y, t, x, dt)


def residual(traj: Trajectory, A: MatrixFunction, f=None, order: int = 4) -> float:
    """sup over the grid of ||x^Delta_numeric - A x - f||.

    Scattered points use the exact difference quotient; dense points use an
    order-4 stencil so that RK4 trajectories are not masked by differencing
    error.  Window-edge points without a stencil are skipped.
    """
    grid = traj.grid
    fv, _ = _forcing_samples(f, grid, A.n)
    ders, idx = delta_derivative_curve(traj.samples, grid, order=order)
    if len(idx) == 0:
        raise SchemaError("no admissible stencil anywhere on the grid")
    rhs = np.array([A(grid.points[i]) @ traj.samples[i] + fv[i] for i in idx])
    return float(np.linalg.norm(ders - rhs, axis=1).max())


# ---------------------------------------------------------------------------
# operator norms


def operator_norm(M: np.ndarray, iters: int = 50, tol: float = 1e-10) -> float:
    """Spectral norm by power iteration on M^T M (declared estimator)."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    n = M.shape[1]
    if n == 1:
        return float(np.abs(M).max())
    v = np.ones(n) + 1e-3 * np.arange(n)
    v /= np.linalg.norm(v)
    prev = 0.0
    G = M.T @ M
    for _ in range(iters):
        w = G @ v
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            return 0.0
        v = w / lam
        if abs(lam - prev) <= tol * max(1.0, lam):
            break
        prev = lam
    return float(np.sqrt(lam))


def batched_spectral_norm(stack: np.ndarray) -> np.ndarray:
    """Spectral norms of a (m, n, n) stack; closed form for n <= 2."""
    stack = np.asarray(stack, dtype=float)
    m, n, _ = stack.shape
    if n == 1:
        return np.abs(stack[:, 0, 0])
    if n == 2:
        fr = (stack ** 2).sum(axis=(1, 2))
        det = stack[:, 0, 0] * stack[:, 1, 1] - stack[:, 0, 1] * stack[:, 1, 0]
        disc = np.sqrt(np.maximum(fr * fr - 4.0 * det * det, 0.0))
        return np.sqrt(0.5 * (fr + disc))
    G = np.einsum("mji,mjk->mik", stack, stack)
    v = np.ones((m, n)) + 1e-3 * np.arange(n)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    lam = np.zeros(m)
    for _ in range(50):
        w = np.einsum("mij,mj->mi", G, v)
        lam = np.linalg.norm(w, axis=1)
        nz = lam > 0
        v[nz] = w[nz] / lam[nz, None]
    return np.sqrt(lam)


def matrix_sup_norm(A: MatrixFunction, grid: Grid) -> float:
    """Estimated sup over the grid of the operator 2-norm of A(t)."""
    return float(max(operator_norm(A(t)) for t in grid.points))
