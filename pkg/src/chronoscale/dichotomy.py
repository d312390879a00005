"""Projection families and Green-type operators.

The Green operator maps a forcing f to

    (L f)(t) = int_{t-}^{t} Phi(t, sigma(s)) P(s) f(s) Ds
             - int_{t}^{t+} Phi(t, sigma(s)) Q(s) f(s) Ds,

which solves x^Delta = A x + f for any projection family P + Q = E.  It is
evaluated with two sweeps: the P-part solves u^Delta = A u + P f forward from
zero, the Q-part solves v^Delta = A v - Q f backward from zero; the result is
u - v.  When the scale continues past the requested window, the backward sweep
runs on an internally padded grid and the truncation error on the reported
window is certified by geometric extrapolation of successive terminal-point
extensions; the certificate fails loudly when the Q-directions do not decay
backward (no dichotomy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (DivergenceError, NoSplittingError, NotRegressiveError,
                     SchemaError, TailNotNegligibleError)
from .linsys import (Forcing, MatrixFunction, Trajectory, _forcing_samples,
                     _fundamental, _rk4_step, batched_spectral_norm, operator_norm)
from .timescale import EPS, Grid, TimeScale, build_grid

_OVERFLOW_GUARD = 1e15


@dataclass(frozen=True, eq=False)
class ProjectionFamily:
    """Uniformly bounded family t -> P(t) with complement Q(t) = E - P(t)."""

    n: int
    fn: Callable[[float], np.ndarray]
    bound: float | None = None

    @classmethod
    def constant(cls, P) -> "ProjectionFamily":
        M = np.atleast_2d(np.asarray(P, dtype=float))
        if M.shape[0] != M.shape[1]:
            raise SchemaError("projection must be square")
        return cls(n=M.shape[0], fn=lambda t, _M=M: _M, bound=float(operator_norm(M)))

    def __call__(self, t: float) -> np.ndarray:
        return np.atleast_2d(np.asarray(self.fn(t), dtype=float))

    def sample(self, grid: Grid) -> np.ndarray:
        return np.array([self(t) for t in grid.points])

    def validate(self, grid: Grid, tol: float = 1e-10) -> float:
        """Check idempotency P(t)^2 = P(t) on the grid; returns the worst defect."""
        Pv = self.sample(grid)
        defect = float(batched_spectral_norm(np.matmul(Pv, Pv) - Pv).max())
        if defect > tol:
            raise SchemaError(f"projection family is not idempotent (defect {defect:g})")
        return defect


class GreenOperator:
    """A linear system, a projection family, and a finite reporting window.

    The reporting grid is rebuilt as a prefix of the internally padded grid, so
    trajectories returned by :func:`green_apply` live on ``op.grid`` (equal in
    content to the grid the caller supplied up to the shared window).
    """

    def __init__(self, system: MatrixFunction, projections: ProjectionFamily,
                 grid: Grid, tail_tol: float = 1e-8, pad_grid: Grid | None = None):
        if system.n != projections.n:
            raise SchemaError("system and projection dimensions differ")
        self.system = system
        self.projections = projections
        self.tail_tol = float(tail_tol)
        scale = grid.scale
        b = float(grid.points[-1])
        self.truncated = scale.sup_t() > b + EPS
        Pv = projections.sample(grid)
        E = np.eye(system.n)
        self.q_active = bool(batched_spectral_norm(E[None] - Pv).max() > 1e-14)
        if pad_grid is not None:
            self.pad_grid = pad_grid
        elif self.truncated and self.q_active:
            self.pad_grid = self._pick_pad(scale, grid, b)
        else:
            self.pad_grid = grid
        pts = self.pad_grid.points
        self.report_len = int(np.searchsorted(pts, b + 1e-9 * max(1.0, abs(b)) + EPS))
        if self.report_len < len(pts):
            self.grid = Grid(scale=scale, points=pts[:self.report_len],
                             mus=self.pad_grid.mus[:self.report_len],
                             h=grid.h, window=(pts[0], pts[self.report_len - 1]))
        else:
            self.grid = self.pad_grid
        self._Pv = projections.sample(self.pad_grid)
        self._Qv = np.eye(system.n)[None] - self._Pv
        self.window = (float(pts[0]), b)

    def _pick_pad(self, scale: TimeScale, grid: Grid, b: float) -> Grid:
        span = max(b - grid.points[0], 1.0)
        pad = 0.5 * span
        best = None
        while pad <= 4.0 * span + EPS:
            pad_grid = build_grid(scale, (grid.points[0], b + pad), grid.h)
            best = pad_grid
            try:
                tail, _ = self._certify(pad_grid, b, np.ones((len(pad_grid), self.system.n)))
            except (TailNotNegligibleError, NotRegressiveError, DivergenceError):
                tail = math.inf
            if tail <= self.tail_tol:
                return pad_grid
            pad *= 2.0
        return best

    # -- sweeps ----------------------------------------------------------

    def _forward(self, fv: np.ndarray, fcall, grid: Grid, Pv: np.ndarray) -> np.ndarray:
        A = self.system
        m, n = len(grid), self.system.n
        u = np.zeros(n)
        out = np.empty((m, n))
        out[0] = u
        for i in range(m - 1):
            t = grid.points[i]
            mu = grid.mus[i]
            if mu > EPS:
                u = u + mu * (A(t) @ u + Pv[i] @ fv[i])
            else:
                dt = grid.points[i + 1] - t
                if fcall is not None:
                    def rhs(s, y):
                        Ps = self.projections(s)
                        return A(s) @ y + Ps @ np.atleast_1d(np.asarray(fcall(s), dtype=float))
                else:
                    g0, g1 = Pv[i] @ fv[i], Pv[i + 1] @ fv[i + 1]
                    gm = 0.5 * (g0 + g1)

                    def rhs(s, y, _t=t, _dt=dt, _g0=g0, _g1=g1, _gm=gm):
                        if abs(s - _t) < 1e-14:
                            g = _g0
                        elif abs(s - (_t + _dt)) < 1e-14:
                            g = _g1
                        else:
                            g = _gm
                        return A(s) @ y + g
                u = _rk4_step(rhs, t, u, dt)
            if np.abs(u).max() > _OVERFLOW_GUARD:
                raise DivergenceError("forward Green sweep diverged (no dichotomy on the window)")
            out[i + 1] = u
        return out

    def _backward(self, fv: np.ndarray, fcall, grid: Grid, Qv: np.ndarray,
                  end: int) -> np.ndarray:
        """Solve v^Delta = A v - Q f backward from v(t_end) = 0."""
        A = self.system
        n = self.system.n
        E = np.eye(n)
        v = np.zeros(n)
        out = np.zeros((end + 1, n))
        for i in range(end - 1, -1, -1):
            t = grid.points[i]
            mu = grid.mus[i]
            if mu > EPS:
                try:
                    v = np.linalg.solve(E + mu * A(t), v + mu * (Qv[i] @ fv[i]))
                except np.linalg.LinAlgError as exc:
                    raise NotRegressiveError(
                        f"backward factor undefined at t = {t}: E + mu*A is singular"
                    ) from exc
            else:
                dt = grid.points[i + 1] - t
                if fcall is not None:
                    def rhs(s, y):
                        Qs = np.eye(n) - self.projections(s)
                        return A(s) @ y - Qs @ np.atleast_1d(np.asarray(fcall(s), dtype=float))
                else:
                    g0, g1 = Qv[i] @ fv[i], Qv[i + 1] @ fv[i + 1]
                    gm = 0.5 * (g0 + g1)

                    def rhs(s, y, _t=t, _dt=dt, _g0=g0, _g1=g1, _gm=gm):
                        if abs(s - _t) < 1e-14:
                            g = _g0
                        elif abs(s - (_t + _dt)) < 1e-14:
                            g = _g1
                        else:
                            g = _gm
                        return A(s) @ y - g
                v = _rk4_step(rhs, grid.points[i + 1], v, -dt)
            if np.abs(v).max() > _OVERFLOW_GUARD:
                raise DivergenceError("backward Green sweep diverged "
                                      "(Q-directions grow backward; projections likely swapped)")
            out[i] = v
        return out

    def _certify(self, grid: Grid, b: float, fv: np.ndarray, fcall=None,
                 Qv: np.ndarray | None = None) -> tuple[float, float]:
        """Tail bound on [t-, b] from three backward terminal positions."""
        if Qv is None:
            Qv = np.eye(self.system.n)[None] - self.projections.sample(grid)
        m = len(grid)
        rep = int(np.searchsorted(grid.points, b + 1e-9 * max(1.0, abs(b)) + EPS))
        if m - rep < 2:
            # not enough padding beyond the window to measure backward decay
            return math.inf, math.inf
        mid = (rep - 1 + m - 1) // 2
        v_b = self._backward(fv, fcall, grid, Qv, rep - 1)
        v_m = self._backward(fv, fcall, grid, Qv, mid)
        v_f = self._backward(fv, fcall, grid, Qv, m - 1)
        i1 = float(np.linalg.norm(v_m[:rep] - v_b[:rep], axis=1).max())
        i2 = float(np.linalg.norm(v_f[:rep] - v_m[:rep], axis=1).max())
        if i1 <= 1e-300:
            return (0.0, 0.0) if i2 <= 1e-300 else (math.inf, math.inf)
        r = i2 / i1
        if r >= 1.0:
            raise TailNotNegligibleError(
                f"backward extension increments grow (ratio {r:.3g}); "
                "no decaying Q-tail on this window")
        return i2 * r / (1.0 - r), r


@dataclass(frozen=True)
class GreenApplyReport:
    tail_bound: float
    truncated: bool
    sup_norm: float


def green_apply(G: GreenOperator, f, restrict: bool = True, return_report: bool = False):
    """Apply the Green operator to a forcing; the result solves x^Delta = A x + f."""
    grid = G.pad_grid
    fv, fcall = _forcing_samples(f, grid, G.system.n)
    u = G._forward(fv, fcall, grid, G._Pv)
    tail = 0.0
    if G.q_active:
        v = G._backward(fv, fcall, grid, G._Qv, len(grid) - 1)
        if G.truncated:
            tail, _ = G._certify(grid, G.window[1], fv, fcall, G._Qv)
            if tail > G.tail_tol:
                raise TailNotNegligibleError(
                    f"certified Q-tail {tail:.3g} exceeds tolerance {G.tail_tol:g}; "
                    "window too short")
        x = u - v
    else:
        x = u
    meta = {"tail_bound": tail, "truncated": G.truncated}
    if restrict:
        traj = Trajectory(grid=G.grid, samples=x[:G.report_len].copy(), meta=meta)
    else:
        traj = Trajectory(grid=grid, samples=x, meta=meta)
    if return_report:
        return traj, GreenApplyReport(tail_bound=tail, truncated=G.truncated,
                                      sup_norm=traj.sup_norm())
    return traj


def green_norm_estimate(G: GreenOperator, gamma: float = 0.0, lam: float = 0.0,
                        guard: float | None = 1e12, return_profile: bool = False):
    """Upper bound for the induced operator norm of the Green operator.

    Returns sup over reporting t of
    ``exp(lam t) * [ int ||Phi(t,sigma(s)) P(s)|| exp(-gamma s) Ds  (s < t)
                   + int ||Phi(t,sigma(s)) Q(s)|| exp(-gamma s) Ds  (s >= t) ]``.
    With ``gamma = lam = 0`` this is the sup-norm estimate; a weighted pair
    estimates the operator between exponentially weighted spaces.
    """
    grid = G.pad_grid
    pts, mus = grid.points, grid.mus
    m = len(grid)
    scattered = grid.scattered
    dts = np.diff(pts)
    Pv, Qv = G._Pv, G._Qv
    skip_p = bool(batched_spectral_norm(Pv).max() <= 1e-14)
    skip_q = bool(batched_spectral_norm(Qv).max() <= 1e-14)
    Xs = _fundamental(G.system, grid, 0)
    need_inverse = not (skip_p and skip_q)
    if need_inverse:
        try:
            Xinv = np.linalg.inv(Xs)
        except np.linalg.LinAlgError as exc:
            raise NotRegressiveError(
                "norm estimation via fundamental-matrix products requires regressivity"
            ) from exc
    sig = np.arange(m)
    sig[:-1][scattered[:-1]] += 1
    with np.errstate(over="ignore"):
        w_gam = np.exp(-gamma * pts)
    if not skip_p:
        MPd = Xinv @ Pv            # dense-node kernels, sigma(s) = s
        MPj = Xinv[sig] @ Pv       # scattered-piece kernels, sigma(s) = next point
    if not skip_q:
        MQd = Xinv @ Qv
        MQj = Xinv[sig] @ Qv
    profile = np.zeros(G.report_len)
    for i in range(G.report_len):
        # weights exp(lam*t - gamma*s) are combined per term: splitting the
        # factors overflows/underflows on scales with astronomically large gaps
        if lam == 0.0:
            wrow = w_gam
        else:
            with np.errstate(over="ignore"):
                wrow = np.exp(lam * pts[i] - gamma * pts)
        total = 0.0
        if not skip_p and i > 0:
            dnode = batched_spectral_norm(Xs[i] @ MPd[:i + 1]) * wrow[:i + 1]
            jnode = batched_spectral_norm(Xs[i] @ MPj[:i]) * wrow[:i]
            piece = np.where(scattered[:i], mus[:i] * jnode,
                             0.5 * dts[:i] * (dnode[:i] + dnode[1:i + 1]))
            total += float(piece.sum())
        if not skip_q and i < m - 1:
            dnode = batched_spectral_norm(Xs[i] @ MQd[i:]) * wrow[i:]
            jnode = batched_spectral_norm(Xs[i] @ MQj[i:-1]) * wrow[i:-1]
            piece = np.where(scattered[i:-1], mus[i:-1] * jnode,
                             0.5 * dts[i:] * (dnode[:-1] + dnode[1:]))
            total += float(piece.sum())
        val = total
        if guard is not None and (not math.isfinite(val) or val > guard):
            raise DivergenceError(
                f"norm estimate exceeds the overflow guard at t = {pts[i]:g}; "
                "no dichotomy certified on this window")
        profile[i] = val
    est = float(profile.max())
    if G.truncated and est > 1e-12:
        i90 = max(0, int(0.9 * (G.report_len - 1)))
        if profile[-1] > 1.01 * profile[i90] and profile[-1] >= 0.999 * est:
            raise DivergenceError(
                "norm estimate still growing at the window end; "
                "no dichotomy certified (window too short or none exists)")
    if return_profile:
        return est, profile
    return est


@dataclass(frozen=True)
class GreenVerifyReport:
    residual: float
    tol: float
    passed: bool
    tail_bound: float


def verify_green(G: GreenOperator, f, tol: float) -> GreenVerifyReport:
    """Check that the Green application solves x^Delta = A x + f within tol."""
    from .linsys import residual as _residual
    traj, rep = green_apply(G, f, return_report=True)
    res = _residual(traj, G.system, f)
    return GreenVerifyReport(residual=res, tol=float(tol),
                             passed=bool(res <= tol), tail_bound=rep.tail_bound)


def spectral_projections(A, scale: TimeScale, grid: Grid,
                         gap_tol: float = 1e-6) -> ProjectionFamily:
    """Spectral projector of a constant matrix onto its time-scale-stable part.

    Each eigenvalue's growth rate along the grid is the average of
    log|1 + mu lambda| across scattered steps and Re(lambda) dt across dense
    steps; eigenvalues within gap_tol of zero rate admit no hyperbolic
    splitting.
    """
    if isinstance(A, MatrixFunction):
        M0 = A(grid.points[0])
        Mm = A(grid.points[len(grid) // 2])
        if np.abs(M0 - Mm).max() > 1e-12:
            raise SchemaError("spectral projections require a constant system matrix")
        M = M0
    else:
        M = np.atleast_2d(np.asarray(A, dtype=float))
    n = M.shape[0]
    w, V = np.linalg.eig(M)
    if np.linalg.cond(V) > 1e8:
        raise SchemaError("system matrix is not reliably diagonalizable")
    dts = np.diff(grid.points)
    scat = grid.scattered[:-1]
    span = float(grid.points[-1] - grid.points[0])
    if span <= 0:
        raise SchemaError("degenerate grid")
    rates = np.empty(n)
    for k in range(n):
        lam = w[k]
        jump = np.abs(1.0 + grid.mus[:-1] * lam)
        with np.errstate(divide="ignore"):
            logj = np.log(jump)
        steps = np.where(scat, logj, np.real(lam) * dts)
        rates[k] = steps.sum() / span
    for k in range(n):
        if abs(rates[k]) <= gap_tol:
            raise NoSplittingError(
                f"eigenvalue {w[k]:g} has time-scale growth rate {rates[k]:.3g}; "
                "no hyperbolic splitting")
    mask = (rates < 0).astype(float)
    Pc = V @ np.diag(mask) @ np.linalg.inv(V)
    if np.abs(Pc.imag).max() > 1e-8 * (1.0 + np.abs(Pc.real).max()):
        raise SchemaError("spectral projector has a nonreal part; check conjugate pairs")
    return ProjectionFamily.constant(Pc.real)
