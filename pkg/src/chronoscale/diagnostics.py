"""Side-by-side diagnostic for forcing decay on scales with unbounded gaps.

Two honest computations of the same scalar problem x^Delta = exp(-t) on the
tower scale {3^(3^n)}: the literal forward partial sums (which converge, so a
bounded solution does exist pointwise) and the gamma-weighted Green-norm
estimate (which blows up with every added point, so no weighted solution
operator exists).  A syndetic reference runs the identical construction where
it stays bounded."""

from __future__ import annotations

import math

import numpy as np

from .dichotomy import GreenOperator, ProjectionFamily, green_norm_estimate
from .solver import rate_coefficient
from .timescale import build_grid, delta_integral, make_integers, make_tower3


def _weighted_backward_norm(scale, window, h, gamma, lam) -> float:
    grid = build_grid(scale, window, h)
    system = rate_coefficient([0.0], scale)
    proj = ProjectionFamily.constant([[0.0]])  # Q = 1: pure backward branch
    G = GreenOperator(system, proj, grid, tail_tol=math.inf)
    return green_norm_estimate(G, gamma=gamma, lam=lam, guard=None)


def nonsyndetic_remark_report(nmax: int = 4, gamma: float = 0.5,
                              lam: float | None = None) -> dict:
    """Tower-scale divergence rows next to the literal bounded partial sums."""
    if lam is None:
        lam = gamma
    rows = []
    for k in range(1, nmax + 1):
        scale = make_tower3(k)
        t_last = scale.segments[-1][0]
        grid = build_grid(scale, (scale.inf_t, t_last), h=1.0)
        literal = float(delta_integral(lambda t: math.exp(-t), grid.points[0],
                                       grid.points[-1], grid))
        weighted = _weighted_backward_norm(scale, (scale.inf_t, t_last), 1.0, gamma, lam)
        rows.append({
            "points": k + 1,
            "t_max": t_last,
            "max_gap": float(np.diff(grid.points).max()),
            "literal_partial_sum": literal,
            "weighted_green_norm": weighted,
        })
    syndetic = make_integers(1.0)
    reference = {
        f"window_0_{w}": _weighted_backward_norm(syndetic, (0.0, float(w)), 1.0, gamma, lam)
        for w in (20, 30, 40)
    }
    return {
        "gamma": gamma,
        "lambda": lam,
        "tower_rows": rows,
        "syndetic_reference": reference,
        "note": "the literal partial sums stay bounded while the weighted norm "
                "estimate grows with every added tower point; on the syndetic "
                "reference the identical construction is window-independent",
    }
