"""Numerics for dynamic equations on time scales.

Delta-calculus primitives on hybrid grids, the Hilger exponential algebra,
linear stepping and variation-of-constants solvers, Green-type operators from
projection families, constructive bounded- and decaying-solution iterations,
and Lyapunov-exponent diagnostics.
"""

from .errors import (BallEscapeError, ChronoscaleError, ContractionError,
                     DivergenceError, IndeterminateError, NonSyndeticError,
                     NoSplittingError, NotInScaleError, NotOnGridError,
                     NotRegressiveError, NumericalError, RefusalError,
                     SchemaError, StencilError, TailNotNegligibleError)
from .timescale import (Grid, PeriodicExtension, PointSequence, RandomSyndetic,
                        TimeScale, build_grid, canonicalize, delta_derivative,
                        delta_integral, make_geometric, make_integers,
                        make_random_syndetic, make_real, make_tower3,
                        make_union, parse_scale)
from .hilger import (RegressivityClass, ScalarCoefficient, cylinder, exp_curve,
                     growth_factors, hilger_exp, neg, ominus, oplus,
                     regressivity_class)
from .linsys import (Forcing, MatrixFunction, RegressivityReport, Trajectory,
                     cauchy_matrix, matrix_sup_norm, operator_norm,
                     regressive_check, residual, step_ivp,
                     variation_of_constants)
from .dichotomy import (GreenOperator, GreenVerifyReport, ProjectionFamily,
                        green_apply, green_norm_estimate, spectral_projections,
                        verify_green)
from .solver import (AffineBoundedNonlinearity, ContractionReport,
                     DecayNonlinearity, DecayReport, HatExtension,
                     NonlinearComponent, NonlinearityModel, ReductionReport,
                     WeightedSpaceNorm, contraction_constants,
                     extend_forcing_hat, fixed_point_solve,
                     hyperbolic_bounded_solve, lambda_select, rate_coefficient,
                     reduce_regular_check, regular_decay_solve,
                     scalar_green_gamma, weighted_sup)
from .lyapunov import (DefectReport, ExponentEstimate, LogSamples,
                       alpha_coefficient, alpha_function, classic_exponent,
                       exact_exponent_check, fundamental_exponents,
                       regularity_defect, ts_exponent)
from .diagnostics import nonsyndetic_remark_report

__version__ = "0.1.0"
