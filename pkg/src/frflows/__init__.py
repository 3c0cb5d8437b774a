"""Information geometry of densities via diffeomorphism groups.

Alpha-divergences, the H-dot-1 / Fisher-Rao metric, the alpha-connections on
the space of densities of the circle and the flat torus, and solvers for
their geodesic equations (the generalized Proudman-Johnson family).
"""
from .calculus import (PeriodicField, PeriodicGrid, antiderivative, dealias, derivative,
                       integrate, inverse_A, inverse_A_dx, shift, trig_eval)
from .connections import (CurvatureReport, chart_christoffel, christoffel, covariant_derivative,
                          curvature_eval, duality_residual, h1_inner, nabla_right_invariant)
from .diffeo import (EPS_JAC, CircleDiffeo, Density, DiffeoTrajectory, compose, compose_field, flow,
                     invert, jacobian, pushforward_velocity, sqrt_jac_embed)
from .divergences import (ParametricFamily, alpha_divergence, alpha_divergence_diffeo,
                          christoffel_from_divergence, divergence_evaluator, fisher_rao_matrix,
                          hellinger_distance, metric_from_divergence)
from .errors import BreakdownError, DegenerateDiffeoError, DomainError, InvalidInputError
from .geodesics import (VelocityTrajectory, affine_chart_phi, alpha0_density_geodesic,
                        alpha0_solution, alpha1_solution, alpham1_solution, burgers_breakdown_time,
                        conserved_C, hunter_saxton_breakdown_time, integrate_pj, inverse_phi,
                        pj_residual, pj_rhs)
from .torus import (TorusDensity, TorusGrid, TorusVectorField, alpha1_solution_nd, div,
                    geodesic_rhs_nd, h1_inner_nd, integrate_nd, inv_laplace_mean_zero,
                    nabla_alpha_identity, pjn_residual)

__version__ = "0.1.0"
