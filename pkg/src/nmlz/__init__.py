"""Numerical and analytic solver for non-unitary multistate Landau-Zener
dynamics: scattering matrices of linearly driven N-level systems with
anti-Hermitian (or Hermitian) couplings, closed-form solvable models,
semiclassical contour formulas, two-time integrability checks, and the
bosonic pair-production mapping.
"""

__version__ = "0.1.0"

from .errors import (CriticalRegime, DegenerateSlopePair, DimensionMismatch,
                     HermiticityViolation, NmlzError, NoConvergence,
                     NonFiniteEntry, NonPositiveTau, NoRoot, NotLinear,
                     OrderViolation, Overflow, ParseError, PoleProximity,
                     QuadratureFailure, SlopeNotExtremal, StepLimitExceeded,
                     StepUnderflow, TooCloseToCrossing, UnknownRecipe,
                     ZeroColumn)
from .model import (ANTIHERMITIAN, HERMITIAN, EigenvalueTrace, NmlzModel,
                    eigenvalue_trace, eigenvalues, hamiltonian_at,
                    two_level_model, validate_model)
from .propagate import (ColumnResult, PropagationSettings, ScatteringResult,
                        TransitionTable, convergence_sweep, default_horizon,
                        propagate_column, propagate_column_raw,
                        scattering_matrix, transition_table)
from .catalog import (ConservationSignature, LzPairParams, SolvableN4Params,
                      conservation_signature, hermitian_counterpart,
                      lz_two_level_hermitian, modified_be_diagonal,
                      nlz_two_level, normalize, solvable_n4,
                      solvable_n4_model, solvable_n6, solvable_n6_model)
from .semiclassic import (DykhneParams, Hs4Params, branch_points,
                          crossing_factor, dykhne_params, dykhne_probability,
                          effective_hamiltonian, gap_integral, hs4_model,
                          log_p34_composed, p34_composed,
                          symmetric_frame_model)
from .integrability import (TwoTimeFamily, TwoTimePath, area_preserving_at,
                            family_at, h_prime, integrability_residual,
                            path_evolution, time_rescaled)
from .bdg import (DissociationSystem, PairObservables, dissociation_to_nlz,
                  pair_production_run, symmetric_dissociation)
from .adiabatic import (AdiabaticExpansion, adiabatic_eigenvalue,
                        adiabatic_phase_integral, be_contour_log_ratio,
                        contour_quadrature_log_ratio)
from .figures import run_figure_recipe
