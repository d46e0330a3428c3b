"""Spectra and integrated density of states on randomly perforated boxes.

The package samples random obstacle configurations (site marking, Poisson,
periodic), assembles finite-difference Laplacians on the perforated grid with
selectable boundary conditions, counts eigenvalues by Sylvester inertia,
drives Monte-Carlo ensembles of normalized counting functions with
Dirichlet/Neumann bracketing, fits spectral-edge exponents, and produces
certified lower bounds on eigenvalue counts from cosine trial families.
"""

from .certify import (Certificate, TrialFamily, certificate_to_json,
                      certify_from_fraction, certify_obstacle,
                      certify_trial_family, cosine_family, count_family,
                      family_grid_vectors)
from .errors import (DegenerateWindowError, EigensolverError, EmptyDomainError,
                     EmptyFamilyError, FactorizationError,
                     HypothesisViolationError, PerfospecError, ResolutionError,
                     ValidationError)
from .geometry import (Bernoulli, BoxSpec, DisorderModel, ObstacleMask,
                       ObstacleShape, Periodic, Poisson, Realization,
                       build_periodic, mask_from_json, mask_to_json,
                       model_descriptor, model_shape, rasterize,
                       sample_bernoulli, sample_model, sample_poisson)
from .ids import (EnsembleSpec, FitResult, IdsCurve, analytic_dirichlet_lower,
                  curve_from_csv, curve_to_csv, default_window, estimate_ids,
                  fit_exponent, fit_to_json)
from .operators import (DD, DN, ND, NN, BoundaryCondition, PotentialOperator,
                        SparseSymmetricOperator, assemble, assemble_potential,
                        operator_to_text)
from .rng import derive_seed
from .spectra import (CountResult, component_count, count_below,
                      count_below_many, lowest_k)

__version__ = "0.1.0"
