"""Distribution of the winner index ``argmax(X_1, ..., X_n)`` for independent,
non-identically distributed continuous players."""

__version__ = "0.1.0"

from .model import (BUILTIN_G, FamilyError, GenericFamily, Perturbation,  # noqa: E402
                    PerturbedFamily, PlayerFamily, ProportionalFamily, TailFunction,
                    TriangularFamily, family_from_spec, golden_offsets, load_family,
                    log_tail, nu, permute_family, power_tail, rational_perturbation,
                    transform_family, weibull_family)
from .exact import (InversionConfig, NumericalError, QuadratureConfig,  # noqa: E402
                    WinnerDistribution, invert_sum, sum_nu, winner_probs_exact,
                    winner_probs_product)
from .asympt import (LimitMeasure, RhoEstimate, alpha_weights,  # noqa: E402
                     approximation_error, b_from_log_weights, classify_limit,
                     empirical_limit_cdf, empirical_limit_cdf_log, estimate_rho,
                     total_variation, triangular_limit)
from .sim import (SimReport, bernoulli_max_membership, bernoulli_membership_exact,  # noqa: E402
                  estimate_winner_probs, sample_player, transform_invariance_check)
