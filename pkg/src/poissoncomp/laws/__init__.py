"""Exact laws, generating functions and transforms of Poisson compositions."""

from .base import BirthRates, CompositionParams, JumpLaw, PmfTable, RateFunction
from .cfrac import (cauchy_cdf, cfrac_charfn, cfrac_charfn_product, cfrac_mixture_cdf, cfrac_mixture_density,
                    cfrac_scale, cfrac_scale_expansion)
from .fractional import (LOSS_THRESHOLD, composed_birth_pgf, composed_birth_pmf, composed_phi_pgf,
                         composed_phi_pmf, composed_phi_table, composed_tau_moments, composed_tau_pgf,
                         composed_tau_pmf, composed_tau_table, dml_pmf, dml_table, frac_birth_pmf,
                         frac_birth_table, frac_linear_birth_pmf, frac_poisson_pmf, frac_poisson_table,
                         logarithmic_mean, logarithmic_pmf, negative_binomial_pmf,
                         negbin_decomposition_params, phi_cdf, phi_density, phi_survival_tail,
                         rescaled_tau_laplace, tau_cdf, tau_density, tau_laplace, yule_tau_moments,
                         yule_tau_pgf, yule_tau_pmf, yule_tau_table)
from .iterated import (compound_poisson_moments, compound_poisson_pgf, hitting_time_closed_form, hitting_time_density,
                       hitting_time_mass_closed_form,
                       hitting_time_total_mass, iterated_pmf_dde_residual, iterated_poisson_moments,
                       iterated_poisson_pgf, iterated_poisson_pmf, iterated_poisson_table,
                       nonhom_composition_pgf, nonhom_composition_pmf, poisson_stopped_poisson_pmf,
                       reversed_composition_mean, reversed_composition_pgf)
from .products import (bernoulli_mellin, k_fold_mellin, lognormal_mellin, product_covariance,
                       product_mean, product_mellin, product_second_moment, product_variance,
                       stable_mellin)

__all__ = [name for name in dir() if not name.startswith("_")]
