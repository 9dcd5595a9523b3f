"""Compositions of Poisson-type processes: exact laws, samplers and identity checks."""

from . import field, laws, samplers, specfun, verify
from .errors import (DegenerateRates, DivergentSeries, DivisionUnderflow, InvalidBound, NonConvergence,
                     PoissonCompError, PrecisionLoss, TabulationFailure, UnknownCheck)
from .rng import DEFAULT_SEED, RngStream

__version__ = "0.1.0"
