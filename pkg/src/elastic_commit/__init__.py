"""Bit commitment over elastic binary symmetric channels.

Modules:

* :mod:`.infotheory` -- entropies, smoothed min-entropy and the bound formulas
* :mod:`.capacity` -- commitment capacities of the REC, EC and UNC families
* :mod:`.channel` -- simulated channels with per-party elasticity rights
* :mod:`.hashing` -- Toeplitz and polynomial universal hash families
* :mod:`.protocol` -- the commit/reveal protocol and Bob's test
* :mod:`.adversary` -- cheating Alice (converse, binding attacks), dishonest Bob
* :mod:`.estimator` -- Monte Carlo and exact security estimates
* :mod:`.cli` -- the ``elastic-commit`` command
"""

from .capacity import (ChannelFamily, ChannelKind, capacity_ec, capacity_gap, capacity_rec,
                       capacity_unc, gamma_star)
from .errors import (BudgetError, ConfigurationError, DomainError, ElasticCommitError, PhaseError,
                     RightsViolationError)
from .infotheory import binary_entropy, kappa, star
from .protocol import ProtocolParams, bob_test, derive_params, run_commit, soundness_bound

__version__ = "0.1.0"

__all__ = [
    "BudgetError", "ChannelFamily", "ChannelKind", "ConfigurationError", "DomainError",
    "ElasticCommitError", "PhaseError", "ProtocolParams", "RightsViolationError", "binary_entropy",
    "bob_test", "capacity_ec", "capacity_gap", "capacity_rec", "capacity_unc",
    "derive_params", "gamma_star", "kappa", "run_commit", "soundness_bound", "star",
]
