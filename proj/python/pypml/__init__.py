"""Approximate profile maximum likelihood and plug-in symmetric property estimates."""

from ._core import (
    Diagnostics,
    DomainError,
    GuardExceeded,
    Infeasible,
    InvalidInput,
    SlackTerms,
    approximate_pml,
    approximate_pml_d,
    brute_force_pml,
    distance_to_uniformity,
    entropy,
    exact_profile_logprob,
    kl_plugin,
    profile_of,
    support_coverage,
    support_size,
)

__all__ = [
    "Diagnostics",
    "DomainError",
    "GuardExceeded",
    "Infeasible",
    "InvalidInput",
    "SlackTerms",
    "approximate_pml",
    "approximate_pml_d",
    "brute_force_pml",
    "distance_to_uniformity",
    "entropy",
    "exact_profile_logprob",
    "kl_plugin",
    "profile_of",
    "support_coverage",
    "support_size",
]
