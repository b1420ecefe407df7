"""Greedy online bipartite matching on G(n, n, p).

Thin Python front end over the C++ core: limiting formulas, the gamma fixed
point, ratio bounds, ODE integration, exact small-n enumeration and seeded
Monte-Carlo experiments.
"""

from ._core import (
    NumericalError,
    equivalence_check,
    exact_online_distribution,
    gamma_fixed_point,
    greedy_fraction,
    max_matching,
    max_matching_bound,
    minimize_greedy_ratio,
    oblivious_fraction,
    ode_solve,
    ratio_lower_bound,
    run_experiment,
    sample_instance,
    weighted_fraction,
)

__all__ = [
    "NumericalError",
    "equivalence_check",
    "exact_online_distribution",
    "gamma_fixed_point",
    "greedy_fraction",
    "max_matching",
    "max_matching_bound",
    "minimize_greedy_ratio",
    "oblivious_fraction",
    "ode_solve",
    "ratio_lower_bound",
    "run_experiment",
    "sample_instance",
    "weighted_fraction",
]
