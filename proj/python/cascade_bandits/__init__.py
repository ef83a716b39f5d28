"""Cascading bandit simulator: policies, click models, bounds and the
experiment harness, backed by a C++ core."""

from ._core import (
    ConfigError,
    InputError,
    bernoulli_kl,
    blb_means,
    bound_report,
    first_click,
    fingerprint,
    klucb_bound_leading,
    klucb_threshold,
    klucb_upper,
    lemma1_oracle,
    lemma3_check,
    list_value,
    lower_bound_constant,
    observed_weights,
    optimal_list,
    parse_config,
    reproduce,
    run_experiment,
    run_selfcheck,
    run_single,
    to_ini,
    ucb1_bound,
    ucb1_radius,
    write_results,
)

__all__ = [
    "ConfigError",
    "InputError",
    "bernoulli_kl",
    "blb_means",
    "bound_report",
    "first_click",
    "fingerprint",
    "klucb_bound_leading",
    "klucb_threshold",
    "klucb_upper",
    "lemma1_oracle",
    "lemma3_check",
    "list_value",
    "lower_bound_constant",
    "observed_weights",
    "optimal_list",
    "parse_config",
    "reproduce",
    "run_experiment",
    "run_selfcheck",
    "run_single",
    "to_ini",
    "ucb1_bound",
    "ucb1_radius",
    "write_results",
]
