"""
Lévy random bridge engine: laws, priors, path samplers and measure changes
"""
from .laws import (
    LawKind,
    LevyLaw,
    density,
    log_density,
    laplace_exponent,
    characteristic_exponent,
    sample_increments,
    in_support,
)
from .prior import TerminalPrior, sample_terminal, sample_terminal_indices
from .bridge import (
    Measure,
    BridgeSpec,
    LrbPath,
    PathBatch,
    check_grid,
    sample_bridge,
    simulate_under_P,
    simulate_under_L,
    simulate_under_M,
    simulate,
)
from .measures import (
    ell,
    ell_inverse,
    posterior,
    brownian_posterior,
    bayes_estimate,
    m_density,
    innovation_increments,
)

__all__ = [
    "LawKind",
    "LevyLaw",
    "density",
    "log_density",
    "laplace_exponent",
    "characteristic_exponent",
    "sample_increments",
    "in_support",
    "TerminalPrior",
    "sample_terminal",
    "sample_terminal_indices",
    "Measure",
    "BridgeSpec",
    "LrbPath",
    "PathBatch",
    "check_grid",
    "sample_bridge",
    "simulate_under_P",
    "simulate_under_L",
    "simulate_under_M",
    "simulate",
    "ell",
    "ell_inverse",
    "posterior",
    "brownian_posterior",
    "bayes_estimate",
    "m_density",
    "innovation_increments",
]
