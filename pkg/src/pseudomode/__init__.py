"""Pseudomode simulations of an atom in structured reservoirs, with two-qubit
discord and BLP non-Markovianity of the resulting amplitude-damping channel."""

from .correlations import (
    DiscordResult,
    NonMarkovResult,
    XState,
    assemble_two_qubit,
    discord,
    discord_batch,
    non_markovianity,
    trace_distance_series,
)
from .dynamics import (
    EvolutionRecord,
    LindbladSystem,
    amplitude_ode_oracle,
    build_system,
    evolve,
    excited_amplitude,
    initial_state,
)
from .spectral import Family, PseudomodeNetwork, SpectralModel, density, to_pseudomodes

__version__ = "0.1.0"
