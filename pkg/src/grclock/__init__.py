"""Collective spin dynamics under a gravitational-redshift gradient in an
optical lattice clock: dressed-state tuning of the mass defect, cavity-mediated
frequency synchronization, entanglement generation, and closed-form
cross-checks for all of it."""

from . import analytics, dressing, evolve, gr_budget, hamiltonian, observables, spin_core

__all__ = [
    "analytics",
    "dressing",
    "evolve",
    "gr_budget",
    "hamiltonian",
    "observables",
    "spin_core",
]

__version__ = "0.1.0"
