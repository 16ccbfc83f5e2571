"""Continuous-time quantum walks on chimera graphs and their variants.

Builds the graph family (plain, enhanced, vertex-broken; periodic or
reflecting boundaries), the walk Hamiltonian and its commuting symmetry
operators, closed-form and numerical spectra with complete mode labels,
walker dynamics with exact limiting distributions, and an adiabatic
protocol preparing individual modes.
"""

__version__ = "0.1.0"

from .graphs import (VertexCoord, ChimeraGraph, RowColConstraint, build_chimera,
                     enhance, diminish, isolate_vertices, graph_to_json,
                     graph_from_json)
from .operators import (WalkHamiltonian, SymmetryOperator, hamiltonian,
                        permutation_operator, line_operator, intercell_operators,
                        pi_operators, symmetry_set, commutator_maxnorm,
                        operator_to_json)
from .spectral import (EigenSystem, SpectralLabel, LabeledSystem, SpectrumReport,
                       SpectralDiff, FAMILY_LEFT, FAMILY_RIGHT, FAMILY_BOTH,
                       eigensolve, enumerate_labels, verify_spectrum,
                       label_eigenstates, spectral_diff, eigenstate_field,
                       inverse_participation_ratio, localized_state)
from .dynamics import (WalkerState, ProbabilityField, evolve,
                       transition_probability, limiting_distribution,
                       classical_ctrw, subspace_weights, project_family,
                       fourier2d)
from .adiabatic import (Schedule, AdiabaticResult, default_site_energies,
                        target_hamiltonian, adiabatic_evolve,
                        adiabatic_evolve_converged)
from .experiments import EXPERIMENTS, run, compare_fields, load_config

__all__ = [
    "__version__",
    # graphs
    "VertexCoord", "ChimeraGraph", "RowColConstraint", "build_chimera",
    "enhance", "diminish", "isolate_vertices", "graph_to_json", "graph_from_json",
    # operators
    "WalkHamiltonian", "SymmetryOperator", "hamiltonian", "permutation_operator",
    "line_operator", "intercell_operators", "pi_operators", "symmetry_set",
    "commutator_maxnorm", "operator_to_json",
    # spectral
    "EigenSystem", "SpectralLabel", "LabeledSystem", "SpectrumReport",
    "SpectralDiff", "FAMILY_LEFT", "FAMILY_RIGHT", "FAMILY_BOTH", "eigensolve",
    "enumerate_labels", "verify_spectrum", "label_eigenstates", "spectral_diff",
    "eigenstate_field", "inverse_participation_ratio", "localized_state",
    # dynamics
    "WalkerState", "ProbabilityField", "evolve", "transition_probability",
    "limiting_distribution", "classical_ctrw", "subspace_weights",
    "project_family", "fourier2d",
    # adiabatic
    "Schedule", "AdiabaticResult", "default_site_energies", "target_hamiltonian",
    "adiabatic_evolve", "adiabatic_evolve_converged",
    # experiments
    "EXPERIMENTS", "run", "compare_fields", "load_config",
]
