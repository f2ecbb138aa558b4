"""Eigenspace holonomy of two-level systems: lifting, classification and dynamics."""
from .algebra import (
    DEGENERATE,
    eig_hermitian_2x2,
    eig_unitary_2x2,
    expm_i_hermitian,
    pauli,
)
from .bloch import (
    Director,
    bloch_from_projector,
    covering_projection,
    hamiltonian_from_spectrum,
    projectors_from_bloch,
)
from .lift import (
    BlochPath,
    DirectorPath,
    HolonomyResult,
    HomotopyClass,
    Permutation,
    concatenate,
    holonomy,
    lift_path,
)
from .dynamics import (
    EvolutionRecord,
    SweepSchedule,
    evolve_continuous,
    evolve_kicked,
    fidelity_trace,
    landau_zener_probability,
)
from .models import ParametricModel, director_path, operator_at

__version__ = "0.1.0"
