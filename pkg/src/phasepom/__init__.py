"""Covariant phase-space observables for the Heisenberg group.

Two regimes share one interface: the continuous Heisenberg group acting on a
truncated Fock space, sampled on a uniform phase-space grid, and the finite
Weyl-Heisenberg group over Z_d, where every identity holds exactly.
"""

__version__ = "0.1.0"

from .errors import (
    DimensionMismatch,
    GridMismatch,
    InvalidState,
    NotInformationallyComplete,
    PhasePomError,
    RegionEscapesGrid,
)
from .fock import (
    FockSpace,
    GroupElementCont,
    coherent_state,
    displacement,
    fidelity,
    fock_state,
    ladder_ops,
    pi_cont,
    projector,
    quadratures,
    random_density,
    validate_density,
)
from .phase import (
    CoefficientField,
    PhaseGrid,
    Region,
    check_orthogonality,
    coeff_field,
    covariance_defect,
    f_basis,
    neumark_defect,
    qt_effect,
    resolution_defect,
)
from .finite import FiniteGroupElement, FiniteHeisenberg, schrodinger_rep
from .tomo import char_function, forward_model, ic_condition, reconstruct, separation_test

__all__ = [name for name in dir() if not name.startswith("_")]
