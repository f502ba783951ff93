"""Finite-dimensional quantum theory in SIC probability form."""

from .linalg import hermitian_eig, hs_inner, is_psd, tensor
from .measurements import Povm, born_probabilities, is_informationally_complete, validate_povm, von_neumann_from_basis
from .probrep import (
    StateKind,
    classify_prob,
    coherence_residual,
    conditional_matrix,
    evolve_prob,
    prob_to_state,
    state_to_prob,
    total_probability,
    urgleichung,
)
from .sic import SicFrame, SicSearchConfig, find_fiducial, sic_from_fiducial, triple_products, verify_sic, wh_displacement

__version__ = "0.1.0"
