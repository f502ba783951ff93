"""Quantum states as SIC outcome probabilities, and the Born rule in that language.

A state ``rho`` is represented by ``p_i = tr(rho R_i)`` with ``R_i = sigma_i / d``
the elements of a SIC reference measurement. Any other measurement
``{E_j}`` is represented by the conditionals ``P(E_j|R_i) = tr(sigma_i E_j)``,
and its outcome probabilities follow from

    Q(E_j) = sum_i [(d + 1) p_i - 1/d] P(E_j|R_i),

which is the ordinary Born rule written without any operators.
"""

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, IncoherenceWarning
from .linalg import as_density, as_unitary, min_eigenvalue
from .measurements import as_prob_vector

CLASSIFY_TOL = 1e-8
QUASI_TOL = 1e-9
STORED_TRIPLES_MAX_DIM = 4


def _check_frame_dim(frame, d, what):
    if frame.dim != d:
        raise DimensionError(f"{what} has dimension {d}, frame has {frame.dim}")


def _check_length(p, frame):
    n = frame.dim**2
    if p.shape != (n,):
        raise DimensionError(f"expected {n} reference probabilities, got shape {p.shape}")


def quasi_coefficients(p, d):
    """``(d + 1) p_i - 1/d``: the expansion coefficients of rho in the sigma_i."""
    return (d + 1) * np.asarray(p, dtype=float) - 1.0 / d


def state_to_prob(rho, frame):
    rho = as_density(rho)
    _check_frame_dim(frame, rho.shape[0], "state")
    p = np.einsum("ab,iba->i", rho, frame.projectors).real / frame.dim
    return as_prob_vector(p)


def prob_to_state(p, frame):
    """Reconstruct ``sum_i [(d+1) p_i - 1/d] sigma_i``.

    The result is Hermitian with unit trace but is not necessarily positive;
    use :func:`classify_prob` to tell whether ``p`` is a quantum state at all.
    """
    p = as_prob_vector(p)
    _check_length(p, frame)
    alpha = quasi_coefficients(p, frame.dim)
    rho = np.einsum("i,iab->ab", alpha, frame.projectors)
    return (rho + rho.conj().T) / 2


class StateKind(enum.Enum):
    PURE_VALID = "PureValid"
    MIXED_VALID = "MixedValid"
    INVALID = "Invalid"


@dataclass
class StateClassification:
    kind: StateKind
    sphere_residual: float
    cubic_residual: float
    min_eigenvalue: float
    tol: float

    def to_dict(self):
        return {
            "classification": self.kind.value,
            "sphere_residual": self.sphere_residual,
            "cubic_residual": self.cubic_residual,
            "min_eigenvalue": self.min_eigenvalue,
            "tol": self.tol,
        }


def sphere_residual(p, d):
    """``|sum p_i^2 - 2/(d(d+1))|``: distance from the pure-state sphere."""
    p = np.asarray(p, dtype=float)
    return abs(float(p @ p) - 2.0 / (d * (d + 1)))


def cubic_sum(p, frame):
    """``sum_ijk c_ijk p_i p_j p_k``.

    Contracts the stored triple-product tensor for small frames and falls
    back to the ``Re tr(M^3)`` form above ``STORED_TRIPLES_MAX_DIM``.
    """
    from .sic import cubic_form

    p = np.asarray(p, dtype=float)
    if frame.dim <= STORED_TRIPLES_MAX_DIM:
        return float(np.einsum("ijk,i,j,k->", frame.triple_products, p, p, p))
    return cubic_form(frame, p)


def cubic_residual(p, frame):
    d = frame.dim
    return abs(cubic_sum(p, frame) - (d + 7) / (d + 1) ** 3)


def classify_prob(p, frame, tol=CLASSIFY_TOL):
    p = as_prob_vector(p)
    _check_length(p, frame)
    d = frame.dim
    sph = sphere_residual(p, d)
    cub = cubic_residual(p, frame)
    lo = min_eigenvalue(prob_to_state(p, frame))
    if lo < -tol:
        kind = StateKind.INVALID
    elif sph < tol and cub < tol:
        kind = StateKind.PURE_VALID
    else:
        kind = StateKind.MIXED_VALID
    return StateClassification(kind, sph, cub, lo, tol)


def conditional_matrix(frame, povm):
    """``P(E_j|R_i) = tr(sigma_i E_j)``, rows indexed by reference outcome."""
    if povm.dim != frame.dim:
        raise DimensionError(f"POVM has dimension {povm.dim}, frame has {frame.dim}")
    cond = np.einsum("iab,jba->ij", frame.projectors, povm.elements).real
    return as_cond_matrix(cond)


def as_cond_matrix(cond):
    c = np.array(cond, dtype=float)
    if c.ndim != 2:
        raise DimensionError(f"conditional matrix must be 2-d, got shape {c.shape}")
    return np.array([as_prob_vector(row) for row in c])


def _check_cond(p, cond):
    if cond.ndim != 2 or cond.shape[0] != p.shape[0]:
        raise DimensionError(
            f"{p.shape[0]} reference probabilities do not match conditional matrix of shape {cond.shape}"
        )
    d = int(round(np.sqrt(p.shape[0])))
    if d * d != p.shape[0]:
        raise DimensionError(f"{p.shape[0]} reference outcomes is not a square number")
    return d


def _born_in_probabilities(p, cond):
    p = np.asarray(p, dtype=float)
    cond = np.asarray(cond, dtype=float)
    d = _check_cond(p, cond)
    return quasi_coefficients(p, d) @ cond


def urgleichung(p, cond):
    """Born-rule probabilities ``Q(E_j)`` from reference probabilities and conditionals.

    Entries outside ``[-1e-9, 1 + 1e-9]`` mean ``p`` is not a quantum state;
    they are returned unclamped with an :class:`IncoherenceWarning`.
    """
    p = as_prob_vector(p)
    q = _born_in_probabilities(p, cond)
    bad = np.flatnonzero((q < -QUASI_TOL) | (q > 1 + QUASI_TOL))
    if bad.size:
        warnings.warn(
            IncoherenceWarning(
                f"outcomes {bad.tolist()} get probabilities {q[bad].tolist()}; "
                "the reference probabilities are not a valid quantum state"
            ),
            stacklevel=2,
        )
    return q


def total_probability(p, cond):
    """Law of Total Probability ``sum_i p_i P(E_j|R_i)`` for the cascaded experiment."""
    p = as_prob_vector(p)
    cond = np.asarray(cond, dtype=float)
    _check_cond(p, cond)
    return p @ cond


def coherence_residual(p, q, cond):
    """``max_j |q_j - Q(E_j)|``: how far ``q`` is from what the Born rule demands."""
    q = np.asarray(q, dtype=float)
    expected = _born_in_probabilities(p, cond)
    if q.shape != expected.shape:
        raise DimensionError(f"q has shape {q.shape}, expected {expected.shape}")
    return float(np.max(np.abs(q - expected)))


def evolution_conditionals(u, frame):
    """``P(R'_j|R_i) = tr(sigma_i U^dag R_j U)`` for a unitary ``U``."""
    u = as_unitary(u)
    _check_frame_dim(frame, u.shape[0], "unitary")
    r = frame.projectors / frame.dim
    evolved = np.einsum("ba,jbc,cd->jad", u.conj(), r, u)
    cond = np.einsum("iab,jba->ij", frame.projectors, evolved).real
    return as_cond_matrix(cond)


def evolve_prob(p_t0, u, frame):
    """Reference probabilities after unitary evolution, computed as a Born-rule update."""
    p = as_prob_vector(p_t0)
    _check_length(p, frame)
    return as_prob_vector(urgleichung(p, evolution_conditionals(u, frame)), neg_tol=1e-10)
