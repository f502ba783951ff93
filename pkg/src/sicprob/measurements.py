"""Generalized measurements (POVMs) and the standard Born rule."""

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import DimensionError, PovmError
from .linalg import PSD_TOL, as_density, as_hermitian, as_state_vector, min_eigenvalue, projector

IDENTITY_TOL = 1e-10
PROB_NEG_TOL = 1e-12
PROB_SUM_TOL = 1e-10
RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Povm:
    """A finite POVM. Build instances with :func:`validate_povm`."""

    dim: int
    elements: np.ndarray  # shape (n, dim, dim)
    labels: Optional[tuple] = None

    def __len__(self):
        return self.elements.shape[0]

    def __iter__(self):
        return iter(self.elements)


def as_prob_vector(p, neg_tol=PROB_NEG_TOL, sum_tol=PROB_SUM_TOL):
    """Validate a probability vector; entries in ``[-neg_tol, 0)`` are clamped to 0."""
    a = np.array(p, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise DimensionError(f"probability vector must be 1-d and nonempty, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("probability vector has non-finite entries")
    lo = a.min()
    if lo < -neg_tol:
        raise ValueError(f"probability vector has negative entry {lo:.3e}")
    total = a.sum()
    if abs(total - 1.0) > sum_tol:
        raise ValueError(f"probabilities sum to {total:.12g}, not 1")
    return np.where(a < 0, 0.0, a)


def validate_povm(candidate, labels=None, psd_tol=PSD_TOL, identity_tol=IDENTITY_TOL):
    """Check a list of operators is a POVM and return it as a :class:`Povm`.

    Raises :class:`PovmError` naming the first violated condition: a
    dimension mismatch, the first element that is not PSD, or the max entry
    residual of the element sum from the identity.
    """
    ops = list(candidate)
    if not ops:
        raise PovmError("POVM must have at least one element", "dimension")
    hs = []
    for i, op in enumerate(ops):
        h = as_hermitian(op)
        if hs and h.shape != hs[0].shape:
            raise PovmError(
                f"element {i} has shape {h.shape}, expected {hs[0].shape}", "dimension", index=i
            )
        hs.append(h)
    for i, h in enumerate(hs):
        lo = min_eigenvalue(h)
        if lo < -psd_tol:
            raise PovmError(
                f"element {i} is not positive semidefinite (min eigenvalue {lo:.3e})",
                "psd",
                index=i,
                min_eigenvalue=lo,
            )
    elements = np.array(hs)
    d = elements.shape[1]
    residual = float(np.max(np.abs(elements.sum(axis=0) - np.eye(d))))
    if residual > identity_tol:
        raise PovmError(
            f"elements do not sum to the identity (max residual {residual:.3e})",
            "identity",
            residual=residual,
        )
    if labels is not None:
        labels = tuple(str(x) for x in labels)
        if len(labels) != len(hs):
            raise PovmError(f"{len(labels)} labels for {len(hs)} elements", "dimension")
    elements.setflags(write=False)
    return Povm(dim=d, elements=elements, labels=labels)


def von_neumann_from_basis(basis, labels=None, tol=1e-10):
    """Rank-one projective measurement onto an orthonormal basis, in basis order."""
    vecs = [as_state_vector(v) for v in basis]
    d = vecs[0].size
    if len(vecs) != d or any(v.size != d for v in vecs):
        raise DimensionError(f"need {d} vectors of dimension {d}")
    gram = np.array([[np.vdot(u, v) for v in vecs] for u in vecs])
    dev = np.abs(gram - np.eye(d))
    i, j = np.unravel_index(np.argmax(dev), dev.shape)
    if dev[i, j] > tol:
        raise ValueError(f"basis is not orthonormal: Gram entry ({i}, {j}) = {gram[i, j]:.6g}")
    return validate_povm([projector(v) for v in vecs], labels=labels)


class Completeness(NamedTuple):
    complete: bool
    rank: int
    required: int

    def __bool__(self):
        return self.complete


def real_rank(rows, tol=RANK_TOL):
    """Rank of a real matrix by Gaussian elimination with full pivoting.

    Rows are scaled to unit max-norm first so ``tol`` is an absolute pivot
    threshold.
    """
    a = np.array(rows, dtype=float)
    if a.size == 0:
        return 0
    scale = np.abs(a).max(axis=1, keepdims=True)
    scale[scale == 0] = 1.0
    a = a / scale
    n, m = a.shape
    rank = 0
    for k in range(min(n, m)):
        sub = np.abs(a[k:, k:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[i, j] <= tol:
            break
        i += k
        j += k
        a[[k, i]] = a[[i, k]]
        a[:, [k, j]] = a[:, [j, k]]
        a[k + 1 :] -= np.outer(a[k + 1 :, k] / a[k, k], a[k])
        rank += 1
    return rank


def is_informationally_complete(povm):
    """Whether the POVM elements span the full operator space.

    Each element is flattened to its real and imaginary parts; the POVM is
    informationally complete when those real vectors have rank ``d**2``.
    """
    d = povm.dim
    flat = povm.elements.reshape(len(povm), d * d)
    rows = np.empty((len(povm), 2 * d * d))
    rows[:, 0::2] = flat.real
    rows[:, 1::2] = flat.imag
    rank = real_rank(rows)
    return Completeness(rank == d * d, rank, d * d)


def born_probabilities(rho, povm):
    """Outcome probabilities ``tr(rho A_j)``."""
    rho = as_density(rho)
    if rho.shape[0] != povm.dim:
        raise DimensionError(f"state has dimension {rho.shape[0]}, POVM has {povm.dim}")
    probs = np.einsum("ab,jba->j", rho, povm.elements).real
    return as_prob_vector(probs)
