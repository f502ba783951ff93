"""Random test ensembles: states, unitaries and POVMs.

Every sampler takes a ``numpy.random.Generator`` so runs are reproducible
from a single seed.
"""

import numpy as np

from .linalg import projector, psd_sqrt_inv
from .measurements import validate_povm, von_neumann_from_basis


def ginibre(d, rng, cols=None):
    cols = d if cols is None else cols
    return (rng.normal(size=(d, cols)) + 1j * rng.normal(size=(d, cols))) / np.sqrt(2)


def haar_vector(d, rng):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def haar_unitary(d, rng):
    q, r = np.linalg.qr(ginibre(d, rng))
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_hermitian(d, rng):
    g = ginibre(d, rng)
    return (g + g.conj().T) / 2


def random_pure_state(d, rng):
    return projector(haar_vector(d, rng))


def random_density(d, rng, rank=None):
    """Hilbert-Schmidt random mixed state (full rank unless ``rank`` is given)."""
    g = ginibre(d, rng, rank)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_povm(d, rng, outcomes=None):
    """POVM with ``outcomes`` elements (default ``d**2``).

    Draws positive operators ``G^dag G`` and conjugates them by the inverse
    square root of their sum.
    """
    m = d * d if outcomes is None else outcomes
    raw = [g.conj().T @ g for g in (ginibre(d, rng) for _ in range(m))]
    w = psd_sqrt_inv(sum(raw))
    return validate_povm([w @ a @ w for a in raw])


def random_projective_povm(d, rng):
    u = haar_unitary(d, rng)
    return von_neumann_from_basis([u[:, k] for k in range(d)])


def random_probability(n, rng):
    return rng.dirichlet(np.ones(n))
