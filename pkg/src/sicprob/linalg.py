"""Dense linear algebra on the operator space of a d-level system.

Operators are plain complex ``numpy`` arrays. The ``as_*`` helpers check the
invariants of each operator kind and return a cleaned copy, so callers can
accept anything array-like.
"""

import numpy as np

from .errors import ConvergenceError, DimensionError, InvalidStateError, NotHermitianError

MAX_DIM = 16
HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-10
UNITARY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100


def as_matrix(m):
    """Return ``m`` as a finite 2-d complex array."""
    a = np.array(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a matrix, got array of shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def as_hermitian(m):
    """Return a square matrix symmetrized as ``(M + M^dag)/2``.

    Deviations from Hermiticity up to ``HERMITIAN_TOL`` (relative to the
    largest entry, when that exceeds one) are absorbed; anything larger is
    rejected.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"operator must be square, got shape {a.shape}")
    dev = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    scale = max(1.0, float(np.max(np.abs(a))))
    if dev > HERMITIAN_TOL * scale:
        raise NotHermitianError(dev)
    return (a + a.conj().T) / 2


def as_state_vector(v):
    """Return ``v`` as a unit-norm complex vector."""
    a = np.array(v, dtype=complex)
    if a.ndim != 1 or a.size == 0:
        raise DimensionError(f"state vector must be 1-d and nonempty, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidStateError("state vector has non-finite entries")
    norm = np.linalg.norm(a)
    if abs(norm - 1.0) > NORM_TOL:
        raise InvalidStateError(f"state vector norm {norm:.12g} is not 1")
    return a


def as_unitary(u):
    a = as_matrix(u)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"unitary must be square, got shape {a.shape}")
    dev = float(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))))
    if dev > UNITARY_TOL:
        raise InvalidStateError(f"matrix is not unitary (max deviation of U^dag U from I: {dev:.3e})")
    return a


def as_density(rho):
    """Return ``rho`` as a validated density operator."""
    a = as_hermitian(rho)
    tr = np.trace(a).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvalidStateError(f"density operator has trace {tr:.12g}")
    lo = min_eigenvalue(a)
    if lo < -PSD_TOL:
        raise InvalidStateError(f"density operator has negative eigenvalue {lo:.3e}")
    return a


def check_same_dim(*ops):
    dims = {op.shape[0] for op in ops}
    if len(dims) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def hs_inner(c, d):
    """Hilbert-Schmidt inner product ``tr(C D)`` of two Hermitian operators.

    Evaluated as ``sum(Re C * Re D + Im C * Im D)`` so the result is exactly
    symmetric in its arguments.
    """
    c = as_hermitian(c)
    d = as_hermitian(d)
    check_same_dim(c, d)
    imag = np.vdot(d, c).imag
    if abs(imag) > HERMITIAN_TOL * max(1.0, np.abs(c).max() * np.abs(d).max() * c.shape[0]):
        raise NotHermitianError(abs(imag))
    return float(np.sum(c.real * d.real + c.imag * d.imag))


def tensor(a, b):
    """Kronecker product: ``(A x B)[a*p + c, b*q + e] = A[a, b] * B[c, e]``."""
    return np.kron(as_matrix(a), as_matrix(b))


def _off_norm(a):
    off = a[~np.eye(a.shape[0], dtype=bool)]
    return float(np.sqrt(np.sum(off.real**2 + off.imag**2)))


def _jacobi(a, tol, max_sweeps):
    d = a.shape[0]
    v = np.eye(d, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        if _off_norm(a) < tol * scale:
            return a, v
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                phase = np.conj(apq / r)
                zeta = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                g = np.array([[c, s], [-s * phase, c * phase]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g
    off = _off_norm(a)
    if off < tol * scale:
        return a, v
    raise ConvergenceError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps", off)


def _canonical_basis(vecs, thresh=1e-8):
    """Deterministic orthonormal basis of span(vecs).

    Projects the standard basis vectors onto the subspace in index order and
    Gram-Schmidts them, so a degenerate eigenspace gets the same basis no
    matter how the rotations happened to mix it.
    """
    d, k = vecs.shape
    proj = vecs @ vecs.conj().T
    out = []
    for i in range(d):
        w = proj[:, i].copy()
        for u in out:
            w -= np.vdot(u, w) * u
        for u in out:
            w -= np.vdot(u, w) * u
        n = np.linalg.norm(w)
        if n > thresh:
            out.append(w / n)
            if len(out) == k:
                break
    return np.column_stack(out)


def _fix_phase(v, thresh=1e-10):
    # first component above thresh made real positive
    for x in v:
        if abs(x) > thresh:
            return v * (abs(x) / x)
    return v


def hermitian_eig(h, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS, cluster_tol=1e-10):
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and the
    eigenvectors as orthonormal columns. Eigenvalues closer than
    ``cluster_tol`` (relative to the matrix norm) are treated as one
    degenerate eigenspace and given a canonical basis, ordered by the index
    of each vector's first nonzero component.
    """
    a = as_hermitian(h)
    if a.shape[0] > MAX_DIM:
        raise DimensionError(f"dimension {a.shape[0]} exceeds supported maximum {MAX_DIM}")
    diag, v = _jacobi(a.copy(), tol, max_sweeps)
    evals = np.diag(diag).real.copy()
    order = np.argsort(evals, kind="stable")
    evals = evals[order]
    v = v[:, order]

    scale = max(1.0, float(np.max(np.abs(evals)))) if evals.size else 1.0
    vecs = []
    start = 0
    n = evals.size
    while start < n:
        stop = start + 1
        while stop < n and evals[stop] - evals[stop - 1] <= cluster_tol * scale:
            stop += 1
        if stop - start == 1:
            vecs.append(_fix_phase(v[:, start])[:, None])
        else:
            evals[start:stop] = np.mean(evals[start:stop])
            block = _canonical_basis(v[:, start:stop])
            vecs.append(np.column_stack([_fix_phase(block[:, j]) for j in range(block.shape[1])]))
        start = stop
    return evals, np.hstack(vecs)


def eigenvalues(h):
    return hermitian_eig(h)[0]


def min_eigenvalue(h):
    return float(eigenvalues(h)[0])


def is_psd(h, tol=PSD_TOL):
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return min_eigenvalue(h) >= -tol


def reconstruct(evals, evecs):
    """``sum_k lambda_k |v_k><v_k|``."""
    return (evecs * evals) @ evecs.conj().T


def psd_sqrt_inv(h):
    """Inverse square root of a positive definite Hermitian operator."""
    evals, evecs = hermitian_eig(h)
    if evals[0] <= 0:
        raise InvalidStateError(f"operator is not positive definite (min eigenvalue {evals[0]:.3e})")
    return reconstruct(1.0 / np.sqrt(evals), evecs)


def projector(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())
