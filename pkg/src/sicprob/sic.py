"""Weyl-Heisenberg covariant SIC measurements: construction, search, checks."""

from dataclasses import asdict, dataclass, field
from functools import cached_property, lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DimensionError, SicSearchError
from .linalg import MAX_DIM, as_state_vector, projector
from .measurements import validate_povm


def _tau(d):
    return -np.exp(1j * np.pi / d)


def wh_displacement(d, a, b):
    """Displacement operator ``tau**(a*b) X**a Z**b`` with ``tau = -exp(i pi / d)``.

    ``X`` shifts ``|k> -> |k+1 mod d>`` and ``Z = diag(omega**k)``,
    ``omega = exp(2 pi i / d)``.
    """
    if d < 2:
        raise DimensionError("displacement operators need d >= 2")
    a %= d
    b %= d
    k = np.arange(d)
    out = np.zeros((d, d), dtype=complex)
    # (X^a Z^b)[k + a, k] = omega^(b k)
    out[(k + a) % d, k] = np.exp(2j * np.pi * b * k / d)
    return _tau(d) ** (a * b) * out


@lru_cache(maxsize=None)
def _displacements(d):
    ops = np.array([wh_displacement(d, a, b) for a in range(d) for b in range(d)])
    ops.setflags(write=False)
    return ops


def displacement_orbit(psi):
    """Vectors ``D_{a,b} psi`` for ``(a, b)`` in lexicographic order, shape ``(d*d, d)``."""
    psi = np.asarray(psi, dtype=complex)
    return _displacements(psi.size) @ psi


@dataclass(frozen=True, eq=False)
class SicFrame:
    """A candidate SIC: ``d**2`` projectors and the POVM ``sigma_i / d``.

    Nothing here checks the SIC symmetry; use :func:`verify_sic`.
    """

    dim: int
    fiducial: np.ndarray
    projectors: np.ndarray  # shape (d*d, d, d)

    @cached_property
    def povm(self):
        return validate_povm(self.projectors / self.dim)

    @cached_property
    def gram(self):
        """``tr(sigma_i sigma_k)`` for all pairs."""
        return np.einsum("iab,kba->ik", self.projectors, self.projectors).real

    @cached_property
    def triple_products(self):
        return triple_products(self)

    def with_projector(self, index, op):
        """Copy with one projector replaced (for exercising failure paths)."""
        projs = self.projectors.copy()
        projs[index] = op
        return SicFrame(self.dim, self.fiducial, projs)


def sic_from_fiducial(psi):
    psi = as_state_vector(psi)
    if psi.size > MAX_DIM:
        raise DimensionError(f"dimension {psi.size} exceeds supported maximum {MAX_DIM}")
    if psi.size < 2:
        raise DimensionError("SIC frames need d >= 2")
    orbit = displacement_orbit(psi)
    projs = np.array([projector(v) for v in orbit])
    return SicFrame(dim=psi.size, fiducial=psi, projectors=projs)


@dataclass
class SicVerificationReport:
    dim: int
    max_offdiag_deviation: float
    max_purity_deviation: float
    identity_residual: float
    tol: float
    passed: bool

    def to_dict(self):
        out = asdict(self)
        out["pass"] = out.pop("passed")
        return out


def verify_sic(frame, tol=1e-8):
    d = frame.dim
    n = frame.projectors.shape[0]
    if n != d * d:
        raise DimensionError(f"frame has {n} projectors, expected {d * d}")
    g = frame.gram
    off = ~np.eye(n, dtype=bool)
    offdiag = float(np.max(np.abs(g[off] - 1.0 / (d + 1))))
    purity = float(np.max(np.abs(np.diag(g) - 1.0)))
    ident = float(np.max(np.abs(frame.projectors.sum(axis=0) / d - np.eye(d))))
    passed = offdiag < tol and purity < tol and ident < tol
    return SicVerificationReport(d, offdiag, purity, ident, tol, bool(passed))


def triple_products(frame):
    """``c_ijk = Re tr(sigma_i sigma_j sigma_k)`` as a dense ``(n, n, n)`` tensor.

    Memory grows as ``d**6``; :func:`cubic_form` avoids the tensor entirely.
    """
    s = frame.projectors
    pairs = np.einsum("iab,jbc->ijac", s, s)
    return np.einsum("ijac,kca->ijk", pairs, s).real


def cubic_form(frame, p):
    """``sum_ijk c_ijk p_i p_j p_k`` without materializing ``c``.

    Equals ``Re tr(M^3)`` for ``M = sum_i p_i sigma_i``.
    """
    m = np.einsum("i,iab->ab", np.asarray(p, dtype=float), frame.projectors)
    return float(np.trace(m @ m @ m).real)


def frame_potential(psi):
    """``sum over (a,b) != (0,0) of |<psi|D_ab|psi>|**4``."""
    psi = np.asarray(psi, dtype=complex)
    z = displacement_orbit(psi) @ psi.conj()
    return float(np.sum(np.abs(z[1:]) ** 4))


def sic_frame_potential(d):
    """Minimum of :func:`frame_potential`, attained exactly at SIC fiducials."""
    return (d - 1) / (d + 1)


def overlap_residuals(psi):
    """``|<psi|D_ab|psi>|**2 - 1/(d+1)`` over the non-identity displacements."""
    psi = np.asarray(psi, dtype=complex)
    z = displacement_orbit(psi) @ psi.conj()
    return np.abs(z[1:]) ** 2 - 1.0 / (psi.size + 1)


@dataclass(frozen=True)
class SicSearchConfig:
    dim: int
    seed: int = 0
    restarts: int = 10
    max_iters: int = 5000
    tol: float = 1e-10
    verify_tol: float = 1e-8
    armijo: float = 1e-4
    shrink: float = 0.5
    grow: float = 2.0
    initial_step: float = 1.0
    min_step: float = 1e-20
    stall_iters: int = 200
    polish_iters: int = 100
    stop_at_first: bool = True

    def __post_init__(self):
        if not 2 <= self.dim <= MAX_DIM:
            raise ValueError(f"dim must be in [2, {MAX_DIM}], got {self.dim}")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must be in (0, 1)")


class SearchResult(NamedTuple):
    fiducial: np.ndarray
    frame_potential: float
    iterations: int
    restart: int
    report: SicVerificationReport


@dataclass
class _Candidate:
    psi: np.ndarray
    excess: float
    iterations: int
    restart: int
    max_residual: float = field(default=np.inf)


def _excess_and_grad(psi, ops, c):
    # excess = F(psi) - (d-1)/(d+1) on the unit sphere, written as a sum of
    # squared overlap residuals so it stays accurate near the minimum
    dpsi = ops @ psi
    dhpsi = np.conj(np.swapaxes(ops, 1, 2)) @ psi
    z = dpsi @ psi.conj()
    r = np.abs(z) ** 2 - c
    excess = float(np.sum(r * r))
    grad = 4.0 * ((r * np.conj(z)) @ dpsi + (r * z) @ dhpsi)
    return excess, grad, r


def _normalize_phase(psi):
    k = int(np.argmax(np.abs(psi) > 1e-12))
    out = psi * (abs(psi[k]) / psi[k])
    out[k] = abs(psi[k])
    return out


def _descend(psi, ops, c, cfg):
    """Projected gradient descent on the sphere with Armijo backtracking.

    The first trial step of each line search is the Barzilai-Borwein step
    from the previous iterate, falling back to ``grow`` times the last
    accepted step when that is undefined.
    """
    excess, grad, r = _excess_and_grad(psi, ops, c)
    tangent = grad - np.real(np.vdot(psi, grad)) * psi
    step = cfg.initial_step
    best = excess
    since_best = 0
    it = 0
    for it in range(1, cfg.max_iters + 1):
        if np.max(np.abs(r)) < cfg.tol:
            break
        gnorm2 = float(np.real(np.vdot(tangent, tangent)))
        if gnorm2 == 0.0:
            break
        t = step
        while True:
            trial = psi - t * tangent
            trial /= np.linalg.norm(trial)
            new_excess, new_grad, new_r = _excess_and_grad(trial, ops, c)
            if new_excess <= excess - cfg.armijo * t * gnorm2:
                break
            t *= cfg.shrink
            if t < cfg.min_step:
                return psi, excess, r, it
        new_tangent = new_grad - np.real(np.vdot(trial, new_grad)) * trial
        s_k = trial - psi
        y_k = new_tangent - tangent
        sy = float(np.real(np.vdot(s_k, y_k)))
        step = float(np.real(np.vdot(s_k, s_k))) / sy if sy > 0 else t * cfg.grow
        psi, excess, grad, r, tangent = trial, new_excess, new_grad, new_r, new_tangent
        if excess < best * (1.0 - 1e-6):
            best = excess
            since_best = 0
        else:
            since_best += 1
            if since_best >= cfg.stall_iters:
                break
    return psi, excess, r, it


def _residual_jacobian(psi, ops, c):
    dpsi = ops @ psi
    dhpsi = np.conj(np.swapaxes(ops, 1, 2)) @ psi
    z = dpsi @ psi.conj()
    r = np.abs(z) ** 2 - c
    # d r_i = 2 Re <w_i, delta> for a complex perturbation delta
    w = np.conj(z)[:, None] * dpsi + z[:, None] * dhpsi
    jac = 2.0 * np.hstack([w.real, w.imag])
    return r, jac


def _polish(psi, ops, c, cfg):
    """Gauss-Newton refinement of the overlap residuals.

    Gradient descent crawls where the residual vanishes only quadratically
    (the Jacobian loses rank there, as on the continuous SIC family in
    d = 3); the min-norm Gauss-Newton step still contracts the error
    geometrically.
    """
    d = psi.size
    r, jac = _residual_jacobian(psi, ops, c)
    norm = np.linalg.norm(r)
    for it in range(1, cfg.polish_iters + 1):
        if np.max(np.abs(r)) < cfg.tol:
            return psi, r, it - 1
        delta, *_ = np.linalg.lstsq(jac, -r, rcond=1e-12)
        t = 1.0
        while t > 1e-6:
            trial = psi + t * (delta[:d] + 1j * delta[d:])
            trial /= np.linalg.norm(trial)
            new_r, new_jac = _residual_jacobian(trial, ops, c)
            if np.linalg.norm(new_r) < norm:
                break
            t *= cfg.shrink
        else:
            return psi, r, it
        psi, r, jac, norm = trial, new_r, new_jac, np.linalg.norm(new_r)
    return psi, r, cfg.polish_iters


def search_restarts(config):
    """Run the restarts and return the candidates, one per restart executed.

    Restart ``k`` draws its starting vector from the ``k``-th child of
    ``SeedSequence(config.seed)``, so results depend only on the config.
    """
    d = config.dim
    ops = _displacements(d)[1:]
    c = 1.0 / (d + 1)
    children = np.random.SeedSequence(config.seed).spawn(config.restarts)
    out = []
    for k, child in enumerate(children):
        rng = np.random.default_rng(child)
        psi = rng.normal(size=d) + 1j * rng.normal(size=d)
        psi /= np.linalg.norm(psi)
        psi, excess, r, iters = _descend(psi, ops, c, config)
        if np.max(np.abs(r)) >= config.tol and config.polish_iters:
            psi, r, extra = _polish(psi, ops, c, config)
            excess = float(np.sum(r * r))
            iters += extra
        out.append(_Candidate(psi, excess, iters, k, float(np.max(np.abs(r)))))
        if config.stop_at_first and out[-1].max_residual < config.tol:
            break
    return out


def find_fiducial(config):
    """Search for a SIC fiducial by minimizing the Weyl-Heisenberg frame potential.

    The best restart (lowest potential, earliest restart on ties) is checked
    with :func:`verify_sic` at ``config.verify_tol``; :class:`SicSearchError`
    carries its report if that fails.
    """
    cands = search_restarts(config)
    best = min(cands, key=lambda cand: (cand.excess, cand.restart))
    psi = _normalize_phase(best.psi / np.linalg.norm(best.psi))
    report = verify_sic(sic_from_fiducial(psi), config.verify_tol)
    potential = frame_potential(psi)
    total_iters = sum(cand.iterations for cand in cands)
    if not report.passed:
        raise SicSearchError(
            f"no SIC fiducial found for d={config.dim} in {len(cands)} restarts "
            f"(best max overlap deviation {report.max_offdiag_deviation:.3e})",
            report,
            fiducial=psi,
        )
    return SearchResult(psi, potential, total_iters, best.restart, report)
