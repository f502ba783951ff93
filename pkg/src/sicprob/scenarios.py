"""Worked settings: the spin-1/2 expectation game, cascaded vs direct
measurements, and the CHSH test on a single ququart."""

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import as_density, as_unitary, tensor
from .measurements import as_prob_vector, born_probabilities, validate_povm
from .probrep import conditional_matrix, state_to_prob, total_probability, urgleichung

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)

#: A at 0 and 90 degrees, B at 45 and -45 degrees, in the x-z plane.
OPTIMAL_ANGLES = (0.0, np.pi / 2, np.pi / 4, -np.pi / 4)
TSIRELSON = 2 * np.sqrt(2)
COMMUTE_TOL = 1e-12


@dataclass(frozen=True)
class SpinExpectations:
    """Spin expectations in units of hbar/2."""

    sx: float
    sy: float
    sz: float

    def __post_init__(self):
        v = self.vector
        if not np.all(np.isfinite(v)):
            raise ValueError("expectations must be finite")
        n2 = float(v @ v)
        if n2 > 1 + 1e-12:
            raise ValueError(f"expectations must lie within the unit ball (norm {np.sqrt(n2):.6g})")

    @property
    def vector(self):
        return np.array([self.sx, self.sy, self.sz], dtype=float)


def spin_operator(n):
    n = np.asarray(n, dtype=float)
    return n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z


def spin_state_from_expectations(e):
    if not isinstance(e, SpinExpectations):
        e = SpinExpectations(*e)
    return as_density((I2 + spin_operator(e.vector)) / 2)


def predict_direction(rho, n):
    """``<S_n> = tr(rho S_n)`` for a unit direction ``n``."""
    n = np.asarray(n, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1) > 1e-10:
        raise ValueError(f"direction must be a unit 3-vector, got {n.tolist()}")
    rho = as_density(rho)
    if rho.shape != (2, 2):
        raise ValueError("spin predictions need a qubit state")
    return float(np.trace(rho @ spin_operator(n)).real)


@dataclass
class CascadeResult:
    q: np.ndarray
    ltp: np.ndarray
    gap: float

    def to_dict(self):
        return {"q": self.q.tolist(), "ltp": self.ltp.tolist(), "gap": self.gap}


def cascaded_vs_direct(rho, frame, povm):
    """Compare the Born rule for the direct experiment with the Law of Total
    Probability for the experiment with the reference SIC switched on first."""
    p = state_to_prob(rho, frame)
    cond = conditional_matrix(frame, povm)
    q = urgleichung(p, cond)
    ltp = total_probability(p, cond)
    return CascadeResult(q, ltp, float(np.max(np.abs(q - ltp))))


def xz_observable(theta):
    """Qubit spin observable ``cos(theta) Z + sin(theta) X``."""
    return np.cos(theta) * PAULI_Z + np.sin(theta) * PAULI_X


def bell_state():
    phi = np.zeros(4, dtype=complex)
    phi[0] = phi[3] = 1 / np.sqrt(2)
    return np.outer(phi, phi.conj())


@dataclass
class BellSetup:
    state: np.ndarray
    alice: tuple  # (A1, A2), each 4x4
    bob: tuple  # (B1, B2), each 4x4
    angles: tuple


def commutator_norm(a, b):
    return float(np.max(np.abs(a @ b - b @ a)))


def build_ququart_bell(angles=OPTIMAL_ANGLES, basis_change=None, state=None):
    """Split a ququart as qubit x qubit and set up the CHSH observables.

    The split is the Kronecker one, ``|2i + j> = |i>|j>``. ``basis_change``
    is a 4x4 unitary ``W`` selecting another split: state and observables
    are conjugated by it. The default state is ``(|00> + |11>)/sqrt(2)``.
    """
    a1, a2, b1, b2 = (float(t) for t in angles)
    rho = bell_state() if state is None else as_density(state)
    alice = tuple(tensor(xz_observable(t), I2) for t in (a1, a2))
    bob = tuple(tensor(I2, xz_observable(t)) for t in (b1, b2))
    if basis_change is not None:
        w = as_unitary(basis_change)
        conj = lambda m: w @ m @ w.conj().T  # noqa: E731
        alice = tuple(conj(m) for m in alice)
        bob = tuple(conj(m) for m in bob)
        if state is None:
            rho = conj(rho)
    for a in alice:
        for b in bob:
            dev = commutator_norm(a, b)
            if dev > COMMUTE_TOL:
                raise AssertionError(f"split observables fail to commute ({dev:.3e})")
    return BellSetup(rho, alice, bob, (a1, a2, b1, b2))


def _plus_minus(obs):
    eye = np.eye(obs.shape[0])
    return (eye + obs) / 2, (eye - obs) / 2


def joint_povm(a, b):
    """Product-projector POVM for two commuting +-1 observables.

    Outcomes are ordered ``(+,+), (+,-), (-,+), (-,-)``.
    """
    pa = _plus_minus(a)
    pb = _plus_minus(b)
    return validate_povm([x @ y for x in pa for y in pb], labels=["++", "+-", "-+", "--"])


_OUTCOME_SIGNS = np.array([1.0, -1.0, -1.0, 1.0])


@dataclass
class ChshResult:
    correlators: tuple  # (E11, E12, E21, E22)
    chsh_value: float
    settings: tuple
    state: str
    joint: np.ndarray  # (2, 2, 4) Born-rule joint distributions
    joint_probability_route: Optional[np.ndarray] = None
    route_deviation: Optional[float] = None

    def to_dict(self):
        out = {
            "correlators": list(self.correlators),
            "chsh_value": self.chsh_value,
            "settings": list(self.settings),
            "state": self.state,
            "joint": self.joint.tolist(),
        }
        if self.route_deviation is not None:
            out["route_deviation"] = self.route_deviation
        return out


def run_chsh(state, alice, bob, frame=None, description="custom"):
    """CHSH value ``S = |E11 + E12 + E21 - E22|`` with ``Emn = tr(rho A_m B_n)``.

    With a 4-dimensional SIC ``frame`` every joint distribution is recomputed
    from reference probabilities alone and the largest discrepancy from the
    operator route is reported as ``route_deviation``.
    """
    rho = as_density(state)
    for m, a in enumerate(alice):
        for n, b in enumerate(bob):
            dev = commutator_norm(a, b)
            if dev > COMMUTE_TOL:
                raise ValueError(f"A{m + 1} and B{n + 1} do not commute (max entry {dev:.3e})")
    corr = np.array([[np.trace(rho @ a @ b).real for b in bob] for a in alice])
    joint = np.array([[born_probabilities(rho, joint_povm(a, b)) for b in bob] for a in alice])
    s = abs(corr[0, 0] + corr[0, 1] + corr[1, 0] - corr[1, 1])
    via_p = None
    deviation = None
    if frame is not None:
        p = state_to_prob(rho, frame)
        via_p = np.array(
            [[urgleichung(p, conditional_matrix(frame, joint_povm(a, b))) for b in bob] for a in alice]
        )
        deviation = float(
            max(np.max(np.abs(via_p - joint)), np.max(np.abs(via_p @ _OUTCOME_SIGNS - corr)))
        )
    return ChshResult(
        correlators=tuple(float(x) for x in corr.ravel()),
        chsh_value=float(s),
        settings=("A1B1", "A1B2", "A2B1", "A2B2"),
        state=description,
        joint=joint,
        joint_probability_route=via_p,
        route_deviation=deviation,
    )


def chsh_of_strategy(a1, a2, b1, b2):
    """Signed CHSH combination for one deterministic +-1 assignment."""
    return a1 * b1 + a1 * b2 + a2 * b1 - a2 * b2


def deterministic_strategies():
    return list(itertools.product((1, -1), repeat=4))


@dataclass
class LhvModel:
    """Hidden-variable model: weights over ``lambda`` and, for each ``lambda``,
    outcomes ``(a1, a2, b1, b2)`` for both settings on each side."""

    weights: np.ndarray
    responses: np.ndarray  # (lambda_count, 4) entries +-1

    def __post_init__(self):
        self.weights = as_prob_vector(self.weights)
        self.responses = np.asarray(self.responses, dtype=int)
        if self.responses.shape != (self.weights.size, 4):
            raise ValueError(f"responses must have shape ({self.weights.size}, 4)")
        if not np.all(np.abs(self.responses) == 1):
            raise ValueError("responses must be +-1")

    @property
    def lambda_count(self):
        return self.weights.size

    def correlators(self):
        a1, a2, b1, b2 = self.responses.T
        w = self.weights
        return tuple(float(w @ (x * y)) for x, y in ((a1, b1), (a1, b2), (a2, b1), (a2, b2)))

    def chsh_value(self):
        e11, e12, e21, e22 = self.correlators()
        return abs(e11 + e12 + e21 - e22)


def lhv_chsh_bound():
    """Largest CHSH value over all deterministic local strategies (mixtures
    cannot exceed it: the value is linear in the weights)."""
    return max(abs(chsh_of_strategy(*s)) for s in deterministic_strategies())


def random_separable_ququart(rng, terms=3):
    """Convex mixture of ``terms`` products of random qubit states."""
    from .sampling import random_density

    w = rng.dirichlet(np.ones(terms))
    rho = sum(wk * tensor(random_density(2, rng), random_density(2, rng)) for wk in w)
    return rho / np.trace(rho).real
