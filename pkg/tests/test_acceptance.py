"""Acceptance suite. Each test prints one PASS/FAIL line; run with ``-s`` to
see them inline, otherwise they are collected in the terminal summary."""

import subprocess
import sys

import numpy as np
import pytest

from sicprob.measurements import born_probabilities, is_informationally_complete, von_neumann_from_basis
from sicprob.probrep import (
    classify_prob,
    conditional_matrix,
    cubic_residual,
    evolve_prob,
    prob_to_state,
    sphere_residual,
    state_to_prob,
    urgleichung,
    StateKind,
)
from sicprob.sampling import (
    haar_unitary,
    haar_vector,
    random_density,
    random_povm,
    random_projective_povm,
)
from sicprob.scenarios import (
    build_ququart_bell,
    cascaded_vs_direct,
    lhv_chsh_bound,
    random_separable_ququart,
    run_chsh,
    xz_observable,
)
from sicprob.sic import SicSearchConfig, find_fiducial, verify_sic


@pytest.fixture
def record(acceptance_log):
    def _record(number, name, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {name} ({detail})"
        print(line)
        acceptance_log.append(line)
        return passed

    return _record


def test_criterion_1_sic_search(record):
    worst = {}
    for d in range(2, 9):
        res = find_fiducial(SicSearchConfig(dim=d, seed=0, restarts=50))
        worst[d] = res.report.max_offdiag_deviation
    ok = all(v < 1e-8 for v in worst.values())
    detail = ", ".join(f"d={d}: {v:.1e}" for d, v in worst.items())
    assert record(1, "SIC search d=2..8, <=50 restarts, off-diagonal < 1e-8", ok, detail)


def test_criterion_2_round_trip(frames, record):
    rng = np.random.default_rng(2)
    err = {}
    for d in range(2, 7):
        err[d] = max(
            np.max(np.abs(prob_to_state(state_to_prob(rho, frames[d]), frames[d]) - rho))
            for rho in (random_density(d, rng, rank=int(rng.integers(1, d + 1))) for _ in range(1000))
        )
    ok = all(v < 1e-10 for v in err.values())
    assert record(2, "representation round trip < 1e-10", ok, ", ".join(f"d={d}: {v:.1e}" for d, v in err.items()))


def test_criterion_3_born_rule(frames, record):
    rng = np.random.default_rng(3)
    err = {}
    for d in (2, 3, 4):
        worst = 0.0
        for k in range(500):
            rho = random_density(d, rng)
            povm = random_projective_povm(d, rng) if k % 2 else random_povm(d, rng, outcomes=int(rng.integers(2, 2 * d * d)))
            q = urgleichung(state_to_prob(rho, frames[d]), conditional_matrix(frames[d], povm))
            worst = max(worst, np.max(np.abs(q - born_probabilities(rho, povm))))
        err[d] = worst
    ok = all(v < 1e-10 for v in err.values())
    assert record(3, "probability-form Born rule matches tr(rho E) < 1e-10", ok,
                  ", ".join(f"d={d}: {v:.1e}" for d, v in err.items()))


def test_criterion_4_pure_state_conditions(frames, record):
    rng = np.random.default_rng(4)
    sph = cub = 0.0
    excess = -np.inf
    misclassified = 0
    for d in (2, 3, 4):
        f = frames[d]
        for _ in range(1000):
            psi = haar_vector(d, rng)
            p = state_to_prob(np.outer(psi, psi.conj()), f)
            sph = max(sph, sphere_residual(p, d))
            cub = max(cub, cubic_residual(p, f))
            excess = max(excess, p.max() - 1 / d)
            misclassified += classify_prob(p, f).kind is not StateKind.PURE_VALID
            # mixed states are valid too and obey the same bound
            p_mixed = state_to_prob(random_density(d, rng), f)
            excess = max(excess, p_mixed.max() - 1 / d)
    ok = sph < 1e-9 and cub < 1e-9 and excess <= 1e-10
    detail = f"sphere {sph:.1e}, cubic {cub:.1e}, max p - 1/d = {excess:.2e}, misclassified {misclassified}"
    assert record(4, "pure-state sphere/cubic < 1e-9, max p <= 1/d + 1e-10", ok, detail)


def test_criterion_5_unitary_evolution(frames, record):
    rng = np.random.default_rng(5)
    err = {}
    for d in (2, 3, 4):
        worst = 0.0
        for _ in range(500):
            rho = random_density(d, rng)
            u = haar_unitary(d, rng)
            got = evolve_prob(state_to_prob(rho, frames[d]), u, frames[d])
            want = state_to_prob(u @ rho @ u.conj().T, frames[d])
            worst = max(worst, np.max(np.abs(got - want)))
        err[d] = worst
    ok = all(v < 1e-10 for v in err.values())
    assert record(5, "evolve_prob matches conjugated state < 1e-10", ok,
                  ", ".join(f"d={d}: {v:.1e}" for d, v in err.items()))


def test_criterion_6_cascade_gap(frames, record):
    res = cascaded_vs_direct(np.diag([1.0, 0.0]), frames[2], von_neumann_from_basis(np.eye(2)))
    dq = np.max(np.abs(res.q - [1, 0]))
    dl = np.max(np.abs(res.ltp - [2 / 3, 1 / 3]))
    dg = abs(res.gap - 1 / 3)
    ok = max(dq, dl, dg) <= 1e-9
    detail = f"q={np.round(res.q, 12).tolist()}, ltp={np.round(res.ltp, 12).tolist()}, gap={res.gap:.12f}"
    assert record(6, "qubit cascade gap 1/3 +- 1e-9", ok, detail)


def test_criterion_7_chsh(frames, record):
    setup = build_ququart_bell()
    s = run_chsh(setup.state, setup.alice, setup.bob, frame=frames[4]).chsh_value
    bound = lhv_chsh_bound()
    rng = np.random.default_rng(7)
    sep = 0.0
    for k in range(1000):
        rho = random_separable_ququart(rng, terms=int(rng.integers(1, 5)))
        if k % 3 == 0:
            angles = rng.uniform(-np.pi, np.pi, size=4)
        elif k % 3 == 1:
            angles = setup.angles
        else:
            # product of eigenstates of aligned observables sits on the bound
            t = rng.uniform(-np.pi, np.pi)
            v = np.linalg.eigh(xz_observable(t))[1][:, -1]
            rho = np.kron(np.outer(v, v.conj()), np.outer(v, v.conj()))
            angles = (t, t, t, t)
        trial = build_ququart_bell(angles, state=rho)
        sep = max(sep, run_chsh(trial.state, trial.alice, trial.bob).chsh_value)
    ok = abs(s - 2 * np.sqrt(2)) <= 1e-6 and bound == 2 and sep <= 2 + 1e-9
    detail = f"S={s:.10f}, LHV bound={bound}, max separable S={sep:.6f}"
    assert record(7, "CHSH 2*sqrt(2) +- 1e-6, LHV bound 2, separable <= 2 + 1e-9", ok, detail)


def test_criterion_8_determinism(record):
    cmd = [sys.executable, "-m", "sicprob", "sic", "find", "--dim", "3", "--seed", "7", "--restarts", "10"]
    runs = [subprocess.run(cmd, capture_output=True, check=False) for _ in range(2)]
    ok = all(r.returncode == 0 for r in runs) and runs[0].stdout == runs[1].stdout
    detail = f"exit codes {[r.returncode for r in runs]}, {len(runs[0].stdout)} bytes, identical={runs[0].stdout == runs[1].stdout}"
    assert record(8, "sic find --dim 3 --seed 7 --restarts 10 byte-identical", ok, detail)


def test_criterion_9_informational_completeness(frames, record):
    rng = np.random.default_rng(9)
    sic_ok = True
    ranks = {}
    for d, f in frames.items():
        assert verify_sic(f).passed
        c = is_informationally_complete(f.povm)
        ranks[d] = c.rank
        sic_ok &= bool(c) and c.rank == d * d
    vn_ok = True
    for d in frames:
        for povm in [von_neumann_from_basis(np.eye(d))] + [random_projective_povm(d, rng) for _ in range(20)]:
            vn_ok &= not is_informationally_complete(povm)
    ok = sic_ok and vn_ok
    detail = "SIC ranks " + ", ".join(f"d={d}: {r}" for d, r in ranks.items()) + f"; von Neumann all incomplete={vn_ok}"
    assert record(9, "SIC frames have rank d^2, von Neumann measurements are not IC", ok, detail)
