import json
import subprocess
import sys
from importlib import resources

import numpy as np
import pytest

from sicprob import io
from sicprob.cli import dispatch, main
from sicprob.errors import SchemaError
from sicprob.measurements import von_neumann_from_basis
from sicprob.probrep import prob_to_state


@pytest.fixture
def d2_path():
    return str(resources.files("sicprob.fiducials") / "d2.json")


@pytest.fixture
def d4_path():
    return str(resources.files("sicprob.fiducials") / "d4.json")


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out else None), out.err


def test_sic_verify_bundled(d2_path, capsys):
    code, doc, _ = run(["sic", "verify", "--frame", d2_path], capsys)
    assert code == 0
    assert doc["status"] == "ok"
    assert doc["payload"]["pass"] is True
    assert doc["payload"]["max_offdiag_deviation"] < 1e-8


def test_sic_verify_fails_on_non_sic(tmp_path, capsys):
    path = tmp_path / "bad.json"
    io.save_json(path, "fixture", io.Fixture(2, np.array([1.0, 0.0])))
    code, doc, _ = run(["sic", "verify", "--frame", str(path)], capsys)
    assert code == 1
    assert doc["status"] == "fail"


def test_sic_find_and_reuse(tmp_path, capsys):
    out = tmp_path / "found.json"
    assert main(["sic", "find", "--dim", "2", "--seed", "1", "--output", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["payload"]["report"]["pass"] is True
    # the envelope itself is accepted as a frame file
    code, doc, _ = run(["sic", "verify", "--frame", str(out)], capsys)
    assert code == 0


def test_classify_uniform(tmp_path, d2_path, capsys):
    path = tmp_path / "u.json"
    io.save_json(path, "probs", np.full(4, 0.25))
    code, doc, _ = run(["repr", "classify", "--prob", str(path), "--frame", d2_path], capsys)
    assert code == 0
    assert doc["payload"]["classification"] == "MixedValid"


def test_classify_invalid(tmp_path, d2_path, capsys):
    path = tmp_path / "p.json"
    io.save_json(path, "probs", np.array([1.0, 0, 0, 0]))
    code, doc, _ = run(["repr", "classify", "--prob", str(path), "--frame", d2_path], capsys)
    assert code == 1
    assert doc["payload"]["classification"] == "Invalid"


def test_to_prob_to_state_round_trip(tmp_path, d4_path, rng, capsys):
    from sicprob.sampling import random_density

    rho = random_density(4, rng)
    state = tmp_path / "rho.json"
    probs = tmp_path / "p.json"
    io.save_json(state, "operator", rho)
    assert main(["repr", "to-prob", "--state", str(state), "--frame", d4_path, "--output", str(probs)]) == 0
    env = json.loads(probs.read_text())
    io.probs_from_json(env["payload"])
    p_path = tmp_path / "bare.json"
    p_path.write_text(json.dumps(env["payload"]))
    code, doc, _ = run(["repr", "to-state", "--prob", str(p_path), "--frame", d4_path], capsys)
    assert code == 0
    back = io.operator_from_json({k: doc["payload"][k] for k in ("dim", "entries")})
    assert np.max(np.abs(back - rho)) < 1e-10


def test_born_check(tmp_path, d2_path, capsys):
    state = tmp_path / "rho.json"
    povm = tmp_path / "povm.json"
    io.save_json(state, "operator", np.diag([1.0, 0.0]))
    io.save_json(povm, "povm", von_neumann_from_basis(np.eye(2)))
    code, doc, _ = run(["born", "check", "--state", str(state), "--povm", str(povm), "--frame", d2_path], capsys)
    assert code == 0
    pl = doc["payload"]
    assert pl["q"] == pytest.approx([1, 0], abs=1e-9)
    assert pl["ltp"] == pytest.approx([2 / 3, 1 / 3], abs=1e-9)
    assert pl["ltp_residual"] == pytest.approx(1 / 3, abs=1e-9)
    # claiming the classical answer is incoherent
    claim = tmp_path / "q.json"
    io.save_json(claim, "probs", np.array(pl["ltp"]))
    code, doc, _ = run(
        ["born", "check", "--state", str(state), "--povm", str(povm), "--frame", d2_path, "--q", str(claim)], capsys
    )
    assert code == 1


def test_evolve_identity(tmp_path, d2_path, capsys):
    p = tmp_path / "p.json"
    u = tmp_path / "u.json"
    probs = np.array([0.4, 0.2, 0.2, 0.2])
    io.save_json(p, "probs", probs)
    io.save_json(u, "operator", np.eye(2))
    code, doc, _ = run(["evolve", "--prob", str(p), "--unitary", str(u), "--frame", d2_path], capsys)
    assert code == 0
    assert doc["payload"]["probs"] == pytest.approx(probs.tolist(), abs=1e-12)


def test_evolve_rejects_non_unitary(tmp_path, d2_path, capsys):
    p = tmp_path / "p.json"
    u = tmp_path / "u.json"
    io.save_json(p, "probs", np.full(4, 0.25))
    io.save_json(u, "operator", 2 * np.eye(2))
    code, doc, _ = run(["evolve", "--prob", str(p), "--unitary", str(u), "--frame", d2_path], capsys)
    assert code == 2
    assert doc["status"] == "error"


def test_demo_spin(capsys):
    code, doc, _ = run(["demo", "spin", "--sx", "0.6", "--sy", "0", "--sz", "0.8", "--n", "1,0,0"], capsys)
    assert code == 0
    assert doc["payload"]["prediction"] == pytest.approx(0.6, abs=1e-12)
    code, doc, _ = run(["demo", "spin", "--sx", "1", "--sy", "1", "--sz", "0", "--n", "0,0,1"], capsys)
    assert code == 2


def test_demo_cascade(capsys):
    code, doc, _ = run(["demo", "cascade", "--dim", "3", "--seed", "4"], capsys)
    assert code == 0
    assert doc["payload"]["gap"] >= 0


def test_demo_chsh(capsys):
    code, doc, _ = run(["demo", "chsh"], capsys)
    assert code == 0
    pl = doc["payload"]
    assert pl["chsh_value"] == pytest.approx(2.8284271, abs=1e-6)
    assert pl["violates_lhv"] is True
    assert pl["lhv_bound"] == 2


def test_demo_chsh_custom_angles(capsys):
    code, doc, _ = run(["demo", "chsh", "--angles", "0,0,0,0"], capsys)
    assert code == 0
    assert doc["payload"]["chsh_value"] == pytest.approx(2, abs=1e-12)
    assert doc["payload"]["violates_lhv"] is False


def test_unknown_subcommand(capsys):
    code = main(["frobnicate"])
    out = capsys.readouterr()
    assert code == 2
    assert "usage:" in out.err
    assert json.loads(out.out)["status"] == "error"


def test_missing_file(capsys):
    code, doc, _ = run(["sic", "verify", "--frame", "/nonexistent.json"], capsys)
    assert code == 2
    assert doc["diagnostics"][0]["kind"] == "FileNotFoundError"


def test_malformed_input_is_error(tmp_path, d2_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"dim": 2, "entries": [[1, 0]]}')
    code, doc, _ = run(["repr", "to-prob", "--state", str(path), "--frame", d2_path], capsys)
    assert code == 2
    assert "entries" in doc["diagnostics"][0]["message"]


def test_warnings_surface_as_diagnostics(tmp_path, d2_path, capsys):
    p = np.array([1.0, 0, 0, 0])
    _, v = np.linalg.eigh(prob_to_state(p, io.bundled_frame(2)))
    p_path = tmp_path / "p.json"
    povm = tmp_path / "povm.json"
    io.save_json(p_path, "probs", p)
    io.save_json(povm, "povm", von_neumann_from_basis(v.T))
    code, doc, _ = run(["born", "check", "--prob", str(p_path), "--povm", str(povm), "--frame", d2_path], capsys)
    assert any(d["kind"] == "IncoherenceWarning" for d in doc["diagnostics"])


def test_payloads_match_schemas():
    res = dispatch(["sic", "find", "--dim", "2", "--seed", "3"])
    assert res.status == "ok"
    io.fixture_from_json({k: v for k, v in res.payload.items() if k in ("dim", "seed", "fiducial", "frame_potential", "verified_tol")})
    with pytest.raises(SchemaError):
        io.fixture_from_json({"dim": "two", "fiducial": []})


def test_module_entry_point(d2_path):
    proc = subprocess.run(
        [sys.executable, "-m", "sicprob", "sic", "verify", "--frame", d2_path], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["payload"]["pass"] is True
