"""Command-line entry point.

Every command prints one JSON document ``{"status", "payload",
"diagnostics"}`` and exits 0 (ok), 1 (a check did not pass) or 2 (bad input
or internal error).
"""

import argparse
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import io
from .errors import SicSearchError
from .linalg import min_eigenvalue
from .measurements import born_probabilities
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
from .sampling import random_projective_povm, random_pure_state
from .scenarios import (
    OPTIMAL_ANGLES,
    build_ququart_bell,
    cascaded_vs_direct,
    lhv_chsh_bound,
    SpinExpectations,
    predict_direction,
    run_chsh,
    spin_state_from_expectations,
)
from .sic import SicSearchConfig, find_fiducial, frame_potential, sic_from_fiducial, verify_sic

EXIT_CODES = {"ok": 0, "fail": 1, "error": 2}


@dataclass
class CommandResult:
    status: str
    payload: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)
    output: str = field(default="-", repr=False)

    @property
    def exit_code(self):
        return EXIT_CODES[self.status]

    def to_dict(self):
        return {"status": self.status, "payload": self.payload, "diagnostics": self.diagnostics}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _floats(text, n=None):
    vals = [float(x) for x in text.split(",")]
    if n is not None and len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def _load_frame(path):
    with open(path) as fh:
        doc = io.parse(fh.read())
    # accept the envelope printed by `sic find` as well as a bare fixture
    if isinstance(doc, dict) and "payload" in doc and "fiducial" not in doc:
        doc = doc["payload"]
    return io.fixture_from_json(doc).frame()


def _search_config(args):
    return SicSearchConfig(
        dim=args.dim, seed=args.seed, restarts=args.restarts, max_iters=args.max_iters, verify_tol=args.tol
    )


def cmd_sic_find(args):
    cfg = _search_config(args)
    try:
        res = find_fiducial(cfg)
    except SicSearchError as exc:
        payload = {"report": exc.report.to_dict()}
        if exc.fiducial is not None:
            payload["fiducial"] = io.complex_to_json(exc.fiducial)
        return CommandResult("fail", payload, [{"kind": "search", "message": str(exc)}])
    fx = io.Fixture(cfg.dim, res.fiducial, cfg.seed, res.frame_potential, cfg.verify_tol)
    payload = io.fixture_to_json(fx)
    payload["iterations"] = int(res.iterations)
    payload["restart"] = int(res.restart)
    payload["report"] = res.report.to_dict()
    return CommandResult("ok", payload)


def cmd_sic_verify(args):
    frame = _load_frame(args.frame)
    report = verify_sic(frame, args.tol)
    payload = report.to_dict()
    payload["frame_potential"] = frame_potential(frame.fiducial)
    return CommandResult("ok" if report.passed else "fail", payload)


def cmd_to_prob(args):
    frame = _load_frame(args.frame)
    rho = io.load_json(args.state, "operator")
    return CommandResult("ok", io.probs_to_json(state_to_prob(rho, frame)))


def cmd_to_state(args):
    frame = _load_frame(args.frame)
    p = io.load_json(args.prob, "probs")
    rho = prob_to_state(p, frame)
    lo = min_eigenvalue(rho)
    payload = io.operator_to_json(rho)
    payload["min_eigenvalue"] = lo
    diags = []
    if lo < -1e-9:
        diags.append({"kind": "not_psd", "message": f"reconstruction has negative eigenvalue {lo:.3e}"})
    return CommandResult("ok", payload, diags)


def cmd_classify(args):
    frame = _load_frame(args.frame)
    p = io.load_json(args.prob, "probs")
    cls = classify_prob(p, frame, args.tol)
    return CommandResult("fail" if cls.kind is StateKind.INVALID else "ok", cls.to_dict())


def cmd_born_check(args):
    frame = _load_frame(args.frame)
    povm = io.load_json(args.povm, "povm")
    cond = conditional_matrix(frame, povm)
    payload = {}
    if args.state is not None:
        rho = io.load_json(args.state, "operator")
        p = state_to_prob(rho, frame)
        payload["born"] = born_probabilities(rho, povm).tolist()
    else:
        p = io.load_json(args.prob, "probs")
    q = urgleichung(p, cond)
    ltp = total_probability(p, cond)
    payload["p"] = p.tolist()
    payload["q"] = q.tolist()
    payload["ltp"] = ltp.tolist()
    payload["ltp_residual"] = coherence_residual(p, ltp, cond)
    if args.q is not None:
        claimed = io.load_json(args.q, "probs")
        payload["assigned_q"] = claimed.tolist()
        resid = coherence_residual(p, claimed, cond)
    elif "born" in payload:
        resid = coherence_residual(p, payload["born"], cond)
    else:
        resid = 0.0
    payload["coherence_residual"] = resid
    payload["tol"] = args.tol
    return CommandResult("ok" if resid <= args.tol else "fail", payload)


def cmd_evolve(args):
    frame = _load_frame(args.frame)
    p = io.load_json(args.prob, "probs")
    u = io.load_json(args.unitary, "operator")
    return CommandResult("ok", io.probs_to_json(evolve_prob(p, u, frame)))


def cmd_demo_spin(args):
    e = SpinExpectations(args.sx, args.sy, args.sz)
    rho = spin_state_from_expectations(e)
    n = np.array(args.n)
    return CommandResult(
        "ok",
        {
            "expectations": [e.sx, e.sy, e.sz],
            "state": io.operator_to_json(rho),
            "direction": n.tolist(),
            "prediction": predict_direction(rho, n),
        },
    )


def _frame_for(d, path, seed):
    if path is not None:
        return _load_frame(path)
    if d in io.bundled_dims():
        return io.bundled_frame(d)
    res = find_fiducial(SicSearchConfig(dim=d, seed=seed, restarts=50))
    return sic_from_fiducial(res.fiducial)


def cmd_demo_cascade(args):
    rng = np.random.default_rng(args.seed)
    frame = _frame_for(args.dim, args.frame, args.seed)
    if args.state is not None:
        rho = io.load_json(args.state, "operator")
    else:
        rho = random_pure_state(args.dim, rng)
    if args.povm is not None:
        povm = io.load_json(args.povm, "povm")
    else:
        povm = random_projective_povm(args.dim, rng)
    res = cascaded_vs_direct(rho, frame, povm)
    payload = res.to_dict()
    payload["dim"] = frame.dim
    payload["state"] = io.operator_to_json(rho)
    return CommandResult("ok", payload)


def cmd_demo_chsh(args):
    angles = np.deg2rad(args.angles) if args.angles is not None else OPTIMAL_ANGLES
    setup = build_ququart_bell(angles)
    res = run_chsh(setup.state, setup.alice, setup.bob, frame=io.bundled_frame(4), description="bell")
    payload = res.to_dict()
    payload["angles_deg"] = np.rad2deg(setup.angles).tolist()
    payload["lhv_bound"] = lhv_chsh_bound()
    payload["violates_lhv"] = res.chsh_value > payload["lhv_bound"] + 1e-9
    diags = []
    if res.route_deviation is not None and res.route_deviation > 1e-9:
        diags.append({"kind": "route_mismatch", "message": f"probability route off by {res.route_deviation:.3e}"})
        return CommandResult("fail", payload, diags)
    return CommandResult("ok", payload, diags)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", default="-", help="file for the JSON result ('-' for standard output)")
    parser = _Parser(prog="sicprob", description=__doc__.splitlines()[0])
    top = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    sic = top.add_parser("sic", help="SIC search and verification").add_subparsers(dest="cmd", required=True)
    p = sic.add_parser("find", parents=[common], help="search for a Weyl-Heisenberg SIC fiducial")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--max-iters", type=int, default=SicSearchConfig.max_iters)
    p.add_argument("--tol", type=float, default=1e-8, help="verification tolerance")
    p.set_defaults(func=cmd_sic_find)
    p = sic.add_parser("verify", parents=[common], help="check the SIC overlap conditions of a fixture")
    p.add_argument("--frame", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_sic_verify)

    rep = top.add_parser("repr", help="probability representation").add_subparsers(dest="cmd", required=True)
    p = rep.add_parser("to-prob", parents=[common])
    p.add_argument("--state", required=True)
    p.add_argument("--frame", required=True)
    p.set_defaults(func=cmd_to_prob)
    p = rep.add_parser("to-state", parents=[common])
    p.add_argument("--prob", required=True)
    p.add_argument("--frame", required=True)
    p.set_defaults(func=cmd_to_state)
    p = rep.add_parser("classify", parents=[common])
    p.add_argument("--prob", required=True)
    p.add_argument("--frame", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_classify)

    born = top.add_parser("born", help="Born rule in probability form").add_subparsers(dest="cmd", required=True)
    p = born.add_parser("check", parents=[common])
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--state")
    src.add_argument("--prob")
    p.add_argument("--povm", required=True)
    p.add_argument("--frame", required=True)
    p.add_argument("--q", help="probabilities to test for coherence with the Born rule")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_born_check)

    p = top.add_parser("evolve", parents=[common], help="unitary evolution of reference probabilities")
    p.add_argument("--prob", required=True)
    p.add_argument("--unitary", required=True)
    p.add_argument("--frame", required=True)
    p.set_defaults(func=cmd_evolve)

    demo = top.add_parser("demo", help="worked scenarios").add_subparsers(dest="cmd", required=True)
    p = demo.add_parser("spin", parents=[common])
    p.add_argument("--sx", type=float, required=True)
    p.add_argument("--sy", type=float, required=True)
    p.add_argument("--sz", type=float, required=True)
    p.add_argument("--n", type=lambda s: _floats(s, 3), required=True, help="direction NX,NY,NZ (use --n=-1,0,0 for leading minus)")
    p.set_defaults(func=cmd_demo_spin)
    p = demo.add_parser("cascade", parents=[common])
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--frame")
    p.add_argument("--state")
    p.add_argument("--povm")
    p.set_defaults(func=cmd_demo_cascade)
    p = demo.add_parser("chsh", parents=[common])
    p.add_argument("--angles", type=lambda s: _floats(s, 4), help="a1,a2,b1,b2 in degrees (x-z plane)")
    p.set_defaults(func=cmd_demo_chsh)
    return parser


def dispatch(argv):
    """Run one command; returns the :class:`CommandResult`."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return CommandResult("error", {}, [{"kind": "usage", "message": str(exc)}])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            result = args.func(args)
        except (OSError, ValueError, ArithmeticError, RuntimeError) as exc:
            result = CommandResult("error", {}, [{"kind": type(exc).__name__, "message": str(exc)}])
    for w in caught:
        result.diagnostics.append({"kind": w.category.__name__, "message": str(w.message)})
    result.output = args.output
    return result


def main(argv=None):
    result = dispatch(sys.argv[1:] if argv is None else argv)
    text = io.dumps(result.to_dict(), indent=2) + "\n"
    target = getattr(result, "output", "-")
    if target == "-":
        sys.stdout.write(text)
    else:
        with open(target, "w") as fh:
            fh.write(text)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
