"""``pgg`` command line.

Every subcommand prints one JSON report on stdout::

    {"command": [...], "input_digest": ..., "seeds": {...},
     "result": {...}, "timing": {"seconds": ...}}

Exit status is 0 whenever the command ran (the answer lives in
``result``), 2 on usage or parse errors and 3 when an instance exceeds
the brute-force cap or the search budget.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
import warnings
from fractions import Fraction
from pathlib import Path

from . import __version__
from .congestion import (
    KRule, Side, parse_threshold, threshold_pne_check, threshold_to_pgg, verify_isomorphism,
)
from .dynamics import Schedule, run_dynamics, step_bound
from .errors import CapacityError, PGGError
from .gadgets import build_gadget, default_contract, verify_contract
from .game import enumerate_pne, format_game, is_pne, parse_game
from .generate import CompleteWeighted, Gnp, generate_instance, rng_for
from .pattern import classify, parse_pattern
from .reduction import (
    OneInThreeInstance, ReductionCertificate, assignment_to_profile, compile_reduction,
    parse_1in3, profile_to_assignment,
)
from .solver import DEFAULT_BUDGET, Status, export_cnf, format_dimacs, solve

EXIT_OK, EXIT_USAGE, EXIT_CAPACITY = 0, 2, 3


class _Capacity(Exception):
    """Carries a payload for a capacity/budget exit."""

    def __init__(self, payload):
        self.payload = payload


def _bits(profile):
    return "".join(map(str, profile))


def _read(path, digests):
    data = Path(path).read_bytes()
    digests.append(hashlib.sha256(data).hexdigest())
    return data.decode("utf-8")


# ---------------------------------------------------------------------------
# subcommands; each returns (result payload, seeds)

def cmd_solve(args, digests):
    g = parse_game(_read(args.file, digests))
    out = {"n": g.n, "edges": len(g.edges)}
    if args.cnf_out:
        cnf = export_cnf(g)
        Path(args.cnf_out).write_text(format_dimacs(cnf, [f"PNE of {Path(args.file).name}"]))
        out["cnf"] = {"path": args.cnf_out, "variables": cnf.num_vars, "clauses": len(cnf.clauses)}
    if args.enumerate:
        found = enumerate_pne(g, args.max_count)
        out.update(exists=bool(found), method="brute", count=len(found),
                   profiles=[_bits(p) for p in found])
        return out, {}
    res = solve(g, args.method, args.budget)
    out.update(res.to_json())
    if res.status is Status.BUDGET_EXCEEDED:
        raise _Capacity(out)
    return out, {}


def cmd_dynamics(args, digests):
    g = parse_game(_read(args.file, digests))
    if args.init == "all0":
        s0 = (0,) * g.n
    elif args.init == "all1":
        s0 = (1,) * g.n
    else:
        s0 = tuple(int(b) for b in rng_for(args.seed).integers(0, 2, g.n))
    trace = run_dynamics(g, s0, Schedule.parse(args.schedule, args.seed), args.max_steps)
    out = trace.to_json()
    if not args.trace:
        out.pop("potential_series", None)
    else:
        out["flips"] = [[v, b] for v, b in trace.steps]
    if trace.potentials is not None:
        out["step_bound"] = step_bound(g)
    out["final_is_pne"] = is_pne(g, trace.final).is_pne
    return out, {"seed": args.seed}


def cmd_classify(args, digests):
    rows = []
    for text in args.patterns:
        p = parse_pattern(text)
        rows.append({
            "pattern": text,
            "canonical": str(p),
            "classes": [{"class": c.name, "verdict": c.verdict} for c in sorted(classify(p))],
        })
    return {"patterns": rows}, {}


def cmd_gadget(args, digests):
    g = build_gadget(args.name, args.k, args.arity)
    out = {
        "kind": g.kind.value, "k": g.k, "arity": g.arity, "vertices": g.size,
        "edges": len(g.edges), "operands": list(g.operands), "membrane": list(g.membrane),
    }
    if args.verify:
        out["verification"] = verify_contract(g, default_contract(g), args.verify).to_json()
    if args.emit:
        header = [f"{g.kind.value} gadget, k={g.k}, arity={g.arity}"]
        header += [f"role {v} {g.roles[v - 1].value} {g.labels[v - 1]}" for v in range(1, g.size + 1)]
        Path(args.emit).write_text(format_game(g.as_game(), header))
        out["emitted"] = args.emit
    return out, {}


def cmd_reduce(args, digests):
    with warnings.catch_warnings():
        # unused variables are listed in the payload instead
        warnings.simplefilter("ignore")
        inst = parse_1in3(_read(args.file, digests))
    game, cert = compile_reduction(inst, args.k, args.equiv_chain)
    Path(args.output).write_text(format_game(game))
    out = {"vertices": game.n, "edges": len(game.edges), "output": args.output,
           "gadgets": {}}
    for rec in cert.gadgets:
        out["gadgets"][rec.kind] = out["gadgets"].get(rec.kind, 0) + 1
    if args.cert:
        data = cert.to_json()
        data["instance"] = {"m": inst.m, "clauses": [list(c) for c in inst.clauses]}
        Path(args.cert).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
        out["cert"] = args.cert
    if inst.unused_variables:
        out["unused_variables"] = list(inst.unused_variables)
    return out, {}


def cmd_certify(args, digests):
    game = parse_game(_read(args.file, digests))
    data = json.loads(_read(args.cert, digests))
    cert = ReductionCertificate.from_json(data)
    inst = OneInThreeInstance(data["instance"]["m"], tuple(map(tuple, data["instance"]["clauses"])))
    if len(args.assignment) != inst.m or set(args.assignment) - {"0", "1"}:
        raise PGGError(f"assignment must be {inst.m} bits")
    sigma = tuple(int(c) for c in args.assignment)
    if cert.rebuild() != game:
        raise PGGError("certificate does not describe this game")
    profile = assignment_to_profile(inst, cert, sigma, game)
    back = profile_to_assignment(inst, cert, profile, game)
    return {
        "profile": _bits(profile),
        "is_pne": is_pne(game, profile).is_pne,
        "round_trip": all(back[v] == sigma[v - 1] for v in back),
    }, {}


def cmd_threshold(args, digests):
    t = parse_threshold(_read(args.file, digests))
    rule = KRule(args.k_rule)
    game, mapping = threshold_to_pgg(t, rule)
    Path(args.output).write_text(format_game(game))
    out = {"players": t.n, "k_rule": rule.value, "output": args.output,
           "patterns": [str(p) for p in game.patterns]}
    if game.n <= 20:
        pne = enumerate_pne(game)
        out["pgg_pne"] = [_bits(p) for p in pne]
        out["mapped_are_threshold_pne"] = [
            threshold_pne_check(t, mapping.to_threshold(p)).is_pne for p in pne
        ]
    return out, {}


def cmd_congestion(args, digests):
    g = parse_game(_read(args.file, digests))
    rep = verify_isomorphism(g, args.check_samples, args.seed, args.exhaustive_n)
    return rep.to_json(), {"seed": args.seed}


def cmd_gen(args, digests):
    if args.model == "gnp":
        model = Gnp(args.n, Fraction(args.p))
    else:
        model = CompleteWeighted(args.n, args.wmax)
    pats = [p.strip() for p in args.patterns.split(",")]
    g = generate_instance(model, pats[0] if len(pats) == 1 else pats, args.seed)
    text = format_game(g)
    if args.output:
        Path(args.output).write_text(text)
    return {"n": g.n, "edges": len(g.edges), "output": args.output,
            "game": None if args.output else text}, {"seed": args.seed}


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pgg", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--threads", type=int, default=1,
                    help="worker cap (all commands currently run single-threaded)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="decide PNE existence")
    p.add_argument("file")
    p.add_argument("--enumerate", action="store_true", help="list all PNE (brute force, n <= 30)")
    p.add_argument("--max-count", type=int, help="stop enumerating after this many")
    p.add_argument("--method", choices=["auto", "brute", "backtrack"], default="auto",
                   help="auto picks brute force for n <= 20")
    p.add_argument("--cnf-out", help="also write the DIMACS encoding here")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="search node limit")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("dynamics", help="run better-response dynamics")
    p.add_argument("file")
    p.add_argument("--init", choices=["all0", "all1", "random"], default="all0",
                   help="starting profile")
    p.add_argument("--schedule", choices=["roundrobin", "random", "first"], default="roundrobin",
                   help="which violator flips next")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=10**6, help="flip limit")
    p.add_argument("--trace", action="store_true", help="include flips and the potential series")
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("classify", help="complexity class of patterns")
    p.add_argument("patterns", nargs="+")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("gadget", help="build, verify or emit a gadget")
    p.add_argument("name", choices=["near-or", "true", "false", "equiv", "clause"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--arity", type=int, help="operand count (near-or only)")
    p.add_argument("--verify", choices=["exact", "compositional"],
                   help="check the gadget contract")
    p.add_argument("--emit", help="write the gadget as a game file")
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("reduce", help="compile a 1-in-3 instance")
    p.add_argument("file")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--cert", help="write the reduction certificate (JSON)")
    p.add_argument("--equiv-chain", action="store_true",
                   help="link occurrences in a chain, not all pairs")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("certify", help="map an assignment to a PNE and back")
    p.add_argument("file")
    p.add_argument("--cert", required=True)
    p.add_argument("--assignment", required=True, help="bit string x1..xm")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("threshold", help="threshold game to weighted game")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--k-rule", choices=["floor", "floor-plus-one"], default="floor-plus-one",
                   help="k from theta; floor is kept only for comparison")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("congestion", help="check the congestion-game isomorphism")
    p.add_argument("file")
    p.add_argument("--check-samples", type=int, default=1000,
                   help="random profiles when n is large")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exhaustive-n", type=int, default=6, help="check every profile up to this n")
    p.set_defaults(func=cmd_congestion)

    p = sub.add_parser("gen", help="generate a random game")
    p.add_argument("--model", choices=["gnp", "complete"], default="gnp")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", default="1/2", help="edge probability, rational allowed (gnp)")
    p.add_argument("--wmax", type=int, default=1, help="weights drawn from 1..wmax (complete)")
    p.add_argument("--patterns", default="10*", help="comma-separated; one is drawn per vertex")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)
    return ap


def _summary(status, result):
    if status == EXIT_CAPACITY and "error" not in result:
        return "budget exceeded"
    if "error" in result:
        return result["error"]
    if "exists" in result:
        return "PNE exists" if result["exists"] else "no PNE"
    if "converged" in result:
        return f"{'converged' if result['converged'] else 'stopped'} after {result['steps']} flips"
    if "ok" in result:
        return "isomorphism verified" if result["ok"] else "MISMATCH"
    return "done"


def dispatch(argv=None, stdout=None):
    """Run one command; returns ``(exit status, report dict)``."""
    stdout = stdout or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    digests = []
    # echo from the subcommand on, so global flags such as --threads never
    # change the payload
    report = {"command": argv[argv.index(args.command):]}
    start = time.perf_counter()
    status = EXIT_OK
    try:
        result, seeds = args.func(args, digests)
    except _Capacity as exc:
        result, seeds, status = exc.payload, {}, EXIT_CAPACITY
    except CapacityError as exc:
        result, seeds, status = {"error": str(exc)}, {}, EXIT_CAPACITY
    except (PGGError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        result, seeds, status = {"error": str(exc)}, {}, EXIT_USAGE
    report.update(
        input_digest=digests[0] if len(digests) == 1 else (digests or None),
        seeds=seeds,
        result=result,
        timing={"seconds": round(time.perf_counter() - start, 6)},
    )
    stdout.write(json.dumps(report, sort_keys=True) + "\n")
    print(f"pgg {args.command}: {_summary(status, result)}", file=sys.stderr)
    return status, report


def main(argv=None) -> int:
    try:
        status, _ = dispatch(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    return status


if __name__ == "__main__":
    sys.exit(main())
