"""Command line front end: ``maltsev-kit {congruences|check|min-k|terms|free|bounds}``.

Exit codes: 0 success (including "no k exists"), 1 an identity fails,
2 usage or input error, 3 resource cap reached.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any

import numpy as np

from . import bounds as B
from .algebra import AlgebraError, FiniteAlgebra, to_document, validate_algebra
from .config import Limits
from .corpus import builtin, names as builtin_names
from .dsl import IdentitySyntaxError, parse_identity
from .free import CapExceeded, free_algebra, term_expression_of
from .identities import (FAILS, HOLDS, IdentityError, MinK, NoK, check_quantified,
                         recheck_counterexample)
from .maltsev import (TermChain, condition_ii_setup, decide_condition_ii, extract_terms,
                      verify_condition_f, verify_day_conditions, verify_term_chain)
from .relations import RelationError, all_congruences, congruence_order

EXIT_OK, EXIT_FAILS, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def load_algebra(args) -> FiniteAlgebra:
    if args.algebra and args.builtin:
        raise UsageError("give either --algebra or --builtin, not both")
    if args.builtin:
        try:
            return builtin(args.builtin)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    if args.algebra:
        try:
            with open(args.algebra) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read {args.algebra}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.algebra}: invalid JSON ({exc})") from None
        return validate_algebra(doc)
    raise UsageError("an algebra is required (--algebra FILE or --builtin NAME)")


def parse_params(items) -> dict[str, int]:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep or not value.strip().isdigit():
            raise UsageError(f"--param expects NAME=INT, got {item!r}")
        out[name.strip()] = int(value)
    return out


def algebra_section(A: FiniteAlgebra) -> dict:
    return {"fingerprint": A.fingerprint(), "document": to_document(A)}


def _kresult(res) -> dict:
    if isinstance(res, MinK):
        return {"result": "MinK", "k": res.k}
    if isinstance(res, NoK):
        return {"result": "NoK", "reason": res.reason}
    return {"result": "Undetermined", "k_max": res.k_max}


# --- subcommands -----------------------------------------------------------

def cmd_congruences(args) -> tuple[dict, int]:
    A = load_algebra(args)
    congs = all_congruences(A)
    return {
        "count": len(congs),
        "congruences": [[list(b) for b in c.blocks] for c in congs],
        "covers": [list(p) for p in congruence_order(congs)],
    }, EXIT_OK


def cmd_check(args) -> tuple[dict, int]:
    A = load_algebra(args)
    if args.identity is None:
        raise UsageError("check needs --identity TEXT")
    ast = parse_identity(args.identity)
    params = parse_params(args.param)
    v = check_quantified(A, ast, params, jobs=args.jobs, max_pairs=args.max_pairs)
    return {"verdict": v.to_json(), "max_pairs": args.max_pairs}, (
        EXIT_OK if v.status == HOLDS else EXIT_FAILS)


def cmd_min_k(args) -> tuple[dict, int]:
    A = load_algebra(args)
    setup = condition_ii_setup(A)
    res = decide_condition_ii(setup, k_max=args.k_max)
    out = {"free_algebra_size": len(setup.F), **_kresult(res)}
    if isinstance(res, MinK) and args.terms:
        chain = extract_terms(setup, res.k)
        out["terms"] = [str(t) for t in chain.terms]
    return out, EXIT_OK


def _chain_json(chain: TermChain) -> dict:
    return {"k": chain.k, "terms": [str(t) for t in chain.terms],
            "tables": [np.asarray(t).tolist() for t in chain.tables]}


def cmd_terms(args) -> tuple[dict, int]:
    A = load_algebra(args)
    setup = condition_ii_setup(A)
    res = decide_condition_ii(setup)
    out: dict[str, Any] = {"free_algebra_size": len(setup.F), **_kresult(res)}
    if not isinstance(res, MinK):
        return out, EXIT_OK
    chain = extract_terms(setup, res.k, pad_to=args.pad_to)
    main = verify_term_chain(A, chain)
    f = verify_condition_f(A, chain)
    day = verify_day_conditions(A, chain)
    out.update({"chain": _chain_json(chain), "equations": main.to_json(),
                "condition_f": f.to_json(), "day": day.to_json()})
    ok = main.holds and f.holds and day.holds
    return out, EXIT_OK if ok else EXIT_FAILS


def cmd_free(args) -> tuple[dict, int]:
    A = load_algebra(args)
    F = free_algebra(A)
    out: dict[str, Any] = {"size": len(F), "rounds": F.rounds,
                           "generators": list(F.generator_ids)}
    if args.dump:
        out["elements"] = [{"index": i, "term": str(term_expression_of(F, i)),
                            "table": e.values.tolist()} for i, e in enumerate(F.elements)]
    return out, EXIT_OK


def _parse_range(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    try:
        return list(range(int(lo), int(hi) + 1)) if sep else [int(lo)]
    except ValueError:
        raise UsageError(f"--r-table expects LO..HI, got {text!r}") from None


def cmd_bounds(args) -> tuple[dict, int]:
    out: dict[str, Any] = {}
    if args.r_table:
        out["r_table"] = [{"k": k, "r": r} for k, r in B.bound_table(_parse_range(args.r_table))]
    ell = args.ell or 2
    if args.k is not None:
        out["r"] = B.r_of_k(args.k) if args.k >= 3 else None
        out["bip_exponent"] = B.bip_exponent(args.k, ell)
    if args.p is not None:
        out["s"] = B.s_of(args.p, ell)
        out["t"] = B.t_of(args.p)
    if not (args.algebra or args.builtin):
        if not out:
            raise UsageError("bounds needs --r-table, --k, --p or an algebra")
        return out, EXIT_OK
    A = load_algebra(args)
    status = EXIT_OK
    hyp: dict[str, Any] = {}
    found = B.min_k_on(A)
    hyp["on_algebra"] = _kresult(found)
    try:
        hyp["free_algebra"] = _kresult(decide_condition_ii(A))
    except CapExceeded as exc:
        hyp["free_algebra"] = {"result": "cap-exceeded", "count": exc.count}
    out["hypothesis"] = hyp
    k = args.k if args.k is not None else (max(found.k, 3) if isinstance(found, MinK) else None)
    checks = {}
    if k is not None:
        checks["level"] = B.check_level_identity(A, k, jobs=args.jobs).to_json()
        checks["bip"] = B.check_bip(A, k, ell, jobs=args.jobs).to_json()
        checks["nte"] = B.check_nte(A, k, max_pairs=args.max_pairs, jobs=args.jobs).to_json()
        out["k_used"] = k
    if args.p is not None:
        checks["cor"] = B.check_cor(A, args.p, ell, jobs=args.jobs).to_json()
    out["checks"] = checks
    if any(c["status"] == FAILS for c in checks.values()):
        status = EXIT_FAILS
    return out, status


COMMANDS = {"congruences": cmd_congruences, "check": cmd_check, "min-k": cmd_min_k,
            "terms": cmd_terms, "free": cmd_free, "bounds": cmd_bounds}


# --- report verification ---------------------------------------------------

def verify_report(doc: dict) -> tuple[bool, list[str]]:
    """Re-check whatever a report certifies, from the data it embeds."""
    msgs: list[str] = []
    A = validate_algebra(doc["algebra"]["document"])
    if A.fingerprint() != doc["algebra"]["fingerprint"]:
        return False, ["algebra fingerprint does not match the embedded document"]
    result = doc["result"]
    cmd = doc["command"]["subcommand"]
    ok = True
    if cmd == "check":
        v = result["verdict"]
        ast = parse_identity(v["identity"])
        if v["status"] == FAILS:
            good = recheck_counterexample(A, ast, v["params"], v["counterexample"],
                                          v.get("certificate"))
            msgs.append(f"counterexample {'re-verified' if good else 'DOES NOT re-verify'}")
            ok = good
        else:
            again = check_quantified(A, ast, v["params"], max_pairs=result.get("max_pairs", 2))
            ok = again.status == v["status"]
            msgs.append(f"re-ran check: {again.status}")
    elif cmd == "terms" and "chain" in result:
        chain = TermChain(tuple(np.asarray(t) for t in result["chain"]["tables"]))
        good = (verify_term_chain(A, chain).holds == result["equations"]["holds"]
                and verify_condition_f(A, chain).holds == result["condition_f"]["holds"])
        msgs.append(f"term chain equations {'re-verified' if good else 'DO NOT re-verify'}")
        ok = good
    else:
        msgs.append(f"nothing to re-verify for {cmd!r}")
    return ok, msgs


# --- output ----------------------------------------------------------------

def render_text(report: dict) -> str:
    cmd = report["command"]["subcommand"]
    res = report["result"]
    lines = [f"{cmd}: {report['algebra']['document']['name']} "
             f"({report['algebra']['fingerprint']})" if "algebra" in report else cmd]
    if cmd == "congruences":
        lines.append(f"{res['count']} congruences")
        for i, blocks in enumerate(res["congruences"]):
            lines.append(f"  [{i}] " + "|".join("".join(map(str, b)) if all(x < 10 for x in b)
                                               else ",".join(map(str, b)) for b in blocks))
        lines.append("covers: " + " ".join(f"{i}<{j}" for i, j in res["covers"]))
    elif cmd == "check":
        v = res["verdict"]
        lines.append(f"{v['identity']}")
        lines.append(f"{v['status']} ({v['bindings_checked']} bindings checked)")
        if "counterexample" in v:
            cx = v["counterexample"]
            lines.append(f"counterexample pair {tuple(cx['pair'])}")
            for var, rel in cx["binding"].items():
                shown = rel.get("partition", rel.get("pairs"))
                lines.append(f"  {var} = {shown}")
            for step in v.get("certificate", []):
                lines.append(f"  {step['from']} --[{step['via']}]--> {step['to']}")
    elif cmd in ("min-k", "terms"):
        lines.append(f"F(4) has {res['free_algebra_size']} elements")
        lines.append({"MinK": lambda: f"least k = {res['k']}",
                      "NoK": lambda: f"no k exists: {res['reason']}",
                      "Undetermined": lambda: f"undetermined up to k = {res['k_max']}"}
                     [res["result"]]())
        terms = res.get("terms") or res.get("chain", {}).get("terms", [])
        for i, t in enumerate(terms):
            lines.append(f"  d_{i}(x,y,z,w) = {t}")
        for key in ("equations", "condition_f", "day"):
            if key in res:
                bad = res[key]["failures"]
                lines.append(f"{key}: {'holds' if res[key]['holds'] else 'FAILS'}"
                             + (f" (first failure {bad[0]})" if bad else ""))
    elif cmd == "free":
        lines.append(f"{res['size']} elements after {res['rounds']} rounds")
        for e in res.get("elements", []):
            lines.append(f"  [{e['index']}] {e['term']}")
    else:
        for key, val in res.items():
            if key == "r_table":
                lines.append("k: " + " ".join(f"{row['k']:>4}" for row in val))
                lines.append("r: " + " ".join(f"{row['r']:>4}" for row in val))
            elif key == "checks":
                for name, v in val.items():
                    lines.append(f"{name}: {v['status']}"
                                 + (f" ({v['note']})" if v.get("note") else ""))
            else:
                lines.append(f"{key}: {val}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="maltsev-kit", description=__doc__.splitlines()[0])
    p.add_argument("command", nargs="?", choices=sorted(COMMANDS))
    p.add_argument("--algebra", metavar="FILE")
    p.add_argument("--builtin", metavar="NAME",
                   help="one of: " + ", ".join(builtin_names()))
    p.add_argument("--identity", metavar="TEXT")
    p.add_argument("--param", action="append", metavar="NAME=INT")
    p.add_argument("--k", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--r-table", metavar="LO..HI")
    p.add_argument("--max-pairs", type=int,
                   help=f"pair sets generating sampled tolerances (default {Limits.max_pairs})")
    p.add_argument("--pad-to", type=int)
    p.add_argument("--terms", action="store_true", help="min-k: also print the terms")
    p.add_argument("--dump", action="store_true", help="free: list every element")
    p.add_argument("--jobs", type=int, default=1)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--text", dest="fmt", action="store_const", const="text")
    p.add_argument("--verify-report", metavar="FILE")
    p.add_argument("--output", "-o", metavar="FILE", help="also write the JSON report here")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.verify_report:
            with open(args.verify_report) as fh:
                doc = json.load(fh)
            ok, msgs = verify_report(doc)
            for m in msgs:
                print(m)
            return EXIT_OK if ok else EXIT_FAILS
        if not args.command:
            raise UsageError("a subcommand is required")
        args.limits = Limits.from_env(max_pairs=args.max_pairs)
        args.max_pairs = args.limits.max_pairs
        t0 = time.perf_counter()
        result, code = COMMANDS[args.command](args)
        elapsed = time.perf_counter() - t0
        report: dict[str, Any] = {
            "command": {"subcommand": args.command,
                        "argv": list(sys.argv[1:] if argv is None else argv)},
            "result": result,
            "timings": {"seconds": round(elapsed, 6)},
        }
        if args.algebra or args.builtin:
            report["algebra"] = algebra_section(load_algebra(args))
    except (UsageError, AlgebraError, IdentitySyntaxError, IdentityError,
            RelationError, B.BoundsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    print(text if args.fmt == "json" else render_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
