"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run directly (``python3 tests/test_acceptance.py``) for the summary, or under
pytest where each criterion is its own test. Time budgets are pinned below.
"""

from __future__ import annotations

import contextlib
import io
import itertools
import json
import pathlib
import sys
import tempfile
import time

import numpy as np
import pytest

HERE = pathlib.Path(__file__).parent
sys.path.insert(0, str(HERE))

from identity_corpus import GOLDEN, MALFORMED  # noqa: E402
from oracles import brute_cg, brute_congruences  # noqa: E402

from maltsev_kit.algebra import parse_term  # noqa: E402
from maltsev_kit.bounds import (HK3, bip_exponent, check_bip, check_level_identity,  # noqa: E402
                                check_nte, r_of_k, s_of, sample_level_certificates, t_of)
from maltsev_kit.cli import main as cli_main  # noqa: E402
from maltsev_kit.corpus import builtin, names  # noqa: E402
from maltsev_kit.dsl import parse_identity, pretty_print  # noqa: E402
from maltsev_kit.free import free_algebra  # noqa: E402
from maltsev_kit.identities import HOLDS, MinK, NoK, check_quantified  # noqa: E402
from maltsev_kit.maltsev import (LATTICE_MAJORITY, condition_ii_setup,  # noqa: E402
                                 decide_condition_ii, extract_terms, majority_chain,
                                 verify_condition_f, verify_day_conditions, verify_term_chain)
from maltsev_kit.relations import (BinaryRelation, Congruence, all_congruences, cg,  # noqa: E402
                                   chain_fixpoint, circ_h, compose, converse,
                                   equivalence_closure, union)

GOLDEN_K = json.loads((HERE / "golden.json").read_text())
SEED = 20240607

# pinned budgets, seconds
BUDGET = {1: 1.0, 2: 10.0, 3: 120.0, 4: 60.0, 5: 60.0, 6: 60.0, 7: 60.0, 8: 60.0,
          9: 30.0, 10: 30.0}


def _chain_for(A):
    """Extracted terms when F(4) is computable, the majority chain otherwise."""
    if A.name in GOLDEN_K:
        k = GOLDEN_K[A.name]["k_star"]
        return extract_terms(condition_ii_setup(A), k)
    return majority_chain(A, parse_term(LATTICE_MAJORITY))


def criterion_1():
    for k in range(3, 13):
        two_r = k * k - 4 * k + 9 if k % 2 else k * k - 3 * k + 4
        assert 2 * r_of_k(k) == two_r
    assert [r_of_k(k) for k in range(3, 9)] == [3, 4, 7, 11, 15, 22]
    for p in range(1, 21):
        assert t_of(p) == s_of(p, 2) == (p - 1) ** 2 + 1
        for ell in range(2, 6):
            assert s_of(p, ell) == (p - 1) ** 2 * (ell - 1) + 1
    for k, ell in itertools.product(range(2, 13), range(2, 6)):
        assert bip_exponent(k, ell) == 2 * ((k + 1) // 2) ** (ell - 1)
    return "r(3..12), s, t (p=1..20), bip exponent exact"


def criterion_2():
    sizes = {}
    for name, want in (("set4", 4), ("semilattice2", 15), ("lattice2", 166)):
        t0 = time.perf_counter()
        sizes[name] = len(free_algebra(builtin(name)))
        assert time.perf_counter() - t0 < BUDGET[2], name
        assert sizes[name] == want, (name, sizes[name])
    return ", ".join(f"{n}={s}" for n, s in sizes.items())


def criterion_3():
    out = []
    for name in ("set4", "semilattice2", "z2", "lattice2", "d01-majority"):
        res = decide_condition_ii(builtin(name))
        want = GOLDEN_K[name]["k_star"]
        if want is None:
            assert isinstance(res, NoK), (name, res)
            out.append(f"{name}=NoK")
        else:
            assert res == MinK(want), (name, res)
            out.append(f"{name}=MinK({res.k})")
    return ", ".join(out)


def criterion_4():
    checked = []
    for name, g in GOLDEN_K.items():
        if g["k_star"] is None:
            continue
        A = builtin(name)
        chain = extract_terms(condition_ii_setup(A), g["k_star"])
        for rep in (verify_term_chain(A, chain), verify_condition_f(A, chain),
                    verify_day_conditions(A, chain)):
            assert rep.holds and not rep.failures(), (name, rep.to_json())
        checked.append(name)
    return "chains pass (a)-(f) and Day on " + ", ".join(sorted(checked))


def criterion_5():
    rng = np.random.default_rng(SEED)
    worst = {}
    for name in ("lattice2", "chain3-lattice", "N5", "M3"):
        A = builtin(name)
        chain = _chain_for(A)
        k = chain.k
        assert check_level_identity(A, k).status == HOLDS, name
        certs = sample_level_certificates(A, chain, 50, rng)
        assert all(c.verified for c in certs), name
        assert all(c.factors <= r_of_k(k) for c in certs), name
        worst[name] = max(c.factors for c in certs)
    return "max factors " + ", ".join(f"{n}={w}/{r_of_k(3)}" for n, w in worst.items())


def criterion_6():
    for name in ("lattice2", "chain3-lattice"):
        A = builtin(name)
        k = GOLDEN_K[name]["k_star"]
        for ell in (2, 3):
            assert check_bip(A, k, ell).status == HOLDS, (name, ell)
        assert check_nte(A, k, max_pairs=1).status == HOLDS, name
        congs = all_congruences(A)
        nte = ("a & (D o c o D) <= (a & D) o[k] c ; forall a: congruence ; "
               "forall D: representable ; forall c: congruence ; param k")
        for kk in (1, 2, 3, 4):
            v1 = check_quantified(A, parse_identity(nte), {"k": kk}, families={"D": congs})
            v2 = check_quantified(A, parse_identity(HK3), {"k": kk})
            assert v1.status == v2.status, (name, kk)
    return "bip ell=2,3; nte single-pair; nte(congruence) == hk3 for k=1..4"


def criterion_7():
    done = []
    for name in names():
        A = builtin(name)
        if A.size > 4:
            continue
        assert {c.labels for c in all_congruences(A)} == brute_congruences(A), name
        pairs = [(a, b) for a in range(A.size) for b in range(a + 1, A.size)]
        for size in (1, 2):
            for ps in itertools.combinations(pairs, size):
                assert cg(A, ps).labels == brute_cg(A, ps), (name, ps)
        done.append(name)
    return f"{len(done)} algebras"


def criterion_8():
    rng = np.random.default_rng(SEED)

    def rel(n, refl=False):
        m = rng.random((n, n)) < 0.35
        return BinaryRelation(m | np.eye(n, dtype=bool) if refl else m)

    for _ in range(200):
        n = int(rng.integers(1, 7))
        R, S, T = rel(n), rel(n), rel(n)
        assert compose(compose(R, S), T) == compose(R, compose(S, T))
    for _ in range(200):
        n = int(rng.integers(1, 7))
        R, S = rel(n), rel(n)
        assert converse(compose(R, S)) == compose(converse(S), converse(R))
    for _ in range(200):
        n = int(rng.integers(1, 7))
        B, G, h = rel(n, True), rel(n, True), int(rng.integers(1, 8))
        assert circ_h(B, G, h) <= circ_h(B, G, h + 1)
    for _ in range(200):
        n = int(rng.integers(1, 7))
        a, b = Congruence(rng.integers(0, n, n)), Congruence(rng.integers(0, n, n))
        assert chain_fixpoint(a, b)[0] == equivalence_closure(union(a, b))
    return "4 laws x 200 instances"


def _cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli_main(list(argv))
    return code, out.getvalue(), err.getvalue()


def criterion_9():
    assert len(GOLDEN) == 20
    for text in GOLDEN:
        ast = parse_identity(text)
        assert parse_identity(pretty_print(ast)) == ast, text
    for text, line, col in MALFORMED:
        code, _, err = _cli("check", "--builtin", "lattice2", "--identity", text)
        assert code == 2 and f"line {line}, column {col}" in err, (text, err)
    return f"20 round trips, {len(MALFORMED)} malformed inputs exit 2 with position"


def criterion_10():
    with tempfile.TemporaryDirectory() as tmp:
        path = pathlib.Path(tmp) / "set4.json"
        code, _, _ = _cli("check", "--builtin", "set4", "--identity", GOLDEN[0],
                          "-o", str(path))
        assert code == 1
        doc = json.loads(path.read_text())
        assert "counterexample" in doc["result"]["verdict"]
        code, out, _ = _cli("--verify-report", str(path))
        assert code == 0 and "re-verified" in out, out
    return "set4 counterexample re-verifies"


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 11)}


def run_criterion(i):
    t0 = time.perf_counter()
    try:
        detail = CRITERIA[i]()
        elapsed = time.perf_counter() - t0
        ok = elapsed < BUDGET[i]
        if not ok:
            detail = f"over budget ({elapsed:.1f}s > {BUDGET[i]:.0f}s)"
    except AssertionError as exc:
        elapsed = time.perf_counter() - t0
        ok, detail = False, f"assertion failed: {exc}"
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {i:2d} ({elapsed:6.2f}s / "
          f"{BUDGET[i]:.0f}s): {detail}")
    return ok, detail


@pytest.mark.parametrize("i", range(1, 11))
def test_criterion(i):
    ok, detail = run_criterion(i)
    assert ok, detail


if __name__ == "__main__":
    results = [run_criterion(i)[0] for i in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
