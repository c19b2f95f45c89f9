"""Evaluating and checking quantified congruence identities on a finite algebra."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .algebra import FiniteAlgebra
from .dsl import (Comp, CompK, Conv, IdentityAST, Join, Meet, RelExpr, Var,
                  expr_to_text, parse_expr, pretty_print, walk)
from .relations import (BinaryRelation, Congruence, all_congruences, chain_fixpoint,
                        circ_h, compatible_closure, compose, converse,
                        equivalence_closure, intersect, representable_tolerance,
                        union)

HOLDS = "holds"
FAILS = "fails"
HYPOTHESIS_NOT_MET = "hypothesis-not-met"


class IdentityError(ValueError):
    pass


# --- evaluation ------------------------------------------------------------

def evaluate(expr: RelExpr, binding: Mapping[str, BinaryRelation],
             params: Mapping[str, int] | None = None, *, limits: bool = False,
             stab: list[int] | None = None) -> BinaryRelation:
    """Evaluate ``expr`` structurally.

    With ``limits=True`` every ``o[k]`` is replaced by the stabilized chain
    ``lim_h circ_h``; the stabilization indices are appended to ``stab``.
    """
    params = params or {}
    sizes = {R.size for R in binding.values()}
    if len(sizes) > 1:
        raise IdentityError(f"bound relations have different sizes {sorted(sizes)}")

    def ev(e: RelExpr) -> BinaryRelation:
        if isinstance(e, Var):
            try:
                return binding[e.name]
            except KeyError:
                raise IdentityError(f"no relation bound to {e.name!r}") from None
        if isinstance(e, Conv):
            return converse(ev(e.arg))
        left, right = ev(e.left), ev(e.right)
        if isinstance(e, Meet):
            return intersect(left, right)
        if isinstance(e, Join):
            return equivalence_closure(union(left, right))
        if isinstance(e, Comp):
            return compose(left, right)
        if isinstance(e, CompK):
            if limits:
                limit, k = chain_fixpoint(left, right)
                if stab is not None:
                    stab.append(k)
                return limit
            return circ_h(left, right, _count(e.count, params))
        raise TypeError(f"not a relation expression: {e!r}")

    return ev(expr)


def _count(count: int | str, params: Mapping[str, int]) -> int:
    if isinstance(count, int):
        return count
    try:
        return int(params[count])
    except KeyError:
        raise IdentityError(f"no value for parameter {count!r}") from None


# --- certificates ----------------------------------------------------------

def alternating_path(mats: Sequence[np.ndarray], a: int, b: int) -> list[int] | None:
    """Elements ``a = e_0, ..., e_m = b`` with ``(e_i, e_{i+1})`` in ``mats[i]``.

    Backtracks from ``b`` through forward reachability layers, taking the
    least admissible predecessor each time. ``None`` if there is no path.
    """
    n = mats[0].shape[0] if mats else 0
    layers = [np.zeros(n, dtype=bool)]
    layers[0][a] = True
    for M in mats:
        layers.append(layers[-1] @ M)
    if not mats:
        return [a] if a == b else None
    if not layers[-1][b]:
        return None
    path = [b]
    for i in range(len(mats) - 1, -1, -1):
        cands = np.flatnonzero(layers[i] & mats[i][:, path[-1]])
        path.append(int(cands[0]))
    path.reverse()
    return path


def membership_chain(expr: RelExpr, binding: Mapping[str, BinaryRelation],
                     params: Mapping[str, int], a: int, b: int) -> list[dict]:
    """Witness steps for ``(a, b)`` in ``expr``, splitting compositions."""
    if isinstance(expr, Comp):
        L = evaluate(expr.left, binding, params).matrix
        R = evaluate(expr.right, binding, params).matrix
        path = alternating_path([L, R], a, b)
        assert path is not None
        return (membership_chain(expr.left, binding, params, path[0], path[1])
                + membership_chain(expr.right, binding, params, path[1], path[2]))
    if isinstance(expr, CompK):
        L = evaluate(expr.left, binding, params)
        R = evaluate(expr.right, binding, params)
        k = _count(expr.count, params)
        ops = [expr.left if i % 2 == 0 else expr.right for i in range(k)]
        path = alternating_path([(L if i % 2 == 0 else R).matrix for i in range(k)], a, b)
        assert path is not None
        return [{"from": path[i], "via": expr_to_text(ops[i]), "to": path[i + 1]}
                for i in range(k)]
    step = {"from": a, "via": expr_to_text(expr), "to": b}
    if isinstance(expr, Meet):
        step["parts"] = [membership_chain(expr.left, binding, params, a, b),
                         membership_chain(expr.right, binding, params, a, b)]
    return [step]


def verify_chain(steps: Iterable[Mapping[str, Any]], binding: Mapping[str, BinaryRelation],
                 params: Mapping[str, int], a: int, b: int) -> bool:
    cur = a
    for s in steps:
        if s["from"] != cur:
            return False
        rel = evaluate(parse_expr(s["via"]), binding, params)
        if (s["from"], s["to"]) not in rel:
            return False
        for part in s.get("parts", ()):
            if not verify_chain(part, binding, params, s["from"], s["to"]):
                return False
        cur = s["to"]
    return cur == b


@dataclass
class Verdict:
    status: str
    identity: str
    params: dict[str, int] = field(default_factory=dict)
    counterexample: dict | None = None
    certificate: list[dict] | None = None
    bindings_checked: int = 0
    family_sizes: dict[str, int] = field(default_factory=dict)
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def __bool__(self):
        return self.holds

    def to_json(self) -> dict:
        out = {"status": self.status, "identity": self.identity, "params": dict(self.params),
               "bindings_checked": self.bindings_checked,
               "family_sizes": dict(self.family_sizes)}
        if self.note:
            out["note"] = self.note
        if self.counterexample is not None:
            cx = self.counterexample
            out["counterexample"] = {
                "pair": list(cx["pair"]),
                "binding": {v: relation_to_json(R) for v, R in cx["binding"].items()},
            }
        if self.certificate is not None:
            out["certificate"] = self.certificate
        return out


def relation_to_json(R: BinaryRelation) -> dict:
    if isinstance(R, Congruence):
        return {"size": R.size, "partition": [list(b) for b in R.blocks]}
    return {"size": R.size, "pairs": [list(p) for p in R.pairs()]}


def relation_from_json(doc: Mapping[str, Any]) -> BinaryRelation:
    if "partition" in doc:
        return Congruence.from_blocks(doc["size"], doc["partition"])
    return BinaryRelation.from_pairs(doc["size"], doc["pairs"])


def recheck_counterexample(A: FiniteAlgebra, identity: IdentityAST,
                           params: Mapping[str, int], cx: Mapping[str, Any],
                           certificate: Sequence[Mapping] | None = None) -> bool:
    """Recompute from scratch: the pair lies in the left side and not in the
    right side under the recorded binding, and the chain (if any) checks."""
    binding = {v: relation_from_json(d) if isinstance(d, Mapping) else d
               for v, d in cx["binding"].items()}
    if set(binding) != set(identity.variables):
        return False
    if any(R.size != A.size for R in binding.values()):
        return False
    for v, R in binding.items():
        if not _member_of_sort(A, R, identity.sort_of(v)):
            return False
    a, b = cx["pair"]
    allp = {**identity.param_defaults(), **params}
    if (a, b) not in evaluate(identity.lhs, binding, allp):
        return False
    if (a, b) in evaluate(identity.rhs, binding, allp):
        return False
    if certificate is not None and not verify_chain(certificate, binding, allp, a, b):
        return False
    return True


def _member_of_sort(A: FiniteAlgebra, R: BinaryRelation, sort: str) -> bool:
    from .relations import is_congruence, is_tolerance
    if sort == "congruence":
        return is_congruence(A, R)
    if sort in ("tolerance", "representable"):
        return is_tolerance(A, R)
    return True


# --- quantified families ---------------------------------------------------

def pair_sets(n: int, max_pairs: int) -> Iterable[tuple[tuple[int, int], ...]]:
    offdiag = [(a, b) for a in range(n) for b in range(n) if a != b]
    for size in range(max_pairs + 1):
        yield from itertools.combinations(offdiag, size)


def representable_family(A: FiniteAlgebra, max_pairs: int = 2) -> list[BinaryRelation]:
    """Tolerances ``R o R^-1`` for ``R`` the admissible relation generated by at
    most ``max_pairs`` pairs; deduplicated, first-seen order."""
    seen: dict[BinaryRelation, None] = {}
    for ps in pair_sets(A.size, max_pairs):
        _, D = representable_tolerance(A, ps)
        seen.setdefault(D, None)
    return list(seen)


def tolerance_family(A: FiniteAlgebra, max_pairs: int = 2) -> list[BinaryRelation]:
    """Tolerances generated by at most ``max_pairs`` pairs."""
    seen: dict[BinaryRelation, None] = {}
    for ps in pair_sets(A.size, max_pairs):
        sym = list(ps) + [(b, a) for a, b in ps]
        T = compatible_closure(A, BinaryRelation.from_pairs(A.size, sym))
        seen.setdefault(BinaryRelation(T.matrix), None)
    return list(seen)


def families_for(A: FiniteAlgebra, ast: IdentityAST, max_pairs: int = 2,
                 overrides: Mapping[str, Sequence[BinaryRelation]] | None = None,
                 congruence_bound: int = 60) -> dict[str, list[BinaryRelation]]:
    overrides = dict(overrides or {})
    cache: dict[str, list[BinaryRelation]] = {}
    out = {}
    for v, sort in ast.quantifiers:
        if v in overrides:
            out[v] = list(overrides[v])
            continue
        if sort not in cache:
            if sort == "congruence":
                cache[sort] = list(all_congruences(A, congruence_bound))
            elif sort == "tolerance":
                cache[sort] = tolerance_family(A, max_pairs)
            elif sort == "representable":
                cache[sort] = representable_family(A, max_pairs)
            else:
                raise IdentityError(f"quantification over sort {sort!r} is not supported")
        out[v] = cache[sort]
    return out


def _check_join_sorts(ast: IdentityAST, overrides) -> None:
    for side in (ast.lhs, ast.rhs):
        for node in walk(side):
            if isinstance(node, Join):
                for inner in walk(node):
                    if (isinstance(inner, Var) and ast.sort_of(inner.name) != "congruence"
                            and inner.name not in (overrides or {})):
                        raise IdentityError(
                            f"join is only defined for congruences; {inner.name!r} is a "
                            f"{ast.sort_of(inner.name)}")


def check_quantified(A: FiniteAlgebra, ast: IdentityAST,
                     params: Mapping[str, int] | None = None, *, max_pairs: int = 2,
                     families: Mapping[str, Sequence[BinaryRelation]] | None = None,
                     jobs: int = 1, certify: bool = True) -> Verdict:
    """Check ``lhs <= rhs`` for every binding, in quantifier order.

    The first failing binding (left-most variable varies slowest) and the
    lexicographically least offending pair are reported.
    """
    allp = {**ast.param_defaults(), **(params or {})}
    for p, _ in ast.params:
        if p not in allp:
            raise IdentityError(f"no value for parameter {p!r}")
    _check_join_sorts(ast, families)
    fam = families_for(A, ast, max_pairs, families)
    names = ast.variables
    text = pretty_print(ast)

    def test(combo):
        binding = dict(zip(names, combo))
        L = evaluate(ast.lhs, binding, allp)
        R = evaluate(ast.rhs, binding, allp)
        bad = L.matrix & ~R.matrix
        if bad.any():
            a, b = np.argwhere(bad)[0]
            return binding, (int(a), int(b))
        return None

    combos = itertools.product(*(fam[v] for v in names))
    checked = 0
    failure = None
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            while failure is None:
                batch = list(itertools.islice(combos, 256))
                if not batch:
                    break
                for res in pool.map(test, batch):
                    checked += 1
                    if res is not None:
                        failure = res
                        break
    else:
        for combo in combos:
            checked += 1
            failure = test(combo)
            if failure is not None:
                break
    sizes = {v: len(fam[v]) for v in names}
    if failure is None:
        return Verdict(HOLDS, text, allp, bindings_checked=checked, family_sizes=sizes)
    binding, pair = failure
    cert = membership_chain(ast.lhs, binding, allp, *pair) if certify else None
    return Verdict(FAILS, text, allp, {"binding": binding, "pair": pair}, cert,
                   bindings_checked=checked, family_sizes=sizes)


# --- parameter search ------------------------------------------------------

@dataclass(frozen=True)
class MinK:
    k: int


@dataclass(frozen=True)
class NoK:
    reason: str = ""
    counterexample: dict | None = None


@dataclass(frozen=True)
class Undetermined:
    k_max: int


def _params_in(e: RelExpr) -> set[str]:
    return {n.count for n in walk(e) if isinstance(n, CompK) and isinstance(n.count, str)}


def find_min_parameter(A: FiniteAlgebra, ast: IdentityAST, k_max: int | None = None, *,
                       max_pairs: int = 2,
                       families: Mapping[str, Sequence[BinaryRelation]] | None = None
                       ) -> MinK | NoK | Undetermined:
    """Least value of the single parameter for which the identity holds.

    ``NoK`` is decided with every ``o[k]`` replaced by its chain limit, so it
    does not depend on ``k_max``.
    """
    if len(ast.params) != 1:
        raise IdentityError("exactly one parameter is required")
    p = ast.params[0][0]
    if p in _params_in(ast.lhs):
        raise IdentityError(f"parameter {p!r} must occur only on the right-hand side")
    _check_join_sorts(ast, families)
    fam = families_for(A, ast, max_pairs, families)
    names = ast.variables
    stab: list[int] = []
    for combo in itertools.product(*(fam[v] for v in names)):
        binding = dict(zip(names, combo))
        for R in combo:
            if not R.is_reflexive():
                raise IdentityError("parameter search needs reflexive relations")
        L = evaluate(ast.lhs, binding)
        R = evaluate(ast.rhs, binding, limits=True, stab=stab)
        bad = L.matrix & ~R.matrix
        if bad.any():
            a, b = np.argwhere(bad)[0]
            return NoK("fails even with every composition chain at its limit",
                       {"binding": binding, "pair": (int(a), int(b))})
    bound = max(stab, default=1) if k_max is None else k_max
    for k in range(1, bound + 1):
        if check_quantified(A, ast, {p: k}, families=families, max_pairs=max_pairs,
                            certify=False).holds:
            return MinK(k)
    return Undetermined(bound)
