"""The distributivity condition in F(4), witness terms, and their equations.

In the free algebra on ``x, y, z, w`` take ``alpha = Cg(x,w)``,
``beta = Cg((x,y),(z,w))`` and ``gamma = Cg(y,z)``. The variety is congruence
distributive with parameter ``k`` exactly when ``(x, w)`` lies in
``(alpha & beta) o[k] gamma``; a witnessing path ``x = e_0, ..., e_k = w`` read
as 4-ary term operations gives terms ``d_0, ..., d_k`` with

    (a) d_0(x,y,z,w) = x
    (b) d_i(x,x,w,w) = d_{i+1}(x,x,w,w)   i even
    (c) d_i(x,y,z,x) = d_{i+1}(x,y,z,x)   i even
    (d) d_i(x,y,y,w) = d_{i+1}(x,y,y,w)   i odd
    (e) d_k(x,y,z,w) = w

and consequently (f) d_i(x,y,y,x) = x for all i.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import FiniteAlgebra, Term
from .free import (FreeAlgebra, free_algebra, projections,
                   term_expression_of, term_to_table)
from .identities import MinK, NoK, Undetermined, alternating_path
from .relations import Congruence, cg, chain_fixpoint, intersect


# majority term of every lattice, in the variables u, v, t
LATTICE_MAJORITY = "join(join(meet(u,v),meet(v,t)),meet(u,t))"


class ChainError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class ConditionIISetup:
    F: FreeAlgebra
    algebra: FiniteAlgebra
    alpha: Congruence
    beta: Congruence
    gamma: Congruence
    x: int
    y: int
    z: int
    w: int

    @property
    def alpha_beta(self) -> Congruence:
        return intersect(self.alpha, self.beta)


def condition_ii_setup(A: FiniteAlgebra, cap: int | None = None,
                       F: FreeAlgebra | None = None) -> ConditionIISetup:
    F = free_algebra(A, cap) if F is None else F
    FA = F.as_algebra()
    x, y, z, w = F.generator_ids
    alpha = cg(FA, [(x, w)])
    beta = cg(FA, [(x, y), (z, w)])
    gamma = cg(FA, [(y, z)])
    assert (x, w) in alpha
    # x beta y gamma z beta w
    assert (x, y) in beta and (y, z) in gamma and (z, w) in beta
    return ConditionIISetup(F, FA, alpha, beta, gamma, x, y, z, w)


def _factors(setup: ConditionIISetup, k: int) -> list[np.ndarray]:
    ab, g = setup.alpha_beta.matrix, setup.gamma.matrix
    return [ab if i % 2 == 0 else g for i in range(k)]


def decide_condition_ii(A: FiniteAlgebra | ConditionIISetup, k_max: int | None = None,
                        cap: int | None = None) -> MinK | NoK | Undetermined:
    """Least ``k`` with ``(x, w)`` in ``(alpha & beta) o[k] gamma`` inside F(4).

    ``NoK`` comes from the chain limit (the join ``alpha & beta + gamma``), so
    it is independent of ``k_max``.
    """
    setup = A if isinstance(A, ConditionIISetup) else condition_ii_setup(A, cap)
    ab, g = setup.alpha_beta, setup.gamma
    limit, k_stab = chain_fixpoint(ab, g)
    if (setup.x, setup.w) not in limit:
        return NoK("(x, w) is outside the join of alpha & beta and gamma")
    reach = ab.matrix[setup.x].copy()
    k = 1
    while not reach[setup.w]:
        reach = reach @ (g.matrix if k % 2 else ab.matrix)
        k += 1
        assert k <= k_stab + 2
    if k_max is not None and k > k_max:
        return Undetermined(k_max)
    return MinK(k)


@dataclass(frozen=True, eq=False)
class TermChain:
    """Term operations ``d_0..d_k`` as flat tables over ``A**4``."""
    tables: tuple[np.ndarray, ...]
    terms: tuple[Term | None, ...] = ()
    element_ids: tuple[int, ...] = ()

    @property
    def k(self) -> int:
        return len(self.tables) - 1

    def d(self, i: int, x: int, y: int, z: int, w: int) -> int:
        t = self.tables[i]
        n = round(len(t) ** 0.25)
        return int(t[((x * n + y) * n + z) * n + w])

    def padded(self, k: int) -> "TermChain":
        """Repeat the last term until there are ``k + 1`` of them."""
        if k < self.k:
            raise ValueError(f"cannot pad a chain of length {self.k} down to {k}")
        extra = k - self.k
        terms = self.terms + (self.terms[-1:] * extra if self.terms else ())
        ids = self.element_ids + (self.element_ids[-1:] * extra if self.element_ids else ())
        return TermChain(self.tables + (self.tables[-1],) * extra, terms, ids)

    def replaced(self, i: int, table: np.ndarray) -> "TermChain":
        tables = list(self.tables)
        tables[i] = np.asarray(table)
        terms = list(self.terms) if self.terms else []
        if terms:
            terms[i] = None
        return TermChain(tuple(tables), tuple(terms), ())


def extract_terms(setup: ConditionIISetup, k: int, pad_to: int | None = None) -> TermChain:
    path = alternating_path(_factors(setup, k), setup.x, setup.w)
    if path is None:
        raise ChainError(f"no alternating path of length {k} from x to w")
    F = setup.F
    chain = TermChain(tuple(np.asarray(F.elements[e].values, dtype=np.int64) for e in path),
                      tuple(term_expression_of(F, e) for e in path), tuple(path))
    return chain.padded(pad_to) if pad_to is not None else chain


def chain_from_terms(A: FiniteAlgebra, terms: Sequence[Term]) -> TermChain:
    """Build a chain from explicit 4-ary terms in ``x, y, z, w``."""
    return TermChain(tuple(term_to_table(A, t) for t in terms), tuple(terms))


def majority_chain(A: FiniteAlgebra, majority: Term) -> TermChain:
    """``x, m(x,y,w), m(x,z,w), w`` for a majority term ``m(u,v,t)`` written in
    the variables ``u, v, t``."""
    from .algebra import Application, Variable

    def subst(t: Term, env: dict) -> Term:
        if isinstance(t, Variable):
            return env.get(t.name, t)
        return Application(t.op, tuple(subst(a, env) for a in t.args))

    X, Y, Z, W = (Variable(v) for v in "xyzw")
    return chain_from_terms(A, [X, subst(majority, {"u": X, "v": Y, "t": W}),
                                subst(majority, {"u": X, "v": Z, "t": W}), W])


# --- equations -------------------------------------------------------------

@dataclass
class EquationResult:
    label: str
    index: int | None
    holds: bool
    substitution: dict | None = None
    values: tuple[int, int] | None = None

    def to_json(self) -> dict:
        out = {"equation": self.label, "i": self.index, "holds": self.holds}
        if self.substitution is not None:
            out["substitution"] = self.substitution
            out["values"] = list(self.values)
        return out


@dataclass
class ChainReport:
    results: list[EquationResult] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(r.holds for r in self.results)

    def __bool__(self):
        return self.holds

    def by_label(self) -> dict[str, bool]:
        out: dict[str, bool] = {}
        for r in self.results:
            out[r.label] = out.get(r.label, True) and r.holds
        return out

    def failures(self) -> list[EquationResult]:
        return [r for r in self.results if not r.holds]

    def to_json(self) -> dict:
        return {"holds": self.holds, "equations": self.by_label(),
                "failures": [r.to_json() for r in self.failures()]}


def _cube(A: FiniteAlgebra, chain: TermChain) -> list[np.ndarray]:
    n = A.size
    out = []
    for t in chain.tables:
        t = np.asarray(t)
        if t.size != n ** 4:
            raise ChainError(f"term table has {t.size} entries, expected {n ** 4}")
        out.append(t.reshape((n,) * 4))
    return out


def _compare(label: str, i: int | None, names: str, left: np.ndarray,
             right: np.ndarray) -> EquationResult:
    """``left``/``right`` are arrays indexed by the free variables in ``names``."""
    bad = np.argwhere(left != right)
    if bad.size == 0:
        return EquationResult(label, i, True)
    first = tuple(int(v) for v in bad[0])
    return EquationResult(label, i, False, dict(zip(names, first)),
                          (int(left[first]), int(right[first])))


def _equation(D: list[np.ndarray], label: str, i: int, n: int) -> EquationResult:
    r = np.arange(n)
    if label == "a":
        return _compare("a", 0, "xyzw", D[0], projections(n)[0].reshape((n,) * 4))
    if label == "e":
        return _compare("e", len(D) - 1, "xyzw", D[-1], projections(n)[3].reshape((n,) * 4))
    if label == "b":
        X, W = np.ix_(r, r)
        return _compare("b", i, "xw", D[i][X, X, W, W], D[i + 1][X, X, W, W])
    if label == "c":
        X, Y, Z = np.ix_(r, r, r)
        return _compare("c", i, "xyz", D[i][X, Y, Z, X], D[i + 1][X, Y, Z, X])
    if label == "d":
        X, Y, W = np.ix_(r, r, r)
        return _compare("d", i, "xyw", D[i][X, Y, Y, W], D[i + 1][X, Y, Y, W])
    if label == "f":
        X, Y = np.ix_(r, r)
        return _compare("f", i, "xy", D[i][X, Y, Y, X], np.broadcast_to(X, (n, n)))
    raise ValueError(label)


def verify_term_chain(A: FiniteAlgebra, chain: TermChain) -> ChainReport:
    """Check (a)-(e) exhaustively on ``A``; equations of V = HSP(A) hold
    exactly when they hold in ``A``."""
    D = _cube(A, chain)
    n, k = A.size, chain.k
    rep = ChainReport()
    rep.results.append(_equation(D, "a", 0, n))
    for i in range(0, k, 2):
        rep.results.append(_equation(D, "b", i, n))
    for i in range(0, k, 2):
        rep.results.append(_equation(D, "c", i, n))
    for i in range(1, k, 2):
        rep.results.append(_equation(D, "d", i, n))
    rep.results.append(_equation(D, "e", k, n))
    return rep


def verify_condition_f(A: FiniteAlgebra, chain: TermChain) -> ChainReport:
    D = _cube(A, chain)
    return ChainReport([_equation(D, "f", i, A.size) for i in range(chain.k + 1)])


def verify_day_conditions(A: FiniteAlgebra, chain: TermChain) -> ChainReport:
    """Day's scheme for modularity: (a), (b), (d), (e) together with (f)."""
    main = verify_term_chain(A, chain)
    keep = [r for r in main.results if r.label in ("a", "b", "d", "e")]
    return ChainReport(keep + verify_condition_f(A, chain).results)
