"""Factor-count bounds derived from the distributivity identity, and their checks.

``r_of_k`` gives the number of factors in
``a & (b o c o b) <= (a & b) o[r] (a & c)`` obtainable from the identity at
``k``; ``build_level_chain`` constructs the corresponding witness chain for a
concrete pair. ``bip_exponent``, ``s_of`` and ``t_of`` are the factor counts
of the tolerance-based route.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import FiniteAlgebra
from .config import Limits
from .dsl import parse_identity
from .identities import (HYPOTHESIS_NOT_MET, MinK, Verdict, alternating_path,
                         check_quantified, find_min_parameter, representable_family)
from .maltsev import TermChain
from .relations import Congruence, all_congruences, intersect

HK3 = "a & (b o c o b) <= (a & b) o[k] c ; forall a, b, c: congruence ; param k"
MAX_ELL = Limits.max_ell


class BoundsError(ValueError):
    pass


def r_of_k(k: int) -> int:
    if k < 3:
        raise BoundsError(f"r_of_k needs k >= 3, got {k}")
    num = k * k - 4 * k + 9 if k % 2 else k * k - 3 * k + 4
    assert num % 2 == 0
    return num // 2


def bip_exponent(k: int, ell: int) -> int:
    """``2 r**(ell-1)`` with ``k`` rounded up to the even number ``2r``."""
    if k < 2 or ell < 2:
        raise BoundsError(f"bip_exponent needs k >= 2 and ell >= 2, got k={k}, ell={ell}")
    r = (k + 1) // 2
    return 2 * r ** (ell - 1)


def s_of(p: int, ell: int) -> int:
    if p < 1 or ell < 2:
        raise BoundsError(f"s_of needs p >= 1 and ell >= 2, got p={p}, ell={ell}")
    return (p - 1) ** 2 * (ell - 1) + 1


def t_of(p: int) -> int:
    if p < 1:
        raise BoundsError(f"t_of needs p >= 1, got {p}")
    t = (p - 1) ** 2 + 1
    assert t == s_of(p, 2)
    return t


def q_of(p: int, ell: int) -> int:
    return (p - 1) * (ell - 1) + 1


# --- hypotheses ------------------------------------------------------------

def hk3_holds(A: FiniteAlgebra, k: int) -> bool:
    return check_quantified(A, parse_identity(HK3), {"k": k}, certify=False).holds


def min_k_on(A: FiniteAlgebra):
    return find_min_parameter(A, parse_identity(HK3))


def _not_met(identity: str, params: dict, why: str) -> Verdict:
    return Verdict(HYPOTHESIS_NOT_MET, identity, params, note=why)


# --- witness chain ---------------------------------------------------------

AB, AG = "a&b", "a&c"


@dataclass
class Link:
    src: int
    dst: int
    label: str
    holds: bool

    def to_json(self) -> dict:
        return {"from": self.src, "via": self.label, "to": self.dst, "holds": self.holds}


@dataclass
class ChainCertificate:
    """Witness that ``(a, d)`` is in ``(a&b) o[r] (a&c)``.

    ``raw`` lists the proof's displayed elements and the relation linking
    consecutive ones ("=", "a&b", "a&c", "c"); ``links`` is the compressed
    chain using only ``a&b`` and ``a&c`` steps, with runs of equal labels
    merged, so ``len(links)`` is the number of factors.
    """
    k: int
    pair: tuple[int, int]
    raw: list[Link] = field(default_factory=list)
    links: list[Link] = field(default_factory=list)
    failure: str | None = None

    @property
    def factors(self) -> int:
        return len(self.links)

    @property
    def verified(self) -> bool:
        return (self.failure is None and all(l.holds for l in self.raw)
                and all(l.holds for l in self.links) and self._connected())

    def _connected(self) -> bool:
        cur = self.pair[0]
        for l in self.links:
            if l.src != cur:
                return False
            cur = l.dst
        return cur == self.pair[1] and (not self.links or self.links[0].label == AB)

    def to_json(self) -> dict:
        return {"k": self.k, "pair": list(self.pair), "factors": self.factors,
                "bound": r_of_k(self.k) if self.k >= 3 else None,
                "verified": self.verified, "failure": self.failure,
                "raw": [l.to_json() for l in self.raw],
                "links": [l.to_json() for l in self.links]}


class LevelChainError(ValueError):
    pass


def build_level_chain(A: FiniteAlgebra, chain: TermChain, a: int, b: int, c: int, d: int,
                      alpha: Congruence, beta: Congruence, gamma: Congruence
                      ) -> ChainCertificate:
    """Witness chain for ``(a, d)`` in ``(alpha&beta) o[r] (alpha&gamma)``.

    Needs ``a alpha d`` and ``a beta b gamma c beta d``. The elements come
    from the terms: ``d_1(a,b,c,d)`` and ``d_i(a,b,b,d)`` for odd ``i``.
    Between consecutive odd-indexed ``d_i(a,b,b,d)`` the pair lies in
    ``alpha & (gamma o alpha&beta o gamma)``; that segment is replaced by an
    alternating ``k``-factor path found in ``A`` (it exists whenever the
    identity holds at ``k`` on ``A``).
    """
    k = chain.k
    if k < 3:
        raise LevelChainError(f"need a chain with k >= 3, got k={k}")
    if (a, d) not in alpha:
        raise LevelChainError(f"({a},{d}) is not in alpha")
    for (u, v), rel, name in (((a, b), beta, "beta"), ((b, c), gamma, "gamma"),
                              ((c, d), beta, "beta")):
        if (u, v) not in rel:
            raise LevelChainError(f"({u},{v}) is not in {name}")

    ab = intersect(alpha, beta)
    ag = intersect(alpha, gamma)
    rels = {"=": None, AB: ab, AG: ag, "c": gamma}
    cert = ChainCertificate(k, (a, d))

    def D(i, *args):
        return chain.d(i, *args)

    def raw(u, v, label):
        R = rels[label]
        ok = (u == v) if R is None else (u, v) in R
        cert.raw.append(Link(u, v, label, ok))

    # compressed chain as a list of (src, dst, label) steps, merged at the end
    steps: list[tuple[int, int, str]] = []

    def segment(u, v, first):
        # u, v joined through c, a&b, c; compress into alternating k factors
        second = AG if first == AB else AB
        mats = [(rels[first] if i % 2 == 0 else rels[second]).matrix for i in range(k)]
        path = alternating_path(mats, u, v)
        if path is None:
            cert.failure = (f"no {first} o[{k}] {second} path from {u} to {v}; "
                            f"the identity fails at k={k} on this algebra")
            return
        for i in range(k):
            steps.append((path[i], path[i + 1], first if i % 2 == 0 else second))

    def expand(i):
        # raw display between d_i(a,b,b,d) (or d_1(a,b,c,d)) and d_{i+2}(a,b,b,d)
        u = D(i, a, b, b, d)
        raw(u, D(i + 1, a, b, b, d), "=")
        raw(D(i + 1, a, b, b, d), D(i + 1, a, b, c, d), "c")
        raw(D(i + 1, a, b, c, d), D(i + 2, a, b, c, d), AB)
        raw(D(i + 2, a, b, c, d), D(i + 2, a, b, b, d), "c")

    e1 = D(1, a, b, c, d)
    raw(a, e1, AB)
    raw(e1, D(1, a, b, b, d), AG)
    steps.append((a, e1, AB))
    if k % 2:
        steps.append((e1, D(1, a, b, b, d), AG))
        for i in range(1, k - 3, 2):
            expand(i)
            segment(D(i, a, b, b, d), D(i + 2, a, b, b, d), AG)
        u = D(k - 2, a, b, b, d)
        raw(u, D(k - 1, a, b, b, d), "=")
        v = D(k - 1, a, b, c, d)
        raw(D(k - 1, a, b, b, d), v, AG)
        raw(v, d, AB)
        steps.append((D(k - 1, a, b, b, d), v, AG))
        steps.append((v, d, AB))
    else:
        first = AB
        for n_seg, i in enumerate(range(1, k - 2, 2)):
            expand(i)
            src = e1 if n_seg == 0 else D(i, a, b, b, d)
            segment(src, D(i + 2, a, b, b, d), first)
            first = AG if first == AB else AB
        raw(D(k - 1, a, b, b, d), D(k, a, b, b, d), "=")
        raw(D(k, a, b, b, d), d, "=")
    if cert.failure is None:
        cert.links = _merge(steps, {AB: ab, AG: ag}, a)
    return cert


def _merge(steps: Sequence[tuple[int, int, str]], rels, start: int) -> list[Link]:
    """Drop trivial steps and fuse runs of the same transitive relation."""
    runs: list[list] = []
    for u, v, label in steps:
        if u == v:
            continue
        if runs and runs[-1][2] == label and runs[-1][1] == u:
            runs[-1][1] = v
        else:
            runs.append([u, v, label])
    if runs and runs[0][2] != AB:
        runs.insert(0, [start, start, AB])
    return [Link(u, v, lab, (u, v) in rels[lab]) for u, v, lab in runs]


# --- quantified checks -----------------------------------------------------

def check_level_identity(A: FiniteAlgebra, k: int, jobs: int = 1) -> Verdict:
    r = r_of_k(k)
    text = f"a & (b o c o b) <= (a & b) o[{r}] (a & c) ; forall a, b, c: congruence"
    if not hk3_holds(A, k):
        return _not_met(text, {"k": k}, f"the identity fails on A at k={k}")
    v = check_quantified(A, parse_identity(text), jobs=jobs)
    v.params = {"k": k, "r": r}
    return v


def check_nte(A: FiniteAlgebra, k: int, max_pairs: int = 2,
              deltas: Sequence | None = None, jobs: int = 1) -> Verdict:
    """``a & (D o c o D) <= (a & D) o[k] c`` for congruences ``a, c`` and
    representable tolerances ``D`` (sampled, or ``deltas`` if given)."""
    text = ("a & (D o c o D) <= (a & D) o[k] c ; forall a: congruence ; "
            "forall D: representable ; forall c: congruence ; param k")
    if not hk3_holds(A, k):
        return _not_met(text, {"k": k}, f"the identity fails on A at k={k}")
    fam = {"D": list(deltas) if deltas is not None else representable_family(A, max_pairs)}
    v = check_quantified(A, parse_identity(text), {"k": k}, families=fam, jobs=jobs)
    if deltas is None:
        v.note = f"representable tolerances from admissible relations on <= {max_pairs} pairs"
    return v


def check_bip(A: FiniteAlgebra, k: int, ell: int, max_ell: int = MAX_ELL,
              jobs: int = 1) -> Verdict:
    if ell > max_ell:
        raise BoundsError(f"ell={ell} exceeds the composition budget (max {max_ell})")
    e = bip_exponent(k, ell)
    text = (f"a & (b o[{2 ** ell - 1}] c) <= (a & b) o[{e}] c ; "
            f"forall a, b, c: congruence")
    if not hk3_holds(A, k):
        return _not_met(text, {"k": k, "ell": ell}, f"the identity fails on A at k={k}")
    v = check_quantified(A, parse_identity(text), jobs=jobs)
    v.params = {"k": k, "ell": ell, "exponent": e}
    return v


def check_cor(A: FiniteAlgebra, p: int, ell: int, max_ell: int = MAX_ELL,
              jobs: int = 1) -> Verdict:
    if ell > max_ell:
        raise BoundsError(f"ell={ell} exceeds the composition budget (max {max_ell})")
    s = s_of(p, ell)
    text = (f"a & (b o[{2 ** ell - 1}] c) <= (a & b) o[{2 ** s + 1}] (a & c) ; "
            f"forall a, b, c: congruence")
    found = min_k_on(A)
    if not isinstance(found, MinK) or found.k > 2 ** p:
        return _not_met(text, {"p": p, "ell": ell},
                        f"no k <= 2^{p} for which the identity holds on A")
    v = check_quantified(A, parse_identity(text), jobs=jobs)
    v.params = {"p": p, "ell": ell, "s": s, "k": found.k}
    return v


def sample_level_certificates(A: FiniteAlgebra, chain: TermChain, count: int,
                              rng: np.random.Generator) -> list[ChainCertificate]:
    """Random instances of ``a alpha d``, ``a beta b gamma c beta d`` and
    their certificates."""
    congs = all_congruences(A)
    out = []
    n = A.size
    while len(out) < count:
        al, be, ga = (congs[int(i)] for i in rng.integers(len(congs), size=3))
        quads = [(a, b, c, d) for a in range(n) for b in range(n) for c in range(n)
                 for d in range(n) if (a, d) in al and (a, b) in be and (b, c) in ga
                 and (c, d) in be]
        a, b, c, d = quads[int(rng.integers(len(quads)))]
        out.append(build_level_chain(A, chain, a, b, c, d, al, be, ga))
    return out


def bound_table(ks: Sequence[int]) -> list[tuple[int, int]]:
    return [(k, r_of_k(k)) for k in ks]

