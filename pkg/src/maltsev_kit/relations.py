"""Binary relations on ``0..n-1`` and the congruence machinery built on them.

Relations are boolean ``n x n`` matrices. Congruences additionally carry a
canonical partition: ``labels[i]`` is the least element of the block of ``i``.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .algebra import FiniteAlgebra


class RelationError(ValueError):
    pass


class BinaryRelation:
    __slots__ = ("matrix", "__dict__")

    def __init__(self, matrix):
        m = np.array(matrix, dtype=bool)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise RelationError(f"relation matrix must be square, got shape {m.shape}")
        m.setflags(write=False)
        self.matrix = m

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, n: int) -> "BinaryRelation":
        return BinaryRelation(np.eye(n, dtype=bool))

    @classmethod
    def full(cls, n: int) -> "BinaryRelation":
        return BinaryRelation(np.ones((n, n), dtype=bool))

    @classmethod
    def empty(cls, n: int) -> "BinaryRelation":
        return BinaryRelation(np.zeros((n, n), dtype=bool))

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Sequence[int]]) -> "BinaryRelation":
        m = np.zeros((n, n), dtype=bool)
        for a, b in pairs:
            if not (0 <= a < n and 0 <= b < n):
                raise RelationError(f"pair ({a},{b}) out of range for n={n}")
            m[a, b] = True
        return BinaryRelation(m)

    def pairs(self) -> list[tuple[int, int]]:
        return [(int(a), int(b)) for a, b in zip(*np.nonzero(self.matrix))]

    def __contains__(self, pair) -> bool:
        a, b = pair
        return bool(self.matrix[a, b])

    def __eq__(self, other):
        if not isinstance(other, BinaryRelation):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and bool(
            (self.matrix == other.matrix).all())

    def __hash__(self):
        return hash((self.size, self.matrix.tobytes()))

    def __le__(self, other: "BinaryRelation") -> bool:
        _same_size(self, other)
        return not bool((self.matrix & ~other.matrix).any())

    def __len__(self):
        return int(self.matrix.sum())

    def __repr__(self):
        return f"{type(self).__name__}({self.pairs()!r})"

    def is_reflexive(self) -> bool:
        return bool(self.matrix.diagonal().all())

    def is_symmetric(self) -> bool:
        return bool((self.matrix == self.matrix.T).all())

    def is_transitive(self) -> bool:
        return compose(self, self) <= self


class Congruence(BinaryRelation):
    """An equivalence relation stored both as matrix and canonical partition.

    Compatibility with an algebra is not checked here; constructors in this
    module (``cg``, ``join``, ``all_congruences``, meets) only produce
    compatible ones.
    """

    def __init__(self, labels: Sequence[int]):
        labels = canonical_labels(labels)
        self.labels = labels
        lab = np.asarray(labels)
        super().__init__(lab[:, None] == lab[None, :])

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "Congruence":
        labels = list(range(n))
        for block in blocks:
            block = sorted(block)
            for b in block:
                labels[b] = block[0]
        return cls(labels)

    @classmethod
    def identity(cls, n: int) -> "Congruence":
        return cls(range(n))

    @classmethod
    def full(cls, n: int) -> "Congruence":
        return cls([0] * n)

    @cached_property
    def blocks(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for i, r in enumerate(self.labels):
            out.setdefault(r, []).append(i)
        return list(out.values())

    def __str__(self):
        return "|".join("".join(map(str, b)) if self.size <= 10 else ",".join(map(str, b))
                        for b in self.blocks)

    def __repr__(self):
        return f"Congruence({str(self)!r})"


class Tolerance(BinaryRelation):
    """Reflexive, symmetric, compatible relation."""


class AdmissibleRelation(BinaryRelation):
    """Reflexive compatible relation."""


def canonical_labels(labels: Sequence[int]) -> tuple[int, ...]:
    """Relabel so each element points at the least member of its class."""
    first: dict[int, int] = {}
    out = []
    for i, lab in enumerate(labels):
        out.append(first.setdefault(int(lab), i))
    return tuple(out)


def _same_size(R: BinaryRelation, S: BinaryRelation) -> None:
    if R.size != S.size:
        raise RelationError(f"size mismatch: {R.size} vs {S.size}")


def compose(R: BinaryRelation, S: BinaryRelation) -> BinaryRelation:
    _same_size(R, S)
    return BinaryRelation(R.matrix @ S.matrix)


def converse(R: BinaryRelation) -> BinaryRelation:
    if isinstance(R, Congruence):
        return R
    return BinaryRelation(R.matrix.T)


def intersect(R: BinaryRelation, S: BinaryRelation) -> BinaryRelation:
    _same_size(R, S)
    if isinstance(R, Congruence) and isinstance(S, Congruence):
        n = R.size
        return Congruence([a * n + b for a, b in zip(R.labels, S.labels)])
    return BinaryRelation(R.matrix & S.matrix)


def union(R: BinaryRelation, S: BinaryRelation) -> BinaryRelation:
    _same_size(R, S)
    return BinaryRelation(R.matrix | S.matrix)


def circ_h(B: BinaryRelation, G: BinaryRelation, h: int) -> BinaryRelation:
    """``B o G o B o ...`` with exactly ``h`` factors."""
    _same_size(B, G)
    if h < 1:
        raise RelationError(f"circ_h needs h >= 1, got {h}")
    m = B.matrix
    for i in range(1, h):
        m = m @ (G.matrix if i % 2 else B.matrix)
    return BinaryRelation(m)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True

    def labels(self) -> tuple[int, ...]:
        return canonical_labels([self.find(i) for i in range(len(self.parent))])


def equivalence_closure(R: BinaryRelation) -> Congruence:
    uf = _UnionFind(R.size)
    for a, b in zip(*np.nonzero(R.matrix)):
        uf.union(int(a), int(b))
    return Congruence(uf.labels())


def _translations(A: FiniteAlgebra, a: int, b: int):
    """Pairs ``(t(a), t(b))`` for every basic translation ``t`` of ``A``."""
    for arr in A.arrays:
        for pos in range(arr.ndim):
            ta = np.take(arr, a, axis=pos).ravel()
            tb = np.take(arr, b, axis=pos).ravel()
            diff = ta != tb
            if diff.any():
                yield from zip(ta[diff].tolist(), tb[diff].tolist())


def cg(A: FiniteAlgebra, pairs: Iterable[Sequence[int]]) -> Congruence:
    """Least congruence of ``A`` containing ``pairs``.

    Worklist form of alternating equivalence closure and compatibility
    propagation: each newly merged pair is pushed through every basic
    translation, which for an equivalence relation is the same as
    compatibility with the operations.
    """
    n = A.size
    uf = _UnionFind(n)
    work = []
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise RelationError(f"pair ({a},{b}) out of range for n={n}")
        if uf.union(a, b):
            work.append((a, b))
    while work:
        a, b = work.pop()
        for u, v in _translations(A, a, b):
            if uf.union(u, v):
                work.append((u, v))
    return Congruence(uf.labels())


def is_compatible(A: FiniteAlgebra, R: BinaryRelation) -> bool:
    """Componentwise closure of ``R`` under every operation (no reflexivity
    assumption)."""
    prs = R.pairs()
    for o, arr in zip(A.operations, A.arrays):
        if o.arity == 0:
            c = o.table[0]
            if not R.matrix[c, c]:
                return False
            continue
        if not prs:
            continue
        P = np.asarray(prs)
        for combo in itertools.product(range(len(prs)), repeat=o.arity):
            idx = P[list(combo)]
            if not R.matrix[arr[tuple(idx[:, 0])], arr[tuple(idx[:, 1])]]:
                return False
    return True


def is_congruence(A: FiniteAlgebra, R: BinaryRelation) -> bool:
    if not (R.is_reflexive() and R.is_symmetric() and R.is_transitive()):
        return False
    # for an equivalence, closure under basic translations suffices
    for a, b in R.pairs():
        if a < b:
            for u, v in _translations(A, a, b):
                if not R.matrix[u, v]:
                    return False
    return True


def is_tolerance(A: FiniteAlgebra, R: BinaryRelation) -> bool:
    return R.is_reflexive() and R.is_symmetric() and is_compatible(A, R)


def compatible_closure(A: FiniteAlgebra, R: BinaryRelation) -> AdmissibleRelation:
    """Least reflexive compatible relation containing ``R``: the subuniverse
    of ``A x A`` generated by ``R`` and the diagonal."""
    n = A.size
    if R.size != n:
        raise RelationError(f"size mismatch: algebra {n} vs relation {R.size}")
    m = R.matrix | np.eye(n, dtype=bool)
    known = [tuple(p) for p in zip(*np.nonzero(m))]
    frontier_start = 0
    while True:
        P = np.asarray(known, dtype=np.int64)
        old, total = frontier_start, len(known)
        added = []
        for o, arr in zip(A.operations, A.arrays):
            if o.arity == 0:
                continue
            for combo in _tuples_touching(o.arity, old, total):
                left = arr[tuple(P[combo[:, j], 0] for j in range(o.arity))]
                right = arr[tuple(P[combo[:, j], 1] for j in range(o.arity))]
                new = ~m[left, right]
                if new.any():
                    for u, v in zip(left[new].tolist(), right[new].tolist()):
                        if not m[u, v]:
                            m[u, v] = True
                            added.append((u, v))
        if not added:
            return AdmissibleRelation(m)
        known.extend(added)
        frontier_start = total


def _tuples_touching(arity: int, old: int, total: int):
    full = np.indices((total,) * (arity - 1)).reshape(arity - 1, -1).T if arity > 1 else None
    for a in range(total):
        if arity == 1:
            if a >= old:
                yield np.array([[a]])
            continue
        rest = full if a >= old else full[(full >= old).any(axis=1)]
        if len(rest):
            yield np.hstack([np.full((len(rest), 1), a), rest])


def join(A: FiniteAlgebra, t1: Congruence, t2: Congruence) -> Congruence:
    _same_size(t1, t2)
    out = equivalence_closure(union(t1, t2))
    assert is_congruence(A, out), "join of congruences is not compatible"
    return out


def principal_congruences(A: FiniteAlgebra) -> list[Congruence]:
    seen: dict[Congruence, None] = {}
    for a in range(A.size):
        for b in range(a + 1, A.size):
            seen.setdefault(cg(A, [(a, b)]), None)
    return list(seen)


def congruence_sort_key(theta: Congruence):
    return (theta.size - len(theta.blocks), theta.labels)


def all_congruences(A: FiniteAlgebra, bound: int = 60) -> list[Congruence]:
    """Every congruence of ``A``, as joins of principal congruences.

    Ordered from the identity upward: by number of merges, then by labels.
    """
    if A.size > bound:
        raise RelationError(f"algebra size {A.size} exceeds congruence bound {bound}")
    principals = principal_congruences(A)
    bottom = Congruence.identity(A.size)
    found = {bottom: None}
    queue = [bottom]
    while queue:
        theta = queue.pop()
        for pi in principals:
            j = equivalence_closure(union(theta, pi))
            if j not in found:
                found[j] = None
                queue.append(j)
    return sorted(found, key=congruence_sort_key)


def congruence_order(congs: Sequence[Congruence]) -> list[tuple[int, int]]:
    """Covering pairs ``(i, j)`` of the lattice: ``congs[i] < congs[j]`` with
    nothing strictly between."""
    le = [[a <= b for b in congs] for a in congs]
    covers = []
    for i, j in itertools.product(range(len(congs)), repeat=2):
        if i != j and le[i][j] and not any(
                k not in (i, j) and le[i][k] and le[k][j] for k in range(len(congs))):
            covers.append((i, j))
    return covers


def representable_tolerance(A: FiniteAlgebra, pairs: Iterable[Sequence[int]]
                            ) -> tuple[AdmissibleRelation, Tolerance]:
    R = compatible_closure(A, BinaryRelation.from_pairs(A.size, pairs))
    D = compose(R, converse(R))
    assert is_tolerance(A, D), "R o R^-1 is not a tolerance"
    return R, Tolerance(D.matrix)


def chain_fixpoint(B: BinaryRelation, G: BinaryRelation) -> tuple[BinaryRelation, int]:
    """Limit of ``circ_h(B, G, h)`` as ``h`` grows, and the first ``h`` from
    which the sequence is constant.

    One equal step is not enough for arbitrary reflexive relations (``G`` the
    identity, ``B`` not transitive), so stabilization is detected as two
    consecutive equal steps, after which the sequence is periodic-constant.
    """
    _same_size(B, G)
    if not (B.is_reflexive() and G.is_reflexive()):
        raise RelationError("chain_fixpoint needs reflexive relations")
    n = B.size
    seq = [B.matrix]
    h = 1
    while True:
        nxt = seq[-1] @ (G.matrix if h % 2 else B.matrix)
        seq.append(nxt)
        h += 1
        if len(seq) >= 3 and (seq[-1] == seq[-2]).all() and (seq[-2] == seq[-3]).all():
            return BinaryRelation(seq[-1]), h - 2
        assert h <= n * n + 3, "chain fixpoint did not stabilize"
