"""The 4-generated free algebra of the variety generated by a finite algebra.

F(4) is realized as the subalgebra of ``A**(A**4)`` generated by the four
projection tables. Each element is a value table over ``A**4`` (row-major, as
for operation tables) together with a provenance record, so terms can be read
back off any element.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (Application, FiniteAlgebra, Operation, Term, Variable,
                      assignments, term_table)
from .config import Limits

GENERATORS = ("x", "y", "z", "w")
DEFAULT_CAP = Limits.cap
# operation-table entries; each costs 16 bytes while the closure runs
DEFAULT_TABLE_CAP = Limits.table_cap


class CapExceeded(RuntimeError):
    def __init__(self, count: int, cap: int, what: str = "element"):
        super().__init__(f"free algebra exceeded the {what} cap: {count} > {cap}")
        self.count = count
        self.cap = cap
        self.what = what


def default_cap() -> int:
    return Limits.from_env().cap


def default_table_cap() -> int:
    return Limits.from_env().table_cap


@dataclass(frozen=True)
class Generator:
    name: str


@dataclass(frozen=True)
class Applied:
    op: int
    args: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class TermTable:
    """A 4-ary term operation of the base algebra, with where it came from."""
    values: np.ndarray
    provenance: Generator | Applied

    def __call__(self, x: int, y: int, z: int, w: int) -> int:
        n = round(len(self.values) ** 0.25)
        return int(self.values[((x * n + y) * n + z) * n + w])

    def __eq__(self, other):
        return isinstance(other, TermTable) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())


@dataclass(frozen=True, eq=False)
class FreeAlgebra:
    base: FiniteAlgebra
    elements: tuple[TermTable, ...]
    generator_ids: tuple[int, int, int, int]
    op_tables: tuple[np.ndarray, ...]
    rounds: int

    def __len__(self):
        return len(self.elements)

    def as_algebra(self) -> FiniteAlgebra:
        """The induced algebra on element indices."""
        ops = tuple(Operation(o.name, o.arity, tuple(t.ravel().tolist()))
                    for o, t in zip(self.base.operations, self.op_tables))
        return FiniteAlgebra(f"F4({self.base.name})", len(self.elements), ops)

    def index_of(self, values) -> int:
        key = np.asarray(values, dtype=self.elements[0].values.dtype).tobytes()
        for i, e in enumerate(self.elements):
            if e.values.tobytes() == key:
                return i
        raise KeyError("table is not an element of the free algebra")


def projections(n: int) -> np.ndarray:
    dtype = np.uint8 if n <= 256 else np.uint16
    return assignments(n, 4).astype(dtype)


def free_algebra(A: FiniteAlgebra, cap: int | None = None,
                 table_cap: int | None = None) -> FreeAlgebra:
    """Close the four projections under the operations of ``A``, breadth first.

    Round ``t`` applies every operation to every argument tuple that uses at
    least one element discovered in round ``t-1``; the new tables of a round
    are appended in lexicographic order of their values. The provenance of a
    new table is the first (operation, argument tuple) producing it.

    ``cap`` bounds the number of elements and ``table_cap`` the total size of
    the operation tables; both raise ``CapExceeded``.
    """
    cap = default_cap() if cap is None else cap
    table_cap = default_table_cap() if table_cap is None else table_cap
    n = A.size
    proj = projections(n)
    dtype = proj.dtype

    tables: list[np.ndarray] = []
    prov: list[Generator | Applied] = []
    index: dict[bytes, int] = {}
    gen_ids = []
    for g, name in enumerate(GENERATORS):
        key = proj[g].tobytes()
        if key not in index:
            index[key] = len(tables)
            tables.append(proj[g])
            prov.append(Generator(name))
        gen_ids.append(index[key])

    resolved: list[list[tuple[int, np.ndarray, np.ndarray]]] = [[] for _ in A.operations]
    arrays = A.arrays
    old, rounds = 0, 0
    while True:
        m = len(tables)
        if m == old and rounds > 0:
            break
        rounds += 1
        entries = sum(m ** o.arity for o in A.operations)
        if entries > table_cap:
            raise CapExceeded(entries, table_cap, "operation-table")
        stack = np.stack(tables)
        fresh: dict[bytes, tuple[int, int, tuple[int, ...], np.ndarray]] = {}
        pending: list[tuple[int, np.ndarray, np.ndarray]] = []
        for oi, o in enumerate(A.operations):
            for chunk in _new_tuples(o.arity, old, m, first_round=(rounds == 1)):
                if o.arity == 0:
                    vals = np.full((1, len(proj[0])), o.table[0], dtype=dtype)
                else:
                    vals = arrays[oi][tuple(stack[chunk[:, j]] for j in range(o.arity))]
                    vals = vals.astype(dtype, copy=False)
                # >= 0: existing element index; < 0: -(1 + position in fresh)
                codes = np.empty(len(chunk), dtype=np.int64)
                for r, row in enumerate(vals):
                    key = row.tobytes()
                    hit = index.get(key)
                    if hit is not None:
                        codes[r] = hit
                        continue
                    entry = fresh.get(key)
                    if entry is None:
                        entry = fresh[key] = (oi, len(fresh),
                                              tuple(int(v) for v in chunk[r]), row)
                        if m + len(fresh) > cap:
                            raise CapExceeded(m + len(fresh), cap)
                    codes[r] = -1 - entry[1]
                idx = np.zeros(len(chunk), dtype=np.int64)
                for j in range(o.arity):
                    idx = idx * m + chunk[:, j]
                pending.append((oi, idx, codes))
        order = sorted(fresh) if dtype == np.uint8 else sorted(
            fresh, key=lambda k: fresh[k][3].tolist())
        remap = np.empty(len(fresh), dtype=np.int64)
        for key in order:
            oi, pos, args, row = fresh[key]
            index[key] = remap[pos] = len(tables)
            tables.append(row)
            prov.append(Applied(oi, args))
        for oi, idx, codes in pending:
            neg = codes < 0
            codes[neg] = remap[-1 - codes[neg]]
            resolved[oi].append((m, idx, codes))
        old = m

    m = len(tables)
    op_tables = []
    for oi, o in enumerate(A.operations):
        flat = np.full(m ** o.arity, -1, dtype=np.int64)
        for m_round, idx, codes in resolved[oi]:
            if m_round != m and o.arity:
                digits = np.unravel_index(idx, (m_round,) * o.arity)
                idx = np.ravel_multi_index(digits, (m,) * o.arity)
            flat[idx] = codes
        assert (flat >= 0).all()
        op_tables.append(flat.reshape((m,) * o.arity))
    elements = tuple(TermTable(t, p) for t, p in zip(tables, prov))
    for e in elements:
        e.values.setflags(write=False)
    return FreeAlgebra(A, elements, tuple(gen_ids), tuple(op_tables), rounds)


def _new_tuples(arity: int, old: int, m: int, first_round: bool):
    """Yield, in lexicographic order and in chunks, the argument tuples over
    ``range(m)`` not lying entirely inside ``range(old)``."""
    if arity == 0:
        if first_round:
            yield np.zeros((1, 0), dtype=np.int64)
        return
    if arity == 1:
        yield np.arange(old, m, dtype=np.int64)[:, None]
        return
    full = np.indices((m,) * (arity - 1)).reshape(arity - 1, -1).T
    partial = full[(full >= old).any(axis=1)] if old else full
    for a in range(m):
        rest = full if a >= old else partial
        if len(rest):
            yield np.hstack([np.full((len(rest), 1), a, dtype=np.int64), rest])


def term_expression_of(F: FreeAlgebra, e: int) -> Term:
    """Rebuild a term for element ``e`` by following provenance."""
    memo: dict[int, Term] = {}

    def build(i: int) -> Term:
        if i in memo:
            return memo[i]
        p = F.elements[i].provenance
        if isinstance(p, Generator):
            t: Term = Variable(p.name)
        else:
            t = Application(F.base.operations[p.op].name, tuple(build(a) for a in p.args))
        memo[i] = t
        return t

    return build(e)


def term_to_table(A: FiniteAlgebra, t: Term) -> np.ndarray:
    """The 4-ary term operation of ``t`` over ``A``, as a flat table."""
    proj = projections(A.size).astype(np.int64)
    env = dict(zip(GENERATORS, proj))
    return np.broadcast_to(term_table(A, t, env), proj[0].shape).copy()


def table_of(A: FiniteAlgebra, values: Sequence[int] | np.ndarray) -> np.ndarray:
    return np.asarray(values, dtype=np.int64).reshape((A.size,) * 4)
