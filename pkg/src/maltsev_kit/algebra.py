"""Finite algebras, term trees, and equation checking over a finite universe.

An algebra has universe ``0..n-1``. An operation of arity ``r`` is stored as a
flat table of ``n**r`` entries; the arguments ``(a_1, ..., a_r)`` index the
table row-major, ``a_1*n**(r-1) + ... + a_r``.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Mapping, Sequence

import numpy as np


class AlgebraError(ValueError):
    """Raised for malformed algebra descriptions or bad operation calls."""


@dataclass(frozen=True)
class Operation:
    name: str
    arity: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    name: str
    size: int
    operations: tuple[Operation, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "operations", tuple(self.operations))
        _check(self)

    def __eq__(self, other):
        return (isinstance(other, FiniteAlgebra) and self.size == other.size
                and self.operations == other.operations)

    def __hash__(self):
        return hash((self.size, self.operations))

    @property
    def universe(self) -> range:
        return range(self.size)

    def op_index(self, op: int | str) -> int:
        if isinstance(op, str):
            for i, o in enumerate(self.operations):
                if o.name == op:
                    return i
            raise AlgebraError(f"unknown operation {op!r}")
        if not 0 <= op < len(self.operations):
            raise AlgebraError(f"operation index {op} out of range")
        return op

    @cached_property
    def arrays(self) -> tuple[np.ndarray, ...]:
        """Each table reshaped to an ``(n,)*arity`` array (read-only)."""
        out = []
        for o in self.operations:
            a = np.asarray(o.table, dtype=np.int64).reshape((self.size,) * o.arity)
            a.setflags(write=False)
            out.append(a)
        return tuple(out)

    def fingerprint(self) -> str:
        payload = json.dumps(to_document(self)["operations"], sort_keys=True)
        digest = hashlib.sha256(f"{self.size}:{payload}".encode()).hexdigest()
        return f"n={self.size}:sha256={digest[:16]}"


def _check(A: FiniteAlgebra) -> None:
    if not isinstance(A.size, int) or A.size < 1:
        raise AlgebraError(f"size must be a positive integer, got {A.size!r}")
    seen = set()
    for o in A.operations:
        if o.name in seen:
            raise AlgebraError(f"duplicate operation name {o.name!r}")
        seen.add(o.name)
        if o.arity < 0:
            raise AlgebraError(f"operation {o.name!r}: negative arity")
        want = A.size ** o.arity
        if len(o.table) != want:
            raise AlgebraError(
                f"operation {o.name!r}: table length {len(o.table)} ≠ {want}")
        for v in o.table:
            if not 0 <= v < A.size:
                raise AlgebraError(f"operation {o.name!r}: entry {v} out of range")


def validate_algebra(doc: Mapping[str, Any]) -> FiniteAlgebra:
    """Build an algebra from a JSON-style document, raising ``AlgebraError``."""
    if not isinstance(doc, Mapping):
        raise AlgebraError("algebra document must be an object")
    try:
        size = doc["size"]
        ops = doc.get("operations", doc.get("ops", []))
    except KeyError as exc:
        raise AlgebraError(f"missing field {exc.args[0]!r}") from None
    if isinstance(size, bool) or not isinstance(size, int):
        raise AlgebraError(f"size must be an integer, got {size!r}")
    operations = []
    for i, od in enumerate(ops):
        try:
            name, arity, table = od["name"], od["arity"], od["table"]
        except (KeyError, TypeError):
            raise AlgebraError(f"operation #{i} needs name, arity and table") from None
        if isinstance(arity, bool) or not isinstance(arity, int):
            raise AlgebraError(f"operation {name!r}: arity must be an integer")
        if any(isinstance(v, bool) or not isinstance(v, int) for v in table):
            raise AlgebraError(f"operation {name!r}: table entries must be integers")
        operations.append(Operation(str(name), arity, tuple(table)))
    return FiniteAlgebra(str(doc.get("name", "unnamed")), size, tuple(operations))


def to_document(A: FiniteAlgebra) -> dict:
    return {
        "name": A.name,
        "size": A.size,
        "operations": [{"name": o.name, "arity": o.arity, "table": list(o.table)}
                       for o in A.operations],
    }


def flat_index(n: int, args: Sequence[int]) -> int:
    idx = 0
    for a in args:
        idx = idx * n + a
    return idx


def apply_op(A: FiniteAlgebra, op: int | str, args: Sequence[int]) -> int:
    i = A.op_index(op)
    o = A.operations[i]
    if len(args) != o.arity:
        raise AlgebraError(f"{o.name} expects {o.arity} arguments, got {len(args)}")
    for a in args:
        if not 0 <= a < A.size:
            raise AlgebraError(f"element {a} out of range")
    return o.table[flat_index(A.size, args)]


# --- terms -----------------------------------------------------------------

@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Application:
    op: str
    args: tuple = field(default=())

    def __str__(self):
        return f"{self.op}({','.join(map(str, self.args))})"


Term = Variable | Application

_TERM_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_\-]*)|(.))")


def parse_term(text: str) -> Term:
    """Parse ``f(x,g(y))``-style term syntax. Bare names are variables."""
    tokens = [(m.group(1), m.group(2)) for m in _TERM_TOKEN.finditer(text)
              if m.group(1) or (m.group(2) and not m.group(2).isspace())]
    pos = 0

    def expect(ch):
        nonlocal pos
        if pos >= len(tokens) or tokens[pos][1] != ch:
            raise AlgebraError(f"expected {ch!r} in term {text!r}")
        pos += 1

    def term():
        nonlocal pos
        if pos >= len(tokens) or tokens[pos][0] is None:
            raise AlgebraError(f"expected a name in term {text!r}")
        name = tokens[pos][0]
        pos += 1
        if pos < len(tokens) and tokens[pos][1] == "(":
            pos += 1
            args = []
            if pos < len(tokens) and tokens[pos][1] == ")":
                pos += 1
                return Application(name, ())
            args.append(term())
            while pos < len(tokens) and tokens[pos][1] == ",":
                pos += 1
                args.append(term())
            expect(")")
            return Application(name, tuple(args))
        return Variable(name)

    t = term()
    if pos != len(tokens):
        raise AlgebraError(f"trailing input in term {text!r}")
    return t


def term_variables(t: Term) -> list[str]:
    out: list[str] = []

    def walk(u):
        if isinstance(u, Variable):
            if u.name not in out:
                out.append(u.name)
        else:
            for a in u.args:
                walk(a)

    walk(t)
    return out


def term_table(A: FiniteAlgebra, t: Term, env: Mapping[str, np.ndarray]) -> np.ndarray:
    """Evaluate ``t`` pointwise, each variable bound to an array of elements."""
    if isinstance(t, Variable):
        try:
            return env[t.name]
        except KeyError:
            raise AlgebraError(f"unknown variable {t.name!r}") from None
    i = A.op_index(t.op)
    o = A.operations[i]
    if len(t.args) != o.arity:
        raise AlgebraError(f"{o.name} expects {o.arity} arguments, got {len(t.args)}")
    shape = next(iter(env.values())).shape if env else ()
    if o.arity == 0:
        return np.full(shape, o.table[0], dtype=np.int64)
    args = tuple(term_table(A, a, env) for a in t.args)
    return A.arrays[i][args]


def assignments(n: int, nvars: int) -> np.ndarray:
    """All ``n**nvars`` assignments in lexicographic order, shape ``(nvars, n**nvars)``."""
    if nvars == 0:
        return np.zeros((0, 1), dtype=np.int64)
    return np.indices((n,) * nvars).reshape(nvars, -1)


@dataclass(frozen=True)
class EquationVerdict:
    holds: bool
    counterexample: dict | None = None

    def __bool__(self):
        return self.holds


def check_equation_on_A(A: FiniteAlgebra, lhs: Term, rhs: Term,
                        vars: Sequence[str]) -> EquationVerdict:
    """Decide ``lhs = rhs`` over every assignment; report the lexicographically
    first failing assignment."""
    vars = list(vars)
    for v in term_variables(lhs) + term_variables(rhs):
        if v not in vars:
            raise AlgebraError(f"unknown variable {v!r}")
    grid = assignments(A.size, len(vars))
    env = {v: grid[i] for i, v in enumerate(vars)}
    left = np.broadcast_to(term_table(A, lhs, env), grid.shape[1:])
    right = np.broadcast_to(term_table(A, rhs, env), grid.shape[1:])
    bad = np.flatnonzero(left != right)
    if bad.size == 0:
        return EquationVerdict(True)
    j = int(bad[0])
    return EquationVerdict(False, {
        "assignment": {v: int(grid[i, j]) for i, v in enumerate(vars)},
        "lhs": int(left[j]), "rhs": int(right[j]),
    })
