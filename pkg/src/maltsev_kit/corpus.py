"""Built-in algebras, addressable by name from the command line."""

from __future__ import annotations

import itertools
from typing import Callable

from .algebra import FiniteAlgebra, Operation


def _table(n: int, arity: int, f: Callable[..., int]) -> tuple[int, ...]:
    return tuple(f(*args) for args in itertools.product(range(n), repeat=arity))


def lattice_from_order(name: str, n: int, covers: list[tuple[int, int]]) -> FiniteAlgebra:
    """Lattice with meet and join, from the covering pairs of its order."""
    leq = [[i == j for j in range(n)] for i in range(n)]
    for a, b in covers:
        leq[a][b] = True
    for k, i, j in itertools.product(range(n), repeat=3):
        if leq[i][k] and leq[k][j]:
            leq[i][j] = True

    def meet(x, y):
        lower = [z for z in range(n) if leq[z][x] and leq[z][y]]
        glb = [z for z in lower if all(leq[u][z] for u in lower)]
        assert len(glb) == 1, "not a lattice"
        return glb[0]

    def join(x, y):
        upper = [z for z in range(n) if leq[x][z] and leq[y][z]]
        lub = [z for z in upper if all(leq[z][u] for u in upper)]
        assert len(lub) == 1, "not a lattice"
        return lub[0]

    return FiniteAlgebra(name, n, (Operation("meet", 2, _table(n, 2, meet)),
                                   Operation("join", 2, _table(n, 2, join))))


def chain_lattice(n: int, name: str) -> FiniteAlgebra:
    return lattice_from_order(name, n, [(i, i + 1) for i in range(n - 1)])


def chain_semilattice(n: int, name: str) -> FiniteAlgebra:
    return FiniteAlgebra(name, n, (Operation("meet", 2, _table(n, 2, min)),))


def _build() -> dict[str, Callable[[], FiniteAlgebra]]:
    return {
        "trivial": lambda: FiniteAlgebra("trivial", 1),
        "lattice2": lambda: chain_lattice(2, "lattice2"),
        "chain3-lattice": lambda: chain_lattice(3, "chain3-lattice"),
        # 0 < 1 < 2 < 4 and 0 < 3 < 4
        "N5": lambda: lattice_from_order("N5", 5, [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)]),
        # 0 < 1, 2, 3 < 4
        "M3": lambda: lattice_from_order("M3", 5, [(0, 1), (0, 2), (0, 3),
                                                   (1, 4), (2, 4), (3, 4)]),
        "semilattice2": lambda: chain_semilattice(2, "semilattice2"),
        "chain3-semilattice": lambda: chain_semilattice(3, "chain3-semilattice"),
        "set2": lambda: FiniteAlgebra("set2", 2),
        "set3": lambda: FiniteAlgebra("set3", 3),
        "set4": lambda: FiniteAlgebra("set4", 4),
        "z2": lambda: FiniteAlgebra("z2", 2, (
            Operation("plus", 2, _table(2, 2, lambda a, b: (a + b) % 2)),
            Operation("neg", 1, (0, 1)),
            Operation("zero", 0, (0,)))),
        "d01-majority": lambda: FiniteAlgebra("d01-majority", 2, (
            Operation("maj", 3, _table(2, 3, lambda a, b, c: int(a + b + c >= 2))),)),
    }


BUILTINS = _build()


def builtin(name: str) -> FiniteAlgebra:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise KeyError(f"unknown builtin algebra {name!r}; "
                       f"choose from {', '.join(sorted(BUILTINS))}") from None


def names() -> list[str]:
    return list(BUILTINS)
