import json
import pathlib

import numpy as np
import pytest

from maltsev_kit.algebra import FiniteAlgebra, Operation
from maltsev_kit.free import CapExceeded, free_algebra, term_expression_of, term_to_table

from conftest import SMALL
from oracles import brute_free

GOLDEN = json.loads((pathlib.Path(__file__).parent / "golden.json").read_text())


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_sizes_match_golden(algebra, name):
    assert len(free_algebra(algebra(name))) == GOLDEN[name]["free_size"]


@pytest.mark.parametrize("name", ["set3", "semilattice2", "z2", "d01-majority"])
def test_elements_match_oracle(algebra, name):
    A = algebra(name)
    F = free_algebra(A)
    elems, gens = brute_free(A)
    assert sorted(tuple(int(v) for v in e.values) for e in F.elements) == elems
    assert [tuple(int(v) for v in F.elements[g].values) for g in F.generator_ids] == gens


@pytest.mark.parametrize("name", SMALL)
def test_provenance_terms_evaluate_to_their_tables(algebra, name):
    A = algebra(name)
    F = free_algebra(A)
    for i, e in enumerate(F.elements):
        assert np.array_equal(term_to_table(A, term_expression_of(F, i)), e.values)


@pytest.mark.parametrize("name", ["lattice2", "z2"])
def test_op_tables_are_closed(algebra, name):
    A = algebra(name)
    F = free_algebra(A)
    FA = F.as_algebra()
    for oi, o in enumerate(A.operations):
        tab = F.op_tables[oi]
        for args in np.ndindex(*((len(F),) * o.arity)):
            got = F.elements[int(tab[args])].values
            want = A.arrays[oi][tuple(F.elements[a].values for a in args)]
            assert (got == want).all()
    assert FA.size == len(F)


def test_generators_and_order_are_deterministic(algebra):
    a, b = free_algebra(algebra("lattice2")), free_algebra(algebra("lattice2"))
    assert a.generator_ids == (0, 1, 2, 3)
    assert all(np.array_equal(x.values, y.values) for x, y in zip(a.elements, b.elements))
    assert str(term_expression_of(a, 4)) == "meet(x,y)"


def test_element_cap():
    with pytest.raises(CapExceeded) as exc:
        free_algebra(FiniteAlgebra("l", 2, (Operation("meet", 2, (0, 0, 0, 1)),
                                            Operation("join", 2, (0, 1, 1, 1)))), cap=50)
    assert exc.value.cap == 50


def test_env_cap(monkeypatch, algebra):
    monkeypatch.setenv("MALTSEVKIT_CAP", "10")
    with pytest.raises(CapExceeded):
        free_algebra(algebra("semilattice2"))


def test_table_cap(algebra):
    with pytest.raises(CapExceeded, match="operation-table"):
        free_algebra(algebra("lattice2"), table_cap=1000)


def test_callable_term_table(algebra):
    F = free_algebra(algebra("lattice2"))
    x = F.elements[F.generator_ids[0]]
    assert x(1, 0, 0, 0) == 1 and x(0, 1, 1, 1) == 0


def test_limits_from_env(monkeypatch):
    from maltsev_kit.config import Limits
    monkeypatch.setenv("MALTSEVKIT_CAP", "123")
    monkeypatch.setenv("MALTSEVKIT_TABLE_CAP", "456")
    lim = Limits.from_env(max_pairs=1)
    assert (lim.cap, lim.table_cap, lim.max_pairs) == (123, 456, 1)
    monkeypatch.delenv("MALTSEVKIT_CAP")
    assert Limits.from_env().cap == Limits.cap
