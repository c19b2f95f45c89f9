import itertools

import pytest
from hypothesis import given, settings, strategies as st

from maltsev_kit.algebra import (AlgebraError, FiniteAlgebra, Operation, apply_op,
                                 check_equation_on_A, parse_term, to_document,
                                 validate_algebra)
from maltsev_kit.corpus import BUILTINS, builtin

from oracles import brute_equation, ops_of


def doc(size, *ops):
    return {"name": "t", "size": size,
            "operations": [{"name": n, "arity": a, "table": t} for n, a, t in ops]}


def test_validate_accepts_lattice2():
    A = validate_algebra(doc(2, ("meet", 2, [0, 0, 0, 1]), ("join", 2, [0, 1, 1, 1])))
    assert apply_op(A, "join", (0, 1)) == 1
    assert apply_op(A, "meet", (1, 1)) == 1


@pytest.mark.parametrize("bad, fragment", [
    (doc(2, ("f", 2, [0, 1, 1])), "table length 3 ≠ 4"),
    (doc(2, ("f", 1, [0, 3])), "entry 3 out of range"),
    (doc(2, ("f", 1, [0, 1]), ("f", 1, [1, 0])), "duplicate"),
    (doc(0), "positive"),
    ({"name": "x"}, "size"),
    (doc(2, ("f", 1, [0, True])), "integers"),
])
def test_validate_rejects(bad, fragment):
    with pytest.raises(AlgebraError, match=fragment):
        validate_algebra(bad)


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_document_round_trip(name):
    A = builtin(name)
    B = validate_algebra(to_document(A))
    assert A == B and A.fingerprint() == B.fingerprint()


def test_fingerprint_separates_tables():
    a = FiniteAlgebra("a", 2, (Operation("f", 1, (0, 1)),))
    b = FiniteAlgebra("a", 2, (Operation("f", 1, (1, 0)),))
    assert a.fingerprint() != b.fingerprint()
    assert a.fingerprint().startswith("n=2:sha256=")


def test_apply_op_row_major():
    A = FiniteAlgebra("m", 3, (Operation("f", 2, tuple((a + 2 * b) % 3 for a in range(3)
                                                         for b in range(3))),))
    for a, b in itertools.product(range(3), repeat=2):
        assert apply_op(A, "f", (a, b)) == (a + 2 * b) % 3


def test_parse_term_round_trip():
    t = parse_term("join(meet(x, y), z)")
    assert str(t) == "join(meet(x,y),z)"
    assert parse_term(str(t)) == t
    with pytest.raises(AlgebraError):
        parse_term("join(x,")


@pytest.mark.parametrize("lhs, rhs, holds", [
    ("meet(x,y)", "meet(y,x)", True),
    ("join(x,meet(x,y))", "x", True),
    ("meet(x,join(y,z))", "join(meet(x,y),meet(x,z))", True),
    ("join(x,y)", "meet(x,y)", False),
])
def test_equations_on_lattice2(lhs, rhs, holds):
    assert bool(check_equation_on_A(builtin("lattice2"), parse_term(lhs), parse_term(rhs),
                                    "xyz")) is holds


def test_distributivity_fails_on_m3_with_first_counterexample():
    A = builtin("M3")
    lhs = parse_term("meet(x,join(y,z))")
    rhs = parse_term("join(meet(x,y),meet(x,z))")
    v = check_equation_on_A(A, lhs, rhs, "xyz")
    meet, join = (f for _, f in ops_of(A))
    cx = brute_equation(A, lambda e: meet(e["x"], join(e["y"], e["z"])),
                        lambda e: join(meet(e["x"], e["y"]), meet(e["x"], e["z"])), "xyz")
    assert not v.holds and v.counterexample["assignment"] == cx


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.data())
def test_random_binary_equation_matches_brute_force(n, data):
    table = data.draw(st.lists(st.integers(0, n - 1), min_size=n * n, max_size=n * n))
    A = FiniteAlgebra("r", n, (Operation("f", 2, tuple(table)),))
    v = check_equation_on_A(A, parse_term("f(x,f(y,z))"), parse_term("f(f(x,y),z)"), "xyz")
    f = ops_of(A)[0][1]
    cx = brute_equation(A, lambda e: f(e["x"], f(e["y"], e["z"])),
                        lambda e: f(f(e["x"], e["y"]), e["z"]), "xyz")
    assert v.holds == (cx is None)
    if cx is not None:
        assert v.counterexample["assignment"] == cx


def test_unknown_variable_rejected():
    with pytest.raises(AlgebraError, match="unknown variable"):
        check_equation_on_A(builtin("lattice2"), parse_term("meet(x,q)"), parse_term("x"), "x")
