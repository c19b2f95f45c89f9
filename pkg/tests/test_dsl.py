import pytest
from hypothesis import given, settings, strategies as st

from maltsev_kit.dsl import (Comp, CompK, Conv, IdentityAST, IdentitySyntaxError, Join, Meet,
                             Var, expr_to_text, parse_expr, parse_identity, pretty_print,
                             tokenize)

from identity_corpus import GOLDEN, MALFORMED


@pytest.mark.parametrize("text", GOLDEN)
def test_golden_round_trip(text):
    ast = parse_identity(text)
    printed = pretty_print(ast)
    again = parse_identity(printed)
    assert again == ast
    assert pretty_print(again) == printed


def test_golden_corpus_has_twenty():
    assert len(GOLDEN) == 20 and len(set(GOLDEN)) == 20


@pytest.mark.parametrize("text, line, col", MALFORMED)
def test_malformed_positions(text, line, col):
    with pytest.raises(IdentitySyntaxError) as exc:
        parse_identity(text)
    assert (exc.value.line, exc.value.column) == (line, col)
    assert f"line {line}, column {col}" in str(exc.value)


def test_precedence_meet_over_comp_over_join():
    assert parse_expr("a & b o c + d") == Join(Comp(Meet(Var("a"), Var("b")), Var("c")), Var("d"))
    assert parse_expr("a o b o c") == Comp(Comp(Var("a"), Var("b")), Var("c"))
    assert parse_expr("a o[3] b o c") == Comp(CompK(Var("a"), Var("b"), 3), Var("c"))


def test_hk3_ast():
    ast = parse_identity("a & (b o c o b) <= (a & b) o[k] c ; forall a,b,c: congruence; param k")
    a, b, c = Var("a"), Var("b"), Var("c")
    assert ast.lhs == Meet(a, Comp(Comp(b, c), b))
    assert ast.rhs == CompK(Meet(a, b), c, "k")
    assert ast.variables == ["a", "b", "c"] and ast.params == (("k", None),)


def test_param_default_and_sorts():
    ast = parse_identity("a o[k] b <= a + b ; forall a: congruence ; forall b: congruence ;"
                         " param k=4")
    assert ast.param_defaults() == {"k": 4}
    assert ast.sort_of("b") == "congruence"


def test_multiline_and_conv():
    ast = parse_identity("conv(a)\n  <= a\n; forall a: tolerance")
    assert ast.lhs == Conv(Var("a"))


def test_tokenize_compk_token():
    kinds = [t.kind for t in tokenize("a o[2] b")]
    assert kinds[:3] == ["name", "ok", "int"]


names = st.sampled_from(["a", "b", "c"])
exprs = st.recursive(
    names.map(Var),
    lambda inner: st.one_of(
        st.builds(Meet, inner, inner), st.builds(Join, inner, inner),
        st.builds(Comp, inner, inner), st.builds(Conv, inner),
        st.builds(CompK, inner, inner, st.one_of(st.integers(1, 9), st.just("k")))),
    max_leaves=8)


@settings(max_examples=300, deadline=None)
@given(exprs, exprs)
def test_random_ast_round_trip(lhs, rhs):
    ast = IdentityAST(lhs, rhs, (("a", "congruence"), ("b", "congruence"),
                                 ("c", "congruence")), (("k", None),))
    assert parse_identity(pretty_print(ast)) == ast
    assert parse_expr(expr_to_text(lhs)) == lhs
