import pytest
import sympy as sp
from hypothesis import given, settings

from kegelbench.util.errors import ParseError, TypeCheckError
from kegelbench.util.ppcf.parser import parse, parse_type
from kegelbench.util.ppcf.syntax import (
    NAT,
    App,
    Arrow,
    Coin,
    Fix,
    If,
    Lam,
    Num,
    Succ,
    Var,
    alpha_equivalent,
    alpha_key,
    arrow,
    desugar_choice,
    desugar_let,
    desugar_pred,
    free_vars,
    pretty,
    pretty_type,
    subst,
    typecheck,
)
from kegelbench.tests.strategies import ppcf_terms

R = sp.Rational

GEOMETRIC = "fix(\\f:nat->nat. \\x:nat. x (+1/2) (f) (succ(x))) (0)"


def test_parse_literals():
    assert parse("coin(1/2)") == Coin(R(1, 2))
    assert parse("coin(1)") == Coin(1)
    assert parse("42") == Num(42)
    assert parse("if(coin(1/3), 0, z. succ(z))") == If(Coin(R(1, 3)), Num(0), "z", Succ(Var("z")))


def test_parse_geometric():
    body = If(Coin(R(1, 2)), Var("x"), "z", App(Var("f"), Succ(Var("x"))))
    expected = App(Fix(Lam("f", arrow(NAT, NAT), Lam("x", NAT, body))), Num(0))
    assert parse(GEOMETRIC) == expected


def test_parse_application_is_left_associative():
    assert parse("f x y") == App(App(Var("f"), Var("x")), Var("y"))
    assert parse("(f) (x y)") == App(Var("f"), App(Var("x"), Var("y")))


def test_parse_types():
    assert parse_type("nat") == NAT
    assert parse_type("nat -> nat -> nat") == Arrow(NAT, Arrow(NAT, NAT))
    assert parse_type("(nat -> nat) -> nat") == Arrow(Arrow(NAT, NAT), NAT)
    assert parse_type("nat → nat") == Arrow(NAT, NAT)


def test_parse_let_and_comments():
    term = parse("# a comment\nlet y = coin(2/3) in succ(y)")
    assert alpha_equivalent(term, If(Coin(R(2, 3)), Succ(Num(0)), "z", Succ(Succ(Var("z")))))


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("coin(3/2)", 1, 6),
        ("coin(1/0)", 1, 6),
        ("succ(0", 1, 7),
        ("\n  if(0, 1)", 2, 10),
        ("0 )", 1, 3),
        ("$", 1, 1),
    ],
)
def test_parse_errors_carry_position(text, line, column):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_parse_error_lists_expected_tokens():
    with pytest.raises(ParseError) as info:
        parse("succ(0")
    assert info.value.expected == (")",)


def test_typecheck_examples():
    assert typecheck({}, Coin(R(1, 2))) == NAT
    assert typecheck({}, Lam("x", NAT, Var("x"))) == Arrow(NAT, NAT)
    assert typecheck({}, parse(GEOMETRIC)) == NAT
    assert typecheck({"y": NAT}, Succ(Var("y"))) == NAT


@pytest.mark.parametrize(
    "term, rule, path",
    [
        (App(Num(0), Num(0)), "app", "<root>"),
        (Succ(App(Num(0), Num(0))), "app", "succ"),
        (Var("q"), "var", "<root>"),
        (If(Num(0), Num(1), "z", Lam("x", NAT, Var("x"))), "if", "<root>"),
        (Fix(Num(0)), "fix", "<root>"),
        (Lam("x", NAT, Succ(Lam("y", NAT, Var("y")))), "succ", "lam.body"),
        (App(Lam("f", arrow(NAT, NAT), Num(0)), Num(1)), "app", "<root>"),
    ],
)
def test_typecheck_errors(term, rule, path):
    with pytest.raises(TypeCheckError) as info:
        typecheck({}, term)
    assert info.value.rule == rule
    assert info.value.path == path


def test_subst_examples():
    assert subst(Var("x"), "x", Num(3)) == Num(3)
    assert subst(Lam("x", NAT, Var("x")), "x", Num(3)) == Lam("x", NAT, Var("x"))
    captured = subst(Lam("y", NAT, Var("x")), "x", Var("y"))
    assert isinstance(captured, Lam)
    assert captured.binder != "y"
    assert captured.body == Var("y")
    assert alpha_equivalent(captured, Lam("w", NAT, Var("y")))


def test_subst_respects_if_binder():
    term = If(Var("x"), Var("x"), "x", Var("x"))
    assert subst(term, "x", Num(2)) == If(Num(2), Num(2), "x", Var("x"))
    renamed = subst(If(Num(0), Num(0), "z", Var("y")), "y", Succ(Var("z")))
    assert renamed.binder != "z"
    assert renamed.succ_branch == Succ(Var("z"))


def test_alpha_key():
    assert alpha_key(Lam("x", NAT, Var("x"))) == alpha_key(Lam("y", NAT, Var("y")))
    assert alpha_key(Lam("x", NAT, Var("y"))) != alpha_key(Lam("y", NAT, Var("y")))
    assert alpha_equivalent(If(Num(0), Num(1), "a", Var("a")), If(Num(0), Num(1), "b", Var("b")))


def test_desugar_examples():
    choice = desugar_choice(Num(0), R(1, 2), Num(1))
    assert choice == If(Coin(R(1, 2)), Num(0), choice.binder, Num(1))
    assert choice.binder not in free_vars(Num(1))
    assert desugar_let("x", Num(0), Succ(Var("x"))) == If(Num(0), Succ(Num(0)), "z", Succ(Succ(Var("z"))))
    assert typecheck({}, App(desugar_pred(), Num(0))) == NAT


def test_desugar_choice_avoids_free_variables():
    choice = desugar_choice(Num(0), R(1, 2), Var("z"))
    assert choice.binder != "z"
    assert choice.succ_branch == Var("z")


def test_pretty_examples():
    assert pretty(Coin(R(1, 2))) == "coin(1/2)"
    assert pretty(Num(3)) == "3"
    assert pretty(App(App(Var("f"), Num(1)), Num(2))) == "((f) 1) 2"
    assert pretty(App(Var("f"), App(Var("g"), Num(1)))) == "(f) ((g) 1)"
    assert pretty_type(arrow(arrow(NAT, NAT), NAT, NAT)) == "(nat -> nat) -> nat -> nat"


def test_pretty_round_trips_geometric():
    term = parse(GEOMETRIC)
    assert alpha_equivalent(parse(pretty(term)), term)


@settings(max_examples=150)
@given(ppcf_terms(depth=4))
def test_parse_pretty_round_trip(m):
    assert alpha_equivalent(parse(pretty(m)), m)


@given(ppcf_terms(arrow(NAT, NAT), depth=3))
def test_generated_terms_typecheck(m):
    assert typecheck({}, m) == Arrow(NAT, NAT)
    assert free_vars(m) == frozenset()


@given(ppcf_terms(NAT, ctx=(("x0", NAT),), depth=3), ppcf_terms(depth=2))
def test_subst_free_variables(m, n):
    result = subst(m, "x0", n)
    assert free_vars(result) <= (free_vars(m) - {"x0"}) | free_vars(n)
    assert typecheck({}, result) == NAT


@given(ppcf_terms(NAT, ctx=(("x0", NAT),), depth=3), ppcf_terms(depth=2))
def test_subst_commutes_with_renaming(m, n):
    renamed = subst(m, "x0", Var("fresh"))
    assert alpha_equivalent(subst(renamed, "fresh", n), subst(m, "x0", n))
