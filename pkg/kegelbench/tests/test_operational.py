import math

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from kegelbench.util.errors import StuckError
from kegelbench.util.ppcf.operational import (
    Branch,
    CoinFlipper,
    Det,
    Timeout,
    Value,
    WeakNormal,
    applicable_rules,
    distribution,
    prob_numeral,
    reduction_trace,
    run_sample,
    sample_frequencies,
    step,
)
from kegelbench.util.ppcf.parser import parse
from kegelbench.util.ppcf.syntax import (
    NAT,
    App,
    Coin,
    Fix,
    If,
    Lam,
    Num,
    Succ,
    Var,
    alpha_equivalent,
    desugar_choice,
    subst,
    typecheck,
)
from kegelbench.tests.strategies import ppcf_terms

R = sp.Rational

GEOMETRIC = parse("fix(\\f:nat->nat. \\x:nat. x (+1/2) (f) (succ(x))) (0)")
DIVERGENT = Fix(Lam("x", NAT, Var("x")))


def successors(outcome):
    match outcome:
        case Det(next_term):
            return [next_term]
        case Branch(_, heads, tails):
            return [heads, tails]
    return []


def test_step_examples():
    assert step(Coin(R(1, 2))) == Branch(R(1, 2), Num(0), Num(1))
    assert step(App(Lam("x", NAT, Var("x")), Num(3))) == Det(Num(3))
    assert step(Lam("x", NAT, Coin(R(1, 2)))) == WeakNormal()
    assert step(Num(4)) == WeakNormal()


def test_step_rules():
    assert step(Succ(Num(2))) == Det(Num(3))
    assert step(If(Num(0), Num(5), "z", Var("z"))) == Det(Num(5))
    assert step(If(Num(3), Num(5), "z", Succ(Var("z")))) == Det(Succ(Num(2)))
    assert step(DIVERGENT) == Det(App(Lam("x", NAT, Var("x")), DIVERGENT))


def test_step_congruences():
    assert step(Succ(Coin(R(1, 3)))) == Branch(R(1, 3), Succ(Num(0)), Succ(Num(1)))
    assert step(If(Succ(Num(0)), Num(0), "z", Var("z"))) == Det(If(Num(1), Num(0), "z", Var("z")))
    fun = App(Lam("f", NAT, Lam("y", NAT, Var("y"))), Num(0))
    assert step(App(fun, Num(7))) == Det(App(Lam("y", NAT, Var("y")), Num(7)))


def test_step_never_reduces_arguments():
    term = App(Lam("x", NAT, Num(1)), Coin(R(1, 2)))
    assert step(term) == Det(Num(1))


def test_stuck_terms():
    with pytest.raises(StuckError):
        step(Var("x"))
    with pytest.raises(StuckError):
        step(App(Num(0), Num(1)))


def test_applicable_rules():
    assert applicable_rules(Coin(R(1, 2))) == ["coin"]
    assert applicable_rules(Num(3)) == []
    assert applicable_rules(Succ(Succ(Num(0)))) == ["succ-congruence"]
    assert applicable_rules(GEOMETRIC) == ["app-congruence"]


def test_coin_flipper_is_deterministic():
    a, b = CoinFlipper(7), CoinFlipper(7)
    assert [a.heads(R(1, 2)) for _ in range(64)] == [b.heads(R(1, 2)) for _ in range(64)]
    flipper = CoinFlipper(1)
    assert not any(flipper.heads(R(0)) for _ in range(100))
    assert all(flipper.heads(R(1)) for _ in range(100))


def test_run_sample_examples():
    assert run_sample(Num(5), 3, 10) == Value(Num(5), 0)
    assert run_sample(Coin(0), 11, 10) == Value(Num(1), 1)
    assert run_sample(Coin(1), 11, 10) == Value(Num(0), 1)
    result = run_sample(DIVERGENT, 0, 50)
    assert isinstance(result, Timeout)
    assert result.steps == 50


def test_run_sample_is_reproducible():
    for seed in range(5):
        first = run_sample(GEOMETRIC, seed, 10_000)
        assert first == run_sample(GEOMETRIC, seed, 10_000)
        assert isinstance(first, Value)
        assert isinstance(first.term, Num)
        assert first.steps == 6 * first.term.n + 5


def test_reduction_trace():
    trace = reduction_trace(Succ(Succ(Num(0))), 0, 10)
    assert trace == [Succ(Succ(Num(0))), Succ(Num(1)), Num(2)]
    assert len(reduction_trace(DIVERGENT, 0, 4)) == 5


def test_distribution_examples():
    td = distribution(Coin(R(1, 3)), 1)
    assert td.outcomes == ((Num(0), R(1, 3)), (Num(1), R(2, 3)))
    assert td.residual == 0
    assert distribution(Num(7), 0).outcomes == ((Num(7), 1),)
    assert distribution(Num(7), 25).outcomes == ((Num(7), 1),)
    assert distribution(Coin(R(1, 3)), 0).pending == ((Coin(R(1, 3)), 1),)


def test_distribution_prunes_zero_weight_children():
    td = distribution(Coin(0), 1)
    assert td.outcomes == ((Num(1), 1),)


def test_geometric_distribution():
    td = distribution(GEOMETRIC, 200)
    for n in range(33):
        assert td.numeral_weight(n) == R(1, 2 ** (n + 1))
    assert td.numeral_weight(33) == 0
    assert sum((w for _, w in td.rows()), R(0)) == 1
    assert 0 < td.residual <= R(1, 2**32)


def test_geometric_timeline():
    # Num n first appears after 6n + 5 steps
    assert prob_numeral(GEOMETRIC, 0, 4) == 0
    assert prob_numeral(GEOMETRIC, 0, 5) == R(1, 2)
    assert prob_numeral(GEOMETRIC, 1, 10) == 0
    assert prob_numeral(GEOMETRIC, 1, 11) == R(1, 4)


def test_prob_numeral_examples():
    assert prob_numeral(Num(4), 4, 0) == 1
    assert prob_numeral(desugar_choice(Num(0), R(1, 2), Num(1)), 0, 3) == R(1, 2)
    assert prob_numeral(DIVERGENT, 0, 1000) == 0


def test_weight_of_merges_alpha_equivalent_terms():
    term = If(Coin(R(1, 2)), Lam("a", NAT, Var("a")), "z", Lam("b", NAT, Var("b")))
    td = distribution(term, 2)
    assert len(td.outcomes) == 1
    assert td.weight_of(Lam("c", NAT, Var("c"))) == 1


@settings(max_examples=60)
@given(ppcf_terms(depth=4), st.integers(0, 12))
def test_conservation(m, k):
    td = distribution(m, k)
    assert sum((w for _, w in td.rows()), R(0)) == 1


@settings(max_examples=60, deadline=None)
@given(ppcf_terms(depth=4), st.integers(0, 3))
def test_prob_numeral_is_monotone(m, n):
    stages = [prob_numeral(m, n, k) for k in range(0, 61, 5)]
    assert stages == sorted(stages)


@settings(max_examples=80)
@given(ppcf_terms(depth=4))
def test_exactly_one_rule_fires(m):
    outcome = step(m)
    rules = applicable_rules(m)
    if isinstance(outcome, WeakNormal):
        assert rules == []
    else:
        assert len(rules) == 1


@settings(max_examples=500, deadline=None)
@given(ppcf_terms(depth=4))
def test_subject_reduction(m):
    current = [m]
    for _ in range(6):
        current = [s for term in current for s in successors(step(term))][:8]
        for term in current:
            assert typecheck({}, term) == NAT


@settings(max_examples=500, deadline=None)
@given(ppcf_terms(NAT, ctx=(("x0", NAT),), depth=3), ppcf_terms(depth=2))
def test_substitution_lemma(m, p):
    try:
        outcome = step(m)
    except StuckError:
        # the open variable sits in head position
        return
    if isinstance(outcome, Det):
        after = step(subst(m, "x0", p))
        assert isinstance(after, Det)
        assert alpha_equivalent(after.next, subst(outcome.next, "x0", p))


@pytest.mark.slow
def test_sampler_matches_distribution():
    runs = 100_000
    summary = sample_frequencies(GEOMETRIC, 2024, runs, 10_000)
    assert summary.runs == runs
    assert summary.timeouts == 0
    sigma = math.sqrt(runs * 0.5 * 0.5)
    assert abs(summary.numerals[0] - runs / 2) <= 3 * sigma
