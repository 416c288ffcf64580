"""
Probabilistic small-step semantics of pPCF (weak, leftmost-outermost),
a seeded sampler, and exact k-step reduction distributions.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np
import sympy as sp

from ..errors import StuckError
from ..kegel import ONE, ZERO
from .syntax import App, Coin, Fix, If, Lam, Num, PTerm, Succ, Var, alpha_key, is_weak_normal, pretty, subst

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WeakNormal:
    pass


@dataclass(frozen=True)
class Det:
    next: PTerm


@dataclass(frozen=True)
class Branch:
    """coin(kappa) in head position: if_heads (numeral 0 side) has weight kappa"""

    kappa: sp.Rational
    if_heads: PTerm
    if_tails: PTerm


StepOutcome = Union[WeakNormal, Det, Branch]


def _congruence(inner: PTerm, outcome: StepOutcome, rebuild: Callable[[PTerm], PTerm]) -> StepOutcome:
    match outcome:
        case Det(next_term):
            return Det(rebuild(next_term))
        case Branch(kappa, heads, tails):
            return Branch(kappa, rebuild(heads), rebuild(tails))
    raise StuckError(f"no rule applies: {pretty(inner)} is normal in a position that needs a redex")


def step(m: PTerm) -> StepOutcome:
    match m:
        case Num() | Lam():
            return WeakNormal()
        case Coin(kappa):
            return Branch(kappa, Num(0), Num(1))
        case Fix(body):
            return Det(App(body, m))
        case Succ(Num(n)):
            return Det(Num(n + 1))
        case Succ(arg):
            return _congruence(arg, step(arg), Succ)
        case If(Num(0), p, _, _):
            return Det(p)
        case If(Num(n), _, z, q):
            return Det(subst(q, z, Num(n - 1)))
        case If(s, p, z, q):
            return _congruence(s, step(s), lambda s2: If(s2, p, z, q))
        case App(Lam(x, _, body), arg):
            return Det(subst(body, x, arg))
        case App(fun, arg):
            return _congruence(fun, step(fun), lambda f2: App(f2, arg))
        case Var(name):
            raise StuckError(f"free variable {name} in head position")
    raise TypeError(f"not a pPCF term: {m!r}")


def applicable_rules(m: PTerm) -> List[str]:
    """
    Every reduction rule whose premise matches m, checked independently of
    step's dispatch order; closed well-typed terms match at most one.
    """
    rules = []
    if isinstance(m, Coin):
        rules.append("coin")
    if isinstance(m, Fix):
        rules.append("fix")
    if isinstance(m, Succ) and isinstance(m.arg, Num):
        rules.append("succ")
    if isinstance(m, Succ) and not is_weak_normal(m.arg):
        rules.append("succ-congruence")
    if isinstance(m, If) and isinstance(m.scrutinee, Num) and m.scrutinee.n == 0:
        rules.append("if-zero")
    if isinstance(m, If) and isinstance(m.scrutinee, Num) and m.scrutinee.n > 0:
        rules.append("if-succ")
    if isinstance(m, If) and not is_weak_normal(m.scrutinee):
        rules.append("if-congruence")
    if isinstance(m, App) and isinstance(m.fun, Lam):
        rules.append("beta")
    if isinstance(m, App) and not is_weak_normal(m.fun):
        rules.append("app-congruence")
    return rules


# Sampling

class CoinFlipper:
    """
    PCG64 stream; heads on coin(p/q) iff u / 2^64 < p/q for a raw 64-bit draw u.
    Integer comparison keeps the decision exact.
    """

    def __init__(self, seed: int):
        self.bit_generator = np.random.PCG64(seed)

    def heads(self, kappa: sp.Rational) -> bool:
        u = int(self.bit_generator.random_raw())
        return u * int(kappa.q) < int(kappa.p) << 64


@dataclass(frozen=True)
class Value:
    term: PTerm
    steps: int


@dataclass(frozen=True)
class Timeout:
    term: PTerm
    steps: int


SampleResult = Union[Value, Timeout]


def _run(m: PTerm, flipper: CoinFlipper, max_steps: int, trace: Optional[list] = None) -> SampleResult:
    current = m
    for taken in range(max_steps + 1):
        if trace is not None:
            trace.append(current)
        outcome = step(current)
        if isinstance(outcome, WeakNormal):
            return Value(current, taken)
        if taken == max_steps:
            break
        if isinstance(outcome, Det):
            current = outcome.next
        else:
            current = outcome.if_heads if flipper.heads(outcome.kappa) else outcome.if_tails
    return Timeout(current, max_steps)


def run_sample(m: PTerm, seed: int, max_steps: int) -> SampleResult:
    return _run(m, CoinFlipper(seed), max_steps)


def reduction_trace(m: PTerm, seed: int, max_steps: int) -> List[PTerm]:
    trace: list = []
    _run(m, CoinFlipper(seed), max_steps, trace)
    return trace


@dataclass(frozen=True)
class SampleSummary:
    runs: int
    numerals: Dict[int, int]
    other_values: int
    timeouts: int

    def frequency(self, n: int) -> float:
        return self.numerals.get(n, 0) / self.runs if self.runs else 0.0


def sample_frequencies(m: PTerm, seed: int, runs: int, max_steps: int) -> SampleSummary:
    """Histogram of runs outcomes; one PCG64 stream is shared by all runs"""
    flipper = CoinFlipper(seed)
    numerals: Counter = Counter()
    other = timeouts = 0
    for _ in range(runs):
        result = _run(m, flipper, max_steps)
        if isinstance(result, Timeout):
            timeouts += 1
        elif isinstance(result.term, Num):
            numerals[result.term.n] += 1
        else:
            other += 1
    return SampleSummary(runs, dict(sorted(numerals.items())), other, timeouts)


# Exact distributions

def _order(entry: Tuple[PTerm, sp.Rational]):
    term = entry[0]
    return (0, term.n, "") if isinstance(term, Num) else (1, 0, pretty(term))


@dataclass(frozen=True)
class TermDist:
    """
    The row of Prob^k for a term: weak-normal outcomes plus the non-normal
    terms still pending after k steps. outcomes and pending together carry
    probability exactly 1.
    """

    outcomes: Tuple[Tuple[PTerm, sp.Rational], ...]
    pending: Tuple[Tuple[PTerm, sp.Rational], ...] = field(default=())

    @property
    def residual(self) -> sp.Rational:
        return sum((w for _, w in self.pending), ZERO)

    def weight_of(self, term: PTerm) -> sp.Rational:
        key = alpha_key(term)
        return sum((w for t, w in self.outcomes + self.pending if alpha_key(t) == key), ZERO)

    def numeral_weight(self, n: int) -> sp.Rational:
        return sum((w for t, w in self.outcomes if isinstance(t, Num) and t.n == n), ZERO)

    def rows(self) -> Tuple[Tuple[PTerm, sp.Rational], ...]:
        return self.outcomes + self.pending


def _deposit(bucket: dict, term: PTerm, w: sp.Rational):
    key = alpha_key(term)
    if key in bucket:
        bucket[key][1] += w
    else:
        bucket[key] = [term, w]


def distribution(m: PTerm, depth: int) -> TermDist:
    """
    Forward expansion of the reduction tree, merging alpha-equivalent terms at
    every stage so the work grows with the number of distinct terms, not with
    the number of paths.
    """
    outcomes: dict = {}
    frontier: dict = {}
    _deposit(outcomes if is_weak_normal(m) else frontier, m, ONE)
    steps: dict = {}
    for stage in range(depth):
        if not frontier:
            break
        following: dict = {}
        for key, (term, w) in frontier.items():
            outcome = steps.get(key)
            if outcome is None:
                outcome = steps[key] = step(term)
            if isinstance(outcome, Det):
                successors = ((outcome.next, ONE),)
            else:
                successors = ((outcome.if_heads, outcome.kappa), (outcome.if_tails, ONE - outcome.kappa))
            for successor, p in successors:
                if p == 0:
                    continue
                _deposit(outcomes if is_weak_normal(successor) else following, successor, w * p)
        frontier = following
        if stage % 50 == 49:
            logger.debug("distribution stage %d: %d pending terms", stage + 1, len(frontier))
    return TermDist(
        tuple(sorted(((t, w) for t, w in outcomes.values()), key=_order)),
        tuple(sorted(((t, w) for t, w in frontier.values()), key=_order)),
    )


def prob_numeral(m: PTerm, n: int, depth: int) -> sp.Rational:
    """Prob^depth(m, n): a lower bound on the limiting probability, nondecreasing in depth"""
    return distribution(m, depth).numeral_weight(n)
