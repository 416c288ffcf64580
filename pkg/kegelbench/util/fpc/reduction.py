"""
FPC reduction. The relation is nondeterministic (it reduces under lambda),
so step_fpc returns every successor, root redex first and then congruence
successors left to right. normalize always takes the first one.
"""

import logging
from dataclasses import dataclass
from typing import Tuple, Union

from .syntax import Case, Elim, FApp, FLam, FTerm, Fst, Inl, Inr, Intro, Pair, Snd, pretty, subst

logger = logging.getLogger(__name__)


def _root(m: FTerm) -> Tuple[FTerm, ...]:
    match m:
        case FApp(FLam(x, _, body), arg):
            return (subst(body, x, arg),)
        case Case(Inl(_, _, v), x, left, _, _):
            return (subst(left, x, v),)
        case Case(Inr(_, _, v), _, _, y, right):
            return (subst(right, y, v),)
        case Fst(Pair(a, _)):
            return (a,)
        case Snd(Pair(_, b)):
            return (b,)
        case Elim(Intro(_, body)):
            return (body,)
    return ()


def step_fpc(m: FTerm) -> Tuple[FTerm, ...]:
    """All one-step successors of m; empty iff m is a normal form"""
    successors = list(_root(m))
    match m:
        case FLam(x, t, body):
            successors += [FLam(x, t, b) for b in step_fpc(body)]
        case FApp(fun, arg):
            # beta already covers an abstraction in function position
            if not isinstance(fun, FLam):
                successors += [FApp(f, arg) for f in step_fpc(fun)]
        case Case(s, x, left, y, right):
            successors += [Case(s2, x, left, y, right) for s2 in step_fpc(s)]
        case Pair(a, b):
            successors += [Pair(a2, b) for a2 in step_fpc(a)]
            successors += [Pair(a, b2) for b2 in step_fpc(b)]
        case Fst(arg):
            successors += [Fst(a) for a in step_fpc(arg)]
        case Snd(arg):
            successors += [Snd(a) for a in step_fpc(arg)]
        case Inl(t, u, body):
            successors += [Inl(t, u, b) for b in step_fpc(body)]
        case Inr(t, u, body):
            successors += [Inr(t, u, b) for b in step_fpc(body)]
        case Intro(mu, body):
            successors += [Intro(mu, b) for b in step_fpc(body)]
        case Elim(arg):
            successors += [Elim(a) for a in step_fpc(arg)]
    return tuple(successors)


@dataclass(frozen=True)
class Normal:
    term: FTerm
    steps: int


@dataclass(frozen=True)
class OutOfFuel:
    term: FTerm
    steps: int


NormalizeResult = Union[Normal, OutOfFuel]


def normalize(m: FTerm, fuel: int) -> NormalizeResult:
    current = m
    for taken in range(fuel + 1):
        successors = step_fpc(current)
        if not successors:
            logger.debug("normal form after %d steps", taken)
            return Normal(current, taken)
        if taken == fuel:
            break
        current = successors[0]
    logger.debug("out of fuel after %d steps at %s", fuel, pretty(current))
    return OutOfFuel(current, fuel)
