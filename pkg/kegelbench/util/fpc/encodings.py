"""
Standard FPC encodings: the empty type, the unit type as 0 -> 0,
natural numbers as mu X. 1 + X, and a diverging self-application.
"""

from .parser import EMPTY_TYPE, ONE_TYPE
from .syntax import Elim, FApp, FArrow, FLam, FTerm, FVar, Inl, Inr, Intro, Mu, Sum, TVar

UNIT = FLam("u", EMPTY_TYPE, FVar("u"))
NAT_TYPE = Mu("X", Sum(ONE_TYPE, TVar("X")))
ZERO = Intro(NAT_TYPE, Inl(ONE_TYPE, NAT_TYPE, UNIT))
SUCC = FLam("n", NAT_TYPE, Intro(NAT_TYPE, Inr(ONE_TYPE, NAT_TYPE, FVar("n"))))

# mu X. X -> X admits \x. elim(x) x, and applying it to its own intro loops
SELF_TYPE = Mu("X", FArrow(TVar("X"), TVar("X")))
SELF_APPLY = FLam("x", SELF_TYPE, FApp(Elim(FVar("x")), FVar("x")))
OMEGA = FApp(SELF_APPLY, Intro(SELF_TYPE, SELF_APPLY))


def numeral(n: int) -> FTerm:
    """intro(inr(...intro(inl(unit))...)) with n successors, already in normal form"""
    term: FTerm = ZERO
    for _ in range(n):
        term = Intro(NAT_TYPE, Inr(ONE_TYPE, NAT_TYPE, term))
    return term
