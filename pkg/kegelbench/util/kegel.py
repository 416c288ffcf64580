"""
Exact sub-distributions and convex-algebra primitives
Every weight is a sympy Rational; nothing in here rounds.
"""

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Generic, Iterable, Mapping, Optional, Sequence, Tuple, TypeVar

import sympy as sp

from .errors import DimensionError, OrderError, WeightError

A = TypeVar("A")
B = TypeVar("B")

ZERO = sp.Integer(0)
ONE = sp.Integer(1)

_PROB_TEXT = re.compile(r"^\s*(\d+)\s*(?:/\s*(\d+))?\s*$")


def to_rational(value) -> sp.Rational:
    """Coerce ints, "p/q" strings and Rationals; floats are refused"""
    if isinstance(value, Prob):
        return value.value
    if isinstance(value, float):
        raise WeightError(f"floating-point weight {value!r} is not exact; pass 'p/q' instead")
    if isinstance(value, str):
        match = _PROB_TEXT.match(value)
        if not match:
            raise WeightError(f"not a rational literal: {value!r}")
        num, den = match.group(1), match.group(2) or "1"
        if int(den) == 0:
            raise WeightError(f"zero denominator in {value!r}")
        return sp.Rational(int(num), int(den))
    return sp.Rational(value)


def parse_prob(text: str) -> sp.Rational:
    value = to_rational(text)
    if value > 1:
        raise WeightError(f"probability {text!r} exceeds 1")
    return value


def format_prob(value) -> str:
    """Canonical text: lowest terms, positive denominator, integers without '/1'"""
    return str(sp.Rational(value))


@dataclass(frozen=True)
class Prob:
    value: sp.Rational

    def __post_init__(self):
        value = to_rational(self.value)
        if value < 0 or value > 1:
            raise WeightError(f"probability {value} outside [0, 1]")
        object.__setattr__(self, "value", value)

    def complement(self) -> "Prob":
        return Prob(ONE - self.value)

    def __str__(self) -> str:
        return format_prob(self.value)


def _check_weights(weights: Sequence) -> Tuple[sp.Rational, ...]:
    checked = tuple(to_rational(w) for w in weights)
    for w in checked:
        if w < 0:
            raise WeightError(f"negative weight {w}")
    total = sum(checked, ZERO)
    if total > 1:
        raise WeightError(f"weights sum to {total} > 1")
    return checked


@dataclass(frozen=True)
class SubDist:
    """
    Finitely supported sub-probability distribution over the naturals.

    Stored as a sorted tuple of (index, weight) pairs with zero weights elided,
    so structural equality is distribution equality.
    """

    weights: Tuple[Tuple[int, sp.Rational], ...] = ()

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, object]) -> "SubDist":
        entries = []
        for index, raw in mapping.items():
            if int(index) < 0:
                raise WeightError(f"negative support index {index}")
            w = to_rational(raw)
            if w < 0:
                raise WeightError(f"negative weight {w} at {index}")
            if w != 0:
                entries.append((int(index), w))
        entries.sort(key=lambda pair: pair[0])
        dist = cls(tuple(entries))
        if dist.mass > 1:
            raise WeightError(f"total mass {dist.mass} > 1")
        return dist

    @cached_property
    def table(self) -> dict:
        return dict(self.weights)

    @cached_property
    def mass(self) -> sp.Rational:
        return sum((w for _, w in self.weights), ZERO)

    def __getitem__(self, index: int) -> sp.Rational:
        return self.table.get(index, ZERO)

    def support(self) -> Tuple[int, ...]:
        return tuple(i for i, _ in self.weights)

    def is_empty(self) -> bool:
        return not self.weights

    def __str__(self) -> str:
        inner = ", ".join(f"{i}↦{format_prob(w)}" for i, w in self.weights)
        return "{" + inner + "}"


EMPTY = SubDist()


def sub_dist(mapping: Mapping[int, object]) -> SubDist:
    return SubDist.from_mapping(mapping)


def dirac(n: int) -> SubDist:
    return SubDist(((int(n), ONE),))


def mass(d: SubDist) -> sp.Rational:
    return d.mass


def weight(d: SubDist, n: int) -> sp.Rational:
    return d[n]


def _accumulate(pairs: Iterable[Tuple[int, sp.Rational]]) -> SubDist:
    # callers guarantee the mass bound
    acc: dict = {}
    for index, w in pairs:
        acc[index] = acc.get(index, ZERO) + w
    return SubDist(tuple(sorted((i, w) for i, w in acc.items() if w != 0)))


def convex_combine(weights: Sequence, dists: Sequence[SubDist]) -> SubDist:
    """Pointwise sum of weights[i] * dists[i] (the barycentre operation)"""
    if len(weights) != len(dists):
        raise DimensionError(f"{len(weights)} weights for {len(dists)} distributions")
    checked = _check_weights(weights)
    return _accumulate(
        (index, r * w)
        for r, d in zip(checked, dists)
        if r != 0
        for index, w in d.weights
    )


def scale(lam, d: SubDist) -> SubDist:
    lam = Prob(lam).value
    if lam == 0:
        return EMPTY
    if lam == 1:
        return d
    return SubDist(tuple((i, lam * w) for i, w in d.weights))


def shift(d: SubDist) -> SubDist:
    return SubDist(tuple((i + 1, w) for i, w in d.weights))


def truncate(d: SubDist, cap: int) -> SubDist:
    if not d.weights or d.weights[-1][0] <= cap:
        return d
    return SubDist(tuple((i, w) for i, w in d.weights if i <= cap))


def pointwise_leq(d1: SubDist, d2: SubDist) -> bool:
    return all(w <= d2[i] for i, w in d1.weights)


def distance(d1: SubDist, d2: SubDist) -> sp.Rational:
    """L1 distance, exact"""
    indices = set(d1.table) | set(d2.table)
    return sum((abs(d1[i] - d2[i]) for i in indices), ZERO)


def lub(chain: Sequence[SubDist]) -> SubDist:
    if not chain:
        return EMPTY
    for lower, upper in zip(chain, chain[1:]):
        if not pointwise_leq(lower, upper):
            raise OrderError(f"chain is not ascending: {lower} then {upper}")
    return chain[-1]


@dataclass(frozen=True)
class FiniteSubDist:
    """An element of SDM(n): n entries, nonnegative, summing to at most 1"""

    entries: Tuple[sp.Rational, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", _check_weights(self.entries))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def mass(self) -> sp.Rational:
        return sum(self.entries, ZERO)

    @classmethod
    def zero(cls, n: int) -> "FiniteSubDist":
        return cls((ZERO,) * n)

    @classmethod
    def unit(cls, n: int, i: int) -> "FiniteSubDist":
        if not 0 <= i < n:
            raise DimensionError(f"index {i} outside arity {n}")
        return cls(tuple(ONE if k == i else ZERO for k in range(n)))


def subconvex_combine(weights: Sequence, vectors: Sequence[FiniteSubDist]) -> FiniteSubDist:
    if len(weights) != len(vectors):
        raise DimensionError(f"{len(weights)} weights for {len(vectors)} vectors")
    checked = _check_weights(weights)
    arities = {v.n for v in vectors}
    if len(arities) > 1:
        raise DimensionError(f"mixed arities {sorted(arities)}")
    n = arities.pop() if arities else 0
    return FiniteSubDist(
        tuple(sum((r * v.entries[k] for r, v in zip(checked, vectors)), ZERO) for k in range(n))
    )


@dataclass(frozen=True)
class SkewSumElem(Generic[A, B]):
    """
    Element of the skew sum A ⊕ B: (a, -, 0), (-, b, 1) or (a, b, lam) with 0 < lam < 1.
    Components made irrelevant by lam are dropped on construction.
    """

    left: Optional[A]
    right: Optional[B]
    lam: sp.Rational = field(default=ZERO)

    def __post_init__(self):
        lam = Prob(self.lam).value
        object.__setattr__(self, "lam", lam)
        if lam == 0:
            object.__setattr__(self, "right", None)
        if lam == 1:
            object.__setattr__(self, "left", None)
        if lam < 1 and self.left is None:
            raise WeightError(f"skew element with lambda={lam} needs a left component")
        if lam > 0 and self.right is None:
            raise WeightError(f"skew element with lambda={lam} needs a right component")

    @classmethod
    def pure_left(cls, a: A) -> "SkewSumElem[A, B]":
        return cls(a, None, ZERO)

    @classmethod
    def pure_right(cls, b: B) -> "SkewSumElem[A, B]":
        return cls(None, b, ONE)


Combiner = Callable[[Sequence[sp.Rational], Sequence], object]
Order = Callable[[object, object], bool]


def skew_sum_combine(
    weights: Sequence,
    elems: Sequence[SkewSumElem],
    combine_a: Combiner,
    combine_b: Combiner,
) -> SkewSumElem:
    """
    Convex combination in the skew sum. With s = sum r_i lam_i the left part is
    combined with weights r_i (1 - lam_i) / (1 - s), the right part with
    r_i lam_i / s, and the result carries lam = s. At s = 0 (resp. 1) the result
    lies wholly in A (resp. B).

    For sub-convex weights (sum r_i < 1) the same formula is applied: the left
    weights then sum to (sum r_i - s) / (1 - s) <= 1.
    """
    if len(weights) != len(elems):
        raise DimensionError(f"{len(weights)} weights for {len(elems)} elements")
    r = _check_weights(weights)
    s = sum((ri * e.lam for ri, e in zip(r, elems)), ZERO)

    left = right = None
    if s < 1:
        picked = [(ri * (ONE - e.lam) / (ONE - s), e.left) for ri, e in zip(r, elems) if ri * (ONE - e.lam) != 0]
        left = combine_a([w for w, _ in picked], [a for _, a in picked])
    if s > 0:
        picked = [(ri * e.lam / s, e.right) for ri, e in zip(r, elems) if ri * e.lam != 0]
        right = combine_b([w for w, _ in picked], [b for _, b in picked])
    return SkewSumElem(left, right, s)


def skew_leq(e1: SkewSumElem, e2: SkewSumElem, leq_a: Order, leq_b: Order) -> bool:
    """
    (a, b, lam) <= (a', b', mu) iff lam <= mu, a <= a' and b <= b', where a
    comparison is skipped when either side lacks that component. In particular
    every pure-A element lies below every pure-B element.
    """
    if e1.lam > e2.lam:
        return False
    if e1.left is not None and e2.left is not None and not leq_a(e1.left, e2.left):
        return False
    if e1.right is not None and e2.right is not None and not leq_b(e1.right, e2.right):
        return False
    return True
