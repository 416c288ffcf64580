"""
Sub-stochastic matrices as arrows of the Lawvere theory L≤1.

An arrow n -> m is an m x n matrix whose column j is the sub-distribution
image of source index j; composition is plain matrix multiplication.
"""

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import sympy as sp

from .errors import DimensionError, OrderError, WeightError
from .kegel import ONE, ZERO, FiniteSubDist, to_rational


@dataclass(frozen=True)
class StochMatrix:
    entries: sp.ImmutableMatrix

    def __post_init__(self):
        for value in self.entries:
            if value < 0:
                raise WeightError(f"negative matrix entry {value}")
        for j in range(self.cols):
            total = self.column_sum(j)
            if total > 1:
                raise WeightError(f"column {j} sums to {total} > 1")

    @property
    def rows(self) -> int:
        return self.entries.rows

    @property
    def cols(self) -> int:
        return self.entries.cols

    @property
    def shape(self) -> tuple:
        return self.entries.shape

    def __getitem__(self, key):
        return self.entries[key]

    def column_sum(self, j: int):
        return sum((self.entries[i, j] for i in range(self.rows)), ZERO)

    def column(self, j: int) -> FiniteSubDist:
        return FiniteSubDist(tuple(self.entries[i, j] for i in range(self.rows)))

    def to_rows(self) -> list:
        return [[self.entries[i, j] for j in range(self.cols)] for i in range(self.rows)]

    def __str__(self) -> str:
        return str(self.to_rows())


def from_rows(rows: Sequence[Sequence], cols: int = None) -> StochMatrix:
    """Build from row-major nested lists; cols is needed only when there are no rows"""
    m = len(rows)
    n = len(rows[0]) if m else (cols or 0)
    if any(len(row) != n for row in rows):
        raise DimensionError("ragged rows")
    flat = [to_rational(v) for row in rows for v in row]
    return StochMatrix(sp.ImmutableMatrix(m, n, flat))


def from_columns(columns: Sequence[FiniteSubDist], rows: int) -> StochMatrix:
    for col in columns:
        if col.n != rows:
            raise DimensionError(f"column of arity {col.n}, expected {rows}")
    return StochMatrix(sp.ImmutableMatrix(rows, len(columns), lambda i, j: columns[j].entries[i]))


def zero(m: int, n: int) -> StochMatrix:
    return StochMatrix(sp.ImmutableMatrix.zeros(m, n))


def identity(n: int) -> StochMatrix:
    return StochMatrix(sp.ImmutableMatrix.eye(n) if n else sp.ImmutableMatrix.zeros(0, 0))


def is_substochastic(a: StochMatrix) -> bool:
    return all(v >= 0 for v in a.entries) and all(a.column_sum(j) <= 1 for j in range(a.cols))


def is_stochastic(a: StochMatrix) -> bool:
    """Arrows of L proper: every column sums to exactly 1"""
    return is_substochastic(a) and all(a.column_sum(j) == 1 for j in range(a.cols))


def compose(a: StochMatrix, b: StochMatrix) -> StochMatrix:
    if a.cols != b.rows:
        raise DimensionError(f"cannot compose {a.shape} after {b.shape}")
    if a.rows == 0 or b.cols == 0 or a.cols == 0:
        return zero(a.rows, b.cols)
    product = StochMatrix(sp.ImmutableMatrix(a.entries * b.entries))
    assert is_substochastic(product)
    return product


def inj1(n1: int, n2: int) -> StochMatrix:
    return StochMatrix(sp.ImmutableMatrix(n1 + n2, n1, lambda i, j: ONE if i == j else ZERO))


def inj2(n1: int, n2: int) -> StochMatrix:
    return StochMatrix(sp.ImmutableMatrix(n1 + n2, n2, lambda i, j: ONE if i == j + n1 else ZERO))


def copair(a1: StochMatrix, a2: StochMatrix) -> StochMatrix:
    if a1.rows != a2.rows:
        raise DimensionError(f"copair needs equal row counts, got {a1.rows} and {a2.rows}")
    n1 = a1.cols
    return StochMatrix(
        sp.ImmutableMatrix(
            a1.rows, n1 + a2.cols, lambda i, j: a1.entries[i, j] if j < n1 else a2.entries[i, j - n1]
        )
    )


def block_diag(a1: StochMatrix, a2: StochMatrix) -> StochMatrix:
    p1, n1 = a1.shape

    def entry(i, j):
        if i < p1 and j < n1:
            return a1.entries[i, j]
        if i >= p1 and j >= n1:
            return a2.entries[i - p1, j - n1]
        return ZERO

    return StochMatrix(sp.ImmutableMatrix(p1 + a2.rows, n1 + a2.cols, entry))


def leq(a: StochMatrix, b: StochMatrix) -> bool:
    if a.shape != b.shape:
        raise DimensionError(f"cannot compare {a.shape} with {b.shape}")
    return all(x <= y for x, y in zip(a.entries, b.entries))


def apply(a: StochMatrix, d: FiniteSubDist) -> FiniteSubDist:
    if a.cols != d.n:
        raise DimensionError(f"matrix with {a.cols} columns applied to a vector of arity {d.n}")
    return FiniteSubDist(
        tuple(sum((a.entries[i, j] * d.entries[j] for j in range(a.cols)), ZERO) for i in range(a.rows))
    )


IndexMap = Union[Callable[[int], int], Sequence[int]]


def pushforward(f: IndexMap, d: FiniteSubDist, k: int) -> FiniteSubDist:
    """y -> sum of d(x) over the preimage of y"""
    lookup = f if callable(f) else f.__getitem__
    acc = [ZERO] * k
    for x, w in enumerate(d.entries):
        y = lookup(x)
        if not 0 <= y < k:
            raise DimensionError(f"index map sends {x} to {y}, outside 0..{k - 1}")
        acc[y] += w
    return FiniteSubDist(tuple(acc))


def kleisli_unit(n: int, i: int) -> FiniteSubDist:
    return FiniteSubDist.unit(n, i)


def kleisli_mult(outer: FiniteSubDist, family: Sequence[FiniteSubDist]) -> FiniteSubDist:
    """Flatten a distribution over distributions: x -> sum_phi outer(phi) * phi(x)"""
    if outer.n != len(family):
        raise DimensionError(f"outer arity {outer.n} but {len(family)} inner distributions")
    arities = {phi.n for phi in family}
    if len(arities) > 1:
        raise DimensionError(f"inner distributions of mixed arity {sorted(arities)}")
    if not family:
        return FiniteSubDist(())
    return apply(from_columns(family, arities.pop()), outer)


def chain_sup(chain: Sequence[StochMatrix]) -> StochMatrix:
    if not chain:
        raise OrderError("supremum of an empty chain")
    for lower, upper in zip(chain, chain[1:]):
        if not leq(lower, upper):
            raise OrderError("matrix chain is not ascending")
    return chain[-1]
