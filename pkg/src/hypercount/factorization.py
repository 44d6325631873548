"""Subset indices, the bitwise dominance order, and unique factorization
of positive integer tuples into reduced tuples.

An index h in [1, 2^n - 1] encodes the nonempty subset of {1, ..., n}
whose characteristic vector is the binary expansion of h: member j
corresponds to bit j-1.  The dominance order is bitwise: h is below l
when every member of h is a member of l.

A tuple (z_1, ..., z_{2^n - 1}) of positive integers is *reduced* when
gcd(z_h, z_l) = 1 for every incomparable pair (h, l).  Every tuple of n
positive integers (y_1, ..., y_n) factors uniquely as

    y_j = prod_h z_h^{bit_j(h)}     with (z_h) reduced,

and then prod_h z_h = lcm(y_1, ..., y_n).  ``factorize`` builds the
z-tuple by descending subset size via iterated gcds; ``compose``
inverts it.

Tuples are stored densely: index 0 of the array holds z_1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Sequence

from .errors import ContractViolation


def bit(h: int, j: int) -> int:
    """Binary digit of h selecting member j (1-based)."""
    return (h >> (j - 1)) & 1


def weight(h: int) -> int:
    """Number of members of the subset encoded by h."""
    return bin(h).count("1")


def members(h: int, n: int) -> tuple[int, ...]:
    """The members of h as a sorted tuple of indices in [1, n]."""
    return tuple(j for j in range(1, n + 1) if bit(h, j))


def dominated_by(h: int, l: int) -> bool:
    """True when every binary digit of h is <= the digit of l."""
    return h & l == h


def comparable(h: int, l: int) -> bool:
    return dominated_by(h, l) or dominated_by(l, h)


class Dominance(Enum):
    EQUAL = "equal"
    SECOND_BELOW_FIRST = "second_dominated_by_first"
    FIRST_BELOW_SECOND = "first_dominated_by_second"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class SubsetIndex:
    """A nonempty subset of {1, ..., n} encoded as an integer in [1, 2^n - 1]."""

    h: int
    n: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ContractViolation(f"dimension must be >= 2, got {self.n}")
        if not 1 <= self.h < (1 << self.n):
            raise ContractViolation(
                f"index {self.h} outside [1, {(1 << self.n) - 1}] for n={self.n}")

    def bit(self, j: int) -> int:
        return bit(self.h, j)

    @property
    def weight(self) -> int:
        return weight(self.h)

    @property
    def members(self) -> tuple[int, ...]:
        return members(self.h, self.n)


def subset_relation(a: SubsetIndex, b: SubsetIndex) -> Dominance:
    """Dominance relation between two subset indices of the same dimension."""
    if a.n != b.n:
        raise ContractViolation(f"mismatched dimensions {a.n} != {b.n}")
    return relation(a.h, b.h)


def relation(h: int, l: int) -> Dominance:
    if h == l:
        return Dominance.EQUAL
    if dominated_by(l, h):
        return Dominance.SECOND_BELOW_FIRST
    if dominated_by(h, l):
        return Dominance.FIRST_BELOW_SECOND
    return Dominance.INCOMPARABLE


@lru_cache(maxsize=None)
def incomparable_pairs(n: int) -> tuple[tuple[int, int], ...]:
    """All unordered incomparable pairs (h, l), h < l, of indices in [1, 2^n - 1]."""
    top = 1 << n
    return tuple((h, l)
                 for h in range(1, top)
                 for l in range(h + 1, top)
                 if not comparable(h, l))


def dimension_of(z: Sequence[int]) -> int:
    """Recover n from a dense tuple of length 2^n - 1."""
    n = (len(z) + 1).bit_length() - 1
    if (1 << n) - 1 != len(z):
        raise ContractViolation(f"tuple length {len(z)} is not of the form 2^n - 1")
    if n < 2:
        raise ContractViolation("tuple encodes a dimension < 2")
    return n


def is_reduced(z: Sequence[int]) -> bool:
    """True when gcd(z_h, z_l) = 1 for every incomparable pair (h, l).

    The tuple must have length 2^n - 1 with entries >= 1.
    """
    n = dimension_of(z)
    if any(v < 1 for v in z):
        raise ContractViolation("entries must be positive integers")
    big = [h for h in range(1, (1 << n)) if z[h - 1] > 1]
    for i, h in enumerate(big):
        for l in big[i + 1:]:
            if not comparable(h, l) and math.gcd(z[h - 1], z[l - 1]) > 1:
                return False
    return True


@lru_cache(maxsize=None)
def _weight_levels(n: int) -> tuple[tuple[int, ...], ...]:
    """Indices grouped by subset size, sizes n, n-1, ..., 1; ascending h inside."""
    top = 1 << n
    levels = []
    for k in range(n, 0, -1):
        levels.append(tuple(h for h in range(1, top) if weight(h) == k))
    return tuple(levels)


def factorize(y: Sequence[int]) -> tuple[int, ...]:
    """Unique reduced tuple (z_h) with y_j = prod_h z_h^{bit_j(h)}.

    Follows the descending-size construction: z for the full set is
    gcd(y_1, ..., y_n); at size k each z_h is the gcd over members j of h
    of y_j divided by the product of the already assigned z_l with l
    containing j; singletons absorb the remaining cofactor exactly.
    """
    n = len(y)
    if n < 2:
        raise ContractViolation("need at least two coordinates")
    if any(v < 1 for v in y):
        raise ContractViolation("coordinates must be positive integers")
    z = [1] * ((1 << n) - 1)
    assigned = [1] * (n + 1)  # assigned[j] = prod of z_l over assigned l containing j
    for level in _weight_levels(n):
        for h in level:
            mem = members(h, n)
            if len(mem) == 1:
                j = mem[0]
                q, r = divmod(y[j - 1], assigned[j])
                if r:
                    raise ContractViolation("inputs do not factor; nonintegral quotient")
                z[h - 1] = q
            else:
                g = 0
                for j in mem:
                    q, r = divmod(y[j - 1], assigned[j])
                    if r:
                        raise ContractViolation("inputs do not factor; nonintegral quotient")
                    g = math.gcd(g, q)
                    if g == 1:
                        break
                z[h - 1] = g
        for h in level:
            if z[h - 1] > 1:
                for j in members(h, n):
                    assigned[j] *= z[h - 1]
    return tuple(z)


def compose(z: Sequence[int]) -> tuple[int, ...]:
    """Inverse of ``factorize``: y_j = prod_h z_h^{bit_j(h)} for a reduced z."""
    n = dimension_of(z)
    if not is_reduced(z):
        raise ContractViolation("tuple is not reduced")
    y = [1] * n
    for h, v in enumerate(z, start=1):
        if v > 1:
            for j in members(h, n):
                y[j - 1] *= v
    return tuple(y)


def tuple_product(z: Sequence[int]) -> int:
    """prod_h z_h; equals lcm(y) for the tuple produced by ``factorize``."""
    return math.prod(z)
