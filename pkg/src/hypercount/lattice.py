"""Divisor coefficients of a reduced tuple, exact slab volumes, and exact
counts of bounded solutions of the associated linear equation.

For a reduced tuple (z_h) with composed coordinates y_j, the coefficient
d_i = prod_h z_h^{1 - bit_i(h)} satisfies d_i * y_i = prod_h z_h, and the
ambient equation becomes sum_i d_i alpha_i = 0.  This module counts

    A(X)   = #{alpha in Z^n : |alpha_i| <= X, sum d_i alpha_i = 0}
    A_r(X) = #{(alpha_{r+1},...,alpha_n) : |alpha_i| <= X,
               sum_{i>r} d_i alpha_i == 0  mod  joint(r)}

exactly, and evaluates the continuous main term X^{n-1} b / d_1 where b
is the volume of the slab {alpha in [-1,1]^{n-1} : |sum_{i>=2} d_i
alpha_i| <= d_1}.  Counts run in O(X^{n-2} polylog) by iterating all but
two coordinates and closing the last two with a progression count.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ContractViolation
from .factorization import bit, dimension_of, is_reduced, weight

# numpy paths stay in int64; anything bigger falls back to exact Python ints
_VEC_LIMIT = 1 << 60


# ----------------------------- coefficients -----------------------------

@dataclass(frozen=True)
class LatticeCoefficients:
    """All divisor products attached to a reduced tuple.

    d[i-1]      product of z_h over subsets h NOT containing i
    joint[r-1]  product over h avoiding all of 1..r         (r = 1..n)
    step[m-1]   product over h avoiding 1..m, containing m+1 (m = 1..n-1)
    excess[r-2] product over h avoiding r, meeting {1..r-1}  (r = 2..n)
    """

    n: int
    d: tuple[int, ...]
    joint: tuple[int, ...]
    step: tuple[int, ...]
    excess: tuple[int, ...]

    def d_joint(self, r: int) -> int:
        return self.joint[r - 1]

    def d_step(self, m: int) -> int:
        return self.step[m - 1]

    def d_excess(self, r: int) -> int:
        return self.excess[r - 2]

    @property
    def excess_first(self) -> int:
        """Product over h avoiding 1 and containing 2 (same as step 1)."""
        return self.step[0]


def lattice_coefficients(z: Sequence[int]) -> LatticeCoefficients:
    n = dimension_of(z)
    top = 1 << n
    d = [1] * n
    joint = [1] * n
    step = [1] * (n - 1)
    excess = [1] * (n - 1)
    for h in range(1, top):
        v = z[h - 1]
        if v == 1:
            continue
        low = (h & -h).bit_length()  # smallest member of h
        for i in range(1, n + 1):
            if not bit(h, i):
                d[i - 1] *= v
        for r in range(1, n + 1):
            if (h & ((1 << r) - 1)) == 0:
                joint[r - 1] *= v
        if low > 1:
            step[low - 2] *= v  # avoids 1..low-1, contains low
        for r in range(2, n + 1):
            if not bit(h, r) and (h & ((1 << (r - 1)) - 1)) != 0:
                excess[r - 2] *= v
    return LatticeCoefficients(n, tuple(d), tuple(joint), tuple(step), tuple(excess))


# ----------------------------- slab volumes -----------------------------

def _box_cdf(weights: Sequence[Fraction], t: Fraction) -> Fraction:
    """vol{b in [0,1]^m : sum a_i b_i <= t} by inclusion-exclusion over
    corner shifts with positive-part powers."""
    m = len(weights)
    total = sum(weights)
    if t <= 0:
        return Fraction(0)
    if t >= total:
        return Fraction(1)
    acc = Fraction(0)
    for mask in range(1 << m):
        s = t
        sign = 1
        for i in range(m):
            if (mask >> i) & 1:
                s -= weights[i]
                sign = -sign
        if s > 0:
            acc += sign * s ** m
    return acc / (math.factorial(m) * math.prod(weights))


def slab_volume(weights: Sequence[int | Fraction], bound: int | Fraction) -> Fraction:
    """Exact volume of {alpha in [-1,1]^m : |sum a_i alpha_i| <= c}.

    Weights must be positive; the bound nonnegative.  After the affine
    change alpha = 2 beta - 1 this is 2^m (F(t+) - F(t-)) with t± =
    (sum a_i ± c)/2 and F the box cdf above.
    """
    m = len(weights)
    if m < 1:
        raise ContractViolation("need at least one weight")
    w = [Fraction(a) for a in weights]
    c = Fraction(bound)
    if any(a <= 0 for a in w):
        raise ContractViolation("weights must be positive")
    if c < 0:
        raise ContractViolation("bound must be nonnegative")
    total = sum(w)
    if c >= total:
        return Fraction(2) ** m
    t_hi = (total + c) / 2
    t_lo = (total - c) / 2
    return (Fraction(2) ** m) * (_box_cdf(w, t_hi) - _box_cdf(w, t_lo))


def slab_volume_float(weights: Sequence[float], bound: float) -> float:
    """Real-weight slab volume, evaluated exactly on the float inputs.

    Floats are binary rationals, so converting them to ``Fraction`` and
    running the exact formula incurs no rounding beyond the final cast.
    """
    return float(slab_volume([Fraction(a) for a in weights], Fraction(bound)))


def tuple_slab_volume(z: Sequence[int]) -> Fraction:
    """b-volume of a reduced tuple: slab with weights (d_2..d_n), bound d_1."""
    if not is_reduced(z):
        raise ContractViolation("tuple is not reduced")
    co = lattice_coefficients(z)
    return slab_volume(co.d[1:], co.d[0])


def solution_main_term(z: Sequence[int], X: int) -> Fraction:
    """Continuous main term X^{n-1} b / d_1 of the bounded solution count."""
    if X < 1:
        raise ContractViolation("X must be >= 1")
    n = dimension_of(z)
    co = lattice_coefficients(z)
    return Fraction(X) ** (n - 1) * tuple_slab_volume(z) / co.d[0]


# --------------------------- progression counts ---------------------------

def _progression_count(a0: int, M: int, lo: int, hi: int) -> int:
    """#{u in [lo, hi] : u == a0 (mod M)}, M >= 1."""
    if hi < lo:
        return 0
    return (hi - a0) // M - (lo - a0 - 1) // M


def _pair_count_scalar(a: int, La: int, b: int, Lb: int, s: int) -> int:
    """#{(u, v) : a u + b v = s, |u| <= La, |v| <= Lb} with a, b >= 1."""
    g = math.gcd(a, b)
    if s % g:
        return 0
    a_, b_, s_ = a // g, b // g, s // g
    u0 = (s_ % b_) * pow(a_ % b_, -1, b_) % b_ if b_ > 1 else 0
    lo = max(-La, -((b * Lb - s) // a))
    hi = min(La, (s + b * Lb) // a)
    return _progression_count(u0, b_, lo, hi)


def _pair_count_vec(a: int, La: int, b: int, Lb: int, s: np.ndarray) -> np.ndarray:
    g = math.gcd(a, b)
    a_, b_ = a // g, b // g
    ok = s % g == 0
    sq = np.where(ok, s, 0) // g
    if b_ > 1:
        inv = pow(a_ % b_, -1, b_)
        u0 = (sq % b_) * inv % b_
    else:
        u0 = np.zeros_like(sq)
    lo = np.maximum(-La, -((b * Lb - s) // a))
    hi = np.minimum(La, (s + b * Lb) // a)
    cnt = (hi - u0) // b_ - (lo - u0 - 1) // b_
    return np.where(ok & (hi >= lo), cnt, 0)


_CHUNK = 1 << 22  # flattened outer-grid cells per vectorized batch


def _outer_sum_chunks(outer: list[tuple[int, int]], base: int) -> "Iterator[np.ndarray]":
    """Flattened arrays of base - sum(c_i w_i) over the outer grid, peeled
    one coordinate at a time while the grid exceeds the chunk cap."""
    size = math.prod(2 * L + 1 for L, _ in outer)
    if size <= _CHUNK:
        s = np.full(1, base, dtype=np.int64)
        for L, c in outer:
            w = np.arange(-L, L + 1, dtype=np.int64) * (-c)
            s = (s[:, None] + w[None, :]).ravel()
        yield s
        return
    (L, c), rest = outer[0], outer[1:]
    for w in range(-L, L + 1):
        yield from _outer_sum_chunks(rest, base - c * w)


def count_zero_sum_boxes(coeffs: Sequence[int], limits: Sequence[int]) -> int:
    """#{w in Z^m : sum c_i w_i = 0, |w_i| <= L_i} for positive coefficients.

    The two coordinates with the largest boxes are closed in one
    progression count; the others are enumerated (in bounded-memory
    chunks).  Switches to exact Python integers when int64 could
    overflow.
    """
    if len(coeffs) != len(limits):
        raise ContractViolation("coefficient/limit length mismatch")
    if any(c < 1 for c in coeffs) or any(L < 0 for L in limits):
        raise ContractViolation("coefficients must be >= 1 and limits >= 0")
    active = sorted(((L, c) for c, L in zip(coeffs, limits) if L > 0))
    if len(active) <= 1:
        return 1  # only the zero vector
    (Lb, b), (La, a) = active[-2], active[-1]
    outer = active[:-2]
    if not outer:
        return _pair_count_scalar(a, La, b, Lb, 0)
    reach = sum(L * c for L, c in active)
    if reach < _VEC_LIMIT and max(a, b) ** 2 < _VEC_LIMIT:
        return sum(int(_pair_count_vec(a, La, b, Lb, s).sum())
                   for s in _outer_sum_chunks(outer, 0))
    total = 0
    for combo in itertools.product(*(range(-L, L + 1) for L, _ in outer)):
        s = -sum(c * w for (_, c), w in zip(outer, combo))
        total += _pair_count_scalar(a, La, b, Lb, s)
    return total


def count_zero_sum(d: Sequence[int], X: int) -> int:
    """#{alpha in Z^n : |alpha_i| <= X, sum d_i alpha_i = 0}."""
    if X < 0:
        raise ContractViolation("X must be >= 0")
    if X == 0:
        return 1
    return count_zero_sum_boxes(d, [X] * len(d))


def count_solutions(z: Sequence[int], X: int) -> int:
    """Exact cardinality of the bounded solution set A(X) of a reduced tuple."""
    co = lattice_coefficients(z)
    return count_zero_sum(co.d, X)


def count_congruence(z: Sequence[int], r: int, X: int) -> int:
    """Exact cardinality of A_r(X): tuples (alpha_{r+1},...,alpha_n) in
    [-X, X]^{n-r} with sum_{i>r} d_i alpha_i == 0 mod joint(r)."""
    n = dimension_of(z)
    if not 1 <= r <= n - 1:
        raise ContractViolation(f"r must lie in [1, {n - 1}]")
    if X < 0:
        raise ContractViolation("X must be >= 0")
    if X == 0:
        return 1
    co = lattice_coefficients(z)
    q = co.d_joint(r)
    if q == 1:
        return (2 * X + 1) ** (n - r)
    lead = co.d[r]  # coefficient of alpha_{r+1}
    rest = co.d[r + 1:]
    g = math.gcd(lead, q)
    M = q // g
    inv = pow((lead // g) % M, -1, M) if M > 1 else 0

    def closed(s: int) -> int:
        # alpha_{r+1} with lead * alpha == -s (mod q)
        if s % g:
            return 0
        a0 = (-(s // g) % M) * inv % M
        return (X - a0) // M + (X + a0) // M + 1

    if not rest:
        return closed(0)
    reach = sum(c * X for c in rest) + q
    if reach < _VEC_LIMIT and M * M < _VEC_LIMIT:
        s = np.zeros(1, dtype=np.int64)
        for c in rest:
            w = np.arange(-X, X + 1, dtype=np.int64) * c
            s = (s[:, None] + w[None, :]).ravel()
        ok = s % g == 0
        sq = np.where(ok, s, 0) // g
        a0 = (-sq % M) * inv % M if M > 1 else np.zeros_like(sq)
        cnt = (X - a0) // M + (X + a0) // M + 1
        return int(np.where(ok, cnt, 0).sum())
    total = 0
    for combo in itertools.product(range(-X, X + 1), repeat=len(rest)):
        total += closed(sum(c * w for c, w in zip(rest, combo)))
    return total
