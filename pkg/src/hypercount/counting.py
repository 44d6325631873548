"""Counting rational points of bounded height on the open subset
y_1 ... y_n != 0 of the hypersurface

    x_1 y_2 ... y_n + x_2 y_1 y_3 ... y_n + ... + x_n y_1 ... y_{n-1} = 0

in P^{2n-1}(Q), by three independent pipelines:

  direct    enumerate y in [1, X]^n and count primitive x per tuple,
  moebius   unrestricted counts N(B/k^n) combined with the Moebius function,
  torsor    enumerate reduced tuples z and admissible x' in the
            factorized coordinate system.

The anticanonical height of a primitive representative is
H = max_i(max(|x_i|, y_i))^n; a point qualifies when H <= floor(B), so
X = floor(B^{1/n}) computed with exact integer arithmetic.  Sign orbits
reduce counting to positive y, contributing the factor 2^{n-1}.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import ContractViolation, PrimitivityError
from .factorization import (bit, dimension_of, factorize, is_reduced,
                            members, weight)
from .lattice import count_zero_sum, count_zero_sum_boxes

WORKERS_ENV = "HYPERCOUNT_WORKERS"

METHODS = ("direct", "moebius", "torsor")


# ------------------------------ arithmetic ------------------------------

def int_nth_root(value: int, n: int) -> int:
    """Largest integer x >= 0 with x^n <= value (value >= 0)."""
    if value < 0:
        raise ContractViolation("value must be nonnegative")
    if value == 0:
        return 0
    x = int(round(value ** (1.0 / n)))
    while x ** n > value:
        x -= 1
    while (x + 1) ** n <= value:
        x += 1
    return x


def mobius_sieve(limit: int) -> np.ndarray:
    """Moebius function on [0, limit]."""
    mu = np.ones(limit + 1, dtype=np.int64)
    if limit >= 0:
        mu[0] = 0
    sieve = np.ones(limit + 1, dtype=bool)
    for p in range(2, limit + 1):
        if sieve[p]:
            sieve[2 * p::p] = False
            mu[p::p] *= -1
            sq = p * p
            if sq <= limit:
                mu[sq::sq] = 0
    return mu


def squarefree_divisors(m: int) -> list[tuple[int, int]]:
    """(divisor, moebius sign) for every squarefree divisor of m."""
    out = [(1, 1)]
    rest = m
    p = 2
    while p * p <= rest:
        if rest % p == 0:
            out = out + [(d * p, -s) for d, s in out]
            while rest % p == 0:
                rest //= p
        p += 1 if p == 2 else 2
    if rest > 1:
        out = out + [(d * rest, -s) for d, s in out]
    return out


# ------------------------------ point types ------------------------------

def height(x: Sequence[int], y: Sequence[int]) -> int:
    """Anticanonical height of an integer representative."""
    n = len(x)
    m = max(max(abs(v) for v in x), max(y))
    return m ** n


@dataclass(frozen=True)
class PrimitiveSolution:
    """A primitive integer representative with positive y coordinates."""

    n: int
    x: tuple[int, ...]
    y: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.x) != self.n or len(self.y) != self.n:
            raise ContractViolation("coordinate length mismatch")
        if any(v < 1 for v in self.y):
            raise ContractViolation("y coordinates must be positive")
        if ambient_equation(self.x, self.y) != 0:
            raise ContractViolation("coordinates do not satisfy the equation")
        if math.gcd(*self.x, *self.y) != 1:
            raise ContractViolation("coordinates are not primitive")

    def height(self) -> int:
        return height(self.x, self.y)

    def qualifies(self, B: float) -> bool:
        return self.height() <= math.floor(B)


@dataclass(frozen=True)
class TorsorPoint:
    """Factorized coordinates (x', z) of a solution.

    z has length 2^n - 1 with z_h >= 1 on subsets of size >= 2 and
    z_h != 0 (any sign) on singletons; |z| is reduced and the factorized
    equation sum_j x'_j prod_{size>=2} z_h^{1-bit_j(h)} = 0 holds.  The
    primitivity condition gcd(z_top, x'_1 z_1, ..., x'_n z_{2^{n-1}}) = 1
    is checked separately by ``coprimality_ok`` so that rejected images
    can be represented.
    """

    n: int
    xprime: tuple[int, ...]
    z: tuple[int, ...]

    def __post_init__(self) -> None:
        n = self.n
        if len(self.xprime) != n:
            raise ContractViolation("x' length mismatch")
        if len(self.z) != (1 << n) - 1:
            raise ContractViolation("z length mismatch")
        for h, v in enumerate(self.z, start=1):
            if weight(h) >= 2 and v < 1:
                raise ContractViolation("z entries on subsets of size >= 2 must be >= 1")
            if weight(h) == 1 and v == 0:
                raise ContractViolation("singleton z entries must be nonzero")
        if not is_reduced([abs(v) for v in self.z]):
            raise ContractViolation("|z| is not reduced")
        if sum(self.xprime[j - 1] * self._cofactor(j) for j in range(1, n + 1)) != 0:
            raise ContractViolation("factorized equation fails")

    def _cofactor(self, j: int) -> int:
        return math.prod(v for h, v in enumerate(self.z, start=1)
                         if weight(h) >= 2 and not bit(h, j))

    def coprimality_ok(self) -> bool:
        top = self.z[-1]
        vals = [self.xprime[j - 1] * self.z[(1 << (j - 1)) - 1]
                for j in range(1, self.n + 1)]
        return math.gcd(top, *vals) == 1


def ambient_equation(x: Sequence[int], y: Sequence[int]) -> int:
    """Left-hand side sum_i x_i prod_{j != i} y_j."""
    n = len(x)
    total = 0
    for i in range(n):
        total += x[i] * math.prod(y[j] for j in range(n) if j != i)
    return total


# ------------------------------ torsor maps ------------------------------

def torsor_push(point: TorsorPoint) -> PrimitiveSolution:
    """Image of a torsor point: x_i = z_{2^{i-1}} x'_i, y_i = prod z_h^{bit_i(h)}.

    Raises ``PrimitivityError`` when the primitivity gcd exceeds 1.  When
    singleton z entries are negative, the image is normalized into the
    positive-y representative by flipping the sign pairs (x_i, y_i), which
    preserves the equation and the height.
    """
    if not point.coprimality_ok():
        raise PrimitivityError("gcd condition fails; image is not primitive")
    n = point.n
    x = []
    y = []
    for i in range(1, n + 1):
        xi = point.z[(1 << (i - 1)) - 1] * point.xprime[i - 1]
        yi = math.prod(v for h, v in enumerate(point.z, start=1) if bit(h, i))
        if yi < 0:
            xi, yi = -xi, -yi
        x.append(xi)
        y.append(yi)
    return PrimitiveSolution(n, tuple(x), tuple(y))


def torsor_lift(sol: PrimitiveSolution) -> TorsorPoint:
    """Factorized coordinates of a primitive solution: z = factorize(y) and
    x'_j = x_j / z_{2^{j-1}} (exact by the divisibility forced by the
    factorized equation; signs stay on x')."""
    z = factorize(sol.y)
    xprime = []
    for j in range(1, sol.n + 1):
        zj = z[(1 << (j - 1)) - 1]
        q, r = divmod(sol.x[j - 1], zj)
        if r:
            raise ContractViolation("singleton entry does not divide x")
        xprime.append(q)
    return TorsorPoint(sol.n, tuple(xprime), z)


def coprimality_condition(z: Sequence[int], n: int | None = None) -> bool:
    """gcd over all n! maximal chains of the off-chain products equals 1.

    A maximal chain is 2^{j1-1} < 2^{j1-1}+2^{j2-1} < ... < 2^n - 1 for a
    permutation (j1, ..., jn); the condition is equivalent to reducedness.
    """
    import itertools as _it

    if n is None:
        n = dimension_of(z)
    g = 0
    for perm in _it.permutations(range(1, n + 1)):
        chain = set()
        acc = 0
        for j in perm:
            acc |= 1 << (j - 1)
            chain.add(acc)
        prod = math.prod(v for h, v in enumerate(z, start=1) if h not in chain)
        g = math.gcd(g, prod)
        if g == 1:
            return True
    return g == 1


# --------------------------- tuple enumeration ---------------------------

def _multiplicity(y: Sequence[int]) -> int:
    """Number of distinct permutations of the multiset y (y sorted)."""
    total = math.factorial(len(y))
    run = 1
    for i in range(1, len(y)):
        if y[i] == y[i - 1]:
            run += 1
            total //= run
        else:
            run = 1
    return total


def _sorted_tuples(n: int, T: int, shard: int, shards: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """Nondecreasing tuples in [1, T]^n whose maximum t satisfies
    t % shards == shard, with their permutation multiplicity."""
    # iterate with the maximum outermost so the shard filter prunes early
    for t in range(1, T + 1):
        if t % shards != shard:
            continue
        if n == 3:
            for y2 in range(1, t + 1):
                for y1 in range(1, y2 + 1):
                    y = (y1, y2, t)
                    yield y, _multiplicity(y)
        elif n == 4:
            for y3 in range(1, t + 1):
                for y2 in range(1, y3 + 1):
                    for y1 in range(1, y2 + 1):
                        y = (y1, y2, y3, t)
                        yield y, _multiplicity(y)
        else:
            def inner(prefix: list[int], lo: int, k: int):
                if k == 0:
                    y = tuple(prefix) + (t,)
                    yield y, _multiplicity(y)
                    return
                for v in range(lo, t + 1):
                    prefix.append(v)
                    yield from inner(prefix, v, k - 1)
                    prefix.pop()
            yield from inner([], 1, n - 1)


def _coeffs_of(y: Sequence[int]) -> tuple[int, ...]:
    """d_i = lcm(y) / y_i, the coefficients of the ambient linear form."""
    L = math.lcm(*y)
    return tuple(L // v for v in y)


# ------------------------------- pipelines -------------------------------

def _direct_shard(n: int, X: int, shard: int, shards: int) -> int:
    total = 0
    for y, mult in _sorted_tuples(n, X, shard, shards):
        d = _coeffs_of(y)
        g = math.gcd(*y)
        if g == 1:
            total += mult * count_zero_sum(d, X)
        else:
            sub = 0
            for k, sign in squarefree_divisors(g):
                sub += sign * count_zero_sum(d, X // k)
            total += mult * sub
    return total


def _moebius_shard(n: int, X: int, shard: int, shards: int) -> int:
    mu = mobius_sieve(X)
    total = 0
    for k in range(1, X + 1):
        if not mu[k]:
            continue
        T = X // k
        sub = 0
        for y, mult in _sorted_tuples(n, T, shard, shards):
            sub += mult * count_zero_sum(_coeffs_of(y), T)
        total += int(mu[k]) * sub
    return total


def _torsor_shard(n: int, X: int, shard: int, shards: int) -> int:
    """Reduced-tuple enumeration.

    Depth-first over z_h for h != 2^n - 1 in descending subset size
    (ascending h inside a level), pruning on the partial coordinate
    products.  The top variable carries no coprimality constraint, so its
    range [1, Z] is closed in one divisor sum: for each squarefree m,
    mu(m) * floor(Z/m) * #{x' : m | x'_j z_{2^{j-1}} for all j} where the
    inner count is a box-restricted zero-sum count.
    """
    N = (1 << n) - 1
    mu = mobius_sieve(X)
    order = sorted(range(1, N), key=lambda h: (-weight(h), h))
    mem = {h: members(h, n) for h in order}
    incomp = {h: [l for l in order if not (h & l == h or h & l == l)] for h in order}
    z = [1] * (N + 1)  # 1-based
    ypart = [1] * (n + 1)
    total = 0

    def leaf() -> int:
        Z = min(X // ypart[j] for j in range(1, n + 1))
        cof = [1] * (n + 1)
        for h in order:
            v = z[h]
            if v > 1 and weight(h) >= 2:
                for j in range(1, n + 1):
                    if not bit(h, j):
                        cof[j] *= v
        zs = [z[(1 << (j - 1))] for j in range(1, n + 1)]
        boxes0 = [X // v for v in zs]
        sub = 0
        for m in range(1, Z + 1):
            sign = mu[m]
            if not sign:
                continue
            mj = [m // math.gcd(m, v) for v in zs]
            boxes = [b // q for b, q in zip(boxes0, mj)]
            if sum(1 for b in boxes if b > 0) <= 1:
                cnt = 1
            else:
                cnt = count_zero_sum_boxes(
                    [cof[j + 1] * mj[j] for j in range(n)], boxes)
            sub += int(sign) * (Z // m) * cnt
        return sub

    def dfs(idx: int) -> None:
        nonlocal total
        if idx == len(order):
            total += leaf()
            return
        h = order[idx]
        cap = min(X // ypart[j] for j in mem[h])
        first = idx == 0
        for v in range(1, cap + 1):
            if first and v % shards != shard:
                continue
            if v > 1:
                ok = True
                for l in incomp[h]:
                    if z[l] > 1 and math.gcd(v, z[l]) > 1:
                        ok = False
                        break
                if not ok:
                    continue
            z[h] = v
            if v > 1:
                for j in mem[h]:
                    ypart[j] *= v
            dfs(idx + 1)
            if v > 1:
                for j in mem[h]:
                    ypart[j] //= v
            z[h] = 1

    dfs(0)
    return total


_SHARD_FUNCS = {"direct": _direct_shard, "moebius": _moebius_shard,
                "torsor": _torsor_shard}


def _run_shard(task: tuple[str, int, int, int, int]) -> int:
    method, n, X, shard, shards = task
    return _SHARD_FUNCS[method](n, X, shard, shards)


# ------------------------------- reports -------------------------------

@dataclass(frozen=True)
class CountReport:
    n: int
    B: float
    method: str
    count: int
    seconds: float
    ratio: float | None

    @property
    def log_exponent(self) -> int:
        return (1 << self.n) - self.n - 1


def count_points(n: int, B: float, method: str = "direct", shards: int = 1) -> CountReport:
    """Number of qualifying points, N(B), with the chosen pipeline.

    All pipelines return identical values; ``shards`` partitions the
    outermost enumeration deterministically (the aggregate is independent
    of the partition).  Set HYPERCOUNT_WORKERS to run shards in parallel
    processes.
    """
    if method not in METHODS:
        raise ContractViolation(f"unknown method {method!r}")
    if n < 3:
        raise ContractViolation("n must be >= 3")
    if shards < 1:
        raise ContractViolation("shards must be >= 1")
    t0 = time.perf_counter()
    if B < 1:
        count = 0
    else:
        X = int_nth_root(math.floor(B), n)
        tasks = [(method, n, X, s, shards) for s in range(shards)]
        workers = int(os.environ.get(WORKERS_ENV, "1") or "1")
        if workers > 1 and shards > 1:
            with ProcessPoolExecutor(max_workers=min(workers, shards)) as pool:
                parts = list(pool.map(_run_shard, tasks))
        else:
            parts = [_run_shard(t) for t in tasks]
        count = (1 << (n - 1)) * sum(parts)
    seconds = time.perf_counter() - t0
    exponent = (1 << n) - n - 1
    ratio = count / (B * math.log(B) ** exponent) if B >= 2 else None
    return CountReport(n, float(B), method, count, seconds, ratio)
