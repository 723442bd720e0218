"""Exact joint moments and joint cumulants of indicator families.

Two families are supported:

* ``X_i^j`` on uniform words of a multiset ``M`` (letter ``j`` at position ``i``);
* ``X_ij`` on uniform set partitions of ``[n]`` (arc from ``i`` to ``j``).

Moments come from *oracles*: callables mapping a frozenset of distinct
indicators to an exact :class:`~fractions.Fraction`. Cumulants are then the
Moebius-weighted sums of oracle values over the partition lattice.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Callable, Iterable, NamedTuple, Sequence

import mpmath
import numpy as np

from .combi import (
    LIMITS,
    Multiset,
    enumerate_multiset_perms,
    enumerate_set_partitions,
    mobius_partition_lattice,
    multinomial,
)
from .errors import DomainError, SizeLimitError


class MPermIndicator(NamedTuple):
    """``X_i^j``: position ``i`` of the word carries the letter ``j``."""

    pos: int
    value: int

    def __str__(self):
        return f"{self.pos}:{self.value}"


class ArcIndicator(NamedTuple):
    """``X_ij``: the partition has an arc from ``i`` to ``j``."""

    start: int
    end: int

    def __str__(self):
        return f"{self.start}-{self.end}"


Indicator = MPermIndicator | ArcIndicator
MomentOracle = Callable[[frozenset], Fraction]


# ---------------------------------------------------------------------------
# Moment oracles


def joint_moment_mperm_closed(M: Multiset, C: Iterable[MPermIndicator]) -> Fraction:
    """E[prod C] for indicators at pairwise distinct positions (closed form)."""
    C = list(C)
    positions = [x.pos for x in C]
    if len(set(positions)) != len(positions):
        raise DomainError("closed form needs distinct positions; use the brute-force oracle")
    used = [0] * M.k
    for x in C:
        if not 1 <= x.pos <= M.n:
            raise DomainError(f"position {x.pos} outside [1,{M.n}]")
        if not 1 <= x.value <= M.k:
            return Fraction(0)
        used[x.value - 1] += 1
    rest = [a - c for a, c in zip(M.multiplicities, used)]
    if any(r < 0 for r in rest):
        return Fraction(0)
    return Fraction(multinomial(M.n - len(C), rest), M.num_perms())


class MPermClosedOracle:
    """Closed-form oracle on arbitrary indicator sets of a multiset family.

    Two indicators at the same position with different letters make the
    product vanish; otherwise the closed form applies.
    """

    def __init__(self, M: Multiset):
        self.M = M
        self._cache: dict[frozenset, Fraction] = {}

    def __call__(self, C: frozenset) -> Fraction:
        try:
            return self._cache[C]
        except KeyError:
            pass
        seen: dict[int, int] = {}
        value = None
        for x in C:
            if seen.setdefault(x.pos, x.value) != x.value:
                value = Fraction(0)
                break
        if value is None:
            value = joint_moment_mperm_closed(self.M, C)
        self._cache[C] = value
        return value


class EnumerationOracle:
    """Exact moments by averaging over every object of the family.

    ``family`` is a :class:`Multiset` (words) or an ``int`` ``n`` (set
    partitions of ``[n]``). Each indicator becomes a boolean column over the
    enumerated objects, so joint moments are counts of all-true rows.
    """

    def __init__(self, family: Multiset | int):
        self.family = family
        if isinstance(family, Multiset):
            words = np.array(list(enumerate_multiset_perms(family)), dtype=np.int64)
            self._words = words
            self.size = len(words)
        else:
            n = int(family)
            if n < 1:
                raise DomainError("n must be >= 1")
            nxt = [p.next_array() for p in enumerate_set_partitions(n)]
            self._nxt = np.array(nxt, dtype=np.int64)
            self.size = len(nxt)
        self._columns: dict = {}
        self._cache: dict[frozenset, Fraction] = {}

    def column(self, x) -> np.ndarray:
        col = self._columns.get(x)
        if col is None:
            if isinstance(x, MPermIndicator):
                if 1 <= x.pos <= self.family.n:
                    col = self._words[:, x.pos - 1] == x.value
                else:
                    col = np.zeros(self.size, dtype=bool)
            else:
                n = self._nxt.shape[1] - 1
                if 1 <= x.start < x.end <= n:
                    col = self._nxt[:, x.start] == x.end
                else:
                    col = np.zeros(self.size, dtype=bool)
            self._columns[x] = col
        return col

    def __call__(self, C: frozenset) -> Fraction:
        try:
            return self._cache[C]
        except KeyError:
            pass
        mask = np.ones(self.size, dtype=bool)
        for x in C:
            mask &= self.column(x)
        value = Fraction(int(mask.sum()), self.size)
        self._cache[C] = value
        return value

    def values(self, statistic: Callable) -> list:
        """Apply ``statistic`` to every enumerated object (word tuple or next-array)."""
        if isinstance(self.family, Multiset):
            return [statistic(tuple(int(v) for v in w)) for w in self._words]
        return [statistic(row) for row in self._nxt]


def joint_moment_bruteforce(family: Multiset | int, C: Iterable) -> Fraction:
    """E[prod C] by enumeration; ``family`` is a multiset or a partition size."""
    return EnumerationOracle(family)(frozenset(C))


def cond_joint_moment_setpart(n: int, m: int, B: Iterable[ArcIndicator]) -> Fraction:
    """E[prod B | M = m] in the urn model, exactly.

    Arc ends are forced into their start's urn (factor ``1/m`` each); every
    other ball must avoid the urns of the ``a(g)`` arcs passing over it.
    Nonpositive factors clamp the probability to 0.
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    arcs = set(B)
    starts = [x.start for x in arcs]
    ends = [x.end for x in arcs]
    if len(set(starts)) != len(starts) or len(set(ends)) != len(ends):
        return Fraction(0)
    for x in arcs:
        if not 1 <= x.start < x.end <= n:
            return Fraction(0)
    over = [0] * (n + 2)
    for x in arcs:
        for g in range(x.start + 1, x.end):
            over[g] += 1
    end_set = set(ends)
    num, den = 1, m ** len(arcs)
    for g in range(1, n + 1):
        if g in end_set or over[g] == 0:
            continue
        if m - over[g] <= 0:
            return Fraction(0)
        num *= m - over[g]
        den *= m
    return Fraction(num, den)


class CondSetPartOracle:
    def __init__(self, n: int, m: int):
        self.n, self.m = n, m
        self._cache: dict[frozenset, Fraction] = {}

    def __call__(self, C: frozenset) -> Fraction:
        if C not in self._cache:
            self._cache[C] = cond_joint_moment_setpart(self.n, self.m, C)
        return self._cache[C]


# ---------------------------------------------------------------------------
# Cumulants


@lru_cache(maxsize=None)
def _lattice(r: int) -> tuple[tuple[int, tuple[tuple[int, ...], ...]], ...]:
    """``(mu(pi, 1), blocks)`` for every set partition ``pi`` of ``range(r)``."""
    out = []
    for pi in enumerate_set_partitions(r, cap=max(r, LIMITS.partition_cap)):
        blocks = tuple(tuple(i - 1 for i in b) for b in pi.blocks)
        out.append((mobius_partition_lattice(pi), blocks))
    return tuple(out)


def cumulant_from_moments(moment: Callable[[tuple[int, ...]], object], r: int):
    """Generic moment-to-cumulant map over the lattice of ``range(r)``.

    ``moment`` receives a tuple of indices and may return any ring element
    (Fraction, mpf, float).
    """
    total = 0
    for mu, blocks in _lattice(r):
        term = mu
        for b in blocks:
            term = term * moment(b)
            if term == 0:
                break
        total = total + term
    return total


def joint_cumulant(moments: MomentOracle, B: Sequence, max_order: int | None = None) -> Fraction:
    """Joint cumulant of the bag ``B`` (repetitions allowed) given a moment oracle.

    Block products are reduced with ``X**2 = X`` before querying the oracle.
    """
    B = list(B)
    r = len(B)
    cap = LIMITS.cumulant_order if max_order is None else max_order
    if r == 0:
        raise DomainError("empty bag")
    if r > cap:
        raise SizeLimitError(f"cumulant order {r} exceeds cap {cap}")
    return cumulant_from_moments(lambda block: moments(frozenset(B[i] for i in block)), r)


# ---------------------------------------------------------------------------
# Quasi-factorization


def quasi_fact_factor(u: dict, delta: Iterable[int]) -> Fraction:
    """Alternating product of ``u`` over the subsets of ``delta``.

    ``u`` maps frozensets to Fractions. A 0/0 quotient is 0 by convention.
    """
    delta = tuple(sorted(delta))
    num, den = Fraction(1), Fraction(1)
    for size in range(len(delta) + 1):
        for sub in combinations(delta, size):
            val = Fraction(u[frozenset(sub)])
            if (len(delta) - size) % 2 == 0:
                num *= val
            else:
                den *= val
    if den == 0:
        if num == 0:
            return Fraction(0)
        raise DomainError("quasi-factorization factor divides by zero")
    return num / den


# ---------------------------------------------------------------------------
# Law of total cumulance


def conditional_cumulant_setpart(n: int, m: int, B: Sequence[ArcIndicator]) -> Fraction:
    return joint_cumulant(CondSetPartOracle(n, m), B)


def total_cumulance_check(n: int, B: Sequence[ArcIndicator], tail_tol: float = 1e-15, law=None) -> dict:
    """Compare kappa(B) by enumeration with the conditioned-on-M expansion.

    The right-hand side sums, over set partitions ``rho`` of the bag, the
    joint cumulant (under the law of ``M``) of the conditional cumulants of
    the blocks of ``rho``.
    """
    from .samplers import murn_law

    B = [ArcIndicator(*x) for x in B]
    if n > 10:
        raise SizeLimitError("total cumulance check is limited to n <= 10")
    if not 1 <= len(B) <= 3:
        raise DomainError("bag size must be 1..3")
    law = law or murn_law(n, tail_tol)
    lhs = joint_cumulant(EnumerationOracle(n), B)
    r = len(B)
    support = list(range(law.m_min, law.m_max + 1))
    oracles = {m: CondSetPartOracle(n, m) for m in support}

    cond_cache: dict[tuple[int, ...], list] = {}

    def cond_values(block: tuple[int, ...]) -> list:
        # kappa(X_i, i in block | M = m) for every m in the support
        if block not in cond_cache:
            sub = [B[i] for i in block]
            cond_cache[block] = [joint_cumulant(oracles[m], sub) for m in support]
        return cond_cache[block]

    with mpmath.workdps(law.dps):
        weights = list(law.weights)
        rhs = mpmath.mpf(0)
        for _, rho in _lattice(r):
            funcs = [[mpmath.mpf(v.numerator) / v.denominator for v in cond_values(b)] for b in rho]

            def outer_moment(idx, funcs=funcs):
                return mpmath.fsum(
                    w * mpmath.fprod(funcs[i][k] for i in idx) for k, w in enumerate(weights)
                )

            rhs += cumulant_from_moments(outer_moment, len(rho))
        lhs_f = mpmath.mpf(lhs.numerator) / lhs.denominator
        discrepancy = float(abs(lhs_f - rhs))
    tolerance = 10 * tail_tol * max(1.0, abs(float(lhs))) + 1e-9
    return {
        "n": n,
        "bag": [str(x) for x in B],
        "lhs": lhs,
        "rhs": float(rhs),
        "discrepancy": discrepancy,
        "tolerance": tolerance,
        "passed": discrepancy < tolerance,
    }


def variance_by_enumeration(family: Multiset | int, statistic: Callable) -> Fraction:
    """Exact variance of an integer statistic over an enumerated family."""
    vals = EnumerationOracle(family).values(statistic)
    N = len(vals)
    s1 = sum(vals)
    s2 = sum(v * v for v in vals)
    return Fraction(s2, N) - Fraction(s1, N) ** 2


def mean_by_enumeration(family: Multiset | int, statistic: Callable) -> Fraction:
    vals = EnumerationOracle(family).values(statistic)
    return Fraction(sum(vals), len(vals))


__all__ = [
    "MPermIndicator",
    "ArcIndicator",
    "joint_moment_mperm_closed",
    "joint_moment_bruteforce",
    "MPermClosedOracle",
    "EnumerationOracle",
    "CondSetPartOracle",
    "cond_joint_moment_setpart",
    "joint_cumulant",
    "cumulant_from_moments",
    "quasi_fact_factor",
    "conditional_cumulant_setpart",
    "total_cumulance_check",
    "variance_by_enumeration",
    "mean_by_enumeration",
]
