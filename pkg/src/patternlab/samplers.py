"""Uniform samplers for multiset permutations and set partitions.

Set partitions are drawn with Stam's urn model: the urn count ``M`` is drawn
from ``P(M=m) = m**n / (e * B_n * m!)`` (truncated to a window carrying all
but ``tail_tol`` of the mass), then each of the ``n`` balls goes into a
uniform urn.

Replica seeding
---------------
Replica ``k`` of a run with master seed ``s`` uses the generator
``numpy.random.default_rng(replica_seed(s, k))`` where ``replica_seed`` is
the splitmix64 finalizer applied to ``s + (k + 1) * 0x9E3779B97F4A7C15``
(mod 2**64). Replicas are therefore independent of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import mpmath
import numpy as np

from . import kernels
from .combi import Multiset, SetPartition, bell_number
from .errors import DomainError, PrecisionError

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    z = x & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def replica_seed(master: int, replica: int) -> int:
    return splitmix64(master + (replica + 1) * GOLDEN_GAMMA)


def replica_rng(master: int, replica: int) -> np.random.Generator:
    return np.random.default_rng(replica_seed(master, replica))


# ---------------------------------------------------------------------------
# Law of the urn count


@dataclass(frozen=True)
class MUrnLaw:
    """Truncated law of the number of urns in Stam's model for size ``n``.

    ``weights[i]`` is ``P(M = m_min + i)`` as an mpmath float; ``tail_mass``
    is a certified upper bound on the probability outside ``[m_min, m_max]``.
    """

    n: int
    bell_n: int
    m_min: int
    m_max: int
    weights: tuple
    tail_mass: float
    mean: float
    sigma: float
    dps: int

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.m_min, self.m_max + 1)

    @property
    def probs(self) -> np.ndarray:
        return np.array([float(w) for w in self.weights])

    @property
    def cdf(self) -> np.ndarray:
        c = np.cumsum(self.probs)
        return c / c[-1]

    def items(self) -> Iterator[tuple[int, object]]:
        """``(m, P(M=m))`` pairs in increasing ``m``."""
        return zip(range(self.m_min, self.m_max + 1), self.weights)

    def expect(self, f):
        """Truncated expectation of ``f(m)`` in working precision (ascending-m sum)."""
        with mpmath.workdps(self.dps):
            total = mpmath.mpf(0)
            for m, w in self.items():
                total += w * f(m)
            return total

    def prob(self, m: int):
        if self.m_min <= m <= self.m_max:
            return self.weights[m - self.m_min]
        return mpmath.mpf(0)

    def window_mass(self) -> float:
        """Mass outside ``|M - m_n| <= n**(3/4)``, plus the tail bound."""
        half = self.n ** 0.75
        with mpmath.workdps(self.dps):
            out = mpmath.mpf(0)
            for m, w in self.items():
                if abs(m - self.mean) > half:
                    out += w
        return float(out) + self.tail_mass

    def sample(self, rng: np.random.Generator, size=None):
        u = rng.random(size)
        idx = np.searchsorted(self.cdf, u, side="right")
        return self.m_min + np.minimum(idx, self.m_max - self.m_min)


def _log_weight(n: int, m: int, log_bell):
    # log of m**n / (e * B_n * m!)
    return n * mpmath.log(m) - mpmath.loggamma(m + 1) - 1 - log_bell


def murn_law(n: int, tail_tol: float = 1e-12, dps: int | None = None) -> MUrnLaw:
    """Truncated law of ``M`` with omitted mass certified below ``tail_tol``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if not 0 < tail_tol <= 1e-6:
        raise DomainError("tail_tol must lie in (0, 1e-6]")
    if dps is None:
        dps = 30 + int(-mpmath.log10(tail_tol)) // 2
    if tail_tol < mpmath.mpf(10) ** (-(dps - 5)):
        raise PrecisionError(f"tail_tol={tail_tol} below working precision ({dps} digits)")
    B = bell_number(n)
    with mpmath.workdps(dps):
        log_bell = mpmath.log(B)

        def w(m):
            return mpmath.exp(_log_weight(n, m, log_bell)) if m >= 1 else mpmath.mpf(0)

        # mode: last m where the ratio (1+1/m)^n / (m+1) is still >= 1
        mode = 1
        while mpmath.power(1 + mpmath.mpf(1) / mode, n) / (mode + 1) >= 1:
            mode += 1
        budget = mpmath.mpf(tail_tol) / 4
        hi = mode
        while True:
            r = mpmath.power(1 + mpmath.mpf(1) / hi, n) / (hi + 1)
            if r < 1:
                right_bound = w(hi) * r / (1 - r)
                if right_bound < budget:
                    break
            hi += 1
        lo = mode
        left_bound = (lo - 1) * w(lo - 1)
        while lo > 1 and left_bound >= budget:
            lo -= 1
            left_bound = (lo - 1) * w(lo - 1)
        weights = tuple(w(m) for m in range(lo, hi + 1))
        total = mpmath.fsum(weights)
        tail = right_bound + left_bound
        # Dobinski: the truncated sum must miss exactly the (bounded) tail.
        residual = 1 - total
        if residual < -mpmath.mpf(10) ** (-(dps - 8)) or residual > tail + mpmath.mpf(10) ** (-(dps - 8)):
            raise PrecisionError(f"Dobinski normalization residual {residual} exceeds tail bound {tail}")
        mean = mpmath.fsum(m * x for m, x in zip(range(lo, hi + 1), weights)) / total
        var = mpmath.fsum((m - mean) ** 2 * x for m, x in zip(range(lo, hi + 1), weights)) / total
        return MUrnLaw(
            n=n,
            bell_n=B,
            m_min=lo,
            m_max=hi,
            weights=weights,
            tail_mass=float(tail),
            mean=float(mean),
            sigma=float(mpmath.sqrt(var)),
            dps=dps,
        )


# ---------------------------------------------------------------------------
# Samplers


def sample_multiset_perm(M: Multiset, seed: int | np.random.Generator) -> tuple[int, ...]:
    """Uniform word of ``M`` (Fisher-Yates shuffle of the sorted word)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return tuple(int(x) for x in rng.permutation(np.array(M.sorted_word(), dtype=np.int64)))


@dataclass(frozen=True)
class StamDraw:
    partition: SetPartition
    urn_count: int
    empty_urns: int
    urn_assignment: tuple[int, ...]


def draw_urns(n: int, law: MUrnLaw, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    """One run of the urn model: ball-to-urn assignment (0-based urns) and ``M``."""
    m = int(law.sample(rng))
    return rng.integers(0, m, size=n, dtype=np.int64), m


def sample_stam(n: int, law: MUrnLaw, seed: int | np.random.Generator) -> StamDraw:
    if law.n != n:
        raise DomainError(f"law built for n={law.n}, asked for n={n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    urns, m = draw_urns(n, law, rng)
    _, occupied = kernels.urns_to_next(urns, m)
    return StamDraw(
        partition=SetPartition.from_labels(urns.tolist()),
        urn_count=m,
        empty_urns=m - occupied,
        urn_assignment=tuple(int(u) for u in urns),
    )


def stam_next_array(n: int, law: MUrnLaw, rng: np.random.Generator) -> tuple[np.ndarray, int, int]:
    """Fast path used by Monte Carlo: arc next-array, ``M`` and empty-urn count."""
    urns, m = draw_urns(n, law, rng)
    nxt, occupied = kernels.urns_to_next(urns, m)
    return nxt, m, m - occupied


def sample_stam_bulk(n: int, law: MUrnLaw, seed: int, count: int):
    """Vectorised urn model for small ``n``.

    Returns ``(M, rgs, empty)``: urn counts, restricted growth strings (one row
    per draw) and empty-urn counts.
    """
    rng = np.random.default_rng(seed)
    M = law.sample(rng, count)
    urns = np.floor(rng.random((count, n)) * M[:, None]).astype(np.int64)
    rgs = np.zeros((count, n), dtype=np.int64)
    nblocks = np.zeros(count, dtype=np.int64)
    for i in range(n):
        label = np.full(count, -1, dtype=np.int64)
        for j in range(i - 1, -1, -1):
            same = urns[:, j] == urns[:, i]
            label = np.where(same, rgs[:, j], label)
        fresh = label < 0
        label[fresh] = nblocks[fresh]
        nblocks += fresh
        rgs[:, i] = label
    return M, rgs, M - nblocks
