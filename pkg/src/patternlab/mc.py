"""Monte Carlo pipeline: sample, count, standardise, diagnose.

k-statistics
------------
With power sums ``S_p = sum x_i**p`` over ``N`` points, the unbiased
cumulant estimators used by :func:`empirical_cumulants` are::

    k1 = S1 / N
    k2 = (N S2 - S1^2) / (N (N-1))
    k3 = (2 S1^3 - 3 N S1 S2 + N^2 S3) / (N (N-1) (N-2))
    k4 = (-6 S1^4 + 12 N S1^2 S2 - 3 N (N-1) S2^2 - 4 N (N+1) S1 S3
          + N^2 (N+1) S4) / (N (N-1) (N-2) (N-3))

They are evaluated on mean-centred data (k2..k4 are shift invariant).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from . import kernels
from .combi import ArcPattern, Multiset, PermPattern
from .errors import DomainError
from .samplers import murn_law, replica_rng, stam_next_array


@dataclass
class McRun:
    family: str
    pattern: str
    size: str
    reps: int
    seed: int
    samples: np.ndarray = field(repr=False)

    @property
    def mean(self) -> float:
        return float(self.samples.mean())

    @property
    def variance(self) -> float:
        return float(self.samples.var(ddof=1))

    @property
    def stderr(self) -> float:
        return float(np.sqrt(self.variance / self.reps))

    @property
    def standardized(self) -> np.ndarray:
        return standardize(self.samples)


def standardize(sample) -> np.ndarray:
    x = np.asarray(sample, dtype=float)
    sd = x.std(ddof=1) if len(x) > 1 else 0.0
    if sd == 0:
        return np.zeros_like(x)
    return (x - x.mean()) / sd


def _chunks(reps: int, threads: int):
    bounds = np.linspace(0, reps, max(1, threads) + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if b > a]


def _mperm_chunk(M: Multiset, tau: PermPattern, seed: int, lo: int, hi: int) -> np.ndarray:
    base = np.array(M.sorted_word(), dtype=np.int64)
    words = np.empty((hi - lo, M.n), dtype=np.int64)
    for k in range(lo, hi):
        words[k - lo] = replica_rng(seed, k).permutation(base)
    return kernels.count_word_pattern_many(words, tau.values)


def _setpart_chunk(n: int, pattern: ArcPattern, law, seed: int, lo: int, hi: int) -> np.ndarray:
    nxts = np.empty((hi - lo, n + 1), dtype=np.int64)
    for k in range(lo, hi):
        nxts[k - lo] = stam_next_array(n, law, replica_rng(seed, k))[0]
    return kernels.count_arc_pattern_many(nxts, pattern.arcs, pattern.length)


def run_mc(family: str, pattern, size, reps: int, seed: int, threads: int = 1,
           tail_tol: float = 1e-12, law=None) -> McRun:
    """Occurrence counts over ``reps`` independent replicas.

    Replica ``k`` always uses ``replica_rng(seed, k)``, so the result does not
    depend on ``threads``.
    """
    if reps < 100:
        raise DomainError("reps must be >= 100")
    if family == "mperm":
        M = size if isinstance(size, Multiset) else Multiset.parse(str(size))
        tau = pattern if isinstance(pattern, PermPattern) else PermPattern.parse(str(pattern))

        def job(lo, hi):
            return _mperm_chunk(M, tau, seed, lo, hi)

        label_pattern, label_size = str(tau), str(M)
    elif family == "setpart":
        n = int(size)
        arcs = pattern if isinstance(pattern, ArcPattern) else ArcPattern.parse(str(pattern))
        law = law or murn_law(n, tail_tol)

        def job(lo, hi):
            return _setpart_chunk(n, arcs, law, seed, lo, hi)

        label_pattern, label_size = str(arcs), str(n)
    else:
        raise DomainError(f"unknown family {family!r}")
    chunks = _chunks(reps, threads)
    if len(chunks) == 1:
        parts = [job(*chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(lambda c: job(*c), chunks))
    return McRun(family, label_pattern, label_size, reps, seed, np.concatenate(parts))


def ks_distance(sample) -> float:
    """Sup distance between the empirical CDF of ``sample`` and the standard normal CDF."""
    x = np.sort(np.asarray(sample, dtype=float))
    N = len(x)
    if N == 0:
        raise DomainError("empty sample")
    cdf = ndtr(x)
    upper = np.arange(1, N + 1) / N - cdf
    lower = cdf - np.arange(0, N) / N
    return float(max(upper.max(), lower.max()))


def empirical_cumulants(sample, max_order: int = 4) -> list[float]:
    """k-statistics ``[k1, ..., k_max_order]`` (see module docstring)."""
    if not 1 <= max_order <= 4:
        raise DomainError("max_order must be in 1..4")
    x = np.asarray(sample, dtype=float)
    N = len(x)
    if N < max_order + 1 or (max_order == 4 and N < 4):
        raise DomainError("sample too small for the requested order")
    mean = x.mean()
    d = x - mean
    S1 = d.sum()
    S2 = (d ** 2).sum()
    S3 = (d ** 3).sum()
    S4 = (d ** 4).sum()
    out = [float(mean)]
    if max_order >= 2:
        out.append((N * S2 - S1 ** 2) / (N * (N - 1)))
    if max_order >= 3:
        out.append((2 * S1 ** 3 - 3 * N * S1 * S2 + N ** 2 * S3) / (N * (N - 1) * (N - 2)))
    if max_order >= 4:
        num = (-6 * S1 ** 4 + 12 * N * S1 ** 2 * S2 - 3 * N * (N - 1) * S2 ** 2
               - 4 * N * (N + 1) * S1 * S3 + N ** 2 * (N + 1) * S4)
        out.append(num / (N * (N - 1) * (N - 2) * (N - 3)))
    return [float(v) for v in out]


def variance_scaling_slope(sizes, variances, min_points: int = 4) -> float:
    """Least-squares slope of log(variance) against log(size)."""
    sizes = np.asarray(sizes, dtype=float)
    variances = np.asarray(variances, dtype=float)
    if len(sizes) != len(variances):
        raise DomainError("sizes and variances differ in length")
    if len(sizes) < min_points:
        raise DomainError(f"need at least {min_points} points")
    if np.any(variances <= 0) or np.any(sizes <= 0):
        raise DomainError("sizes and variances must be positive")
    slope, _ = np.polyfit(np.log(sizes), np.log(variances), 1)
    return float(slope)


def decreases_with_one_inversion(values) -> bool:
    """True if ``values`` is nonincreasing except for at most one rise."""
    rises = sum(1 for a, b in zip(values, values[1:]) if b > a)
    return rises <= 1


def mc_table(family: str, pattern, sizes, reps: int, seed: int, threads: int = 1,
             letters: int = 4, tail_tol: float = 1e-12) -> list[dict]:
    """One row per size: mean, variance, KS distance, k3, k4 of the standardised counts.

    For ``family="mperm"`` each size ``n`` uses the balanced multiset with
    ``letters`` distinct values.
    """
    rows = []
    for n in sizes:
        size = Multiset.balanced(n, letters) if family == "mperm" else n
        run = run_mc(family, pattern, size, reps, seed, threads, tail_tol)
        z = run.standardized
        k = empirical_cumulants(z, 4)
        rows.append({
            "size": n,
            "mean": run.mean,
            "variance": run.variance,
            "ks": ks_distance(z),
            "k3": k[2],
            "k4": k[3],
        })
    return rows
