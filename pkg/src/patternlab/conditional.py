"""Arc-pattern counts in set partitions, conditioned on the urn count ``M``.

Conditional quantities are exact rationals in ``m``; only averages over the
law of ``M`` use (mpmath) floats, with the truncation tail controlled by
:func:`patternlab.samplers.murn_law`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, factorial, log
from typing import Sequence

import mpmath

from .combi import ArcPattern, bell_number
from .errors import DomainError, SizeLimitError
from .moments import ArcIndicator, cond_joint_moment_setpart
from .samplers import MUrnLaw, murn_law

DIRECT_SUM_CAP = 20


@dataclass(frozen=True)
class OverlapProfile:
    """Arcs above each unit segment of the pattern: ``gaps[i-1]`` for ``[i-1, i]``.

    ``gaps[0]`` is 0 by convention (the segment before the first point).
    """

    gaps: tuple[int, ...]

    @classmethod
    def of(cls, pattern: ArcPattern) -> "OverlapProfile":
        return cls(pattern.gap_overlaps())

    @property
    def t(self) -> int:
        return sum(1 for a in self.gaps if a)

    @property
    def nonzero(self) -> tuple[int, ...]:
        return tuple(a for a in self.gaps if a)


def cond_occurrence_prob(n: int, m: int, pattern: ArcPattern, x: Sequence[int]) -> Fraction:
    """P(positions ``x`` carry an occurrence of ``pattern`` | M = m)."""
    x = tuple(x)
    if len(x) != pattern.length or any(b <= a for a, b in zip(x, x[1:])) or x[0] < 1 or x[-1] > n:
        raise DomainError(f"{x} is not an increasing {pattern.length}-tuple in [1,{n}]")
    return cond_joint_moment_setpart(n, m, [ArcIndicator(x[i - 1], x[j - 1]) for i, j in pattern.arcs])


def _ratio(a: int, m: int) -> Fraction:
    # (m - a)/m, clamped at 0 like the conditional probability itself
    return max(Fraction(m - a, m), Fraction(0))


def _F_table(ratios: Sequence[Fraction], free: int, n: int) -> list[Fraction]:
    """``F(N)`` for ``N = 0..n`` with the given gap ratios and ``free`` unconstrained points.

    Level ``s`` satisfies ``F_s(N) = sum_{1<=y<=N} F_{s-1}(N-y) r_s**(y-1)``,
    evaluated through ``F_s(N) = F_{s-1}(N-1) + r_s * F_s(N-1)``.
    """
    table = [Fraction(comb(N, free)) for N in range(n + 1)]
    for r in ratios:
        new = [Fraction(0)] * (n + 1)
        for N in range(1, n + 1):
            new[N] = table[N - 1] + r * new[N - 1]
        table = new
    return table


def F_function(a_list: Sequence[int], ell: int, n: int, m: int) -> Fraction:
    """Sum over ``y_1..y_t >= 1`` with ``sum y <= n`` of
    ``binom(n - sum y, ell - t) * prod (1 - a_i/m)**(y_i - 1)``."""
    a_list = tuple(a_list)
    t = len(a_list)
    if t > ell:
        raise DomainError("need t <= ell")
    if any(a < 1 for a in a_list):
        raise DomainError("a_i must be positive")
    if a_list and m < max(a_list):
        raise DomainError("need m >= max a_i")
    if n < 0:
        return Fraction(0)
    return _F_table([Fraction(m - a, m) for a in a_list], ell - t, n)[n]


def F_direct(a_list: Sequence[int], ell: int, n: int, m: int) -> Fraction:
    """Nested-sum definition of :func:`F_function` (exponential; reference only)."""
    t = len(a_list)
    ratios = [Fraction(m - a, m) for a in a_list]
    total = Fraction(0)

    def rec(i: int, used: int, weight: Fraction):
        nonlocal total
        if i == t:
            total += comb(n - used, ell - t) * weight
            return
        for y in range(1, n - used + 1):
            rec(i + 1, used + y, weight * ratios[i] ** (y - 1))

    rec(0, 0, Fraction(1))
    return total


@dataclass(frozen=True)
class LaurentPoly:
    """Finite sum of ``coeff * n**i * m**j`` (integer exponents, possibly negative)."""

    terms: tuple[tuple[tuple[int, int], Fraction], ...]

    @classmethod
    def from_dict(cls, d: dict) -> "LaurentPoly":
        return cls(tuple(sorted((k, Fraction(v)) for k, v in d.items() if v != 0)))

    def __call__(self, n, m) -> Fraction:
        n, m = Fraction(n), Fraction(m)
        return sum((c * n ** i * m ** j for (i, j), c in self.terms), Fraction(0))

    def degree(self) -> int | None:
        """Total degree in ``(n, m)``; ``None`` for the zero polynomial."""
        return max((i + j for (i, j), _ in self.terms), default=None)


def leading_poly(a_list: Sequence[int], ell: int) -> LaurentPoly:
    """Top-degree part of ``F_function`` as a polynomial in ``n`` and ``m``.

    Sum over ``j_0 + ... + j_t = ell - t`` of
    ``(-1)**(j_1+...+j_t) n**j_0 m**(j_1+...+j_t+t) / (j_0! a_1**(j_1+1) ... a_t**(j_t+1))``.
    """
    a_list = tuple(a_list)
    t = len(a_list)
    if t > ell:
        raise DomainError("need t <= ell")
    coeffs: dict[tuple[int, int], Fraction] = {}
    for js in _compositions(ell - t, t + 1):
        j0, rest = js[0], js[1:]
        den = factorial(j0)
        for a, j in zip(a_list, rest):
            den *= a ** (j + 1)
        key = (j0, sum(rest) + t)
        coeffs[key] = coeffs.get(key, Fraction(0)) + Fraction((-1) ** sum(rest), den)
    return LaurentPoly.from_dict(coeffs)


def leading_term(a_list: Sequence[int], ell: int, n: int, m: int) -> Fraction:
    """:func:`leading_poly` evaluated at ``(n, m)``."""
    return leading_poly(a_list, ell)(n, m)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _r0(pattern: ArcPattern, m: int) -> Fraction:
    """Product over in-pattern non-end points of (m - arcs over the point)/m."""
    ends = pattern.ends
    out = Fraction(1)
    for g, a in enumerate(pattern.point_overlaps(), 1):
        if g in ends or a == 0:
            continue
        out *= _ratio(a, m)
    return out


def cond_expectation_exact(n: int, m: int, pattern: ArcPattern, method: str = "gaps") -> Fraction:
    """E[Occ | M = m].

    ``method="direct"`` sums the conditional probability over all position
    tuples (``n <= 20``); ``method="gaps"`` uses the gap-length form
    ``R0(m) / m**a * F(...)``; ``method="both"`` computes both and checks
    they agree.
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    ell = pattern.length
    if ell > n:
        return Fraction(0)
    if method == "direct":
        if n > DIRECT_SUM_CAP:
            raise SizeLimitError(f"direct sum limited to n <= {DIRECT_SUM_CAP}")
        return sum(
            (cond_occurrence_prob(n, m, pattern, x) for x in combinations(range(1, n + 1), ell)),
            Fraction(0),
        )
    if method == "gaps":
        prof = OverlapProfile.of(pattern)
        ratios = [_ratio(a, m) for a in prof.nonzero]
        F = _F_table(ratios, ell - prof.t, n)[n]
        return _r0(pattern, m) * F / Fraction(m) ** pattern.arc_count
    if method == "both":
        a = cond_expectation_exact(n, m, pattern, "direct")
        b = cond_expectation_exact(n, m, pattern, "gaps")
        if a != b:
            raise AssertionError(f"conditional expectation paths disagree: {a} != {b}")
        return a
    raise DomainError(f"unknown method {method!r}")


def _mpf(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def cond_exp_table(n: int, pattern: ArcPattern, tail_tol: float = 1e-12, law: MUrnLaw | None = None):
    """Rows ``(m, P(M=m), E[Occ | M=m])`` over the truncated support."""
    law = law or murn_law(n, tail_tol)
    return [(m, w, cond_expectation_exact(n, m, pattern)) for m, w in law.items()]


def tower_expectation(n: int, pattern: ArcPattern, tail_tol: float = 1e-12, law: MUrnLaw | None = None) -> float:
    """sum_m P(M=m) E[Occ | M=m] over the truncated law."""
    law = law or murn_law(n, tail_tol)
    with mpmath.workdps(law.dps):
        return float(mpmath.fsum(w * _mpf(e) for _, w, e in cond_exp_table(n, pattern, law=law)))


def var_cond_expectation(n: int, pattern: ArcPattern, tail_tol: float = 1e-12, law: MUrnLaw | None = None) -> float:
    """Var[E(Occ | M)] under the (renormalised) truncated law of ``M``."""
    if pattern.length > n:
        return 0.0
    law = law or murn_law(n, tail_tol)
    rows = cond_exp_table(n, pattern, law=law)
    with mpmath.workdps(law.dps):
        total = mpmath.fsum(w for _, w, _ in rows)
        mean = mpmath.fsum(w * _mpf(e) for _, w, e in rows) / total
        var = mpmath.fsum(w * (_mpf(e) - mean) ** 2 for _, w, e in rows) / total
        return float(var)


def moment_M(n: int, r: int, tail_tol: float = 1e-12, law: MUrnLaw | None = None) -> float:
    """E[M**r] summed over the truncated law (any integer ``r``)."""
    law = law or murn_law(n, tail_tol)
    return float(law.expect(lambda m: mpmath.mpf(m) ** r))


def bell_ratio(n: int, r: int) -> Fraction:
    """B_{n+r} / B_n, the exact value of E[M**r] for ``n + r >= 0``."""
    if n + r < 0:
        raise DomainError("need n + r >= 0")
    return Fraction(bell_number(n + r), bell_number(n))


def concentration_probe(n: int, tail_tol: float = 1e-12, law: MUrnLaw | None = None) -> dict:
    if n < 2:
        raise DomainError("n must be >= 2")
    law = law or murn_law(n, tail_tol)
    return {
        "n": n,
        "m_n": law.mean,
        "sigma_n": law.sigma,
        "window": n ** 0.75,
        "p_outside_window": law.window_mass(),
        "m_n_over_n_div_log_n": law.mean / (n / log(n)),
    }
