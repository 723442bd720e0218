import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from patternlab.combi import Multiset, bell_number, enumerate_set_partitions
from patternlab.errors import DomainError, SizeLimitError
from patternlab.moments import (
    ArcIndicator as A,
    CondSetPartOracle,
    EnumerationOracle,
    MPermClosedOracle,
    MPermIndicator as X,
    cond_joint_moment_setpart,
    conditional_cumulant_setpart,
    cumulant_from_moments,
    joint_cumulant,
    joint_moment_bruteforce,
    joint_moment_mperm_closed,
    quasi_fact_factor,
    total_cumulance_check,
)
from patternlab.samplers import murn_law, sample_stam_bulk

M5 = Multiset.parse("1^2,2^2,3")


def test_closed_form_examples():
    assert joint_moment_mperm_closed(M5, [X(1, 1)]) == Fraction(2, 5)
    assert joint_moment_mperm_closed(Multiset.parse("1,2"), [X(1, 1), X(2, 1)]) == 0
    assert joint_moment_mperm_closed(M5, []) == 1
    with pytest.raises(DomainError):
        joint_moment_mperm_closed(M5, [X(1, 1), X(1, 2)])


def test_bruteforce_examples():
    assert joint_moment_bruteforce(Multiset.parse("1,2"), [X(1, 1)]) == Fraction(1, 2)
    assert joint_moment_bruteforce(2, [A(1, 2)]) == Fraction(1, 2)
    assert joint_moment_bruteforce(M5, [X(1, 1), X(1, 2)]) == 0
    assert joint_moment_bruteforce(4, [A(1, 2), A(1, 3)]) == 0


def test_closed_form_vs_bruteforce_small():
    for M in [M5, Multiset.parse("1^3,2"), Multiset.parse("1,2,3,4")]:
        oracle = EnumerationOracle(M)
        inds = [X(i, j) for i in range(1, M.n + 1) for j in range(1, M.k + 1)]
        for size in range(4):
            for C in itertools.combinations(inds, size):
                if len({x.pos for x in C}) != size:
                    continue
                assert joint_moment_mperm_closed(M, C) == oracle(frozenset(C))


def test_cumulant_examples():
    M = Multiset.parse("1,2")
    o = MPermClosedOracle(M)
    assert joint_cumulant(o, [X(1, 1)]) == Fraction(1, 2)
    assert joint_cumulant(o, [X(1, 1), X(2, 1)]) == Fraction(-1, 4)
    x, y = X(1, 1), X(2, 2)
    assert joint_cumulant(o, [x, y]) == o(frozenset([x, y])) - o(frozenset([x])) * o(frozenset([y]))


def test_cumulant_cap():
    o = MPermClosedOracle(Multiset.balanced(8, 8))
    bag = [X(i, i) for i in range(1, 8)]
    with pytest.raises(SizeLimitError):
        joint_cumulant(o, bag)
    assert joint_cumulant(o, bag, max_order=7) is not None
    with pytest.raises(DomainError):
        joint_cumulant(o, [])


def test_cumulant_of_repeated_indicator_is_bernoulli_cumulant():
    # X^2 = X: kappa(X, X) = p(1 - p), kappa(X, X, X) = p(1-p)(1-2p)
    o = MPermClosedOracle(M5)
    p = Fraction(2, 5)
    assert joint_cumulant(o, [X(1, 1)] * 2) == p * (1 - p)
    assert joint_cumulant(o, [X(1, 1)] * 3) == p * (1 - p) * (1 - 2 * p)


def test_cumulant_symmetric_in_arguments():
    o = EnumerationOracle(6)
    bag = [A(1, 3), A(2, 4), A(3, 5)]
    vals = {joint_cumulant(o, list(p)) for p in itertools.permutations(bag)}
    assert len(vals) == 1


def test_cumulant_from_moments_gaussian_like():
    # moments of a constant c: every cumulant of order >= 2 vanishes
    c = Fraction(3, 7)
    for r in range(2, 6):
        assert cumulant_from_moments(lambda b: c ** len(b), r) == 0


def test_cond_moment_examples():
    assert cond_joint_moment_setpart(3, 2, [A(1, 3)]) == Fraction(1, 4)
    assert cond_joint_moment_setpart(2, 5, [A(1, 2)]) == Fraction(1, 5)
    assert cond_joint_moment_setpart(5, 4, [A(1, 3), A(1, 4)]) == 0
    assert cond_joint_moment_setpart(5, 4, [A(1, 4), A(2, 4)]) == 0
    # crossing needs two urns over point 3... clamp when m = 1
    assert cond_joint_moment_setpart(4, 1, [A(1, 3), A(2, 4)]) == 0


def test_cond_moment_by_urn_enumeration():
    """Exhaustive over all m**n ball assignments for small n, m."""
    for n in range(2, 6):
        for m in range(1, 4):
            assigns = list(itertools.product(range(m), repeat=n))
            nxts = []
            for a in assigns:
                nxt = [0] * (n + 1)
                last = {}
                for i, u in enumerate(a, 1):
                    if u in last:
                        nxt[last[u]] = i
                    last[u] = i
                nxts.append(nxt)
            arcs = [A(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
            for size in (1, 2):
                for B in itertools.combinations(arcs, size):
                    hits = sum(all(nx[x.start] == x.end for x in B) for nx in nxts)
                    assert cond_joint_moment_setpart(n, m, B) == Fraction(hits, len(assigns)), (n, m, B)


def test_cond_moment_averages_to_unconditional():
    n = 6
    law = murn_law(n)
    Ms, _, _ = sample_stam_bulk(n, law, 17, 100_000)
    for B in ([A(1, 2)], [A(1, 3), A(2, 4)], [A(2, 5)], [A(1, 2), A(3, 6)]):
        vals = np.array([float(cond_joint_moment_setpart(n, int(m), B)) for m in range(1, Ms.max() + 1)])
        sample = vals[Ms - 1]
        exact = float(joint_moment_bruteforce(n, B))
        se = sample.std(ddof=1) / np.sqrt(len(sample))
        assert abs(sample.mean() - exact) <= 3 * se + 1e-12


def test_conditional_independence_vanishing():
    # arcs over disjoint, non-overlapping intervals are independent given M
    for m in range(1, 6):
        assert conditional_cumulant_setpart(7, m, [A(1, 3), A(4, 6)]) == 0
        assert conditional_cumulant_setpart(8, m, [A(1, 2), A(3, 5), A(6, 8)]) == 0


def test_quasi_factorization_examples():
    u = {frozenset(): Fraction(7)}
    assert quasi_fact_factor(u, []) == 7
    v = {1: Fraction(2), 2: Fraction(3), 3: Fraction(5)}
    u = {}
    for size in range(4):
        for s in itertools.combinations([1, 2, 3], size):
            u[frozenset(s)] = Fraction(int(np.prod([v[t] for t in s])) if s else 1)
    for size in range(2, 4):
        for s in itertools.combinations([1, 2, 3], size):
            assert quasi_fact_factor(u, s) == 1
    from math import factorial

    u = {frozenset(s): Fraction(factorial(5 - len(s))) for k in range(3) for s in itertools.combinations([1, 2], k)}
    assert quasi_fact_factor(u, [1, 2]) == Fraction(5, 4)


def test_quasi_factorization_inversion_and_conventions():
    rng = np.random.default_rng(0)
    for _ in range(20):
        u = {}
        for size in range(4):
            for s in itertools.combinations([1, 2, 3], size):
                u[frozenset(s)] = Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 9)))
        for size in range(4):
            for D in itertools.combinations([1, 2, 3], size):
                prod = Fraction(1)
                for k in range(len(D) + 1):
                    for d in itertools.combinations(D, k):
                        prod *= quasi_fact_factor(u, d)
                assert prod == u[frozenset(D)]
    zero = {frozenset(): Fraction(1), frozenset([1]): Fraction(0), frozenset([2]): Fraction(1), frozenset([1, 2]): Fraction(0)}
    assert quasi_fact_factor(zero, [1, 2]) == 0
    bad = {frozenset(): Fraction(1), frozenset([1]): Fraction(0), frozenset([2]): Fraction(1), frozenset([1, 2]): Fraction(1)}
    with pytest.raises(DomainError):
        quasi_fact_factor(bad, [1, 2])


def test_total_cumulance_examples():
    rep = total_cumulance_check(4, [A(1, 2)])
    count = sum(1 for p in enumerate_set_partitions(4) if (1, 2) in p.arcs)
    assert rep["lhs"] == Fraction(count, bell_number(4))
    assert rep["passed"]
    assert total_cumulance_check(4, [A(1, 2), A(3, 4)])["discrepancy"] < 1e-9
    assert total_cumulance_check(5, [A(1, 3), A(2, 4)])["discrepancy"] < 1e-9
    with pytest.raises(SizeLimitError):
        total_cumulance_check(11, [A(1, 2)])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 5), st.integers(1, 5)).filter(lambda t: t[0] < t[1]), min_size=1, max_size=3, unique=True))
def test_total_cumulance_random_bags(pairs):
    rep = total_cumulance_check(5, [A(*p) for p in pairs])
    assert rep["passed"], rep


def test_cond_oracle_caches():
    o = CondSetPartOracle(5, 3)
    B = frozenset([A(1, 3)])
    assert o(B) is o(B)
