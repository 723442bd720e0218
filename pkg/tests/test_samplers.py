import math
from collections import Counter

import mpmath
import numpy as np
import pytest
from scipy import stats

from patternlab.combi import Multiset, SetPartition, bell_number, enumerate_set_partitions
from patternlab.errors import DomainError, PrecisionError
from patternlab.samplers import (
    murn_law,
    replica_rng,
    replica_seed,
    sample_multiset_perm,
    sample_stam,
    sample_stam_bulk,
    splitmix64,
)


def test_splitmix_reference_values():
    # first outputs of the reference splitmix64 generator seeded with 0
    assert splitmix64(0x9E3779B97F4A7C15) == 0xE220A8397B1DCDAF
    assert replica_seed(0, 0) == 0xE220A8397B1DCDAF
    assert replica_seed(0, 1) == 0x6E789E6AA1B965F4
    assert replica_seed(5, 3) != replica_seed(5, 4)


def test_law_n1_is_shifted_poisson():
    law = murn_law(1, 1e-12)
    for m, w in law.items():
        assert abs(float(w) - 1 / (math.e * math.factorial(m - 1))) < 1e-15
    assert abs(law.mean - 2) < 1e-10


@pytest.mark.parametrize("n", [1, 5, 30, 200, 500])
def test_law_normalisation(n):
    tol = 1e-12
    law = murn_law(n, tol)
    total = float(mpmath.fsum(law.weights))
    assert 1 - tol <= total <= 1 + 1e-15
    assert law.tail_mass < tol
    assert law.bell_n == bell_number(n)
    assert law.m_min >= 1 and law.m_max > law.m_min or n == 1


def test_dobinski_relative_error():
    for n in range(1, 31):
        law = murn_law(n, 1e-15)
        with mpmath.workdps(law.dps):
            dob = mpmath.fsum(mpmath.mpf(m) ** n / mpmath.factorial(m) for m in range(law.m_min, law.m_max + 1)) / mpmath.e
        assert abs(dob / law.bell_n - 1) < 1e-9


def test_law_errors():
    with pytest.raises(DomainError):
        murn_law(0)
    with pytest.raises(DomainError):
        murn_law(10, 1e-3)
    with pytest.raises(PrecisionError):
        murn_law(10, 1e-40, dps=20)


def test_multiset_sampler_examples():
    assert sample_multiset_perm(Multiset.parse("1"), 0) == (1,)
    for s in range(5):
        assert sample_multiset_perm(Multiset.parse("1^2"), s) == (1, 1)
    rng = np.random.default_rng(0)
    M = Multiset.parse("1,2")
    c = Counter(sample_multiset_perm(M, rng) for _ in range(100_000))
    assert abs(c[(1, 2)] / 1e5 - 0.5) < 0.01


def test_multiset_sampler_uniform_chi_square():
    M = Multiset.parse("1^2,2^2,3")
    rng = np.random.default_rng(1)
    c = Counter(sample_multiset_perm(M, rng) for _ in range(30_000))
    assert len(c) == 30
    assert stats.chisquare(list(c.values())).pvalue > 1e-3


def test_stam_draw_consistency():
    law = murn_law(9)
    for s in range(50):
        d = sample_stam(9, law, s)
        assert d.partition == SetPartition.from_labels(d.urn_assignment)
        assert d.empty_urns == d.urn_count - len(set(d.urn_assignment))
        assert d.partition.n == 9
    with pytest.raises(DomainError):
        sample_stam(8, law, 0)


def test_determinism():
    law = murn_law(12)
    a = [sample_stam(12, law, replica_rng(99, k)).partition for k in range(20)]
    b = [sample_stam(12, law, replica_rng(99, k)).partition for k in range(20)]
    assert a == b
    assert sample_multiset_perm(Multiset.balanced(10, 3), 4) == sample_multiset_perm(Multiset.balanced(10, 3), 4)


def test_stam_n4_uniform_100k():
    law = murn_law(4)
    _, rgs, _ = sample_stam_bulk(4, law, 2024, 100_000)
    c = Counter(map(tuple, rgs))
    assert len(c) == 15
    assert stats.chisquare(list(c.values())).pvalue > 1e-3


def test_bulk_matches_single_draw_partition_semantics():
    law = murn_law(6)
    _, rgs, _ = sample_stam_bulk(6, law, 1, 500)
    valid = {p.rgs() for p in enumerate_set_partitions(6)}
    assert all(tuple(r) in valid for r in rgs)
