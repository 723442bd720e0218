import itertools
from fractions import Fraction
from math import comb

import numpy as np
import pytest

from patternlab.combi import ArcPattern, Multiset, PermPattern, enumerate_multiset_perms
from patternlab.errors import DomainError, SizeLimitError
from patternlab.moments import ArcIndicator as A, MPermIndicator as X, variance_by_enumeration
from patternlab.patterns import count_arc_pattern, count_perm_pattern
from patternlab.wdg import (
    WeightedGraph,
    build_gM,
    build_gN,
    estimate_Cr,
    lift_psi,
    monomial_weight,
    mperm_family,
    mwst,
    param_R,
    param_R_bruteforce,
    param_Th_bruteforce,
    power_graph,
    psi_mperm,
    psi_setpart,
    scan_Cr_multisets,
    setpart_family,
    variance_upper_bound,
)

M5 = Multiset.parse("1^2,2^2,3")


def exhaustive_mwst(G, verts):
    """Max product over all (k-1)-edge subsets that form a spanning tree."""
    verts = list(dict.fromkeys(verts))
    k = len(verts)
    if k <= 1:
        return Fraction(1)
    edges = list(itertools.combinations(range(k), 2))
    best = Fraction(0)
    for tree in itertools.combinations(edges, k - 1):
        parent = list(range(k))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        w = Fraction(1)
        for a, b in tree:
            ra, rb = find(a), find(b)
            if ra == rb:
                ok = False
                break
            parent[ra] = rb
            w *= G.weight(verts[a], verts[b])
        if ok and w > best:
            best = w
    return best


def random_graph(rng, k):
    edges = {}
    for a, b in itertools.combinations(range(k), 2):
        if rng.random() < 0.7:
            edges[(a, b)] = Fraction(int(rng.integers(1, 6)), 6)
    return WeightedGraph.from_edges(edges, vertices=list(range(k)))


def test_graph_weights():
    G = build_gM(Multiset.parse("1^2,2"))
    assert G.weight(X(1, 1), X(2, 1)) == Fraction(1, 2)
    assert G.weight(X(1, 1), X(1, 2)) == 1
    assert G.weight(X(1, 1), X(2, 2)) == Fraction(1, 3)
    H = build_gN(4)
    assert H.weight(A(1, 2), A(1, 3)) == 1
    assert H.weight(A(1, 2), A(3, 4)) == Fraction(1, 4)
    assert H.weight(A(1, 3), A(2, 3)) == 1


def test_psi():
    assert psi_mperm(M5, [X(1, 1)]) == Fraction(2, 5)
    assert psi_mperm(M5, [X(1, 1), X(1, 1)]) == Fraction(2, 5)
    assert psi_mperm(M5, [X(1, 1), X(2, 3)]) == Fraction(2, 25)
    assert psi_setpart(10, [A(1, 2)]) == Fraction(1, 10)
    assert psi_setpart(10, [A(1, 2), A(1, 2)]) == Fraction(1, 10)
    assert psi_setpart(10, [A(1, 2), A(3, 4)]) == Fraction(1, 100)


def test_mwst_examples():
    G = WeightedGraph.from_edges({(1, 2): Fraction(1, 2), (2, 3): Fraction(1, 4)})
    assert mwst(G, [1]) == 1
    assert mwst(G, [1, 2, 3]) == Fraction(1, 8)
    assert mwst(build_gN(4), [A(1, 2), A(1, 3), A(2, 4)]) == Fraction(1, 4)
    H = WeightedGraph.from_edges({(1, 2): Fraction(1, 2)}, vertices=[1, 2, 3])
    assert mwst(H, [1, 2, 3]) == 0


def test_mwst_matches_exhaustive_random():
    rng = np.random.default_rng(42)
    for _ in range(200):
        k = int(rng.integers(1, 7))
        G = random_graph(rng, k)
        assert mwst(G, range(k)) == exhaustive_mwst(G, range(k))


def test_mwst_vertex_addition_bounds():
    # adding vertex v with heaviest incident weight w:  part * w <= full <= w
    rng = np.random.default_rng(7)
    for _ in range(200):
        G = random_graph(rng, 6)
        full, part = mwst(G, range(6)), mwst(G, range(5))
        w = max(G.weight(5, v) for v in range(5))
        assert 0 <= full <= 1
        assert part * w <= full <= w


def test_from_edges_rejects_bad_weight():
    with pytest.raises(DomainError):
        WeightedGraph.from_edges({(1, 2): Fraction(3, 2)})


def test_monomial_weight_and_power_graph():
    G = build_gN(5)
    I = (A(1, 2),)
    assert monomial_weight(G, I, I) == 1
    empty = WeightedGraph.from_edges({}, vertices=[1, 2])
    assert monomial_weight(empty, (1,), (2,)) == 0
    assert monomial_weight(G, (A(1, 2),), (A(1, 3), A(4, 5))) == 1
    P = power_graph(build_gN(4), 2)
    assert P.weight((A(1, 2), A(3, 4)), (A(1, 3),)) == 1
    P1 = power_graph(build_gN(4), 1)
    for u, v in itertools.combinations(build_gN(4).vertices, 2):
        assert P1.weight((u,), (v,)) == build_gN(4).weight(u, v)
    assert len(list(P1.vertices)) == len(P1.vertices) == 6
    lifted = lift_psi(lambda B: psi_setpart(4, B))
    assert lifted([(A(1, 2), A(3, 4))]) == psi_setpart(4, [A(1, 2), A(3, 4)])


def test_param_R():
    assert param_R(("mperm", Multiset.parse("1,2,3"), "21")) == 1
    assert param_R(("setpart", 4, ArcPattern.parse("1-2"))) == Fraction(6, 4)
    assert param_R(("mperm", Multiset.parse("1,2"), "231")) == 0
    assert param_R(("setpart", 3, ArcPattern.parse("1-3,2-4"))) == 0
    for M in [M5, Multiset.parse("1^3,2^2"), Multiset.balanced(6, 3)]:
        for tau in ["21", "231"]:
            assert param_R(("mperm", M, tau)) == param_R_bruteforce(mperm_family(M, PermPattern.parse(tau)))
    for n in range(2, 8):
        for pat in ["1-2", "1-3,2-4", "1-2,3-4"]:
            A_ = ArcPattern.parse(pat)
            assert param_R(("setpart", n, A_)) == param_R_bruteforce(setpart_family(n, A_))


def test_family_counts_decompose_occurrences():
    M = Multiset.parse("1^2,2,3")
    fam = mperm_family(M, PermPattern.parse("21"))
    for w in enumerate_multiset_perms(M):
        direct = sum(all(w[x.pos - 1] == x.value for x in I) for I in fam.monomials)
        assert direct == count_perm_pattern(w, "21")


def test_param_Th():
    single = mperm_family(Multiset.parse("1,2"), PermPattern.parse("21"))
    assert len(single.monomials) == 1
    assert param_Th_bruteforce(single, 1) == 1
    v = param_Th_bruteforce(("setpart", 4, ArcPattern.parse("1-2")), 1)
    assert v > 0
    with pytest.raises(SizeLimitError):
        param_Th_bruteforce(("setpart", 9, ArcPattern.parse("1-2")), 1)
    with pytest.raises(SizeLimitError):
        param_Th_bruteforce(("setpart", 5, ArcPattern.parse("1-2")), 3)


def test_Th_trends():
    from patternlab.combi import elementary_symmetric

    ratios = []
    for n in range(4, 9):
        M = Multiset.balanced(n, 2)
        ratios.append(param_Th_bruteforce(("mperm", M, "21"), 1) / elementary_symmetric(M, 1))
    assert max(ratios) <= 2 * min(ratios)
    ratios = []
    for n in range(4, 9):
        ratios.append(param_Th_bruteforce(("setpart", n, ArcPattern.parse("1-3,2-4")), 1) / Fraction(n) ** 1)
    assert max(ratios) <= 3 * min(ratios)


def test_variance_upper_bound():
    assert variance_upper_bound(1, 1, 1) == 2
    assert variance_upper_bound(0, 0, 0) == 0
    with pytest.raises(DomainError):
        variance_upper_bound(-1, 1, 1)
    M = Multiset.parse("1,2,3")
    fam = ("mperm", M, "21")
    C2 = estimate_Cr("mperm", M, 2)["max_ratio"]
    C2 = max(C2, Fraction(1))
    bound = variance_upper_bound(param_R(fam), param_Th_bruteforce(fam, 1), C2)
    exact = variance_by_enumeration(M, lambda w: count_perm_pattern(w, "21"))
    assert bound >= exact


def test_variance_bound_setpart():
    n = 6
    pat = ArcPattern.parse("1-2")
    fam = ("setpart", n, pat)
    C2 = max(estimate_Cr("setpart", n, 2)["max_ratio"], Fraction(1))
    from patternlab.combi import SetPartition

    exact = variance_by_enumeration(n, lambda nxt: count_arc_pattern(SetPartition.from_arcs(n, [(i, j) for i, j in enumerate(nxt) if j]), pat))
    assert variance_upper_bound(param_R(fam), param_Th_bruteforce(fam, 1), C2) >= exact


def test_estimate_Cr_small_fixture():
    rep = estimate_Cr("mperm", Multiset.parse("1,2"), 2)
    assert rep["violations"] == []
    assert rep["max_ratio"] == 2
    # bag {X_1^1, X_2^1}: kappa=-1/4, Psi=1/4, MWST=w(X11,X21)=1/a_1=1 -> ratio 1
    G = build_gM(Multiset.parse("1,2"))
    assert mwst(G, [X(1, 1), X(2, 1)]) == 1
    with pytest.raises(DomainError):
        estimate_Cr("mperm", M5, 5)
    with pytest.raises(DomainError):
        estimate_Cr("bogus", 4, 2)


def test_scan_multisets_small():
    rep = scan_Cr_multisets(4, 2)
    assert rep["max_ratio"] == Fraction(4, 3)
    assert rep["violations"] == []
    rep = estimate_Cr("setpart", 5, 3)
    assert rep["violations"] == []
