"""Weighted dependency graphs for the two indicator families.

Graphs are weight functions on vertex pairs (absent edge = weight 0); vertex
sets are only materialised for the bags that get visited. All weights and
derived quantities are exact Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from math import comb, prod
from typing import Callable, Hashable, Iterable, Sequence

from .combi import ArcPattern, Multiset, PermPattern, elementary_symmetric
from .errors import BoundViolation, DomainError, SizeLimitError
from .moments import (
    ArcIndicator,
    EnumerationOracle,
    MPermClosedOracle,
    MPermIndicator,
    joint_cumulant,
)

ONE = Fraction(1)
ZERO = Fraction(0)


class WeightedGraph:
    """A symmetric weight function with values in [0, 1].

    ``vertices`` may be ``None`` when the vertex set is only implicit.
    """

    def __init__(self, weight: Callable[[Hashable, Hashable], Fraction], vertices=None):
        self._weight = weight
        self.vertices = vertices

    def weight(self, u, v) -> Fraction:
        if u == v:
            return ONE
        return self._weight(u, v)

    @classmethod
    def from_edges(cls, edges: dict, vertices=None) -> "WeightedGraph":
        """Explicit graph from ``{(u, v): w}``; missing pairs weigh 0."""
        table = {}
        for (u, v), w in edges.items():
            w = Fraction(w)
            if not 0 <= w <= 1:
                raise DomainError(f"edge weight {w} outside [0, 1]")
            table[(u, v)] = table[(v, u)] = w
        if vertices is None:
            vertices = sorted({x for e in edges for x in e})
        return cls(lambda u, v: table.get((u, v), ZERO), vertices)


def build_gM(M: Multiset) -> WeightedGraph:
    n = M.n

    def weight(x: MPermIndicator, y: MPermIndicator) -> Fraction:
        if x.pos == y.pos:
            return ONE
        if x.value == y.value:
            return Fraction(1, M.count(x.value))
        return Fraction(1, n)

    vertices = [MPermIndicator(i, j) for i in range(1, n + 1) for j in range(1, M.k + 1)]
    return WeightedGraph(weight, vertices)


def build_gN(n: int) -> WeightedGraph:
    if n < 2:
        raise DomainError("n must be >= 2")

    def weight(x: ArcIndicator, y: ArcIndicator) -> Fraction:
        if x.start == y.start or x.end == y.end:
            return ONE
        return Fraction(1, n)

    vertices = [ArcIndicator(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    return WeightedGraph(weight, vertices)


def psi_mperm(M: Multiset, B: Iterable[MPermIndicator]) -> Fraction:
    return prod((Fraction(M.count(x.value), M.n) for x in set(B)), start=ONE)


def psi_setpart(n: int, B: Iterable[ArcIndicator]) -> Fraction:
    return Fraction(1, n ** len(set(B)))


def mwst(G: WeightedGraph, B: Iterable) -> Fraction:
    """Maximum product weight of a spanning tree of ``G[set(B)]``; 0 if disconnected.

    Prim's algorithm on the weights: since every weight lies in [0, 1], the
    tree maximising the sum of log-weights maximises the product.
    """
    verts = list(dict.fromkeys(B))
    k = len(verts)
    if k <= 1:
        return ONE
    best = [G.weight(verts[0], v) for v in verts]
    in_tree = [False] * k
    in_tree[0] = True
    total = ONE
    for _ in range(k - 1):
        cand = max((i for i in range(k) if not in_tree[i]), key=lambda i: best[i])
        if best[cand] == 0:
            return ZERO
        total *= best[cand]
        in_tree[cand] = True
        for i in range(k):
            if not in_tree[i]:
                w = G.weight(verts[cand], verts[i])
                if w > best[i]:
                    best[i] = w
    return total


def monomial_weight(G: WeightedGraph, I: Sequence, J: Sequence) -> Fraction:
    """1 if the monomials share a variable, else the heaviest edge between them."""
    if set(I) & set(J):
        return ONE
    return max((G.weight(x, y) for x in I for y in J), default=ZERO)


def _msets(vertices: Sequence, d: int):
    for size in range(1, d + 1):
        yield from combinations_with_replacement(vertices, size)


def power_graph(G: WeightedGraph, d: int) -> WeightedGraph:
    """Graph on monomials of degree at most ``d`` (sorted tuples of base vertices)."""
    if d < 1:
        raise DomainError("d must be >= 1")

    def weight(I, J):
        return monomial_weight(G, I, J)

    vertices = None
    if G.vertices is not None:
        vertices = _LazyMsets(tuple(G.vertices), d)
    return WeightedGraph(weight, vertices)


class _LazyMsets:
    def __init__(self, base, d):
        self.base, self.d = base, d

    def __iter__(self):
        return _msets(self.base, self.d)

    def __len__(self):
        k = len(self.base)
        return sum(comb(k + s - 1, s) for s in range(1, self.d + 1))


def lift_psi(psi: Callable[[Iterable], Fraction]) -> Callable[[Iterable[Sequence]], Fraction]:
    """Psi on multisets of monomials: evaluate ``psi`` on their disjoint union."""
    return lambda monomials: psi([x for I in monomials for x in I])


# ---------------------------------------------------------------------------
# Monomial families of a pattern


@dataclass
class MonomialFamily:
    """The summands of an occurrence count, as monomials in base indicators.

    ``single`` gives the Psi-weight of one base indicator; Psi of a bag is the
    product of ``single`` over its distinct indicators.
    """

    kind: str
    graph: WeightedGraph
    monomials: list
    single: Callable[[Hashable], Fraction]
    ell: int
    size: int

    def psi(self, B: Iterable) -> Fraction:
        return prod((self.single(x) for x in set(B)), start=ONE)


def mperm_family(M: Multiset, tau: PermPattern) -> MonomialFamily:
    ell = len(tau)
    monos = []
    for pos in combinations(range(1, M.n + 1), ell):
        for vals in combinations(range(1, M.k + 1), ell):
            monos.append(tuple(MPermIndicator(pos[t], vals[tau.values[t] - 1]) for t in range(ell)))
    return MonomialFamily(
        "mperm", build_gM(M), monos, lambda x: Fraction(M.count(x.value), M.n), ell, M.n
    )


def setpart_family(n: int, pattern: ArcPattern) -> MonomialFamily:
    monos = []
    for x in combinations(range(1, n + 1), pattern.length):
        monos.append(tuple(ArcIndicator(x[i - 1], x[j - 1]) for i, j in pattern.arcs))
    graph = build_gN(n) if n >= 2 else WeightedGraph(lambda u, v: ONE, [])
    return MonomialFamily("setpart", graph, monos, lambda _: Fraction(1, n), pattern.length, n)


def param_R(family: MonomialFamily | tuple) -> Fraction:
    """Sum of Psi over the monomials, in closed form.

    ``family`` is a :class:`MonomialFamily` or one of ``("mperm", M, tau)``,
    ``("setpart", n, pattern)``.
    """
    kind, size, pattern = _descriptor(family)
    ell = len(pattern) if kind == "mperm" else pattern.length
    if kind == "mperm":
        n = size.n
        if ell > n:
            return ZERO
        return Fraction(comb(n, ell) * elementary_symmetric(size, ell), n ** ell)
    if ell > size:
        return ZERO
    return Fraction(comb(size, ell), size ** pattern.arc_count)


def param_R_bruteforce(family: MonomialFamily) -> Fraction:
    return sum((family.psi(I) for I in family.monomials), ZERO)


def _descriptor(family):
    if isinstance(family, MonomialFamily):
        raise DomainError("pass the family descriptor tuple, not a built family")
    kind, size, pattern = family
    if kind == "mperm":
        return kind, size, pattern if isinstance(pattern, PermPattern) else PermPattern.parse(str(pattern))
    if kind == "setpart":
        return kind, int(size), pattern
    raise DomainError(f"unknown family {kind!r}")


def _build(family) -> MonomialFamily:
    if isinstance(family, MonomialFamily):
        return family
    kind, size, pattern = _descriptor(family)
    return mperm_family(size, pattern) if kind == "mperm" else setpart_family(size, pattern)


TH_SIZE_CAP = 8
TH_ORDER_CAP = 2


def param_Th_bruteforce(family, h: int) -> Fraction:
    """Exact T_h by scanning every h-multiset of monomials and every beta."""
    fam = _build(family)
    if h < 1:
        raise DomainError("h must be >= 1")
    if fam.size > TH_SIZE_CAP or h > TH_ORDER_CAP:
        raise SizeLimitError(f"T_h scan limited to size <= {TH_SIZE_CAP}, h <= {TH_ORDER_CAP}")
    monos = fam.monomials
    if not monos:
        return ZERO
    G = fam.graph
    sets = [frozenset(I) for I in monos]
    nmono = len(monos)
    # power-graph edge weights between monomials, by index
    wcache: dict[tuple[int, int], Fraction] = {}

    def w(a: int, b: int) -> Fraction:
        key = (a, b) if a < b else (b, a)
        val = wcache.get(key)
        if val is None:
            if sets[a] & sets[b]:
                val = ONE
            else:
                val = max(G.weight(x, y) for x in sets[a] for y in sets[b])
            wcache[key] = val
        return val

    best = ZERO
    for alphas in combinations_with_replacement(range(nmono), h):
        union = frozenset().union(*(sets[a] for a in alphas))
        total = ZERO
        for b in range(nmono):
            if b in alphas:
                W = ONE
            else:
                W = max(w(b, a) for a in alphas)
                if W == 0:
                    continue
            extra = sets[b] - union
            total += W * prod((fam.single(x) for x in extra), start=ONE)
        if total > best:
            best = total
    return best


def variance_upper_bound(R: Fraction, T1: Fraction, C2: Fraction) -> Fraction:
    R, T1, C2 = Fraction(R), Fraction(T1), Fraction(C2)
    if R < 0 or T1 < 0 or C2 < 0:
        raise DomainError("R, T1 and C2 must be nonnegative")
    return 2 * C2 * R * T1


# ---------------------------------------------------------------------------
# Empirical constants of the cumulant bound


def estimate_Cr(family: str, size, r: int, strict: bool = True) -> dict:
    """Max of |kappa(B)| / (Psi(B) MWST(G[B])) over repetition-free bags of size ``r``.

    ``family`` is ``"mperm"`` (``size`` a Multiset, closed-form moments) or
    ``"setpart"`` (``size`` an int, moments by enumeration over all set
    partitions). A bag with MWST = 0 and nonzero cumulant is a violation; with
    ``strict`` it raises :class:`BoundViolation`.
    """
    if not 2 <= r <= 4:
        raise DomainError("r must be in 2..4")
    if family == "mperm":
        M = size
        G = build_gM(M)
        oracle = MPermClosedOracle(M)

        def psi(B):
            return psi_mperm(M, B)
    elif family == "setpart":
        n = int(size)
        G = build_gN(n)
        oracle = EnumerationOracle(n)

        def psi(B):
            return psi_setpart(n, B)
    else:
        raise DomainError(f"unknown family {family!r}")

    best, argmax, violations, scanned = ZERO, None, [], 0
    for bag in combinations(G.vertices, r):
        scanned += 1
        kappa = joint_cumulant(oracle, bag)
        tree = mwst(G, bag)
        if tree == 0:
            if kappa != 0:
                violations.append([str(x) for x in bag])
            continue
        ratio = abs(kappa) / (psi(bag) * tree)
        if ratio > best:
            best, argmax = ratio, bag
    if violations and strict:
        raise BoundViolation(f"{len(violations)} bags with MWST = 0 and nonzero cumulant")
    return {
        "family": family,
        "size": str(size),
        "r": r,
        "max_ratio": best,
        "argmax_bag": [str(x) for x in argmax] if argmax else [],
        "violations": violations,
        "bags": scanned,
    }


def integer_partitions(n: int, largest: int | None = None):
    """Multiplicity vectors (non-increasing) summing to ``n``."""
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in integer_partitions(n - first, first):
            yield (first,) + rest


def scan_Cr_multisets(n: int, r: int) -> dict:
    """``estimate_Cr`` over every multiset of size ``n`` (up to relabelling)."""
    best = None
    for mult in integer_partitions(n):
        rep = estimate_Cr("mperm", Multiset(mult), r)
        if best is None or rep["max_ratio"] > best["max_ratio"]:
            best = rep
    return best
