"""Counting and locating pattern occurrences in words and set partitions.

Counts go through the kernel backend (see :mod:`patternlab.kernels`);
occurrence lists are produced by a pruned depth-first enumeration here.
Positions are 1-based throughout.
"""

from __future__ import annotations

from typing import Sequence

from . import kernels
from .combi import ArcPattern, PermPattern, SetPartition


def _as_pattern(tau) -> PermPattern:
    if isinstance(tau, PermPattern):
        return tau
    if isinstance(tau, str):
        return PermPattern.parse(tau)
    return PermPattern(tuple(tau))


def _as_word(word) -> tuple[int, ...]:
    if isinstance(word, str):
        return tuple(int(c) for c in word)
    return tuple(int(x) for x in word)


def count_perm_pattern(word: Sequence[int] | str, tau) -> int:
    """Number of occurrences of the permutation pattern ``tau`` in ``word``.

    Equal letters never take part in the same occurrence.

    >>> count_perm_pattern("23112", "21")
    5
    """
    w = _as_word(word)
    t = _as_pattern(tau).values
    if len(t) > len(w):
        return 0
    return kernels.count_word_pattern(w, t)


def occurrences_perm_pattern(word: Sequence[int] | str, tau) -> list[tuple[int, ...]]:
    w = _as_word(word)
    t = _as_pattern(tau).values
    ell, n = len(t), len(w)
    out: list[tuple[int, ...]] = []
    pos: list[int] = []

    def dfs(start: int) -> None:
        depth = len(pos)
        if depth == ell:
            out.append(tuple(p + 1 for p in pos))
            return
        for p in range(start, n - (ell - depth) + 1):
            v = w[p]
            if all((w[q] < v) if t[s] < t[depth] else (w[q] > v) for s, q in enumerate(pos)):
                pos.append(p)
                dfs(p + 1)
                pos.pop()

    dfs(0)
    return out


def count_arc_pattern(pi: SetPartition, pattern: ArcPattern) -> int:
    """Number of position tuples ``x1 < ... < xl`` carrying every arc of ``pattern``."""
    if pattern.length > pi.n:
        return 0
    return kernels.count_arc_pattern(pi.next_array(), pattern.arcs, pattern.length)


def occurrences_arc_pattern(pi: SetPartition, pattern: ArcPattern) -> list[tuple[int, ...]]:
    ell, n = pattern.length, pi.n
    if ell > n:
        return []
    nxt = pi.next_array()
    start_to_end = dict(pattern.arcs)
    end_to_start = {j: i for i, j in pattern.arcs}
    out: list[tuple[int, ...]] = []
    x: list[int] = []

    def dfs(lower: int) -> None:
        p = len(x) + 1  # pattern position being placed
        if p > ell:
            out.append(tuple(x))
            return
        for xp in range(lower, n - (ell - p) + 1):
            if p in end_to_start and nxt[x[end_to_start[p] - 1]] != xp:
                continue
            if p in start_to_end and nxt[xp] == 0:
                continue
            x.append(xp)
            dfs(xp + 1)
            x.pop()

    dfs(1)
    return out
