"""Pure-Python counting kernels; same algorithms and signatures as ``_kernels``."""

from math import comb

import numpy as np

NAME = "python"


def _count_len2(w, K, ascending):
    tree = [0] * (K + 1)
    total = 0
    for k, v in enumerate(w):
        i, below = (v - 1 if ascending else v), 0
        while i > 0:
            below += tree[i]
            i -= i & -i
        total += below if ascending else k - below
        i = v
        while i <= K:
            tree[i] += 1
            i += i & -i
    return total


def _count_len3(w, K, t1, t2, t3):
    left = [0] * (K + 2)
    right = [0] * (K + 2)
    for x in w:
        right[x] += 1
    total = 0
    for u in w:
        right[u] -= 1
        pref = [0] * (K + 1)
        for x in range(1, K + 1):
            pref[x] = pref[x - 1] + right[x]
        for v in range(1, K + 1):
            if not left[v]:
                continue
            if (t1 < t2 and not v < u) or (t1 > t2 and not v > u):
                continue
            lo, hi = (u, K + 1) if t3 > t2 else (0, u)
            if t3 > t1:
                lo = max(lo, v)
            else:
                hi = min(hi, v)
            if hi - 1 > lo:
                total += left[v] * (pref[hi - 1] - pref[lo])
        left[u] += 1
    return total


def _count_dfs(w, tau, vals, start, depth):
    ell = len(tau)
    if depth == ell:
        return 1
    total = 0
    for pos in range(start, len(w) - (ell - depth) + 1):
        v = w[pos]
        if all((vals[s] < v) if tau[s] < tau[depth] else (vals[s] > v) for s in range(depth)):
            vals[depth] = v
            total += _count_dfs(w, tau, vals, pos + 1, depth + 1)
    return total


def _count_word(w, tau):
    ell, n = len(tau), len(w)
    if ell > n:
        return 0
    if ell == 0:
        return 1
    if ell == 1:
        return n
    K = max(w)
    if ell == 2:
        return _count_len2(w, K, tau[0] < tau[1])
    if ell == 3:
        return _count_len3(w, K, *tau)
    return _count_dfs(w, tau, [0] * ell, 0, 0)


def count_word_pattern(word, tau):
    """Occurrences of ``tau`` in ``word`` (letters are positive integers)."""
    return _count_word([int(x) for x in word], [int(x) for x in tau])


def count_word_pattern_many(words, tau):
    tau = [int(x) for x in tau]
    return np.array([_count_word([int(x) for x in row], tau) for row in words], dtype=np.int64)


def _plan(arcs, length):
    ends = {j: i for i, j in arcs}
    starts = {i for i, _ in arcs}
    pos = sorted(set(ends) | starts)
    index = {p: q for q, p in enumerate(pos)}
    start_of = [index[ends[p]] if p in ends else -1 for p in pos]
    is_start = [p in starts for p in pos]
    gap = [p - prev - 1 for prev, p in zip([0] + pos[:-1], pos)]
    tail = length - (pos[-1] if pos else 0)
    return start_of, is_start, gap, tail


def _count_arcs(nxt, n, plan, length):
    if length > n:
        return 0
    start_of, is_start, gap, tail = plan
    s = len(start_of)
    if s == 0:
        return comb(n, length)
    X = [0] * s

    def dfs(q):
        if q == s:
            return comb(n - X[q - 1], tail)
        prev = X[q - 1] if q else 0
        if start_of[q] >= 0:
            x = nxt[X[start_of[q]]]
            if x <= prev or (is_start[q] and nxt[x] == 0):
                return 0
            weight = comb(x - prev - 1, gap[q])
            if not weight:
                return 0
            X[q] = x
            return weight * dfs(q + 1)
        total = 0
        for x in range(prev + 1, n + 1):
            if nxt[x] == 0:
                continue
            weight = comb(x - prev - 1, gap[q])
            if weight:
                X[q] = x
                total += weight * dfs(q + 1)
        return total

    return dfs(0)


def count_arc_pattern(nxt, arcs, length):
    """Occurrences of an arc pattern; ``nxt[i]`` is the arc end from ``i`` (0: none)."""
    nxt = [int(x) for x in nxt]
    return _count_arcs(nxt, len(nxt) - 1, _plan(tuple(arcs), length), length)


def count_arc_pattern_many(nxts, arcs, length):
    plan = _plan(tuple(arcs), length)
    out = []
    for row in nxts:
        row = [int(x) for x in row]
        out.append(_count_arcs(row, len(row) - 1, plan, length))
    return np.array(out, dtype=np.int64)


def urns_to_next(urns, m):
    """Arc next-array of the partition induced by ``urns`` and the occupied-urn count."""
    n = len(urns)
    nxt = np.zeros(n + 1, dtype=np.int64)
    last = [0] * m
    occupied = 0
    for i, b in enumerate(urns, 1):
        b = int(b)
        if last[b]:
            nxt[last[b]] = i
        else:
            occupied += 1
        last[b] = i
    return nxt, occupied
