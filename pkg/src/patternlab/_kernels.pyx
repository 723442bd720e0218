# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counting kernels. Mirrors ``_pykernels`` function for function."""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport calloc, free, malloc

cnp.import_array()

NAME = "cython"

ctypedef long long i64


cdef inline i64 _binom(i64 N, i64 k) noexcept nogil:
    cdef i64 out = 1
    cdef i64 i
    if k < 0 or N < k:
        return 0
    for i in range(k):
        out = out * (N - i) // (i + 1)
    return out


# ---------------------------------------------------------------------------
# Permutation patterns in words


cdef i64 _count_len2(const i64[:] w, int K, int ascending) noexcept nogil:
    # Fenwick tree over values 1..K holding the letters seen so far.
    cdef i64* tree = <i64*> calloc(K + 1, sizeof(i64))
    cdef Py_ssize_t n = w.shape[0], k
    cdef i64 total = 0
    cdef int v
    for k in range(n):
        v = <int> w[k]
        if ascending:
            total += _prefix(tree, v - 1)
        else:
            total += k - _prefix(tree, v)
        _bump(tree, K, v)
    free(tree)
    return total


cdef inline i64 _prefix(i64* tree, int v) noexcept nogil:
    cdef i64 out = 0
    while v > 0:
        out += tree[v]
        v -= v & (-v)
    return out


cdef inline void _bump(i64* tree, int K, int v) noexcept nogil:
    while v <= K:
        tree[v] += 1
        v += v & (-v)


cdef i64 _count_len3(const i64[:] w, int K, int t1, int t2, int t3) noexcept nogil:
    cdef Py_ssize_t n = w.shape[0], j
    cdef i64* left = <i64*> calloc(K + 2, sizeof(i64))
    cdef i64* right = <i64*> calloc(K + 2, sizeof(i64))
    cdef i64* pref = <i64*> calloc(K + 2, sizeof(i64))
    cdef i64 total = 0
    cdef int u, v, lo, hi, x
    for j in range(n):
        right[<int> w[j]] += 1
    for j in range(n):
        u = <int> w[j]
        right[u] -= 1
        # pref[x] = number of right letters with value <= x
        pref[0] = 0
        for x in range(1, K + 1):
            pref[x] = pref[x - 1] + right[x]
        for v in range(1, K + 1):
            if left[v] == 0:
                continue
            if (t1 < t2 and not v < u) or (t1 > t2 and not v > u):
                continue
            lo = 0
            hi = K + 1
            if t3 > t2:
                lo = u
            else:
                hi = u
            if t3 > t1:
                if v > lo:
                    lo = v
            else:
                if v < hi:
                    hi = v
            if hi - 1 > lo:
                total += left[v] * (pref[hi - 1] - pref[lo])
        left[u] += 1
    free(left)
    free(right)
    free(pref)
    return total


cdef i64 _count_dfs(const i64[:] w, const i64[:] tau, i64* vals, i64 start,
                    int depth) noexcept nogil:
    cdef int ell = tau.shape[0]
    cdef Py_ssize_t n = w.shape[0], pos
    cdef i64 total = 0, v
    cdef int s, ok
    if depth == ell:
        return 1
    for pos in range(start, n - (ell - depth) + 1):
        v = w[pos]
        ok = 1
        for s in range(depth):
            if tau[s] < tau[depth]:
                if not vals[s] < v:
                    ok = 0
                    break
            else:
                if not vals[s] > v:
                    ok = 0
                    break
        if ok:
            vals[depth] = v
            total += _count_dfs(w, tau, vals, pos + 1, depth + 1)
    return total


cdef i64 _count_word(const i64[:] w, const i64[:] tau) noexcept nogil:
    cdef int ell = tau.shape[0]
    cdef Py_ssize_t n = w.shape[0], k
    cdef int K = 0
    cdef i64* vals
    cdef i64 out
    if ell > n:
        return 0
    if ell == 0:
        return 1
    if ell == 1:
        return n
    for k in range(n):
        if w[k] > K:
            K = <int> w[k]
    if ell == 2:
        return _count_len2(w, K, tau[0] < tau[1])
    if ell == 3:
        return _count_len3(w, K, <int> tau[0], <int> tau[1], <int> tau[2])
    vals = <i64*> malloc(ell * sizeof(i64))
    out = _count_dfs(w, tau, vals, 0, 0)
    free(vals)
    return out


def count_word_pattern(word, tau):
    """Occurrences of ``tau`` in ``word`` (letters are positive integers)."""
    cdef const i64[:] w = np.ascontiguousarray(word, dtype=np.int64)
    cdef const i64[:] t = np.ascontiguousarray(tau, dtype=np.int64)
    cdef i64 out
    with nogil:
        out = _count_word(w, t)
    return int(out)


def count_word_pattern_many(words, tau):
    """Row-wise ``count_word_pattern`` over a 2-D array of words."""
    cdef const i64[:, :] W = np.ascontiguousarray(words, dtype=np.int64)
    cdef const i64[:] t = np.ascontiguousarray(tau, dtype=np.int64)
    cdef Py_ssize_t r, R = W.shape[0]
    out = np.zeros(R, dtype=np.int64)
    cdef i64[:] o = out
    with nogil:
        for r in range(R):
            o[r] = _count_word(W[r], t)
    return out


# ---------------------------------------------------------------------------
# Arc patterns in set partitions


cdef struct ArcPlan:
    int s            # number of pattern positions that are arc endpoints
    int* pos         # those positions, increasing (1-based pattern positions)
    int* start_of    # for an arc end: index (into pos) of its start, else -1
    int* is_start    # 1 if the position starts an arc
    int* gap         # free pattern positions before pos[q]
    int tail         # free pattern positions after the last endpoint


cdef i64 _arc_dfs(const i64[:] nxt, i64 n, ArcPlan* plan, i64* X, int q) noexcept nogil:
    cdef i64 lower, x, total = 0, weight, prev
    if q == plan.s:
        return _binom(n - X[q - 1], plan.tail)
    prev = X[q - 1] if q > 0 else 0
    lower = prev + 1
    if plan.start_of[q] >= 0:
        x = nxt[X[plan.start_of[q]]]
        if x < lower:
            return 0
        if plan.is_start[q] and nxt[x] == 0:
            return 0
        weight = _binom(x - prev - 1, plan.gap[q])
        if weight == 0:
            return 0
        X[q] = x
        return weight * _arc_dfs(nxt, n, plan, X, q + 1)
    for x in range(lower, n + 1):
        if nxt[x] == 0:
            continue
        weight = _binom(x - prev - 1, plan.gap[q])
        if weight == 0:
            continue
        X[q] = x
        total += weight * _arc_dfs(nxt, n, plan, X, q + 1)
    return total


cdef class _Plan:
    cdef ArcPlan plan
    cdef int length

    def __cinit__(self, arcs, int length):
        cdef int q, i, j
        ends = {j: i for i, j in arcs}
        starts = {i for i, _ in arcs}
        pos = sorted(set(ends) | starts)
        index = {p: q for q, p in enumerate(pos)}
        self.length = length
        self.plan.s = len(pos)
        self.plan.pos = <int*> malloc((len(pos) + 1) * sizeof(int))
        self.plan.start_of = <int*> malloc((len(pos) + 1) * sizeof(int))
        self.plan.is_start = <int*> malloc((len(pos) + 1) * sizeof(int))
        self.plan.gap = <int*> malloc((len(pos) + 1) * sizeof(int))
        prev = 0
        for q, p in enumerate(pos):
            self.plan.pos[q] = p
            self.plan.start_of[q] = index[ends[p]] if p in ends else -1
            self.plan.is_start[q] = 1 if p in starts else 0
            self.plan.gap[q] = p - prev - 1
            prev = p
        self.plan.tail = length - prev

    def __dealloc__(self):
        free(self.plan.pos)
        free(self.plan.start_of)
        free(self.plan.is_start)
        free(self.plan.gap)


cdef i64 _count_arcs(const i64[:] nxt, i64 n, ArcPlan* plan, int length) noexcept nogil:
    cdef i64* X
    cdef i64 out
    if length > n:
        return 0
    if plan.s == 0:
        return _binom(n, length)
    X = <i64*> malloc(plan.s * sizeof(i64))
    out = _arc_dfs(nxt, n, plan, X, 0)
    free(X)
    return out


def count_arc_pattern(nxt, arcs, int length):
    """Occurrences of an arc pattern; ``nxt[i]`` is the arc end from ``i`` (0: none)."""
    cdef const i64[:] a = np.ascontiguousarray(nxt, dtype=np.int64)
    cdef _Plan plan = _Plan(tuple(arcs), length)
    cdef i64 out
    with nogil:
        out = _count_arcs(a, a.shape[0] - 1, &plan.plan, length)
    return int(out)


def count_arc_pattern_many(nxts, arcs, int length):
    """Row-wise ``count_arc_pattern`` over a 2-D array of next-arrays."""
    cdef const i64[:, :] A = np.ascontiguousarray(nxts, dtype=np.int64)
    cdef _Plan plan = _Plan(tuple(arcs), length)
    cdef Py_ssize_t r, R = A.shape[0]
    out = np.zeros(R, dtype=np.int64)
    cdef i64[:] o = out
    with nogil:
        for r in range(R):
            o[r] = _count_arcs(A[r], A.shape[1] - 1, &plan.plan, length)
    return out


# ---------------------------------------------------------------------------
# Urn assignments


def urns_to_next(urns, int m):
    """Arc next-array of the partition induced by ``urns`` and the occupied-urn count."""
    cdef const i64[:] u = np.ascontiguousarray(urns, dtype=np.int64)
    cdef Py_ssize_t n = u.shape[0], i
    out = np.zeros(n + 1, dtype=np.int64)
    cdef i64[:] nxt = out
    cdef i64* last = <i64*> calloc(m, sizeof(i64))
    cdef i64 occupied = 0
    cdef i64 b
    with nogil:
        for i in range(n):
            b = u[i]
            if last[b]:
                nxt[last[b]] = i + 1
            else:
                occupied += 1
            last[b] = i + 1
    free(last)
    return out, int(occupied)
