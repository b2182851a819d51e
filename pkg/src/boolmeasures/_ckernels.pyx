# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops; semantics match _pykernels exactly."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, int32_t, int16_t
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef extern from *:
    """
    static inline void bm_vmax16(int16_t *restrict w, const int16_t *restrict s, int n) {
        for (int j = 0; j < n; j++) w[j] = s[j] > w[j] ? s[j] : w[j];
    }
    static inline void bm_vmin16(int16_t *restrict b, const int16_t *restrict w, int n) {
        for (int j = 0; j < n; j++) b[j] = w[j] < b[j] ? w[j] : b[j];
    }
    static inline void bm_finish(int16_t *restrict row, const int16_t *restrict b,
                                 const uint64_t *restrict f, uint64_t m, int n) {
        for (int j = 0; j < n; j++) {
            uint64_t fm = f[j] & m;
            int16_t mono = (int16_t)((fm == 0) | (fm == m));
            row[j] = (int16_t)((b[j] + 1) * (1 - mono));
        }
    }
    """
    void bm_finish(int16_t *row, const int16_t *b, const uint64_t *f, uint64_t m, int n) nogil
    void bm_vmax16(int16_t *w, const int16_t *s, int n) nogil
    void bm_vmin16(int16_t *b, const int16_t *w, int n) nogil


cdef inline int _popcount(uint64_t x) nogil:
    return __builtin_popcountll(x)


cdef struct PackState:
    uint64_t *sets
    int nsets
    int best
    long long nodes
    long long budget
    int exact


cdef void _pack(PackState *st, uint64_t *avail, int navail, int count) nogil:
    cdef uint64_t union_ = 0
    cdef uint64_t e
    cdef int i, j, nwithout, nnext, ub, smallest
    cdef uint64_t *without
    cdef uint64_t *nxt
    if count > st.best:
        st.best = count
    if navail == 0 or st.exact == 0:
        return
    for i in range(navail):
        union_ |= avail[i]
    smallest = _popcount(avail[0])
    ub = _popcount(union_) // smallest
    if navail < ub:
        ub = navail
    if count + ub <= st.best:
        return
    st.nodes += 1
    if st.budget >= 0 and st.nodes > st.budget:
        st.exact = 0
        return
    e = union_ & (~union_ + 1)
    without = <uint64_t *> malloc(navail * sizeof(uint64_t))
    nxt = <uint64_t *> malloc(navail * sizeof(uint64_t))
    nwithout = 0
    for i in range(navail):
        if not (avail[i] & e):
            without[nwithout] = avail[i]
            nwithout += 1
    for i in range(navail):
        if avail[i] & e:
            nnext = 0
            for j in range(nwithout):
                if not (without[j] & avail[i]):
                    nxt[nnext] = without[j]
                    nnext += 1
            _pack(st, nxt, nnext, count + 1)
    _pack(st, without, nwithout, count)
    free(without)
    free(nxt)


def max_packing(masks, budget=None):
    uniq = sorted(set(int(m) for m in masks if m), key=lambda m: (m.bit_count(), m))
    keep = []
    for m in uniq:
        if not any(k & m == k for k in keep):
            keep.append(m)
    if not keep:
        return 0, True
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] arr = np.array(keep, dtype=np.uint64)
    cdef PackState st
    st.sets = <uint64_t *> arr.data
    st.nsets = len(keep)
    st.best = 0
    st.nodes = 0
    st.budget = -1 if budget is None else budget
    st.exact = 1
    with nogil:
        _pack(&st, st.sets, st.nsets, 0)
    return st.best, bool(st.exact)


def dt_depths(state_masks, q_ptr, c_ptr, children, fbits):
    # state-major over blocks of functions so the innermost loop vectorises
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] sm = np.ascontiguousarray(state_masks, dtype=np.uint64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] qp = np.ascontiguousarray(q_ptr, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] cp = np.ascontiguousarray(c_ptr, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] ch = np.ascontiguousarray(children, dtype=np.int32)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] F = np.ascontiguousarray(fbits, dtype=np.uint64)
    cdef Py_ssize_t nf = F.shape[0]
    cdef int ns = sm.shape[0]
    cdef cnp.ndarray[cnp.int32_t, ndim=1] out = np.zeros(nf, dtype=np.int32)
    cdef int B = 512
    cdef int16_t *depth = <int16_t *> malloc(ns * B * sizeof(int16_t))
    cdef int16_t *best = <int16_t *> malloc(B * sizeof(int16_t))
    cdef int16_t *worst = <int16_t *> malloc(B * sizeof(int16_t))
    cdef int16_t *row
    cdef Py_ssize_t base
    cdef int s, q, c, j, nb
    cdef const uint64_t *fp = <const uint64_t *> F.data
    with nogil:
        base = 0
        while base < nf:
            nb = B if nf - base > B else <int>(nf - base)
            for s in range(ns):
                row = depth + s * B
                for j in range(nb):
                    best[j] = 32000
                for q in range(qp[s], qp[s + 1]):
                    for j in range(nb):
                        worst[j] = 0
                    for c in range(cp[q], cp[q + 1]):
                        bm_vmax16(worst, depth + ch[c] * B, nb)
                    bm_vmin16(best, worst, nb)
                bm_finish(row, best, fp + base, sm[s], nb)
            row = depth + (ns - 1) * B
            for j in range(nb):
                out[base + j] = row[j]
            base += nb
    free(depth)
    free(best)
    free(worst)
    return out


def block_keys(fbits, diffpos):
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] F = np.ascontiguousarray(fbits, dtype=np.uint64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] dp = np.ascontiguousarray(diffpos, dtype=np.uint8)
    cdef Py_ssize_t nf = F.shape[0]
    cdef int npts = dp.shape[0]
    cdef cnp.ndarray[cnp.uint64_t, ndim=2] out = np.zeros((nf, npts), dtype=np.uint64)
    cdef Py_ssize_t k
    cdef int x, y
    cdef uint64_t f, key, fx
    with nogil:
        for k in range(nf):
            f = F[k]
            for x in range(npts):
                fx = (f >> x) & 1
                key = 0
                for y in range(npts):
                    if ((f >> y) & 1) != fx:
                        key |= (<uint64_t> 1) << dp[x, y]
                out[k, x] = key
    return out


def span_filter(annihilator, int npoints):
    cdef cnp.ndarray[cnp.int64_t, ndim=2] N = np.ascontiguousarray(annihilator, dtype=np.int64)
    cdef int r = N.shape[0]
    if r == 0:
        return np.arange(1 << npoints, dtype=np.uint64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] cols = np.ascontiguousarray(N.T)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] res = np.zeros(r, dtype=np.int64)
    cdef uint64_t total = (<uint64_t> 1) << npoints
    cdef uint64_t i, gray, prev = 0, changed
    cdef int bit, j, zero
    hits = []
    # Gray-code walk: one column added or removed per step
    for i in range(total):
        gray = i ^ (i >> 1)
        if i:
            changed = gray ^ prev
            bit = __builtin_ctzll(changed)
            if gray & changed:
                for j in range(r):
                    res[j] += cols[bit, j]
            else:
                for j in range(r):
                    res[j] -= cols[bit, j]
        prev = gray
        zero = 1
        for j in range(r):
            if res[j] != 0:
                zero = 0
                break
        if zero:
            hits.append(gray)
    return np.sort(np.array(hits, dtype=np.uint64))


def partition_exists(tile_ptr, tile_link, tile_size, fbits, full, int k, budget=None):
    cdef cnp.ndarray[cnp.int32_t, ndim=1] tp = np.ascontiguousarray(tile_ptr, dtype=np.int32)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] tl = np.ascontiguousarray(tile_link, dtype=np.uint64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] ts = np.ascontiguousarray(tile_size, dtype=np.int32)
    cdef uint64_t F = fbits
    cdef long long limit = -1 if budget is None else budget
    failed = set()
    cdef long long nodes = 0
    # explicit stack: (rest, next tile index)
    cdef int maxdepth = 65
    cdef uint64_t *rest_stack = <uint64_t *> malloc(maxdepth * sizeof(uint64_t))
    cdef int *tile_stack = <int *> malloc(maxdepth * sizeof(int))
    cdef int top = 0
    cdef uint64_t rest, lk, fl
    cdef int p, t, found = 0
    rest_stack[0] = full
    tile_stack[0] = -1
    while top >= 0:
        rest = rest_stack[top]
        if rest == 0:
            found = 1
            break
        p = __builtin_ctzll(rest)
        t = tile_stack[top]
        if t == -1:
            if rest in failed:
                top -= 1
                continue
            nodes += 1
            if limit >= 0 and nodes > limit:
                free(rest_stack)
                free(tile_stack)
                from .exact import BudgetExceeded
                raise BudgetExceeded("unambiguous-certificate search budget exhausted")
            t = tp[p]
        else:
            t += 1
        while t < tp[p + 1]:
            if ts[t] <= k:
                lk = tl[t]
                if not (lk & ~rest):
                    fl = F & lk
                    if fl == 0 or fl == lk:
                        break
            t += 1
        if t >= tp[p + 1]:
            failed.add(rest)
            top -= 1
            continue
        tile_stack[top] = t
        top += 1
        rest_stack[top] = rest & ~tl[t]
        tile_stack[top] = -1
    free(rest_stack)
    free(tile_stack)
    return bool(found)
