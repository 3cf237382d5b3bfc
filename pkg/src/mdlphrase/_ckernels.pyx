# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cover kernels; see ``_pykernels`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()


def count_pairs(cover):
    """Greedy non-overlapping pair counts, grouped by left symbol.

    Counting sort on the left symbol, then a stamp array per bucket for the
    right symbol: linear in the cover plus the symbol range, no hashing.
    """
    cdef const int64_t[::1] c = np.ascontiguousarray(cover, dtype=np.int64)
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t i, j, k, lo, hi, m = 0, kept = 0
    cdef int64_t a, b, nsym = 0
    cdef bint prev_taken = False
    if n < 2:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty.copy(), empty.copy()
    for i in range(n):
        if c[i] > nsym:
            nsym = c[i]
    nsym += 1

    take_arr = np.zeros(n - 1, dtype=np.uint8)
    start_arr = np.zeros(nsym + 1, dtype=np.int64)
    cdef unsigned char[::1] take = take_arr
    cdef int64_t[::1] start = start_arr
    for i in range(n - 1):
        a = c[i]
        if a == c[i + 1]:
            # a run of one symbol: skip the pair overlapping the last one taken
            if prev_taken:
                prev_taken = False
                continue
            prev_taken = True
        else:
            prev_taken = False
        take[i] = 1
        start[a + 1] += 1
        kept += 1
    for k in range(nsym):
        start[k + 1] += start[k]

    rights_arr = np.empty(kept, dtype=np.int64)
    fill_arr = start_arr[:nsym].copy()
    cdef int64_t[::1] rights = rights_arr
    cdef int64_t[::1] fill = fill_arr
    for i in range(n - 1):
        if take[i]:
            a = c[i]
            rights[fill[a]] = c[i + 1]
            fill[a] += 1

    stamp_arr = np.full(nsym, -1, dtype=np.int64)
    slot_arr = np.empty(nsym, dtype=np.int64)
    left_arr = np.empty(kept, dtype=np.int64)
    right_arr = np.empty(kept, dtype=np.int64)
    count_arr = np.zeros(kept, dtype=np.int64)
    cdef int64_t[::1] stamp = stamp_arr
    cdef int64_t[::1] slot = slot_arr
    cdef int64_t[::1] out_l = left_arr
    cdef int64_t[::1] out_r = right_arr
    cdef int64_t[::1] out_c = count_arr
    for a in range(nsym):
        lo = start[a]
        hi = start[a + 1]
        for j in range(lo, hi):
            b = rights[j]
            if stamp[b] != a:
                stamp[b] = a
                slot[b] = m
                out_l[m] = a
                out_r[m] = b
                m += 1
            out_c[slot[b]] += 1
    return left_arr[:m].copy(), right_arr[:m].copy(), count_arr[:m].copy()


def count_pair(cover, int64_t left, int64_t right):
    cdef const int64_t[::1] c = np.ascontiguousarray(cover, dtype=np.int64)
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t total = 0
    while i < n - 1:
        if c[i] == left and c[i + 1] == right:
            total += 1
            i += 2
        else:
            i += 1
    return total


def replace_pair(cover, int64_t left, int64_t right, int64_t new):
    cdef const int64_t[::1] c = np.ascontiguousarray(cover, dtype=np.int64)
    cdef Py_ssize_t n = c.shape[0]
    out_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t j = 0
    cdef Py_ssize_t replaced = 0
    while i < n:
        if i < n - 1 and c[i] == left and c[i + 1] == right:
            out[j] = new
            i += 2
            replaced += 1
        else:
            out[j] = c[i]
            i += 1
        j += 1
    return out_arr[:j].copy(), replaced


def expand_symbol(cover, int64_t symbol, expansion):
    cdef const int64_t[::1] c = np.ascontiguousarray(cover, dtype=np.int64)
    cdef const int64_t[::1] e = np.ascontiguousarray(expansion, dtype=np.int64)
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t k = e.shape[0]
    cdef Py_ssize_t i, t, hits = 0
    for i in range(n):
        if c[i] == symbol:
            hits += 1
    out_arr = np.empty(n + hits * (k - 1), dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef Py_ssize_t j = 0
    for i in range(n):
        if c[i] == symbol:
            for t in range(k):
                out[j] = e[t]
                j += 1
        else:
            out[j] = c[i]
            j += 1
    return out_arr
