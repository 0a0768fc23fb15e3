# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for token-sequence similarity.

Semantics match _pykernels exactly; only the constant factor differs.
"""

import numpy as np

cimport numpy as cnp

BACKEND = "c"


def lcs_length(a, b):
    """Length of the longest common subsequence of two int sequences."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] aa = np.ascontiguousarray(a, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] bb = np.ascontiguousarray(b, dtype=np.int64)
    if bb.shape[0] > aa.shape[0]:  # keep the inner row short
        aa, bb = bb, aa
    cdef Py_ssize_t n = aa.shape[0]
    cdef Py_ssize_t m = bb.shape[0]
    if n == 0 or m == 0:
        return 0
    cdef cnp.ndarray[cnp.int64_t, ndim=1] prev_arr = np.zeros(m + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] curr_arr = np.zeros(m + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] av = aa
    cdef cnp.int64_t[::1] bv = bb
    cdef cnp.int64_t[::1] prev = prev_arr
    cdef cnp.int64_t[::1] curr = curr_arr
    cdef cnp.int64_t[::1] tmp
    cdef Py_ssize_t i, j
    cdef cnp.int64_t ai, pj, cj
    for i in range(1, n + 1):
        ai = av[i - 1]
        for j in range(1, m + 1):
            if ai == bv[j - 1]:
                curr[j] = prev[j - 1] + 1
            else:
                pj = prev[j]
                cj = curr[j - 1]
                curr[j] = pj if pj >= cj else cj
        tmp = prev
        prev = curr
        curr = tmp
    return int(prev[m])


def clipped_ngram_overlap(a, b, int n):
    """Clipped n-gram match count between two int sequences.

    Returns (overlap, count_a, count_b); see _pykernels for the contract.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cdef cnp.ndarray[cnp.int64_t, ndim=1] aa = np.ascontiguousarray(a, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] bb = np.ascontiguousarray(b, dtype=np.int64)
    cdef Py_ssize_t ca = aa.shape[0] - n + 1
    cdef Py_ssize_t cb = bb.shape[0] - n + 1
    if ca < 0:
        ca = 0
    if cb < 0:
        cb = 0
    if ca == 0 or cb == 0:
        return 0, int(ca), int(cb)

    # Pack each n-gram window into a single int64 code, base = vocab size.
    cdef cnp.int64_t base = 1
    cdef Py_ssize_t i
    cdef cnp.int64_t hi = 0
    for i in range(aa.shape[0]):
        if aa[i] >= hi:
            hi = aa[i] + 1
    for i in range(bb.shape[0]):
        if bb[i] >= hi:
            hi = bb[i] + 1
    base = hi if hi > 1 else 1
    # Overflow guard: n windows of base-`base` digits must fit in 62 bits.
    if n * (float(np.log2(float(base))) if base > 1 else 0.0) > 62.0:
        from . import _pykernels
        return _pykernels.clipped_ngram_overlap(a, b, n)

    cdef cnp.ndarray[cnp.int64_t, ndim=1] codes_a = np.empty(ca, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] codes_b = np.empty(cb, dtype=np.int64)
    cdef cnp.int64_t[::1] av = aa
    cdef cnp.int64_t[::1] bv = bb
    cdef cnp.int64_t[::1] cav = codes_a
    cdef cnp.int64_t[::1] cbv = codes_b
    cdef cnp.int64_t code
    cdef Py_ssize_t k
    for i in range(ca):
        code = av[i]
        for k in range(1, n):
            code = code * base + av[i + k]
        cav[i] = code
    for i in range(cb):
        code = bv[i]
        for k in range(1, n):
            code = code * base + bv[i + k]
        cbv[i] = code

    codes_a.sort()
    codes_b.sort()

    # Sorted two-pointer merge; clip each distinct code to the smaller run.
    cdef Py_ssize_t ia = 0, ib = 0, ra, rb
    cdef cnp.int64_t va, vb
    cdef cnp.int64_t overlap = 0
    while ia < ca and ib < cb:
        va = cav[ia]
        vb = cbv[ib]
        if va < vb:
            ia += 1
        elif vb < va:
            ib += 1
        else:
            ra = 1
            while ia + ra < ca and cav[ia + ra] == va:
                ra += 1
            rb = 1
            while ib + rb < cb and cbv[ib + rb] == vb:
                rb += 1
            overlap += ra if ra < rb else rb
            ia += ra
            ib += rb
    return int(overlap), int(ca), int(cb)
