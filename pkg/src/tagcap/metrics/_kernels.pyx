# cython: boundscheck=False, wraparound=False, language_level=3
"""Compiled hot kernels. Same signatures as _kernels_py."""

import numpy as np


def lcs_length_ids(const int[:] a, const int[:] b):
    """Length of the longest common subsequence of two int-id sequences."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    if n == 0 or m == 0:
        return 0
    prev_arr = np.zeros(m + 1, dtype=np.int32)
    curr_arr = np.zeros(m + 1, dtype=np.int32)
    cdef int[:] prev = prev_arr
    cdef int[:] curr = curr_arr
    cdef Py_ssize_t i, j
    cdef int[:] tmp
    for i in range(n):
        for j in range(m):
            if a[i] == b[j]:
                curr[j + 1] = prev[j] + 1
            elif prev[j + 1] >= curr[j]:
                curr[j + 1] = prev[j + 1]
            else:
                curr[j + 1] = curr[j]
        tmp = prev
        prev = curr
        curr = tmp
    return int(prev[m])
