# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled outcome-tree walker."""
import numpy as np

from libc.stdint cimport int64_t


def walk_tree(const double[::1] cond, const int64_t[::1] first_child, const double[:, ::1] uniforms):
    cdef Py_ssize_t n = uniforms.shape[0]
    cdef Py_ssize_t t, d, c
    cdef int64_t node, fc
    cdef double u, acc
    out = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] o = out
    with nogil:
        for t in range(n):
            node = 0
            d = 0
            fc = first_child[0]
            while fc >= 0:
                u = uniforms[t, d]
                acc = 0.0
                c = 0
                while c < 3:
                    acc = acc + cond[fc + c]
                    if u < acc:
                        break
                    c = c + 1
                node = fc + c
                d = d + 1
                fc = first_child[node]
            o[t] = node
    return out
