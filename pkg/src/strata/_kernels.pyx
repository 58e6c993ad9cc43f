# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the integer-table kernels in ``_kernels_py``."""
import numpy as np
cimport numpy as cnp

BACKEND = "cython"


def assoc_violations(table, out_offsets, out_items, dst):
    cdef int[:, ::1] t = np.ascontiguousarray(table, dtype=np.int32)
    cdef int[::1] offs = np.ascontiguousarray(out_offsets, dtype=np.int32)
    cdef int[::1] items = np.ascontiguousarray(out_items, dtype=np.int32)
    cdef int[::1] d = np.ascontiguousarray(dst, dtype=np.int32)
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t f, gi, hi
    cdef int g, h, b, c, gf, hg, left, right
    found = []
    for f in range(n):
        b = d[f]
        for gi in range(offs[b], offs[b + 1]):
            g = items[gi]
            gf = t[f, g]
            if gf < 0:
                continue
            c = d[g]
            for hi in range(offs[c], offs[c + 1]):
                h = items[hi]
                hg = t[g, h]
                if hg < 0:
                    continue
                left = t[gf, h]
                right = t[f, hg]
                if left != right:
                    found.append((f, g, h))
    return found


def functor_violations(src_table, out_offsets, out_items, src_dst, fmor, dst_table):
    cdef int[:, ::1] t = np.ascontiguousarray(src_table, dtype=np.int32)
    cdef int[:, ::1] u = np.ascontiguousarray(dst_table, dtype=np.int32)
    cdef int[::1] offs = np.ascontiguousarray(out_offsets, dtype=np.int32)
    cdef int[::1] items = np.ascontiguousarray(out_items, dtype=np.int32)
    cdef int[::1] sd = np.ascontiguousarray(src_dst, dtype=np.int32)
    cdef int[::1] fm = np.ascontiguousarray(fmor, dtype=np.int32)
    cdef Py_ssize_t n = fm.shape[0]
    cdef Py_ssize_t f, gi
    cdef int g, b, gf
    found = []
    for f in range(n):
        b = sd[f]
        for gi in range(offs[b], offs[b + 1]):
            g = items[gi]
            gf = t[f, g]
            if gf < 0 or u[fm[f], fm[g]] != fm[gf]:
                found.append((f, g))
    return found


def naturality_violations(msrc, mdst, fmor, gmor, comps, dst_table):
    cdef int[:, ::1] u = np.ascontiguousarray(dst_table, dtype=np.int32)
    cdef int[::1] s = np.ascontiguousarray(msrc, dtype=np.int32)
    cdef int[::1] d = np.ascontiguousarray(mdst, dtype=np.int32)
    cdef int[::1] fm = np.ascontiguousarray(fmor, dtype=np.int32)
    cdef int[::1] gm = np.ascontiguousarray(gmor, dtype=np.int32)
    cdef int[::1] cp = np.ascontiguousarray(comps, dtype=np.int32)
    cdef Py_ssize_t n = s.shape[0]
    cdef Py_ssize_t f
    cdef int upper, lower
    found = []
    for f in range(n):
        upper = u[cp[s[f]], gm[f]]
        lower = u[fm[f], cp[d[f]]]
        if upper < 0 or upper != lower:
            found.append(f)
    return found
