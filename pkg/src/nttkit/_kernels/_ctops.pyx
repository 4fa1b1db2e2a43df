# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled versions of the batched index kernels (see _pyops for contracts)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef void _mode_step(double complex[:, ::1] src, double complex[:, ::1] dst,
                     double complex[:, :, ::1] core, cnp.int64_t[::1] ik,
                     Py_ssize_t ra, Py_ssize_t rb) noexcept nogil:
    cdef Py_ssize_t q, a, b
    cdef double complex acc
    for q in range(ik.shape[0]):
        for b in range(rb):
            acc = 0
            for a in range(ra):
                acc = acc + src[q, a] * core[a, ik[q], b]
            dst[q, b] = acc


cdef void _mode_step_rev(double complex[:, ::1] src, double complex[:, ::1] dst,
                         double complex[:, :, ::1] core, cnp.int64_t[::1] ik,
                         Py_ssize_t ra, Py_ssize_t rb) noexcept nogil:
    # dst[q, a] = sum_b core[a, ik[q], b] * src[q, b]
    cdef Py_ssize_t q, a, b
    cdef double complex acc
    for q in range(ik.shape[0]):
        for a in range(ra):
            acc = 0
            for b in range(rb):
                acc = acc + core[a, ik[q], b] * src[q, b]
            dst[q, a] = acc


def tt_entries(list cores, idx):
    cdef Py_ssize_t m = idx.shape[0]
    cdef Py_ssize_t d = len(cores)
    cdef Py_ssize_t k
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    cur = np.ones((m, 1), dtype=np.complex128)
    for k in range(d):
        core = np.ascontiguousarray(cores[k], dtype=np.complex128)
        nxt = np.empty((m, core.shape[2]), dtype=np.complex128)
        _mode_step(cur, nxt, core, np.ascontiguousarray(idx[:, k]),
                   core.shape[0], core.shape[2])
        cur = nxt
    return np.ascontiguousarray(cur[:, 0])


def sparse_gradient_cores(list left_cores, list right_cores, idx, vals):
    cdef Py_ssize_t m = idx.shape[0]
    cdef Py_ssize_t d = len(left_cores)
    cdef Py_ssize_t k, q, a, b, i
    cdef Py_ssize_t ra, nk, rb
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    vals = np.ascontiguousarray(vals, dtype=np.complex128)
    cdef double complex[::1] vals_v = vals

    # forward chain over the left family, backward chain over the right family
    pre = [np.ones((m, 1), dtype=np.complex128)]
    for k in range(d - 1):
        core = np.ascontiguousarray(left_cores[k], dtype=np.complex128)
        nxt = np.empty((m, core.shape[2]), dtype=np.complex128)
        _mode_step(pre[k], nxt, core, np.ascontiguousarray(idx[:, k]),
                   core.shape[0], core.shape[2])
        pre.append(nxt)
    suf = [None] * (d + 1)
    suf[d] = np.ones((m, 1), dtype=np.complex128)
    for k in range(d - 1, 0, -1):
        core = np.ascontiguousarray(right_cores[k], dtype=np.complex128)
        nxt = np.empty((m, core.shape[0]), dtype=np.complex128)
        _mode_step_rev(suf[k + 1], nxt, core, np.ascontiguousarray(idx[:, k]),
                       core.shape[0], core.shape[2])
        suf[k] = nxt

    out = []
    cdef double complex[:, ::1] pv
    cdef double complex[:, ::1] sv
    cdef double complex[:, :, ::1] wv
    cdef cnp.int64_t[::1] ik
    cdef double complex pa
    for k in range(d):
        ra = left_cores[k].shape[0]
        nk = left_cores[k].shape[1]
        rb = right_cores[k].shape[2]
        w = np.zeros((ra, nk, rb), dtype=np.complex128)
        wv = w
        pv = pre[k]
        sv = suf[k + 1]
        ik = np.ascontiguousarray(idx[:, k])
        with nogil:
            for q in range(m):
                i = ik[q]
                for a in range(ra):
                    pa = pv[q, a].conjugate() * vals_v[q]
                    for b in range(rb):
                        wv[a, i, b] = wv[a, i, b] + pa * sv[q, b].conjugate()
        out.append(w)
    return out
