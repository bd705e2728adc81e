# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Monte-Carlo transceiver kernel (see _ber_core_py for the contract)."""

import numpy as np

cimport cython
cimport numpy as cnp

cnp.import_array()

ctypedef double complex cplx


cdef inline cplx _cdot(const cplx[:, ::1] a, const cplx[:, ::1] b,
                       Py_ssize_t t, Py_ssize_t n) noexcept nogil:
    # conj(a[t]) . b[t]
    cdef cplx acc = 0
    cdef Py_ssize_t i
    for i in range(n):
        acc += a[t, i].conjugate() * b[t, i]
    return acc


cdef inline double _norm2(const cplx[:, ::1] a, Py_ssize_t t, Py_ssize_t n) noexcept nogil:
    cdef double acc = 0
    cdef Py_ssize_t i
    for i in range(n):
        acc += a[t, i].real * a[t, i].real + a[t, i].imag * a[t, i].imag
    return acc


cdef inline int _nearest(cplx y, const cplx[::1] points, Py_ssize_t q) noexcept nogil:
    cdef double best = 1e300
    cdef double d, dr, di
    cdef int best_k = 0
    cdef Py_ssize_t k
    for k in range(q):
        dr = y.real - points[k].real
        di = y.imag - points[k].imag
        d = dr * dr + di * di
        if d < best:  # strict: ties keep the lowest bit label
            best = d
            best_k = <int>k
    return best_k


cdef inline int _popcount(long v) noexcept nogil:
    cdef int c = 0
    while v:
        v &= v - 1
        c += 1
    return c


def count_bit_errors(
    const cplx[:, ::1] h0,
    const cplx[:, ::1] h1,
    const cplx[:, ::1] hhat0,
    const cplx[:, ::1] hhat1,
    const cplx[:, :, ::1] w_interf,
    const long[:, ::1] sym,
    const cplx[:, ::1] noise,
    const cplx[::1] points,
    bint use_coupled_gains,
):
    cdef Py_ssize_t trials = h0.shape[0]
    cdef Py_ssize_t n = h0.shape[1]
    cdef Py_ssize_t q = points.shape[0]
    cdef Py_ssize_t n_interf = w_interf.shape[1] // 2
    cdef Py_ssize_t t, j, i
    cdef cplx a0, a1, b0, b1, r0, r1, r1c, s0, s1, se, so, y0, y1
    cdef double g0, g1, gain
    cdef long errors = 0
    cdef int det0, det1

    with nogil:
        for t in range(trials):
            a0 = _cdot(h0, hhat0, t, n) / n
            a1 = _cdot(h1, hhat1, t, n) / n
            s0 = points[sym[t, 0]]
            s1 = points[sym[t, 1]]
            r0 = a0 * s0 + a1 * s1 + noise[t, 0]
            r1 = -a0 * s1.conjugate() + a1 * s0.conjugate() + noise[t, 1]
            for j in range(n_interf):
                b0 = 0
                b1 = 0
                for i in range(n):
                    b0 += w_interf[t, 2 * j, i].conjugate() * hhat0[t, i]
                    b1 += w_interf[t, 2 * j + 1, i].conjugate() * hhat1[t, i]
                se = points[sym[t, 2 * j + 2]]
                so = points[sym[t, 2 * j + 3]]
                r0 += b0 * se + b1 * so
                r1 += -b0 * so.conjugate() + b1 * se.conjugate()

            if use_coupled_gains:
                g0 = _norm2(hhat0, t, n)
                g1 = _norm2(hhat1, t, n)
            else:
                g0 = _norm2(h0, t, n)
                g1 = _norm2(h1, t, n)

            r1c = r1.conjugate()
            gain = (g0 * g0 + g1 * g1) / n
            y0 = (g0 * r0 + g1 * r1c) / gain
            y1 = (g1 * r0 - g0 * r1c) / gain
            det0 = _nearest(y0, points, q)
            det1 = _nearest(y1, points, q)
            errors += _popcount(det0 ^ sym[t, 0]) + _popcount(det1 ^ sym[t, 1])

    return int(errors)
