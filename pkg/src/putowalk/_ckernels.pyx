# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: lattice stage application and batched Jacobi SVD.

Same contracts as :mod:`putowalk._pykernels`.
"""

import numpy as np

from libc.math cimport sqrt, hypot

NAME = "cython"


def apply_stage(psi, out, blocks, offsets, starts, stops):
    # work on float64 views (re, im interleaved) so no complex helpers are called
    cdef double[:, ::1] src = np.asarray(psi).view(np.float64)
    cdef double[:, ::1] dst = np.asarray(out).view(np.float64)
    barr = np.ascontiguousarray(blocks, dtype=np.complex128)
    cdef double[:, :, ::1] blk = barr.view(np.float64)
    cdef Py_ssize_t[::1] offs = np.ascontiguousarray(offsets, dtype=np.intp)
    cdef Py_ssize_t[::1] rlo = np.ascontiguousarray(starts, dtype=np.intp)
    cdef Py_ssize_t[::1] rhi = np.ascontiguousarray(stops, dtype=np.intp)
    # projection-times-coin blocks are mostly zero rows; visit only the others
    live = np.nonzero(np.any(barr != 0, axis=2))
    cdef Py_ssize_t[::1] pk = np.ascontiguousarray(live[0], dtype=np.intp)
    cdef Py_ssize_t[::1] pr = np.ascontiguousarray(live[1], dtype=np.intp)
    cdef Py_ssize_t npairs = pk.shape[0]
    cdef Py_ssize_t nranges = rlo.shape[0]
    cdef Py_ssize_t width = src.shape[1]
    cdef Py_ssize_t q, i, j, k, r, c, t
    cdef double re, im, br, bi, vr, vi
    cdef bint empty
    with nogil:
        for q in range(nranges):
            for i in range(rlo[q], rhi[q]):
                empty = True
                for c in range(width):
                    if src[i, c] != 0.0:
                        empty = False
                        break
                if empty:
                    continue
                for j in range(npairs):
                    k = pk[j]
                    r = pr[j]
                    re = 0.0
                    im = 0.0
                    for c in range(0, width, 2):
                        br = blk[k, r, c]
                        bi = blk[k, r, c + 1]
                        vr = src[i, c]
                        vi = src[i, c + 1]
                        re = re + br * vr - bi * vi
                        im = im + br * vi + bi * vr
                    t = i + offs[k]
                    dst[t, 2 * r] += re
                    dst[t, 2 * r + 1] += im


cdef void _jacobi_columns(double[:, ::1] a, Py_ssize_t m, Py_ssize_t n,
                          double[::1] norms) noexcept nogil:
    # One-sided (Hestenes) Jacobi on complex columns stored as (re, im) pairs:
    # rotate column pairs until orthogonal; the column norms are then the
    # singular values.
    cdef Py_ssize_t sweep, p, q, i, pr, pi, qr, qi
    cdef double alpha, beta, gr, gi, g, zeta, t, c, s, hr, hi, apr, api, aqr, aqi, off
    cdef bint rotated
    for sweep in range(80):
        rotated = False
        for p in range(n - 1):
            pr = 2 * p
            pi = pr + 1
            for q in range(p + 1, n):
                qr = 2 * q
                qi = qr + 1
                alpha = 0.0
                beta = 0.0
                gr = 0.0
                gi = 0.0
                for i in range(m):
                    alpha += a[i, pr] * a[i, pr] + a[i, pi] * a[i, pi]
                    beta += a[i, qr] * a[i, qr] + a[i, qi] * a[i, qi]
                    # conj(a_p) * a_q
                    gr += a[i, pr] * a[i, qr] + a[i, pi] * a[i, qi]
                    gi += a[i, pr] * a[i, qi] - a[i, pi] * a[i, qr]
                g = hypot(gr, gi)
                if g == 0.0 or g <= 1e-15 * sqrt(alpha * beta):
                    continue
                rotated = True
                # phase conj(gamma) / |gamma| aligns a_q with a_p
                hr = gr / g
                hi = -gi / g
                zeta = (beta - alpha) / (2.0 * g)
                if zeta >= 0.0:
                    t = 1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = c * t
                for i in range(m):
                    apr = a[i, pr]
                    api = a[i, pi]
                    aqr = a[i, qr] * hr - a[i, qi] * hi
                    aqi = a[i, qr] * hi + a[i, qi] * hr
                    a[i, pr] = c * apr - s * aqr
                    a[i, pi] = c * api - s * aqi
                    a[i, qr] = s * apr + c * aqr
                    a[i, qi] = s * api + c * aqi
        if not rotated:
            break
    for p in range(n):
        off = 0.0
        for i in range(m):
            off += a[i, 2 * p] * a[i, 2 * p] + a[i, 2 * p + 1] * a[i, 2 * p + 1]
        norms[p] = sqrt(off)


def extreme_singular_values(mats):
    mats = np.asarray(mats, dtype=np.complex128)
    if mats.ndim != 3:
        raise ValueError("expected a (n, rows, cols) batch")
    cdef Py_ssize_t count = mats.shape[0]
    cdef Py_ssize_t rows = mats.shape[1], cols = mats.shape[2]
    if rows < cols:
        mats = np.conj(np.swapaxes(mats, 1, 2))
        rows, cols = cols, rows
    cdef double[:, :, ::1] batch = np.ascontiguousarray(mats).view(np.float64)
    cdef double[:, ::1] work = np.empty((rows, 2 * cols))
    cdef double[::1] norms = np.empty(cols)
    smin_arr = np.empty(count)
    smax_arr = np.empty(count)
    cdef double[::1] smin = smin_arr
    cdef double[::1] smax = smax_arr
    cdef Py_ssize_t k, i, j
    cdef double lo, hi
    with nogil:
        for k in range(count):
            for i in range(rows):
                for j in range(2 * cols):
                    work[i, j] = batch[k, i, j]
            _jacobi_columns(work, rows, cols, norms)
            lo = norms[0]
            hi = norms[0]
            for j in range(1, cols):
                if norms[j] < lo:
                    lo = norms[j]
                if norms[j] > hi:
                    hi = norms[j]
            smin[k] = lo
            smax[k] = hi
    return smin_arr, smax_arr
