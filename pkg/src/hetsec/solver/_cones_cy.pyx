# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cone kernels; same contract as ``_cones_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY

cnp.import_array()


cdef inline double _dot(const double[::1] a, Py_ssize_t ia,
                        const double[::1] b, Py_ssize_t ib, Py_ssize_t n) nogil:
    cdef Py_ssize_t i
    cdef double acc = 0.0
    for i in range(n):
        acc += a[ia + i] * b[ib + i]
    return acc


def unit(Py_ssize_t l, q):
    cdef Py_ssize_t[::1] qv = np.ascontiguousarray(q, dtype=np.intp)
    cdef Py_ssize_t i, off = l, m = l
    for i in range(qv.shape[0]):
        m += qv[i]
    out = np.zeros(m)
    cdef double[::1] e = out
    for i in range(l):
        e[i] = 1.0
    for i in range(qv.shape[0]):
        e[off] = 1.0
        off += qv[i]
    return out


def nt_scaling(double[::1] s, double[::1] z, Py_ssize_t l, q):
    cdef Py_ssize_t[::1] qv = np.ascontiguousarray(q, dtype=np.intp)
    cdef Py_ssize_t r = qv.shape[0], m = s.shape[0]
    d_arr = np.empty(l)
    eta_arr = np.empty(r)
    wbar_arr = np.empty(m - l)
    lam_arr = np.empty(m)
    cdef double[::1] d = d_arr, eta = eta_arr, wbar = wbar_arr, lam = lam_arr
    cdef Py_ssize_t i, k, off = l, qk, wo
    cdef double s_nrm, z_nrm, ss, zz, sz, gam, et, w0, t, zb0
    for i in range(l):
        d[i] = sqrt(s[i] / z[i])
        lam[i] = sqrt(s[i] * z[i])
    for k in range(r):
        qk = qv[k]
        wo = off - l
        ss = s[off] * s[off] - _dot(s, off + 1, s, off + 1, qk - 1)
        zz = z[off] * z[off] - _dot(z, off + 1, z, off + 1, qk - 1)
        s_nrm = sqrt(ss if ss > 0.0 else 0.0)
        z_nrm = sqrt(zz if zz > 0.0 else 0.0)
        sz = _dot(s, off, z, off, qk) / (s_nrm * z_nrm)
        gam = sqrt(0.5 * (1.0 + sz))
        wbar[wo] = (s[off] / s_nrm + z[off] / z_nrm) / (2.0 * gam)
        for i in range(1, qk):
            wbar[wo + i] = (s[off + i] / s_nrm - z[off + i] / z_nrm) / (2.0 * gam)
        et = sqrt(s_nrm / z_nrm)
        eta[k] = et
        # lam = eta * Wbar z
        w0 = wbar[wo]
        t = 0.0
        for i in range(1, qk):
            t += wbar[wo + i] * z[off + i]
        lam[off] = et * (w0 * z[off] + t)
        zb0 = z[off] + t / (1.0 + w0)
        for i in range(1, qk):
            lam[off + i] = et * (z[off + i] + zb0 * wbar[wo + i])
        off += qk
    return d_arr, eta_arr, wbar_arr, lam_arr


def apply_w(double[::1] d, double[::1] eta, double[::1] wbar, Py_ssize_t l, q,
            double[::1] v, bint inverse=False):
    cdef Py_ssize_t[::1] qv = np.ascontiguousarray(q, dtype=np.intp)
    cdef Py_ssize_t m = v.shape[0]
    out_arr = np.empty(m)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, k, off = l, qk, wo
    cdef double w0, t, coef, sc
    for i in range(l):
        out[i] = v[i] / d[i] if inverse else v[i] * d[i]
    for k in range(qv.shape[0]):
        qk = qv[k]
        wo = off - l
        w0 = wbar[wo]
        t = 0.0
        for i in range(1, qk):
            t += wbar[wo + i] * v[off + i]
        if inverse:
            sc = 1.0 / eta[k]
            out[off] = sc * (w0 * v[off] - t)
            coef = t / (1.0 + w0) - v[off]
        else:
            sc = eta[k]
            out[off] = sc * (w0 * v[off] + t)
            coef = v[off] + t / (1.0 + w0)
        for i in range(1, qk):
            out[off + i] = sc * (v[off + i] + coef * wbar[wo + i])
        off += qk
    return out_arr


def jordan_prod(double[::1] u, double[::1] v, Py_ssize_t l, q):
    cdef Py_ssize_t[::1] qv = np.ascontiguousarray(q, dtype=np.intp)
    out_arr = np.empty(u.shape[0])
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, k, off = l, qk
    for i in range(l):
        out[i] = u[i] * v[i]
    for k in range(qv.shape[0]):
        qk = qv[k]
        out[off] = _dot(u, off, v, off, qk)
        for i in range(1, qk):
            out[off + i] = u[off] * v[off + i] + v[off] * u[off + i]
        off += qk
    return out_arr


def jordan_div(double[::1] lam, double[::1] r, Py_ssize_t l, q):
    cdef Py_ssize_t[::1] qv = np.ascontiguousarray(q, dtype=np.intp)
    out_arr = np.empty(r.shape[0])
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, k, off = l, qk
    cdef double det, x0
    for i in range(l):
        out[i] = r[i] / lam[i]
    for k in range(qv.shape[0]):
        qk = qv[k]
        det = lam[off] * lam[off] - _dot(lam, off + 1, lam, off + 1, qk - 1)
        x0 = (lam[off] * r[off] - _dot(lam, off + 1, r, off + 1, qk - 1)) / det
        out[off] = x0
        for i in range(1, qk):
            out[off + i] = (r[off + i] - x0 * lam[off + i]) / lam[off]
        off += qk
    return out_arr


def max_step(double[::1] x, double[::1] dx, Py_ssize_t l, q):
    cdef Py_ssize_t[::1] qv = np.ascontiguousarray(q, dtype=np.intp)
    cdef double amax = INFINITY, a, nrm, xx, t, u0, uu, ui, coef, rho
    cdef Py_ssize_t i, k, off = l, qk
    for i in range(l):
        if dx[i] < 0.0:
            a = -x[i] / dx[i]
            if a < amax:
                amax = a
    for k in range(qv.shape[0]):
        qk = qv[k]
        xx = x[off] * x[off] - _dot(x, off + 1, x, off + 1, qk - 1)
        nrm = sqrt(xx if xx > 0.0 else 0.0)
        t = _dot(x, off + 1, dx, off + 1, qk - 1) / (nrm * nrm)
        u0 = x[off] * dx[off] / (nrm * nrm) - t
        coef = t / (1.0 + x[off] / nrm) - dx[off] / nrm
        uu = 0.0
        for i in range(1, qk):
            ui = dx[off + i] / nrm + coef * x[off + i] / nrm
            uu += ui * ui
        rho = sqrt(uu) - u0
        if rho > 0.0 and 1.0 / rho < amax:
            amax = 1.0 / rho
        off += qk
    return amax


def wtw_dense(double[::1] d, double[::1] eta, double[::1] wbar, Py_ssize_t l, q):
    cdef Py_ssize_t[::1] qv = np.ascontiguousarray(q, dtype=np.intp)
    cdef Py_ssize_t m = l, i, j, k, off = l, qk, wo
    for k in range(qv.shape[0]):
        m += qv[k]
    H_arr = np.zeros((m, m))
    cdef double[:, ::1] H = H_arr
    cdef double e2
    for i in range(l):
        H[i, i] = d[i] * d[i]
    for k in range(qv.shape[0]):
        qk = qv[k]
        wo = off - l
        e2 = eta[k] * eta[k]
        for i in range(qk):
            for j in range(qk):
                H[off + i, off + j] = 2.0 * e2 * wbar[wo + i] * wbar[wo + j]
        H[off, off] -= e2
        for i in range(1, qk):
            H[off + i, off + i] += e2
        off += qk
    return H_arr


def interior_margin(double[::1] x, Py_ssize_t l, q):
    cdef Py_ssize_t[::1] qv = np.ascontiguousarray(q, dtype=np.intp)
    cdef double best = INFINITY, v
    cdef Py_ssize_t i, k, off = l, qk
    for i in range(l):
        if x[i] < best:
            best = x[i]
    for k in range(qv.shape[0]):
        qk = qv[k]
        v = x[off] - sqrt(_dot(x, off + 1, x, off + 1, qk - 1))
        if v < best:
            best = v
        off += qk
    return best
