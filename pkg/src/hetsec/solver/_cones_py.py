"""Pure-Python cone kernels (fallback for the compiled ``_cones_cy``).

All kernels act on the non-equality part of a slack vector: ``l``
nonnegative entries followed by second-order cone blocks of sizes ``q``.
Nesterov-Todd scaling is stored as

* ``d``    -- ``sqrt(s/z)`` for the orthant,
* ``eta``  -- one positive scale per SOC block,
* ``wbar`` -- the hyperbolic unit vector of each SOC block (``wbar' J wbar = 1``),

so that ``W = diag(d) (+) eta_k * Wbar_k`` with
``Wbar = [[w0, w1'], [w1, I + w1 w1'/(1 + w0)]]``.
"""

from __future__ import annotations

import numpy as np


def _blocks(l, q):
    off = l
    for qk in q:
        yield off, int(qk)
        off += int(qk)


def unit(l, q):
    e = np.zeros(l + int(np.sum(q)))
    e[:l] = 1.0
    for off, _ in _blocks(l, q):
        e[off] = 1.0
    return e


def nt_scaling(s, z, l, q):
    d = np.sqrt(s[:l] / z[:l])
    lam = np.empty_like(s)
    lam[:l] = np.sqrt(s[:l] * z[:l])
    eta = np.empty(len(q))
    wbar = np.empty(s.size - l)
    for k, (off, qk) in enumerate(_blocks(l, q)):
        sk = s[off:off + qk]
        zk = z[off:off + qk]
        s_nrm = np.sqrt(max(sk[0] ** 2 - sk[1:] @ sk[1:], 0.0))
        z_nrm = np.sqrt(max(zk[0] ** 2 - zk[1:] @ zk[1:], 0.0))
        sb = sk / s_nrm
        zb = zk / z_nrm
        gam = np.sqrt(0.5 * (1.0 + sb @ zb))
        w = np.empty(qk)
        w[0] = (sb[0] + zb[0]) / (2.0 * gam)
        w[1:] = (sb[1:] - zb[1:]) / (2.0 * gam)
        et = np.sqrt(s_nrm / z_nrm)
        eta[k] = et
        wbar[off - l:off - l + qk] = w
        lam[off:off + qk] = et * _wbar_apply(w, zk, False)
    return d, eta, wbar, lam


def _wbar_apply(w, v, inverse):
    w0, w1 = w[0], w[1:]
    v0, v1 = v[0], v[1:]
    t = w1 @ v1
    out = np.empty_like(v)
    if inverse:
        out[0] = w0 * v0 - t
        out[1:] = v1 + (t / (1.0 + w0) - v0) * w1
    else:
        out[0] = w0 * v0 + t
        out[1:] = v1 + (v0 + t / (1.0 + w0)) * w1
    return out


def apply_w(d, eta, wbar, l, q, v, inverse=False):
    """Return ``W v`` (or ``W^{-1} v``). ``W`` is symmetric."""
    out = np.empty_like(v)
    out[:l] = v[:l] / d if inverse else v[:l] * d
    for k, (off, qk) in enumerate(_blocks(l, q)):
        w = wbar[off - l:off - l + qk]
        blk = _wbar_apply(w, v[off:off + qk], inverse)
        out[off:off + qk] = blk / eta[k] if inverse else blk * eta[k]
    return out


def jordan_prod(u, v, l, q):
    out = np.empty_like(u)
    out[:l] = u[:l] * v[:l]
    for off, qk in _blocks(l, q):
        uk, vk = u[off:off + qk], v[off:off + qk]
        out[off] = uk @ vk
        out[off + 1:off + qk] = uk[0] * vk[1:] + vk[0] * uk[1:]
    return out


def jordan_div(lam, r, l, q):
    """Solve ``lam o x = r`` for ``x``."""
    out = np.empty_like(r)
    out[:l] = r[:l] / lam[:l]
    for off, qk in _blocks(l, q):
        lk, rk = lam[off:off + qk], r[off:off + qk]
        det = lk[0] ** 2 - lk[1:] @ lk[1:]
        x0 = (lk[0] * rk[0] - lk[1:] @ rk[1:]) / det
        out[off] = x0
        out[off + 1:off + qk] = (rk[1:] - x0 * lk[1:]) / lk[0]
    return out


def max_step(x, dx, l, q):
    """Largest ``a >= 0`` with ``x + a dx`` in the cone (``inf`` if unbounded).

    ``x`` must be strictly interior.
    """
    amax = np.inf
    if l:
        neg = dx[:l] < 0
        if np.any(neg):
            amax = float(np.min(-x[:l][neg] / dx[:l][neg]))
    for off, qk in _blocks(l, q):
        xk, dk = x[off:off + qk], dx[off:off + qk]
        nrm = np.sqrt(max(xk[0] ** 2 - xk[1:] @ xk[1:], 0.0))
        xb = xk / nrm
        db = dk / nrm
        # Lorentz boost sending xb to the identity element
        t = xb[1:] @ db[1:]
        u0 = xb[0] * db[0] - t
        u1 = db[1:] + (t / (1.0 + xb[0]) - db[0]) * xb[1:]
        rho = np.sqrt(u1 @ u1) - u0
        if rho > 0:
            amax = min(amax, 1.0 / rho)
    return amax


def wtw_dense(d, eta, wbar, l, q):
    """Dense ``W' W`` of the conic part (block diagonal)."""
    m = l + int(np.sum(q))
    H = np.zeros((m, m))
    idx = np.arange(l)
    H[idx, idx] = d * d
    for k, (off, qk) in enumerate(_blocks(l, q)):
        w = wbar[off - l:off - l + qk]
        blk = 2.0 * np.outer(w, w)
        blk[0, 0] -= 1.0
        blk[np.arange(1, qk), np.arange(1, qk)] += 1.0
        H[off:off + qk, off:off + qk] = eta[k] ** 2 * blk
    return H


def interior_margin(x, l, q):
    """Smallest 'eigenvalue' of ``x`` over all blocks (``x0 - ||x1||`` for SOC)."""
    vals = [np.inf]
    if l:
        vals.append(float(np.min(x[:l])))
    for off, qk in _blocks(l, q):
        xk = x[off:off + qk]
        vals.append(float(xk[0] - np.sqrt(xk[1:] @ xk[1:])))
    return min(vals)
