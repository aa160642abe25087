"""Convex restrictions used by the SCA subproblem.

Complex beamformers are handled in real-lifted coordinates
``[Re w; Im w]`` so that ``a^H w`` is a pair of linear forms.
"""

from __future__ import annotations

import math

import numpy as np

from .forms import Affine


def real_lift(a) -> np.ndarray:
    """``L`` with ``L @ [Re w; Im w] = [Re(a^H w), Im(a^H w)]``."""
    a = np.asarray(a, dtype=complex)
    ar, ai = a.real, a.imag
    return np.vstack([np.concatenate([ar, ai]), np.concatenate([-ai, ar])])


def lift_vector(w) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    return np.concatenate([w.real, w.imag])


def inner_forms(a, start: int) -> tuple[Affine, Affine]:
    """``Re(a^H w)`` and ``Im(a^H w)`` for ``w`` lifted at ``start``."""
    L = real_lift(a)
    return Affine.block(start, L[0]), Affine.block(start, L[1])


def taylor_quadratic_minorant(a, w_tilde):
    """Coefficients ``(g, k)`` of the tangent lower bound of ``|a^H w|^2`` at ``w_tilde``.

    ``g @ [Re w; Im w] + k = 2 Re(w~^H a a^H w) - |a^H w~|^2``.
    """
    p = np.vdot(a, w_tilde)
    g = 2.0 * (p.real * real_lift(a)[0] + p.imag * real_lift(a)[1])
    return g, -abs(p) ** 2


def taylor_form(a, w_tilde, start: int) -> Affine:
    g, k = taylor_quadratic_minorant(a, w_tilde)
    return Affine.block(start, g) + k


def quad_over_lin_minorant(mu_t: float, eta_t: float) -> tuple[float, float]:
    """Coefficients ``(a, b)`` of ``a*mu + b*eta``, the tangent bound of ``mu^2/eta``."""
    if eta_t <= 0:
        raise ValueError("expansion point needs eta > 0")
    r = mu_t / eta_t
    return 2.0 * r, -r * r


def lemma1_rows(z, x, y, balance: float = 1.0) -> list:
    """SOC rows for ``||z||^2 <= x*y`` (with ``x, y >= 0``).

    ``z`` is a form or a list of forms.  The product is split as
    ``(x/balance) * (y*balance)``; choosing ``balance ~ sqrt(x/y)`` keeps both
    factors of similar size and avoids cancellation in ``x + y`` vs ``x - y``.
    """
    zs = z if isinstance(z, (list, tuple)) else [z]
    xb = x * (1.0 / balance)
    yb = y * balance
    return [xb + yb] + [2.0 * zi for zi in zs] + [xb - yb]


def taylor4_exp(u: float) -> float:
    return 1.0 + u + u * u / 2.0 + u ** 3 / 6.0 + u ** 4 / 24.0


def exp_block_magnitudes(q: int, c_hint: float, base: float = 2.0) -> list:
    """Expected size of ``tau_0 .. tau_{q+3}`` when ``c = c_hint`` (for scaling)."""
    uh = c_hint * math.log(base) / 2.0 ** q
    mag = [0.0] * (q + 4)
    mag[1] = max((1.0 + uh) ** 2, 1e-6)
    mag[2] = max((5.0 / 6.0 + uh / 2.0) ** 2, 1e-6)
    mag[3] = mag[1] ** 2
    mag[4] = max(taylor4_exp(uh), 1e-6)
    for j in range(5, q + 4):
        mag[j] = min(mag[j - 1] ** 2, 1e150)
    mag[0] = min(mag[q + 3] ** 2, 1e300)
    return mag


def exp_soc_block(q: int, c: Affine, gamma_i: Affine, taus: list, c_hint: float = 0.0,
                  base: float = 2.0):
    """Conic chain approximating ``1 + gamma_i >= base**c``.

    Returns ``(nonneg_rows, soc_blocks)``.  With ``u = c ln(base) / 2^q`` the
    seeded cones give ``tau1 >= (1+u)^2`` and ``tau2 >= (5/6 + u/2)^2``, the
    linear row turns ``tau2 + tau3/24 + 19/72`` into the fourth-order Taylor
    polynomial of ``exp(u)`` and ``q`` squarings raise it to ``2^q``.
    ``c_hint`` only sets the balancing of each hyperbolic cone; callers
    should scale the ``tau`` variables by ``exp_block_magnitudes`` too.
    """
    if q < 2:
        raise ValueError("exp approximation order q must be >= 2")
    if len(taus) != q + 4:
        raise ValueError(f"need q + 4 = {q + 4} tau variables")
    lb = math.log(base)
    u = c * (lb / 2.0 ** q)
    one = Affine.constant(1.0)
    mag = exp_block_magnitudes(q, c_hint, base)

    def bal(j):
        return math.sqrt(mag[j])

    nonneg = [
        (one + gamma_i) - taus[0],
        taus[4] - taus[2] - taus[3] * (1.0 / 24.0) - 19.0 / 72.0,
    ]
    socs = [
        lemma1_rows(one + u, taus[1], one, bal(1)),
        lemma1_rows(one * (5.0 / 6.0) + u * 0.5, taus[2], one, bal(2)),
        lemma1_rows(taus[1], taus[3], one, bal(3)),
    ]
    for j in range(5, q + 4):
        socs.append(lemma1_rows(taus[j - 1], taus[j], one, bal(j)))
    socs.append(lemma1_rows(taus[q + 3], taus[0], one, bal(0)))
    return nonneg, socs
