"""Integer-order Bessel functions J_k(x) for all orders at once.

Miller's backward recurrence

    J_{k-1}(x) = (2k/x) J_k(x) - J_{k+1}(x)

started far above the turning point k ~ |x|, where J_k is negligible. The
unnormalized sequence is scaled so that sum_k J_k(x)^2 = 1 over all integer
k, which makes the kick operator built from it unitary to rounding; the sign
is fixed by the identity J_0 + 2 sum J_{2k} = 1.
"""

from __future__ import annotations

import math

import numpy as np

_RESCALE = 1e100
# Below this the recurrence ratio 2k/x can overflow; the power series
# converges in a handful of terms instead.
_SERIES_BELOW = 1e-3


def _series(ax: float, kmax: int) -> np.ndarray:
    h = 0.5 * ax
    out = np.zeros(kmax + 1)
    lead = 1.0  # (x/2)^k / k!
    for k in range(kmax + 1):
        if lead == 0.0:
            break
        term, total, m = lead, lead, 0
        while abs(term) > 1e-18 * abs(total):
            m += 1
            term *= -h * h / (m * (m + k))
            total += term
        out[k] = total
        lead *= h / (k + 1)
    return out


def _start_order(x: float, kmax: int) -> int:
    # Past k ~ x the decay is governed by an Airy scale x**(1/3).
    return int(max(kmax, x) + 12.0 * max(x, 1.0) ** (1.0 / 3.0) + 40)


def bessel_j_orders(x: float, kmax: int) -> np.ndarray:
    """Return ``[J_0(x), ..., J_kmax(x)]``.

    Accurate to a few ulps relative to max|J_k| for the argument range used
    by the engines (|x| up to several thousand).
    """
    if kmax < 0:
        raise ValueError("kmax must be >= 0")
    x = float(x)
    out = np.zeros(kmax + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    ax = abs(x)
    if ax < _SERIES_BELOW:
        out[:] = _series(ax, kmax)
        if x < 0:
            out[1::2] *= -1.0
        return out
    start = _start_order(ax, kmax)
    vals = np.zeros(start + 2)
    vals[start] = 1.0
    for k in range(start, 0, -1):
        vals[k - 1] = (2.0 * k / ax) * vals[k] - vals[k + 1]
        if abs(vals[k - 1]) > _RESCALE:
            vals[k - 1 :] /= _RESCALE
    vals /= np.max(np.abs(vals))
    sq = vals[0] ** 2 + 2.0 * np.sum(vals[1:] ** 2)
    even = vals[0] + 2.0 * np.sum(vals[2::2])
    scale = math.copysign(1.0 / math.sqrt(sq), even)
    out[:] = vals[: kmax + 1] * scale
    if x < 0:
        out[1::2] *= -1.0
    return out


def bessel_band(x: float, cutoff: float = 1e-16) -> np.ndarray:
    """Return ``J_k(x)`` for k = -K..K, trimmed where |J_k| < cutoff.

    The returned array has odd length 2K+1 with ``J_0`` at index K.
    """
    ax = abs(float(x))
    kmax = _start_order(ax, 0)
    pos = bessel_j_orders(x, kmax)
    big = np.nonzero(np.abs(pos) >= cutoff)[0]
    K = int(big[-1]) if big.size else 0
    pos = pos[: K + 1]
    neg = pos[:0:-1] * np.where(np.arange(K, 0, -1) % 2 == 0, 1.0, -1.0)
    return np.concatenate([neg, pos])
