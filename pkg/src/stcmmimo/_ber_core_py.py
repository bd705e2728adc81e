"""Vectorized numpy fallback for the Monte-Carlo transceiver kernel.

Mirrors the compiled kernel in stcmmimo._ber_core; stcmmimo.kernels picks
whichever is available. Both accept pre-drawn randomness, so a run is
reproducible regardless of backend and worker count.
"""

import numpy as np


def count_bit_errors(
    h0: np.ndarray,  # (T, N) nominal branch-0 channels of the desired user
    h1: np.ndarray,  # (T, N)
    hhat0: np.ndarray,  # (T, N) effective branch channels (= nominal if uncoupled)
    hhat1: np.ndarray,  # (T, N)
    w_interf: np.ndarray,  # (T, 2*(K-1), N) interferer weight vectors
    sym: np.ndarray,  # (T, 2K) int64 bit labels, desired user's pair first
    noise: np.ndarray,  # (T, 2) complex receiver noise
    points: np.ndarray,  # (Q,) constellation indexed by bit label
    use_coupled_gains: bool,
) -> int:
    """Total bit errors of the desired user's two symbols over all trials."""
    n = h0.shape[1]
    s = points[sym]  # (T, 2K) symbols

    a0 = np.einsum("tn,tn->t", h0.conj(), hhat0) / n
    a1 = np.einsum("tn,tn->t", h1.conj(), hhat1) / n
    r0 = a0 * s[:, 0] + a1 * s[:, 1] + noise[:, 0]
    r1 = -a0 * s[:, 1].conj() + a1 * s[:, 0].conj() + noise[:, 1]
    for j in range(w_interf.shape[1] // 2):
        b0 = np.einsum("tn,tn->t", w_interf[:, 2 * j].conj(), hhat0)
        b1 = np.einsum("tn,tn->t", w_interf[:, 2 * j + 1].conj(), hhat1)
        r0 += b0 * s[:, 2 * j + 2] + b1 * s[:, 2 * j + 3]
        r1 += -b0 * s[:, 2 * j + 3].conj() + b1 * s[:, 2 * j + 2].conj()

    if use_coupled_gains:
        g0 = np.einsum("tn,tn->t", hhat0.conj(), hhat0).real
        g1 = np.einsum("tn,tn->t", hhat1.conj(), hhat1).real
    else:
        g0 = np.einsum("tn,tn->t", h0.conj(), h0).real
        g1 = np.einsum("tn,tn->t", h1.conj(), h1).real

    r1c = r1.conj()
    gain = (g0 * g0 + g1 * g1) / n
    y0 = (g0 * r0 + g1 * r1c) / gain
    y1 = (g1 * r0 - g0 * r1c) / gain

    det0 = _nearest(y0, points)
    det1 = _nearest(y1, points)
    popcnt = _popcount_table(points.size)
    errors = popcnt[det0 ^ sym[:, 0]] + popcnt[det1 ^ sym[:, 1]]
    return int(errors.sum())


def _nearest(y: np.ndarray, points: np.ndarray) -> np.ndarray:
    d2 = np.abs(y[:, None] - points[None, :]) ** 2
    return np.argmin(d2, axis=1)  # first index on ties = lowest bit label


def _popcount_table(order: int) -> np.ndarray:
    return np.array([bin(v).count("1") for v in range(order)], dtype=np.int64)
