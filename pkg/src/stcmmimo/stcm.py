"""The 2x1 Alamouti transceiver with Hermitian (matched-filter) precoding.

Slot protocol: branch 0 sends s0 then -conj(s1), branch 1 sends s1 then
conj(s0). Precoding weight of each branch is its own nominal channel
divided by N; the effective (possibly coupled) channel enters only through
the propagation terms. The combiner weights are the nominal branch norms by
default: the receiver is not assumed to know the coupling matrix, and that
mismatch is exactly the modeled degradation.
"""

from dataclasses import dataclass

import numpy as np

from .modulation import ModulationScheme


@dataclass(frozen=True)
class ReceivedPair:
    """Received scalars in slots t and t+T."""

    r0: complex
    r1: complex


@dataclass(frozen=True)
class CombinedPair:
    """Branch-combined decision statistics for the two symbols."""

    s0_stat: complex
    s1_stat: complex


def precoding_weights(h_branch: np.ndarray) -> np.ndarray:
    """Matched-filter transmit weights w = h / N for one branch."""
    h = np.asarray(h_branch)
    return h / h.shape[0]


def transmit_pair(
    s0: complex,
    s1: complex,
    h0: np.ndarray,
    h1: np.ndarray,
    hhat0: np.ndarray | None = None,
    hhat1: np.ndarray | None = None,
    interferers=(),
    noise=(0.0, 0.0),
) -> ReceivedPair:
    """Received pair for one Alamouti transmission.

    h0, h1: nominal branch channels (define the desired user's weights).
    hhat0, hhat1: effective branch channels seen over the air; default to
        the nominal ones (coupling disabled).
    interferers: iterable of (w_even, w_odd, s_even, s_odd) tuples; the
        weight vectors belong to the interfering users, the propagation
        channel is still the desired user's.
    noise: additive receiver noise (n0, n1).
    """
    h0 = np.asarray(h0)
    h1 = np.asarray(h1)
    hhat0 = h0 if hhat0 is None else np.asarray(hhat0)
    hhat1 = h1 if hhat1 is None else np.asarray(hhat1)
    if not (h0.shape == h1.shape == hhat0.shape == hhat1.shape):
        raise ValueError("branch channel vectors must share one shape")

    w0 = precoding_weights(h0)
    w1 = precoding_weights(h1)
    a0 = np.vdot(w0, hhat0)
    a1 = np.vdot(w1, hhat1)
    r0 = a0 * s0 + a1 * s1
    r1 = -a0 * np.conj(s1) + a1 * np.conj(s0)
    for w_even, w_odd, s_even, s_odd in interferers:
        w_even = np.asarray(w_even)
        w_odd = np.asarray(w_odd)
        if w_even.shape != h0.shape or w_odd.shape != h0.shape:
            raise ValueError("interferer weight vectors must match branch shape")
        b0 = np.vdot(w_even, hhat0)
        b1 = np.vdot(w_odd, hhat1)
        r0 += b0 * s_even + b1 * s_odd
        r1 += -b0 * np.conj(s_odd) + b1 * np.conj(s_even)
    return ReceivedPair(r0=complex(r0 + noise[0]), r1=complex(r1 + noise[1]))


def combine(received: ReceivedPair, g0: float, g1: float) -> CombinedPair:
    """Two-branch Alamouti combining with gains g0 = |h0|^2, g1 = |h1|^2."""
    if g0 < 0 or g1 < 0:
        raise ValueError("combining gains must be nonnegative")
    r1c = np.conj(received.r1)
    return CombinedPair(
        s0_stat=complex(g0 * received.r0 + g1 * r1c),
        s1_stat=complex(g1 * received.r0 - g0 * r1c),
    )


def detect(
    combined: CombinedPair,
    g0: float,
    g1: float,
    n_elements: int,
    scheme: ModulationScheme,
) -> tuple[int, int]:
    """Nearest-neighbor decisions on the gain-normalized statistics.

    Normalizes by G = (g0^2 + g1^2) / N, the exact combined gain of the
    coupling-free system, then picks the closest constellation point;
    exact ties go to the lowest bit label.
    """
    if g0 + g1 <= 0:
        raise ValueError("detect requires g0 + g1 > 0")
    gain = (g0 * g0 + g1 * g1) / n_elements
    return (
        _nearest(combined.s0_stat / gain, scheme),
        _nearest(combined.s1_stat / gain, scheme),
    )


def _nearest(y: complex, scheme: ModulationScheme) -> int:
    d2 = np.abs(y - scheme.points) ** 2
    return int(np.argmin(d2))  # argmin keeps the first (lowest) label on ties
