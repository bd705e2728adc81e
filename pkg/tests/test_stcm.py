"""Transceiver tests: precoding, two-slot code structure, combining, detection."""

import numpy as np
import pytest

from stcmmimo.channel import draw_channel
from stcmmimo.coupling import DipoleArraySpec, coupling_matrix
from stcmmimo.modulation import ModulationScheme, bits_for_label
from stcmmimo.stcm import (
    CombinedPair,
    ReceivedPair,
    combine,
    detect,
    precoding_weights,
    transmit_pair,
)

QPSK = ModulationScheme.qpsk()


class TestPrecodingWeights:
    def test_example(self):
        assert np.array_equal(precoding_weights(np.array([2.0, 0.0])), [1.0, 0.0])

    def test_inner_product_identity(self):
        h = draw_channel(np.random.default_rng(2), 6)
        w = precoding_weights(h)
        assert np.vdot(w, h) == pytest.approx(np.vdot(h, h).real / 6, abs=1e-12)

    def test_zero_vector(self):
        assert np.array_equal(precoding_weights(np.zeros(3)), np.zeros(3))


class TestTransmitPair:
    def test_scalar_hand_case(self):
        r = transmit_pair(1.0, 1j, np.array([1.0]), np.array([1.0]))
        assert r.r0 == pytest.approx(1 + 1j)
        assert r.r1 == pytest.approx(1 + 1j)  # -conj(1j) + conj(1) = 1j + 1

    def test_coupling_free_coefficients_are_branch_gains(self):
        rng = np.random.default_rng(8)
        h0 = draw_channel(rng, 5)
        h1 = draw_channel(rng, 5)
        a0 = np.vdot(h0, h0).real / 5
        a1 = np.vdot(h1, h1).real / 5
        s0, s1 = QPSK.points[2], QPSK.points[1]
        r = transmit_pair(s0, s1, h0, h1)
        assert r.r0 == pytest.approx(a0 * s0 + a1 * s1, abs=1e-12)
        assert r.r1 == pytest.approx(-a0 * np.conj(s1) + a1 * np.conj(s0), abs=1e-12)

    def test_effective_gains_real_nonnegative_without_coupling(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            h = draw_channel(rng, 4)
            w = precoding_weights(h)
            gain = np.vdot(w, h)
            assert gain.real >= 0
            assert abs(gain.imag) < 1e-12 * max(1.0, abs(gain))

    def test_conjugate_slot_structure(self):
        rng = np.random.default_rng(21)
        h0 = draw_channel(rng, 3)
        h1 = draw_channel(rng, 3)
        s0, s1 = 0.3 - 0.7j, -1.1 + 0.2j
        direct = transmit_pair(s0, s1, h0, h1).r1
        swapped = transmit_pair(-np.conj(s1), np.conj(s0), h0, h1).r0
        assert direct == pytest.approx(swapped, abs=1e-14)

    def test_coupled_scalar_oracle(self):
        # M=2, one element per branch: recompute with plain scalar arithmetic
        spec = DipoleArraySpec(2, 0.5)
        c = coupling_matrix(spec).entries
        h = np.array([1.0 + 0.5j, -0.3 + 0.2j])
        hhat = c @ h
        s0, s1 = QPSK.points[3], QPSK.points[0]
        r = transmit_pair(
            s0, s1, h[:1], h[1:], hhat0=hhat[:1], hhat1=hhat[1:]
        )
        a0 = complex(h[0]).conjugate() * complex(hhat[0])  # N = 1
        a1 = complex(h[1]).conjugate() * complex(hhat[1])
        assert r.r0 == pytest.approx(a0 * s0 + a1 * s1, abs=1e-12)
        assert r.r1 == pytest.approx(-a0 * s1.conjugate() + a1 * s0.conjugate(), abs=1e-12)

    def test_interferer_terms_scalar_oracle(self):
        h0 = np.array([1.0 + 1j])
        h1 = np.array([0.5 - 0.25j])
        w_even = np.array([0.2 + 0.1j])
        w_odd = np.array([-0.4 + 0.3j])
        s = QPSK.points
        r = transmit_pair(
            s[0], s[1], h0, h1, interferers=[(w_even, w_odd, s[2], s[3])]
        )
        a0 = complex(h0[0]).conjugate() * complex(h0[0])
        a1 = complex(h1[0]).conjugate() * complex(h1[0])
        b0 = complex(w_even[0]).conjugate() * complex(h0[0])
        b1 = complex(w_odd[0]).conjugate() * complex(h1[0])
        exp_r0 = a0 * s[0] + a1 * s[1] + b0 * s[2] + b1 * s[3]
        exp_r1 = (
            -a0 * s[1].conjugate()
            + a1 * s[0].conjugate()
            - b0 * s[3].conjugate()
            + b1 * s[2].conjugate()
        )
        assert r.r0 == pytest.approx(exp_r0, abs=1e-12)
        assert r.r1 == pytest.approx(exp_r1, abs=1e-12)

    def test_noise_is_added(self):
        r = transmit_pair(1.0, 1.0, np.array([1.0]), np.array([1.0]), noise=(1j, -2.0))
        assert r.r0 == pytest.approx(2 + 1j)
        assert r.r1 == pytest.approx(-2.0)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            transmit_pair(1.0, 1.0, np.zeros(2), np.zeros(3))


class TestCombine:
    def test_zero_input(self):
        c = combine(ReceivedPair(0.0, 0.0), 1.0, 2.0)
        assert c.s0_stat == 0 and c.s1_stat == 0

    def test_scalar_alamouti_cancellation(self):
        s0, s1 = 0.6 + 0.2j, -0.3 + 0.9j
        r = transmit_pair(s0, s1, np.array([1.0]), np.array([1.0]))
        c = combine(r, 1.0, 1.0)
        assert c.s0_stat == pytest.approx(2 * s0, abs=1e-12)
        assert c.s1_stat == pytest.approx(2 * s1, abs=1e-12)

    def test_combined_statistic_closed_form(self):
        rng = np.random.default_rng(31)
        n = 7
        h0 = draw_channel(rng, n)
        h1 = draw_channel(rng, n)
        g0 = np.vdot(h0, h0).real
        g1 = np.vdot(h1, h1).real
        s0, s1 = QPSK.points[1], QPSK.points[2]
        c = combine(transmit_pair(s0, s1, h0, h1), g0, g1)
        expected = (g0 * g0 + g1 * g1) / n
        assert c.s0_stat == pytest.approx(expected * s0, rel=1e-10)
        assert c.s1_stat == pytest.approx(expected * s1, rel=1e-10)

    def test_cross_symbol_cancellation(self):
        rng = np.random.default_rng(17)
        h0 = draw_channel(rng, 4)
        h1 = draw_channel(rng, 4)
        g0 = np.vdot(h0, h0).real
        g1 = np.vdot(h1, h1).real
        s0 = QPSK.points[0]
        stats = [
            combine(transmit_pair(s0, s1, h0, h1), g0, g1).s0_stat
            for s1 in QPSK.points
        ]
        ref = abs(stats[0])
        for v in stats[1:]:
            assert abs(v - stats[0]) < 1e-10 * ref

    def test_negative_gain_rejected(self):
        with pytest.raises(ValueError):
            combine(ReceivedPair(1.0, 1.0), -1.0, 1.0)


class TestDetect:
    def test_scaled_constellation_point_recovered(self):
        g0, g1, n = 3.0, 2.0, 4
        gain = (g0 * g0 + g1 * g1) / n
        for label, pt in enumerate(QPSK.points):
            c = CombinedPair(gain * pt, gain * QPSK.points[0])
            assert detect(c, g0, g1, n, QPSK)[0] == label

    def test_qpsk_decision_is_quadrant_only(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            y = complex(*rng.standard_normal(2))
            c = CombinedPair(y, y)
            label = detect(c, 1.0, 1.0, 2, QPSK)[0]
            pt = QPSK.points[label]
            assert np.sign(pt.real) == np.sign(y.real) or y.real == 0
            assert np.sign(pt.imag) == np.sign(y.imag) or y.imag == 0

    def test_tie_breaks_to_lowest_label(self):
        # the origin ties all four QPSK points
        assert detect(CombinedPair(0.0, 0.0), 1.0, 1.0, 2, QPSK) == (0, 0)

    def test_requires_positive_gain_sum(self):
        with pytest.raises(ValueError):
            detect(CombinedPair(1.0, 1.0), 0.0, 0.0, 2, QPSK)


@pytest.mark.parametrize("m", [2, 10])
def test_exact_decode_noiseless(m):
    """Coupling off, zero noise: the transceiver decodes perfectly."""
    rng = np.random.default_rng(99)
    n = m // 2
    errors = 0
    for _ in range(2000):
        h = draw_channel(rng, m)
        h0, h1 = h[:n], h[n:]
        labels = rng.integers(0, 4, size=2)
        s0, s1 = QPSK.points[labels[0]], QPSK.points[labels[1]]
        g0 = np.vdot(h0, h0).real
        g1 = np.vdot(h1, h1).real
        det = detect(combine(transmit_pair(s0, s1, h0, h1), g0, g1), g0, g1, n, QPSK)
        errors += np.sum(bits_for_label(det[0] ^ labels[0], QPSK))
        errors += np.sum(bits_for_label(det[1] ^ labels[1], QPSK))
    assert errors == 0
