"""Effective two-hop channel construction, amplification factor, relay choice."""

import numpy as np
import numpy.testing as npt
import pytest

from relaymi import RelayNetworkParams, amplification_factor, effective_channel, select_relay

SNR_3DB = 10.0 ** 0.3


def reference_params(ps=SNR_3DB, pr=SNR_3DB, block_length=1):
    """The single-relay network used throughout the experiments."""
    return RelayNetworkParams(
        h_direct=0.4 + 0j,
        relays=((1.2 + 0j, -0.9j),),
        ps=ps,
        pr=pr,
        block_length=block_length,
    )


class TestAmplificationFactor:
    def test_noise_only_forwarding(self):
        # nothing received from the source: the relay spends pr on pure noise
        p = 2.5
        npt.assert_allclose(amplification_factor(p, p, 0.0), np.sqrt(p), rtol=1e-14)

    def test_matches_scalar_arithmetic(self):
        ps = pr = SNR_3DB
        expected = np.sqrt(pr / (ps * 1.2**2 + 1.0))
        npt.assert_allclose(amplification_factor(ps, pr, 1.2), expected, rtol=1e-14)

    def test_silent_relay(self):
        assert amplification_factor(1.0, 0.0, 1.2) == 0.0

    def test_rejects_nonpositive_source_power(self):
        with pytest.raises(ValueError, match="ps"):
            amplification_factor(0.0, 1.0, 1.0)


class TestEffectiveChannel:
    def test_reference_channel_entries(self):
        ch = effective_channel(reference_params(), 0)
        ps = SNR_3DB
        b = np.sqrt(ps / (ps * 1.44 + 1.0))
        nd = 1.0 + b**2 * 0.81
        w = 1.0 / np.sqrt(nd)
        npt.assert_allclose(ch.b, b, rtol=1e-14)
        npt.assert_allclose(ch.noise_power, nd, rtol=1e-14)
        npt.assert_allclose(ch.w, w, rtol=1e-14)
        expected = np.sqrt(ps) * np.array(
            [[0.4, 0.0], [w * b * 1.2 * (-0.9j), w * 0.4]], dtype=np.complex128
        )
        npt.assert_allclose(ch.H, expected, atol=1e-14)

    def test_reference_channel_frozen_values(self):
        # regression freeze of the derived quantities (scalar-arithmetic oracle)
        ch = effective_channel(reference_params(), 0)
        npt.assert_allclose(ch.b, 0.7177385727828692, rtol=1e-12)
        npt.assert_allclose(ch.sigma, [1.15611826, 0.23194839], rtol=1e-7)
        npt.assert_allclose(
            ch.H,
            [[0.56501502 + 0j, 0j], [-0.91973705j, 0.47460644 + 0j]],
            atol=1e-7,
        )

    def test_block_structure_upper_right_zero(self):
        params = reference_params(block_length=2)
        ch = effective_channel(params, 0)
        L = 2
        npt.assert_allclose(ch.H[:L, L:], 0.0, atol=0.0)
        # both diagonal blocks proportional to the identity
        npt.assert_allclose(ch.H[:L, :L], ch.H[0, 0] * np.eye(L), atol=1e-14)
        npt.assert_allclose(ch.H[L:, L:], ch.H[L, L] * np.eye(L), atol=1e-14)
        npt.assert_allclose(ch.H[L:, :L], ch.H[L, 0] * np.eye(L), atol=1e-14)

    def test_svd_roundtrip_and_ordering(self):
        ch = effective_channel(reference_params(), 0)
        rebuilt = ch.U @ np.diag(ch.sigma) @ ch.V.conj().T
        npt.assert_allclose(rebuilt, ch.H, atol=1e-10)
        assert np.all(np.diff(ch.sigma) <= 0)
        npt.assert_allclose(ch.U @ ch.U.conj().T, np.eye(2), atol=1e-12)
        npt.assert_allclose(ch.V @ ch.V.conj().T, np.eye(2), atol=1e-12)

    def test_vanishing_relay_path_gives_diagonal_channel(self):
        for relays in (((0.0, -0.9j),), ((1.2, 0.0),)):
            params = RelayNetworkParams(
                h_direct=0.4, relays=relays, ps=SNR_3DB, pr=SNR_3DB
            )
            ch = effective_channel(params, 0)
            off_diag = ch.H - np.diag(np.diag(ch.H))
            npt.assert_allclose(off_diag, 0.0, atol=1e-14)
            expected_sigma = np.sqrt(SNR_3DB) * 0.4 * np.array([1.0, ch.w])
            npt.assert_allclose(ch.sigma, expected_sigma, rtol=1e-12)

    def test_full_rank_iff_direct_gain(self):
        assert effective_channel(reference_params(), 0).sigma.min() > 0
        no_direct = RelayNetworkParams(
            h_direct=0.0, relays=((1.2, -0.9j),), ps=SNR_3DB, pr=SNR_3DB
        )
        npt.assert_allclose(effective_channel(no_direct, 0).sigma.min(), 0.0, atol=1e-14)

    def test_entries_finite_over_power_grid(self):
        for ps in (1e-3, 1.0, 1e3):
            for pr in (1e-3, 1.0, 1e6):
                params = RelayNetworkParams(
                    h_direct=0.4, relays=((1.2, -0.9j),), ps=ps, pr=pr
                )
                assert np.all(np.isfinite(effective_channel(params, 0).H))

    def test_rejects_bad_relay_index(self):
        with pytest.raises(IndexError, match="relay index"):
            effective_channel(reference_params(), 1)


class TestSelectRelay:
    def test_single_relay(self):
        assert select_relay(reference_params()) == 0

    def test_degenerate_competitor_loses(self):
        params = RelayNetworkParams(
            h_direct=0.4,
            relays=((0.0, 0.0), (1.2, -0.9j)),
            ps=SNR_3DB,
            pr=SNR_3DB,
        )
        assert select_relay(params) == 1

    def test_strong_relay_beats_weak_by_logdet(self):
        params = RelayNetworkParams(
            h_direct=0.4,
            relays=((1.2, -0.9j), (0.1, 0.1)),
            ps=SNR_3DB,
            pr=SNR_3DB,
        )
        # oracle: evaluate the Gaussian-capacity proxy for both candidates
        metrics = []
        for i in range(2):
            h = effective_channel(params, i).H
            _, logdet = np.linalg.slogdet(np.eye(2) + h.conj().T @ h)
            metrics.append(logdet)
        assert metrics[0] > metrics[1]
        assert select_relay(params) == 0


class TestParamsValidation:
    def test_requires_a_relay(self):
        with pytest.raises(ValueError, match="relay"):
            RelayNetworkParams(h_direct=0.4, relays=(), ps=1.0, pr=1.0)

    def test_rejects_nonfinite_gain(self):
        with pytest.raises(ValueError, match="finite"):
            RelayNetworkParams(h_direct=np.inf, relays=((1.0, 1.0),), ps=1.0, pr=1.0)

    def test_rejects_negative_relay_power(self):
        with pytest.raises(ValueError, match="pr"):
            RelayNetworkParams(h_direct=0.4, relays=((1.0, 1.0),), ps=1.0, pr=-1.0)
