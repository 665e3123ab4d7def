"""Constellation construction and block symbol-space enumeration."""

import numpy as np
import numpy.testing as npt
import pytest

from relaymi import (
    CapacityError,
    build_constellation,
    build_symbol_space,
    parse_constellation_name,
)


class TestBuildConstellation:
    def test_bpsk_is_plus_minus_one(self):
        c = build_constellation("psk", 2)
        npt.assert_allclose(c.points, [1.0, -1.0], atol=1e-15)

    def test_qpsk_points_sit_on_diagonals(self):
        c = build_constellation("psk", 4)
        expected = np.exp(1j * (2 * np.pi * np.arange(4) / 4 + np.pi / 4))
        npt.assert_allclose(c.points, expected, atol=1e-15)
        npt.assert_allclose(np.abs(c.points), 1.0, atol=1e-13)

    def test_16qam_grid_scaled_by_sqrt10(self):
        c = build_constellation("qam", 16)
        grid = np.array(
            [(a + 1j * b) / np.sqrt(10.0) for a in (-3, -1, 1, 3) for b in (-3, -1, 1, 3)]
        )
        npt.assert_allclose(np.sort_complex(c.points), np.sort_complex(grid), atol=1e-12)

    @pytest.mark.parametrize("kind,order", [("psk", 2), ("psk", 8), ("pam", 4), ("qam", 64)])
    def test_unit_average_energy(self, kind, order):
        c = build_constellation(kind, order)
        assert c.points.shape == (order,)
        npt.assert_allclose(np.mean(np.abs(c.points) ** 2), 1.0, atol=1e-12)
        # all points distinct
        assert len(np.unique(np.round(c.points, 12))) == order

    def test_psk_unit_modulus(self):
        for order in (2, 4, 8, 16):
            c = build_constellation("psk", order)
            npt.assert_allclose(np.abs(c.points), np.ones(order), atol=1e-13)

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            build_constellation("apsk", 16)

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError, match="power of two"):
            build_constellation("psk", 6)

    def test_rejects_non_square_qam(self):
        with pytest.raises(ValueError, match="even power of two"):
            build_constellation("qam", 8)

    def test_rejects_order_below_two(self):
        with pytest.raises(ValueError, match="power of two"):
            build_constellation("pam", 1)


class TestParseName:
    @pytest.mark.parametrize(
        "name,kind,order",
        [
            ("bpsk", "psk", 2),
            ("qpsk", "psk", 4),
            ("QPSK", "psk", 4),
            ("8psk", "psk", 8),
            ("16qam", "qam", 16),
            ("16-QAM", "qam", 16),
            ("4pam", "pam", 4),
        ],
    )
    def test_known_names(self, name, kind, order):
        c = parse_constellation_name(name)
        assert (c.kind, c.order) == (kind, order)

    def test_rejects_garbage(self):
        with pytest.raises(ValueError, match="unrecognized"):
            parse_constellation_name("qam16")


class TestSymbolSpace:
    def test_bpsk_block_one_enumerates_four_sign_vectors(self):
        space = build_symbol_space(build_constellation("psk", 2), 1)
        expected = np.array(
            [[1, 1], [-1, 1], [1, -1], [-1, -1]], dtype=np.complex128
        )
        npt.assert_allclose(space.vectors, expected, atol=1e-15)

    def test_first_coordinate_cycles_fastest(self):
        c = build_constellation("psk", 4)
        space = build_symbol_space(c, 1)
        assert space.size == 16
        # vector n has coordinates points[n % 4], points[n // 4]
        for n in (0, 5, 10, 15, 7):
            npt.assert_allclose(
                space.vectors[n], [c.points[n % 4], c.points[n // 4]], atol=1e-15
            )

    def test_bpsk_block_two_gives_sixteen_4d_vectors(self):
        space = build_symbol_space(build_constellation("psk", 2), 2)
        assert space.vectors.shape == (16, 4)
        assert space.dim == 4

    @pytest.mark.parametrize("name,L", [("bpsk", 1), ("qpsk", 1), ("bpsk", 2)])
    def test_empirical_covariance_is_identity(self, name, L):
        space = build_symbol_space(parse_constellation_name(name), L)
        cov = space.vectors.conj().T @ space.vectors / space.size
        npt.assert_allclose(cov, np.eye(space.dim), atol=1e-12)

    def test_enumeration_is_deterministic(self):
        a = build_symbol_space(parse_constellation_name("qpsk"), 1)
        b = build_symbol_space(parse_constellation_name("qpsk"), 1)
        assert a.vectors.tobytes() == b.vectors.tobytes()

    def test_every_entry_is_a_constellation_point(self):
        c = build_constellation("qam", 16)
        space = build_symbol_space(c, 1)
        dists = np.min(np.abs(space.vectors[..., None] - c.points), axis=-1)
        npt.assert_allclose(dists, 0.0, atol=1e-14)

    def test_capacity_guard_rejects_huge_spaces(self):
        c = build_constellation("qam", 64)
        with pytest.raises(CapacityError, match="exceeds"):
            build_symbol_space(c, 2)  # 64**4 = 2**24 > 2**20

    def test_rejects_nonpositive_block_length(self):
        with pytest.raises(ValueError, match="block_length"):
            build_symbol_space(build_constellation("psk", 2), 0)

    def test_bits_per_use_bound(self):
        space = build_symbol_space(parse_constellation_name("qpsk"), 1)
        assert space.bits_per_use == 2.0
