"""Tests for lattice fields, Littlewood-Paley blocks, norms and snapshots."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anderson_lab.errors import DomainViolationError, SpecMismatchError
from anderson_lab.models.torus import NormReport, TorusSpec
from anderson_lab.spectral.dyadic import (
    DyadicPartition,
    Side,
    freq_cutoff,
    high,
    low,
    low_pass,
    lp_block,
    max_cutoff_level,
)
from anderson_lab.spectral.lattice import (
    FourierField,
    dft_forward,
    dft_inverse,
    inner,
    l2_norm,
    linf_norm,
    product,
)
from anderson_lab.spectral.norms import (
    bernstein_check,
    besov_norm,
    block_supported,
    lp_norm,
    sobolev_norm,
)
from anderson_lab.spectral.sampling import band_limited_field, rough_field
from anderson_lab.spectral.snapshot import read_snapshot, write_snapshot


class TestTorusSpec:
    """Tests for the lattice specification."""

    def test_default_grid(self):
        """Test the default grid resolves quadratic products."""
        spec = TorusSpec(dim=2, K=8)

        assert spec.grid_n == 26
        assert spec.side == 17
        assert spec.shape == (17, 17)
        assert spec.n_modes == 289

    def test_grid_too_small(self):
        """Test that a grid smaller than the lattice is rejected."""
        with pytest.raises(ValueError):
            TorusSpec(dim=2, K=8, grid_n=10)

    def test_dimension_range(self):
        """Test only 2-d and 3-d tori are accepted."""
        with pytest.raises(ValueError):
            TorusSpec(dim=4, K=8)

    def test_with_k(self):
        """Test changing the cutoff keeps the dimension."""
        spec = TorusSpec(dim=3, K=4).with_K(6)

        assert spec.dim == 3
        assert spec.K == 6
        assert spec.grid_n == 20


class TestFourierField:
    """Tests for band-limited fields."""

    def test_cosine_coefficients(self, spec2):
        """Test cos(2 pi x) has coefficients 1/2 at k = (+-1, 0)."""
        f = FourierField.cosine(spec2, [1, 0])

        assert f.coeff([1, 0]) == pytest.approx(0.5)
        assert f.coeff([-1, 0]) == pytest.approx(0.5)
        assert f.reality

    def test_parseval(self, spec2):
        """Test the L^2 norm of a cosine is 1/sqrt(2)."""
        f = FourierField.cosine(spec2, [2, 1], amplitude=2.0)

        assert l2_norm(f) == pytest.approx(math.sqrt(2.0))
        assert lp_norm(f, 2) == pytest.approx(math.sqrt(2.0))

    def test_product_of_cosines(self, spec2):
        """Test cos^2 = 1/2 + 1/2 cos(4 pi x)."""
        f = FourierField.cosine(spec2, [1, 0])
        fg = product(f, f)

        assert fg.mean.real == pytest.approx(0.5)
        assert fg.coeff([2, 0]).real == pytest.approx(0.25)
        assert fg.coeff([1, 0]) == pytest.approx(0.0, abs=1e-14)

    def test_laplacian_symbol(self, spec2):
        """Test the Laplacian multiplies a mode by -4 pi^2 |k|^2."""
        f = FourierField.mode(spec2, [1, 2])

        assert f.laplacian().coeff([1, 2]).real == pytest.approx(-4 * math.pi**2 * 5)

    def test_bessel_inverse(self, rng, spec2):
        """Test (1 - Lap)^{-1} undoes (1 - Lap)."""
        f = rough_field(spec2, 1.0, rng)

        assert np.allclose(f.bessel().bessel_inv().coeffs, f.coeffs)

    def test_inv_laplacian_drops_zero_mode(self, spec2):
        """Test (-Lap)^{-1} of a constant is zero."""
        g = FourierField.constant(spec2, 3.0).inv_laplacian()

        assert l2_norm(g) == 0.0
        assert g.zero_mode_excluded

    def test_reality_symmetrizes(self, spec2):
        """Test that a real field gets hermitian coefficients."""
        coeffs = np.zeros(spec2.shape, dtype=np.complex128)
        coeffs[8 + 1, 8] = 1.0
        f = FourierField(spec2, coeffs, reality=True)

        assert f.coeff([1, 0]) == pytest.approx(0.5)
        assert f.coeff([-1, 0]) == pytest.approx(0.5)
        assert not np.iscomplexobj(f.grid())

    def test_grid_round_trip(self, rng, spec2):
        """Test sampling and projection are inverse on the lattice."""
        f = rough_field(spec2, 0.5, rng)
        back = dft_forward(dft_inverse(f), spec2)

        assert np.allclose(back.coeffs, f.coeffs, atol=1e-13)

    def test_mode_outside_lattice(self, spec2):
        """Test that a wavevector beyond K is rejected."""
        with pytest.raises(SpecMismatchError):
            FourierField.mode(spec2, [9, 0])

    def test_mixed_lattices(self, spec2):
        """Test that fields on different lattices cannot be added."""
        f = FourierField.zeros(spec2)
        g = FourierField.zeros(spec2.with_K(6))

        with pytest.raises(SpecMismatchError):
            f + g

    def test_restrict_pads_and_truncates(self, rng, spec2):
        """Test moving a field to a larger lattice and back is lossless."""
        f = rough_field(spec2, 1.0, rng)
        big = spec2.with_K(10)

        assert np.array_equal(f.restrict(big).restrict(spec2).coeffs, f.coeffs)

    def test_inner_product(self, spec2):
        """Test <f, f> = ||f||^2 and orthogonality of distinct modes."""
        f = FourierField.mode(spec2, [1, 1])
        g = FourierField.mode(spec2, [1, -1])

        assert inner(f, f) == pytest.approx(1.0)
        assert inner(f, g) == 0

    def test_linf_of_cosine(self, spec2):
        """Test the sup norm of cos(2 pi x) on the grid."""
        f = FourierField.cosine(spec2, [1, 0])

        assert linf_norm(f) == pytest.approx(1.0)

    @settings(max_examples=15, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    def test_product_commutes(self, seed):
        """Test the projected product is symmetric."""
        spec = TorusSpec(dim=2, K=4)
        rng = np.random.default_rng(seed)
        f = band_limited_field(spec, rng, 4)
        g = band_limited_field(spec, rng, 4)

        assert np.allclose(product(f, g).coeffs, product(g, f).coeffs, atol=1e-12)


class TestDyadic:
    """Tests for the Littlewood-Paley decomposition."""

    def test_partition_of_unity(self, spec2):
        """Test the block multipliers sum to one on the lattice."""
        part = DyadicPartition.for_spec(spec2)

        assert np.allclose(part.multipliers.sum(axis=0), 1.0, atol=1e-12)

    def test_blocks_are_nonnegative(self, spec3):
        """Test every block multiplier is non-negative."""
        part = DyadicPartition.for_spec(spec3)

        assert np.all(part.multipliers >= -1e-15)

    def test_block_support(self, rng, spec2):
        """Test a block of a field is supported in its annulus."""
        part = DyadicPartition.for_spec(spec2)
        f = rough_field(spec2, 0.0, rng)

        for j in part.blocks:
            assert block_supported(f.multiply(part.multiplier(j)), j)

    def test_past_last_block_is_zero(self, spec2):
        """Test blocks beyond j_max vanish."""
        part = DyadicPartition.for_spec(spec2)

        assert not part.multiplier(part.j_max + 1).any()

    def test_negative_block_index(self, spec2):
        """Test block indices below -1 are rejected."""
        part = DyadicPartition.for_spec(spec2)

        with pytest.raises(DomainViolationError):
            part.multiplier(-2)

    def test_partition_of_other_lattice(self, spec2):
        """Test a partition refuses fields of another lattice."""
        part = DyadicPartition.for_spec(spec2)
        f = FourierField.zeros(TorusSpec(dim=2, K=4))

        with pytest.raises(SpecMismatchError, match="Partition built"):
            lp_block(f, 0, part)
        with pytest.raises(SpecMismatchError):
            low_pass(f, 1, part)

    def test_low_pass_sums_blocks(self, rng, spec2):
        """Test S_j f is the sum of the blocks below j."""
        part = DyadicPartition.for_spec(spec2)
        f = rough_field(spec2, 0.0, rng)

        blocks = lp_block(f, -1, part) + lp_block(f, 0, part) + lp_block(f, 1, part)

        assert l2_norm(low_pass(f, 2, part) - blocks) <= 1e-12 * l2_norm(f)

    def test_sharp_cutoff_splits(self, rng, spec2):
        """Test Delta_{>N} f + Delta_{<=N} f = f."""
        f = rough_field(spec2, 0.0, rng)

        for N in range(max_cutoff_level(spec2) + 1):
            assert np.array_equal((high(f, N) + low(f, N)).coeffs, f.coeffs)

    def test_freq_cutoff_by_side(self, spec2):
        """Test the sharp cutoff keeps |k| > 2^N above and |k| <= 2^N below."""
        f = FourierField.mode(spec2, [2, 0]) + FourierField.mode(spec2, [3, 0])

        above = freq_cutoff(f, 1, Side.ABOVE)
        below = freq_cutoff(f, 1, "below")

        assert l2_norm(above - FourierField.mode(spec2, [3, 0])) == 0.0
        assert l2_norm(below - FourierField.mode(spec2, [2, 0])) == 0.0
        with pytest.raises(DomainViolationError):
            freq_cutoff(f, -1)

    def test_max_cutoff_level(self, spec2, spec3):
        """Test the last level with 2^N <= K sqrt(d)."""
        assert max_cutoff_level(spec2) == 3
        assert max_cutoff_level(spec3) == 2

    def test_above_max_level_vanishes(self, rng, spec2):
        """Test Delta_{>N} is zero once 2^N exceeds the lattice radius."""
        f = rough_field(spec2, 0.0, rng)

        assert l2_norm(high(f, max_cutoff_level(spec2) + 1)) == 0.0


class TestNorms:
    """Tests for Lebesgue, Besov and Sobolev norms."""

    def test_lp_of_constant(self, spec2):
        """Test every L^p norm of a constant is its modulus."""
        f = FourierField.constant(spec2, -2.0)

        for p in (1.0, 3.0, 4.0, math.inf):
            assert lp_norm(f, p) == pytest.approx(2.0)

    def test_lp_rejects_small_p(self, spec2):
        """Test p < 1 is rejected."""
        with pytest.raises(DomainViolationError):
            lp_norm(FourierField.zeros(spec2), 0.5)

    def test_sobolev_of_constant(self, spec2):
        """Test the H^s norm of a constant does not depend on s."""
        f = FourierField.constant(spec2, 3.0)

        assert sobolev_norm(f, 2.0) == pytest.approx(3.0)
        assert sobolev_norm(f, -1.0) == pytest.approx(3.0)

    def test_besov_report_recomputes(self, rng, spec2):
        """Test the per-block breakdown reproduces the Besov norm."""
        part = DyadicPartition.for_spec(spec2)
        f = rough_field(spec2, 0.5, rng)
        report = besov_norm(f, 0.5, 2.0, 2.0, part)

        assert isinstance(report, NormReport)
        assert len(report.per_block) == len(part.blocks)
        assert report.recompute() == pytest.approx(report.value)

    def test_bernstein_ratio_bounded(self, spec2):
        """Test the Bernstein ratio of a block-supported mode is of order one."""
        f = FourierField.cosine(spec2, [2, 0])
        ratio = bernstein_check(f, 1, 1, 2.0, 2.0)

        assert 0.0 < ratio < 10.0

    def test_bernstein_single_mode(self, spec2):
        """Test one mode k gives the ratio 2 pi |k| / 2^j."""
        f = FourierField.mode(spec2, [3, 4])

        ratio = bernstein_check(f, 2, 1, 2.0, 2.0)

        assert ratio == pytest.approx(2.0 * math.pi * 5.0 / 4.0, rel=1e-12)

    def test_bernstein_constant_block(self, spec2):
        """Test derivatives of a constant vanish."""
        assert bernstein_check(FourierField.constant(spec2, 2.0), -1, 1, 2.0, 2.0) == 0.0

    def test_bernstein_needs_block_support(self, rng, spec2):
        """Test Bernstein rejects fields outside the block."""
        f = rough_field(spec2, 0.0, rng)

        with pytest.raises(DomainViolationError):
            bernstein_check(f, 0, 1, 2.0, 2.0)


class TestSampling:
    """Tests for seeded Gaussian fields."""

    def test_rough_field_is_real(self, rng, spec2):
        """Test rough fields are real."""
        f = rough_field(spec2, 1.0, rng)

        assert f.reality
        assert np.allclose(f.coeffs, np.conj(np.flip(f.coeffs)))

    def test_zero_mean(self, rng, spec2):
        """Test zero_mean removes the zero mode."""
        f = rough_field(spec2, 1.0, rng, zero_mean=True)

        assert f.mean == 0

    def test_restriction_consistency(self, spec2):
        """Test the realization at a smaller cutoff is the restriction of a larger one."""
        small = spec2.with_K(4)
        big = rough_field(spec2, 1.0, np.random.default_rng(5))
        little = rough_field(small, 1.0, np.random.default_rng(5))

        assert np.allclose(big.restrict(small).coeffs, little.coeffs)

    def test_band_limit(self, rng, spec2):
        """Test coefficients beyond the cutoff vanish."""
        f = band_limited_field(spec2, rng, 3)

        assert f.coeff([4, 0]) == 0
        assert f.coeff([0, -8]) == 0


class TestSnapshot:
    """Tests for snapshot files."""

    def test_text_snapshot(self, rng, spec2, tmp_path):
        """Test the text format restores every coefficient exactly."""
        f = rough_field(spec2, 1.0, rng)
        path = write_snapshot(tmp_path / "f.txt", f)
        back = read_snapshot(path)

        assert back.spec == spec2
        assert back.reality
        assert np.array_equal(back.coeffs, f.coeffs)

    def test_text_header(self, spec2, tmp_path):
        """Test the header line and the lexicographic body."""
        path = write_snapshot(tmp_path / "f.txt", FourierField.zeros(spec2))
        lines = path.read_text(encoding="utf-8").splitlines()

        assert lines[0] == "# 2 8 26 1 0"
        assert lines[1].split()[:2] == ["-8", "-8"]
        assert len(lines) == 1 + spec2.n_modes

    def test_binary_snapshot(self, spec3, tmp_path):
        """Test the binary format keeps the flags and coefficients."""
        f = rough_field(spec3, 1.0, np.random.default_rng(3), zero_mean=True)
        back = read_snapshot(write_snapshot(tmp_path / "f.bin", f, "binary"))

        assert back.zero_mode_excluded
        assert np.array_equal(back.coeffs, f.coeffs)

    def test_truncated_body(self, tmp_path):
        """Test a body that does not match the header is rejected."""
        path = tmp_path / "bad.txt"
        path.write_text("# 2 4 10 1 0\n0 0 1.0 0.0\n", encoding="utf-8")

        with pytest.raises(SpecMismatchError):
            read_snapshot(path)
