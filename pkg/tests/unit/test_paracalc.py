"""Tests for paraproducts, commutators and estimate sweeps."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anderson_lab.errors import DomainViolationError, SpecMismatchError
from anderson_lab.models.sweep import RatioSweep, ResolutionComparison
from anderson_lab.models.torus import TorusSpec
from anderson_lab.paracalc.commutators import (
    adjoint_defect_blocks,
    adjoint_defect_D,
    commutator_C,
    commutator_CN,
    commutator_difference,
    para_resolvent_R,
    paralinearize,
)
from anderson_lab.paracalc.products import (
    hi_lo,
    hi_res,
    lo_hi,
    paraproduct,
    resonant,
    vec_lo_hi,
)
from anderson_lab.paracalc.sweeps import ESTIMATE_CASES, ratio_sweep, resolution_comparison
from anderson_lab.spectral.lattice import FourierField, l2_norm, product
from anderson_lab.spectral.sampling import band_limited_field, rough_field


def relative(a: FourierField, b: FourierField) -> float:
    return l2_norm(a - b) / max(l2_norm(b), 1e-300)


class TestBony:
    """Tests for the Bony decomposition."""

    def test_pieces_sum_to_product(self, rng, spec2):
        """Test f < g + f o g + f > g equals the projected product."""
        f = band_limited_field(spec2, rng, 4)
        g = band_limited_field(spec2, rng, 4)

        assert relative(paraproduct(f, g).total, product(f, g)) < 1e-10

    def test_full_band_fields(self, rng, spec2):
        """Test the identity holds for fields filling the whole lattice."""
        f = rough_field(spec2, -0.5, rng)
        g = rough_field(spec2, 1.0, rng)

        assert relative(paraproduct(f, g).total, product(f, g)) < 1e-10

    def test_high_low_is_swapped_low_high(self, rng, spec2):
        """Test f > g = g < f."""
        f = rough_field(spec2, 0.0, rng)
        g = rough_field(spec2, 0.0, rng)

        assert np.allclose(hi_lo(f, g).coeffs, lo_hi(g, f).coeffs)
        assert np.allclose(paraproduct(f, g).hi_lo.coeffs, lo_hi(g, f).coeffs, atol=1e-12)

    def test_resonant_is_symmetric(self, rng, spec2):
        """Test f o g = g o f."""
        f = rough_field(spec2, 0.0, rng)
        g = rough_field(spec2, 0.0, rng)

        assert relative(resonant(f, g), resonant(g, f)) < 1e-12

    def test_hi_res(self, rng, spec2):
        """Test f >= g is the sum of the high-low and resonant pieces."""
        f = rough_field(spec2, 0.0, rng)
        g = rough_field(spec2, 0.0, rng)

        assert relative(hi_res(f, g), hi_lo(f, g) + resonant(f, g)) < 1e-12

    def test_constant_against_field(self, rng, spec2):
        """Test a field paraproducted against a constant vanishes."""
        f = rough_field(spec2, 0.0, rng)
        one = FourierField.constant(spec2, 1.0)

        assert l2_norm(lo_hi(f, one)) < 1e-12

    def test_vector_paraproduct(self, rng, spec2):
        """Test the vector form is the sum of the componentwise paraproducts."""
        f = rough_field(spec2, 1.0, rng)
        g = rough_field(spec2, 1.0, rng)
        expected = lo_hi(f.partial(0), g.partial(0)) + lo_hi(f.partial(1), g.partial(1))

        assert relative(vec_lo_hi(f.grad(), g.grad()), expected) < 1e-12

    def test_mismatched_lattices(self, spec2):
        """Test paraproducts refuse fields on different lattices."""
        with pytest.raises(SpecMismatchError):
            paraproduct(FourierField.zeros(spec2), FourierField.zeros(spec2.with_K(6)))

    @settings(max_examples=10, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    def test_bilinear(self, seed):
        """Test the low-high paraproduct is linear in its first argument."""
        spec = TorusSpec(dim=2, K=4)
        rng = np.random.default_rng(seed)
        f, h, g = (band_limited_field(spec, rng, 4) for _ in range(3))

        assert relative(lo_hi(f + h, g), lo_hi(f, g) + lo_hi(h, g)) < 1e-10


class TestCommutators:
    """Tests for the commutators and the adjoint defect."""

    def test_commutator_difference(self, rng, spec2):
        """Test C - C_N = (Delta_{<=N}(f < g)) o h."""
        f, g, h = (rough_field(spec2, 0.0, rng) for _ in range(3))
        N = 2

        gap = commutator_C(f, g, h) - commutator_CN(f, g, h, N)

        assert relative(gap, commutator_difference(f, g, h, N)) < 1e-10

    def test_d_block_oracle(self, rng, spec2):
        """Test D(f, g, h) agrees with its block-sum evaluation."""
        f, g, h = (band_limited_field(spec2, rng, spec2.K) for _ in range(3))
        scale = l2_norm(f) * l2_norm(g) * l2_norm(h)

        gap = abs(adjoint_defect_D(f, g, h) - adjoint_defect_blocks(f, g, h))

        assert gap / scale < 1e-10

    def test_d_block_oracle_3d(self, rng, spec3):
        """Test the block-sum evaluation in 3-d."""
        f, g, h = (band_limited_field(spec3, rng, spec3.K) for _ in range(3))
        scale = l2_norm(f) * l2_norm(g) * l2_norm(h)

        gap = abs(adjoint_defect_D(f, g, h) - adjoint_defect_blocks(f, g, h))

        assert gap / scale < 1e-10

    def test_block_form_needs_real_g(self, rng, spec2):
        """Test the block-sum form rejects a complex g."""
        f = band_limited_field(spec2, rng, 4)
        g = band_limited_field(spec2, rng, 4, reality=False)

        with pytest.raises(DomainViolationError):
            adjoint_defect_blocks(f, g, f)

    def test_para_resolvent_of_constant(self, rng, spec2):
        """Test R(1, g) = 0: a constant commutes with the resolvent."""
        one = FourierField.constant(spec2, 1.0)
        g = rough_field(spec2, 0.0, rng)

        assert l2_norm(para_resolvent_R(one, g)) < 1e-12

    def test_paralinearize_splits(self, rng, spec2):
        """Test F'(f) < f + R_F(f) = F(f)."""
        f = rough_field(spec2, 1.0, rng, sigma=0.3)
        para_part, remainder = paralinearize(np.exp, np.exp, f)
        direct = FourierField.from_grid(spec2, np.exp(f.grid()))

        assert relative(para_part + remainder, direct) < 1e-12

    def test_paralinearize_non_finite_derivative(self, spec2):
        """Test a derivative that blows up at the attained values is rejected."""
        f = FourierField.constant(spec2, 0.0)

        with pytest.raises(DomainViolationError):
            paralinearize(np.sqrt, lambda x: 0.5 / np.sqrt(x), f)


class TestSweeps:
    """Tests for the estimate ratio sweeps."""

    def test_every_case_is_bounded(self):
        """Test every estimate gives finite ratios at K = 4."""
        spec = TorusSpec(dim=2, K=4)

        for name in ESTIMATE_CASES:
            sweep = ratio_sweep(name, spec, samples=2, seed=1)
            assert isinstance(sweep, RatioSweep)
            assert sweep.samples == 2
            assert sweep.bounded

    def test_unknown_case(self):
        """Test an unknown estimate name raises KeyError."""
        with pytest.raises(KeyError):
            ratio_sweep("nope", TorusSpec(dim=2, K=4), samples=1)

    def test_resolution_comparison(self):
        """Test the comparison runs the same draws at K and 2K."""
        comparison = resolution_comparison("resonant", TorusSpec(dim=2, K=4), samples=2)

        assert comparison.coarse.K == 4
        assert comparison.fine.K == 8
        assert comparison.factor >= 1.0

    def test_factor_of_vanishing_sweeps(self):
        """Test two all-zero sweeps compare as stable."""
        zero = RatioSweep(name="x", K=4, samples=1, ratios=[0.0])
        comparison = ResolutionComparison(coarse=zero, fine=zero)

        assert comparison.factor == 1.0
        assert comparison.stable

    def test_factor_with_one_zero(self):
        """Test a sweep that vanishes at one resolution only is unstable."""
        comparison = ResolutionComparison(
            coarse=RatioSweep(name="x", K=4, samples=1, ratios=[0.0]),
            fine=RatioSweep(name="x", K=8, samples=1, ratios=[1.0]),
        )

        assert math.isinf(comparison.factor)
        assert not comparison.stable
