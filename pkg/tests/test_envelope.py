"""Unit tests for the marginal concave envelopes."""

import math
from dataclasses import replace

import numpy as np
import pytest
from keyrate.core import (
    ParamFamily,
    binary_convolution,
    binary_entropy,
    conditional_entropies,
    joint_entropy,
    mutual_information,
    param_to_joint,
)
from keyrate.envelope import (
    NEG_INF,
    Axis,
    EnvelopeConfig,
    eval_omega0,
    eval_sigma0,
    fiber_coordinate,
    marginal_envelope_pass,
    omega_r,
    sample_function,
    sample_omega0,
    sample_sigma0,
    sigma_r,
    sup_norm_change,
    upper_concave_hull_1d,
)
from keyrate.exceptions import ConvergenceWarning, DomainError, GridError


class TestHull:
    """Tests for `upper_concave_hull_1d`."""

    def test_fills_dip(self):
        """Test that a dip is lifted to the chord."""
        hull = upper_concave_hull_1d([0.0, 1.0, 2.0], [0.0, -1.0, 0.0])
        assert np.array_equal(hull, [0.0, 0.0, 0.0])

    def test_interpolates_undefined(self):
        """Test that undefined points between finite ones are filled."""
        hull = upper_concave_hull_1d([0.0, 1.0, 2.0], [0.0, NEG_INF, 2.0])
        assert np.allclose(hull, [0.0, 1.0, 2.0])

    def test_outside_span(self):
        """Test that points outside the finite span stay undefined."""
        hull = upper_concave_hull_1d([0.0, 1.0, 2.0], [NEG_INF, 1.0, NEG_INF])
        assert hull[1] == 1.0
        assert hull[0] == NEG_INF
        assert hull[2] == NEG_INF

    def test_shared_abscissa(self):
        """Test that repeated abscissas are merged by their maximum."""
        hull = upper_concave_hull_1d([0.0, 0.0, 1.0], [1.0, 3.0, 3.0])
        assert np.array_equal(hull, [3.0, 3.0, 3.0])

    def test_unsorted(self):
        """Test that abscissas may come in any order."""
        hull = upper_concave_hull_1d([2.0, 0.0, 1.0], [0.0, 0.0, -5.0])
        assert np.array_equal(hull, [0.0, 0.0, 0.0])

    def test_concave_unchanged(self):
        """Test that a concave function is its own majorant."""
        x = np.linspace(0.0, 1.0, 11)
        v = x * (1.0 - x)
        assert np.allclose(upper_concave_hull_1d(x, v), v)

    def test_all_undefined(self):
        """Test a fiber without finite points."""
        hull = upper_concave_hull_1d([0.0, 1.0], [NEG_INF, NEG_INF])
        assert np.all(hull == NEG_INF)


class TestEnvelopeConfig:
    """Tests for `EnvelopeConfig`."""

    @pytest.mark.parametrize(
        "changes",
        [
            {"grid_n": 100},
            {"grid_n": 31},
            {"sup_norm_tol": 0.0},
            {"max_passes": 0},
            {"threads": 0},
        ],
    )
    def test_invalid(self, changes):
        """Test that invalid settings are rejected."""
        with pytest.raises(GridError):
            replace(EnvelopeConfig(), **changes).validate()

    def test_default(self):
        """Test that the defaults are valid."""
        EnvelopeConfig().validate()


class TestGridFunctional:
    """Tests for grid sampling and node lookup."""

    def test_node(self, bss_family):
        """Test node lookup on a 41 point grid."""
        fn = sample_sigma0(bss_family, 41)
        assert fn.node(0.5) == 20
        assert fn.node(1.0) == 40
        with pytest.raises(GridError):
            fn.node(0.013)
        with pytest.raises(GridError):
            fn.at(1.5, 0.5)

    def test_omega0_matches_scalar(self, skewed_family):
        """Test the vectorized sample against the scalar functional."""
        fn = sample_omega0(0.7, skewed_family, 41)
        joint = param_to_joint(skewed_family, 0.25, 0.75)
        assert fn.at(0.25, 0.75) == pytest.approx(eval_omega0(0.7, joint), abs=1e-13)

    def test_omega0_scalar(self, bss):
        """Test s H(X,Y) - I(X;Y)."""
        expected = 2.0 * joint_entropy(bss) - mutual_information(bss)
        assert eval_omega0(2.0, bss) == pytest.approx(expected)
        with pytest.raises(DomainError):
            eval_omega0(0.0, bss)

    def test_sigma0_locus(self, bss_family, bss):
        """Test that sigma_0 is finite exactly on the independence locus."""
        fn = sample_sigma0(bss_family, 41)
        assert fn.at(0.5, 0.5) == NEG_INF
        assert eval_sigma0(bss) == NEG_INF
        edge = param_to_joint(bss_family, 0.0, 0.3)
        assert fn.at(0.0, 0.3) == pytest.approx(joint_entropy(edge), abs=1e-13)
        assert eval_sigma0(edge) == pytest.approx(joint_entropy(edge), abs=1e-13)

    def test_singular_cells(self, support_three_family):
        """Test that cells where the chart is undefined stay at -inf."""
        fn = sample_function(support_three_family, 41, np.zeros((41, 41)))
        assert fn.singular[0, 0]
        assert fn.at(0.0, 0.0) == NEG_INF
        assert fn.at(0.5, 0.5) == 0.0

    def test_rows(self, bss_family):
        """Test the row-major iteration."""
        fn = sample_function(bss_family, 33, np.arange(33 * 33).reshape(33, 33))
        rows = list(fn.rows())
        assert len(rows) == 33 * 33
        assert rows[1] == (0.0, 1 / 32, 1.0)

    def test_fiber_coordinate(self, bss_family):
        """Test that P_X(1) at f = 1/2 is eps * g."""
        value = fiber_coordinate(bss_family, 0.5, 0.3, Axis.X)
        assert value == pytest.approx(binary_convolution(0.11, 0.3))


def test_sup_norm_change():
    """Test the change measure between iterates."""
    old = np.array([0.0, NEG_INF, 1.0])
    assert sup_norm_change(old, np.array([0.5, NEG_INF, 1.0])) == 0.5
    assert sup_norm_change(old, np.array([0.0, 2.0, 1.0])) == math.inf
    assert sup_norm_change(np.full(2, NEG_INF), np.full(2, NEG_INF)) == 0.0


class TestSigma:
    """Tests for the envelopes of the independence-locus entropy."""

    @pytest.mark.parametrize("variant", ["bsc", "support-three"])
    def test_one_round_is_conditional_entropy(self, variant, fast_cfg):
        """Test sigma_1 = H(Y|X) on nodes with interior g."""
        family = (
            ParamFamily.bsc_kernel(0.11)
            if variant == "bsc"
            else ParamFamily.support_three()
        )
        fn = sigma_r(family, 1, fast_cfg)
        for f in (0.25, 0.5, 0.8):
            for g in (0.05, 0.3, 0.5, 0.9):
                joint = param_to_joint(family, f, g)
                expected = conditional_entropies(joint)[1]
                assert fn.at(f, g) == pytest.approx(expected, abs=1e-9)

    def test_one_round_closed_form(self, bss_family, medium_cfg):
        """Test sigma_1(1/2, g) = h(g) + h(eps) - h(eps * g)."""
        fn = sigma_r(bss_family, 1, medium_cfg)
        for k in range(1, 100):
            g = k / 100
            expected = (
                binary_entropy(g)
                + binary_entropy(0.11)
                - binary_entropy(binary_convolution(0.11, g))
            )
            assert fn.at(0.5, g) == pytest.approx(expected, abs=1e-9)

    def test_support_three_base(self, support_three_family, fast_cfg):
        """Test sigma_1 at the base of the support-three chart."""
        fn = sigma_r(support_three_family, 1, fast_cfg)
        assert fn.base_value() == pytest.approx(2 / 3 * math.log(2), abs=1e-12)

    def test_infinite_rounds_at_base(self, bss_family, fast_cfg):
        """Test sigma_inf(Q) = h(eps) at the BSS base."""
        fn = sigma_r(bss_family, math.inf, fast_cfg)
        assert fn.base_value() == pytest.approx(binary_entropy(0.11), abs=1e-8)

    def test_monotone_in_rounds(self, skewed_family, fast_cfg):
        """Test that more rounds never lower the envelope."""
        one = sigma_r(skewed_family, 1, fast_cfg).values
        two = sigma_r(skewed_family, 2, fast_cfg).values
        three = sigma_r(skewed_family, 3, fast_cfg).values
        assert np.all(two >= one - 1e-12)
        assert np.all(three >= two - 1e-12)

    def test_interactive_transpose(self, bss_family, fast_cfg):
        """Test that sigma_inf of a symmetric source is symmetric in (f, g)."""
        fn = sigma_r(bss_family, math.inf, fast_cfg)
        assert np.allclose(fn.values, fn.values.T, atol=1e-6)

    def test_zero_rounds(self, bss_family, fast_cfg):
        """Test that zero rounds return the sampled functional."""
        fn = sigma_r(bss_family, 0, fast_cfg)
        assert fn.passes == 0
        assert np.array_equal(fn.values, sample_sigma0(bss_family, 41).values)


class TestOmega:
    """Tests for the envelopes of s H - I."""

    def test_pass_is_idempotent(self, skewed_family):
        """Test that repeating a pass along the same axis changes nothing."""
        once = marginal_envelope_pass(sample_omega0(1.0, skewed_family, 41), Axis.X)
        twice = marginal_envelope_pass(once, Axis.X)
        assert np.allclose(once.values, twice.values, atol=1e-12)
        assert twice.passes == 2

    @pytest.mark.parametrize("axis", [Axis.X, Axis.Y])
    @pytest.mark.parametrize("functional", ["omega", "sigma"])
    def test_boundary_preserved(self, skewed_family, axis, functional):
        """Test that a pass keeps the four edges of the chart."""
        if functional == "omega":
            fn0 = sample_omega0(0.7, skewed_family, 41)
        else:
            fn0 = sample_sigma0(skewed_family, 41)
        fn = marginal_envelope_pass(fn0, axis)
        for edge in (np.s_[0, :], np.s_[-1, :], np.s_[:, 0], np.s_[:, -1]):
            assert np.allclose(fn.values[edge], fn0.values[edge], atol=1e-12)

    def test_monotone_in_slope(self, skewed_family, fast_cfg):
        """Test that omega_r^s grows with s."""
        previous = omega_r(0.1, skewed_family, 2, fast_cfg).values
        for s in np.linspace(0.2, 1.0, 9):
            current = omega_r(s, skewed_family, 2, fast_cfg).values
            assert np.all(current >= previous - 1e-12)
            previous = current

    def test_threads_agree(self, skewed_family):
        """Test that the pool gives the inline result."""
        fn0 = sample_omega0(0.5, skewed_family, 41)
        inline = marginal_envelope_pass(fn0, Axis.Y, threads=1)
        pooled = marginal_envelope_pass(fn0, Axis.Y, threads=4)
        assert np.array_equal(inline.values, pooled.values)

    def test_dominates_base(self, bss_family, fast_cfg):
        """Test omega_r >= omega_0."""
        fn0 = sample_omega0(0.8, bss_family, 41)
        fn = omega_r(0.8, bss_family, 2, fast_cfg)
        assert np.all(fn.values >= fn0.values - 1e-12)

    def test_transpose_symmetry(self, skewed_family, fast_cfg):
        """Test that a Y-first pass is an X-first pass on the transposed chart."""
        direct = omega_r(0.6, skewed_family, 1, fast_cfg, first=Axis.Y)
        mirrored = omega_r(0.6, skewed_family.transposed(), 1, fast_cfg)
        assert np.allclose(direct.values, mirrored.values.T, atol=1e-12)

    def test_until(self, bss_family, fast_cfg):
        """Test that the stop condition ends the iteration."""
        fn = omega_r(1.0, bss_family, math.inf, fast_cfg, until=lambda fn: True)
        assert fn.passes == 1

    def test_convergence_warning(self, bss_family):
        """Test the warning when the pass budget runs out."""
        cfg = EnvelopeConfig(grid_n=41, max_passes=1)
        with pytest.warns(ConvergenceWarning, match="after 1 passes"):
            omega_r(1.0, bss_family, math.inf, cfg)

    @pytest.mark.parametrize("r", [-1, 1.5])
    def test_invalid_rounds(self, bss_family, fast_cfg, r):
        """Test that rounds must be non-negative integers or inf."""
        with pytest.raises(DomainError, match="r="):
            omega_r(1.0, bss_family, r, fast_cfg)

    def test_invalid_slope(self, bss_family, fast_cfg):
        """Test that s must be positive."""
        with pytest.raises(DomainError):
            omega_r(0.0, bss_family, 1, fast_cfg)

    def test_invalid_grid(self, bss_family):
        """Test that an even grid is rejected before any work."""
        with pytest.raises(GridError, match="odd"):
            omega_r(1.0, bss_family, 1, EnvelopeConfig(grid_n=40))
