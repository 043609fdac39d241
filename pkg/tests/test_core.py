"""Unit tests for distributions, information measures and charts."""

import math

import mpmath
import numpy as np
import pytest
from keyrate.core import (
    JointDist,
    ParamFamily,
    Variant,
    binary_convolution,
    binary_entropy,
    binary_erasure_source,
    binary_symmetric_source,
    chart_entries,
    check_xy_abs_continuity,
    compensated_sum,
    conditional_entropies,
    connected_components,
    entropy,
    grid_information,
    joint_entropy,
    joint_to_param,
    mutual_information,
    param_to_joint,
    product_distribution,
)
from keyrate.exceptions import (
    DomainError,
    InvalidDistributionError,
    NotAbsolutelyContinuousError,
    NotInLowerSetError,
    SingularParameterError,
)

def mp_binary_entropy(p: float) -> float:
    """Binary entropy in nats at 50 digits."""
    with mpmath.workdps(50):
        q = mpmath.mpf(p)
        return float(-q * mpmath.log(q) - (1 - q) * mpmath.log(1 - q))


class TestEntropy:
    """Tests for scalar entropies."""

    @pytest.mark.parametrize("p", [1e-12, 1e-3, 0.11, 0.5, 0.9999])
    def test_binary_entropy_oracle(self, p):
        """Test binary entropy against extended precision."""
        assert binary_entropy(p) == pytest.approx(mp_binary_entropy(p), rel=1e-14)

    def test_binary_entropy_endpoints(self):
        """Test the 0 ln 0 = 0 convention."""
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

    def test_binary_entropy_domain(self):
        """Test a probability outside [0, 1]."""
        with pytest.raises(DomainError, match="p=1.5"):
            binary_entropy(1.5)

    def test_entropy_uniform(self):
        """Test the entropy of a uniform distribution."""
        assert entropy([0.25] * 4) == pytest.approx(math.log(4), abs=1e-15)

    def test_entropy_zero_entries(self):
        """Test that zero entries contribute nothing."""
        assert entropy([0.5, 0.0, 0.5]) == pytest.approx(math.log(2), abs=1e-15)

    def test_binary_convolution(self):
        """Test the binary convolution."""
        assert binary_convolution(0.11, 0.5) == pytest.approx(0.5)
        assert binary_convolution(0.1, 0.2) == pytest.approx(0.26)


class TestJointDist:
    """Tests for `JointDist`."""

    def test_negative_entry(self):
        """Test that negative entries are rejected."""
        with pytest.raises(InvalidDistributionError, match="negative"):
            JointDist(np.array([[0.6, -0.1], [0.25, 0.25]]))

    def test_bad_sum(self):
        """Test that matrices not summing to one are rejected."""
        with pytest.raises(InvalidDistributionError, match="sums to"):
            JointDist(np.array([[0.5, 0.5], [0.5, 0.5]]))

    def test_renormalized_within_tolerance(self):
        """Test that tiny deviations are renormalized away."""
        joint = JointDist(np.array([[0.5 + 1e-12, 0.0], [0.0, 0.5]]))
        assert joint.matrix.sum() == pytest.approx(1.0, abs=1e-15)

    def test_read_only(self, bss):
        """Test that the matrix cannot be modified."""
        with pytest.raises(ValueError):
            bss.matrix[0, 0] = 1.0

    def test_labels(self):
        """Test default and mismatched labels."""
        joint = JointDist(np.array([[0.5, 0.5]]))
        assert joint.labels_x == ("0",)
        assert joint.labels_y == ("0", "1")
        with pytest.raises(InvalidDistributionError, match="Labels"):
            JointDist(np.array([[0.5, 0.5]]), ("a", "b"), ("c", "d"))

    def test_load(self, bss_path):
        """Test loading a distribution file."""
        joint = JointDist.load(bss_path)
        assert np.allclose(joint.matrix, binary_symmetric_source(0.11).matrix)
        assert joint.labels_y == ("0", "1")

    def test_load_malformed(self, malformed_path):
        """Test the line diagnostic of a JSON syntax error."""
        with pytest.raises(InvalidDistributionError, match=r"malformed\.json:4:\d+"):
            JointDist.load(malformed_path)

    def test_from_dict_missing_matrix(self):
        """Test a document without a matrix."""
        with pytest.raises(InvalidDistributionError, match="matrix"):
            JointDist.from_dict({"labels_x": ["0"]})

    def test_from_json_ragged(self):
        """Test a ragged matrix."""
        with pytest.raises(InvalidDistributionError):
            JointDist.from_json('{"matrix": [[0.5, 0.5], [0.0]]}')

    def test_dumps_loads(self, bss):
        """Test serialization preserves the matrix and labels."""
        joint = JointDist.from_json(bss.dumps())
        assert np.allclose(joint.matrix, bss.matrix, atol=1e-15)
        assert joint.labels_x == bss.labels_x

    def test_transpose(self):
        """Test that transposition swaps marginals."""
        joint = binary_erasure_source(0.2)
        transposed = joint.transpose()
        assert transposed.m == 3
        assert transposed.labels_x == ("0", "e", "1")
        assert np.allclose(transposed.p_x, joint.p_y, atol=1e-15)


class TestInformation:
    """Tests for information measures."""

    def test_bss(self, bss):
        """Test BSS entropies against closed forms."""
        h = binary_entropy(0.11)
        assert joint_entropy(bss) == pytest.approx(math.log(2) + h, abs=1e-14)
        assert mutual_information(bss) == pytest.approx(math.log(2) - h, abs=1e-14)
        h_x_given_y, h_y_given_x = conditional_entropies(bss)
        assert h_x_given_y == pytest.approx(h, abs=1e-14)
        assert h_y_given_x == pytest.approx(h, abs=1e-14)

    def test_independent(self):
        """Test that a product distribution has no mutual information."""
        joint = product_distribution([0.4, 0.6], [0.3, 0.7])
        assert mutual_information(joint) == pytest.approx(0.0, abs=1e-15)

    def test_mutual_information_nonnegative(self):
        """Test the clamp of roundoff negatives."""
        joint = product_distribution([1 / 3, 2 / 3], [1 / 7, 6 / 7])
        assert mutual_information(joint) >= 0.0

    def test_permutation_invariance(self):
        """Test that relabeling symbols leaves I(X;Y) unchanged."""
        rng = np.random.default_rng(7)
        matrix = rng.random((3, 4))
        matrix /= matrix.sum()
        joint = JointDist(matrix)
        permuted = JointDist(matrix[[2, 0, 1]][:, [3, 1, 0, 2]])
        assert mutual_information(joint) == pytest.approx(
            mutual_information(permuted), abs=1e-15
        )
        assert joint_entropy(joint) == pytest.approx(joint_entropy(permuted), abs=1e-15)

    def test_erasure(self):
        """Test the erasure source I(X;Y) = (1 - eps) ln 2."""
        joint = binary_erasure_source(0.2)
        assert joint.labels_y == ("0", "e", "1")
        assert mutual_information(joint) == pytest.approx(0.8 * math.log(2))

    def test_grid_information(self):
        """Test the stacked version against the scalar functions."""
        joints = [binary_symmetric_source(e) for e in (0.05, 0.2, 0.4)]
        entries = np.stack([joint.matrix for joint in joints])
        h_xy, info = grid_information(entries)
        for k, joint in enumerate(joints):
            assert h_xy[k] == pytest.approx(joint_entropy(joint), abs=1e-14)
            assert info[k] == pytest.approx(mutual_information(joint), abs=1e-14)


class TestCompensatedSum:
    """Tests for `compensated_sum`."""

    def test_cancellation(self):
        """Test a sum that loses the small term without compensation."""
        assert compensated_sum([1e16, 1.0, -1e16]) == 1.0

    def test_order_independent(self):
        """Test the result does not depend on the order of the terms."""
        terms = np.array([0.1, 0.7, -0.3, 1e-9, 2.5, -1.2])
        reordered = terms[[4, 2, 0, 5, 1, 3]]
        assert compensated_sum(terms) == compensated_sum(reordered)

    def test_axis(self):
        """Test summing along a chosen axis."""
        terms = np.arange(6.0).reshape(2, 3)
        assert np.array_equal(compensated_sum(terms, axis=0), [3.0, 5.0, 7.0])


class TestParamFamily:
    """Tests for the lower-set charts."""

    def test_base_is_bss(self, bss_family, bss):
        """Test the symmetric base point of the BSC-kernel chart."""
        assert np.allclose(bss_family.base_joint().matrix, bss.matrix, atol=1e-15)

    def test_variant_from_string(self):
        """Test that variants are accepted by value."""
        family = ParamFamily("support-three", 0.0, (0.5, 0.5))
        assert family.variant is Variant.SUPPORT_THREE

    def test_invalid_epsilon(self):
        """Test a crossover probability outside [0, 1]."""
        with pytest.raises(DomainError, match="epsilon"):
            ParamFamily.bsc_kernel(1.2)

    def test_singular_base(self):
        """Test a base point where the chart is undefined."""
        with pytest.raises(SingularParameterError):
            ParamFamily.support_three((0.0, 0.0))

    def test_transposed(self):
        """Test that transposing the source swaps the base point."""
        family = ParamFamily.bsc_kernel(0.11, (0.3, 0.6))
        transposed = family.transposed()
        assert transposed.base == (0.6, 0.3)
        assert np.allclose(
            transposed.base_joint().matrix, family.base_joint().matrix.T, atol=1e-15
        )

    @pytest.mark.parametrize(
        "family",
        [ParamFamily.bsc_kernel(0.11), ParamFamily.support_three()],
    )
    def test_chart_transpose_symmetry(self, family):
        """Test P(f, g)^T = P(g, f) on a grid."""
        axis = np.linspace(0.05, 0.95, 7)
        f, g = np.meshgrid(axis, axis, indexing="ij")
        raw, normalizer = chart_entries(family, f, g)
        raw_t, normalizer_t = chart_entries(family, g, f)
        assert np.allclose(raw, np.swapaxes(raw_t, -1, -2))
        assert np.allclose(normalizer, normalizer_t)

    @pytest.mark.parametrize(
        "family",
        [ParamFamily.bsc_kernel(0.11), ParamFamily.support_three()],
    )
    def test_round_trip(self, family):
        """Test that the chart inverse recovers the coordinates."""
        joint = param_to_joint(family, 0.3, 0.7)
        f, g = joint_to_param(family, joint)
        assert f == pytest.approx(0.3, abs=1e-12)
        assert g == pytest.approx(0.7, abs=1e-12)

    def test_support_three_closed_form(self):
        """Test the support-three chart entries."""
        joint = param_to_joint(ParamFamily.support_three(), 0.4, 0.5)
        normalizer = 0.6 * 0.5 + 0.4
        expected = np.array([[0.0, 0.3], [0.2, 0.2]]) / normalizer
        assert np.allclose(joint.matrix, expected)

    def test_not_in_lower_set(self):
        """Test distributions outside the image of a chart."""
        with pytest.raises(NotInLowerSetError):
            joint_to_param(
                ParamFamily.bsc_kernel(0.3), binary_symmetric_source(0.2)
            )
        with pytest.raises(NotInLowerSetError, match="P\\(0, 0\\) = 0"):
            joint_to_param(ParamFamily.support_three(), binary_symmetric_source(0.2))

    def test_inverse_needs_crossover(self):
        """Test that a noiseless kernel has no unique inverse."""
        family = ParamFamily.bsc_kernel(0.0)
        with pytest.raises(DomainError):
            joint_to_param(family, family.base_joint())


class TestGraph:
    """Tests for support graphs and XY-absolute continuity."""

    def test_bss_indecomposable(self, bss):
        """Test that a noisy BSS is indecomposable."""
        assert connected_components(bss).is_indecomposable

    def test_noiseless_decomposable(self):
        """Test that BSS(0) splits into two components."""
        components = connected_components(binary_symmetric_source(0.0))
        assert components.parts == (((0,), (0,)), ((1,), (1,)))
        assert not components.is_indecomposable

    def test_dead_symbol_excluded(self):
        """Test that a symbol without mass is not a vertex."""
        components = connected_components(JointDist(np.array([[0.5, 0.5], [0, 0]])))
        assert components.parts == (((0,), (0, 1)),)

    def test_erasure_connected(self):
        """Test that the erasure symbol links both inputs."""
        assert connected_components(binary_erasure_source(0.2)).is_indecomposable

    def test_factorization(self, bss_family):
        """Test that chart points factor against the base."""
        mu = bss_family.base_joint()
        nu = param_to_joint(bss_family, 0.3, 0.7)
        pair = check_xy_abs_continuity(nu, mu)
        assert pair is not None
        assert np.allclose(pair.density() * mu.matrix, nu.matrix, atol=1e-14)

    def test_not_factorizable(self, bss):
        """Test a density that is not rank one."""
        assert check_xy_abs_continuity(binary_symmetric_source(0.3), bss) is None

    def test_support_violation(self, support_three_family, bss):
        """Test nu charging a cell outside supp(mu)."""
        with pytest.raises(NotAbsolutelyContinuousError, match="supp"):
            check_xy_abs_continuity(bss, support_three_family.base_joint())

    def test_shape_mismatch(self, bss):
        """Test distributions on different alphabets."""
        with pytest.raises(NotAbsolutelyContinuousError, match="alphabets"):
            check_xy_abs_continuity(binary_erasure_source(0.2), bss)
