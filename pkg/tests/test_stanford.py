import math

import numpy as np
import pytest

from altbound.errors import (
    AlphaTooLarge,
    BudgetExceeded,
    DeterminantNotOne,
    GammaIsOne,
    MaxStepsExceeded,
    ZeroVector,
)
from altbound.linalg import NormKind, determinant, op_norm
from altbound.stanford import (
    SectorConfig,
    build_counterexample,
    check_products_lower_bound,
    contraction_factor,
    counterexample_pointwise_run,
    greedy_divergence_probe,
    make_incommensurable,
    make_stanford,
    rotation_matrix,
    squeeze_matrix,
    stabilize_pointwise,
)

Q0 = 0.7329304734406691  # sqrt(1/4 + 4 tan^2 15deg)


def unit_vectors(count, seed=42):
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, 2.0 * math.pi, count)
    return np.column_stack([np.cos(angles), np.sin(angles)])


class TestMakeStanford:
    def test_base_pair_matrices(self, squeeze, rotation_m30):
        pair, params = make_stanford(1.0)
        np.testing.assert_allclose(pair[0], squeeze, atol=0)
        np.testing.assert_allclose(pair[1], rotation_m30, atol=1e-15)
        assert params.alpha == 1.0
        assert params.q == pytest.approx(Q0, abs=1e-12)

    def test_scaled_q(self):
        _, params = make_stanford(1.02)
        assert params.q == pytest.approx(Q0 * 1.02**7, abs=1e-12)
        assert params.q < 1.0

    def test_alpha_too_large(self):
        with pytest.raises(AlphaTooLarge):
            make_stanford(1.10)

    def test_alpha_below_one_rejected(self):
        with pytest.raises(ValueError):
            make_stanford(0.9)

    def test_certified_factor_dominates_sector_maximum(self, squeeze):
        # numeric maximization of ||squeeze v|| over unit v in the sector:
        # the closed form must upper-bound it to stay a valid certificate
        half = math.pi / 12
        thetas = np.linspace(-half, half, 200_001)
        vals = np.sqrt(0.25 * np.cos(thetas) ** 2 + 4.0 * np.sin(thetas) ** 2)
        numeric_max = float(vals.max())
        assert numeric_max == pytest.approx(0.7079564731706163, abs=1e-9)
        assert numeric_max <= contraction_factor(1.0) + 1e-12


class TestSectorConfig:
    def test_default_half_angle(self):
        assert SectorConfig().half_angle == pytest.approx(math.pi / 12)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            SectorConfig(half_angle=math.pi / 3)

    @pytest.mark.parametrize(
        "angle,inside",
        [
            (0.0, True),
            (math.pi / 12, True),  # boundary counts as inside
            (math.pi / 10, False),
            (math.pi, True),
            (math.pi + math.pi / 12, True),
            (math.pi / 2, False),
            (-math.pi / 24, True),
        ],
    )
    def test_membership(self, angle, inside):
        v = np.array([math.cos(angle), math.sin(angle)])
        assert SectorConfig().contains(v) is inside


class TestStabilizePointwise:
    def test_on_axis_squeezes_only(self):
        _, params = make_stanford(1.0)
        trace = stabilize_pointwise(params, [1.0, 0.0], 0.5)
        assert trace.indices == (0,)
        np.testing.assert_allclose(trace.vectors[-1], [0.5, 0.0], atol=1e-15)

    def test_on_axis_two_blocks(self):
        # target 0.4 needs a second squeeze: 0.5 is still above it
        _, params = make_stanford(1.0)
        trace = stabilize_pointwise(params, [1.0, 0.0], 0.4)
        assert trace.indices == (0, 0)
        np.testing.assert_allclose(trace.vectors[-1], [0.25, 0.0], atol=1e-15)

    def test_vertical_start_rotates_to_axis(self):
        _, params = make_stanford(1.0)
        trace = stabilize_pointwise(params, [0.0, 1.0], 0.51)
        assert trace.indices == (1, 1, 1, 0)
        np.testing.assert_allclose(trace.vectors[-2], [1.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(trace.vectors[-1], [0.5, 0.0], atol=1e-12)

    def test_blocks_contract_and_rotations_stay_short(self):
        _, params = make_stanford(1.0)
        for x in unit_vectors(200, seed=7):
            trace = stabilize_pointwise(params, x, 1e-6, max_steps=200)
            assert trace.norms[-1] <= 1e-6
            norms = trace.norms
            block_start = 0
            consecutive = 0
            for step, idx in enumerate(trace.indices, start=1):
                if idx == 1:
                    consecutive += 1
                    assert consecutive <= 6
                else:
                    factor = norms[step] / norms[block_start]
                    assert factor <= params.q + 1e-9
                    block_start = step
                    consecutive = 0

    def test_zero_vector_rejected(self):
        _, params = make_stanford(1.0)
        with pytest.raises(ZeroVector):
            stabilize_pointwise(params, [0.0, 0.0], 0.5)

    def test_max_steps_exceeded(self):
        _, params = make_stanford(1.0)
        with pytest.raises(MaxStepsExceeded):
            stabilize_pointwise(params, [0.0, 1.0], 1e-9, max_steps=2)


class TestProductsLowerBound:
    def test_unscaled_floor_is_one(self):
        pair, _ = make_stanford(1.0)
        assert check_products_lower_bound(pair, 10) >= 1.0 - 1e-9

    def test_scaled_floor(self):
        pair, _ = make_stanford(1.02)
        assert check_products_lower_bound(pair, 10) >= 1.02**10 - 1e-9

    def test_single_factor_minimum_is_rotation_norm(self):
        pair, _ = make_stanford(1.02)
        # the scaled rotation has Euclidean norm alpha; the squeeze 2 alpha
        assert check_products_lower_bound(pair, 1) == pytest.approx(1.02, abs=1e-12)

    def test_budget(self):
        pair, _ = make_stanford(1.0)
        with pytest.raises(BudgetExceeded):
            check_products_lower_bound(pair, 20, node_budget=1000)


class TestBuildCounterexample:
    def test_identity_a_gives_scaled_pair_as_b(self):
        sys_ce = build_counterexample([np.eye(2)], alpha=1.02)
        pair, _ = make_stanford(1.02)
        assert len(sys_ce.b_set) == 2
        np.testing.assert_allclose(sys_ce.b_set[0], pair[0], atol=1e-15)
        np.testing.assert_allclose(sys_ce.b_set[1], pair[1], atol=1e-15)
        assert sys_ce.norm is NormKind.EUCLIDEAN

    def test_shear_gives_four_b_matrices(self):
        shear = [[1.0, 1.0], [0.0, 1.0]]
        sys_ce = build_counterexample([np.eye(2), shear], alpha=1.02)
        assert len(sys_ce.b_set) == 4
        for b in sys_ce.b_set:
            assert determinant(b) == pytest.approx(1.0404, abs=1e-12)

    def test_rejects_wrong_determinant(self):
        with pytest.raises(DeterminantNotOne):
            build_counterexample([2.0 * np.eye(2)])

    def test_rejects_alpha_outside_certificate(self):
        with pytest.raises(AlphaTooLarge):
            build_counterexample([np.eye(2)], alpha=1.2)


class TestCounterexampleRun:
    def test_identity_schedule_reduces_to_stabilizer(self):
        sys_ce = build_counterexample([np.eye(2)], alpha=1.02)
        _, params = make_stanford(1.02)
        run = counterexample_pointwise_run(sys_ce, [0], [0.3, 0.9], 1e-3)
        reference = stabilize_pointwise(params, [0.3, 0.9], 1e-3)
        assert run.h_indices == reference.indices
        np.testing.assert_allclose(run.vectors, reference.vectors, atol=1e-12)

    def test_mixed_schedule_contracts_vector_while_norm_grows(self):
        shear = [[1.0, 1.0], [0.0, 1.0]]
        sys_ce = build_counterexample([np.eye(2), shear], alpha=1.02)
        run = counterexample_pointwise_run(sys_ce, [0, 1], [0.0, 1.0], 1e-3)
        assert run.norms[-1] <= 1e-3
        for k, norm in enumerate(run.trace.prefix_norms, start=1):
            assert norm >= 1.02**k - 1e-9

    def test_cancellation_identity(self):
        shear = [[1.0, 1.0], [0.0, 1.0]]
        sys_ce = build_counterexample([np.eye(2), shear], alpha=1.02)
        pair, _ = make_stanford(1.02)
        run = counterexample_pointwise_run(sys_ce, [1, 0, 0], [0.2, -0.7], 1e-3)
        product = np.eye(2)
        h_product = np.eye(2)
        for ai, bi, hi in zip(run.trace.a_indices, run.trace.b_indices, run.h_indices):
            product = sys_ce.step_factor(ai, bi) @ product
            h_product = pair[hi] @ h_product
        np.testing.assert_allclose(product, h_product, atol=1e-9)

    def test_zero_vector_rejected(self):
        sys_ce = build_counterexample([np.eye(2)])
        with pytest.raises(ZeroVector):
            counterexample_pointwise_run(sys_ce, [0], [0.0, 0.0], 1e-3)


class TestIncommensurable:
    def test_determinants_are_one(self):
        first, second = make_incommensurable(1.0, math.sqrt(2.0), gamma=2.0)
        assert determinant(first) == pytest.approx(1.0, abs=1e-12)
        assert determinant(second) == pytest.approx(1.0, abs=1e-12)

    def test_gamma_one_rejected(self):
        with pytest.raises(GammaIsOne):
            make_incommensurable(1.0, 2.0, gamma=1.0)

    def test_gamma_must_be_positive(self):
        with pytest.raises(ValueError):
            make_incommensurable(1.0, 2.0, gamma=-2.0)

    def test_product_floor_up_to_length_twelve(self):
        pair = make_incommensurable(1.0, math.sqrt(2.0), gamma=2.0)
        for n in (6, 12):
            assert check_products_lower_bound(pair, n) >= 1.0 - 1e-9


class TestDivergenceProbe:
    def test_doubling_matrix_diverges(self):
        norms = greedy_divergence_probe((2.0 * np.eye(2), np.eye(2)), [1.0, 0.0], 8)
        assert norms[-1] == pytest.approx(2.0**8)

    def test_incommensurable_pair_norm_growth_is_monitored(self):
        pair = make_incommensurable(1.0, math.sqrt(2.0), gamma=2.0)
        norms = greedy_divergence_probe(pair, [1.0, 1.0], 40)
        assert norms.shape == (41,)
        assert np.isfinite(norms).all()
        # greedy choices never shrink what a single best step can reach
        assert norms[-1] >= norms[0] - 1e-12

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVector):
            greedy_divergence_probe((np.eye(2), np.eye(2)), [0.0, 0.0], 3)
