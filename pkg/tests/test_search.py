import numpy as np
import pytest

import framekit as fk
from framekit.erasures import Measure
from conftest import random_block_frame, random_psd, random_parseval_frame

CFG = fk.SearchConfig(max_iters=500, restarts=3, seed=99)


class TestMinimizeMeasure:
    def test_rank_deficient_example_spectral(self, ex1):
        frame, op = ex1
        result = fk.minimize_measure(frame, op, Measure.SPECTRAL, CFG)
        assert result.value == pytest.approx(1.0, abs=1e-9)
        assert result.value == pytest.approx(
            fk.min_r1_fixed_frame(frame, op), abs=1e-6
        )

    def test_full_rank_example_op_norm_returns_canonical(self, ex2):
        frame, op = ex2
        result = fk.minimize_measure(frame, op, Measure.OP_NORM, CFG)
        canonical = fk.canonical_k_dual(frame, op)
        assert result.value == pytest.approx(1.0, abs=1e-9)
        assert np.max(np.abs(result.frame.synthesis - canonical.synthesis)) <= 1e-9

    def test_onb_zero_dof(self):
        frame = fk.build_frame(np.eye(3))
        op = fk.build_operator(np.eye(3))
        result = fk.minimize_measure(frame, op, Measure.OP_NORM, CFG)
        assert np.allclose(result.frame.synthesis, np.eye(3))
        assert result.value == pytest.approx(1.0, abs=1e-14)

    def test_result_is_verified_dual(self, ex1):
        frame, op = ex1
        result = fk.minimize_measure(frame, op, Measure.OP_NORM, CFG)
        assert (
            fk.verify_k_dual(frame, result.frame, op)
            is not fk.DualKind.NOT_DUAL
        )

    def test_polyak_target_does_not_undershoot(self, ex1):
        frame, op = ex1
        result = fk.minimize_measure(
            frame, op, Measure.SPECTRAL, CFG, target=1.0
        )
        assert result.value >= 1.0 - 1e-12

    def test_requires_parseval(self):
        frame = fk.build_frame(np.eye(2))
        op = fk.build_operator(2 * np.eye(2))
        with pytest.raises(fk.NotParsevalError):
            fk.minimize_measure(frame, op, Measure.OP_NORM, CFG)

    def test_determinism(self, ex1):
        frame, op = ex1
        a = fk.minimize_measure(frame, op, Measure.SPECTRAL, CFG)
        b = fk.minimize_measure(frame, op, Measure.SPECTRAL, CFG)
        assert a.trace == b.trace
        assert a.value == b.value
        assert np.array_equal(a.frame.synthesis, b.frame.synthesis)

    def test_bound_respect_random(self):
        rng = np.random.default_rng(31)
        for _ in range(8):
            n = int(rng.integers(2, 4))
            N = int(rng.integers(n, 7))
            op = fk.build_operator(random_psd(rng, n))
            frame = random_parseval_frame(rng, op, N)
            result = fk.minimize_measure(frame, op, Measure.SPECTRAL, CFG)
            assert result.value >= op.trace / N - 1e-9

    def test_block_frame_accuracy(self):
        rng = np.random.default_rng(5)
        frame, op, _ = random_block_frame(rng)
        closed = fk.min_r1_fixed_frame(frame, op)
        result = fk.minimize_measure(frame, op, Measure.SPECTRAL, CFG)
        assert result.value == pytest.approx(closed, abs=1e-6)


class TestMinimizeR2WithinUniform:
    def test_mercedes(self, mb):
        frame, op = mb
        result = fk.minimize_r2_within_uniform(frame, op, CFG)
        assert result.value == pytest.approx(1.0, abs=1e-9)
        assert result.comparison["pair_r2_min"] == pytest.approx(1.0, abs=1e-12)

    def test_onb(self):
        frame = fk.build_frame(np.eye(3))
        op = fk.build_operator(np.eye(3))
        result = fk.minimize_r2_within_uniform(frame, op, CFG)
        assert result.value == pytest.approx(1.0, abs=1e-12)

    def test_uniform_slice_respects_pair_bound(self):
        rng = np.random.default_rng(8)
        op = fk.build_operator(np.eye(2))
        frame = random_parseval_frame(rng, op, 4)
        try:
            result = fk.minimize_r2_within_uniform(frame, op, CFG)
        except fk.InfeasibleError:
            pytest.skip("no 1-uniform dual for this draw")
        bound = fk.pair_bounds(op, 4).r2_min
        assert result.value >= bound - 1e-6
        # returned dual really is 1-uniform
        ds = fk.build_dual_system(frame, result.frame, op)
        c, _ = fk.uniformity(ds, tol=1e-6)
        assert c is not None

    def test_infeasible(self, ex1):
        # the last diagonal inner product is pinned at 1 for every dual,
        # so a constant diagonal of trace(K)/N = 3/4 is unreachable
        frame, op = ex1
        with pytest.raises(fk.InfeasibleError):
            fk.minimize_r2_within_uniform(frame, op, CFG)


class TestGridOracle:
    def test_full_rank_example(self, ex2):
        frame, op = ex2
        grid = fk.brute_force_grid_oracle(frame, op, Measure.OP_NORM, CFG)
        assert grid.value == pytest.approx(1.0, abs=1e-9)
        assert grid.num_minimizers == 1
        assert all(c == 0 for c in grid.coefficients)

    def test_zero_dof(self):
        frame = fk.build_frame(np.eye(3))
        op = fk.build_operator(np.eye(3))
        grid = fk.brute_force_grid_oracle(frame, op, Measure.OP_NORM, CFG)
        assert grid.value == pytest.approx(1.0)
        assert grid.coefficients == ()

    def test_dof_cap(self, ex1):
        frame, op = ex1  # dof = 6 > default cap 4
        with pytest.raises(fk.DofTooLargeError):
            fk.brute_force_grid_oracle(frame, op, Measure.OP_NORM, CFG)

    def test_oracle_agreement(self, ex2, mb):
        for frame, op in (ex2, mb):
            for kind in (Measure.OP_NORM, Measure.SPECTRAL):
                grid = fk.brute_force_grid_oracle(frame, op, kind, CFG)
                result = fk.minimize_measure(frame, op, kind, CFG)
                assert result.value <= grid.value + 1e-6


class TestSearchConfig:
    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            fk.SearchConfig(max_iters=0)
        with pytest.raises(ValueError):
            fk.SearchConfig(restarts=0)

    def test_rejects_negative_seed(self):
        with pytest.raises(ValueError):
            fk.SearchConfig(seed=-1)
