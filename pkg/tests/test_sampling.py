import numpy as np
import pytest

from zoomcurse.sampling import (BLOCK_ROWS, DiagonalGaussianSampler,
                                EquicorrelatedSampler, SampleBank, TableSampler,
                                draw_bank, m_statistic, mc_order_index,
                                mc_quantile)


class TestEquicorrelatedSampler:
    def test_validation(self):
        with pytest.raises(ValueError):
            EquicorrelatedSampler(0, 0.0)
        with pytest.raises(ValueError):
            EquicorrelatedSampler(3, 1.0)
        with pytest.raises(ValueError):
            EquicorrelatedSampler(3, -0.1)

    def test_moments(self):
        s = EquicorrelatedSampler(4, 0.6)
        x = s.draw(np.random.default_rng(0), 200_000)
        assert x.shape == (200_000, 4)
        assert np.allclose(x.std(axis=0), 1.0, atol=0.02)
        corr = np.corrcoef(x.T)
        off = corr[~np.eye(4, dtype=bool)]
        assert np.allclose(off, 0.6, atol=0.02)

    def test_rho_zero_is_independent_stream(self):
        # same generator state, rho=0: output equals the z-block alone
        s = EquicorrelatedSampler(3, 0.0)
        rng = np.random.default_rng(42)
        rng.standard_normal(5)  # burn the shared-factor block
        expected = rng.standard_normal((5, 3))
        got = s.draw(np.random.default_rng(42), 5)
        np.testing.assert_allclose(got, expected, rtol=1e-15)
        assert s.exchangeable


class TestDiagonalGaussianSampler:
    def test_scaling(self):
        s = DiagonalGaussianSampler((1.0, 3.0))
        x = s.draw(np.random.default_rng(1), 100_000)
        assert np.allclose(x.std(axis=0), [1.0, 3.0], rtol=0.03)
        assert not s.exchangeable
        assert DiagonalGaussianSampler((2.0, 2.0)).exchangeable

    def test_validation(self):
        with pytest.raises(ValueError):
            DiagonalGaussianSampler(())
        with pytest.raises(ValueError):
            DiagonalGaussianSampler((1.0, 0.0))


class TestTableSampler:
    def test_passthrough_rows(self):
        rows = np.arange(12.0).reshape(4, 3)
        s = TableSampler(rows)
        np.testing.assert_array_equal(s.draw(np.random.default_rng(0), 2), rows[:2])
        with pytest.raises(ValueError):
            s.draw(np.random.default_rng(0), 5)
        assert not s.exchangeable

    def test_validation(self):
        with pytest.raises(ValueError):
            TableSampler(np.ones(3))
        with pytest.raises(ValueError):
            TableSampler(np.array([[1.0, np.nan]]))


class TestDrawBank:
    def test_deterministic_and_seed_sensitive(self):
        s = EquicorrelatedSampler(2, 0.3)
        a = draw_bank(s, 1000, seed=7)
        b = draw_bank(s, 1000, seed=7)
        c = draw_bank(s, 1000, seed=8)
        np.testing.assert_array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, c.samples)

    def test_prefix_property_across_blocks(self):
        # growing the bank must never change the rows already drawn
        s = EquicorrelatedSampler(2, 0.0)
        small = draw_bank(s, BLOCK_ROWS + 10, seed=3)
        big = draw_bank(s, BLOCK_ROWS + 500, seed=3)
        np.testing.assert_array_equal(small.samples, big.samples[:BLOCK_ROWS + 10])

    def test_bank_is_read_only(self):
        bank = draw_bank(EquicorrelatedSampler(2, 0.0), 10, seed=0)
        with pytest.raises(ValueError):
            bank.samples[0, 0] = 99.0
        assert bank.n == 10 and bank.m == 2

    def test_table_passthrough(self):
        rows = np.arange(6.0).reshape(3, 2)
        bank = draw_bank(TableSampler(rows), 3, seed=0)
        np.testing.assert_array_equal(bank.samples, rows)


class TestMStatistic:
    def test_hand_example(self):
        samples = np.array([[3.0, -1.0], [0.5, 2.0]])
        out = m_statistic(samples, np.array([2.0, 5.0]))
        # row 1: only |3| clears its half-gap 1; row 2: nothing clears
        np.testing.assert_array_equal(out, [3.0, 0.0])

    def test_infinite_gap_knocks_out_coordinate(self):
        samples = np.array([[9.0, 1.0]])
        out = m_statistic(samples, np.array([np.inf, 0.0]))
        np.testing.assert_array_equal(out, [1.0])

    def test_zero_gaps_give_row_max_abs(self):
        rng = np.random.default_rng(2)
        samples = rng.standard_normal((50, 4))
        out = m_statistic(samples, np.zeros(4))
        np.testing.assert_allclose(out, np.abs(samples).max(axis=1), rtol=1e-15)

    def test_validation(self):
        with pytest.raises(ValueError):
            m_statistic(np.ones((2, 2)), np.array([1.0]))
        with pytest.raises(ValueError):
            m_statistic(np.ones((2, 2)), np.array([1.0, -1.0]))
        with pytest.raises(ValueError):
            m_statistic(np.ones((2, 2)), np.array([1.0, np.nan]))


class TestMcQuantile:
    def test_order_index(self):
        assert mc_order_index(0.9, 10) == 9
        assert mc_order_index(0.95, 10) == 10
        assert mc_order_index(0.9, 100_000) == 90_000  # float round-up guard
        assert mc_order_index(1e-9, 5) == 1
        with pytest.raises(ValueError):
            mc_order_index(1.0, 10)
        with pytest.raises(ValueError):
            mc_order_index(0.5, 0)

    def test_quantile_is_exact_order_statistic(self):
        rng = np.random.default_rng(3)
        values = rng.standard_normal(1001)
        for level in (0.5, 0.9, 0.975):
            k = mc_order_index(level, 1001)
            assert mc_quantile(values, level) == np.sort(values)[k - 1]

    def test_quantile_conservative_side(self):
        values = np.arange(1.0, 11.0)  # 1..10
        assert mc_quantile(values, 0.9) == 9.0
        assert mc_quantile(values, 0.901) == 10.0

    def test_validation(self):
        with pytest.raises(ValueError):
            mc_quantile(np.array([]), 0.5)
        with pytest.raises(ValueError):
            mc_quantile(np.array([1.0, np.nan]), 0.5)
