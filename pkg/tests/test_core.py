"""Domain types: lattices, neighborhoods, configurations, payoffs."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import latticegames as lg
from oracles import oracle_neighborhood_count


class TestNeighborhoodSize:
    @pytest.mark.parametrize("M,d,expected", [(1, 1, 2), (1, 2, 8), (2, 3, 124)])
    def test_known_values(self, M, d, expected):
        assert lg.neighborhood_size(M, d) == expected

    @pytest.mark.parametrize("M,d", [(1, 1), (1, 3), (2, 2), (3, 1), (2, 3)])
    def test_matches_enumeration(self, M, d):
        assert lg.neighborhood_size(M, d) == oracle_neighborhood_count(M, d)

    @pytest.mark.parametrize("M,d", [(0, 1), (1, 0), (-1, 2)])
    def test_rejects_nonpositive(self, M, d):
        with pytest.raises(ValueError):
            lg.neighborhood_size(M, d)


class TestNeighborOffsets:
    def test_1d_nearest(self):
        assert lg.neighbor_offsets(1, 1) == ((-1,), (1,))

    def test_2d_moore_lexicographic(self):
        offs = lg.neighbor_offsets(1, 2)
        assert offs == ((-1, -1), (-1, 0), (-1, 1), (0, -1),
                        (0, 1), (1, -1), (1, 0), (1, 1))

    def test_excludes_center_and_counts(self):
        offs = lg.neighbor_offsets(2, 2)
        assert (0, 0) not in offs
        assert len(offs) == lg.neighborhood_size(2, 2)
        assert all(max(abs(o) for o in off) <= 2 for off in offs)


class TestLatticeSpec:
    def test_basic_properties(self):
        spec = lg.LatticeSpec(2, 1, (6, 8))
        assert spec.N == 8
        assert spec.nsites == 48
        assert spec.shape == (6, 8)

    def test_small_odd_torus_allowed(self):
        # neighborhoods stay proper sets down to L = 2M+1
        spec = lg.LatticeSpec(2, 1, (3, 3))
        assert spec.N == 8

    def test_rejects_window_wrap(self):
        with pytest.raises(ValueError):
            lg.LatticeSpec(1, 1, (2,))
        with pytest.raises(ValueError):
            lg.LatticeSpec(1, 2, (4,))

    def test_rejects_bad_dimension(self):
        with pytest.raises(ValueError):
            lg.LatticeSpec(0, 1, ())
        with pytest.raises(ValueError):
            lg.LatticeSpec(2, 1, (6,))

    def test_rejects_bad_M(self):
        with pytest.raises(ValueError):
            lg.LatticeSpec(1, 0, (6,))


class TestNeighbors:
    def test_1d_wraparound(self):
        spec = lg.LatticeSpec(1, 1, (6,))
        assert lg.neighbors(0, spec) == [5, 1]

    def test_1d_range_two(self):
        spec = lg.LatticeSpec(1, 2, (8,))
        assert lg.neighbors(0, spec) == [6, 7, 1, 2]

    def test_2d_moore(self):
        spec = lg.LatticeSpec(2, 1, (6, 6))
        nbrs = lg.neighbors((2, 3), spec)
        assert len(nbrs) == 8
        assert (1, 2) in nbrs and (3, 4) in nbrs and (2, 3) not in nbrs

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 47))
    def test_symmetry(self, flat):
        spec = lg.LatticeSpec(2, 1, (6, 8))
        x = (flat // 8, flat % 8)
        for y in lg.neighbors(x, spec):
            assert x in lg.neighbors(y, spec)

    def test_distinct_and_complete(self):
        spec = lg.LatticeSpec(2, 2, (6, 6))
        nbrs = lg.neighbors((0, 0), spec)
        assert len(set(nbrs)) == spec.N


class TestPayoffMatrix:
    def test_derived_quantities(self):
        A = lg.PayoffMatrix(-8, 3, 4, -8)
        assert A.a1 == -12 and A.a2 == -11
        assert A.max_abs == 8
        assert A.row(1) == (-8.0, 3.0) and A.row(2) == (4.0, -8.0)

    def test_swapped_involution(self):
        A = lg.PayoffMatrix(1, 2, 3, 4)
        assert A.swapped() == lg.PayoffMatrix(4, 3, 2, 1)
        assert A.swapped().swapped() == A

    def test_scaled(self):
        A = lg.PayoffMatrix(1, -2, 3, -4)
        assert A.scaled(2.0) == lg.PayoffMatrix(2, -4, 6, -8)

    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), "1", True])
    def test_rejects_nonfinite(self, bad):
        with pytest.raises((TypeError, ValueError)):
            lg.PayoffMatrix(bad, 0, 0, 0)


class TestConfiguration:
    def setup_method(self):
        self.spec = lg.LatticeSpec(1, 1, (8,))

    def test_uniform(self):
        cfg = lg.Configuration.uniform(self.spec, 1)
        assert cfg.is_uniform() and cfg.count1() == 8 and cfg.density1() == 1.0

    def test_bernoulli_extremes(self):
        rng = lg.rng_stream(0, 0)
        assert lg.Configuration.bernoulli(self.spec, 1.0, rng).count1() == 8
        assert lg.Configuration.bernoulli(self.spec, 0.0, rng).count1() == 0

    def test_halfspace(self):
        cfg = lg.Configuration.halfspace(self.spec)
        assert list(cfg.strategies) == [1, 1, 1, 1, 2, 2, 2, 2]

    def test_halfspace_rejects_odd_side(self):
        with pytest.raises(ValueError):
            lg.Configuration.halfspace(lg.LatticeSpec(1, 1, (9,)))

    def test_halfspace_2d_leading_axis(self):
        spec = lg.LatticeSpec(2, 1, (6, 6))
        cfg = lg.Configuration.halfspace(spec)
        assert np.all(cfg.strategies[:3] == 1) and np.all(cfg.strategies[3:] == 2)

    def test_single_site(self):
        cfg = lg.Configuration.single_site(self.spec, 2, (3,))
        assert cfg[3] == 2 and cfg.count1() == 7

    def test_get_set_copy(self):
        cfg = lg.Configuration.uniform(self.spec, 1)
        cfg[2] = 2
        dup = cfg.copy()
        dup[2] = 1
        assert cfg[2] == 2 and dup[2] == 1

    def test_swapped(self):
        cfg = lg.Configuration.single_site(self.spec, 2, (0,))
        sw = cfg.swapped()
        assert sw[0] == 1 and sw.count1() == 1

    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            lg.Configuration(self.spec, np.zeros(8, dtype=np.int8))
        with pytest.raises(ValueError):
            lg.Configuration(self.spec, np.ones((4,), dtype=np.int8))


class TestLocalPayoff:
    def test_all_same_neighbors(self):
        spec = lg.LatticeSpec(1, 1, (8,))
        A = lg.PayoffMatrix(-8, 3, 4, -8)
        cfg = lg.Configuration.uniform(spec, 1)
        assert lg.local_payoff(0, cfg, A) == -8.0

    def test_all_opposite_neighbors(self):
        spec = lg.LatticeSpec(1, 1, (8,))
        A = lg.PayoffMatrix(-8, 3, 4, -8)
        cfg = lg.Configuration.single_site(spec, 1, (0,))
        assert lg.local_payoff(0, cfg, A) == 3.0

    def test_mixed_neighbors(self):
        spec = lg.LatticeSpec(1, 1, (8,))
        A = lg.PayoffMatrix(1.0, 2.0, 3.0, 5.0)
        cfg = lg.Configuration.uniform(spec, 2)
        cfg[1] = 1
        # site 0 plays 2 against neighbors {1, 2}
        assert lg.local_payoff(0, cfg, A) == (3.0 + 5.0) / 2

    def test_fractions_denominator_exact(self):
        spec = lg.LatticeSpec(2, 1, (6, 6))
        cfg = lg.Configuration.halfspace(spec)
        for x in [(0, 0), (2, 5), (3, 1)]:
            n1, n2 = lg.neighbor_strategy_counts(x, cfg)
            assert n1 + n2 == spec.N

    def test_translation_invariance(self):
        spec = lg.LatticeSpec(1, 1, (10,))
        A = lg.PayoffMatrix(0.3, -1.7, 2.2, -0.4)
        rng = lg.rng_stream(5, 0)
        cfg = lg.Configuration.bernoulli(spec, 0.5, rng)
        rolled = lg.Configuration(spec, np.roll(cfg.strategies, 3))
        for x in range(10):
            assert lg.local_payoff(x, cfg, A) == pytest.approx(
                lg.local_payoff((x + 3) % 10, rolled, A))

    def test_label_swap_symmetry(self):
        spec = lg.LatticeSpec(1, 1, (10,))
        A = lg.PayoffMatrix(0.3, -1.7, 2.2, -0.4)
        rng = lg.rng_stream(6, 0)
        cfg = lg.Configuration.bernoulli(spec, 0.5, rng)
        for x in range(10):
            assert lg.local_payoff(x, cfg, A) == lg.local_payoff(
                x, cfg.swapped(), A.swapped())

    def test_linearity(self):
        spec = lg.LatticeSpec(1, 1, (10,))
        A = lg.PayoffMatrix(0.3, -1.7, 2.2, -0.4)
        rng = lg.rng_stream(7, 0)
        cfg = lg.Configuration.bernoulli(spec, 0.5, rng)
        for x in range(10):
            assert lg.local_payoff(x, cfg, A.scaled(3.0)) == pytest.approx(
                3.0 * lg.local_payoff(x, cfg, A))


class TestStrategyNature:
    def test_both_selfish(self):
        nat = lg.strategy_nature(lg.PayoffMatrix(1, 0, 0, 1))
        assert nat.nature1 is lg.Nature.SELFISH
        assert nat.nature2 is lg.Nature.SELFISH

    def test_both_altruistic(self):
        nat = lg.strategy_nature(lg.PayoffMatrix(-8, 3, 4, -8))
        assert nat.nature1 is lg.Nature.ALTRUISTIC
        assert nat.nature2 is lg.Nature.ALTRUISTIC

    def test_neutral_boundary(self):
        nat = lg.strategy_nature(lg.PayoffMatrix(2, 0, 2, 1))
        assert nat.nature1 is lg.Nature.NEUTRAL
