import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chainclt.errors import EmptyClass, LengthMismatch, MassOverflow
from chainclt.function_class import (
    FunctionClass,
    HeavyTailSpec,
    heavy_tail_pair,
    interval_indicators,
    make_class,
    pairwise_l2,
    random_class,
)
from chainclt.measure import expectation, lp_norm, make_space

HALF = make_space([0.5, 0.5])


class TestMakeClass:
    def test_inserts_zero(self):
        fc = make_class(HALF, [[1, -1]])
        assert fc.size == 2
        assert np.all(fc.values[fc.anchor_index] == 0)

    def test_existing_zero_is_anchor(self):
        fc = make_class(HALF, [[0, 0], [1, -1]])
        assert fc.size == 2 and fc.anchor_index == 0

    def test_dedup(self):
        assert make_class(HALF, [[1, -1], [1, -1]]).size == 2

    def test_order_preserved(self):
        fc = make_class(HALF, [[2, 2], [1, -1], [2, 2], [0, 0]])
        assert fc.values.tolist() == [[2, 2], [1, -1], [0, 0]]

    def test_errors(self):
        with pytest.raises(LengthMismatch):
            make_class(HALF, [[1, 2, 3]])
        with pytest.raises(EmptyClass):
            make_class(HALF, np.zeros((0, 2)))

    def test_json_roundtrip(self, rng):
        fc = random_class(rng, 5, 4)
        again = FunctionClass.from_dict(fc.to_dict())
        assert np.array_equal(again.values, fc.values)
        assert again.anchor_index == fc.anchor_index


class TestPairwise:
    def test_two_point(self, two_point):
        d = pairwise_l2(two_point)
        assert d[0, 1] == pytest.approx(math.sqrt(3), abs=1e-12)

    def test_diagonal_zero_and_symmetric(self, rng):
        fc = random_class(rng, 10, 6)
        d = pairwise_l2(fc)
        assert np.all(np.diag(d) == 0) and np.array_equal(d, d.T)

    @given(st.integers(0, 2**32 - 1))
    def test_triangle_exhaustive(self, seed):
        fc = random_class(np.random.default_rng(seed), 10, 5)
        d = fc.l2_distances
        for i, j, k in itertools.product(range(fc.size), repeat=3):
            assert d[i, k] <= d[i, j] + d[j, k] + 1e-12

    def test_matches_lp_norm(self, rng):
        fc = random_class(rng, 6, 7)
        for i, j in itertools.combinations(range(fc.size), 2):
            want = lp_norm(fc.space, fc.values[i] - fc.values[j], 2)
            assert fc.l2_distances[i, j] == pytest.approx(want, rel=1e-12)


class TestIntervalIndicators:
    def test_d2(self):
        assert interval_indicators(2).values.tolist() == [[0, 0], [1, 0], [1, 1], [0, 1]]

    def test_d3_size(self):
        assert interval_indicators(3).size == 7

    @pytest.mark.parametrize("d", [2, 4, 8, 16])
    def test_size_range_and_norms(self, d):
        fc = interval_indicators(d)
        assert fc.size == d * (d + 1) // 2 + 1
        assert set(np.unique(fc.values)) <= {0.0, 1.0}
        for row in fc.values:
            nz = np.flatnonzero(row)
            if nz.size:
                assert lp_norm(fc.space, row, 2) ** 2 == pytest.approx((nz.size) / d, abs=1e-15)


class TestHeavyTail:
    def test_single_atom(self):
        spec = HeavyTailSpec(b_exponent=0.25, a_decay=(1.0,), K=1, mass_scale=0.5)
        space, fc = heavy_tail_pair(spec)
        assert space.probs.tolist() == [0.5, 0.5]
        assert fc.values[1 - fc.anchor_index].tolist() == [0.0, 1.0]

    def test_total_mass(self):
        space, _ = heavy_tail_pair()
        assert math.fsum(space.probs) == pytest.approx(1.0, abs=1e-12)
        assert math.fsum(space.probs[1:]) <= 0.5

    def test_second_moment_partial_sum(self):
        spec = HeavyTailSpec()
        space, fc = heavy_tail_pair(spec)
        f = fc.values[1]
        lhs = expectation(space, f**2)
        k = np.arange(1, spec.K + 1, dtype=float)
        rhs = spec.mass_scale * math.fsum(np.abs(spec.a()) / k)
        assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_b_nondecreasing(self):
        spec = HeavyTailSpec()
        assert np.all(np.diff(spec.b(spec.ks)) >= 0)

    def test_overflow(self):
        with pytest.raises(MassOverflow):
            heavy_tail_pair(HeavyTailSpec(a_decay="log2", mass_scale=1.0))

    def test_tail_functional_increasing(self):
        # for a K-truncated tail T(m) peaks near K/21, so test up to K/32
        spec = HeavyTailSpec()
        ms = [2**j for j in range(4, 10)] + list(range(1024, spec.K // 32 + 1, 128))
        t = [spec.tail_functional(m) for m in ms]
        assert all(b > a for a, b in zip(t, t[1:]))

    def test_tail_functional_matches_expectation(self):
        spec = HeavyTailSpec(K=2**10)
        space, fc = heavy_tail_pair(spec)
        f = fc.values[1]
        for m in (16, 100):
            want = math.sqrt(m) * expectation(space, f * (f > spec.b(m)))
            assert spec.tail_functional(m) == pytest.approx(want, rel=1e-10)
