import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chainclt.chaining import build_admissible, gamma_functional
from chainclt.errors import BadU, ConfigError, LengthMismatch, LevelOutOfRange, SpaceMismatch
from chainclt.estimator import (
    DeviationConstants,
    EstimatorConfig,
    SqrtN,
    TailFrom,
    Universal,
    bernstein_tail,
    class_identity_threshold,
    cor15_constants,
    default_constants,
    exact_bias,
    expectation_bound_cor15,
    global_deviation_bound,
    global_failure_probability,
    identity_threshold,
    kept_masks,
    level_deviation_bound,
    level_failure_probability,
    modified_process,
    parse_rule,
    phi,
    phi_table,
    tail_deviation_bound,
    truncation_level,
)
from chainclt.function_class import interval_indicators, make_class, random_class
from chainclt.measure import Sample, draw_sample, expectation, lp_norm, make_space

seeds = st.integers(0, 2**32 - 1)
NS = [1, 2, 3, 5, 8, 20, 64, 300, 5000]


def rand_seq(seed, functions=20, atoms=10):
    rng = np.random.default_rng(seed)
    fc = random_class(rng, int(rng.integers(1, functions)), int(rng.integers(2, atoms)))
    return build_admissible(fc)


class TestConfig:
    def test_roundtrip(self):
        for rule in (SqrtN(), TailFrom(2), Universal(0.25), Universal(0.3, 2.0)):
            cfg = EstimatorConfig(16, 1.5, rule)
            assert EstimatorConfig.from_dict(cfg.to_dict()) == cfg

    def test_parse(self):
        assert parse_rule("sqrt_n") == SqrtN()
        assert parse_rule({"tail_from": 3}) == TailFrom(3)
        assert parse_rule({"universal": {"b_exponent": 0.25}}) == Universal(0.25)
        with pytest.raises(ConfigError):
            parse_rule("nope")

    def test_invalid(self):
        with pytest.raises(ConfigError):
            EstimatorConfig(0)
        with pytest.raises(ConfigError):
            EstimatorConfig(4, c0=0.0)
        with pytest.raises(ConfigError):
            TailFrom(-1)


class TestTruncationLevel:
    def test_zero_increment(self):
        fc = make_class(make_space([0.5, 0.5]), [[1, 1], [1, 1.0]])
        seq = build_admissible(make_class(fc.space, [[0, 0], [2, 2], [1, 1]]))
        dec = seq.decomposition
        zero = [(s, f) for s in range(1, seq.s_max + 1) for f in range(seq.fclass.size)
                if dec.l2_sq[s - 1, f] == 0]
        assert zero
        for s, f in zero:
            assert truncation_level(dec, f, s, EstimatorConfig(1)) == 0.0
        assert kept_masks(dec, EstimatorConfig(1))[[s - 1 for s, _ in zero], [f for _, f in zero]].all()

    def test_plug_in(self):
        sp = make_space([0.5, 0.5])
        seq = build_admissible(make_class(sp, [[1, -1]]))  # ||f||_2 = 1
        dec = seq.decomposition
        f = 1 - seq.fclass.anchor_index
        assert truncation_level(dec, f, 1, EstimatorConfig(4)) == pytest.approx(math.sqrt(2))
        cfg = EstimatorConfig(16, rule=Universal(0.25))
        assert truncation_level(dec, f, 1, cfg) == pytest.approx(math.sqrt(2))
        with pytest.raises(LevelOutOfRange):
            truncation_level(dec, f, 2, EstimatorConfig(4))


class TestPhi:
    def test_two_point_examples(self, two_point):
        seq = build_admissible(two_point)
        assert phi(seq, 1, EstimatorConfig(1)).values.tolist() == [0.0, -1.0]
        assert phi(seq, 1, EstimatorConfig(4)).values.tolist() == [0.0, -1.0]
        assert phi(seq, 1, EstimatorConfig(8)).values.tolist() == [3.0, -1.0]

    @given(seeds, st.floats(0.25, 4.0))
    def test_identity_regime(self, seed, c0):
        seq = rand_seq(seed)
        for f in range(seq.fclass.size):
            n0 = identity_threshold(seq, f, c0)
            for n in (n0, n0 + 1, 2 * n0 + 7):
                assert np.array_equal(phi(seq, f, EstimatorConfig(n, c0)).values,
                                      seq.fclass.values[f])

    @given(seeds, st.integers(1, 5000))
    def test_equals_sum_of_kept_increments(self, seed, n):
        seq = rand_seq(seed)
        cfg = EstimatorConfig(n)
        dec = seq.decomposition
        kept = kept_masks(dec, cfg)
        direct = np.where(kept, dec.increments, 0.0).sum(axis=0)
        assert np.max(np.abs(phi_table(seq, cfg) - direct)) <= 1e-12

    @given(seeds, st.integers(1, 5000), st.integers(0, 3))
    def test_tail_from(self, seed, n, s0):
        seq = rand_seq(seed)
        cfg = EstimatorConfig(n, rule=TailFrom(s0))
        dec = seq.decomposition
        kept = kept_masks(dec, cfg)
        kept[: min(s0, seq.s_max)] = False
        direct = np.where(kept, dec.increments, 0.0).sum(axis=0)
        assert np.max(np.abs(phi_table(seq, cfg) - direct)) <= 1e-12

    @given(seeds)
    def test_truncation_monotone_in_n(self, seed):
        seq = rand_seq(seed)
        dec = seq.decomposition
        masks = [kept_masks(dec, EstimatorConfig(n)) for n in NS]
        for a, b in zip(masks, masks[1:]):
            assert np.all(b | ~a)

    @given(seeds)
    def test_l2_gap_monotone_single_level(self, seed):
        rng = np.random.default_rng(seed)
        fc = random_class(rng, 1, int(rng.integers(2, 12)))
        seq = build_admissible(fc)
        f = 1 - fc.anchor_index
        gaps = [lp_norm(fc.space, phi_table(seq, EstimatorConfig(n))[f] - fc.values[f])
                for n in NS]
        assert all(y <= x + 1e-12 for x, y in zip(gaps, gaps[1:]))

    def test_l2_gap_can_grow_when_levels_cancel(self):
        # at one atom Delta_1 and Delta_2 have opposite signs: both are cut at n=2,
        # only Delta_2 at n=3, so the gap widens although the kept set grew
        seq = rand_seq(0)
        f = 11
        fc, dec = seq.fclass, seq.decomposition
        k2, k3 = (kept_masks(dec, EstimatorConfig(n))[:, f] for n in (2, 3))
        assert np.all(k3 | ~k2)
        gap2, gap3 = (lp_norm(fc.space, phi_table(seq, EstimatorConfig(n))[f] - fc.values[f])
                      for n in (2, 3))
        assert gap3 > gap2

    @given(seeds, st.integers(1, 2000))
    def test_l2_gap_bound(self, seed, n):
        seq = rand_seq(seed)
        cfg = EstimatorConfig(n)
        space, dec = seq.fclass.space, seq.decomposition
        cut = np.where(kept_masks(dec, cfg), 0.0, dec.increments)
        table = phi_table(seq, cfg)
        for f in range(seq.fclass.size):
            gap = lp_norm(space, seq.fclass.values[f] - table[f])
            for s0 in range(seq.s_max + 1):
                head = sum(lp_norm(space, cut[s, f]) for s in range(s0))
                tail = sum(dec.l2_norms[s, f] for s in range(s0, seq.s_max))
                assert gap <= head + tail + 1e-12


class TestProcess:
    def test_zero_function(self, rng):
        seq = build_admissible(interval_indicators(4))
        smp = draw_sample(seq.fclass.space, 10, 3)
        assert modified_process(smp, seq, seq.fclass.anchor_index, EstimatorConfig(10)) == 0.0

    def test_identity_regime_is_classical(self):
        seq = build_admissible(interval_indicators(4))
        n = class_identity_threshold(seq)
        smp = draw_sample(seq.fclass.space, n, 8)
        for f in range(seq.fclass.size):
            vals = seq.fclass.values[f]
            classical = math.sqrt(n) * (math.fsum(vals[smp.indices]) / n - seq.fclass.means[f])
            assert modified_process(smp, seq, f, EstimatorConfig(n)) == pytest.approx(classical, abs=1e-12)

    def test_errors(self, two_point):
        seq = build_admissible(two_point)
        other = draw_sample(make_space([0.5, 0.5]), 4, 1)
        with pytest.raises(SpaceMismatch):
            modified_process(other, seq, 1, EstimatorConfig(4))
        smp = draw_sample(two_point.space, 3, 1)
        with pytest.raises(LengthMismatch):
            modified_process(smp, seq, 1, EstimatorConfig(4))

    def test_two_atom_n2_exact_law(self, two_point):
        seq = build_admissible(two_point)
        cfg = EstimatorConfig(2)
        p = two_point.space.probs
        vals = phi_table(seq, cfg)[1]
        # enumerate the 4 outcomes by hand and compare with the process value
        law = {}
        for i in range(2):
            for j in range(2):
                smp = Sample(np.array([i, j]), 0, two_point.space.space_id)
                q = modified_process(smp, seq, 1, cfg)
                law[round(q, 12)] = law.get(round(q, 12), 0.0) + p[i] * p[j]
                assert q == pytest.approx(math.sqrt(2) * ((vals[i] + vals[j]) / 2), abs=1e-12)
        mean = sum(q * w for q, w in law.items())
        bias = math.sqrt(2) * expectation(two_point.space, vals)
        assert mean == pytest.approx(bias, abs=1e-12)


class TestBias:
    def test_identity_regime_zero(self):
        seq = build_admissible(interval_indicators(8))
        n0 = class_identity_threshold(seq)
        assert exact_bias(seq, EstimatorConfig(n0)).scaled_sup == 0.0

    def test_two_point(self, two_point):
        assert exact_bias(build_admissible(two_point), EstimatorConfig(1)).scaled_sup == pytest.approx(0.75)

    def test_chain_bound(self):
        seq = build_admissible(interval_indicators(8))
        for n in (1, 2, 4, 8, 16, 32):
            for c0 in (0.5, 1.0, 2.0):
                res = exact_bias(seq, EstimatorConfig(n, c0))
                bound = seq.decomposition.weighted_sums() / c0
                assert np.all(math.sqrt(n) * res.per_function <= bound + 1e-12)

    @given(seeds, st.integers(1, 3000), st.floats(0.25, 4.0))
    def test_tail_terms_pointwise(self, seed, n, c0):
        seq = rand_seq(seed)
        cfg = EstimatorConfig(n, c0)
        res = exact_bias(seq, cfg)
        dec = seq.decomposition
        for s in range(1, seq.s_max + 1):
            for f in range(seq.fclass.size):
                sq = dec.l2_sq[s - 1, f]
                if sq == 0:
                    assert res.tail_terms[s - 1, f] == 0
                    continue
                lam = truncation_level(dec, f, s, cfg)
                mid = sq / lam
                assert res.tail_terms[s - 1, f] <= mid * (1 + 1e-12)
                assert mid <= 2 ** (s / 2) * math.sqrt(sq) / (c0 * math.sqrt(n)) * (1 + 1e-12)


class TestBernstein:
    def test_vacuous_near_zero(self):
        assert bernstein_tail(1e-12, 10, 1.0, 1.0) == pytest.approx(2.0)
        assert bernstein_tail(0.0, 10, 1.0, 1.0) == 2.0

    def test_value(self):
        assert bernstein_tail(0.5, 100, 1.0, 1.0) == pytest.approx(2 * math.exp(-25 / (7 / 3)), rel=1e-12)
        assert bernstein_tail(0.5, 100, 1.0, 1.0) == pytest.approx(4.45e-5, rel=2e-3)

    @given(st.floats(0.01, 5), st.floats(0.01, 5), st.integers(1, 1000), st.floats(0, 4), st.floats(0.1, 4))
    def test_monotone(self, t1, t2, n, s2, m):
        lo, hi = sorted((t1, t2))
        assert bernstein_tail(hi, n, s2, m) <= bernstein_tail(lo, n, s2, m)
        assert bernstein_tail(lo, n + 1, s2, m) <= bernstein_tail(lo, n, s2, m)


class TestLevelBound:
    def test_linear_in_u(self):
        dec = build_admissible(interval_indicators(8)).decomposition
        a = level_deviation_bound(dec, 1.0, 1, 64)
        b = level_deviation_bound(dec, 2.0, 1, 64)
        assert np.allclose(b.thresholds, 2 * a.thresholds, rtol=1e-15)

    @given(st.floats(0.5001, 50), st.integers(1, 8), st.floats(0.25, 4))
    def test_failure_below_c2_form(self, u, s, c0):
        k = DeviationConstants.from_target(c0=c0, c2=1.0)
        assert k.c2 == pytest.approx(1.0)
        lhs = level_failure_probability(u, s, k)
        rhs = 2 * math.exp(-k.c2 * 2**s * min(u * u, u))
        assert lhs <= rhs * (1 + 1e-9)

    def test_exponent_matches_bernstein_substitution(self):
        # threshold t = c3 u 2^{s/2} ||D|| / sqrt(n), lambda = c0 sqrt(n) ||D|| / 2^{s/2},
        # sigma^2 <= ||D||^2 and |D' - E D'| <= 2 lambda
        k = default_constants()
        for n in (1, 17, 400):
            for s in (1, 3):
                for norm in (0.3, 2.0):
                    u = 1.3
                    t = k.c3 * u * 2 ** (s / 2) * norm / math.sqrt(n)
                    lam = k.c0 * math.sqrt(n) * norm / 2 ** (s / 2)
                    direct = bernstein_tail(t, n, norm**2, 2 * lam) * 2 ** (2 ** (s + 1))
                    assert level_failure_probability(u, s, k) == pytest.approx(direct, rel=1e-9)

    def test_bad_u(self):
        dec = build_admissible(interval_indicators(4)).decomposition
        with pytest.raises(BadU):
            level_deviation_bound(dec, 0.5, 1, 10)
        with pytest.raises(BadU):
            global_deviation_bound(0.4, 1.0, 10)


class TestGlobalBound:
    def test_scaling(self):
        assert global_deviation_bound(1.0, 2.0, 400) / global_deviation_bound(1.0, 2.0, 100) == pytest.approx(0.5)

    def test_singleton(self):
        seq = build_admissible(make_class(make_space([1.0]), [[0.0]]))
        assert global_deviation_bound(1.0, gamma_functional(seq), 50) == 0.0

    def test_failure_probability_and_tail(self):
        dec = build_admissible(interval_indicators(8)).decomposition
        p = global_failure_probability(1.0, 3)
        assert 0 <= p <= 1
        assert global_failure_probability(1.0, 3, s0=2) <= p
        assert tail_deviation_bound(dec, 1.0, 64, 3) == 0.0
        assert tail_deviation_bound(dec, 1.0, 64, 0) > tail_deviation_bound(dec, 1.0, 64, 2)


class TestCor15:
    def test_formula(self):
        assert expectation_bound_cor15(1.0, 0.0, 4, c=1.0) == 0.5

    @given(st.floats(0.1, 10), st.floats(0.1, 10), st.integers(1, 10**4))
    def test_crossover(self, g2, g1, n):
        term2, term1 = g2 / math.sqrt(n), g1 / n
        assert (term1 >= term2) == (n <= (g1 / g2) ** 2) or math.isclose(term1, term2)

    def test_constants(self):
        c_a, c_b = cor15_constants()
        assert 1.5 < c_a < 3 and 2 < c_b < 5
