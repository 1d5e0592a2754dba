import math

import numpy as np
import pytest

from chainclt.errors import NotPSD
from chainclt.function_class import interval_indicators, make_class, random_class
from chainclt.gaussian import (
    build_model,
    continuity_moduli,
    continuity_modulus,
    export_covariance,
    psd_repair,
    sample_gaussian,
    sup_expectation,
)
from chainclt.measure import make_space


class TestBuild:
    def test_bridge_two_point(self, two_point):
        m = build_model(two_point, [0, 1], "bridge")
        assert np.allclose(m.covariance, [[0, 0], [0, 3]], atol=1e-12)

    def test_isonormal_two_point(self, two_point):
        m = build_model(two_point, [0, 1], "isonormal")
        assert m.covariance[1, 1] == pytest.approx(3.0)
        assert np.all(m.covariance[0] == 0)

    def test_constant_degenerate_under_bridge(self):
        fc = make_class(make_space([0.2, 0.8]), [[1.0, 1.0], [1.0, 0.0]])
        m = build_model(fc, mode="bridge")
        assert m.covariance[0, 0] == pytest.approx(0.0, abs=1e-15)

    def test_not_psd(self):
        with pytest.raises(NotPSD):
            psd_repair(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_roundoff_repaired(self):
        cov = psd_repair(np.array([[1.0, 1.0], [1.0, 1.0 - 1e-13]]))
        assert np.linalg.eigvalsh(cov).min() >= -1e-15

    def test_rho2_consistency(self, rng):
        fc = random_class(rng, 8, 6)
        iso = build_model(fc, mode="isonormal")
        assert np.allclose(iso.rho2, fc.l2_distances, atol=1e-10)
        bridge = build_model(fc, mode="bridge")
        assert np.all(bridge.rho2 <= fc.l2_distances + 1e-10)

    def test_symmetric_psd(self, rng):
        for _ in range(10):
            m = build_model(random_class(rng, 12, 5), mode="bridge")
            assert np.array_equal(m.covariance, m.covariance.T)
            assert np.linalg.eigvalsh(m.covariance).min() >= -1e-10


class TestSampling:
    def test_zero_covariance(self):
        fc = make_class(make_space([1.0]), [[0.0]])
        assert np.all(sample_gaussian(build_model(fc), 50, 1) == 0)

    def test_variance_three(self, two_point):
        g = sample_gaussian(build_model(two_point, [1], "isonormal"), 10**5, 4)
        assert abs(g[:, 0].var(ddof=1) - 3.0) < 0.1

    def test_covariance_3d(self):
        fc = interval_indicators(4)
        m = build_model(fc, [1, 4, 7], "isonormal")
        g = sample_gaussian(m, 10**5, 5)
        assert np.max(np.abs(np.cov(g, rowvar=False) - m.covariance)) < 0.05

    def test_reproducible(self, two_point):
        m = build_model(two_point)
        assert np.array_equal(sample_gaussian(m, 3000, 2), sample_gaussian(m, 3000, 2))


class TestSup:
    def test_two_point_closed_form(self, two_point):
        est = sup_expectation(build_model(two_point, mode="isonormal"), 10**5, 6)
        want = math.sqrt(2 / math.pi) * math.sqrt(3)
        assert want == pytest.approx(1.38198, abs=1e-5)
        assert abs(est.mean - want) <= 3 * est.stderr

    def test_singleton(self):
        fc = make_class(make_space([1.0]), [[0.0]])
        assert sup_expectation(build_model(fc), 100, 1).mean == 0.0

    def test_monotone_in_class(self):
        fc = interval_indicators(6)
        full = build_model(fc, mode="isonormal")
        root = full.sqrt_factor
        z = np.random.default_rng(3).standard_normal((4000, fc.size))
        g = z @ root
        small = np.abs(g[:, :10]).max(axis=1)
        big = np.abs(g[:, :11]).max(axis=1)
        assert np.all(big >= small)


class TestModulus:
    def test_below_min_distance(self):
        m = build_model(interval_indicators(8), mode="isonormal")
        assert continuity_modulus(m, 0.1, 500, 1).mean == 0.0

    def test_all_pairs(self):
        fc = interval_indicators(4)
        m = build_model(fc, mode="isonormal")
        est = continuity_modulus(m, 10.0, 2000, 7)
        g = sample_gaussian(m, 2000, 7)
        rng_ = (g.max(axis=1) - g.min(axis=1)).mean()
        assert est.mean == pytest.approx(rng_, rel=1e-12)

    def test_nondecreasing(self):
        m = build_model(interval_indicators(8), mode="isonormal")
        est = continuity_moduli(m, [0.2, 0.4, 0.6, 0.8, 1.0], 2000, 9)
        means = [e.mean for e in est]
        assert all(b >= a for a, b in zip(means, means[1:]))

    def test_export(self, tmp_path, two_point):
        path = export_covariance(build_model(two_point), tmp_path / "cov.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "function,0,1" and len(lines) == 3
