import numpy as np
import pytest

from terraqd.features import (CorrelationError, FeatureDescriptor, FeaturePair,
                              correlation_csv, correlation_matrix, describe,
                              feature_map, pearson, window_roughness, window_tpi,
                              window_tri)
from terraqd.heightmap import DimensionError, Heightmap, normalize


def flat(n=16):
    return Heightmap(values=np.zeros((n, n)))


class TestWindowOps:
    def test_tri_spike(self):
        w = np.zeros((3, 3))
        w[1, 1] = 1.0
        assert window_tri(w) == pytest.approx(1.0)

    def test_tri_constant(self):
        assert window_tri(np.full((3, 3), 0.4)) == 0.0

    def test_tri_hand_sum(self):
        w = np.array([[0, 0, 0], [0, 0.5, 1], [1, 1, 1]])
        assert window_tri(w) == pytest.approx(0.5)

    def test_tpi_spike(self):
        w = np.zeros((3, 3))
        w[1, 1] = 1.0
        assert window_tpi(w) == pytest.approx(1.0)

    def test_tpi_sign_symmetry(self):
        w = np.ones((3, 3))
        w[1, 1] = 0.0
        assert window_tpi(w) == pytest.approx(-1.0)
        assert abs(window_tpi(w)) == pytest.approx(1.0)

    def test_roughness_mixed(self):
        w = np.array([[0, 1, 0], [1, 0.5, 1], [0, 1, 0]])
        assert window_roughness(w) == pytest.approx(0.5)

    def test_roughness_dominates_tri_and_abs_tpi(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            w = rng.random((5, 5))
            r = window_roughness(w)
            assert r >= window_tri(w) - 1e-15
            assert r >= abs(window_tpi(w)) - 1e-15


class TestDescribe:
    def test_flat_map_all_zero(self):
        for kind in ("TRI", "TPI", "Roughness"):
            assert describe(flat(), FeatureDescriptor(kind, kernel=3, stride=1)) == 0.0

    def test_spike_map_positive(self):
        v = np.zeros((8, 8))
        v[4, 4] = 1.0
        hm = Heightmap(values=v)
        d = FeatureDescriptor("TRI", kernel=3, stride=1)
        # brute-force oracle over every window
        total = 0.0
        count = 0
        for r in range(6):
            for c in range(6):
                total += window_tri(v[r : r + 3, c : c + 3])
                count += 1
        assert describe(hm, d) == pytest.approx(total / count)
        assert describe(hm, d) > 0.0

    def test_positive_homogeneity(self):
        rng = np.random.default_rng(1)
        v = rng.random((12, 12))
        for kind in ("TRI", "Roughness", "TPI"):
            d = FeatureDescriptor(kind, kernel=3, stride=1)
            full = describe(Heightmap(values=v), d)
            half = describe(Heightmap(values=0.5 * v), d)
            assert half == pytest.approx(0.5 * full, rel=1e-12)

    def test_translation_invariance(self):
        rng = np.random.default_rng(2)
        v = rng.random((12, 12)) * 0.5
        for kind in ("TRI", "Roughness", "TPI"):
            d = FeatureDescriptor(kind, kernel=5, stride=2)
            a = describe(Heightmap(values=v), d)
            b = describe(Heightmap(values=v + 0.4), d)
            assert b == pytest.approx(a, abs=1e-12)

    def test_non_negative(self):
        rng = np.random.default_rng(3)
        hm = normalize(rng.normal(size=(16, 16)))
        for kind in ("TRI", "TPI", "Roughness"):
            assert describe(hm, FeatureDescriptor(kind, kernel=3, stride=1)) >= 0.0

    def test_kernel_too_large(self):
        with pytest.raises(DimensionError):
            describe(flat(8), FeatureDescriptor("TRI", kernel=16, stride=1))

    def test_strided_equals_naive_on_random_rasters(self):
        rng = np.random.default_rng(4)
        fns = {"TRI": window_tri, "TPI": window_tpi, "Roughness": window_roughness}
        for _ in range(20):
            v = rng.random((16, 16))
            for kind, fn in fns.items():
                d = FeatureDescriptor(kind, kernel=5, stride=2)
                m = feature_map(Heightmap(values=v), d)
                naive = np.array([[fn(v[r : r + 5, c : c + 5])
                                   for c in range(0, 12, 2)] for r in range(0, 12, 2)])
                assert np.allclose(m, naive, atol=1e-12)


class TestPearson:
    def test_identity(self):
        x = [1.0, 2.0, 5.0]
        assert pearson(x, x) == pytest.approx(1.0)

    def test_anticorrelation(self):
        x = np.array([1.0, 2.0, 5.0])
        assert pearson(x, -x) == pytest.approx(-1.0)

    def test_hand_value(self):
        assert pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(0.9819805060619659)

    def test_zero_variance(self):
        with pytest.raises(CorrelationError):
            pearson([1, 1, 1], [1, 2, 3])


class TestCorrelationMatrix:
    def _corpus(self):
        rng = np.random.default_rng(5)
        hms = [normalize(rng.normal(size=(16, 16))) for _ in range(10)]
        diffs = list(rng.random(10))
        return hms, diffs

    def test_diagonal_and_symmetry(self):
        hms, diffs = self._corpus()
        descriptors = [FeatureDescriptor(k, kernel=3, stride=1)
                       for k in ("TRI", "TPI", "Roughness")]
        names, mat = correlation_matrix(hms, diffs, descriptors)
        assert names[-1] == "difficulty"
        assert np.allclose(np.diag(mat), 1.0)
        assert np.abs(mat - mat.T).max() < 1e-12

    def test_csv_header(self):
        hms, diffs = self._corpus()
        descriptors = [FeatureDescriptor("TRI", kernel=3, stride=1)]
        names, mat = correlation_matrix(hms, diffs, descriptors)
        csv_text = correlation_csv(names, mat)
        lines = csv_text.strip().split("\n")
        assert lines[0] == ",TRI(k=3),difficulty"
        assert len(lines) == 3

    def test_too_small_corpus(self):
        with pytest.raises(CorrelationError):
            correlation_matrix([flat()], [0.5], [FeatureDescriptor("TRI", kernel=3)])


class TestFeaturePair:
    def test_rejects_same_kind(self):
        with pytest.raises(ValueError):
            FeaturePair(FeatureDescriptor("TRI"), FeatureDescriptor("TRI"),
                        ((0, 1), (0, 1)))

    def test_rejects_degenerate_range(self):
        with pytest.raises(ValueError):
            FeaturePair(FeatureDescriptor("TRI"), FeatureDescriptor("TPI"),
                        ((0, 1), (1, 1)))
