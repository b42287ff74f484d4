import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cdmaps.errors import InvalidInput
from cdmaps.synth import (
    double_center_embed,
    gaussian,
    gen_noisy_sinusoids,
    gen_three_class,
    gen_three_point,
    make_rng,
    stack_order_p,
)


class TestRandomness:
    def test_streams_independent(self):
        a = gaussian(make_rng(0, 1), 5)
        b = gaussian(make_rng(0, 2), 5)
        assert not np.array_equal(a, b)
        assert np.array_equal(a, gaussian(make_rng(0, 1), 5))

    def test_gaussian_moments(self):
        z = gaussian(make_rng(3, 1), 200_000)
        assert abs(z.mean()) < 0.01 and abs(z.std() - 1) < 0.01
        assert np.all(np.isfinite(z))


class TestThreePoint:
    def test_default(self):
        D2 = gen_three_point()
        assert D2.tolist() == [[0, 1, 9], [1, 0, 9], [9, 9, 0]]

    def test_custom(self):
        D2 = gen_three_point(0.5, 2.0)
        assert (D2[0, 1], D2[0, 2]) == (0.25, 4.0)

    def test_rejects(self):
        with pytest.raises(InvalidInput):
            gen_three_point(3.0, 1.0)


class TestThreeClass:
    def test_defaults(self):
        ds = gen_three_class()
        assert ds.X.shape[0] == 300
        assert np.array_equal(np.bincount(ds.labels), [100, 100, 100])
        assert ds.n_classes == 3

    def test_embedding_dimension_regression(self):
        # pinned from this implementation for the default seed
        assert gen_three_class(seed=0).X.shape == (300, 164)

    def test_final_matrix(self):
        D = gen_three_class(n_per=10, seed=4).extras["D_final"]
        assert np.array_equal(D, D.T)
        assert np.all(np.diag(D) == 0)
        assert D.min() >= 0 and D.max() <= 0.1 + 0.5

    def test_noiseless_structure(self):
        ds = gen_three_class(n_per=5, eta=0.0)
        D = ds.extras["D"]
        off = ~np.eye(15, dtype=bool)
        assert len(np.unique(D[off])) == 3
        # symmetrising per-column class blends gives one value per unordered class pair
        assert len(np.unique(ds.extras["D_final"][off])) == 6

    def test_deterministic(self):
        a, b = gen_three_class(n_per=8, seed=11), gen_three_class(n_per=8, seed=11)
        assert np.array_equal(a.X, b.X)
        assert not np.array_equal(a.X, gen_three_class(n_per=8, seed=12).X)


class TestDoubleCenter:
    def test_euclidean_recovers_distances(self):
        P = np.random.default_rng(0).standard_normal((10, 3))
        D2 = ((P[:, None] - P[None]) ** 2).sum(-1)
        X = double_center_embed(D2)
        assert X.shape == (10, 3)
        D2x = ((X[:, None] - X[None]) ** 2).sum(-1)
        np.testing.assert_allclose(D2x, D2, atol=1e-10)


class TestSinusoids:
    def test_shapes(self):
        ds = gen_noisy_sinusoids()
        assert ds.X.shape == (80, 1000)
        assert np.array_equal(np.bincount(ds.labels), [20] * 4)

    def test_noiseless_rows_identical(self):
        ds = gen_noisy_sinusoids(eps=0.0, n_per=3, T_samples=50)
        for c in range(4):
            rows = ds.X[ds.labels == c]
            assert np.all(rows == rows[0])
        np.testing.assert_allclose(ds.X[0], np.sin(2 * math.pi * np.arange(50) * 0.01))

    def test_fft_peak(self):
        ds = gen_noisy_sinusoids(eps=0.1, n_per=2, seed=3)
        freqs = np.fft.rfftfreq(1000, d=0.01)
        for row, c in zip(ds.X, ds.labels):
            peak = freqs[np.argmax(np.abs(np.fft.rfft(row)))]
            assert peak == pytest.approx([1.0, 1.1, 2.0, 2.1][c], abs=1e-9)

    def test_noise_scale(self):
        a = gen_noisy_sinusoids(eps=0.0, seed=1).X
        b = gen_noisy_sinusoids(eps=0.5, seed=1).X
        assert (b - a).std() == pytest.approx(0.5, rel=0.02)


class TestStacking:
    def test_example(self):
        X = np.arange(1.0, 5.0)[:, None]
        S = stack_order_p(X, 2)
        assert S.tolist() == [[1, 2], [2, 3], [3, 4]]

    def test_p_one_identity(self):
        X = np.random.default_rng(0).standard_normal((5, 3))
        assert np.array_equal(stack_order_p(X, 1), X)

    def test_too_short(self):
        with pytest.raises(InvalidInput):
            stack_order_p(np.zeros((3, 2)), 3)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 15), st.integers(1, 4), st.integers(1, 5))
    def test_shape_law(self, T, M, p):
        X = np.arange(T * M, dtype=float).reshape(T, M)
        if T <= p:
            with pytest.raises(InvalidInput):
                stack_order_p(X, p)
            return
        S = stack_order_p(X, p)
        assert S.shape == (T - p + 1, p * M)
        for k in range(p):
            assert np.array_equal(S[:, k * M:(k + 1) * M], X[k:k + T - p + 1])
