import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from cdmaps.errors import InvalidInput
from cdmaps.kernels import (
    KernelParams,
    complex_kernel,
    gaussian_kernel,
    kernel_values,
    omega_from_ratio,
    pairwise_sq_distances,
)


def brute_sq_distances(X):
    n = len(X)
    out = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            out[i][j] = sum((a - b) ** 2 for a, b in zip(X[i], X[j]))
    return np.array(out)


class TestParams:
    def test_omega_unit(self):
        for th in np.linspace(-math.pi / 2, 0, 17):
            assert abs(abs(KernelParams(1.0, th).omega) - 1) <= 1e-12

    def test_endpoints_exact(self):
        assert KernelParams(1.0, 0.0).omega == 1 + 0j
        assert KernelParams(1.0, -math.pi / 2).omega == -1j

    @pytest.mark.parametrize("sigma, theta", [(0, 0), (-1, 0), (float("nan"), 0),
                                              (1, 0.1), (1, -2.0)])
    def test_rejects(self, sigma, theta):
        with pytest.raises(InvalidInput):
            KernelParams(sigma, theta)

    def test_from_omega(self):
        p = KernelParams.from_omega(2.0, omega_from_ratio(0.1, 0.5))
        assert p.theta == pytest.approx(math.atan2(-0.5, 0.1))


class TestDistances:
    def test_hand_1d(self, backend):
        assert np.array_equal(pairwise_sq_distances([[0.0], [3.0]]), [[0, 9], [9, 0]])

    def test_hand_2d(self, backend):
        D2 = pairwise_sq_distances([[1, 0], [0, 1], [1, 1]])
        assert (D2[0, 1], D2[0, 2], D2[1, 2]) == (2, 1, 1)

    def test_matches_brute_force(self, backend, rng):
        X = rng.standard_normal((12, 7))
        np.testing.assert_allclose(pairwise_sq_distances(X), brute_sq_distances(X.tolist()),
                                   rtol=1e-13, atol=1e-13)

    def test_wide_rows_compensated(self, backend, rng):
        X = rng.standard_normal((3, 20_001)) * 1e3
        expect = np.array([[math.fsum((X[i] - X[j]) ** 2) for j in range(3)] for i in range(3)])
        np.testing.assert_allclose(pairwise_sq_distances(X), expect, rtol=1e-14)

    def test_rejects_nonfinite(self, backend):
        with pytest.raises(InvalidInput):
            pairwise_sq_distances([[0.0], [np.inf]])

    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(2, 8), st.integers(1, 5)),
                  elements=st.floats(-1e3, 1e3)))
    def test_structure(self, X):
        D2 = pairwise_sq_distances(X)
        assert np.array_equal(D2, D2.T)
        assert np.all(np.diag(D2) == 0)
        assert np.all(D2 >= 0)


class TestComplexKernel:
    def test_zero_distance(self, backend):
        K = complex_kernel(np.zeros((3, 3)), KernelParams(0.7, -1.0))
        assert np.all(K == 1 + 0j)

    def test_gaussian_value(self, backend):
        K = complex_kernel(np.array([[0, 4.0], [4.0, 0]]), KernelParams(2.0, 0.0))
        assert K[0, 1] == pytest.approx(math.exp(-1), abs=1e-15)
        assert K[0, 1].imag == 0

    def test_schrodinger_pure_phase(self, backend):
        K = complex_kernel(np.array([[0, math.pi], [math.pi, 0]]),
                           KernelParams(1.0, -math.pi / 2))
        assert abs(K[0, 1] - (-1 + 0j)) <= 1e-15

    def test_against_cmath(self, backend, rng):
        X = rng.standard_normal((9, 3))
        D2 = pairwise_sq_distances(X)
        p = KernelParams(1.3, -0.6)
        K = complex_kernel(D2, p)
        for i in range(9):
            for j in range(9):
                assert abs(K[i, j] - cmath.exp(-p.omega * D2[i, j] / p.sigma ** 2)) <= 1e-14

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-math.pi / 2, 0), st.floats(0.1, 10), st.integers(0, 2 ** 32 - 1))
    def test_invariants(self, theta, sigma, seed):
        X = np.random.default_rng(seed).standard_normal((6, 3))
        D2 = pairwise_sq_distances(X)
        p = KernelParams(sigma, theta)
        K = complex_kernel(D2, p)
        assert np.array_equal(K, K.T)                 # complex symmetric, bitwise
        assert np.all(np.diag(K) == 1)
        r = D2 / sigma ** 2
        np.testing.assert_allclose(np.abs(K), np.exp(-math.cos(theta) * r), rtol=1e-12, atol=1e-300)
        assert np.all(np.abs(K) <= 1 + 1e-15)
        # phase is -sin(theta) * D2 / sigma^2 (mod 2 pi)
        expected = np.exp(1j * (-math.sin(theta) * r))
        mask = np.abs(K) > 1e-100
        np.testing.assert_allclose(K[mask] / np.abs(K[mask]), expected[mask], atol=1e-9)

    def test_magnitude_monotone(self):
        d = np.linspace(0, 10, 50)
        for th in (0.0, -0.3, -1.2):
            mags = np.abs(kernel_values(d, KernelParams(1.0, th)))
            assert np.all(np.diff(mags) <= 0)
        mags = np.abs(kernel_values(d, KernelParams(1.0, -math.pi / 2)))
        np.testing.assert_allclose(mags, 1.0, atol=1e-15)

    def test_theta_zero_is_gaussian(self, backend, rng):
        D2 = pairwise_sq_distances(rng.standard_normal((15, 4)))
        K = complex_kernel(D2, KernelParams(1.7, 0.0))
        assert np.max(np.abs(K - gaussian_kernel(D2, 1.7))) <= 1e-14
        assert np.all(K.imag == 0)

    def test_only_upper_triangle_used(self, backend):
        D2 = np.array([[0, 1.0], [5.0, 0]])
        K = complex_kernel(D2, KernelParams(1.0, -0.5))
        assert K[1, 0] == K[0, 1]


class TestOmegaFromRatio:
    def test_amplitude_phase_weights(self):
        w = omega_from_ratio(0.1, 0.5)
        expect = complex(0.1, -0.5) / math.sqrt(0.26)
        assert abs(w - expect) <= 1e-15
        assert w.real == pytest.approx(0.196116, abs=1e-6)
        assert w.imag == pytest.approx(-0.980581, abs=1e-6)

    def test_limits(self):
        assert omega_from_ratio(1, 0) == 1
        assert omega_from_ratio(0, 1) == -1j

    def test_zero_rejected(self):
        with pytest.raises(InvalidInput):
            omega_from_ratio(0, 0)

    @given(st.floats(0, 100), st.floats(0, 100))
    def test_unit_and_range(self, a, b):
        if a == 0 and b == 0:
            return
        w = omega_from_ratio(a, b)
        assert abs(abs(w) - 1) <= 1e-12
        assert -math.pi / 2 <= cmath.phase(w) <= 0
