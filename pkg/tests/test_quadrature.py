"""Tests for the Gauss-Legendre rules on (0,1) and the cube."""

import numpy as np
import pytest

from hexgram.errors import InvalidOrderError
from hexgram.quadrature import default_rule_order, gauss_rule, tensor_rule


class TestRule1D:
    def test_midpoint(self):
        r = gauss_rule(1)
        np.testing.assert_array_equal(r.nodes, [0.5])
        np.testing.assert_array_equal(r.weights, [1.0])

    def test_two_point(self):
        r = gauss_rule(2)
        half = 0.5 / np.sqrt(3.0)
        np.testing.assert_allclose(r.nodes, [0.5 - half, 0.5 + half], atol=1e-15)
        np.testing.assert_allclose(r.weights, [0.5, 0.5], atol=1e-15)

    def test_three_point_quintic(self):
        r = gauss_rule(3)
        val = np.sum(r.weights * r.nodes**5)
        assert abs(val - 1.0 / 6.0) < 1e-14

    @pytest.mark.parametrize("L", [1, 2, 3, 5, 8, 13, 21, 32])
    def test_weights_and_exactness(self, L):
        r = gauss_rule(L)
        assert abs(np.sum(r.weights) - 1.0) < 1e-14
        assert np.all(np.diff(r.nodes) > 0)
        assert np.all((r.nodes > 0) & (r.nodes < 1))
        assert np.all(r.weights > 0)
        for k in range(2 * L):
            val = np.sum(r.weights * r.nodes**k)
            assert abs(val - 1.0 / (k + 1)) < 1e-13, (L, k)

    @pytest.mark.parametrize("L", [2, 5, 9, 16])
    def test_against_numpy(self, L):
        # independent oracle: numpy's Golub-Welsch nodes mapped to (0,1)
        x, w = np.polynomial.legendre.leggauss(L)
        r = gauss_rule(L)
        np.testing.assert_allclose(r.nodes, 0.5 * (x + 1.0), atol=1e-14)
        np.testing.assert_allclose(r.weights, 0.5 * w, atol=1e-14)

    def test_range_errors(self):
        with pytest.raises(InvalidOrderError):
            gauss_rule(0)
        with pytest.raises(InvalidOrderError):
            gauss_rule(33)


class TestRule3D:
    def test_single_point(self):
        r = tensor_rule(1)
        np.testing.assert_array_equal(r.points, [[0.5, 0.5, 0.5]])
        np.testing.assert_array_equal(r.weights, [1.0])

    def test_two_point(self):
        r = tensor_rule(2)
        assert r.points.shape == (8, 3)
        np.testing.assert_allclose(r.weights, 0.125, atol=1e-15)
        val = np.sum(r.weights * r.points[:, 0] * r.points[:, 1] * r.points[:, 2])
        assert abs(val - 0.125) < 1e-14

    def test_product_weights_and_order(self):
        L = 4
        r1 = gauss_rule(L)
        r3 = tensor_rule(L)
        idx = 0
        for l in range(L):
            for m in range(L):
                for n in range(L):
                    assert r3.weights[idx] == r1.weights[l] * r1.weights[m] * r1.weights[n]
                    assert r3.points[idx, 0] == r1.nodes[l]
                    assert r3.points[idx, 2] == r1.nodes[n]
                    idx += 1

    @pytest.mark.parametrize("L", [2, 3, 4])
    def test_monomial_exactness(self, L):
        r = tensor_rule(L)
        for a in range(2 * L):
            for b in range(0, 2 * L, 2):
                for c in range(0, 2 * L, 3):
                    val = np.sum(
                        r.weights
                        * r.points[:, 0] ** a
                        * r.points[:, 1] ** b
                        * r.points[:, 2] ** c
                    )
                    exact = 1.0 / ((a + 1) * (b + 1) * (c + 1))
                    assert abs(val - exact) < 1e-13


def test_default_rule_order():
    assert default_rule_order("L2", (3, 2, 4)) == 4
    assert default_rule_order("H1", (3, 2, 4)) == 5
    assert default_rule_order("Hdiv", (2, 2, 2)) == 3
    assert default_rule_order("Hcurl", (5, 5, 5)) == 6
