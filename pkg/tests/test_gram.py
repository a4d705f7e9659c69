"""Tests for the twelve Gram backends: values, counters and structure."""

import numpy as np
import pytest

from hexgram.errors import SimplificationNotApplicableError
from hexgram.geometry import eval_geometry, identity_map, preset_map
from hexgram.gram import (
    gram,
    gram_block,
    gram_conventional,
    gram_simplified,
    gram_tensorized,
)
from hexgram.quadrature import default_rule_order, gauss_rule, tensor_rule
from hexgram.spaces import SpaceSignature, dim, shape3_tables

SPACES = ("L2", "H1", "Hdiv", "Hcurl")
MAPS = ("identity", "diagonal-affine", "general-affine", "extrusion", "trilinear")


def quadrature_oracle(sig, emap, L):
    """Dense quadrature of the inner-product integrand, independent of the
    kernel code paths (pure numpy contractions)."""
    r = tensor_rule(L)
    pts, wts = r.points, r.weights
    vals, deriv = shape3_tables(sig, pts)
    geo = [eval_geometry(emap, p) for p in pts]
    det = np.array([g.detJ for g in geo])
    if sig.space == "L2":
        return np.einsum("q,qi,qj->ij", wts / det, vals, vals)
    D = np.array([g.D for g in geo])
    C = np.array([g.C for g in geo])
    if sig.space == "H1":
        return np.einsum("q,qi,qj->ij", wts * det, vals, vals) + np.einsum(
            "q,qia,qab,qjb->ij", wts * det, deriv, D, deriv
        )
    if sig.space == "Hdiv":
        return np.einsum("q,qia,qab,qjb->ij", wts / det, vals, C, vals) + np.einsum(
            "q,qi,qj->ij", wts / det, deriv, deriv
        )
    return np.einsum("q,qia,qab,qjb->ij", wts * det, vals, D, vals) + np.einsum(
        "q,qia,qab,qjb->ij", wts / det, deriv, C, deriv
    )


class TestConventional:
    def test_l2_unit(self):
        sig = SpaceSignature("L2", (1, 1, 1))
        res = gram_conventional(sig, identity_map(), tensor_rule(1))
        np.testing.assert_array_equal(res.matrix, [[1.0]])

    def test_l2_scaled(self):
        sig = SpaceSignature("L2", (1, 1, 1))
        res = gram_conventional(sig, preset_map("diagonal-affine"), tensor_rule(1))
        np.testing.assert_allclose(res.matrix, [[0.5]], atol=1e-15)

    def test_h1_vertex_diagonal(self):
        sig = SpaceSignature("H1", (1, 1, 1))
        res = gram_conventional(sig, identity_map(), tensor_rule(2))
        assert res.matrix[0, 0] == pytest.approx(1.0 / 27.0 + 1.0 / 3.0, abs=1e-14)

    @pytest.mark.parametrize("space", SPACES)
    @pytest.mark.parametrize("mapname", MAPS)
    def test_against_oracle(self, space, mapname):
        sig = SpaceSignature(space, (2, 2, 2))
        emap = preset_map(mapname)
        L = default_rule_order(space, sig.orders)
        res = gram_conventional(sig, emap, tensor_rule(L))
        ref = quadrature_oracle(sig, emap, L)
        scale = np.max(np.abs(ref))
        assert np.max(np.abs(res.matrix - ref)) <= 1e-13 * scale

    def test_accumulation_counter(self):
        for p in (2, 3, 4):
            sig = SpaceSignature("L2", (p, p, p))
            res = gram_conventional(sig, identity_map(), tensor_rule(p))
            assert res.counters.accumulations == p**6 * (p**3 + 1) // 2
            assert res.counters.geometry_calls == p**3
            assert res.counters.shape3_calls == p**3
            assert res.counters.shape1_calls == 0


class TestTensorized:
    def test_bit_identical_trivial_case(self):
        sig = SpaceSignature("L2", (1, 1, 1))
        a = gram_conventional(sig, identity_map(), tensor_rule(1)).matrix
        b = gram_tensorized(sig, identity_map(), gauss_rule(1)).matrix
        assert a[0, 0] == b[0, 0] == 1.0

    @pytest.mark.parametrize("space", SPACES)
    @pytest.mark.parametrize("mapname", MAPS)
    def test_matches_conventional(self, space, mapname):
        sig = SpaceSignature(space, (2, 3, 2))
        emap = preset_map(mapname)
        L = default_rule_order(space, sig.orders)
        ref = gram_conventional(sig, emap, tensor_rule(L)).matrix
        scale = np.max(np.abs(ref))
        for order in ("standard", "alternative"):
            got = gram_tensorized(sig, emap, gauss_rule(L), order).matrix
            assert np.max(np.abs(got - ref)) <= 1e-12 * scale, (space, mapname, order)

    @pytest.mark.parametrize("space", SPACES)
    def test_loop_orders_identical(self, space):
        sig = SpaceSignature(space, (2, 3, 4))
        emap = preset_map("trilinear")
        L = default_rule_order(space, sig.orders)
        a = gram_tensorized(sig, emap, gauss_rule(L), "standard")
        b = gram_tensorized(sig, emap, gauss_rule(L), "alternative")
        np.testing.assert_array_equal(a.matrix, b.matrix)
        assert a.counters.accumulations == b.counters.accumulations
        assert a.counters.geometry_calls > b.counters.geometry_calls

    def test_final_accumulation_counter(self):
        for p in (2, 3, 4, 5):
            sig = SpaceSignature("L2", (p, p, p))
            res = gram_tensorized(sig, identity_map(), gauss_rule(p), "standard")
            assert res.counters.accumulations == p * (p * (p + 1) // 2) ** 3

    def test_geometry_call_scaling(self):
        p = 4
        sig = SpaceSignature("L2", (p, p, p))
        std = gram_tensorized(sig, identity_map(), gauss_rule(p), "standard")
        alt = gram_tensorized(sig, identity_map(), gauss_rule(p), "alternative")
        assert std.counters.geometry_calls == p**3 * (p * (p + 1) // 2)
        assert alt.counters.geometry_calls == p**3


class TestSimplified:
    def test_l2_scaled_map(self):
        sig = SpaceSignature("L2", (1, 1, 1))
        res = gram_simplified(sig, preset_map("diagonal-affine"))
        np.testing.assert_allclose(res.matrix, [[0.5]], atol=1e-15)
        assert res.counters.geometry_calls == 1

    def test_l2_identity_is_diagonal(self):
        sig = SpaceSignature("L2", (2, 2, 2))
        res = gram_simplified(sig, identity_map())
        expect = np.zeros((8, 8))
        for I in range(8):
            i1, i2, i3 = I % 2, (I // 2) % 2, I // 4
            expect[I, I] = 1.0 / ((2 * i1 + 1) * (2 * i2 + 1) * (2 * i3 + 1))
        np.testing.assert_allclose(res.matrix, expect, atol=1e-15)

    @pytest.mark.parametrize("space", SPACES)
    @pytest.mark.parametrize("mapname", ["identity", "diagonal-affine", "general-affine"])
    def test_constant_jacobian_matches_conventional(self, space, mapname):
        sig = SpaceSignature(space, (3, 2, 3))
        emap = preset_map(mapname)
        L = default_rule_order(space, sig.orders)
        ref = gram_conventional(sig, emap, tensor_rule(L)).matrix
        got = gram_simplified(sig, emap).matrix
        assert np.max(np.abs(got - ref)) <= 1e-12 * np.max(np.abs(ref))

    @pytest.mark.parametrize("space", SPACES)
    def test_extrusion_matches_conventional(self, space):
        sig = SpaceSignature(space, (2, 3, 2))
        emap = preset_map("extrusion")
        L = default_rule_order(space, sig.orders)
        ref = gram_conventional(sig, emap, tensor_rule(L)).matrix
        got = gram_simplified(sig, emap, rule1d=gauss_rule(L)).matrix
        assert np.max(np.abs(got - ref)) <= 1e-11 * np.max(np.abs(ref))

    def test_rejects_general_map(self):
        sig = SpaceSignature("L2", (2, 2, 2))
        with pytest.raises(SimplificationNotApplicableError):
            gram_simplified(sig, preset_map("trilinear"))


class TestStructure:
    @pytest.mark.parametrize("space", SPACES)
    @pytest.mark.parametrize("backend", ["conventional", "tensorized", "simplified"])
    def test_symmetric_and_spd(self, space, backend):
        sig = SpaceSignature(space, (2, 2, 2))
        emap = preset_map("extrusion" if backend == "simplified" else "trilinear")
        res = gram(sig, emap, backend)
        np.testing.assert_array_equal(res.matrix, res.matrix.T)
        res.cholesky()  # raises if not SPD

    def test_divergence_term_is_l2_gram(self):
        """The standalone div-div part of the H(div) Gram equals the L2 Gram
        of the (signed, shifted) Legendre products (master-element identity)."""
        from hexgram.spaces import flat_to_multi

        p = 2
        emap = preset_map("trilinear")
        sig_v = SpaceSignature("Hdiv", (p, p, p))
        sig_y = SpaceSignature("L2", (p, p, p))
        L = p + 1
        r = tensor_rule(L)
        vals, divs = shape3_tables(sig_v, r.points)
        det = np.array([eval_geometry(emap, q).detJ for q in r.points])
        Tdiv = np.einsum("q,qi,qj->ij", r.weights / det, divs, divs)
        Gl2 = gram_conventional(sig_y, emap, tensor_rule(L)).matrix
        # map each H(div) index to (sign, L2 index): chi'_0 = -nu_0
        n = dim(sig_v)
        sgn = np.empty(n)
        tgt = np.empty(n, dtype=int)
        for I in range(n):
            a, ids = flat_to_multi(sig_v, I)
            ks = []
            s = 1.0
            for d in range(3):
                shape_idx = ids[d] + (0 if d == a - 1 else 1)
                if shape_idx == 0:
                    s = -s
                    ks.append(0)
                else:
                    ks.append(shape_idx - 1)
            sgn[I] = s
            tgt[I] = ks[0] + p * (ks[1] + p * ks[2])
        expect = np.einsum("i,j,ij->ij", sgn, sgn, Gl2[np.ix_(tgt, tgt)])
        np.testing.assert_allclose(Tdiv, expect, atol=1e-13 * np.max(np.abs(Gl2)))

    def test_block_replication(self):
        sig = SpaceSignature("H1", (1, 1, 1))
        emap = identity_map()
        base = gram(sig, emap, "conventional")
        b3 = gram_block(sig, emap, "conventional", copies=3)
        assert b3.matrix.shape == (24, 24)
        np.testing.assert_array_equal(b3.matrix[:8, :8], base.matrix)
        np.testing.assert_array_equal(b3.matrix[8:16, 8:16], base.matrix)
        assert np.all(b3.matrix[:8, 8:] == 0.0)
        b1 = gram_block(sig, emap, "conventional", copies=1)
        np.testing.assert_array_equal(b1.matrix, base.matrix)
        sig_v = SpaceSignature("Hdiv", (1, 1, 1))
        assert gram_block(sig_v, emap, copies=3).matrix.shape == (18, 18)
        with pytest.raises(ValueError):
            gram_block(sig, emap, copies=2)

    def test_mass_weight_scales_l2_term(self):
        sig = SpaceSignature("H1", (2, 2, 2))
        emap = preset_map("general-affine")
        g1 = gram(sig, emap, "tensorized").matrix
        g0 = gram(sig, emap, "tensorized", mass_weight=1e-12).matrix
        gw = gram(sig, emap, "tensorized", mass_weight=3.0).matrix
        mass = g1 - g0  # stiffness part cancels up to the tiny residual
        np.testing.assert_allclose(gw - g0, 3.0 * mass, atol=1e-9)

    def test_variable_weight_matches_oracle(self):
        sig = SpaceSignature("L2", (2, 2, 2))
        emap = preset_map("trilinear")
        w = lambda x: 1.0 + x[0] ** 2 + 0.5 * x[1]
        L = 4
        got = gram(sig, emap, "tensorized", rule_order=L, mass_weight=w).matrix
        r = tensor_rule(L)
        vals, _ = shape3_tables(sig, r.points)
        from hexgram.geometry import map_position

        det = np.array([eval_geometry(emap, q).detJ for q in r.points])
        wq = np.array([w(map_position(emap, q)) for q in r.points])
        ref = np.einsum("q,qi,qj->ij", r.weights * wq / det, vals, vals)
        np.testing.assert_allclose(got, ref, atol=1e-13)


class TestGuardOrders:
    """Orders that exercise every out-of-range guard branch."""

    @pytest.mark.parametrize("space", ["Hdiv", "Hcurl"])
    @pytest.mark.parametrize("orders", [(1, 1, 1), (1, 2, 3)])
    def test_guarded_entries_match_conventional(self, space, orders):
        sig = SpaceSignature(space, orders)
        emap = preset_map("trilinear")
        L = default_rule_order(space, orders)
        ref = gram_conventional(sig, emap, tensor_rule(L)).matrix
        scale = np.max(np.abs(ref))
        for order in ("standard", "alternative"):
            got = gram_tensorized(sig, emap, gauss_rule(L), order).matrix
            assert np.max(np.abs(got - ref)) <= 1e-12 * scale
