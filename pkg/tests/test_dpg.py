"""Tests for the element-level DPG systems and static condensation."""

import numpy as np
import pytest
from scipy.linalg import cho_factor, cho_solve

from hexgram.dpg import (
    DpgElementSystem,
    UltraweakAcousticsProblem,
    acoustics_ultraweak_element,
    adjoint_graph_gram,
    condense,
    h1_boundary_dofs,
    maxwell_gram,
    poisson_primal_element,
    solve_with_dirichlet,
    x1_coefficients,
)
from hexgram.errors import NonSPDError
from hexgram.geometry import identity_map, preset_map
from hexgram.gram import gram, gram_conventional
from hexgram.quadrature import tensor_rule
from hexgram.spaces import SpaceSignature

BACKENDS = ("conventional", "tensorized", "simplified")


class TestPoisson:
    def test_dimensions(self):
        sys_ = poisson_primal_element(1, 2, 1.0, None, identity_map())
        assert sys_.m == 64
        assert sys_.n == 8

    def test_zero_source_and_constant_kernel(self):
        sys_ = poisson_primal_element(1, 1, 1.0, None, identity_map())
        np.testing.assert_array_equal(sys_.l, 0.0)
        # gradients annihilate constants: column sums of B over the vertex
        # trial functions vanish (their sum is the constant 1)
        np.testing.assert_allclose(sys_.B.sum(axis=1), 0.0, atol=1e-13)

    def test_gram_is_delegated_bit_for_bit(self):
        emap = preset_map("trilinear")
        sys_ = poisson_primal_element(1, 2, 1.0, None, emap, "conventional")
        ref = gram(SpaceSignature("H1", (3, 3, 3)), emap, "conventional",
                   rule_order=4).matrix
        np.testing.assert_array_equal(sys_.G, ref)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_manufactured_solution(self, backend):
        sys_ = poisson_primal_element(1, 2, 1.0, None, identity_map(), backend)
        exact = x1_coefficients(1)
        fixed = {i: exact[i] for i in h1_boundary_dofs(1)}
        u, s, residual = solve_with_dirichlet(sys_, fixed)
        np.testing.assert_allclose(u, exact, atol=1e-10)
        assert residual <= 1e-9

    def test_interior_dof_residual(self):
        # p0 = 2 has one interior trial dof; the solved rows of the saddle
        # system must be satisfied to solver precision
        sys_ = poisson_primal_element(2, 2, 1.0, None, identity_map(), "tensorized")
        exact = x1_coefficients(2)
        fixed = {i: exact[i] for i in h1_boundary_dofs(2)}
        assert len(fixed) == sys_.n - 1
        u, s, residual = solve_with_dirichlet(sys_, fixed)
        assert residual <= 1e-9

    def test_condensed_backend_invariance(self):
        mats = []
        for backend in BACKENDS:
            sys_ = poisson_primal_element(2, 2, 1.0, None, identity_map(), backend)
            A, _ = condense(sys_)
            mats.append(A)
        for A in mats[1:]:
            rel = np.linalg.norm(A - mats[0], "fro") / np.linalg.norm(mats[0], "fro")
            assert rel <= 1e-10

    def test_variable_diffusivity(self):
        k = lambda x: 1.0 + x[0] * x[1]
        sys_ = poisson_primal_element(1, 1, k, None, identity_map())
        # oracle entry: B[i,j] = (k grad u_j, grad v_i) by dense quadrature
        from hexgram.spaces import shape3_tables

        rule = tensor_rule(3)
        tv, tg = shape3_tables(SpaceSignature("H1", (2, 2, 2)), rule.points)
        uv, ug = shape3_tables(SpaceSignature("H1", (1, 1, 1)), rule.points)
        kq = np.array([k(q) for q in rule.points])
        ref = np.einsum("q,qia,qja->ij", rule.weights * kq, tg, ug)
        np.testing.assert_allclose(sys_.B, ref, atol=1e-13)


class TestMaxwell:
    def test_dimension_and_spd(self):
        res = maxwell_gram(1, identity_map())
        assert res.matrix.shape == (12, 12)
        np.linalg.cholesky(res.matrix)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_delegation(self, backend):
        emap = preset_map("diagonal-affine")
        got = maxwell_gram(2, emap, backend).matrix
        ref = gram_conventional(
            SpaceSignature("Hcurl", (2, 2, 2)), emap, tensor_rule(3)
        ).matrix
        assert np.max(np.abs(got - ref)) <= 1e-12 * np.max(np.abs(ref))


class TestAdjointGraphGram:
    def test_hermitian_positive_definite(self):
        g = adjoint_graph_gram(2, 1.0, 1.0, identity_map(), "tensorized").matrix
        np.testing.assert_allclose(g, g.T, atol=1e-13)
        np.linalg.cholesky(g)

    def test_mixed_term_backends_agree(self):
        emap = preset_map("general-affine")
        gc = adjoint_graph_gram(2, 1.3, 0.7, emap, "conventional").matrix
        gt = adjoint_graph_gram(2, 1.3, 0.7, emap, "tensorized").matrix
        assert np.max(np.abs(gc - gt)) <= 1e-12 * np.max(np.abs(gc))

    def test_block_diagonal_without_mixed_term(self):
        w = 1.0 + 1.0  # omega^2 + alpha
        g = adjoint_graph_gram(
            2, 1.0, 1.0, identity_map(), "tensorized", include_mixed=False
        ).matrix
        rq = gram(SpaceSignature("H1", (2, 2, 2)), identity_map(), "tensorized",
                  rule_order=3, mass_weight=w).matrix
        rv = gram(SpaceSignature("Hdiv", (2, 2, 2)), identity_map(), "tensorized",
                  rule_order=3, mass_weight=w).matrix
        mw, mv = rq.shape[0], rv.shape[0]
        m = mw + mv
        np.testing.assert_allclose(g[:mw, :mw], rq, atol=1e-13)
        np.testing.assert_allclose(g[mw:m, mw:m], rv, atol=1e-13)
        assert np.all(g[:m, m:] == 0.0)

    def test_small_frequency_limit(self):
        g = adjoint_graph_gram(1, 1e-8, 1.0, identity_map(), "tensorized").matrix
        m = g.shape[0] // 2
        assert np.max(np.abs(g[:m, m:])) <= 1e-7


class TestAcoustics:
    def test_dimensions(self):
        prob = UltraweakAcousticsProblem(omega=1.0, alpha=1.0)
        sys_ = acoustics_ultraweak_element(prob, 1, 2, identity_map())
        assert sys_.m == 172
        assert sys_.n == 4
        assert sys_.is_complex
        assert sys_.G.shape == (344, 344)
        assert sys_.B.shape == (344, 8)

    def test_zero_source_load(self):
        prob = UltraweakAcousticsProblem(omega=1.0, alpha=1.0)
        sys_ = acoustics_ultraweak_element(prob, 1, 1, identity_map())
        np.testing.assert_array_equal(sys_.l, 0.0)

    def test_pressure_mass_block(self):
        # the (i omega p, q) term alone: imaginary, equal to the cross mass
        # matrix between the L2 trial and H1 test bases on the master element
        from hexgram.spaces import shape3_tables

        omega = 1.7
        prob = UltraweakAcousticsProblem(omega=omega, alpha=1.0)
        sys_ = acoustics_ultraweak_element(prob, 1, 1, identity_map(), "tensorized")
        m, n = sys_.m, sys_.n
        Bim = sys_.B[m:, :n]
        rule = tensor_rule(3)
        qv, _ = shape3_tables(SpaceSignature("H1", (2, 2, 2)), rule.points)
        yv, _ = shape3_tables(SpaceSignature("L2", (1, 1, 1)), rule.points)
        ref = omega * np.einsum("q,qi,qk->ik", rule.weights, qv, yv)
        mw = 27
        np.testing.assert_allclose(Bim[:mw, :1], ref, atol=1e-14)

    @pytest.mark.parametrize("mapname", ["identity", "general-affine", "trilinear"])
    @pytest.mark.parametrize("p0", [1, 2, 3])
    def test_tensorized_matches_conventional(self, mapname, p0):
        prob = UltraweakAcousticsProblem(omega=2.0, alpha=0.5)
        emap = preset_map(mapname)
        sc = acoustics_ultraweak_element(prob, p0, 2, emap, "conventional")
        st = acoustics_ultraweak_element(prob, p0, 2, emap, "tensorized")
        sb = np.max(np.abs(sc.B))
        assert np.max(np.abs(sc.B - st.B)) <= 1e-12 * sb
        assert np.max(np.abs(sc.G - st.G)) <= 1e-12 * np.max(np.abs(sc.G))

    def test_gram_hpd(self):
        prob = UltraweakAcousticsProblem(omega=5.0, alpha=0.25)
        sys_ = acoustics_ultraweak_element(prob, 1, 2, preset_map("trilinear"))
        np.linalg.cholesky(sys_.G)

    def test_load_pairings(self):
        f = lambda x: x[0]
        for pairing in ("velocity", "pressure"):
            prob = UltraweakAcousticsProblem(omega=1.0, alpha=1.0, f=f,
                                             load_pairing=pairing)
            sys_ = acoustics_ultraweak_element(prob, 1, 1, identity_map())
            mw = 27
            m = sys_.m
            wpart = sys_.l[:mw]
            vpart = sys_.l[mw:m]
            if pairing == "pressure":
                assert np.max(np.abs(wpart)) > 0
                np.testing.assert_array_equal(vpart, 0.0)
            else:
                assert np.max(np.abs(vpart)) > 0
                np.testing.assert_array_equal(wpart, 0.0)

    def test_condensed_backend_invariance(self):
        prob = UltraweakAcousticsProblem(omega=1.0, alpha=1.0,
                                         f=lambda x: np.sin(x[0]))
        systems = [
            acoustics_ultraweak_element(prob, 2, 2, identity_map(), backend)
            for backend in BACKENDS
        ]
        pairs = [condense(s) for s in systems]
        A0, b0 = pairs[0]
        for A, b in pairs[1:]:
            assert np.linalg.norm(A - A0, "fro") <= 1e-10 * np.linalg.norm(A0, "fro")
            np.testing.assert_allclose(b, b0, atol=1e-12 * max(np.max(np.abs(b0)), 1e-30))

    def test_invalid_problem_parameters(self):
        with pytest.raises(ValueError):
            UltraweakAcousticsProblem(omega=0.0, alpha=1.0)
        with pytest.raises(ValueError):
            UltraweakAcousticsProblem(omega=1.0, alpha=-1.0)


class TestCondense:
    def test_zero_stiffness(self):
        G = np.eye(5)
        B = np.zeros((5, 2))
        B[0, 0] = 0.0
        sys_ = DpgElementSystem(G=G, B=B, l=np.zeros(5), orders=(1, 1, 2))
        A, rhs = condense(sys_)
        np.testing.assert_array_equal(A, 0.0)
        np.testing.assert_array_equal(rhs, 0.0)

    def test_identity_gram(self):
        rng = np.random.default_rng(0)
        B = rng.normal(size=(6, 3))
        l = rng.normal(size=6)
        sys_ = DpgElementSystem(G=np.eye(6), B=B, l=l, orders=(1, 1, 2))
        A, rhs = condense(sys_)
        np.testing.assert_allclose(A, B.T @ B, atol=1e-14)
        np.testing.assert_allclose(rhs, B.T @ l, atol=1e-14)
        assert sys_.condensed is not None

    def test_condensed_is_psd(self):
        sys_ = poisson_primal_element(1, 2, 1.0, None, preset_map("trilinear"))
        A, _ = condense(sys_)
        np.testing.assert_allclose(A, A.T, atol=1e-12)
        w = np.linalg.eigvalsh(A)
        assert w.min() >= -1e-12 * w.max()

    def test_non_spd_raises(self):
        G = np.eye(4)
        G[2, 2] = -1.0
        sys_ = DpgElementSystem(G=G, B=np.ones((4, 1)), l=np.zeros(4),
                                orders=(1, 1, 2))
        with pytest.raises(NonSPDError):
            condense(sys_)

    def test_enrichment_required(self):
        with pytest.raises(ValueError):
            DpgElementSystem(G=np.eye(2), B=np.ones((2, 3)), l=np.zeros(2),
                             orders=(1, 1, 2))

    def test_energy_identity(self):
        # s from the first row satisfies the solved rows of the second one
        sys_ = poisson_primal_element(2, 2, 1.0, None, preset_map("general-affine"))
        exact = x1_coefficients(2)
        fixed = {i: exact[i] for i in h1_boundary_dofs(2)}
        u, s, residual = solve_with_dirichlet(sys_, fixed)
        c = cho_factor(sys_.G, lower=True)
        s2 = cho_solve(c, sys_.B @ u - sys_.l)
        np.testing.assert_allclose(s, s2, atol=1e-13)
        assert residual <= 1e-9
