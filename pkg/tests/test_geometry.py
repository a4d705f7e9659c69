"""Tests for element maps, Jacobian metrics and classification."""

import numpy as np
import pytest

from hexgram.errors import DegenerateMapError
from hexgram.geometry import (
    classify,
    diagonal_affine_map,
    eval_geometry,
    extrusion_map,
    general_affine_map,
    identity_map,
    map_position,
    parse_map_spec,
    preset_map,
    read_map_config,
    trilinear_map,
)

ALL_PRESETS = ("identity", "diagonal-affine", "general-affine", "extrusion", "trilinear")


class TestEvalGeometry:
    def test_identity(self):
        g = eval_geometry(identity_map(), (0.3, 0.7, 0.1))
        np.testing.assert_array_equal(g.J, np.eye(3))
        assert g.detJ == 1.0
        np.testing.assert_array_equal(g.D, np.eye(3))
        np.testing.assert_array_equal(g.C, np.eye(3))

    def test_diagonal_affine(self):
        g = eval_geometry(diagonal_affine_map((2.0, 1.0, 1.0)), (0.2, 0.5, 0.9))
        assert g.detJ == pytest.approx(2.0)
        np.testing.assert_allclose(g.D, np.diag([0.25, 1.0, 1.0]), atol=1e-15)
        np.testing.assert_allclose(g.C, np.diag([4.0, 1.0, 1.0]), atol=1e-15)

    def test_trilinear_perturbed_corner(self):
        verts = np.array(
            [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0],
             [0, 0, 1], [1, 0, 1], [0, 1, 1], [1.1, 1, 1]], dtype=float
        )
        g = eval_geometry(trilinear_map(verts), (0.0, 0.0, 0.0))
        assert g.detJ == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("name", ALL_PRESETS)
    def test_metric_identities(self, name):
        emap = preset_map(name)
        rng = np.random.default_rng(7)
        for _ in range(10):
            xi = rng.uniform(0, 1, 3)
            g = eval_geometry(emap, xi)
            np.testing.assert_allclose(g.J @ g.Jinv, np.eye(3), atol=1e-12)
            np.testing.assert_allclose(g.D, g.D.T, atol=1e-14)
            np.testing.assert_allclose(g.C, g.C.T, atol=1e-14)
            np.testing.assert_allclose(g.C @ g.D, np.eye(3), atol=1e-10)
            assert g.detJ > 0

    def test_affine_constancy(self):
        emap = preset_map("general-affine")
        ref = eval_geometry(emap, (0.1, 0.2, 0.3))
        for xi in [(0.9, 0.5, 0.0), (0.5, 0.5, 0.5), (0.0, 1.0, 1.0)]:
            g = eval_geometry(emap, xi)
            np.testing.assert_allclose(g.J, ref.J, atol=1e-15)
            np.testing.assert_allclose(g.detJ, ref.detJ, atol=1e-15)

    def test_jacobian_is_position_derivative(self):
        h = 1e-7
        for name in ALL_PRESETS:
            emap = preset_map(name)
            xi = np.array([0.37, 0.61, 0.23])
            g = eval_geometry(emap, xi)
            for d in range(3):
                e = np.zeros(3)
                e[d] = h
                fd = (map_position(emap, xi + e) - map_position(emap, xi - e)) / (2 * h)
                np.testing.assert_allclose(g.J[:, d], fd, atol=1e-6)

    def test_degenerate_map_rejected(self):
        with pytest.raises(DegenerateMapError):
            diagonal_affine_map((-1.0, 1.0, 1.0))
        flat = np.zeros((8, 3))
        with pytest.raises(DegenerateMapError):
            trilinear_map(flat)


class TestClassify:
    def test_constant_jacobian_kinds(self):
        assert classify(identity_map()) == "constant-jacobian"
        assert classify(preset_map("diagonal-affine")) == "constant-jacobian"
        assert classify(preset_map("general-affine")) == "constant-jacobian"

    def test_extrusion(self):
        assert classify(preset_map("extrusion")) == "extrusion"

    def test_trilinear_is_general(self):
        assert classify(preset_map("trilinear")) == "general"


class TestConfigParsing:
    def test_round_trip_lines(self):
        m = parse_map_spec("diagonal-affine 2 1 1")
        assert m.kind == "diagonal-affine"
        g = eval_geometry(m, (0.5, 0.5, 0.5))
        assert g.detJ == pytest.approx(2.0)

        m = parse_map_spec("identity")
        assert m.kind == "identity"

        m = parse_map_spec("extrusion 1.5 0  0 0  1 0  0 1  1 1")
        assert classify(m) == "extrusion"
        assert eval_geometry(m, (0.1, 0.2, 0.3)).detJ == pytest.approx(1.5)

    def test_bad_specs(self):
        with pytest.raises(ValueError):
            parse_map_spec("diagonal-affine 1 2")
        with pytest.raises(ValueError):
            parse_map_spec("hexahedron 1 2 3")

    def test_config_file(self, tmp_path):
        path = tmp_path / "maps.txt"
        path.write_text(
            "# element maps\nidentity\ndiagonal-affine 2 1 1   # stretched\n"
        )
        maps = read_map_config(path)
        assert [m.kind for m in maps] == ["identity", "diagonal-affine"]


def test_extrusion_position_matches_lambda():
    emap = extrusion_map(2.0, 0.5, [(0, 0), (1, 0), (0, 1), (1, 1)])
    x = map_position(emap, (0.25, 0.0, 0.0))
    assert x[0] == pytest.approx(1.0)


def test_general_affine_position():
    A = [[1.0, 0.2, 0.0], [0.0, 1.0, 0.1], [0.0, 0.0, 1.0]]
    emap = general_affine_map(A, (1.0, 2.0, 3.0))
    x = map_position(emap, (1.0, 0.0, 0.0))
    np.testing.assert_allclose(x, [2.0, 2.0, 3.0], atol=1e-15)
