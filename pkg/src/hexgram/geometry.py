"""Parametric hexahedral element maps and their Jacobian metrics.

A map takes the master cube [0, 1]^3 to a physical element.  Besides the
Jacobian J, its determinant and inverse, the two metric matrices used by the
Gram integrands are provided: D = J^-1 J^-T and C = J^T J = D^-1.

Supported kinds:

* ``identity``
* ``diagonal-affine``   x = shift + diag(l1, l2, l3) xi
* ``general-affine``    x = shift + A xi
* ``extrusion``         x1 affine in xi1 alone, (x2, x3) a planar bilinear
  quad map of (xi2, xi3); the Jacobian has the block structure that enables
  the "simplified element map" backends
* ``trilinear``         8-vertex isoparametric hexahedron

Classification into {constant-jacobian, extrusion, general} is declared by
kind, never inferred numerically.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMapError
from .quadrature import gauss_rule

__all__ = [
    "ElementMap",
    "JacobianData",
    "eval_geometry",
    "classify",
    "identity_map",
    "diagonal_affine_map",
    "general_affine_map",
    "extrusion_map",
    "trilinear_map",
    "map_position",
    "parse_map_spec",
    "read_map_config",
    "preset_map",
    "PRESET_MAP_NAMES",
]

# integer codes shared with the numba kernels
KIND_CODES = {
    "identity": 0,
    "diagonal-affine": 1,
    "general-affine": 2,
    "extrusion": 3,
    "trilinear": 4,
}
N_PARAMS = 24


@dataclass(frozen=True)
class ElementMap:
    kind: str
    params: np.ndarray = field(default_factory=lambda: np.zeros(N_PARAMS))

    def __post_init__(self):
        if self.kind not in KIND_CODES:
            raise ValueError(f"unknown map kind {self.kind!r}")
        object.__setattr__(self, "params", np.asarray(self.params, dtype=float))
        if self.params.shape != (N_PARAMS,):
            raise ValueError(f"params must have shape ({N_PARAMS},)")
        _validate_orientation(self)

    @property
    def kind_code(self) -> int:
        return KIND_CODES[self.kind]


@dataclass(frozen=True)
class JacobianData:
    J: np.ndarray
    Jinv: np.ndarray
    detJ: float
    D: np.ndarray
    C: np.ndarray


def identity_map() -> ElementMap:
    p = np.zeros(N_PARAMS)
    return ElementMap("identity", p)


def diagonal_affine_map(lams, shift=(0.0, 0.0, 0.0)) -> ElementMap:
    p = np.zeros(N_PARAMS)
    p[0:3] = lams
    p[3:6] = shift
    return ElementMap("diagonal-affine", p)


def general_affine_map(matrix, shift=(0.0, 0.0, 0.0)) -> ElementMap:
    p = np.zeros(N_PARAMS)
    p[0:9] = np.asarray(matrix, dtype=float).reshape(9)
    p[9:12] = shift
    return ElementMap("general-affine", p)


def extrusion_map(lam1: float, shift1: float, quad_vertices) -> ElementMap:
    """Extrusion along coordinate 1 of the planar quad (v00, v10, v01, v11).

    ``quad_vertices`` holds four 2D points giving the bilinear image of
    (xi2, xi3) in the (x2, x3) plane; v10 is the image of (1, 0).
    """
    p = np.zeros(N_PARAMS)
    p[0] = lam1
    p[1] = shift1
    p[2:10] = np.asarray(quad_vertices, dtype=float).reshape(8)
    return ElementMap("extrusion", p)


def trilinear_map(vertices) -> ElementMap:
    """Trilinear hexahedron; vertex k is the image of the cube corner with
    bits (i1, i2, i3), k = i1 + 2*i2 + 4*i3."""
    v = np.asarray(vertices, dtype=float).reshape(8, 3)
    return ElementMap("trilinear", v.reshape(24).copy())


def _jacobian(emap: ElementMap, xi) -> np.ndarray:
    x1, x2, x3 = xi
    p = emap.params
    kind = emap.kind
    if kind == "identity":
        return np.eye(3)
    if kind == "diagonal-affine":
        return np.diag(p[0:3])
    if kind == "general-affine":
        return p[0:9].reshape(3, 3).copy()
    if kind == "extrusion":
        v00 = p[2:4]
        v10 = p[4:6]
        v01 = p[6:8]
        v11 = p[8:10]
        d2 = (v10 - v00) * (1.0 - x3) + (v11 - v01) * x3
        d3 = (v01 - v00) * (1.0 - x2) + (v11 - v10) * x2
        J = np.zeros((3, 3))
        J[0, 0] = p[0]
        J[1, 1], J[2, 1] = d2
        J[1, 2], J[2, 2] = d3
        return J
    # trilinear
    v = p.reshape(8, 3)
    J = np.zeros((3, 3))
    for k in range(8):
        b1, b2, b3 = k & 1, (k >> 1) & 1, (k >> 2) & 1
        f1 = x1 if b1 else 1.0 - x1
        f2 = x2 if b2 else 1.0 - x2
        f3 = x3 if b3 else 1.0 - x3
        g1 = 1.0 if b1 else -1.0
        g2 = 1.0 if b2 else -1.0
        g3 = 1.0 if b3 else -1.0
        J[:, 0] += v[k] * (g1 * f2 * f3)
        J[:, 1] += v[k] * (f1 * g2 * f3)
        J[:, 2] += v[k] * (f1 * f2 * g3)
    return J


def map_position(emap: ElementMap, xi) -> np.ndarray:
    """Physical coordinates x_K(xi)."""
    x1, x2, x3 = xi
    p = emap.params
    kind = emap.kind
    if kind == "identity":
        return np.array([x1, x2, x3], dtype=float)
    if kind == "diagonal-affine":
        return p[3:6] + p[0:3] * np.array([x1, x2, x3])
    if kind == "general-affine":
        return p[9:12] + p[0:9].reshape(3, 3) @ np.array([x1, x2, x3])
    if kind == "extrusion":
        v00, v10 = p[2:4], p[4:6]
        v01, v11 = p[6:8], p[8:10]
        planar = (
            v00 * (1.0 - x2) * (1.0 - x3)
            + v10 * x2 * (1.0 - x3)
            + v01 * (1.0 - x2) * x3
            + v11 * x2 * x3
        )
        return np.array([p[1] + p[0] * x1, planar[0], planar[1]])
    v = p.reshape(8, 3)
    x = np.zeros(3)
    for k in range(8):
        b1, b2, b3 = k & 1, (k >> 1) & 1, (k >> 2) & 1
        f1 = x1 if b1 else 1.0 - x1
        f2 = x2 if b2 else 1.0 - x2
        f3 = x3 if b3 else 1.0 - x3
        x += v[k] * (f1 * f2 * f3)
    return x


def eval_geometry(emap: ElementMap, xi) -> JacobianData:
    """Jacobian, inverse, determinant and the metric matrices D, C at xi."""
    J = _jacobian(emap, xi)
    detJ = float(np.linalg.det(J))
    if detJ <= 0.0:
        raise DegenerateMapError(detJ, xi)
    Jinv = np.linalg.inv(J)
    D = Jinv @ Jinv.T
    C = J.T @ J
    return JacobianData(J=J, Jinv=Jinv, detJ=detJ, D=D, C=C)


def classify(emap: ElementMap) -> str:
    """Map class for the simplified backends; declared by kind."""
    if emap.kind in ("identity", "diagonal-affine", "general-affine"):
        return "constant-jacobian"
    if emap.kind == "extrusion":
        return "extrusion"
    return "general"


def _validate_orientation(emap: ElementMap) -> None:
    """Sampled diffeomorphism check: det J > 0 at the order-6 tensor nodes."""
    nodes = gauss_rule(6).nodes
    for x1 in nodes:
        for x2 in nodes:
            for x3 in nodes:
                J = _jacobian(emap, (x1, x2, x3))
                detJ = float(np.linalg.det(J))
                if detJ <= 0.0:
                    raise DegenerateMapError(detJ, (x1, x2, x3))


def parse_map_spec(line: str) -> ElementMap:
    """Parse one whitespace-separated config line: kind followed by params."""
    fields = line.split()
    if not fields:
        raise ValueError("empty map specification")
    kind, vals = fields[0], [float(t) for t in fields[1:]]
    if kind == "identity":
        return identity_map()
    if kind == "diagonal-affine":
        if len(vals) == 3:
            return diagonal_affine_map(vals)
        if len(vals) == 6:
            return diagonal_affine_map(vals[:3], vals[3:])
        raise ValueError("diagonal-affine expects 3 or 6 numbers")
    if kind == "general-affine":
        if len(vals) == 9:
            return general_affine_map(vals)
        if len(vals) == 12:
            return general_affine_map(vals[:9], vals[9:])
        raise ValueError("general-affine expects 9 or 12 numbers")
    if kind == "extrusion":
        if len(vals) != 10:
            raise ValueError("extrusion expects 10 numbers: lam1 shift1 v00 v10 v01 v11")
        return extrusion_map(vals[0], vals[1], vals[2:])
    if kind == "trilinear":
        if len(vals) != 24:
            raise ValueError("trilinear expects 24 numbers (8 vertices)")
        return trilinear_map(vals)
    raise ValueError(f"unknown map kind {kind!r}")


def read_map_config(path) -> list[ElementMap]:
    """Read a map config file: one map per line, '#' starts a comment."""
    maps = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                maps.append(parse_map_spec(line))
    return maps


def _default_trilinear() -> ElementMap:
    verts = np.array(
        [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.05],
            [0.0, 1.0, 0.0],
            [1.1, 1.05, 0.0],
            [0.0, 0.05, 1.0],
            [1.0, 0.0, 1.0],
            [-0.05, 0.9, 1.0],
            [1.1, 1.05, 0.95],
        ]
    )
    return trilinear_map(verts)


def _default_extrusion() -> ElementMap:
    # rotated, slightly sheared planar quad; x1 stretched by 1.0
    c, s = np.cos(np.pi / 6.0), np.sin(np.pi / 6.0)
    v00 = (0.0, 0.0)
    v10 = (c, s)
    v01 = (-s, c)
    v11 = (c - s + 0.15, s + c + 0.1)
    return extrusion_map(1.0, 0.0, [v00, v10, v01, v11])


_PRESETS = {
    "identity": identity_map,
    "diagonal-affine": lambda: diagonal_affine_map((2.0, 1.0, 1.0)),
    "general-affine": lambda: general_affine_map(
        [[1.0, 0.3, 0.1], [0.0, 1.1, 0.2], [0.05, 0.0, 0.9]], (0.2, -0.1, 0.4)
    ),
    "extrusion": _default_extrusion,
    "trilinear": _default_trilinear,
}

PRESET_MAP_NAMES = tuple(_PRESETS)


def preset_map(name: str) -> ElementMap:
    """Canonical map instance for each kind, used by the CLI and the tests."""
    try:
        return _PRESETS[name]()
    except KeyError:
        raise ValueError(f"unknown map preset {name!r}; choices: {PRESET_MAP_NAMES}")
