"""Gram-matrix backends for the four energy spaces.

Three interchangeable algorithms are provided for each space:

* ``gram_conventional`` - full 3D quadrature with a double loop over basis
  function pairs at every point (the O(p^9) baseline)
* ``gram_tensorized``   - sum-factorized nested 1D integrals (O(p^7)), in the
  standard loop order (auxiliary pair loops outermost, geometry re-evaluated
  inside them) or the alternative order (quadrature loops outermost, one
  geometry evaluation per point)
* ``gram_simplified``   - for constant-Jacobian maps all quadrature is
  replaced by closed-form interval integrals (O(p^6)); for extrusion maps the
  xi1 direction alone is replaced, leaving a 2D quadrature

Every backend returns the dense symmetric matrix together with operation
counters, and all backends produce identical matrices (up to roundoff) when
run with the same underlying 1D rule.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import NonSPDError, SimplificationNotApplicableError
from .geometry import ElementMap, classify, map_position
from .poly1d import FTable, ftable
from .quadrature import Rule1D, Rule3D, default_rule_order, gauss_rule, tensor_rule
from .spaces import SpaceSignature, dim, shape3_tables

__all__ = [
    "OpCounters",
    "GramResult",
    "BACKENDS",
    "gram_conventional",
    "gram_tensorized",
    "gram_simplified",
    "gram_block",
    "gram",
]

BACKENDS = ("conventional", "tensorized", "simplified")


@dataclass(frozen=True)
class OpCounters:
    accumulations: int
    geometry_calls: int
    shape1_calls: int
    shape3_calls: int


@dataclass(frozen=True)
class GramResult:
    matrix: np.ndarray
    counters: OpCounters

    def cholesky(self) -> np.ndarray:
        """Cholesky factor; raises NonSPDError if the matrix is not SPD."""
        try:
            return np.linalg.cholesky(self.matrix)
        except np.linalg.LinAlgError as exc:
            raise NonSPDError(f"Gram matrix is not positive definite: {exc}")


def _weight_values(emap: ElementMap, pts: np.ndarray, mass_weight) -> np.ndarray:
    """Sample the mass-term weight at quadrature points (physical coords)."""
    if mass_weight is None:
        return np.ones(pts.shape[0])
    if np.isscalar(mass_weight):
        return np.full(pts.shape[0], float(mass_weight))
    out = np.empty(pts.shape[0])
    for t in range(pts.shape[0]):
        out[t] = float(mass_weight(map_position(emap, pts[t])))
    return out


def _weight_grid(emap: ElementMap, nodes: np.ndarray, mass_weight) -> np.ndarray:
    L = nodes.size
    if mass_weight is None:
        return np.ones((L, L, L))
    if np.isscalar(mass_weight):
        return np.full((L, L, L), float(mass_weight))
    grid = np.empty((L, L, L))
    for l in range(L):
        for m in range(L):
            for n in range(L):
                xi = (nodes[l], nodes[m], nodes[n])
                grid[l, m, n] = float(mass_weight(map_position(emap, xi)))
    return grid


def _const_weight(mass_weight) -> float:
    if mass_weight is None:
        return 1.0
    if np.isscalar(mass_weight):
        return float(mass_weight)
    raise ValueError("simplified backends support constant mass weights only")


def gram_conventional(
    sig: SpaceSignature,
    emap: ElementMap,
    rule3d: Rule3D | None = None,
    *,
    mass_weight=None,
) -> GramResult:
    """Conventional 3D-quadrature Gram matrix."""
    if rule3d is None:
        rule3d = tensor_rule(default_rule_order(sig.space, sig.orders))
    pts, wts = rule3d.points, rule3d.weights
    wflat = _weight_values(emap, pts, mass_weight)
    kind, par = emap.kind_code, emap.params
    vals, deriv = shape3_tables(sig, pts)
    if sig.space == "L2":
        out = K.conv_l2(pts, wts, vals, kind, par, wflat)
    elif sig.space == "H1":
        out = K.conv_h1(pts, wts, vals, deriv, kind, par, wflat)
    elif sig.space == "Hdiv":
        out = K.conv_hdiv(pts, wts, vals, deriv, kind, par, wflat)
    else:
        out = K.conv_hcurl(pts, wts, vals, deriv, kind, par, wflat)
    G, acc, geo, s1, s3 = out
    return GramResult(G, OpCounters(acc, geo, s1, s3))


_TENS_KERNELS = {
    ("L2", "standard"): K.tens_l2_std,
    ("L2", "alternative"): K.tens_l2_alt,
    ("H1", "standard"): K.tens_h1_std,
    ("H1", "alternative"): K.tens_h1_alt,
    ("Hdiv", "standard"): K.tens_hdiv_std,
    ("Hdiv", "alternative"): K.tens_hdiv_alt,
    ("Hcurl", "standard"): K.tens_hcurl_std,
    ("Hcurl", "alternative"): K.tens_hcurl_alt,
}


def gram_tensorized(
    sig: SpaceSignature,
    emap: ElementMap,
    rule1d: Rule1D | None = None,
    loop_order: str = "standard",
    *,
    mass_weight=None,
) -> GramResult:
    """Sum-factorized Gram matrix; both loop orders give identical values."""
    if loop_order not in ("standard", "alternative"):
        raise ValueError("loop_order must be 'standard' or 'alternative'")
    if rule1d is None:
        rule1d = gauss_rule(default_rule_order(sig.space, sig.orders))
    wgrid = _weight_grid(emap, rule1d.nodes, mass_weight)
    p1, p2, p3 = sig.orders
    kern = _TENS_KERNELS[(sig.space, loop_order)]
    G, acc, geo, s1, s3 = kern(
        p1, p2, p3, rule1d.nodes, rule1d.weights, emap.kind_code, emap.params, wgrid
    )
    return GramResult(G, OpCounters(acc, geo, s1, s3))


def gram_simplified(
    sig: SpaceSignature,
    emap: ElementMap,
    ftab: FTable | None = None,
    rule1d: Rule1D | None = None,
    *,
    mass_weight=None,
) -> GramResult:
    """Simplified Gram matrix; requires a constant-Jacobian or extrusion map."""
    klass = classify(emap)
    if klass == "general":
        raise SimplificationNotApplicableError(
            f"map kind {emap.kind!r} (class 'general') admits no simplification"
        )
    p1, p2, p3 = sig.orders
    if ftab is None:
        ftab = ftable(max(sig.orders) + 1)
    if ftab.p_max < max(sig.orders) + 1:
        raise ValueError("F table too small for the requested orders")
    wmass = _const_weight(mass_weight)
    kind, par = emap.kind_code, emap.params
    fall = ftab.stacked
    if klass == "constant-jacobian":
        if sig.space == "L2":
            out = K.simp_l2_const(p1, p2, p3, fall, kind, par, wmass)
        elif sig.space == "H1":
            out = K.simp_h1_const(p1, p2, p3, fall, kind, par, wmass)
        elif sig.space == "Hdiv":
            out = K.simp_hdiv_const(p1, p2, p3, fall, kind, par, wmass)
        else:
            out = K.simp_hcurl_const(p1, p2, p3, fall, kind, par, wmass)
    else:
        if rule1d is None:
            rule1d = gauss_rule(default_rule_order(sig.space, sig.orders))
        nodes, wts = rule1d.nodes, rule1d.weights
        if sig.space == "L2":
            out = K.simp_l2_ext(p1, p2, p3, fall, nodes, wts, kind, par, wmass)
        elif sig.space == "H1":
            out = K.simp_h1_ext(p1, p2, p3, fall, nodes, wts, kind, par, wmass)
        elif sig.space == "Hdiv":
            out = K.simp_hdiv_ext(p1, p2, p3, fall, nodes, wts, kind, par, wmass)
        else:
            out = K.simp_hcurl_ext(p1, p2, p3, fall, nodes, wts, kind, par, wmass)
    G, acc, geo, s1, s3 = out
    return GramResult(G, OpCounters(acc, geo, s1, s3))


def gram(
    sig: SpaceSignature,
    emap: ElementMap,
    backend: str,
    *,
    rule_order: int | None = None,
    loop_order: str = "alternative",
    mass_weight=None,
) -> GramResult:
    """Dispatch to one backend with a shared choice of 1D rule order."""
    L = rule_order if rule_order is not None else default_rule_order(
        sig.space, sig.orders
    )
    if backend == "conventional":
        return gram_conventional(sig, emap, tensor_rule(L), mass_weight=mass_weight)
    if backend == "tensorized":
        return gram_tensorized(
            sig, emap, gauss_rule(L), loop_order, mass_weight=mass_weight
        )
    if backend == "simplified":
        return gram_simplified(
            sig, emap, ftable(max(max(sig.orders) + 1, 2)), gauss_rule(L),
            mass_weight=mass_weight,
        )
    raise ValueError(f"unknown backend {backend!r}; choices: {BACKENDS}")


def gram_block(
    sig: SpaceSignature,
    emap: ElementMap,
    backend: str = "conventional",
    copies: int = 1,
    **kwargs,
) -> GramResult:
    """Vector/matrix-valued Gram: block-diagonal replication of the scalar
    (or vector) space matrix, off-diagonal blocks exactly zero."""
    if copies not in (1, 3):
        raise ValueError("copies must be 1 or 3")
    base = gram(sig, emap, backend, **kwargs)
    if copies == 1:
        return base
    N = base.matrix.shape[0]
    M = np.zeros((3 * N, 3 * N))
    for c in range(3):
        M[c * N : (c + 1) * N, c * N : (c + 1) * N] = base.matrix
    return GramResult(M, base.counters)
