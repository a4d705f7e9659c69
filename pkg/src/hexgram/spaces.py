"""Tensor-product spaces on the master hexahedron.

For the exact-sequence spaces W (H1), Q (H(curl)), V (H(div)) and Y (L2) at
orders (p1, p2, p3) this module provides dimension formulas, the bijection
between the flat basis index and (component, i1, i2, i3), and pointwise
evaluation of the 3D shape functions together with their exact-sequence
derivative quantities (gradient, curl, divergence) in master coordinates.

Flat index conventions (0-based):

* H1:  I = i1 + (p1+1) i2 + (p1+1)(p2+1) i3
* L2:  I = i1 + p1 i2 + p1 p2 i3
* H(div), component blocks a = 1, 2, 3 stacked; within block a the
  a-coordinate carries a chi index (0..p_a) and the other two carry nu
  indices (0..p_d - 1)
* H(curl), analogous with the roles of chi and nu exchanged
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidOrderError
from .poly1d import chi_table, nu_table, shape1_h1, shape1_l2

__all__ = [
    "SPACES",
    "SpaceSignature",
    "ShapeEval3D",
    "dim",
    "flat_to_multi",
    "multi_to_flat",
    "shape3_eval",
]

SPACES = ("H1", "Hcurl", "Hdiv", "L2")


@dataclass(frozen=True)
class SpaceSignature:
    space: str
    orders: tuple[int, int, int]

    def __post_init__(self):
        if self.space not in SPACES:
            raise ValueError(f"unknown space {self.space!r}")
        object.__setattr__(self, "orders", tuple(int(p) for p in self.orders))
        if len(self.orders) != 3 or min(self.orders) < 1:
            raise InvalidOrderError("orders must be three positive integers")


@dataclass(frozen=True)
class ShapeEval3D:
    """All shape functions of one space evaluated at a single cube point.

    ``values`` is (N,) for the scalar spaces and (N, 3) for the vector ones.
    ``deriv`` holds the exact-sequence derivative: gradient (N, 3) for H1,
    curl (N, 3) for H(curl), divergence (N,) for H(div); None for L2.
    """

    signature: SpaceSignature
    point: tuple[float, float, float]
    values: np.ndarray
    deriv: np.ndarray | None


def dim(sig: SpaceSignature) -> int:
    p1, p2, p3 = sig.orders
    if sig.space == "H1":
        return (p1 + 1) * (p2 + 1) * (p3 + 1)
    if sig.space == "L2":
        return p1 * p2 * p3
    if sig.space == "Hdiv":
        return (p1 + 1) * p2 * p3 + p1 * (p2 + 1) * p3 + p1 * p2 * (p3 + 1)
    # Hcurl
    return (
        p1 * (p2 + 1) * (p3 + 1)
        + (p1 + 1) * p2 * (p3 + 1)
        + (p1 + 1) * (p2 + 1) * p3
    )


def _hdiv_block_dims(p1, p2, p3):
    return ((p1 + 1) * p2 * p3, p1 * (p2 + 1) * p3, p1 * p2 * (p3 + 1))


def _hcurl_block_dims(p1, p2, p3):
    return (
        p1 * (p2 + 1) * (p3 + 1),
        (p1 + 1) * p2 * (p3 + 1),
        (p1 + 1) * (p2 + 1) * p3,
    )


def _vector_ranges(space: str, a: int, orders):
    """Per-coordinate digit counts for component ``a`` (1-based)."""
    p1, p2, p3 = orders
    if space == "Hdiv":
        # chi index on the a-coordinate, nu on the others
        return tuple(p + 1 if d == a else p for d, p in zip((1, 2, 3), orders))
    # Hcurl: nu on the a-coordinate, chi on the others
    return tuple(p if d == a else p + 1 for d, p in zip((1, 2, 3), orders))


def multi_to_flat(sig: SpaceSignature, a: int | None, ids) -> int:
    """Flat index from (component, digits); a is None for scalar spaces."""
    p1, p2, p3 = sig.orders
    i1, i2, i3 = ids
    if sig.space == "H1":
        n1, n2 = p1 + 1, p2 + 1
    elif sig.space == "L2":
        n1, n2 = p1, p2
    else:
        if a not in (1, 2, 3):
            raise ValueError("vector spaces need component a in {1, 2, 3}")
        n1, n2, n3 = _vector_ranges(sig.space, a, sig.orders)
        if not (0 <= i1 < n1 and 0 <= i2 < n2 and 0 <= i3 < n3):
            raise IndexError(f"digits {ids} out of range for component {a}")
        blocks = (
            _hdiv_block_dims(p1, p2, p3)
            if sig.space == "Hdiv"
            else _hcurl_block_dims(p1, p2, p3)
        )
        return sum(blocks[: a - 1]) + i1 + n1 * i2 + n1 * n2 * i3
    n3 = p3 + 1 if sig.space == "H1" else p3
    if not (0 <= i1 < n1 and 0 <= i2 < n2 and 0 <= i3 < n3):
        raise IndexError(f"digits {ids} out of range")
    return i1 + n1 * i2 + n1 * n2 * i3


def flat_to_multi(sig: SpaceSignature, I: int):
    """Inverse of multi_to_flat: returns (a or None, (i1, i2, i3))."""
    N = dim(sig)
    if not 0 <= I < N:
        raise IndexError(f"flat index {I} out of range [0, {N})")
    p1, p2, p3 = sig.orders
    if sig.space in ("H1", "L2"):
        n1 = p1 + 1 if sig.space == "H1" else p1
        n2 = p2 + 1 if sig.space == "H1" else p2
        i1 = I % n1
        i2 = (I // n1) % n2
        i3 = I // (n1 * n2)
        return None, (i1, i2, i3)
    blocks = (
        _hdiv_block_dims(p1, p2, p3)
        if sig.space == "Hdiv"
        else _hcurl_block_dims(p1, p2, p3)
    )
    a = 1
    rem = I
    while rem >= blocks[a - 1]:
        rem -= blocks[a - 1]
        a += 1
    n1, n2, _ = _vector_ranges(sig.space, a, sig.orders)
    i1 = rem % n1
    i2 = (rem // n1) % n2
    i3 = rem // (n1 * n2)
    return a, (i1, i2, i3)


def shape3_eval(sig: SpaceSignature, xi) -> ShapeEval3D:
    """Evaluate every basis function of the space at one cube point."""
    x1, x2, x3 = (float(c) for c in xi)
    p1, p2, p3 = sig.orders
    N = dim(sig)

    if sig.space == "L2":
        nu1 = shape1_l2(p1, x1)
        nu2 = shape1_l2(p2, x2)
        nu3 = shape1_l2(p3, x3)
        vals = np.empty(N)
        for I in range(N):
            _, (i1, i2, i3) = flat_to_multi(sig, I)
            vals[I] = nu1[i1] * nu2[i2] * nu3[i3]
        return ShapeEval3D(sig, (x1, x2, x3), vals, None)

    t1 = shape1_h1(p1, x1)
    t2 = shape1_h1(p2, x2)
    t3 = shape1_h1(p3, x3)

    if sig.space == "H1":
        vals = np.empty(N)
        grad = np.empty((N, 3))
        for I in range(N):
            _, (i1, i2, i3) = flat_to_multi(sig, I)
            vals[I] = t1.chi[i1] * t2.chi[i2] * t3.chi[i3]
            grad[I, 0] = t1.dchi[i1] * t2.chi[i2] * t3.chi[i3]
            grad[I, 1] = t1.chi[i1] * t2.dchi[i2] * t3.chi[i3]
            grad[I, 2] = t1.chi[i1] * t2.chi[i2] * t3.dchi[i3]
        return ShapeEval3D(sig, (x1, x2, x3), vals, grad)

    tabs = (t1, t2, t3)

    if sig.space == "Hdiv":
        vals = np.zeros((N, 3))
        div = np.empty(N)
        for I in range(N):
            a, ids = flat_to_multi(sig, I)
            val = 1.0
            dv = 1.0
            for d in range(3):
                shift = 0 if d == a - 1 else 1
                idx = ids[d] + shift
                # value uses chi on the a-coordinate, chi' elsewhere
                val *= tabs[d].chi[idx] if d == a - 1 else tabs[d].dchi[idx]
                dv *= tabs[d].dchi[idx]
            vals[I, a - 1] = val
            div[I] = dv
        return ShapeEval3D(sig, (x1, x2, x3), vals, div)

    # Hcurl
    vals = np.zeros((N, 3))
    curl = np.zeros((N, 3))
    for I in range(N):
        a, ids = flat_to_multi(sig, I)
        val = 1.0
        for d in range(3):
            shift = 1 if d == a - 1 else 0
            idx = ids[d] + shift
            val *= tabs[d].dchi[idx] if d == a - 1 else tabs[d].chi[idx]
        vals[I, a - 1] = val
        # curl components a+1 (plus sign) and a+2 (minus sign), cyclic
        for alpha, sign in ((1, 1.0), (2, -1.0)):
            comp = (a - 1 + alpha) % 3
            term = 1.0
            for d in range(3):
                shift = 1 if d == a - 1 else 0
                idx = ids[d] + shift
                # derivative on every coordinate except comp
                term *= tabs[d].chi[idx] if d == comp else tabs[d].dchi[idx]
            curl[I, comp] = sign * term
    return ShapeEval3D(sig, (x1, x2, x3), vals, curl)


def shape3_tables(sig: SpaceSignature, pts: np.ndarray):
    """Vectorized shape evaluation over a set of cube points.

    Returns (values, deriv) with leading axis len(pts); layouts match
    ShapeEval3D.  Used to feed the conventional quadrature kernels.
    """
    pts = np.asarray(pts, dtype=float)
    nq = pts.shape[0]
    p1, p2, p3 = sig.orders
    N = dim(sig)

    if sig.space == "L2":
        nu = [nu_table(p, pts[:, d]) for d, p in enumerate(sig.orders)]
        vals = np.empty((nq, N))
        for I in range(N):
            _, (i1, i2, i3) = flat_to_multi(sig, I)
            vals[:, I] = nu[0][:, i1] * nu[1][:, i2] * nu[2][:, i3]
        return vals, None

    chi = []
    dchi = []
    for d, p in enumerate(sig.orders):
        c, dc = chi_table(p, pts[:, d])
        chi.append(c)
        dchi.append(dc)

    if sig.space == "H1":
        vals = np.empty((nq, N))
        grad = np.empty((nq, N, 3))
        for I in range(N):
            _, (i1, i2, i3) = flat_to_multi(sig, I)
            vals[:, I] = chi[0][:, i1] * chi[1][:, i2] * chi[2][:, i3]
            grad[:, I, 0] = dchi[0][:, i1] * chi[1][:, i2] * chi[2][:, i3]
            grad[:, I, 1] = chi[0][:, i1] * dchi[1][:, i2] * chi[2][:, i3]
            grad[:, I, 2] = chi[0][:, i1] * chi[1][:, i2] * dchi[2][:, i3]
        return vals, grad

    if sig.space == "Hdiv":
        vals = np.zeros((nq, N, 3))
        div = np.empty((nq, N))
        for I in range(N):
            a, ids = flat_to_multi(sig, I)
            val = np.ones(nq)
            dv = np.ones(nq)
            for d in range(3):
                shift = 0 if d == a - 1 else 1
                idx = ids[d] + shift
                val = val * (chi[d][:, idx] if d == a - 1 else dchi[d][:, idx])
                dv = dv * dchi[d][:, idx]
            vals[:, I, a - 1] = val
            div[:, I] = dv
        return vals, div

    vals = np.zeros((nq, N, 3))
    curl = np.zeros((nq, N, 3))
    for I in range(N):
        a, ids = flat_to_multi(sig, I)
        val = np.ones(nq)
        for d in range(3):
            shift = 1 if d == a - 1 else 0
            idx = ids[d] + shift
            val = val * (dchi[d][:, idx] if d == a - 1 else chi[d][:, idx])
        vals[:, I, a - 1] = val
        for alpha, sign in ((1, 1.0), (2, -1.0)):
            comp = (a - 1 + alpha) % 3
            term = np.ones(nq)
            for d in range(3):
                shift = 1 if d == a - 1 else 0
                idx = ids[d] + shift
                term = term * (chi[d][:, idx] if d == comp else dchi[d][:, idx])
            curl[:, I, comp] = sign * term
    return vals, curl
