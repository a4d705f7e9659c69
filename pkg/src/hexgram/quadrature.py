"""Gauss-Legendre quadrature on (0, 1) and its tensor product on the cube.

Nodes are computed by Newton iteration on the Legendre recursion (no external
tables), then shifted from [-1, 1] to the master interval.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidOrderError

__all__ = ["Rule1D", "Rule3D", "gauss_rule", "tensor_rule", "default_rule_order"]

MAX_ORDER = 32
_NEWTON_TOL = 1e-15


@dataclass(frozen=True)
class Rule1D:
    """L-point Gauss-Legendre rule on (0, 1); weights sum to 1."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int


@dataclass(frozen=True)
class Rule3D:
    """Tensor-product rule on the unit cube, lexicographic in (l, m, n)."""

    points: np.ndarray  # (L**3, 3)
    weights: np.ndarray  # (L**3,)
    order: int


def _legendre_and_derivative(L: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P_L(x) and P_L'(x) on [-1, 1] via the standard recursion."""
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(2, L + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    dp = L * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def gauss_rule(L: int) -> Rule1D:
    """L-point Gauss-Legendre rule mapped to (0, 1), nodes increasing."""
    if not 1 <= L <= MAX_ORDER:
        raise InvalidOrderError(f"gauss_rule supports 1 <= L <= {MAX_ORDER}, got {L}")
    if L == 1:
        return Rule1D(nodes=np.array([0.5]), weights=np.array([1.0]), order=1)
    k = np.arange(1, L + 1)
    x = np.cos(np.pi * (k - 0.25) / (L + 0.5))
    for _ in range(100):
        p, dp = _legendre_and_derivative(L, x)
        dx = p / dp
        x -= dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            break
    _, dp = _legendre_and_derivative(L, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    nodes = 0.5 * (1.0 + x[::-1])
    weights = 0.5 * w[::-1]
    return Rule1D(nodes=np.ascontiguousarray(nodes),
                  weights=np.ascontiguousarray(weights), order=L)


def tensor_rule(L: int) -> Rule3D:
    """L**3 tensor-product points with weights w_l * w_m * w_n."""
    r = gauss_rule(L)
    pts = np.empty((L * L * L, 3))
    wts = np.empty(L * L * L)
    idx = 0
    for l in range(L):
        for m in range(L):
            for n in range(L):
                pts[idx, 0] = r.nodes[l]
                pts[idx, 1] = r.nodes[m]
                pts[idx, 2] = r.nodes[n]
                wts[idx] = r.weights[l] * r.weights[m] * r.weights[n]
                idx += 1
    return Rule3D(points=pts, weights=wts, order=L)


def default_rule_order(space: str, orders: tuple[int, int, int]) -> int:
    """Default quadrature order: max(p) for L2, max(p) + 1 otherwise."""
    pmax = max(orders)
    return pmax if space == "L2" else pmax + 1
