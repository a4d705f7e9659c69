"""One-dimensional Legendre / integrated-Legendre shape machinery.

All polynomials live on the master interval [0, 1].  ``P_i`` denotes the
shifted Legendre polynomial normalized so that ``P_i(1) = 1``; ``L_i`` is its
antiderivative (``L_i' = P_{i-1}``), completed with the hat pair
``L_0 = 1 - xi``, ``L_1 = xi`` so that {L_0, ..., L_p} spans the degree-p
polynomials.  The H1 shape functions are ``chi_i = L_i`` and the L2 shape
functions are ``nu_i = chi_{i+1}' = P_i``.

``f_entry(r, s, i, j)`` returns the interval integral of
``chi_i^(r) * chi_j^(s)`` (derivative applied when the bit is 1) from exact
closed-form rational expressions, so the simplified Gram backends need no
quadrature at all.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, InvalidOrderError

__all__ = [
    "LegendreEval",
    "ShapeTable1D",
    "FTable",
    "legendre_all",
    "shape1_h1",
    "shape1_l2",
    "f_entry",
    "ftable",
    "chi_table",
    "nu_table",
    "DEFAULT_P_MAX",
]

DEFAULT_P_MAX = 12


@dataclass(frozen=True)
class LegendreEval:
    """Values P_0(xi) .. P_n(xi) at a single point."""

    values: np.ndarray
    point: float


@dataclass(frozen=True)
class ShapeTable1D:
    """chi_0..chi_p and chi'_0..chi'_p at a single point."""

    chi: np.ndarray
    dchi: np.ndarray
    point: float


def _check_point(xi: float) -> None:
    if not 0.0 <= xi <= 1.0:
        raise DomainError(f"evaluation point {xi} outside the master interval [0, 1]")


def legendre_all(n: int, xi: float) -> LegendreEval:
    """Evaluate P_0 .. P_n at ``xi`` by the three-term recursion."""
    if n < 0:
        raise InvalidOrderError("legendre_all requires n >= 0")
    _check_point(xi)
    values = np.empty(n + 1)
    values[0] = 1.0
    if n >= 1:
        t = 2.0 * xi - 1.0
        values[1] = t
        for i in range(2, n + 1):
            values[i] = ((2 * i - 1) * t * values[i - 1] - (i - 1) * values[i - 2]) / i
    return LegendreEval(values=values, point=xi)


def shape1_h1(p: int, xi: float) -> ShapeTable1D:
    """Integrated-Legendre shape table (chi, chi') of order ``p`` at ``xi``."""
    if p < 1:
        raise InvalidOrderError("shape1_h1 requires p >= 1")
    _check_point(xi)
    pv = legendre_all(p, xi).values
    chi = np.empty(p + 1)
    dchi = np.empty(p + 1)
    chi[0] = 1.0 - xi
    chi[1] = xi
    dchi[0] = -1.0
    dchi[1] = 1.0
    for i in range(2, p + 1):
        chi[i] = (pv[i] - pv[i - 2]) / (2.0 * (2 * i - 1))
        dchi[i] = pv[i - 1]
    return ShapeTable1D(chi=chi, dchi=dchi, point=xi)


def shape1_l2(p: int, xi: float) -> np.ndarray:
    """L2 shape values nu_0 .. nu_{p-1} (Legendre polynomials) at ``xi``."""
    if p < 1:
        raise InvalidOrderError("shape1_l2 requires p >= 1")
    return legendre_all(p - 1, xi).values


def chi_table(p: int, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized H1 shape table: arrays of shape (len(pts), p+1)."""
    if p < 1:
        raise InvalidOrderError("chi_table requires p >= 1")
    pts = np.asarray(pts, dtype=float)
    t = 2.0 * pts - 1.0
    pv = np.empty((pts.size, p + 1))
    pv[:, 0] = 1.0
    pv[:, 1] = t
    for i in range(2, p + 1):
        pv[:, i] = ((2 * i - 1) * t * pv[:, i - 1] - (i - 1) * pv[:, i - 2]) / i
    chi = np.empty_like(pv)
    dchi = np.empty_like(pv)
    chi[:, 0] = 1.0 - pts
    chi[:, 1] = pts
    dchi[:, 0] = -1.0
    dchi[:, 1] = 1.0
    for i in range(2, p + 1):
        chi[:, i] = (pv[:, i] - pv[:, i - 2]) / (2.0 * (2 * i - 1))
        dchi[:, i] = pv[:, i - 1]
    return chi, dchi


def nu_table(p: int, pts: np.ndarray) -> np.ndarray:
    """Vectorized L2 shape table: array of shape (len(pts), p)."""
    if p < 1:
        raise InvalidOrderError("nu_table requires p >= 1")
    pts = np.asarray(pts, dtype=float)
    t = 2.0 * pts - 1.0
    nu = np.empty((pts.size, p))
    nu[:, 0] = 1.0
    if p >= 2:
        nu[:, 1] = t
    for i in range(2, p):
        nu[:, i] = ((2 * i - 1) * t * nu[:, i - 1] - (i - 1) * nu[:, i - 2]) / i
    return nu


def _f00(i: int, j: int) -> float:
    if i < j:
        i, j = j, i
    # now i >= j
    if j >= 2:
        if i == j:
            return (1.0 / (2 * j + 1) + 1.0 / (2 * j - 3)) / (4.0 * (2 * j - 1) ** 2)
        if i == j + 2:
            return -1.0 / (4.0 * (2 * j + 3) * (2 * j - 1) * (2 * j + 1))
        return 0.0
    if j == 1:
        if i == 1:
            return 1.0 / 3.0
        if i == 2:
            return -1.0 / 12.0
        if i == 3:
            return -1.0 / 60.0
        return 0.0
    # j == 0
    if i == 0:
        return 1.0 / 3.0
    if i == 1:
        return 1.0 / 6.0
    if i == 2:
        return -1.0 / 12.0
    if i == 3:
        return 1.0 / 60.0
    return 0.0


def _f01(i: int, j: int) -> float:
    # chi_0' = -chi_1', so the j = 0 column mirrors j = 1 with a sign flip
    if j == 0:
        return -_f01(i, 1)
    if i == 0:
        if j == 1:
            return 0.5
        if j == 2:
            return -1.0 / 6.0
        return 0.0
    if i == 1:
        if j == 1:
            return 0.5
        if j == 2:
            return 1.0 / 6.0
        return 0.0
    if i == 2:
        if j == 1:
            return -1.0 / 6.0
        if j == 3:
            return 1.0 / 30.0
        return 0.0
    # i >= 3
    if j == i + 1:
        return 1.0 / (2.0 * (2 * i - 1) * (2 * i + 1))
    if j == i - 1:
        return -1.0 / (2.0 * (2 * i - 1) * (2 * i - 3))
    return 0.0


def _f11(i: int, j: int) -> float:
    if i < j:
        i, j = j, i
    if j >= 1:
        return 1.0 / (2 * i - 1) if i == j else 0.0
    # j == 0
    if i == 0:
        return 1.0
    if i == 1:
        return -1.0
    return 0.0


def f_entry(r: int, s: int, i: int, j: int) -> float:
    """Closed-form integral of chi_i^(r) chi_j^(s) over the master interval."""
    if r not in (0, 1) or s not in (0, 1):
        raise ValueError("derivative flags r, s must be 0 or 1")
    if i < 0 or j < 0:
        raise ValueError("shape indices must be non-negative")
    if r == 0 and s == 0:
        return _f00(i, j)
    if r == 0 and s == 1:
        return _f01(i, j)
    if r == 1 and s == 0:
        return _f01(j, i)
    return _f11(i, j)


@dataclass(frozen=True)
class FTable:
    """Dense interval-integral tables F^{rs}[i, j] for indices 0..p_max.

    ``f00[i, j] = integral(chi_i chi_j)``, ``f01[i, j] = integral(chi_i chi_j')``
    and ``f11[i, j] = integral(chi_i' chi_j')``; the (1,0) table is the
    transpose of the (0,1) one.
    """

    p_max: int
    f00: np.ndarray
    f01: np.ndarray
    f11: np.ndarray
    stacked: np.ndarray  # (4, p_max+1, p_max+1): [F^00, F^01, F^10, F^11]

    def entry(self, r: int, s: int, i: int, j: int) -> float:
        if not (0 <= i <= self.p_max and 0 <= j <= self.p_max):
            raise ValueError(f"indices ({i}, {j}) exceed table p_max = {self.p_max}")
        if r == 0:
            return self.f00[i, j] if s == 0 else self.f01[i, j]
        return self.f01[j, i] if s == 0 else self.f11[i, j]


@lru_cache(maxsize=None)
def ftable(p_max: int = DEFAULT_P_MAX) -> FTable:
    """Build (and cache) the closed-form F tables up to index ``p_max``."""
    if p_max < 1:
        raise InvalidOrderError("ftable requires p_max >= 1")
    n = p_max + 1
    f00 = np.empty((n, n))
    f01 = np.empty((n, n))
    f11 = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            f00[i, j] = _f00(i, j)
            f01[i, j] = _f01(i, j)
            f11[i, j] = _f11(i, j)
    stacked = np.ascontiguousarray(np.stack([f00, f01, f01.T, f11]))
    return FTable(p_max=p_max, f00=f00, f01=f01, f11=f11, stacked=stacked)
