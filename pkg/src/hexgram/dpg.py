"""Element-level DPG systems: enriched Gram G, stiffness B and load l for the
single-element application problems, plus static condensation.

The three problems mirror the benchmark applications: the primal Poisson
problem (H1 test Gram), the primal Maxwell problem (H(curl) Gram only) and
the ultraweak acoustics problem (adjoint-graph Gram over H1 x H(div), with a
fully sum-factorized stiffness assembly).  Trace variables and the trace
stiffness are out of scope; Dirichlet data enters by constraining trial
coefficients of the condensed system.

Complex-valued systems (acoustics) are stored in real block form: a complex
matrix M = X + iY becomes [[X, -Y], [Y, X]] and a complex vector z = x + iy
becomes [x; y], which keeps all linear algebra real and makes the Hermitian
checks plain symmetry checks.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import _kernels as K
from .errors import NonSPDError
from .geometry import ElementMap, eval_geometry, map_position
from .gram import GramResult, OpCounters, gram
from .poly1d import ftable
from .quadrature import gauss_rule, tensor_rule
from .spaces import SpaceSignature, dim, flat_to_multi, shape3_tables

__all__ = [
    "DpgElementSystem",
    "UltraweakAcousticsProblem",
    "poisson_primal_element",
    "maxwell_gram",
    "adjoint_graph_gram",
    "acoustics_ultraweak_element",
    "condense",
    "solve_with_dirichlet",
    "h1_boundary_dofs",
    "x1_coefficients",
]


@dataclass
class DpgElementSystem:
    """Arrays of the enriched element system G s - B u = -l (trace-free)."""

    G: np.ndarray
    B: np.ndarray
    l: np.ndarray
    orders: tuple[int, int, int]  # (p0, dp, p_r)
    is_complex: bool = False
    condensed: tuple[np.ndarray, np.ndarray] | None = None
    gram_counters: OpCounters | None = None

    def __post_init__(self):
        m = self.B.shape[0]
        n = self.B.shape[1]
        if self.is_complex:
            m //= 2
            n //= 2
        if m <= n:
            raise ValueError(f"enriched test space must dominate: m={m} <= n={n}")

    @property
    def m(self) -> int:
        return self.B.shape[0] // (2 if self.is_complex else 1)

    @property
    def n(self) -> int:
        return self.B.shape[1] // (2 if self.is_complex else 1)


@dataclass(frozen=True)
class UltraweakAcousticsProblem:
    """Time-harmonic acoustics data: frequency, broken-norm correction and
    the source; ``load_pairing`` selects which test component the source is
    paired with in the load functional ('velocity' follows the printed form,
    'pressure' the first-order system's pressure equation)."""

    omega: float
    alpha: float
    f: object = None
    load_pairing: str = "velocity"

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.load_pairing not in ("velocity", "pressure"):
            raise ValueError("load_pairing must be 'velocity' or 'pressure'")


def _sample(fun, emap: ElementMap, pts: np.ndarray) -> np.ndarray:
    if fun is None:
        return np.zeros(pts.shape[0])
    if np.isscalar(fun):
        return np.full(pts.shape[0], float(fun))
    out = np.empty(pts.shape[0])
    for t in range(pts.shape[0]):
        out[t] = float(fun(map_position(emap, pts[t])))
    return out


def poisson_primal_element(
    p0: int,
    dp: int,
    k,
    r,
    emap: ElementMap,
    backend: str = "conventional",
) -> DpgElementSystem:
    """Primal Poisson element arrays: G is the H1 Gram of the enriched test
    space (selected backend); B and l use conventional quadrature with the
    L = p_r + 1 rule."""
    if p0 < 1 or dp < 1:
        raise ValueError("p0 and dp must be >= 1")
    pr = p0 + dp
    test_sig = SpaceSignature("H1", (pr, pr, pr))
    trial_sig = SpaceSignature("H1", (p0, p0, p0))
    gres = gram(test_sig, emap, backend, rule_order=pr + 1)
    G = gres.matrix

    rule = tensor_rule(pr + 1)
    pts, wts = rule.points, rule.weights
    test_vals, test_grads = shape3_tables(test_sig, pts)
    _, trial_grads = shape3_tables(trial_sig, pts)
    kflat = _sample(1.0 if k is None else k, emap, pts)
    B = K.bilinear_grad_conv(
        pts, wts, test_grads, trial_grads, emap.kind_code, emap.params, kflat
    )
    det = np.array([eval_geometry(emap, p).detJ for p in pts])
    rflat = _sample(r, emap, pts)
    l = test_vals.T @ (wts * det * rflat)
    return DpgElementSystem(G=G, B=B, l=l, orders=(p0, dp, pr),
                            gram_counters=gres.counters)


def maxwell_gram(p_r: int, emap: ElementMap, backend: str = "conventional") -> GramResult:
    """Gram matrix of the primal Maxwell test space H(curl) at order p_r."""
    return gram(SpaceSignature("Hcurl", (p_r, p_r, p_r)), emap, backend,
                rule_order=p_r + 1)


def _sep3(A1: np.ndarray, A2: np.ndarray, A3: np.ndarray) -> np.ndarray:
    """Separable triple product with digit-lexicographic flattening on both
    axes (fastest digit first)."""
    T = np.einsum("ix,jy,kz->kjizyx", A1, A2, A3)
    r = A1.shape[0] * A2.shape[0] * A3.shape[0]
    c = A1.shape[1] * A2.shape[1] * A3.shape[1]
    return T.reshape(r, c)


def _graph_mixed_ftables(pr: int, omega: float) -> np.ndarray:
    """Adjoint-graph cross block S (real part of G_qv / i) from closed-form
    interval integrals: S[ih, iv] = omega * (q, div v) - omega * (grad q, v)
    on the master element."""
    ft = ftable(pr + 1)
    f01 = ft.f01
    q = pr + 1
    blocks = []
    for a in range(3):
        K1 = []
        K2 = []
        for d in range(3):
            n_d = q if d == a else pr
            sh = 0 if d == a else 1
            M1 = np.empty((q, n_d))
            M2 = np.empty((q, n_d))
            for i in range(q):
                for j in range(n_d):
                    M1[i, j] = f01[i, j + sh]
                    M2[i, j] = f01[j, i] if d == a else f01[i, j + sh]
            K1.append(M1)
            K2.append(M2)
        blocks.append(omega * (_sep3(*K1) - _sep3(*K2)))
    return np.hstack(blocks)


def adjoint_graph_gram(
    p_r: int,
    omega: float,
    alpha: float,
    emap: ElementMap,
    backend: str = "conventional",
    include_mixed: bool = True,
) -> GramResult:
    """Adjoint-graph Gram matrix over W^{p_r} x V^{p_r}, in real block form.

    Diagonal blocks are the H1 and H(div) Grams with mass weight
    omega^2 + alpha (delegated to the selected backend); the off-diagonal
    block is the purely imaginary frequency coupling, assembled from
    closed-form interval integrals for the tensorized/simplified backends
    and by conventional quadrature otherwise.
    """
    if omega <= 0 or alpha <= 0:
        raise ValueError("omega and alpha must be positive")
    w = omega * omega + alpha
    sig_q = SpaceSignature("H1", (p_r, p_r, p_r))
    sig_v = SpaceSignature("Hdiv", (p_r, p_r, p_r))
    L = p_r + 1
    rq = gram(sig_q, emap, backend, rule_order=L, mass_weight=w)
    rv = gram(sig_v, emap, backend, rule_order=L, mass_weight=w)
    mw = rq.matrix.shape[0]
    mv = rv.matrix.shape[0]
    m = mw + mv
    re = np.zeros((m, m))
    re[:mw, :mw] = rq.matrix
    re[mw:, mw:] = rv.matrix
    im = np.zeros((m, m))
    if include_mixed:
        if backend == "conventional":
            rule = tensor_rule(L)
            qvals, qgrads = shape3_tables(sig_q, rule.points)
            vvals, vdivs = shape3_tables(sig_v, rule.points)
            S = K.mixed_graph_conv(
                rule.points, rule.weights, qvals, qgrads, vvals, vdivs, omega
            )
        else:
            S = _graph_mixed_ftables(p_r, omega)
        im[:mw, mw:] = S
        im[mw:, :mw] = -S.T
    G = np.block([[re, -im], [im, re]])
    cnt = OpCounters(
        rq.counters.accumulations + rv.counters.accumulations,
        rq.counters.geometry_calls + rv.counters.geometry_calls,
        rq.counters.shape1_calls + rv.counters.shape1_calls,
        rq.counters.shape3_calls + rv.counters.shape3_calls,
    )
    return GramResult(G, cnt)


def _acoustics_b_tensorized(p0, pr, omega, emap, rule1d):
    """Sum-factorized assembly of the ultraweak acoustics stiffness,
    one kernel call per separable term of the mapped bilinear form."""
    sig_v = SpaceSignature("Hdiv", (pr, pr, pr))
    mw = (pr + 1) ** 3
    mv = dim(sig_v)
    ny = p0**3
    m = mw + mv
    n = 4 * ny
    Bre = np.zeros((m, n))
    Bim = np.zeros((m, n))
    nodes, wts = rule1d.nodes, rule1d.weights
    kind, par = emap.kind_code, emap.params
    # (i omega p, q): no geometry factor
    out = K.mixed_tens_term(p0, pr, 0, 0, 0, 0, 0, 0, 0, 0, 0, nodes, wts, kind, par)
    Bim[:mw, :ny] += omega * out
    # -(u, grad q): -(Jinv[d, c]) against the d-derivative of q
    for d in range(3):
        su = tuple(1 if e == d else 0 for e in range(3))
        for c in range(3):
            out = K.mixed_tens_term(
                p0, pr, su[0], su[1], su[2], 0, 0, 0, 3, d, c, nodes, wts, kind, par
            )
            Bre[:mw, ny * (1 + c) : ny * (2 + c)] -= out
    # H(div) test blocks
    off = mw
    for a in range(3):
        sh = tuple(0 if e == a else 1 for e in range(3))
        na = (pr + 1 - sh[0]) * (pr + 1 - sh[1]) * (pr + 1 - sh[2])
        # -(p, div v): all-derivative test factors, 1/detJ
        out = K.mixed_tens_term(
            p0, pr, 1, 1, 1, sh[0], sh[1], sh[2], 1, 0, 0, nodes, wts, kind, par
        )
        Bre[off : off + na, :ny] -= out
        # (i omega u, v): J[c, a]/detJ against the component-a value factors
        su = tuple(0 if e == a else 1 for e in range(3))
        for c in range(3):
            out = K.mixed_tens_term(
                p0, pr, su[0], su[1], su[2], sh[0], sh[1], sh[2], 2, c, a,
                nodes, wts, kind, par,
            )
            Bim[off : off + na, ny * (1 + c) : ny * (2 + c)] += omega * out
        off += na
    return Bre, Bim


def _acoustics_load(problem, p0, pr, emap, rule):
    """Load vector (f, v) or (f, q); returns the real part over the stacked
    test space (the source is real)."""
    sig_q = SpaceSignature("H1", (pr, pr, pr))
    sig_v = SpaceSignature("Hdiv", (pr, pr, pr))
    mw = dim(sig_q)
    mv = dim(sig_v)
    l = np.zeros(mw + mv)
    if problem.f is None:
        return l
    pts, wts = rule.points, rule.weights
    fflat = _sample(problem.f, emap, pts)
    if problem.load_pairing == "pressure":
        qvals, _ = shape3_tables(sig_q, pts)
        det = np.array([eval_geometry(emap, p).detJ for p in pts])
        l[:mw] = qvals.T @ (wts * det * fflat)
        return l
    # velocity pairing: scalar source broadcast to all components,
    # (f 1, |J|^-1 J v_hat) |J| = f 1^T J v_hat
    vvals, _ = shape3_tables(sig_v, pts)
    Jrows = np.empty((pts.shape[0], 3))
    for t in range(pts.shape[0]):
        Jrows[t] = eval_geometry(emap, pts[t]).J.sum(axis=0)
    l[mw:] = np.einsum("q,qs,qis->i", wts * fflat, Jrows, vvals)
    return l


def acoustics_ultraweak_element(
    problem: UltraweakAcousticsProblem,
    p0: int,
    dp: int,
    emap: ElementMap,
    backend: str = "tensorized",
) -> DpgElementSystem:
    """Ultraweak acoustics element arrays in real block form.

    Trial space: pressures in Y^{p0} followed by the three velocity
    component blocks (each Y^{p0}); test space: W^{p_r} then V^{p_r}.
    ``backend`` selects both the Gram backend and the stiffness route
    (conventional quadrature vs sum factorization).
    """
    if p0 < 1 or dp < 1:
        raise ValueError("p0 and dp must be >= 1")
    pr = p0 + dp
    L = pr + 1
    gres = adjoint_graph_gram(pr, problem.omega, problem.alpha, emap, backend)
    G = gres.matrix
    if backend == "conventional":
        rule = tensor_rule(L)
        sig_q = SpaceSignature("H1", (pr, pr, pr))
        sig_v = SpaceSignature("Hdiv", (pr, pr, pr))
        sig_y = SpaceSignature("L2", (p0, p0, p0))
        qvals, qgrads = shape3_tables(sig_q, rule.points)
        vvals, vdivs = shape3_tables(sig_v, rule.points)
        yvals, _ = shape3_tables(sig_y, rule.points)
        Bre, Bim = K.acoustics_b_conv(
            rule.points, rule.weights, qvals, qgrads, vvals, vdivs, yvals,
            problem.omega, emap.kind_code, emap.params,
        )
    else:
        Bre, Bim = _acoustics_b_tensorized(p0, pr, problem.omega, emap, gauss_rule(L))
    lre = _acoustics_load(problem, p0, pr, emap, tensor_rule(L))
    B2 = np.block([[Bre, -Bim], [Bim, Bre]])
    l2 = np.concatenate([lre, np.zeros_like(lre)])
    return DpgElementSystem(G=G, B=B2, l=l2, orders=(p0, dp, pr), is_complex=True,
                            gram_counters=gres.counters)


def condense(system: DpgElementSystem) -> tuple[np.ndarray, np.ndarray]:
    """Static condensation to (B^T G^-1 B, B^T G^-1 l) via Cholesky."""
    try:
        c = cho_factor(system.G, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NonSPDError(f"Gram matrix not SPD during condensation: {exc}")
    A = system.B.T @ cho_solve(c, system.B)
    rhs = system.B.T @ cho_solve(c, system.l)
    system.condensed = (A, rhs)
    return A, rhs


def solve_with_dirichlet(system: DpgElementSystem, fixed: dict[int, float]):
    """Solve the condensed system with trial coefficients in ``fixed``
    constrained (row replacement).  Returns (u, s, free_residual) where s is
    recovered from the first row of the saddle system and free_residual is
    max |(B^T s)_j| over the unconstrained trial rows."""
    A, rhs = condense(system)
    n = A.shape[0]
    A2 = A.copy()
    rhs2 = rhs.copy()
    for idx, val in fixed.items():
        A2[idx, :] = 0.0
        A2[idx, idx] = 1.0
        rhs2[idx] = val
    u = np.linalg.solve(A2, rhs2)
    c = cho_factor(system.G, lower=True)
    s = cho_solve(c, system.B @ u - system.l)
    bts = system.B.T @ s
    free = [j for j in range(n) if j not in fixed]
    residual = float(np.max(np.abs(bts[free]))) if free else 0.0
    return u, s, residual


def h1_boundary_dofs(p0: int) -> list[int]:
    """Trial dofs of the order-p0 H1 space whose basis functions do not
    vanish on the element boundary (any digit below 2)."""
    sig = SpaceSignature("H1", (p0, p0, p0))
    out = []
    for I in range(dim(sig)):
        _, ids = flat_to_multi(sig, I)
        if min(ids) < 2:
            out.append(I)
    return out


def x1_coefficients(p0: int) -> np.ndarray:
    """Coefficients of u(x) = x1 in the order-p0 H1 basis (identity map):
    1 on the digit tuples (1, i2, i3) with i2, i3 in {0, 1}, else 0."""
    sig = SpaceSignature("H1", (p0, p0, p0))
    u = np.zeros(dim(sig))
    for I in range(dim(sig)):
        _, (i1, i2, i3) = flat_to_multi(sig, I)
        if i1 == 1 and i2 <= 1 and i3 <= 1:
            u[I] = 1.0
    return u
