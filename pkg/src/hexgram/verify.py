"""Verification suite: every invariant of the library as a named check.

The CLI ``verify`` command runs these and reports one pass/fail line per
check; the acceptance tests call the same functions.  ``level`` selects the
parameter grid: ``fast`` keeps every check under a few seconds, ``full`` runs
the complete acceptance-grade grids.
"""

import time
from dataclasses import dataclass

import numpy as np

from .dpg import (
    UltraweakAcousticsProblem,
    acoustics_ultraweak_element,
    h1_boundary_dofs,
    poisson_primal_element,
    solve_with_dirichlet,
    x1_coefficients,
)
from .geometry import classify, identity_map, preset_map
from .gram import gram, gram_conventional, gram_tensorized
from .poly1d import f_entry, legendre_all, shape1_h1
from .quadrature import default_rule_order, gauss_rule, tensor_rule
from .spaces import SPACES, SpaceSignature, dim

__all__ = ["CheckResult", "run_verification", "CHECK_NAMES", "slope_of_counts"]

EQUALITY_MAPS = ("identity", "diagonal-affine", "general-affine", "trilinear", "extrusion")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _chi(i, r, xi):
    t = shape1_h1(max(i, 1), xi)
    return t.dchi[i] if r else t.chi[i]


def check_ftable_oracle(inject_fault: bool = False) -> CheckResult:
    """Closed-form interval integrals against a 12-point Gauss oracle."""
    t0 = time.perf_counter()
    rule = gauss_rule(12)
    worst = 0.0
    for r in (0, 1):
        for s in (0, 1):
            for i in range(11):
                for j in range(11):
                    num = sum(
                        w * _chi(i, r, x) * _chi(j, s, x)
                        for x, w in zip(rule.nodes, rule.weights)
                    )
                    val = f_entry(r, s, i, j)
                    if inject_fault and (r, s, i, j) == (0, 0, 2, 2):
                        val += 0.5
                    worst = max(worst, abs(val - num))
    dt = time.perf_counter() - t0
    return CheckResult(
        "f_table_oracle", bool(worst <= 1e-14),
        f"max |closed form - quadrature| = {worst:.2e} (tol 1e-14, {dt:.2f}s)",
    )


def check_legendre_properties() -> CheckResult:
    rule = gauss_rule(12)
    tab = np.array([legendre_all(10, x).values for x in rule.nodes])
    worst_orth = 0.0
    for i in range(11):
        for j in range(11):
            val = float(np.sum(rule.weights * tab[:, i] * tab[:, j]))
            expect = 1.0 / (2 * i + 1) if i == j else 0.0
            worst_orth = max(worst_orth, abs(val - expect))
    worst_avg = max(
        abs(float(np.sum(rule.weights * tab[:, i]))) for i in range(1, 11)
    )
    worst_end = float(np.max(np.abs(legendre_all(10, 1.0).values - 1.0)))
    ok = bool(worst_orth <= 1e-14 and worst_avg <= 1e-14 and worst_end <= 1e-15)
    return CheckResult(
        "legendre_properties", ok,
        f"orthogonality {worst_orth:.2e}, zero-average {worst_avg:.2e}, "
        f"endpoint {worst_end:.2e}",
    )


def _sequence_residual(p: int, n_pts: int = 50) -> float:
    from .spaces import shape3_tables

    rng = np.random.default_rng(11)
    pts = rng.uniform(0, 1, (n_pts, 3))
    worst = 0.0
    for src, dst in (("H1", "Hcurl"), ("Hcurl", "Hdiv"), ("Hdiv", "L2")):
        sig_s = SpaceSignature(src, (p, p, p))
        sig_d = SpaceSignature(dst, (p, p, p))
        _, deriv = shape3_tables(sig_s, pts)
        vals_d, _ = shape3_tables(sig_d, pts)
        if dst == "L2":
            A, b = vals_d, deriv
        else:
            A = vals_d.transpose(0, 2, 1).reshape(3 * n_pts, -1)
            b = deriv.transpose(0, 2, 1).reshape(3 * n_pts, -1)
        coef = np.linalg.lstsq(A, b, rcond=None)[0]
        worst = max(worst, float(np.max(np.abs(A @ coef - b))))
    return worst


def check_sequence_containment(level: str = "fast") -> CheckResult:
    ps = (1, 2) if level == "fast" else (1, 2, 3, 4)
    worst = max(_sequence_residual(p) for p in ps)
    return CheckResult(
        "exact_sequence_containment", bool(worst <= 1e-10),
        f"worst least-squares residual {worst:.2e} over p in {ps} (tol 1e-10)",
    )


def _equality_orders(level: str):
    if level == "fast":
        return [(1, 1, 1), (2, 2, 2), (3, 3, 3), (1, 2, 3)]
    uniform = [(p, p, p) for p in range(1, 7)]
    return uniform + [(2, 3, 4), (1, 2, 3)]


def check_cross_backend(level: str = "fast", rule_override=None) -> CheckResult:
    """Backend-pair equality over the space x map x order grid."""
    t0 = time.perf_counter()
    worst = 0.0
    worst_case = ""
    cells = 0
    for space in SPACES:
        for orders in _equality_orders(level):
            sig = SpaceSignature(space, orders)
            L = rule_override or default_rule_order(space, orders)
            rule1 = gauss_rule(L)
            rule3 = tensor_rule(L)
            for mapname in EQUALITY_MAPS:
                emap = preset_map(mapname)
                ref = gram_conventional(sig, emap, rule3).matrix
                scale = max(float(np.max(np.abs(ref))), 1e-300)
                results = {
                    "tensorized/std": gram_tensorized(sig, emap, rule1, "standard").matrix,
                    "tensorized/alt": gram_tensorized(sig, emap, rule1, "alternative").matrix,
                }
                tol = 1e-12
                if classify(emap) != "general":
                    from .gram import gram_simplified

                    results["simplified"] = gram_simplified(
                        sig, emap, rule1d=rule1
                    ).matrix
                    if classify(emap) == "extrusion":
                        tol = 1e-11
                mats = [ref] + list(results.values())
                for i in range(len(mats)):
                    for j in range(i + 1, len(mats)):
                        rel = float(np.max(np.abs(mats[i] - mats[j]))) / scale
                        if rel > worst:
                            worst = rel
                            worst_case = f"{space} {orders} {mapname}"
                        if rel > tol:
                            return CheckResult(
                                "cross_backend_equality", False,
                                f"{space} {orders} {mapname}: rel diff {rel:.2e} > {tol:g}",
                            )
                cells += 1
    dt = time.perf_counter() - t0
    return CheckResult(
        "cross_backend_equality", True,
        f"{cells} cells, worst rel diff {worst:.2e} ({worst_case}), {dt:.1f}s",
    )


def check_operation_counts() -> CheckResult:
    emap = identity_map()
    for p in range(2, 7):
        sig = SpaceSignature("L2", (p, p, p))
        conv = gram_conventional(sig, emap, tensor_rule(p)).counters.accumulations
        tens = gram_tensorized(sig, emap, gauss_rule(p), "standard").counters.accumulations
        if conv != p**6 * (p**3 + 1) // 2:
            return CheckResult(
                "operation_counts", False,
                f"conventional count {conv} != p^6(p^3+1)/2 at p={p}",
            )
        if tens != p * (p * (p + 1) // 2) ** 3:
            return CheckResult(
                "operation_counts", False,
                f"tensorized count {tens} != p(p(p+1)/2)^3 at p={p}",
            )
    return CheckResult(
        "operation_counts", True,
        "conventional = p^6(p^3+1)/2 and tensorized = p(p(p+1)/2)^3 for p in 2..6",
    )


def check_spd(level: str = "fast") -> CheckResult:
    orders = (2, 2, 2) if level == "fast" else (3, 3, 3)
    for space in SPACES:
        sig = SpaceSignature(space, orders)
        for mapname in EQUALITY_MAPS:
            emap = preset_map(mapname)
            for backend in ("conventional", "tensorized", "simplified"):
                if backend == "simplified" and classify(emap) == "general":
                    continue
                res = gram(sig, emap, backend)
                if np.max(np.abs(res.matrix - res.matrix.T)) != 0.0:
                    return CheckResult("spd", False, f"{space} {backend} not symmetric")
                try:
                    res.cholesky()
                except Exception:
                    return CheckResult(
                        "spd", False, f"{space} {mapname} {backend}: Cholesky failed"
                    )
    return CheckResult("spd", True, f"all backends SPD at orders {orders}")


def _fit_slope(xs, ys) -> float:
    x = np.asarray(xs)
    y = np.asarray(ys)
    x = x - x.mean()
    return float(np.dot(x, y - y.mean()) / np.dot(x, x))


def slope_of_counts(space: str, backend: str, loop_order: str = "standard"):
    """Regression slope of log(accumulations) against the log of the
    per-coordinate 1D loop size, following the cost parameterization used by
    the complexity estimates: the abscissa is log(p+1) for H1 (1D basis size),
    log(p) for L2 run at basis sizes 4..9, and log(dim)/3 for the mixed-size
    H(div)/H(curl) spaces."""
    emap = identity_map()
    if space == "L2":
        orders = range(4, 10)
    else:
        orders = range(3, 9)
    xs, ys = [], []
    for p in orders:
        sig = SpaceSignature(space, (p, p, p))
        L = default_rule_order(space, sig.orders)
        if backend == "conventional":
            cnt = gram_conventional(sig, emap, tensor_rule(L)).counters.accumulations
        elif backend == "tensorized":
            cnt = gram_tensorized(
                sig, emap, gauss_rule(L), loop_order
            ).counters.accumulations
        else:
            from .gram import gram_simplified

            cnt = gram_simplified(sig, emap, rule1d=gauss_rule(L)).counters.accumulations
        if space == "H1":
            x = np.log(p + 1)
        elif space == "L2":
            x = np.log(p)
        else:
            x = np.log(dim(sig)) / 3.0
        xs.append(x)
        ys.append(np.log(cnt))
    return _fit_slope(xs, ys)


SLOPE_TARGETS = {"conventional": 9.0, "tensorized": 7.0, "simplified": 6.0}


def check_complexity_slopes() -> CheckResult:
    t0 = time.perf_counter()
    details = []
    ok = True
    for space in SPACES:
        band = 0.35 if space == "H1" else 0.5
        for backend, target in SLOPE_TARGETS.items():
            s = slope_of_counts(space, backend)
            good = abs(s - target) <= band
            ok = ok and good
            details.append(f"{space}/{backend}={s:.2f}")
            if not good:
                return CheckResult(
                    "complexity_slopes", False,
                    f"{space}/{backend}: slope {s:.3f} outside {target}+-{band}",
                )
    dt = time.perf_counter() - t0
    return CheckResult(
        "complexity_slopes", True, "; ".join(details) + f" ({dt:.1f}s)"
    )


def check_dpg_poisson() -> CheckResult:
    exact = x1_coefficients(1)
    fixed = {i: exact[i] for i in h1_boundary_dofs(1)}
    for backend in ("conventional", "tensorized", "simplified"):
        sys_ = poisson_primal_element(1, 2, 1.0, None, identity_map(), backend)
        u, _, residual = solve_with_dirichlet(sys_, fixed)
        err = float(np.max(np.abs(u - exact)))
        if err > 1e-10 or residual > 1e-9:
            return CheckResult(
                "dpg_poisson_manufactured", False,
                f"{backend}: coefficient error {err:.2e}, residual {residual:.2e}",
            )
    return CheckResult(
        "dpg_poisson_manufactured", True,
        "u = x1 reproduced within 1e-10 for all Gram backends; B^T s residual <= 1e-9",
    )


def check_dpg_acoustics(level: str = "fast") -> CheckResult:
    p0s = (1, 2) if level == "fast" else (1, 2, 3)
    prob = UltraweakAcousticsProblem(omega=2.0, alpha=0.5)
    emap = preset_map("trilinear")
    worst = 0.0
    for p0 in p0s:
        sc = acoustics_ultraweak_element(prob, p0, 2, emap, "conventional")
        st = acoustics_ultraweak_element(prob, p0, 2, emap, "tensorized")
        relb = float(np.max(np.abs(sc.B - st.B))) / float(np.max(np.abs(sc.B)))
        relg = float(np.max(np.abs(sc.G - st.G))) / float(np.max(np.abs(sc.G)))
        worst = max(worst, relb, relg)
        if relb > 1e-12 or relg > 1e-12:
            return CheckResult(
                "dpg_acoustics_oracle", False,
                f"p0={p0}: B rel {relb:.2e}, G rel {relg:.2e} (tol 1e-12)",
            )
        try:
            np.linalg.cholesky(st.G)
        except np.linalg.LinAlgError:
            return CheckResult(
                "dpg_acoustics_oracle", False, f"p0={p0}: Gram not HPD"
            )
    return CheckResult(
        "dpg_acoustics_oracle", True,
        f"tensorized B, G match conventional (worst rel {worst:.2e}); G HPD",
    )


def run_verification(level: str = "fast", rule_override=None, inject_fault=None):
    """Run the suite; returns the list of CheckResult in a fixed order."""
    results = [
        check_ftable_oracle(inject_fault == "ftable"),
        check_legendre_properties(),
        check_sequence_containment(level),
        check_cross_backend(level, rule_override),
        check_operation_counts(),
        check_spd(level),
        check_dpg_poisson(),
        check_dpg_acoustics(level),
    ]
    if level == "full":
        results.append(check_complexity_slopes())
    return results


CHECK_NAMES = (
    "f_table_oracle",
    "legendre_properties",
    "exact_sequence_containment",
    "cross_backend_equality",
    "operation_counts",
    "spd",
    "dpg_poisson_manufactured",
    "dpg_acoustics_oracle",
    "complexity_slopes",
)
