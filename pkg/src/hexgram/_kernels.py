"""Compiled loop-nest kernels for the Gram backends and the DPG assembly.

Every kernel keeps the explicit loop structure of the integration algorithm
it implements (one accumulation statement per conceptual update), so that the
returned operation counters and the measured wall time both reflect the
algorithmic cost.  All kernels return ``(matrix, accum, geom, shape1,
shape3)`` with the counters meaning:

* accum  - executed Gram-level accumulation statements (the innermost
  statements that write into the result for the conventional algorithms, the
  final-level statements for the tensorized and simplified ones)
* geom   - element-map Jacobian evaluations
* shape1 / shape3 - 1D / 3D shape-function table evaluations

Conventions: coordinates d and vector components a, b are 0-based here;
``wgrid``/``wflat`` carry the optional scalar weight of the L2 (mass) part of
each inner product, sampled at the quadrature nodes (all ones when the inner
product is unweighted).
"""

import numpy as np
from numba import njit

# ---------------------------------------------------------------------------
# device helpers
# ---------------------------------------------------------------------------


@njit(cache=True)
def _shape1_h1_fill(xi, p, chi, dchi):
    t = 2.0 * xi - 1.0
    chi[0] = 1.0 - xi
    chi[1] = xi
    dchi[0] = -1.0
    dchi[1] = 1.0
    pm2 = 1.0
    pm1 = t
    for i in range(2, p + 1):
        pi = ((2 * i - 1) * t * pm1 - (i - 1) * pm2) / i
        chi[i] = (pi - pm2) / (2.0 * (2 * i - 1))
        dchi[i] = pm1
        pm2 = pm1
        pm1 = pi


@njit(cache=True)
def _shape1_l2_fill(xi, p, nu):
    t = 2.0 * xi - 1.0
    nu[0] = 1.0
    if p >= 2:
        nu[1] = t
    for i in range(2, p):
        nu[i] = ((2 * i - 1) * t * nu[i - 1] - (i - 1) * nu[i - 2]) / i


@njit(cache=True)
def _geom_jac(kind, par, x1, x2, x3, J):
    if kind == 0:
        for r in range(3):
            for c in range(3):
                J[r, c] = 1.0 if r == c else 0.0
    elif kind == 1:
        for r in range(3):
            for c in range(3):
                J[r, c] = par[r] if r == c else 0.0
    elif kind == 2:
        for r in range(3):
            for c in range(3):
                J[r, c] = par[3 * r + c]
    elif kind == 3:
        for r in range(3):
            for c in range(3):
                J[r, c] = 0.0
        J[0, 0] = par[0]
        J[1, 1] = (par[4] - par[2]) * (1.0 - x3) + (par[8] - par[6]) * x3
        J[2, 1] = (par[5] - par[3]) * (1.0 - x3) + (par[9] - par[7]) * x3
        J[1, 2] = (par[6] - par[2]) * (1.0 - x2) + (par[8] - par[4]) * x2
        J[2, 2] = (par[7] - par[3]) * (1.0 - x2) + (par[9] - par[5]) * x2
    else:
        for r in range(3):
            for c in range(3):
                J[r, c] = 0.0
        for k in range(8):
            b1 = k & 1
            b2 = (k >> 1) & 1
            b3 = (k >> 2) & 1
            f1 = x1 if b1 else 1.0 - x1
            f2 = x2 if b2 else 1.0 - x2
            f3 = x3 if b3 else 1.0 - x3
            g1 = 1.0 if b1 else -1.0
            g2 = 1.0 if b2 else -1.0
            g3 = 1.0 if b3 else -1.0
            for r in range(3):
                v = par[3 * k + r]
                J[r, 0] += v * g1 * f2 * f3
                J[r, 1] += v * f1 * g2 * f3
                J[r, 2] += v * f1 * f2 * g3


@njit(cache=True)
def _geom_full(kind, par, x1, x2, x3, J, Jinv):
    """Fill J and its inverse; return det J."""
    _geom_jac(kind, par, x1, x2, x3, J)
    c00 = J[1, 1] * J[2, 2] - J[1, 2] * J[2, 1]
    c01 = J[1, 2] * J[2, 0] - J[1, 0] * J[2, 2]
    c02 = J[1, 0] * J[2, 1] - J[1, 1] * J[2, 0]
    det = J[0, 0] * c00 + J[0, 1] * c01 + J[0, 2] * c02
    inv = 1.0 / det
    Jinv[0, 0] = c00 * inv
    Jinv[1, 0] = c01 * inv
    Jinv[2, 0] = c02 * inv
    Jinv[0, 1] = (J[0, 2] * J[2, 1] - J[0, 1] * J[2, 2]) * inv
    Jinv[1, 1] = (J[0, 0] * J[2, 2] - J[0, 2] * J[2, 0]) * inv
    Jinv[2, 1] = (J[0, 1] * J[2, 0] - J[0, 0] * J[2, 1]) * inv
    Jinv[0, 2] = (J[0, 1] * J[1, 2] - J[0, 2] * J[1, 1]) * inv
    Jinv[1, 2] = (J[0, 2] * J[1, 0] - J[0, 0] * J[1, 2]) * inv
    Jinv[2, 2] = (J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]) * inv
    return det


@njit(cache=True)
def _metric_d(Jinv, D):
    for a in range(3):
        for b in range(3):
            D[a, b] = (
                Jinv[a, 0] * Jinv[b, 0]
                + Jinv[a, 1] * Jinv[b, 1]
                + Jinv[a, 2] * Jinv[b, 2]
            )


@njit(cache=True)
def _metric_c(J, C):
    for a in range(3):
        for b in range(3):
            C[a, b] = J[0, a] * J[0, b] + J[1, a] * J[1, b] + J[2, a] * J[2, b]


@njit(cache=True)
def _flat_hdiv(a, i1, i2, i3, p1, p2, p3):
    if a == 0:
        return i1 + (p1 + 1) * (i2 + p2 * i3)
    off = (p1 + 1) * p2 * p3
    if a == 1:
        return off + i1 + p1 * (i2 + (p2 + 1) * i3)
    off += p1 * (p2 + 1) * p3
    return off + i1 + p1 * (i2 + p2 * i3)


@njit(cache=True)
def _flat_hcurl(a, i1, i2, i3, p1, p2, p3):
    if a == 0:
        return i1 + p1 * (i2 + (p2 + 1) * i3)
    off = p1 * (p2 + 1) * (p3 + 1)
    if a == 1:
        return off + i1 + (p1 + 1) * (i2 + p2 * i3)
    off += (p1 + 1) * p2 * (p3 + 1)
    return off + i1 + (p1 + 1) * (i2 + (p2 + 1) * i3)


@njit(cache=True)
def _mirror_upper(G):
    N = G.shape[0]
    for j in range(N):
        for i in range(j + 1, N):
            G[i, j] = G[j, i]


@njit(cache=True)
def _mirror_lower(G):
    N = G.shape[0]
    for j in range(N):
        for i in range(j + 1, N):
            G[j, i] = G[i, j]


@njit(cache=True)
def _fill_l2_sym(G, p1, p2, p3):
    """Complete the L2 matrix from the entries at coordinate-sorted digit
    pairs (the per-coordinate swap symmetry of the L2 integrand)."""
    N = p1 * p2 * p3
    for I in range(N):
        i1 = I % p1
        i2 = (I // p1) % p2
        i3 = I // (p1 * p2)
        for Jf in range(I + 1):
            j1 = Jf % p1
            j2 = (Jf // p1) % p2
            j3 = Jf // (p1 * p2)
            a1 = i1 if i1 >= j1 else j1
            b1 = j1 if i1 >= j1 else i1
            a2 = i2 if i2 >= j2 else j2
            b2 = j2 if i2 >= j2 else i2
            a3 = i3 if i3 >= j3 else j3
            b3 = j3 if i3 >= j3 else i3
            v = G[a1 + p1 * (a2 + p2 * a3), b1 + p1 * (b2 + p2 * b3)]
            G[I, Jf] = v
            G[Jf, I] = v


# ---------------------------------------------------------------------------
# conventional backends (Algorithms 1, 4, 6, 8)
# ---------------------------------------------------------------------------


@njit(cache=True)
def conv_l2(pts, wts, vals, kind, par, wflat):
    nq = pts.shape[0]
    N = vals.shape[1]
    G = np.zeros((N, N))
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    n_acc = 0
    for t in range(nq):
        detj = _geom_full(kind, par, pts[t, 0], pts[t, 1], pts[t, 2], J, Jinv)
        c = wts[t] * wflat[t] / detj
        for jj in range(N):
            vj = vals[t, jj] * c
            for ii in range(jj, N):
                G[jj, ii] += vals[t, ii] * vj
                n_acc += 1
    _mirror_upper(G)
    return G, n_acc, nq, 0, nq


@njit(cache=True)
def conv_h1(pts, wts, vals, grads, kind, par, wflat):
    nq = pts.shape[0]
    N = vals.shape[1]
    G = np.zeros((N, N))
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    D = np.empty((3, 3))
    dg = np.empty(3)
    n_acc = 0
    for t in range(nq):
        detj = _geom_full(kind, par, pts[t, 0], pts[t, 1], pts[t, 2], J, Jinv)
        _metric_d(Jinv, D)
        c = wts[t] * detj
        w0 = wflat[t]
        for jj in range(N):
            for a in range(3):
                dg[a] = (
                    D[a, 0] * grads[t, jj, 0]
                    + D[a, 1] * grads[t, jj, 1]
                    + D[a, 2] * grads[t, jj, 2]
                )
            vj = vals[t, jj]
            for ii in range(jj, N):
                G[jj, ii] += (
                    w0 * vals[t, ii] * vj
                    + grads[t, ii, 0] * dg[0]
                    + grads[t, ii, 1] * dg[1]
                    + grads[t, ii, 2] * dg[2]
                ) * c
                n_acc += 1
    _mirror_upper(G)
    return G, n_acc, nq, 0, nq


@njit(cache=True)
def conv_hdiv(pts, wts, vals, divs, kind, par, wflat):
    nq = pts.shape[0]
    N = vals.shape[1]
    G = np.zeros((N, N))
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    C = np.empty((3, 3))
    cv = np.empty(3)
    n_acc = 0
    for t in range(nq):
        detj = _geom_full(kind, par, pts[t, 0], pts[t, 1], pts[t, 2], J, Jinv)
        _metric_c(J, C)
        c = wts[t] / detj
        w0 = wflat[t]
        for jj in range(N):
            for a in range(3):
                cv[a] = (
                    C[a, 0] * vals[t, jj, 0]
                    + C[a, 1] * vals[t, jj, 1]
                    + C[a, 2] * vals[t, jj, 2]
                )
            dj = divs[t, jj]
            for ii in range(jj, N):
                G[jj, ii] += (
                    w0
                    * (
                        vals[t, ii, 0] * cv[0]
                        + vals[t, ii, 1] * cv[1]
                        + vals[t, ii, 2] * cv[2]
                    )
                    + divs[t, ii] * dj
                ) * c
                n_acc += 1
    _mirror_upper(G)
    return G, n_acc, nq, 0, nq


@njit(cache=True)
def conv_hcurl(pts, wts, vals, curls, kind, par, wflat):
    nq = pts.shape[0]
    N = vals.shape[1]
    G = np.zeros((N, N))
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    D = np.empty((3, 3))
    C = np.empty((3, 3))
    dv = np.empty(3)
    cc = np.empty(3)
    n_acc = 0
    for t in range(nq):
        detj = _geom_full(kind, par, pts[t, 0], pts[t, 1], pts[t, 2], J, Jinv)
        _metric_d(Jinv, D)
        _metric_c(J, C)
        cmass = wts[t] * detj
        ccurl = wts[t] / detj
        w0 = wflat[t]
        for jj in range(N):
            for a in range(3):
                dv[a] = (
                    D[a, 0] * vals[t, jj, 0]
                    + D[a, 1] * vals[t, jj, 1]
                    + D[a, 2] * vals[t, jj, 2]
                )
                cc[a] = (
                    C[a, 0] * curls[t, jj, 0]
                    + C[a, 1] * curls[t, jj, 1]
                    + C[a, 2] * curls[t, jj, 2]
                )
            for ii in range(jj, N):
                G[jj, ii] += (
                    w0
                    * cmass
                    * (
                        vals[t, ii, 0] * dv[0]
                        + vals[t, ii, 1] * dv[1]
                        + vals[t, ii, 2] * dv[2]
                    )
                    + ccurl
                    * (
                        curls[t, ii, 0] * cc[0]
                        + curls[t, ii, 1] * cc[1]
                        + curls[t, ii, 2] * cc[2]
                    )
                )
                n_acc += 1
    _mirror_upper(G)
    return G, n_acc, nq, 0, nq


# ---------------------------------------------------------------------------
# tensorized L2 (Algorithms 2 and 3)
# ---------------------------------------------------------------------------


@njit(cache=True)
def tens_l2_std(p1, p2, p3, nodes, wts, kind, par, wgrid):
    L = nodes.shape[0]
    N = p1 * p2 * p3
    G = np.zeros((N, N))
    nu1 = np.empty(p1)
    nu2 = np.empty(p2)
    nu3 = np.empty(p3)
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    gB = np.empty((p2, p2))
    n_acc = 0
    n_geo = 0
    n_s1 = 0
    for l in range(L):
        _shape1_l2_fill(nodes[l], p1, nu1)
        n_s1 += 1
        for j3 in range(p3):
            for i3 in range(j3, p3):
                for jj in range(p2):
                    for ii in range(p2):
                        gB[ii, jj] = 0.0
                for m in range(L):
                    _shape1_l2_fill(nodes[m], p2, nu2)
                    n_s1 += 1
                    gA = 0.0
                    for n in range(L):
                        _shape1_l2_fill(nodes[n], p3, nu3)
                        n_s1 += 1
                        detj = _geom_full(
                            kind, par, nodes[l], nodes[m], nodes[n], J, Jinv
                        )
                        n_geo += 1
                        c = wgrid[l, m, n] * wts[n] / detj
                        gA += nu3[i3] * nu3[j3] * c
                    for j2 in range(p2):
                        for i2 in range(j2, p2):
                            gB[i2, j2] += nu2[i2] * nu2[j2] * gA * wts[m]
                for j2 in range(p2):
                    for i2 in range(j2, p2):
                        for j1 in range(p1):
                            for i1 in range(j1, p1):
                                I = i1 + p1 * (i2 + p2 * i3)
                                Jf = j1 + p1 * (j2 + p2 * j3)
                                G[I, Jf] += nu1[i1] * nu1[j1] * gB[i2, j2] * wts[l]
                                n_acc += 1
    _fill_l2_sym(G, p1, p2, p3)
    return G, n_acc, n_geo, n_s1, 0


@njit(cache=True)
def tens_l2_alt(p1, p2, p3, nodes, wts, kind, par, wgrid):
    L = nodes.shape[0]
    N = p1 * p2 * p3
    G = np.zeros((N, N))
    nu1 = np.empty(p1)
    nu2 = np.empty(p2)
    nu3 = np.empty(p3)
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    gA = np.empty((p3, p3))
    gB = np.empty((p2, p2, p3, p3))
    n_acc = 0
    n_geo = 0
    n_s1 = 0
    for l in range(L):
        _shape1_l2_fill(nodes[l], p1, nu1)
        n_s1 += 1
        gB[:, :, :, :] = 0.0
        for m in range(L):
            _shape1_l2_fill(nodes[m], p2, nu2)
            n_s1 += 1
            gA[:, :] = 0.0
            for n in range(L):
                _shape1_l2_fill(nodes[n], p3, nu3)
                n_s1 += 1
                detj = _geom_full(kind, par, nodes[l], nodes[m], nodes[n], J, Jinv)
                n_geo += 1
                c = wgrid[l, m, n] * wts[n] / detj
                for j3 in range(p3):
                    for i3 in range(j3, p3):
                        gA[i3, j3] += nu3[i3] * nu3[j3] * c
            for j3 in range(p3):
                for i3 in range(j3, p3):
                    for j2 in range(p2):
                        for i2 in range(j2, p2):
                            gB[i2, j2, i3, j3] += nu2[i2] * nu2[j2] * gA[i3, j3] * wts[m]
        for j3 in range(p3):
            for i3 in range(j3, p3):
                for j2 in range(p2):
                    for i2 in range(j2, p2):
                        for j1 in range(p1):
                            for i1 in range(j1, p1):
                                I = i1 + p1 * (i2 + p2 * i3)
                                Jf = j1 + p1 * (j2 + p2 * j3)
                                G[I, Jf] += nu1[i1] * nu1[j1] * gB[i2, j2, i3, j3] * wts[l]
                                n_acc += 1
    _fill_l2_sym(G, p1, p2, p3)
    return G, n_acc, n_geo, n_s1, 0


# ---------------------------------------------------------------------------
# tensorized H1 (Algorithm 5 and its alternative ordering)
# ---------------------------------------------------------------------------


@njit(cache=True)
def tens_h1_std(p1, p2, p3, nodes, wts, kind, par, wgrid):
    L = nodes.shape[0]
    q1 = p1 + 1
    q2 = p2 + 1
    q3 = p3 + 1
    N = q1 * q2 * q3
    G = np.zeros((N, N))
    chi1 = np.empty(q1)
    dchi1 = np.empty(q1)
    chi2 = np.empty(q2)
    dchi2 = np.empty(q2)
    chi3 = np.empty(q3)
    dchi3 = np.empty(q3)
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    D = np.empty((3, 3))
    gA = np.empty((3, 3))
    gBbar = np.empty((q2, q2))
    gB = np.empty((3, 3, q2, q2))
    n_acc = 0
    n_geo = 0
    n_s1 = 0
    for l in range(L):
        _shape1_h1_fill(nodes[l], p1, chi1, dchi1)
        n_s1 += 1
        for j3 in range(q3):
            for i3 in range(j3, q3):
                gBbar[:, :] = 0.0
                gB[:, :, :, :] = 0.0
                for m in range(L):
                    _shape1_h1_fill(nodes[m], p2, chi2, dchi2)
                    n_s1 += 1
                    gAbar = 0.0
                    gA[:, :] = 0.0
                    for n in range(L):
                        _shape1_h1_fill(nodes[n], p3, chi3, dchi3)
                        n_s1 += 1
                        detj = _geom_full(
                            kind, par, nodes[l], nodes[m], nodes[n], J, Jinv
                        )
                        n_geo += 1
                        _metric_d(Jinv, D)
                        wq = wts[n] * detj
                        wm = wgrid[l, m, n] * wq
                        gAbar += chi3[i3] * chi3[j3] * wm
                        for a in range(3):
                            fa = dchi3[i3] if a == 2 else chi3[i3]
                            for b in range(3):
                                fb = dchi3[j3] if b == 2 else chi3[j3]
                                gA[a, b] += fa * fb * D[a, b] * wq
                    for j2 in range(q2):
                        for i2 in range(q2):
                            gBbar[i2, j2] += chi2[i2] * chi2[j2] * gAbar * wts[m]
                            for a in range(3):
                                fa = dchi2[i2] if a == 1 else chi2[i2]
                                for b in range(3):
                                    fb = dchi2[j2] if b == 1 else chi2[j2]
                                    gB[a, b, i2, j2] += fa * fb * gA[a, b] * wts[m]
                for j2 in range(q2):
                    for i2 in range(q2):
                        for j1 in range(q1):
                            for i1 in range(q1):
                                I = i1 + q1 * (i2 + q2 * i3)
                                Jf = j1 + q1 * (j2 + q2 * j3)
                                if I >= Jf:
                                    val = chi1[i1] * chi1[j1] * gBbar[i2, j2]
                                    n_acc += 1
                                    for a in range(3):
                                        fa = dchi1[i1] if a == 0 else chi1[i1]
                                        for b in range(3):
                                            fb = dchi1[j1] if b == 0 else chi1[j1]
                                            val += fa * fb * gB[a, b, i2, j2]
                                            n_acc += 1
                                    G[I, Jf] += val * wts[l]
    _mirror_lower(G)
    return G, n_acc, n_geo, n_s1, 0


@njit(cache=True)
def tens_h1_alt(p1, p2, p3, nodes, wts, kind, par, wgrid):
    L = nodes.shape[0]
    q1 = p1 + 1
    q2 = p2 + 1
    q3 = p3 + 1
    N = q1 * q2 * q3
    G = np.zeros((N, N))
    chi1 = np.empty(q1)
    dchi1 = np.empty(q1)
    chi2 = np.empty(q2)
    dchi2 = np.empty(q2)
    chi3 = np.empty(q3)
    dchi3 = np.empty(q3)
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    D = np.empty((3, 3))
    gAbar = np.empty((q3, q3))
    gA = np.empty((3, 3, q3, q3))
    gBbar = np.empty((q2, q2, q3, q3))
    gB = np.empty((3, 3, q2, q2, q3, q3))
    n_acc = 0
    n_geo = 0
    n_s1 = 0
    for l in range(L):
        _shape1_h1_fill(nodes[l], p1, chi1, dchi1)
        n_s1 += 1
        gBbar[:, :, :, :] = 0.0
        gB[:, :, :, :, :, :] = 0.0
        for m in range(L):
            _shape1_h1_fill(nodes[m], p2, chi2, dchi2)
            n_s1 += 1
            gAbar[:, :] = 0.0
            gA[:, :, :, :] = 0.0
            for n in range(L):
                _shape1_h1_fill(nodes[n], p3, chi3, dchi3)
                n_s1 += 1
                detj = _geom_full(kind, par, nodes[l], nodes[m], nodes[n], J, Jinv)
                n_geo += 1
                _metric_d(Jinv, D)
                wq = wts[n] * detj
                wm = wgrid[l, m, n] * wq
                for j3 in range(q3):
                    for i3 in range(j3, q3):
                        gAbar[i3, j3] += chi3[i3] * chi3[j3] * wm
                        for a in range(3):
                            fa = dchi3[i3] if a == 2 else chi3[i3]
                            for b in range(3):
                                fb = dchi3[j3] if b == 2 else chi3[j3]
                                gA[a, b, i3, j3] += fa * fb * D[a, b] * wq
            for j3 in range(q3):
                for i3 in range(j3, q3):
                    for j2 in range(q2):
                        for i2 in range(q2):
                            gBbar[i2, j2, i3, j3] += (
                                chi2[i2] * chi2[j2] * gAbar[i3, j3] * wts[m]
                            )
                            for a in range(3):
                                fa = dchi2[i2] if a == 1 else chi2[i2]
                                for b in range(3):
                                    fb = dchi2[j2] if b == 1 else chi2[j2]
                                    gB[a, b, i2, j2, i3, j3] += (
                                        fa * fb * gA[a, b, i3, j3] * wts[m]
                                    )
        for j3 in range(q3):
            for i3 in range(j3, q3):
                for j2 in range(q2):
                    for i2 in range(q2):
                        for j1 in range(q1):
                            for i1 in range(q1):
                                I = i1 + q1 * (i2 + q2 * i3)
                                Jf = j1 + q1 * (j2 + q2 * j3)
                                if I >= Jf:
                                    val = chi1[i1] * chi1[j1] * gBbar[i2, j2, i3, j3]
                                    n_acc += 1
                                    for a in range(3):
                                        fa = dchi1[i1] if a == 0 else chi1[i1]
                                        for b in range(3):
                                            fb = dchi1[j1] if b == 0 else chi1[j1]
                                            val += fa * fb * gB[a, b, i2, j2, i3, j3]
                                            n_acc += 1
                                    G[I, Jf] += val * wts[l]
    _mirror_lower(G)
    return G, n_acc, n_geo, n_s1, 0


# ---------------------------------------------------------------------------
# tensorized H(div) (Algorithm 7; full digit loops, major symmetry only)
# ---------------------------------------------------------------------------


@njit(cache=True)
def tens_hdiv_std(p1, p2, p3, nodes, wts, kind, par, wgrid):
    L = nodes.shape[0]
    q1 = p1 + 1
    q2 = p2 + 1
    q3 = p3 + 1
    N = (p1 + 1) * p2 * p3 + p1 * (p2 + 1) * p3 + p1 * p2 * (p3 + 1)
    G = np.zeros((N, N))
    chi1 = np.empty(q1)
    dchi1 = np.empty(q1)
    chi2 = np.empty(q2)
    dchi2 = np.empty(q2)
    chi3 = np.empty(q3)
    dchi3 = np.empty(q3)
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    C = np.empty((3, 3))
    gA = np.empty((3, 3))
    gAt = np.empty((3, 3))
    gB = np.empty((3, 3, q2, q2))
    gBt = np.empty((3, 3, q2, q2))
    n_acc = 0
    n_geo = 0
    n_s1 = 0
    for l in range(L):
        _shape1_h1_fill(nodes[l], p1, chi1, dchi1)
        n_s1 += 1
        for j3 in range(q3):
            for i3 in range(q3):
                gB[:, :, :, :] = 0.0
                gBt[:, :, :, :] = 0.0
                for m in range(L):
                    _shape1_h1_fill(nodes[m], p2, chi2, dchi2)
                    n_s1 += 1
                    gA[:, :] = 0.0
                    gAt[:, :] = 0.0
                    for n in range(L):
                        _shape1_h1_fill(nodes[n], p3, chi3, dchi3)
                        n_s1 += 1
                        detj = _geom_full(
                            kind, par, nodes[l], nodes[m], nodes[n], J, Jinv
                        )
                        n_geo += 1
                        _metric_c(J, C)
                        wq = wts[n] / detj
                        wm = wgrid[l, m, n] * wq
                        for a in range(3):
                            ia3 = i3 if a == 2 else i3 + 1
                            if ia3 > p3:
                                continue
                            fa = chi3[ia3] if a == 2 else dchi3[ia3]
                            for b in range(3):
                                jb3 = j3 if b == 2 else j3 + 1
                                if jb3 > p3:
                                    continue
                                fb = chi3[jb3] if b == 2 else dchi3[jb3]
                                gA[a, b] += fa * fb * C[a, b] * wm
                                gAt[a, b] += dchi3[ia3] * dchi3[jb3] * wq
                    for j2 in range(q2):
                        for i2 in range(q2):
                            for a in range(3):
                                ia2 = i2 if a == 1 else i2 + 1
                                if ia2 > p2:
                                    continue
                                fa = chi2[ia2] if a == 1 else dchi2[ia2]
                                for b in range(3):
                                    jb2 = j2 if b == 1 else j2 + 1
                                    if jb2 > p2:
                                        continue
                                    fb = chi2[jb2] if b == 1 else dchi2[jb2]
                                    gB[a, b, i2, j2] += fa * fb * gA[a, b] * wts[m]
                                    gBt[a, b, i2, j2] += (
                                        dchi2[ia2] * dchi2[jb2] * gAt[a, b] * wts[m]
                                    )
                for j2 in range(q2):
                    for i2 in range(q2):
                        for j1 in range(q1):
                            for i1 in range(q1):
                                for a in range(3):
                                    if (
                                        (a != 0 and i1 >= p1)
                                        or (a != 1 and i2 >= p2)
                                        or (a != 2 and i3 >= p3)
                                    ):
                                        continue
                                    ia1 = i1 if a == 0 else i1 + 1
                                    fa = chi1[ia1] if a == 0 else dchi1[ia1]
                                    I = _flat_hdiv(a, i1, i2, i3, p1, p2, p3)
                                    for b in range(3):
                                        if (
                                            (b != 0 and j1 >= p1)
                                            or (b != 1 and j2 >= p2)
                                            or (b != 2 and j3 >= p3)
                                        ):
                                            continue
                                        jb1 = j1 if b == 0 else j1 + 1
                                        Jf = _flat_hdiv(b, j1, j2, j3, p1, p2, p3)
                                        if I >= Jf:
                                            fb = chi1[jb1] if b == 0 else dchi1[jb1]
                                            G[I, Jf] += (
                                                fa * fb * gB[a, b, i2, j2]
                                                + dchi1[ia1]
                                                * dchi1[jb1]
                                                * gBt[a, b, i2, j2]
                                            ) * wts[l]
                                            n_acc += 2
    _mirror_lower(G)
    return G, n_acc, n_geo, n_s1, 0


@njit(cache=True)
def tens_hdiv_alt(p1, p2, p3, nodes, wts, kind, par, wgrid):
    L = nodes.shape[0]
    q1 = p1 + 1
    q2 = p2 + 1
    q3 = p3 + 1
    N = (p1 + 1) * p2 * p3 + p1 * (p2 + 1) * p3 + p1 * p2 * (p3 + 1)
    G = np.zeros((N, N))
    chi1 = np.empty(q1)
    dchi1 = np.empty(q1)
    chi2 = np.empty(q2)
    dchi2 = np.empty(q2)
    chi3 = np.empty(q3)
    dchi3 = np.empty(q3)
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    C = np.empty((3, 3))
    gA = np.empty((3, 3, q3, q3))
    gAt = np.empty((3, 3, q3, q3))
    gB = np.empty((3, 3, q2, q2, q3, q3))
    gBt = np.empty((3, 3, q2, q2, q3, q3))
    n_acc = 0
    n_geo = 0
    n_s1 = 0
    for l in range(L):
        _shape1_h1_fill(nodes[l], p1, chi1, dchi1)
        n_s1 += 1
        gB[:, :, :, :, :, :] = 0.0
        gBt[:, :, :, :, :, :] = 0.0
        for m in range(L):
            _shape1_h1_fill(nodes[m], p2, chi2, dchi2)
            n_s1 += 1
            gA[:, :, :, :] = 0.0
            gAt[:, :, :, :] = 0.0
            for n in range(L):
                _shape1_h1_fill(nodes[n], p3, chi3, dchi3)
                n_s1 += 1
                detj = _geom_full(kind, par, nodes[l], nodes[m], nodes[n], J, Jinv)
                n_geo += 1
                _metric_c(J, C)
                wq = wts[n] / detj
                wm = wgrid[l, m, n] * wq
                for j3 in range(q3):
                    for i3 in range(q3):
                        for a in range(3):
                            ia3 = i3 if a == 2 else i3 + 1
                            if ia3 > p3:
                                continue
                            fa = chi3[ia3] if a == 2 else dchi3[ia3]
                            for b in range(3):
                                jb3 = j3 if b == 2 else j3 + 1
                                if jb3 > p3:
                                    continue
                                fb = chi3[jb3] if b == 2 else dchi3[jb3]
                                gA[a, b, i3, j3] += fa * fb * C[a, b] * wm
                                gAt[a, b, i3, j3] += dchi3[ia3] * dchi3[jb3] * wq
            for j3 in range(q3):
                for i3 in range(q3):
                    for j2 in range(q2):
                        for i2 in range(q2):
                            for a in range(3):
                                ia2 = i2 if a == 1 else i2 + 1
                                if ia2 > p2:
                                    continue
                                fa = chi2[ia2] if a == 1 else dchi2[ia2]
                                for b in range(3):
                                    jb2 = j2 if b == 1 else j2 + 1
                                    if jb2 > p2:
                                        continue
                                    fb = chi2[jb2] if b == 1 else dchi2[jb2]
                                    gB[a, b, i2, j2, i3, j3] += (
                                        fa * fb * gA[a, b, i3, j3] * wts[m]
                                    )
                                    gBt[a, b, i2, j2, i3, j3] += (
                                        dchi2[ia2] * dchi2[jb2] * gAt[a, b, i3, j3] * wts[m]
                                    )
        for j3 in range(q3):
            for i3 in range(q3):
                for j2 in range(q2):
                    for i2 in range(q2):
                        for j1 in range(q1):
                            for i1 in range(q1):
                                for a in range(3):
                                    if (
                                        (a != 0 and i1 >= p1)
                                        or (a != 1 and i2 >= p2)
                                        or (a != 2 and i3 >= p3)
                                    ):
                                        continue
                                    ia1 = i1 if a == 0 else i1 + 1
                                    fa = chi1[ia1] if a == 0 else dchi1[ia1]
                                    I = _flat_hdiv(a, i1, i2, i3, p1, p2, p3)
                                    for b in range(3):
                                        if (
                                            (b != 0 and j1 >= p1)
                                            or (b != 1 and j2 >= p2)
                                            or (b != 2 and j3 >= p3)
                                        ):
                                            continue
                                        jb1 = j1 if b == 0 else j1 + 1
                                        Jf = _flat_hdiv(b, j1, j2, j3, p1, p2, p3)
                                        if I >= Jf:
                                            fb = chi1[jb1] if b == 0 else dchi1[jb1]
                                            G[I, Jf] += (
                                                fa * fb * gB[a, b, i2, j2, i3, j3]
                                                + dchi1[ia1]
                                                * dchi1[jb1]
                                                * gBt[a, b, i2, j2, i3, j3]
                                            ) * wts[l]
                                            n_acc += 2
    _mirror_lower(G)
    return G, n_acc, n_geo, n_s1, 0


# ---------------------------------------------------------------------------
# tensorized H(curl) (Algorithm 9)
# ---------------------------------------------------------------------------


@njit(cache=True)
def tens_hcurl_std(p1, p2, p3, nodes, wts, kind, par, wgrid):
    L = nodes.shape[0]
    q1 = p1 + 1
    q2 = p2 + 1
    q3 = p3 + 1
    N = p1 * q2 * q3 + q1 * p2 * q3 + q1 * q2 * p3
    G = np.zeros((N, N))
    chi1 = np.empty(q1)
    dchi1 = np.empty(q1)
    chi2 = np.empty(q2)
    dchi2 = np.empty(q2)
    chi3 = np.empty(q3)
    dchi3 = np.empty(q3)
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    D = np.empty((3, 3))
    C = np.empty((3, 3))
    gAc = np.empty((3, 3))
    gAa = np.empty((2, 2, 3, 3))
    gBc = np.empty((3, 3, q2, q2))
    gBa = np.empty((2, 2, 3, 3, q2, q2))
    n_acc = 0
    n_geo = 0
    n_s1 = 0
    for l in range(L):
        _shape1_h1_fill(nodes[l], p1, chi1, dchi1)
        n_s1 += 1
        for j3 in range(q3):
            for i3 in range(q3):
                gBc[:, :, :, :] = 0.0
                gBa[:, :, :, :, :, :] = 0.0
                for m in range(L):
                    _shape1_h1_fill(nodes[m], p2, chi2, dchi2)
                    n_s1 += 1
                    gAc[:, :] = 0.0
                    gAa[:, :, :, :] = 0.0
                    for n in range(L):
                        _shape1_h1_fill(nodes[n], p3, chi3, dchi3)
                        n_s1 += 1
                        detj = _geom_full(
                            kind, par, nodes[l], nodes[m], nodes[n], J, Jinv
                        )
                        n_geo += 1
                        _metric_d(Jinv, D)
                        _metric_c(J, C)
                        wqD = wts[n] * detj * wgrid[l, m, n]
                        wqC = wts[n] / detj
                        for a in range(3):
                            ia3 = i3 + 1 if a == 2 else i3
                            if ia3 > p3:
                                continue
                            va = dchi3[ia3] if a == 2 else chi3[ia3]
                            for b in range(3):
                                jb3 = j3 + 1 if b == 2 else j3
                                if jb3 > p3:
                                    continue
                                vb = dchi3[jb3] if b == 2 else chi3[jb3]
                                gAc[a, b] += va * vb * D[a, b] * wqD
                                for al in range(2):
                                    ca = (a + al + 1) % 3
                                    fa = chi3[ia3] if ca == 2 else dchi3[ia3]
                                    for be in range(2):
                                        cb = (b + be + 1) % 3
                                        fb = chi3[jb3] if cb == 2 else dchi3[jb3]
                                        gAa[al, be, a, b] += fa * fb * C[ca, cb] * wqC
                    for j2 in range(q2):
                        for i2 in range(q2):
                            for a in range(3):
                                ia2 = i2 + 1 if a == 1 else i2
                                if ia2 > p2:
                                    continue
                                va = dchi2[ia2] if a == 1 else chi2[ia2]
                                for b in range(3):
                                    jb2 = j2 + 1 if b == 1 else j2
                                    if jb2 > p2:
                                        continue
                                    vb = dchi2[jb2] if b == 1 else chi2[jb2]
                                    gBc[a, b, i2, j2] += va * vb * gAc[a, b] * wts[m]
                                    for al in range(2):
                                        ca = (a + al + 1) % 3
                                        fa = chi2[ia2] if ca == 1 else dchi2[ia2]
                                        for be in range(2):
                                            cb = (b + be + 1) % 3
                                            fb = chi2[jb2] if cb == 1 else dchi2[jb2]
                                            gBa[al, be, a, b, i2, j2] += (
                                                fa * fb * gAa[al, be, a, b] * wts[m]
                                            )
                for j2 in range(q2):
                    for i2 in range(q2):
                        for j1 in range(q1):
                            for i1 in range(q1):
                                for a in range(3):
                                    if (
                                        (a == 0 and i1 >= p1)
                                        or (a == 1 and i2 >= p2)
                                        or (a == 2 and i3 >= p3)
                                    ):
                                        continue
                                    ia1 = i1 + 1 if a == 0 else i1
                                    va = dchi1[ia1] if a == 0 else chi1[ia1]
                                    I = _flat_hcurl(a, i1, i2, i3, p1, p2, p3)
                                    for b in range(3):
                                        if (
                                            (b == 0 and j1 >= p1)
                                            or (b == 1 and j2 >= p2)
                                            or (b == 2 and j3 >= p3)
                                        ):
                                            continue
                                        jb1 = j1 + 1 if b == 0 else j1
                                        Jf = _flat_hcurl(b, j1, j2, j3, p1, p2, p3)
                                        if I >= Jf:
                                            vb = dchi1[jb1] if b == 0 else chi1[jb1]
                                            val = va * vb * gBc[a, b, i2, j2]
                                            n_acc += 1
                                            for al in range(2):
                                                ca = (a + al + 1) % 3
                                                fa = (
                                                    chi1[ia1]
                                                    if ca == 0
                                                    else dchi1[ia1]
                                                )
                                                for be in range(2):
                                                    cb = (b + be + 1) % 3
                                                    fb = (
                                                        chi1[jb1]
                                                        if cb == 0
                                                        else dchi1[jb1]
                                                    )
                                                    sgn = 1.0 if al == be else -1.0
                                                    val += (
                                                        sgn
                                                        * fa
                                                        * fb
                                                        * gBa[al, be, a, b, i2, j2]
                                                    )
                                                    n_acc += 1
                                            G[I, Jf] += val * wts[l]
    _mirror_lower(G)
    return G, n_acc, n_geo, n_s1, 0


@njit(cache=True)
def tens_hcurl_alt(p1, p2, p3, nodes, wts, kind, par, wgrid):
    L = nodes.shape[0]
    q1 = p1 + 1
    q2 = p2 + 1
    q3 = p3 + 1
    N = p1 * q2 * q3 + q1 * p2 * q3 + q1 * q2 * p3
    G = np.zeros((N, N))
    chi1 = np.empty(q1)
    dchi1 = np.empty(q1)
    chi2 = np.empty(q2)
    dchi2 = np.empty(q2)
    chi3 = np.empty(q3)
    dchi3 = np.empty(q3)
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    D = np.empty((3, 3))
    C = np.empty((3, 3))
    gAc = np.empty((3, 3, q3, q3))
    gAa = np.empty((2, 2, 3, 3, q3, q3))
    gBc = np.empty((3, 3, q2, q2, q3, q3))
    gBa = np.empty((2, 2, 3, 3, q2, q2, q3, q3))
    n_acc = 0
    n_geo = 0
    n_s1 = 0
    for l in range(L):
        _shape1_h1_fill(nodes[l], p1, chi1, dchi1)
        n_s1 += 1
        gBc[:, :, :, :, :, :] = 0.0
        gBa[:, :, :, :, :, :, :, :] = 0.0
        for m in range(L):
            _shape1_h1_fill(nodes[m], p2, chi2, dchi2)
            n_s1 += 1
            gAc[:, :, :, :] = 0.0
            gAa[:, :, :, :, :, :] = 0.0
            for n in range(L):
                _shape1_h1_fill(nodes[n], p3, chi3, dchi3)
                n_s1 += 1
                detj = _geom_full(kind, par, nodes[l], nodes[m], nodes[n], J, Jinv)
                n_geo += 1
                _metric_d(Jinv, D)
                _metric_c(J, C)
                wqD = wts[n] * detj * wgrid[l, m, n]
                wqC = wts[n] / detj
                for j3 in range(q3):
                    for i3 in range(q3):
                        for a in range(3):
                            ia3 = i3 + 1 if a == 2 else i3
                            if ia3 > p3:
                                continue
                            va = dchi3[ia3] if a == 2 else chi3[ia3]
                            for b in range(3):
                                jb3 = j3 + 1 if b == 2 else j3
                                if jb3 > p3:
                                    continue
                                vb = dchi3[jb3] if b == 2 else chi3[jb3]
                                gAc[a, b, i3, j3] += va * vb * D[a, b] * wqD
                                for al in range(2):
                                    ca = (a + al + 1) % 3
                                    fa = chi3[ia3] if ca == 2 else dchi3[ia3]
                                    for be in range(2):
                                        cb = (b + be + 1) % 3
                                        fb = chi3[jb3] if cb == 2 else dchi3[jb3]
                                        gAa[al, be, a, b, i3, j3] += (
                                            fa * fb * C[ca, cb] * wqC
                                        )
            for j3 in range(q3):
                for i3 in range(q3):
                    for j2 in range(q2):
                        for i2 in range(q2):
                            for a in range(3):
                                ia2 = i2 + 1 if a == 1 else i2
                                if ia2 > p2:
                                    continue
                                va = dchi2[ia2] if a == 1 else chi2[ia2]
                                for b in range(3):
                                    jb2 = j2 + 1 if b == 1 else j2
                                    if jb2 > p2:
                                        continue
                                    vb = dchi2[jb2] if b == 1 else chi2[jb2]
                                    gBc[a, b, i2, j2, i3, j3] += (
                                        va * vb * gAc[a, b, i3, j3] * wts[m]
                                    )
                                    for al in range(2):
                                        ca = (a + al + 1) % 3
                                        fa = chi2[ia2] if ca == 1 else dchi2[ia2]
                                        for be in range(2):
                                            cb = (b + be + 1) % 3
                                            fb = chi2[jb2] if cb == 1 else dchi2[jb2]
                                            gBa[al, be, a, b, i2, j2, i3, j3] += (
                                                fa * fb * gAa[al, be, a, b, i3, j3] * wts[m]
                                            )
        for j3 in range(q3):
            for i3 in range(q3):
                for j2 in range(q2):
                    for i2 in range(q2):
                        for j1 in range(q1):
                            for i1 in range(q1):
                                for a in range(3):
                                    if (
                                        (a == 0 and i1 >= p1)
                                        or (a == 1 and i2 >= p2)
                                        or (a == 2 and i3 >= p3)
                                    ):
                                        continue
                                    ia1 = i1 + 1 if a == 0 else i1
                                    va = dchi1[ia1] if a == 0 else chi1[ia1]
                                    I = _flat_hcurl(a, i1, i2, i3, p1, p2, p3)
                                    for b in range(3):
                                        if (
                                            (b == 0 and j1 >= p1)
                                            or (b == 1 and j2 >= p2)
                                            or (b == 2 and j3 >= p3)
                                        ):
                                            continue
                                        jb1 = j1 + 1 if b == 0 else j1
                                        Jf = _flat_hcurl(b, j1, j2, j3, p1, p2, p3)
                                        if I >= Jf:
                                            vb = dchi1[jb1] if b == 0 else chi1[jb1]
                                            val = va * vb * gBc[a, b, i2, j2, i3, j3]
                                            n_acc += 1
                                            for al in range(2):
                                                ca = (a + al + 1) % 3
                                                fa = (
                                                    chi1[ia1]
                                                    if ca == 0
                                                    else dchi1[ia1]
                                                )
                                                for be in range(2):
                                                    cb = (b + be + 1) % 3
                                                    fb = (
                                                        chi1[jb1]
                                                        if cb == 0
                                                        else dchi1[jb1]
                                                    )
                                                    sgn = 1.0 if al == be else -1.0
                                                    val += (
                                                        sgn
                                                        * fa
                                                        * fb
                                                        * gBa[
                                                            al, be, a, b, i2, j2, i3, j3
                                                        ]
                                                    )
                                                    n_acc += 1
                                            G[I, Jf] += val * wts[l]
    _mirror_lower(G)
    return G, n_acc, n_geo, n_s1, 0


# ---------------------------------------------------------------------------
# simplified backends, constant-Jacobian maps (Algorithm 10 and analogues):
# geometry once at the midpoint, every interval integral from the stacked
# F tables fall[2r+s, i, j] (r, s the derivative bits)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _rs_h1(rs1, rs2, rs3):
    for a in range(3):
        for b in range(3):
            rs1[a, b] = 2 * (1 if a == 0 else 0) + (1 if b == 0 else 0)
            rs2[a, b] = 2 * (1 if a == 1 else 0) + (1 if b == 1 else 0)
            rs3[a, b] = 2 * (1 if a == 2 else 0) + (1 if b == 2 else 0)


@njit(cache=True)
def simp_l2_const(p1, p2, p3, fall, kind, par, wmass):
    N = p1 * p2 * p3
    G = np.zeros((N, N))
    f11 = fall[3]
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    detj = _geom_full(kind, par, 0.5, 0.5, 0.5, J, Jinv)
    n_acc = 0
    for j3 in range(p3):
        for i3 in range(j3, p3):
            gA = f11[i3 + 1, j3 + 1] * wmass / detj
            for j2 in range(p2):
                for i2 in range(j2, p2):
                    gB = f11[i2 + 1, j2 + 1] * gA
                    for j1 in range(p1):
                        for i1 in range(j1, p1):
                            I = i1 + p1 * (i2 + p2 * i3)
                            Jf = j1 + p1 * (j2 + p2 * j3)
                            G[I, Jf] = f11[i1 + 1, j1 + 1] * gB
                            n_acc += 1
    _fill_l2_sym(G, p1, p2, p3)
    return G, n_acc, 1, 0, 0


@njit(cache=True)
def simp_h1_const(p1, p2, p3, fall, kind, par, wmass):
    q1 = p1 + 1
    q2 = p2 + 1
    q3 = p3 + 1
    N = q1 * q2 * q3
    G = np.zeros((N, N))
    f00 = fall[0]
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    D = np.empty((3, 3))
    detj = _geom_full(kind, par, 0.5, 0.5, 0.5, J, Jinv)
    _metric_d(Jinv, D)
    rs1 = np.empty((3, 3), np.int64)
    rs2 = np.empty((3, 3), np.int64)
    rs3 = np.empty((3, 3), np.int64)
    _rs_h1(rs1, rs2, rs3)
    n_acc = 0
    for j3 in range(q3):
        for i3 in range(j3, q3):
            for j2 in range(q2):
                for i2 in range(q2):
                    for j1 in range(q1):
                        for i1 in range(q1):
                            I = i1 + q1 * (i2 + q2 * i3)
                            Jf = j1 + q1 * (j2 + q2 * j3)
                            if I >= Jf:
                                val = (
                                    wmass
                                    * f00[i1, j1]
                                    * f00[i2, j2]
                                    * f00[i3, j3]
                                )
                                n_acc += 1
                                for a in range(3):
                                    for b in range(3):
                                        val += (
                                            D[a, b]
                                            * fall[rs1[a, b], i1, j1]
                                            * fall[rs2[a, b], i2, j2]
                                            * fall[rs3[a, b], i3, j3]
                                        )
                                        n_acc += 1
                                G[I, Jf] += val * detj
    _mirror_lower(G)
    return G, n_acc, 1, 0, 0


@njit(cache=True)
def simp_hdiv_const(p1, p2, p3, fall, kind, par, wmass):
    q1 = p1 + 1
    q2 = p2 + 1
    q3 = p3 + 1
    N = (p1 + 1) * p2 * p3 + p1 * (p2 + 1) * p3 + p1 * p2 * (p3 + 1)
    G = np.zeros((N, N))
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    C = np.empty((3, 3))
    detj = _geom_full(kind, par, 0.5, 0.5, 0.5, J, Jinv)
    _metric_c(J, C)
    # value-term table selectors: superscripts (1 - delta_da, 1 - delta_db)
    rs1 = np.empty((3, 3), np.int64)
    rs2 = np.empty((3, 3), np.int64)
    rs3 = np.empty((3, 3), np.int64)
    for a in range(3):
        for b in range(3):
            rs1[a, b] = 2 * (0 if a == 0 else 1) + (0 if b == 0 else 1)
            rs2[a, b] = 2 * (0 if a == 1 else 1) + (0 if b == 1 else 1)
            rs3[a, b] = 2 * (0 if a == 2 else 1) + (0 if b == 2 else 1)
    f11 = fall[3]
    n_acc = 0
    for j3 in range(q3):
        for i3 in range(q3):
            for j2 in range(q2):
                for i2 in range(q2):
                    for j1 in range(q1):
                        for i1 in range(q1):
                            for a in range(3):
                                if (
                                    (a != 0 and i1 >= p1)
                                    or (a != 1 and i2 >= p2)
                                    or (a != 2 and i3 >= p3)
                                ):
                                    continue
                                ia1 = i1 if a == 0 else i1 + 1
                                ia2 = i2 if a == 1 else i2 + 1
                                ia3 = i3 if a == 2 else i3 + 1
                                I = _flat_hdiv(a, i1, i2, i3, p1, p2, p3)
                                for b in range(3):
                                    if (
                                        (b != 0 and j1 >= p1)
                                        or (b != 1 and j2 >= p2)
                                        or (b != 2 and j3 >= p3)
                                    ):
                                        continue
                                    jb1 = j1 if b == 0 else j1 + 1
                                    jb2 = j2 if b == 1 else j2 + 1
                                    jb3 = j3 if b == 2 else j3 + 1
                                    Jf = _flat_hdiv(b, j1, j2, j3, p1, p2, p3)
                                    if I >= Jf:
                                        v = (
                                            wmass
                                            * C[a, b]
                                            * fall[rs1[a, b], ia1, jb1]
                                            * fall[rs2[a, b], ia2, jb2]
                                            * fall[rs3[a, b], ia3, jb3]
                                        )
                                        n_acc += 1
                                        v += (
                                            f11[ia1, jb1]
                                            * f11[ia2, jb2]
                                            * f11[ia3, jb3]
                                        )
                                        n_acc += 1
                                        G[I, Jf] += v / detj
    _mirror_lower(G)
    return G, n_acc, 1, 0, 0


@njit(cache=True)
def _rs_hcurl_curl(rc1, rc2, rc3):
    # curl-term selectors: superscripts (1 - delta_{d,a+al+1}, 1 - delta_{d,b+be+1})
    for al in range(2):
        for be in range(2):
            for a in range(3):
                for b in range(3):
                    ca = (a + al + 1) % 3
                    cb = (b + be + 1) % 3
                    rc1[al, be, a, b] = 2 * (0 if ca == 0 else 1) + (0 if cb == 0 else 1)
                    rc2[al, be, a, b] = 2 * (0 if ca == 1 else 1) + (0 if cb == 1 else 1)
                    rc3[al, be, a, b] = 2 * (0 if ca == 2 else 1) + (0 if cb == 2 else 1)


@njit(cache=True)
def simp_hcurl_const(p1, p2, p3, fall, kind, par, wmass):
    q1 = p1 + 1
    q2 = p2 + 1
    q3 = p3 + 1
    N = p1 * q2 * q3 + q1 * p2 * q3 + q1 * q2 * p3
    G = np.zeros((N, N))
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    D = np.empty((3, 3))
    C = np.empty((3, 3))
    detj = _geom_full(kind, par, 0.5, 0.5, 0.5, J, Jinv)
    _metric_d(Jinv, D)
    _metric_c(J, C)
    rs1 = np.empty((3, 3), np.int64)
    rs2 = np.empty((3, 3), np.int64)
    rs3 = np.empty((3, 3), np.int64)
    _rs_h1(rs1, rs2, rs3)  # value term uses superscripts (delta_da, delta_db)
    rc1 = np.empty((2, 2, 3, 3), np.int64)
    rc2 = np.empty((2, 2, 3, 3), np.int64)
    rc3 = np.empty((2, 2, 3, 3), np.int64)
    _rs_hcurl_curl(rc1, rc2, rc3)
    n_acc = 0
    for j3 in range(q3):
        for i3 in range(q3):
            for j2 in range(q2):
                for i2 in range(q2):
                    for j1 in range(q1):
                        for i1 in range(q1):
                            for a in range(3):
                                if (
                                    (a == 0 and i1 >= p1)
                                    or (a == 1 and i2 >= p2)
                                    or (a == 2 and i3 >= p3)
                                ):
                                    continue
                                ia1 = i1 + 1 if a == 0 else i1
                                ia2 = i2 + 1 if a == 1 else i2
                                ia3 = i3 + 1 if a == 2 else i3
                                I = _flat_hcurl(a, i1, i2, i3, p1, p2, p3)
                                for b in range(3):
                                    if (
                                        (b == 0 and j1 >= p1)
                                        or (b == 1 and j2 >= p2)
                                        or (b == 2 and j3 >= p3)
                                    ):
                                        continue
                                    jb1 = j1 + 1 if b == 0 else j1
                                    jb2 = j2 + 1 if b == 1 else j2
                                    jb3 = j3 + 1 if b == 2 else j3
                                    Jf = _flat_hcurl(b, j1, j2, j3, p1, p2, p3)
                                    if I >= Jf:
                                        val = (
                                            wmass
                                            * D[a, b]
                                            * detj
                                            * fall[rs1[a, b], ia1, jb1]
                                            * fall[rs2[a, b], ia2, jb2]
                                            * fall[rs3[a, b], ia3, jb3]
                                        )
                                        n_acc += 1
                                        for al in range(2):
                                            for be in range(2):
                                                ca = (a + al + 1) % 3
                                                cb = (b + be + 1) % 3
                                                sgn = 1.0 if al == be else -1.0
                                                val += (
                                                    sgn
                                                    * C[ca, cb]
                                                    / detj
                                                    * fall[rc1[al, be, a, b], ia1, jb1]
                                                    * fall[rc2[al, be, a, b], ia2, jb2]
                                                    * fall[rc3[al, be, a, b], ia3, jb3]
                                                )
                                                n_acc += 1
                                        G[I, Jf] += val
    _mirror_lower(G)
    return G, n_acc, 1, 0, 0


# ---------------------------------------------------------------------------
# simplified backends, extrusion maps (Algorithm 11 and analogues):
# quadrature only in (xi2, xi3) at xi1 = 0.5, F-table factor in xi1
# ---------------------------------------------------------------------------


@njit(cache=True)
def simp_l2_ext(p1, p2, p3, fall, nodes, wts, kind, par, wmass):
    L = nodes.shape[0]
    N = p1 * p2 * p3
    G = np.zeros((N, N))
    f11 = fall[3]
    nu2 = np.empty(p2)
    nu3 = np.empty(p3)
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    gB = np.empty((p2, p2))
    n_acc = 0
    n_geo = 0
    n_s1 = 0
    for j3 in range(p3):
        for i3 in range(j3, p3):
            for jj in range(p2):
                for ii in range(p2):
                    gB[ii, jj] = 0.0
            for m in range(L):
                _shape1_l2_fill(nodes[m], p2, nu2)
                n_s1 += 1
                gA = 0.0
                for n in range(L):
                    _shape1_l2_fill(nodes[n], p3, nu3)
                    n_s1 += 1
                    detj = _geom_full(kind, par, 0.5, nodes[m], nodes[n], J, Jinv)
                    n_geo += 1
                    gA += nu3[i3] * nu3[j3] * wmass * wts[n] / detj
                for j2 in range(p2):
                    for i2 in range(j2, p2):
                        gB[i2, j2] += nu2[i2] * nu2[j2] * gA * wts[m]
            for j2 in range(p2):
                for i2 in range(j2, p2):
                    for j1 in range(p1):
                        for i1 in range(j1, p1):
                            I = i1 + p1 * (i2 + p2 * i3)
                            Jf = j1 + p1 * (j2 + p2 * j3)
                            G[I, Jf] = f11[i1 + 1, j1 + 1] * gB[i2, j2]
                            n_acc += 1
    _fill_l2_sym(G, p1, p2, p3)
    return G, n_acc, n_geo, n_s1, 0


@njit(cache=True)
def simp_h1_ext(p1, p2, p3, fall, nodes, wts, kind, par, wmass):
    L = nodes.shape[0]
    q1 = p1 + 1
    q2 = p2 + 1
    q3 = p3 + 1
    N = q1 * q2 * q3
    G = np.zeros((N, N))
    f00 = fall[0]
    chi2 = np.empty(q2)
    dchi2 = np.empty(q2)
    chi3 = np.empty(q3)
    dchi3 = np.empty(q3)
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    D = np.empty((3, 3))
    gA = np.empty((3, 3))
    gBbar = np.empty((q2, q2))
    gB = np.empty((3, 3, q2, q2))
    rs1 = np.empty((3, 3), np.int64)
    rs2 = np.empty((3, 3), np.int64)
    rs3 = np.empty((3, 3), np.int64)
    _rs_h1(rs1, rs2, rs3)
    n_acc = 0
    n_geo = 0
    n_s1 = 0
    for j3 in range(q3):
        for i3 in range(j3, q3):
            gBbar[:, :] = 0.0
            gB[:, :, :, :] = 0.0
            for m in range(L):
                _shape1_h1_fill(nodes[m], p2, chi2, dchi2)
                n_s1 += 1
                gAbar = 0.0
                gA[:, :] = 0.0
                for n in range(L):
                    _shape1_h1_fill(nodes[n], p3, chi3, dchi3)
                    n_s1 += 1
                    detj = _geom_full(kind, par, 0.5, nodes[m], nodes[n], J, Jinv)
                    n_geo += 1
                    _metric_d(Jinv, D)
                    wq = wts[n] * detj
                    gAbar += chi3[i3] * chi3[j3] * wmass * wq
                    for a in range(3):
                        fa = dchi3[i3] if a == 2 else chi3[i3]
                        for b in range(3):
                            fb = dchi3[j3] if b == 2 else chi3[j3]
                            gA[a, b] += fa * fb * D[a, b] * wq
                for j2 in range(q2):
                    for i2 in range(q2):
                        gBbar[i2, j2] += chi2[i2] * chi2[j2] * gAbar * wts[m]
                        for a in range(3):
                            fa = dchi2[i2] if a == 1 else chi2[i2]
                            for b in range(3):
                                fb = dchi2[j2] if b == 1 else chi2[j2]
                                gB[a, b, i2, j2] += fa * fb * gA[a, b] * wts[m]
            for j2 in range(q2):
                for i2 in range(q2):
                    for j1 in range(q1):
                        for i1 in range(q1):
                            I = i1 + q1 * (i2 + q2 * i3)
                            Jf = j1 + q1 * (j2 + q2 * j3)
                            if I >= Jf:
                                val = f00[i1, j1] * gBbar[i2, j2]
                                n_acc += 1
                                for a in range(3):
                                    for b in range(3):
                                        val += (
                                            fall[rs1[a, b], i1, j1]
                                            * gB[a, b, i2, j2]
                                        )
                                        n_acc += 1
                                G[I, Jf] += val
    _mirror_lower(G)
    return G, n_acc, n_geo, n_s1, 0


@njit(cache=True)
def simp_hdiv_ext(p1, p2, p3, fall, nodes, wts, kind, par, wmass):
    L = nodes.shape[0]
    q1 = p1 + 1
    q2 = p2 + 1
    q3 = p3 + 1
    N = (p1 + 1) * p2 * p3 + p1 * (p2 + 1) * p3 + p1 * p2 * (p3 + 1)
    G = np.zeros((N, N))
    f11 = fall[3]
    chi2 = np.empty(q2)
    dchi2 = np.empty(q2)
    chi3 = np.empty(q3)
    dchi3 = np.empty(q3)
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    C = np.empty((3, 3))
    gA = np.empty((3, 3))
    gAt = np.empty((3, 3))
    gB = np.empty((3, 3, q2, q2))
    gBt = np.empty((3, 3, q2, q2))
    rs1 = np.empty((3, 3), np.int64)
    for a in range(3):
        for b in range(3):
            rs1[a, b] = 2 * (0 if a == 0 else 1) + (0 if b == 0 else 1)
    n_acc = 0
    n_geo = 0
    n_s1 = 0
    for j3 in range(q3):
        for i3 in range(q3):
            gB[:, :, :, :] = 0.0
            gBt[:, :, :, :] = 0.0
            for m in range(L):
                _shape1_h1_fill(nodes[m], p2, chi2, dchi2)
                n_s1 += 1
                gA[:, :] = 0.0
                gAt[:, :] = 0.0
                for n in range(L):
                    _shape1_h1_fill(nodes[n], p3, chi3, dchi3)
                    n_s1 += 1
                    detj = _geom_full(kind, par, 0.5, nodes[m], nodes[n], J, Jinv)
                    n_geo += 1
                    _metric_c(J, C)
                    wq = wts[n] / detj
                    wm = wmass * wq
                    for a in range(3):
                        ia3 = i3 if a == 2 else i3 + 1
                        if ia3 > p3:
                            continue
                        fa = chi3[ia3] if a == 2 else dchi3[ia3]
                        for b in range(3):
                            jb3 = j3 if b == 2 else j3 + 1
                            if jb3 > p3:
                                continue
                            fb = chi3[jb3] if b == 2 else dchi3[jb3]
                            gA[a, b] += fa * fb * C[a, b] * wm
                            gAt[a, b] += dchi3[ia3] * dchi3[jb3] * wq
                for j2 in range(q2):
                    for i2 in range(q2):
                        for a in range(3):
                            ia2 = i2 if a == 1 else i2 + 1
                            if ia2 > p2:
                                continue
                            fa = chi2[ia2] if a == 1 else dchi2[ia2]
                            for b in range(3):
                                jb2 = j2 if b == 1 else j2 + 1
                                if jb2 > p2:
                                    continue
                                fb = chi2[jb2] if b == 1 else dchi2[jb2]
                                gB[a, b, i2, j2] += fa * fb * gA[a, b] * wts[m]
                                gBt[a, b, i2, j2] += (
                                    dchi2[ia2] * dchi2[jb2] * gAt[a, b] * wts[m]
                                )
            for j2 in range(q2):
                for i2 in range(q2):
                    for j1 in range(q1):
                        for i1 in range(q1):
                            for a in range(3):
                                if (
                                    (a != 0 and i1 >= p1)
                                    or (a != 1 and i2 >= p2)
                                    or (a != 2 and i3 >= p3)
                                ):
                                    continue
                                ia1 = i1 if a == 0 else i1 + 1
                                I = _flat_hdiv(a, i1, i2, i3, p1, p2, p3)
                                for b in range(3):
                                    if (
                                        (b != 0 and j1 >= p1)
                                        or (b != 1 and j2 >= p2)
                                        or (b != 2 and j3 >= p3)
                                    ):
                                        continue
                                    jb1 = j1 if b == 0 else j1 + 1
                                    Jf = _flat_hdiv(b, j1, j2, j3, p1, p2, p3)
                                    if I >= Jf:
                                        G[I, Jf] += (
                                            fall[rs1[a, b], ia1, jb1]
                                            * gB[a, b, i2, j2]
                                            + f11[ia1, jb1] * gBt[a, b, i2, j2]
                                        )
                                        n_acc += 2
    _mirror_lower(G)
    return G, n_acc, n_geo, n_s1, 0


@njit(cache=True)
def simp_hcurl_ext(p1, p2, p3, fall, nodes, wts, kind, par, wmass):
    L = nodes.shape[0]
    q1 = p1 + 1
    q2 = p2 + 1
    q3 = p3 + 1
    N = p1 * q2 * q3 + q1 * p2 * q3 + q1 * q2 * p3
    G = np.zeros((N, N))
    chi2 = np.empty(q2)
    dchi2 = np.empty(q2)
    chi3 = np.empty(q3)
    dchi3 = np.empty(q3)
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    D = np.empty((3, 3))
    C = np.empty((3, 3))
    gAc = np.empty((3, 3))
    gAa = np.empty((2, 2, 3, 3))
    gBc = np.empty((3, 3, q2, q2))
    gBa = np.empty((2, 2, 3, 3, q2, q2))
    rs1 = np.empty((3, 3), np.int64)
    for a in range(3):
        for b in range(3):
            rs1[a, b] = 2 * (1 if a == 0 else 0) + (1 if b == 0 else 0)
    rc1 = np.empty((2, 2, 3, 3), np.int64)
    rc2 = np.empty((2, 2, 3, 3), np.int64)
    rc3 = np.empty((2, 2, 3, 3), np.int64)
    _rs_hcurl_curl(rc1, rc2, rc3)
    n_acc = 0
    n_geo = 0
    n_s1 = 0
    for j3 in range(q3):
        for i3 in range(q3):
            gBc[:, :, :, :] = 0.0
            gBa[:, :, :, :, :, :] = 0.0
            for m in range(L):
                _shape1_h1_fill(nodes[m], p2, chi2, dchi2)
                n_s1 += 1
                gAc[:, :] = 0.0
                gAa[:, :, :, :] = 0.0
                for n in range(L):
                    _shape1_h1_fill(nodes[n], p3, chi3, dchi3)
                    n_s1 += 1
                    detj = _geom_full(kind, par, 0.5, nodes[m], nodes[n], J, Jinv)
                    n_geo += 1
                    _metric_d(Jinv, D)
                    _metric_c(J, C)
                    wqD = wts[n] * detj * wmass
                    wqC = wts[n] / detj
                    for a in range(3):
                        ia3 = i3 + 1 if a == 2 else i3
                        if ia3 > p3:
                            continue
                        va = dchi3[ia3] if a == 2 else chi3[ia3]
                        for b in range(3):
                            jb3 = j3 + 1 if b == 2 else j3
                            if jb3 > p3:
                                continue
                            vb = dchi3[jb3] if b == 2 else chi3[jb3]
                            gAc[a, b] += va * vb * D[a, b] * wqD
                            for al in range(2):
                                ca = (a + al + 1) % 3
                                fa = chi3[ia3] if ca == 2 else dchi3[ia3]
                                for be in range(2):
                                    cb = (b + be + 1) % 3
                                    fb = chi3[jb3] if cb == 2 else dchi3[jb3]
                                    gAa[al, be, a, b] += fa * fb * C[ca, cb] * wqC
                for j2 in range(q2):
                    for i2 in range(q2):
                        for a in range(3):
                            ia2 = i2 + 1 if a == 1 else i2
                            if ia2 > p2:
                                continue
                            va = dchi2[ia2] if a == 1 else chi2[ia2]
                            for b in range(3):
                                jb2 = j2 + 1 if b == 1 else j2
                                if jb2 > p2:
                                    continue
                                vb = dchi2[jb2] if b == 1 else chi2[jb2]
                                gBc[a, b, i2, j2] += va * vb * gAc[a, b] * wts[m]
                                for al in range(2):
                                    ca = (a + al + 1) % 3
                                    fa = chi2[ia2] if ca == 1 else dchi2[ia2]
                                    for be in range(2):
                                        cb = (b + be + 1) % 3
                                        fb = chi2[jb2] if cb == 1 else dchi2[jb2]
                                        gBa[al, be, a, b, i2, j2] += (
                                            fa * fb * gAa[al, be, a, b] * wts[m]
                                        )
            for j2 in range(q2):
                for i2 in range(q2):
                    for j1 in range(q1):
                        for i1 in range(q1):
                            for a in range(3):
                                if (
                                    (a == 0 and i1 >= p1)
                                    or (a == 1 and i2 >= p2)
                                    or (a == 2 and i3 >= p3)
                                ):
                                    continue
                                ia1 = i1 + 1 if a == 0 else i1
                                I = _flat_hcurl(a, i1, i2, i3, p1, p2, p3)
                                for b in range(3):
                                    if (
                                        (b == 0 and j1 >= p1)
                                        or (b == 1 and j2 >= p2)
                                        or (b == 2 and j3 >= p3)
                                    ):
                                        continue
                                    jb1 = j1 + 1 if b == 0 else j1
                                    Jf = _flat_hcurl(b, j1, j2, j3, p1, p2, p3)
                                    if I >= Jf:
                                        val = fall[rs1[a, b], ia1, jb1] * gBc[a, b, i2, j2]
                                        n_acc += 1
                                        for al in range(2):
                                            for be in range(2):
                                                sgn = 1.0 if al == be else -1.0
                                                val += (
                                                    sgn
                                                    * fall[rc1[al, be, a, b], ia1, jb1]
                                                    * gBa[al, be, a, b, i2, j2]
                                                )
                                                n_acc += 1
                                        G[I, Jf] += val
    _mirror_lower(G)
    return G, n_acc, n_geo, n_s1, 0


# ---------------------------------------------------------------------------
# DPG assembly kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def bilinear_grad_conv(pts, wts, test_grads, trial_grads, kind, par, kflat):
    """B[i, j] = integral( k grad(test_i)^T D grad(trial_j) detJ )."""
    nq = pts.shape[0]
    m = test_grads.shape[1]
    n = trial_grads.shape[1]
    B = np.zeros((m, n))
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    D = np.empty((3, 3))
    dg = np.empty(3)
    for t in range(nq):
        detj = _geom_full(kind, par, pts[t, 0], pts[t, 1], pts[t, 2], J, Jinv)
        _metric_d(Jinv, D)
        c = wts[t] * detj * kflat[t]
        for j in range(n):
            for a in range(3):
                dg[a] = (
                    D[a, 0] * trial_grads[t, j, 0]
                    + D[a, 1] * trial_grads[t, j, 1]
                    + D[a, 2] * trial_grads[t, j, 2]
                )
            for i in range(m):
                B[i, j] += (
                    test_grads[t, i, 0] * dg[0]
                    + test_grads[t, i, 1] * dg[1]
                    + test_grads[t, i, 2] * dg[2]
                ) * c
    return B


@njit(cache=True)
def acoustics_b_conv(pts, wts, qvals, qgrads, vvals, vdivs, trial_nu, omega,
                     kind, par):
    """Conventional assembly of the ultraweak acoustics stiffness matrix.

    Rows: H1 test functions q (first mW), then H(div) test functions v.
    Columns: pressure trial block (nY), then velocity components c = 1..3.
    Returns the real and imaginary parts.
    """
    nq = pts.shape[0]
    mw = qvals.shape[1]
    mv = vvals.shape[1]
    ny = trial_nu.shape[1]
    m = mw + mv
    n = 4 * ny
    Bre = np.zeros((m, n))
    Bim = np.zeros((m, n))
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    for t in range(nq):
        detj = _geom_full(kind, par, pts[t, 0], pts[t, 1], pts[t, 2], J, Jinv)
        w = wts[t]
        for i in range(mw):
            # + i omega (p, q): no Jacobian factor on the master element
            cim = omega * qvals[t, i] * w
            for k in range(ny):
                Bim[i, k] += cim * trial_nu[t, k]
            # - (u, grad q): -(Jinv^T grad q)_c paired with nu_k
            for c in range(3):
                g = (
                    Jinv[0, c] * qgrads[t, i, 0]
                    + Jinv[1, c] * qgrads[t, i, 1]
                    + Jinv[2, c] * qgrads[t, i, 2]
                )
                cre = -g * w
                off = ny * (1 + c)
                for k in range(ny):
                    Bre[i, off + k] += cre * trial_nu[t, k]
        for iv in range(mv):
            i = mw + iv
            # - (p, div v): -(p_hat div_hat v_hat / detJ)
            cre = -vdivs[t, iv] * w / detj
            for k in range(ny):
                Bre[i, k] += cre * trial_nu[t, k]
            # + i omega (u, v): omega u_hat^T J v_hat / detJ
            for c in range(3):
                jv = (
                    J[c, 0] * vvals[t, iv, 0]
                    + J[c, 1] * vvals[t, iv, 1]
                    + J[c, 2] * vvals[t, iv, 2]
                )
                cim = omega * jv * w / detj
                off = ny * (1 + c)
                for k in range(ny):
                    Bim[i, off + k] += cim * trial_nu[t, k]
    return Bre, Bim


@njit(cache=True)
def mixed_tens_term(p0, pr, su1, su2, su3, sh1, sh2, sh3, geom_code, gr, gc,
                    nodes, wts, kind, par):
    """Sum-factorized mixed test/trial term.

    out[i_flat, k_flat] = integral over the cube of
        prod_d chi^(su_d)_{i_d + sh_d}(xi_d) * nu_{k_d}(xi_d) * g(xi)
    where g is selected by geom_code (0: 1, 1: 1/detJ, 2: J[gr,gc]/detJ,
    3: Jinv[gr,gc]).  Test digits i_d run over 0..pr-sh_d, trial digits
    k_d over 0..p0-1; both flat indices are digit-lexicographic.
    """
    L = nodes.shape[0]
    n1 = pr + 1 - sh1
    n2 = pr + 1 - sh2
    n3 = pr + 1 - sh3
    nt = n1 * n2 * n3
    nk = p0 * p0 * p0
    out = np.zeros((nt, nk))
    chi1 = np.empty(pr + 1)
    dchi1 = np.empty(pr + 1)
    chi2 = np.empty(pr + 1)
    dchi2 = np.empty(pr + 1)
    chi3 = np.empty(pr + 1)
    dchi3 = np.empty(pr + 1)
    nu1 = np.empty(p0)
    nu2 = np.empty(p0)
    nu3 = np.empty(p0)
    J = np.empty((3, 3))
    Jinv = np.empty((3, 3))
    gA = np.empty((n3, p0))
    gB = np.empty((n2, p0, n3, p0))
    for l in range(L):
        _shape1_h1_fill(nodes[l], pr, chi1, dchi1)
        _shape1_l2_fill(nodes[l], p0, nu1)
        gB[:, :, :, :] = 0.0
        for m in range(L):
            _shape1_h1_fill(nodes[m], pr, chi2, dchi2)
            _shape1_l2_fill(nodes[m], p0, nu2)
            gA[:, :] = 0.0
            for n in range(L):
                _shape1_h1_fill(nodes[n], pr, chi3, dchi3)
                _shape1_l2_fill(nodes[n], p0, nu3)
                detj = _geom_full(kind, par, nodes[l], nodes[m], nodes[n], J, Jinv)
                if geom_code == 0:
                    g = 1.0
                elif geom_code == 1:
                    g = 1.0 / detj
                elif geom_code == 2:
                    g = J[gr, gc] / detj
                else:
                    g = Jinv[gr, gc]
                w = wts[n] * g
                for i3 in range(n3):
                    f3 = dchi3[i3 + sh3] if su3 == 1 else chi3[i3 + sh3]
                    for k3 in range(p0):
                        gA[i3, k3] += f3 * nu3[k3] * w
            for i2 in range(n2):
                f2 = dchi2[i2 + sh2] if su2 == 1 else chi2[i2 + sh2]
                for k2 in range(p0):
                    c2 = f2 * nu2[k2] * wts[m]
                    for i3 in range(n3):
                        for k3 in range(p0):
                            gB[i2, k2, i3, k3] += c2 * gA[i3, k3]
        for i1 in range(n1):
            f1 = dchi1[i1 + sh1] if su1 == 1 else chi1[i1 + sh1]
            for k1 in range(p0):
                c1 = f1 * nu1[k1] * wts[l]
                for i2 in range(n2):
                    for k2 in range(p0):
                        for i3 in range(n3):
                            idx_i = i1 + n1 * (i2 + n2 * i3)
                            for k3 in range(p0):
                                out[idx_i, k1 + p0 * (k2 + p0 * k3)] += (
                                    c1 * gB[i2, k2, i3, k3]
                                )
    return out


@njit(cache=True)
def mixed_graph_conv(pts, wts, qvals, qgrads, vvals, vdivs, omega):
    """Conventional quadrature of the adjoint-graph cross block:
    S[i, j] = omega * integral( q_i div(v_j) - grad(q_i)^T v_j )."""
    nq = pts.shape[0]
    mw = qvals.shape[1]
    mv = vvals.shape[1]
    S = np.zeros((mw, mv))
    for t in range(nq):
        w = wts[t] * omega
        for i in range(mw):
            qi = qvals[t, i]
            g0 = qgrads[t, i, 0]
            g1 = qgrads[t, i, 1]
            g2 = qgrads[t, i, 2]
            for j in range(mv):
                S[i, j] += (
                    qi * vdivs[t, j]
                    - g0 * vvals[t, j, 0]
                    - g1 * vvals[t, j, 1]
                    - g2 * vvals[t, j, 2]
                ) * w
    return S
