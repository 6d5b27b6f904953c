"""Compiled inner loops for the Galerkin assembly.

Reference triangle: {0 <= x2 <= x1 <= 1} with vertices (0,0), (1,0), (1,1),
mapped to a physical triangle (P0, P1, P2) by P0 + x1 (P1 - P0) + x2 (P2 - P1).
Local P1 basis: 1 - x1, x1 - x2, x2.
"""
import math
import os

import numba
import numpy as np
from numba import njit, prange

if "NUMBA_THREADING_LAYER" not in os.environ:
    # an outdated system TBB only produces a warning; skip straight past it
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

INV_4PI = 1.0 / (4.0 * math.pi)

SEPARATED, SHARED_VERTEX, SHARED_EDGE, IDENTICAL = 0, 1, 2, 3


@njit(cache=True)
def _jacobian(p0x, p0y, p1x, p1y, p2x, p2y):
    return abs((p1x - p0x) * (p2y - p1y) - (p1y - p0y) * (p2x - p1x))


@njit(cache=True)
def singular_local(P, Q, xs, ys, w, phx, phy, out):
    """Accumulate the regularized 4D rule for one touching pair into out[3, 3].

    P and Q are (3, 2) vertex arrays already ordered so that the shared
    vertices come first; the rule (xs, ys, w) encodes the matching
    Sauter-Schwab transform.
    """
    ux, uy = P[1, 0] - P[0, 0], P[1, 1] - P[0, 1]
    vx, vy = P[2, 0] - P[1, 0], P[2, 1] - P[1, 1]
    sx, sy = Q[1, 0] - Q[0, 0], Q[1, 1] - Q[0, 1]
    tx, ty = Q[2, 0] - Q[1, 0], Q[2, 1] - Q[1, 1]
    jac = abs(ux * vy - uy * vx) * abs(sx * ty - sy * tx) * INV_4PI
    for i in range(3):
        for j in range(3):
            out[i, j] = 0.0
    for k in range(w.shape[0]):
        x = P[0, 0] + xs[k, 0] * ux + xs[k, 1] * vx
        y = P[0, 1] + xs[k, 0] * uy + xs[k, 1] * vy
        X = Q[0, 0] + ys[k, 0] * sx + ys[k, 1] * tx
        Y = Q[0, 1] + ys[k, 0] * sy + ys[k, 1] * ty
        dx, dy = x - X, y - Y
        r = math.sqrt(dx * dx + dy * dy)
        if r == 0.0:
            continue
        kw = w[k] / r
        for i in range(3):
            ki = kw * phx[k, i]
            for j in range(3):
                out[i, j] += ki * phy[k, j]
    for i in range(3):
        for j in range(3):
            out[i, j] *= jac


@njit(cache=True)
def regular_local(xa, wa, xb, wb, phi_a, phi_b, out):
    """Tensor product of two triangle rules with pre-mapped points and weights."""
    for i in range(3):
        for j in range(3):
            out[i, j] = 0.0
    na, nb = wa.shape[0], wb.shape[0]
    for p in range(na):
        v0 = 0.0
        v1 = 0.0
        v2 = 0.0
        px, py = xa[p, 0], xa[p, 1]
        for s in range(nb):
            dx, dy = px - xb[s, 0], py - xb[s, 1]
            k = wb[s] / math.sqrt(dx * dx + dy * dy)
            v0 += k * phi_b[s, 0]
            v1 += k * phi_b[s, 1]
            v2 += k * phi_b[s, 2]
        c = wa[p] * INV_4PI
        for i in range(3):
            f = c * phi_a[p, i]
            out[i, 0] += f * v0
            out[i, 1] += f * v1
            out[i, 2] += f * v2


@njit(cache=True)
def shared_layout(t1, t2, perm1, perm2):
    """Count shared vertices and order local indices shared-first.

    perm1/perm2 receive local vertex positions; the first ``count`` entries
    of each refer to the same global nodes in matching order.
    """
    count = 0
    used1 = np.zeros(3, dtype=np.bool_)
    used2 = np.zeros(3, dtype=np.bool_)
    for a in range(3):
        for b in range(3):
            if t1[a] == t2[b]:
                perm1[count] = a
                perm2[count] = b
                used1[a] = True
                used2[b] = True
                count += 1
    k = count
    for a in range(3):
        if not used1[a]:
            perm1[k] = a
            k += 1
    k = count
    for b in range(3):
        if not used2[b]:
            perm2[k] = b
            k += 1
    return count


@njit(cache=True)
def pair_matrix(nodes, t1, t2, far, near_pts1, near_w1, near_pts2, near_w2, near_phi,
                far_pts1, far_w1, far_pts2, far_w2, far_phi,
                sx, sy, sw, sphx, sphy, offsets, out):
    """3x3 local interaction matrix of two triangles (indexed by local vertex)."""
    perm1 = np.empty(3, dtype=np.int64)
    perm2 = np.empty(3, dtype=np.int64)
    count = shared_layout(t1, t2, perm1, perm2)
    if count == 0:
        if far:
            regular_local(far_pts1, far_w1, far_pts2, far_w2, far_phi, far_phi, out)
        else:
            regular_local(near_pts1, near_w1, near_pts2, near_w2, near_phi, near_phi, out)
        return count
    if count == 3:
        for a in range(3):
            perm1[a] = a
            perm2[a] = a
    P = np.empty((3, 2))
    Q = np.empty((3, 2))
    for a in range(3):
        for d in range(2):
            P[a, d] = nodes[t1[perm1[a]], d]
            Q[a, d] = nodes[t2[perm2[a]], d]
    rule = 3 - count  # 0 identical, 1 edge, 2 vertex
    lo, hi = offsets[rule], offsets[rule + 1]
    tmp = np.empty((3, 3))
    singular_local(P, Q, sx[lo:hi], sy[lo:hi], sw[lo:hi], sphx[lo:hi], sphy[lo:hi], tmp)
    for i in range(3):
        for j in range(3):
            out[perm1[i], perm2[j]] = tmp[i, j]
    return count


@njit(parallel=True, cache=True)
def assemble_rows(nodes, tris, t_start, t_stop, R, centroids, diameters, far_factor,
                  near_pts, near_w, near_phi, far_pts, far_w, far_phi,
                  sx, sy, sw, sphx, sphy, offsets):
    """Rows of the upper pair sum for triangles t_start..t_stop-1.

    R[c, a, :] collects, for t1 = t_start + c and local vertex a, the
    contributions of every t2 >= t1 (the identical pair counted with 1/2).
    Each t1 is handled by a single worker in ascending t2 order.
    """
    T = tris.shape[0]
    for c in prange(t_stop - t_start):
        t1 = t_start + c
        for a in range(3):
            for j in range(R.shape[2]):
                R[c, a, j] = 0.0
        out = np.empty((3, 3))
        for t2 in range(t1, T):
            dx = centroids[t1, 0] - centroids[t2, 0]
            dy = centroids[t1, 1] - centroids[t2, 1]
            reach = far_factor * max(diameters[t1], diameters[t2])
            far = dx * dx + dy * dy > reach * reach
            pair_matrix(nodes, tris[t1], tris[t2], far,
                        near_pts[t1], near_w[t1], near_pts[t2], near_w[t2], near_phi,
                        far_pts[t1], far_w[t1], far_pts[t2], far_w[t2], far_phi,
                        sx, sy, sw, sphx, sphy, offsets, out)
            scale = 0.5 if t1 == t2 else 1.0
            for a in range(3):
                for b in range(3):
                    R[c, a, tris[t2, b]] += scale * out[a, b]


@njit(cache=True)
def reduce_rows(U, carry, R, tris, t_start, t_stop):
    """Compensated, fixed-order accumulation of row buffers into U."""
    n = U.shape[1]
    for c in range(t_stop - t_start):
        t1 = t_start + c
        for a in range(3):
            row = tris[t1, a]
            for j in range(n):
                y = R[c, a, j] - carry[row, j]
                t = U[row, j] + y
                carry[row, j] = (t - U[row, j]) - y
                U[row, j] = t


@njit(cache=True)
def symmetric_sum(U, M):
    n = U.shape[0]
    for i in range(n):
        for j in range(n):
            M[i, j] = U[i, j] + U[j, i]


@njit(cache=True)
def quadratic_form(M, c):
    """c . (M c) with fixed summation order."""
    n = M.shape[0]
    total = 0.0
    carry = 0.0
    for i in range(n):
        row = 0.0
        for j in range(n):
            row += M[i, j] * c[j]
        y = c[i] * row - carry
        t = total + y
        carry = (t - total) - y
        total = t
    return total
