"""P1 Galerkin evaluation of the electrostatic energy on a triangle mesh.

The energy matrix is

    M_ij = 1/(4 pi) int int phi_i(x) phi_j(y) / |x - y| dx dy

over pairs of triangles.  Well separated pairs use a tensor product of
collapsed Gauss rules (order ``q``, dropping to ``q_far`` beyond
``far_factor`` diameters).  Touching pairs (shared vertex, shared edge,
identical) go through the Sauter-Schwab transforms, which cancel the
1/|x - y| singularity so that plain Gauss rules of order ``q_sing`` apply on
the unit hypercube.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .geometry import AffineDensity
from .mesh import TriangleMesh

DEFAULT_Q = 4
DEFAULT_Q_SING = 6
DEFAULT_Q_FAR = 2
DEFAULT_FAR_FACTOR = 4.0
_CHUNK = 256


class PairClass(enum.Enum):
    SEPARATED = "separated"
    SHARED_VERTEX = "shared_vertex"
    SHARED_EDGE = "shared_edge"
    IDENTICAL = "identical"


_BY_COUNT = [PairClass.SEPARATED, PairClass.SHARED_VERTEX, PairClass.SHARED_EDGE, PairClass.IDENTICAL]


def classify_pair(t1, t2) -> tuple[PairClass, tuple[int, ...]]:
    """Pair class from the number of shared node indices.

    The shared nodes are returned sorted, the canonical order used when the
    two triangles are re-parametrized around them.
    """
    shared = tuple(sorted(set(int(i) for i in t1) & set(int(i) for i in t2)))
    return _BY_COUNT[len(shared)], shared


def _gauss01(q: int):
    x, w = np.polynomial.legendre.leggauss(q)
    return 0.5 * (x + 1.0), 0.5 * w


def _basis(pts: np.ndarray) -> np.ndarray:
    return np.column_stack([1.0 - pts[:, 0], pts[:, 0] - pts[:, 1], pts[:, 1]])


@lru_cache(maxsize=None)
def triangle_rule(q: int):
    """Collapsed q x q Gauss rule on the reference triangle (weights sum to 1/2)."""
    if q < 1:
        raise ValueError(f"quadrature order must be positive, got {q}")
    x, w = _gauss01(q)
    xi, eta = np.meshgrid(x, x, indexing="ij")
    wx, we = np.meshgrid(w, w, indexing="ij")
    pts = np.column_stack([xi.ravel(), (xi * eta).ravel()])
    weights = (wx * we * xi).ravel()
    return pts, weights, _basis(pts)


def _singular_maps(xi, e1, e2, e3):
    """Sauter-Schwab maps (x_hat, y_hat, jacobian) for the three touching cases."""
    jac6 = xi ** 3 * e1 ** 2 * e2
    identical = [
        ((xi, xi * (1 - e1 + e1 * e2)), (xi * (1 - e1 * e2 * e3), xi * (1 - e1)), jac6),
        ((xi * (1 - e1 * e2 * e3), xi * (1 - e1)), (xi, xi * (1 - e1 + e1 * e2)), jac6),
        ((xi, xi * e1 * (1 - e2 + e2 * e3)), (xi * (1 - e1 * e2), xi * e1 * (1 - e2)), jac6),
        ((xi * (1 - e1 * e2), xi * e1 * (1 - e2)), (xi, xi * e1 * (1 - e2 + e2 * e3)), jac6),
        ((xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3)), (xi, xi * e1 * (1 - e2)), jac6),
        ((xi, xi * e1 * (1 - e2)), (xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3)), jac6),
    ]
    # common edge is x2 = 0, i.e. reference vertices 0 and 1
    edge = [
        ((xi, xi * e1 * e3), (xi * (1 - e1 * e2), xi * e1 * (1 - e2)), xi ** 3 * e1 ** 2),
        ((xi, xi * e1), (xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3)), jac6),
        ((xi * (1 - e1 * e2), xi * e1 * (1 - e2)), (xi, xi * e1 * e2 * e3), jac6),
        ((xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3)), (xi, xi * e1), jac6),
        ((xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3)), (xi, xi * e1 * e2), jac6),
    ]
    # common vertex is reference vertex 0
    jac2 = xi ** 3 * e2
    vertex = [
        ((xi, xi * e1), (xi * e2, xi * e2 * e3), jac2),
        ((xi * e2, xi * e2 * e3), (xi, xi * e1), jac2),
    ]
    return identical, edge, vertex


@lru_cache(maxsize=None)
def singular_rules(q_sing: int):
    """Concatenated 4D rules: identical, shared edge, shared vertex.

    Returns (x_hat, y_hat, weights, phi(x_hat), phi(y_hat), offsets) where
    rows offsets[k]:offsets[k+1] belong to case k.
    """
    if q_sing < 1:
        raise ValueError(f"quadrature order must be positive, got {q_sing}")
    x, w = _gauss01(q_sing)
    grid = np.array(list(itertools.product(x, repeat=4))).T
    weights = np.prod(np.array(list(itertools.product(w, repeat=4))), axis=1)
    xs, ys, ws, offsets = [], [], [], [0]
    for case in _singular_maps(*grid):
        for (x1, x2), (y1, y2), jac in case:
            xs.append(np.column_stack([x1, x2]))
            ys.append(np.column_stack([y1, y2]))
            ws.append(weights * jac)
        offsets.append(offsets[-1] + len(case) * len(weights))
    xs, ys, ws = np.vstack(xs), np.vstack(ys), np.concatenate(ws)
    return xs, ys, ws, _basis(xs), _basis(ys), np.array(offsets, dtype=np.int64)


def _mapped_rule(nodes, tris, q):
    """Physical points and Jacobian-scaled weights of the triangle rule, per triangle."""
    ref, weights, phi = triangle_rule(q)
    p0, p1, p2 = nodes[tris[:, 0]], nodes[tris[:, 1]], nodes[tris[:, 2]]
    u, v = p1 - p0, p2 - p1
    jac = np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])
    pts = p0[:, None, :] + ref[None, :, 0, None] * u[:, None, :] + ref[None, :, 1, None] * v[:, None, :]
    return np.ascontiguousarray(pts), np.ascontiguousarray(jac[:, None] * weights[None, :]), phi


def _check_nondegenerate(nodes, tri):
    p = nodes[np.asarray(tri)]
    u, v = p[1] - p[0], p[2] - p[0]
    if u[0] * v[1] - u[1] * v[0] == 0.0:
        raise ValueError(f"degenerate triangle {tuple(int(i) for i in tri)}")


def pair_integral(nodes, t1, t2, basis=None, q: int = DEFAULT_Q, q_sing: int = DEFAULT_Q_SING):
    """int_{t1} int_{t2} phi_a(x) phi_b(y) / (4 pi |x - y|) dy dx.

    ``t1``/``t2`` are node-index triples into ``nodes``.  With ``basis=None``
    the full 3x3 matrix over local vertices is returned; ``basis=(a, b)``
    picks one entry; ``basis="constant"`` integrates phi = 1 on both sides.
    Separated pairs always use order ``q`` here (no distance grading).
    """
    nodes = np.ascontiguousarray(nodes, dtype=float)
    t1 = np.asarray(t1, dtype=np.int64)
    t2 = np.asarray(t2, dtype=np.int64)
    _check_nondegenerate(nodes, t1)
    _check_nondegenerate(nodes, t2)
    tris = np.vstack([t1, t2])
    pts, wts, phi = _mapped_rule(nodes, tris, q)
    out = np.empty((3, 3))
    _kernels.pair_matrix(nodes, t1, t2, False, pts[0], wts[0], pts[1], wts[1], phi,
                         pts[0], wts[0], pts[1], wts[1], phi, *singular_rules(q_sing), out)
    if basis is None:
        return out
    if isinstance(basis, str) and basis == "constant":
        return float(out.sum())
    a, b = basis
    return float(out[a, b])


@dataclass(frozen=True, eq=False)
class EnergyMatrix:
    """Dense symmetric matrix of the single-layer energy form on P1 hat functions."""

    entries: np.ndarray
    q: int = DEFAULT_Q
    q_sing: int = DEFAULT_Q_SING

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    def energy(self, values) -> float:
        c = np.ascontiguousarray(values, dtype=float)
        if c.shape != (self.dimension,):
            raise ValueError(f"expected {self.dimension} nodal values, got shape {c.shape}")
        return float(_kernels.quadratic_form(self.entries, c))


def assemble(m: TriangleMesh, q: int = DEFAULT_Q, q_sing: int = DEFAULT_Q_SING,
             q_far: int | None = DEFAULT_Q_FAR, far_factor: float = DEFAULT_FAR_FACTOR,
             chunk: int = _CHUNK, workers: int | None = None) -> EnergyMatrix:
    """Assemble the energy matrix over all unordered triangle pairs.

    ``q_far=None`` disables distance grading.  ``chunk`` and ``workers``
    affect scheduling only; the result is bit-identical for any choice.
    """
    if workers is not None:
        import numba

        numba.set_num_threads(max(1, min(int(workers), numba.config.NUMBA_NUM_THREADS)))
    nodes = np.ascontiguousarray(m.nodes)
    tris = np.ascontiguousarray(m.triangles)
    n, T = len(nodes), len(tris)
    p = nodes[tris]
    centroids = np.ascontiguousarray(p.mean(axis=1))
    diameters = np.linalg.norm(p - np.roll(p, -1, axis=1), axis=2).max(axis=1)
    near_pts, near_w, near_phi = _mapped_rule(nodes, tris, q)
    if q_far is None:
        far_pts, far_w, far_phi, factor = near_pts, near_w, near_phi, np.inf
    else:
        far_pts, far_w, far_phi = _mapped_rule(nodes, tris, q_far)
        factor = float(far_factor)
    rules = singular_rules(q_sing)

    U = np.zeros((n, n))
    carry = np.zeros((n, n))
    R = np.empty((min(chunk, T), 3, n))
    for start in range(0, T, chunk):
        stop = min(start + chunk, T)
        _kernels.assemble_rows(nodes, tris, start, stop, R, centroids, diameters, factor,
                               near_pts, near_w, near_phi, far_pts, far_w, far_phi, *rules)
        _kernels.reduce_rows(U, carry, R, tris, start, stop)
    del carry, R
    M = np.empty_like(U)
    _kernels.symmetric_sum(U, M)
    return EnergyMatrix(M, q, q_sing)


def nodal_values(m: TriangleMesh, d: AffineDensity) -> np.ndarray:
    """Nodal interpolant of an affine density (exact on each triangle)."""
    return d.evaluate(m.ellipse, m.nodes[:, 0], m.nodes[:, 1]).astype(float)


def bem_energy(m: TriangleMesh, d: AffineDensity, matrix: EnergyMatrix | None = None, **kwargs) -> float:
    """c . (M c) with c the nodal values of ``d``; ``kwargs`` go to :func:`assemble`."""
    if matrix is None:
        matrix = assemble(m, **kwargs)
    return matrix.energy(nodal_values(m, d))
