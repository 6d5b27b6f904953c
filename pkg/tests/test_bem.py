import hashlib
import math

import numpy as np
import pytest

from ellipstat import AffineDensity, Ellipse, generate, theorem1_energy
from ellipstat.bem import (
    PairClass, assemble, bem_energy, classify_pair, nodal_values, pair_integral, singular_rules, triangle_rule,
)

ONE = AffineDensity(1, 0, 0)
X1 = AffineDensity(0, 1, 0)
X2 = AffineDensity(0, 0, 1)


def digest(matrix):
    return hashlib.sha256(matrix.entries.tobytes()).hexdigest()


@pytest.fixture(scope="module")
def level2_wide():
    m = generate(Ellipse(1.5, 0.5), 2)
    return m, assemble(m)


def test_classify_pair():
    assert classify_pair((0, 1, 2), (2, 0, 1)) == (PairClass.IDENTICAL, (0, 1, 2))
    assert classify_pair((0, 1, 2), (1, 0, 5)) == (PairClass.SHARED_EDGE, (0, 1))
    assert classify_pair((0, 1, 2), (2, 7, 5)) == (PairClass.SHARED_VERTEX, (2,))
    assert classify_pair((0, 1, 2), (3, 4, 5)) == (PairClass.SEPARATED, ())


def test_rules_integrate_area():
    _, w, _ = triangle_rule(5)
    assert w.sum() == pytest.approx(0.5, rel=1e-15)
    xs, ys, ws, _, _, offsets = singular_rules(4)
    # each touching case tiles the product of two reference triangles: area 1/4
    for k in range(3):
        assert ws[offsets[k]:offsets[k + 1]].sum() == pytest.approx(0.25, rel=1e-14)


def test_singular_rules_exact_for_polynomials():
    # x1 y2 + x2^2 y1 integrated over the product triangle, by each case
    xs, ys, ws, _, _, offsets = singular_rules(4)
    f = xs[:, 0] * ys[:, 1] + xs[:, 1] ** 2 * ys[:, 0]
    ix1, ix2, ix2sq = 1 / 3, 1 / 6, 1 / 12  # moments over {0 <= x2 <= x1 <= 1}
    exact = ix1 * ix2 + ix2sq * ix1
    for k in range(3):
        assert np.dot(ws[offsets[k]:offsets[k + 1]], f[offsets[k]:offsets[k + 1]]) == pytest.approx(exact, rel=1e-13)


def test_far_field():
    tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    nodes = np.vstack([tri, tri + [100.0, 0.0]])
    value = pair_integral(nodes, (0, 1, 2), (3, 4, 5), basis="constant")
    assert value == pytest.approx(0.25 / (4 * math.pi * 100), rel=1e-2)
    entry = pair_integral(nodes, (0, 1, 2), (3, 4, 5), basis=(0, 2))
    assert entry == pytest.approx(0.25 / 9 / (4 * math.pi * 100), rel=1e-2)


def _exit_distance(p, theta, tri):
    """Distance from interior points p along direction theta to the triangle boundary."""
    d = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    best = np.full(len(p), np.inf)
    for i in range(3):
        a, b = tri[i], tri[(i + 1) % 3]
        e = b - a
        denom = d[:, 0] * (-e[1]) - d[:, 1] * (-e[0])
        rhs = a - p
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (rhs[:, 0] * (-e[1]) - rhs[:, 1] * (-e[0])) / denom
            s = (d[:, 0] * rhs[:, 1] - d[:, 1] * rhs[:, 0]) / denom
        ok = (t > 0) & (s >= 0) & (s <= 1)
        best = np.where(ok & (t < best), t, best)
    return best


def test_identical_pair_constant_basis():
    tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    value = pair_integral(tri, (0, 1, 2), (0, 1, 2), basis="constant", q_sing=12)
    finer = pair_integral(tri, (0, 1, 2), (0, 1, 2), basis="constant", q_sing=16)
    assert value == pytest.approx(finer, rel=1e-10)
    # convergence is geometric but slow: the default order sits at ~4e-6
    default = pair_integral(tri, (0, 1, 2), (0, 1, 2), basis="constant")
    assert default == pytest.approx(finer, rel=1e-5)

    # Monte Carlo in polar coordinates around x: int dy/|x-y| = int R(x, theta) dtheta
    rng = np.random.default_rng(20240611)
    samples, chunk = 10_000_000, 1_000_000
    total = total_sq = 0.0
    for _ in range(samples // chunk):
        u, v = rng.random(chunk), rng.random(chunk)
        flip = u + v > 1
        u, v = np.where(flip, 1 - u, u), np.where(flip, 1 - v, v)
        p = np.stack([u, v], axis=1)
        theta = rng.random(chunk) * 2 * math.pi
        f = 0.5 * 2 * math.pi * _exit_distance(p, theta, tri) / (4 * math.pi)
        total += f.sum()
        total_sq += (f * f).sum()
    mean = total / samples
    stderr = math.sqrt((total_sq / samples - mean ** 2) / samples)
    assert abs(value - mean) < 3 * stderr


def _pairs_by_class(m):
    found = {}
    for i in range(m.n_triangles):
        for j in range(m.n_triangles):
            found.setdefault(classify_pair(m.triangles[i], m.triangles[j])[0], (tuple(m.triangles[i]), tuple(m.triangles[j])))
    return found


def test_swap_symmetry():
    m = generate(Ellipse(1.2, 0.5), 1)
    pairs = _pairs_by_class(m)
    assert len(pairs) == 4
    for kind, (a, b) in pairs.items():
        if kind is PairClass.SHARED_EDGE:
            continue
        assert np.allclose(pair_integral(m.nodes, a, b), pair_integral(m.nodes, b, a).T, rtol=1e-12, atol=0)


def test_swap_symmetry_shared_edge():
    # the five edge maps are not swap-invariant, so the two orders agree only
    # to quadrature accuracy
    m = generate(Ellipse(1.2, 0.5), 1)
    a, b = _pairs_by_class(m)[PairClass.SHARED_EDGE]
    for q_sing, tol in ((6, 1e-4), (12, 1e-8), (20, 1e-11)):
        f = pair_integral(m.nodes, a, b, q_sing=q_sing)
        g = pair_integral(m.nodes, b, a, q_sing=q_sing)
        assert np.abs(f - g.T).max() < tol * np.abs(f).max()


def test_degenerate_triangle():
    nodes = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.0, 1.0]])
    with pytest.raises(ValueError, match="degenerate"):
        pair_integral(nodes, (0, 1, 2), (0, 1, 3))


def test_level0_structure():
    m = generate(Ellipse(1, 1), 0)
    M = assemble(m)
    assert M.entries.shape == (9, 9)
    assert np.array_equal(M.entries, M.entries.T)
    assert np.linalg.eigvalsh(M.entries).min() > 0


@pytest.mark.parametrize("level", [1, 2, 3])
def test_symmetric_positive_definite(level):
    M = assemble(generate(Ellipse(1.3, 0.5), level)).entries
    assert np.array_equal(M, M.T)
    assert np.linalg.eigvalsh(M).min() > 0


def test_bilinearity(level2_wide):
    m, M = level2_wide
    assert M.entries.sum() == pytest.approx(bem_energy(m, ONE, M), rel=1e-13)
    c = nodal_values(m, AffineDensity(1, 2, 3))
    assert c @ (M.entries @ c) == pytest.approx(bem_energy(m, AffineDensity(1, 2, 3), M), rel=1e-13)


def test_nodal_values_exact():
    m = generate(Ellipse(1.5, 0.5), 1)
    c = nodal_values(m, AffineDensity.from_monomial(m.ellipse, 3, 1, 2))
    assert np.allclose(c, 3 + m.nodes[:, 0] + 2 * m.nodes[:, 1], rtol=0, atol=1e-15)


def test_circle_refinement_from_below():
    values = [bem_energy(generate(Ellipse(1, 1), level), ONE) for level in range(0, 5)]
    assert all(v < 4 / 3 for v in values)
    assert np.all(np.diff(values) > 0)
    errors = [4 / 3 - v for v in values]
    orders = [math.log2(a / b) for a, b in zip(errors, errors[1:])]
    assert min(orders[1:]) >= 1.5
    # regression baseline
    assert values[4] == pytest.approx(1.3325313841343003, rel=1e-12)


def test_x1_x2_agree_on_circle():
    m = generate(Ellipse(0.7, 0.7), 3)
    M = assemble(m)
    assert bem_energy(m, X1, M) == pytest.approx(bem_energy(m, X2, M), rel=1e-12)


@pytest.mark.parametrize("a, b, bound", [(1.0, 1.0, 5e-7), (0.9, 0.5, 1e-5), (1.5, 0.5, 2e-4)])
def test_quadrature_self_convergence(a, b, bound):
    # the stretched tip triangles at a/b = 3 limit the default orders to ~1e-4
    for level in (1, 2, 3):
        m = generate(Ellipse(a, b), level)
        base, finer = assemble(m), assemble(m, q=6, q_sing=8)
        for d in (ONE, X1, X2):
            v0, v1 = bem_energy(m, d, base), bem_energy(m, d, finer)
            assert abs(v1 - v0) / v0 < bound


def test_determinism_across_schedules():
    m = generate(Ellipse(1.1, 0.5), 3)
    reference = digest(assemble(m))
    assert digest(assemble(m)) == reference
    assert digest(assemble(m, chunk=7)) == reference
    assert digest(assemble(m, chunk=1000, workers=1)) == reference
    assert digest(assemble(m, workers=2)) == reference


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_cube_scaling(lam):
    e = Ellipse(1.3, 0.5)
    d = AffineDensity(1, 2, 3)
    base = bem_energy(generate(e, 2), d)
    assert bem_energy(generate(e.scaled(lam), 2), d) == pytest.approx(lam ** 3 * base, rel=1e-12)


def test_level4_accuracy():
    e = Ellipse(1.5, 0.5)
    m = generate(e, 4)
    M = assemble(m)
    for d in (ONE, X1, X2):
        assert bem_energy(m, d, M) == pytest.approx(theorem1_energy(e, d).total, rel=1.2e-3)


def test_energy_shape_check(level2_wide):
    _, M = level2_wide
    with pytest.raises(ValueError):
        M.energy(np.ones(3))
