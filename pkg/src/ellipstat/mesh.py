"""Structured triangulations of the elliptical disc and their text format.

Level 0 is a fan of eight triangles around the centre.  Each refinement
splits every triangle into four by edge bisection; midpoints of rim edges are
pushed radially back onto the unit circle.  The unit-disc mesh is finally
stretched by (a, b), which keeps rim nodes exactly on the ellipse.

File format (line oriented, floats with 17 significant digits)::

    ellipse <a> <b>
    vertices <N>
    <x1> <x2>            (N lines)
    triangles <M>
    <i> <j> <k>          (M lines, zero-based, counterclockwise)
    boundary <K>
    <i>                  (K lines)
"""
from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import MeshFormatError, MeshValidationError, OrientationError
from .geometry import Ellipse

RIM_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    nodes: np.ndarray
    triangles: np.ndarray
    boundary_mask: np.ndarray
    ellipse: Ellipse
    refinement: int | None = None
    _areas: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        tris = np.ascontiguousarray(self.triangles, dtype=np.int64)
        mask = np.ascontiguousarray(self.boundary_mask, dtype=bool)
        for arr in (nodes, tris, mask):
            arr.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "triangles", tris)
        object.__setattr__(self, "boundary_mask", mask)
        object.__setattr__(self, "_areas", _signed_areas(nodes, tris) if tris.size else np.zeros(0))

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def areas(self) -> np.ndarray:
        return self._areas

    @property
    def area(self) -> float:
        return float(self._areas.sum())

    def edge_lengths(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        return np.linalg.norm(p - np.roll(p, -1, axis=1), axis=2)

    def min_angle(self) -> float:
        """Smallest interior angle over all triangles, in degrees."""
        p = self.nodes[self.triangles]
        worst = math.pi
        for k in range(3):
            u = p[:, (k + 1) % 3] - p[:, k]
            v = p[:, (k + 2) % 3] - p[:, k]
            cos = (u * v).sum(1) / (np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1))
            worst = min(worst, float(np.arccos(np.clip(cos, -1, 1)).min()))
        return math.degrees(worst)

    def validate(self) -> None:
        """Check every invariant; raise MeshValidationError on the first violation."""
        n = self.n_nodes
        if self.nodes.ndim != 2 or self.nodes.shape[1] != 2:
            raise MeshValidationError("nodes must be an (N, 2) array")
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise MeshValidationError("triangles must be an (M, 3) array")
        if self.boundary_mask.shape != (n,):
            raise MeshValidationError("boundary mask must have one flag per node")
        if self.triangles.size and (self.triangles.min() < 0 or self.triangles.max() >= n):
            raise MeshValidationError(f"triangle index out of range [0, {n})")
        bad = np.nonzero(self._areas <= 0)[0]
        if bad.size:
            raise OrientationError(f"triangle {bad[0]} is clockwise or degenerate (area {self._areas[bad[0]]:.3e})")
        a, b = self.ellipse.a, self.ellipse.b
        level = (self.nodes[:, 0] / a) ** 2 + (self.nodes[:, 1] / b) ** 2 - 1.0
        off_rim = np.nonzero(self.boundary_mask & (np.abs(level) >= RIM_TOLERANCE))[0]
        if off_rim.size:
            raise MeshValidationError(f"boundary node {off_rim[0]} is not on the ellipse")
        outside = np.nonzero(~self.boundary_mask & (level >= 0))[0]
        if outside.size:
            raise MeshValidationError(f"interior node {outside[0]} is not strictly inside the ellipse")
        edges = np.sort(np.concatenate([self.triangles[:, [0, 1]], self.triangles[:, [1, 2]],
                                        self.triangles[:, [2, 0]]]), axis=1)
        _, counts = np.unique(edges, axis=0, return_counts=True)
        if counts.max(initial=0) > 2:
            raise MeshValidationError("an edge is shared by more than two triangles")

    def __eq__(self, other):
        if not isinstance(other, TriangleMesh):
            return NotImplemented
        return (self.ellipse == other.ellipse
                and np.array_equal(self.nodes, other.nodes)
                and np.array_equal(self.triangles, other.triangles)
                and np.array_equal(self.boundary_mask, other.boundary_mask))

    __hash__ = None


def _signed_areas(nodes: np.ndarray, tris: np.ndarray) -> np.ndarray:
    p0, p1, p2 = nodes[tris[:, 0]], nodes[tris[:, 1]], nodes[tris[:, 2]]
    u, v = p1 - p0, p2 - p0
    return 0.5 * (u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])


def _unit_disc(level: int):
    h = math.sqrt(0.5)
    # the 8-fan at multiples of pi/4, written out so the mesh is exactly symmetric
    points = [(0.0, 0.0), (1.0, 0.0), (h, h), (0.0, 1.0), (-h, h),
              (-1.0, 0.0), (-h, -h), (0.0, -1.0), (h, -h)]
    on_rim = [False] + [True] * 8
    tris = [(0, 1 + k, 1 + (k + 1) % 8) for k in range(8)]

    for _ in range(level):
        counts: dict[tuple[int, int], int] = {}
        for t in tris:
            for i, j in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                key = (i, j) if i < j else (j, i)
                counts[key] = counts.get(key, 0) + 1
        midpoint: dict[tuple[int, int], int] = {}

        def mid(i, j):
            key = (i, j) if i < j else (j, i)
            index = midpoint.get(key)
            if index is None:
                x = 0.5 * (points[i][0] + points[j][0])
                y = 0.5 * (points[i][1] + points[j][1])
                rim = counts[key] == 1
                if rim:
                    r = math.hypot(x, y)
                    x, y = x / r, y / r
                index = len(points)
                points.append((x, y))
                on_rim.append(rim)
                midpoint[key] = index
            return index

        refined = []
        for v0, v1, v2 in tris:
            m01, m12, m20 = mid(v0, v1), mid(v1, v2), mid(v2, v0)
            refined += [(v0, m01, m20), (m01, v1, m12), (m20, m12, v2), (m01, m12, m20)]
        tris = refined
    return np.array(points), np.array(tris, dtype=np.int64), np.array(on_rim)


def generate(e: Ellipse, level: int) -> TriangleMesh:
    """Deterministic concentric mesh of the disc with 8 * 4**level triangles."""
    level = int(level)
    if level < 0:
        raise ValueError(f"refinement level must be non-negative, got {level}")
    points, tris, rim = _unit_disc(level)
    nodes = points * np.array([e.a, e.b])
    return TriangleMesh(nodes, tris, rim, e, level)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def dumps(m: TriangleMesh) -> str:
    out = io.StringIO()
    out.write(f"ellipse {_fmt(m.ellipse.a)} {_fmt(m.ellipse.b)}\n")
    out.write(f"vertices {m.n_nodes}\n")
    for x, y in m.nodes:
        out.write(f"{_fmt(x)} {_fmt(y)}\n")
    out.write(f"triangles {m.n_triangles}\n")
    for i, j, k in m.triangles:
        out.write(f"{i} {j} {k}\n")
    rim = np.nonzero(m.boundary_mask)[0]
    out.write(f"boundary {len(rim)}\n")
    for i in rim:
        out.write(f"{i}\n")
    return out.getvalue()


def write_mesh(m: TriangleMesh, destination) -> None:
    """Write to a path or a text stream."""
    text = dumps(m)
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


class _Lines:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    def next(self, what: str) -> tuple[int, list[str]]:
        while self.pos < len(self.lines):
            self.pos += 1
            fields = self.lines[self.pos - 1].split()
            if fields:
                return self.pos, fields
        raise MeshFormatError(f"unexpected end of file, expected {what}", self.pos + 1)


def _header(lines: _Lines, keyword: str, nvalues: int):
    lineno, fields = lines.next(f"'{keyword}' header")
    if fields[0] != keyword or len(fields) != nvalues + 1:
        raise MeshFormatError(f"expected '{keyword}' followed by {nvalues} value(s)", lineno)
    return lineno, fields[1:]


def _parse(convert, token: str, lineno: int, what: str):
    try:
        return convert(token)
    except ValueError:
        raise MeshFormatError(f"cannot parse {what} from {token!r}", lineno) from None


def _count(token: str, lineno: int) -> int:
    value = _parse(int, token, lineno, "count")
    if value < 0:
        raise MeshFormatError(f"negative count {value}", lineno)
    return value


def loads(text: str) -> TriangleMesh:
    lines = _Lines(text)
    lineno, (a, b) = _header(lines, "ellipse", 2)
    try:
        ellipse = Ellipse(_parse(float, a, lineno, "a"), _parse(float, b, lineno, "b"))
    except MeshFormatError:
        raise
    except ValueError as exc:
        raise MeshFormatError(str(exc), lineno) from None

    lineno, (n,) = _header(lines, "vertices", 1)
    nodes = np.empty((_count(n, lineno), 2))
    for row in range(len(nodes)):
        lineno, fields = lines.next("vertex coordinates")
        if len(fields) != 2:
            raise MeshFormatError("a vertex line needs exactly two coordinates", lineno)
        nodes[row] = [_parse(float, f, lineno, "coordinate") for f in fields]

    lineno, (n,) = _header(lines, "triangles", 1)
    tris = np.empty((_count(n, lineno), 3), dtype=np.int64)
    for row in range(len(tris)):
        lineno, fields = lines.next("triangle indices")
        if len(fields) != 3:
            raise MeshFormatError("a triangle line needs exactly three indices", lineno)
        tris[row] = [_parse(int, f, lineno, "index") for f in fields]

    lineno, (n,) = _header(lines, "boundary", 1)
    mask = np.zeros(len(nodes), dtype=bool)
    for _ in range(_count(n, lineno)):
        lineno, fields = lines.next("boundary index")
        if len(fields) != 1:
            raise MeshFormatError("a boundary line needs exactly one index", lineno)
        index = _parse(int, fields[0], lineno, "index")
        if not 0 <= index < len(nodes):
            raise MeshValidationError(f"line {lineno}: boundary index {index} out of range [0, {len(nodes)})")
        mask[index] = True
    if lines.pos < len(lines.lines) and any(l.strip() for l in lines.lines[lines.pos:]):
        raise MeshFormatError("trailing content after boundary section", lines.pos + 1)

    if tris.size and (tris.min() < 0 or tris.max() >= len(nodes)):
        raise MeshValidationError(f"triangle index out of range [0, {len(nodes)})")
    count = len(tris)
    level = None
    if count >= 8:
        k = round(math.log(count / 8, 4))
        if 8 * 4 ** k == count:
            level = k
    mesh = TriangleMesh(nodes, tris, mask, ellipse, level)
    mesh.validate()
    return mesh


def read_mesh(source) -> TriangleMesh:
    """Read from a path or a text stream; validates all invariants."""
    if hasattr(source, "read"):
        return loads(source.read())
    with open(os.fspath(source), encoding="utf-8") as fh:
        return loads(fh.read())
