"""Energy reports, density specifications and the reproduction tables."""
from __future__ import annotations

import ast
import csv
import io
import json
from dataclasses import dataclass, field
from decimal import ROUND_DOWN, ROUND_HALF_EVEN, Decimal

import numpy as np

from . import analytic, bem, oracle, spectral
from .geometry import AffineDensity, Ellipse
from .mesh import generate

METHODS = ("analytic", "spectral", "bem", "oracle")
ROUNDING = {"truncate": ROUND_DOWN, "half-even": ROUND_HALF_EVEN}


@dataclass(frozen=True)
class DensitySpec:
    """An affine density together with the convention its coefficients use.

    ``monomial``: c0 + c1 x1 + c2 x2.  ``normalized``: c0 + c1 x1/a + c2 x2/b.
    """

    description: str
    coefficients: tuple[float, float, float]
    convention: str

    def affine(self, e: Ellipse) -> AffineDensity:
        if self.convention == "monomial":
            return AffineDensity.from_monomial(e, *self.coefficients)
        return AffineDensity(*self.coefficients)

    @classmethod
    def named(cls, name: str) -> "DensitySpec":
        coeffs = {"one": (1.0, 0.0, 0.0), "x1": (0.0, 1.0, 0.0), "x2": (0.0, 0.0, 1.0)}[name]
        return cls(name, coeffs, "monomial")

    @classmethod
    def from_alpha(cls, alpha) -> "DensitySpec":
        a0, a1, a2 = (float(x) for x in alpha)
        return cls(f"{_short(a0)} + {_short(a1)}*x1/a + {_short(a2)}*x2/b", (a0, a1, a2), "normalized")

    @classmethod
    def from_expression(cls, text: str) -> "DensitySpec":
        c0, c1, c2 = parse_affine(text)
        return cls(f"{_short(c0)} + {_short(c1)}*x1 + {_short(c2)}*x2", (c0, c1, c2), "monomial")


def _short(x: float) -> str:
    return format(x, "g")


def parse_affine(text: str) -> tuple[float, float, float]:
    """Coefficients (c0, c1, c2) of an affine expression in x1 and x2.

    Accepts +, -, * and / with numeric literals, e.g. ``"3 + x1 + 2*x2"``.
    """
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse density {text!r}") from exc

    def visit(node):
        if isinstance(node, ast.Expression):
            return visit(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return np.array([float(node.value), 0.0, 0.0])
        if isinstance(node, ast.Name) and node.id in ("x1", "x2"):
            return np.array([0.0, 1.0, 0.0]) if node.id == "x1" else np.array([0.0, 0.0, 1.0])
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
            value = visit(node.operand)
            return -value if isinstance(node.op, ast.USub) else value
        if isinstance(node, ast.BinOp):
            left, right = visit(node.left), visit(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                if left[1:].any() and right[1:].any():
                    raise ValueError(f"density {text!r} is not affine")
                return left * right[0] if not right[1:].any() else right * left[0]
            if isinstance(node.op, ast.Div):
                if right[1:].any() or right[0] == 0:
                    raise ValueError(f"density {text!r}: division by a non-constant or zero")
                return left / right[0]
        raise ValueError(f"unsupported term in density {text!r}")

    c0, c1, c2 = (float(x) for x in visit(tree))
    return c0, c1, c2


@dataclass
class EnergyReport:
    method: str
    ellipse: tuple[float, float]
    density: DensitySpec
    parameters: dict
    value: float
    reference: float | None = None
    relative_error: float | None = field(default=None)

    def __post_init__(self):
        if self.reference is not None and self.relative_error is None:
            self.relative_error = abs(self.value - self.reference) / abs(self.reference)

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "ellipse": {"a": self.ellipse[0], "b": self.ellipse[1]},
            "density": {
                "description": self.density.description,
                "coefficients": list(self.density.coefficients),
                "convention": self.density.convention,
            },
            "parameters": dict(self.parameters),
            "value": self.value,
            "reference": self.reference,
            "relative_error": self.relative_error,
        }


class Calculator:
    """Evaluates (method, ellipse, density) cells, reusing assembled BEM matrices."""

    def __init__(self, N=spectral.DEFAULT_N, level=4, q=bem.DEFAULT_Q, q_sing=bem.DEFAULT_Q_SING,
                 workers=None):
        self.N, self.level, self.q, self.q_sing, self.workers = N, level, q, q_sing, workers
        self._matrices = {}

    def parameters(self, method: str) -> dict:
        if method == "spectral":
            return {"N": self.N}
        if method == "bem":
            return {"level": self.level, "q": self.q, "q_sing": self.q_sing}
        return {}

    def matrix(self, e: Ellipse, level=None):
        level = self.level if level is None else level
        key = (e.a, e.b, level, self.q, self.q_sing)
        if key not in self._matrices:
            self._matrices.clear()
            mesh = generate(e, level)
            self._matrices[key] = (mesh, bem.assemble(mesh, self.q, self.q_sing, workers=self.workers))
        return self._matrices[key]

    def value(self, method: str, e: Ellipse, spec: DensitySpec, level=None, N=None) -> float:
        d = spec.affine(e)
        if method == "analytic":
            return analytic.theorem1_energy(e, d).total
        if method == "spectral":
            return spectral.spectral_energy(e, d, self.N if N is None else N)
        if method == "bem":
            mesh, matrix = self.matrix(e, level)
            return bem.bem_energy(mesh, d, matrix)
        if method == "oracle":
            return oracle_energy(e, d)
        raise ValueError(f"unknown method {method!r}")

    def report(self, method: str, e: Ellipse, spec: DensitySpec) -> EnergyReport:
        value = self.value(method, e, spec)
        reference = None if method == "analytic" else analytic.theorem1_energy(e, spec.affine(e)).total
        if reference == 0.0:
            reference = None
        return EnergyReport(method, (e.a, e.b), spec, self.parameters(method), value, reference)


def oracle_energy(e: Ellipse, d: AffineDensity) -> float:
    """Circle-only reference built from the independent oracle routines.

    Cross terms vanish by symmetry; the x2 term equals the x1 term by a
    quarter turn, and x1/R on a disc of radius R scales as R^3.
    """
    if e.a != e.b:
        raise ValueError("the oracle route only covers circular discs (a == b)")
    radius = e.a
    total = 0.0
    if d.alpha0:
        total += d.alpha0 ** 2 * oracle.i_sigma0_circle_quadrature(radius).value
    if d.alpha1 or d.alpha2:
        total += (d.alpha1 ** 2 + d.alpha2 ** 2) * radius ** 3 * oracle.i_c_semianalytic().value
    return total


# ---------------------------------------------------------------------------
# formatting

def fmt_float(x, rounded: bool = False) -> str:
    if x is None:
        return ""
    if rounded:
        return fmt_fixed(x, 4, "half-even")
    return format(float(x), ".17g")


def fmt_fixed(x: float, decimals: int = 4, rounding: str = "truncate") -> str:
    quantum = Decimal(1).scaleb(-decimals)
    return str(Decimal(float(x)).quantize(quantum, rounding=ROUNDING[rounding]))


CSV_FIELDS = ["method", "a", "b", "density", "convention", "c0", "c1", "c2",
              "N", "level", "q", "q_sing", "value", "reference", "relative_error"]


def reports_to_csv(reports, rounded: bool = False) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in reports:
        p = r.parameters
        writer.writerow([
            r.method, fmt_float(r.ellipse[0]), fmt_float(r.ellipse[1]), r.density.description,
            r.density.convention, *(fmt_float(c) for c in r.density.coefficients),
            p.get("N", ""), p.get("level", ""), p.get("q", ""), p.get("q_sing", ""),
            fmt_float(r.value, rounded), fmt_float(r.reference, rounded), fmt_float(r.relative_error),
        ])
    return out.getvalue()


def reports_to_jsonl(reports) -> str:
    return "".join(json.dumps(r.as_dict()) + "\n" for r in reports)


def reports_to_text(reports, rounded: bool = False) -> str:
    rows = [("method", "a", "b", "density", "value", "reference", "rel.error")]
    for r in reports:
        value = fmt_fixed(r.value, 4, "half-even") if rounded else format(r.value, ".10g")
        ref = "" if r.reference is None else (fmt_fixed(r.reference, 4, "half-even") if rounded
                                               else format(r.reference, ".10g"))
        err = "" if r.relative_error is None else format(r.relative_error, ".3e")
        rows.append((r.method, format(r.ellipse[0], "g"), format(r.ellipse[1], "g"),
                     f"{r.density.description} [{r.density.convention}]", value, ref, err))
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    return "".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() + "\n" for row in rows)


# ---------------------------------------------------------------------------
# tables

B_TABLES = 0.5
TABLE1_A = (0.5, 0.7, 0.9, 1.1, 1.3, 1.5)
TABLE2_A = (0.75, 0.9, 1.05, 1.2, 1.35, 1.5)
TABLE2_DENSITY = DensitySpec("3 + 1*x1 + 2*x2", (3.0, 1.0, 2.0), "monomial")
# (label, density, printed scale exponent): the printed number is value * 10**exponent
TABLE1_ROWS = (
    ("I_sigma0", DensitySpec.named("one"), 0),
    ("I_sigma1", DensitySpec.named("x1"), 1),
    ("I_sigma2", DensitySpec.named("x2"), 2),
)


def table3_grid(step: float = 0.05) -> list[float]:
    count = int(round(1.0 / step))
    return [round(0.5 + k * step, 10) for k in range(count + 1)]


@dataclass
class TableCell:
    table: str
    quantity: str
    a: float
    exact: float
    computed: float | None
    scale: int = 0

    @property
    def relative_error(self):
        if self.computed is None:
            return None
        return abs(self.computed - self.exact) / abs(self.exact)


def build_tables(calc: Calculator | None = None, exact_only: bool = False, step: float = 0.05):
    """Cells of the three tables.  ``exact_only`` skips every BEM evaluation."""
    calc = calc or Calculator(level=5)

    def cell(table, label, spec, a, scale):
        e = Ellipse(a, B_TABLES)
        exact = calc.value("analytic", e, spec)
        computed = None if exact_only else calc.value("bem", e, spec)
        return TableCell(table, label, a, exact, computed, scale)

    table1 = [cell("1", label, spec, a, scale) for label, spec, scale in TABLE1_ROWS for a in TABLE1_A]
    table2 = [cell("2", "I_sigma", TABLE2_DENSITY, a, 0) for a in TABLE2_A]
    table3 = []
    if not exact_only:
        columns = [(label, spec) for label, spec, _ in TABLE1_ROWS] + [("I_sigma", TABLE2_DENSITY)]
        cells = {label: [] for label, _ in columns}
        for a in table3_grid(step):
            for label, spec in columns:
                cells[label].append(cell("3", label, spec, a, 0))
        for label, _ in columns:
            worst = max(cells[label], key=lambda c: c.relative_error)
            table3.append(worst)
    return table1, table2, table3


def tables_to_csv(table1, table2, table3) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["table", "quantity", "a", "b", "scale_exponent", "exact", "computed", "relative_error"])
    for c in list(table1) + list(table2) + list(table3):
        writer.writerow([c.table, c.quantity, fmt_float(c.a), fmt_float(B_TABLES), c.scale,
                         fmt_float(c.exact), fmt_float(c.computed), fmt_float(c.relative_error)])
    return out.getvalue()


def _scaled(value: float, exponent: int, rounding: str) -> str:
    return fmt_fixed(Decimal(float(value)).scaleb(exponent), 4, rounding)


def exact_row(cells, rounding: str = "truncate") -> list[str]:
    """Printed digits of the exact values (4 decimals after applying the column scale)."""
    return [_scaled(c.exact, c.scale, rounding) for c in cells]


def render_tables(table1, table2, table3, rounding: str = "truncate") -> str:
    lines = []

    def block(title, header, rows):
        width = max(len(r[0]) for r in rows + [header])
        lines.append(title)
        lines.append("  ".join([header[0].ljust(width)] + [h.rjust(7) for h in header[1:]]))
        for r in rows:
            lines.append("  ".join([r[0].ljust(width)] + [v.rjust(7) for v in r[1:]]))
        lines.append("")

    rows = []
    for label, _, scale in TABLE1_ROWS:
        cells = [c for c in table1 if c.quantity == label]
        suffix = f" x10^-{scale}" if scale else ""
        if all(c.computed is not None for c in cells):
            rows.append([f"{label} comp{suffix}"] + [_scaled(c.computed, scale, rounding) for c in cells])
        rows.append([f"{label} exact{suffix}"] + exact_row(cells, rounding))
    block(f"Table 1: b = {B_TABLES:g}, densities 1, x1, x2", ["a"] + [format(a, "g") for a in TABLE1_A], rows)

    rows = []
    if all(c.computed is not None for c in table2):
        rows.append(["I_sigma comp"] + [_scaled(c.computed, 0, rounding) for c in table2])
    rows.append(["I_sigma exact"] + exact_row(table2, rounding))
    block(f"Table 2: sigma = x1 + 2 x2 + 3, b = {B_TABLES:g}", ["a"] + [format(a, "g") for a in TABLE2_A], rows)

    if table3:
        lines.append(f"Table 3: max relative error (per mil), b = {B_TABLES:g}")
        for c in table3:
            lines.append(f"{c.quantity:<10s} {1000 * c.relative_error:.3f}  (worst at a = {c.a:g})")
        lines.append("")
    return "\n".join(lines)
