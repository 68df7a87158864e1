"""Loading and validating JSON spec documents.

Every document is a JSON object with a ``kind`` key. See the README for the
full schema with one example per kind.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .distribution import Distribution, VectorField
from .errors import SpecError
from .foliation import Curve, DeformationFamily, GroupRepresentation, MaurerCartanForm
from .koszul import InvariantMetric
from .liealg import LieAlgebra
from .metric import Chart, MetricTensor, build_walker3, build_walker4, build_walker_general
from .symexpr import Var, const_value, differentiate, free_variables, is_const, parse, simplify, to_rat

KINDS = ("walker3", "walker4", "walker_general", "lie_group", "deformation")
WALKER_KINDS = ("walker3", "walker4", "walker_general")
PARAMETER = "t"

_BRACKET = re.compile(r"^\s*\[\s*(\w+)\s*,\s*(\w+)\s*\]\s*=\s*(.+?)\s*$")


@dataclass
class SpecDocument:
    kind: str
    data: dict
    seed: int | None = None
    tolerances: dict = field(default_factory=dict)

    def require(self, key: str):
        if key not in self.data:
            raise SpecError(f"{self.kind} spec needs the field {key!r}")
        return self.data[key]


def load(source) -> SpecDocument:
    """Parse a path, JSON text or an already-decoded dict."""
    if isinstance(source, dict):
        data = source
    else:
        text = Path(source).read_text() if not str(source).lstrip().startswith("{") else str(source)
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise SpecError("spec must be a JSON object")
    kind = data.get("kind")
    if kind not in KINDS:
        raise SpecError(f"kind must be one of {', '.join(KINDS)}; got {kind!r}")
    seed = data.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise SpecError("seed must be an integer")
    tolerances = data.get("tolerances", {})
    if not isinstance(tolerances, dict) or not all(
            isinstance(v, (int, float)) and v > 0 for v in tolerances.values()):
        raise SpecError("tolerances must map names to positive numbers")
    return SpecDocument(kind, data, seed, dict(tolerances))


def _text(value, what: str) -> str:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return repr(value) if isinstance(value, int) else str(Fraction(str(value)))
    if not isinstance(value, str):
        raise SpecError(f"{what} must be an expression string")
    return value


# Walker metrics -------------------------------------------------------------

def chart_for(doc: SpecDocument, n: int) -> Chart:
    names = doc.data.get("coordinates")
    if names is None:
        return Chart.standard(n)
    if not isinstance(names, list) or len(names) != n or not all(isinstance(x, str) for x in names):
        raise SpecError(f"coordinates must list {n} names")
    return Chart(tuple(names))


def _block(value, what: str) -> list[list[str]]:
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise SpecError(f"{what} must be a list of rows")
    return [[_text(x, f"{what} entry") for x in row] for row in value]


def build_metric(doc: SpecDocument) -> MetricTensor:
    d = doc.data
    if doc.kind == "walker3":
        eps = d.get("epsilon", 1)
        return build_walker3(_text(doc.require("f"), "f"), eps, chart_for(doc, 3))
    if doc.kind == "walker4":
        a, b, c = (_text(d.get(k, "0"), k) for k in "abc")
        return build_walker4(a, b, c, chart_for(doc, 4))
    if doc.kind == "walker_general":
        r = doc.require("rank")
        if not isinstance(r, int) or r < 1:
            raise SpecError("rank must be a positive integer")
        h = _block(d.get("h", []), "h")
        n = 2 * r + len(h)
        if "dimension" in d and d["dimension"] != n:
            raise SpecError(f"dimension {d['dimension']} does not match rank {r} and an "
                            f"{len(h)}x{len(h)} h block")
        a = _block(d.get("a", [[]] * r if not h else [["0"] * len(h)] * r), "a")
        b = _block(doc.require("b"), "b")
        return build_walker_general(r, h, a, b, chart_for(doc, n))
    raise SpecError(f"kind {doc.kind} does not describe a coordinate metric")


def _fields(chart: Chart, rows, what: str) -> list[VectorField]:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise SpecError(f"{what} must be a list of component lists")
    out = []
    for row in rows:
        if len(row) != chart.n:
            raise SpecError(f"each {what} field needs {chart.n} components")
        out.append(VectorField(chart, [_text(x, f"{what} component") for x in row]))
    return out


def distribution_for(doc: SpecDocument, g: MetricTensor, rng=None) -> Distribution:
    """The declared distribution, or the canonical coordinate one."""
    rows = doc.data.get("distribution")
    if rows is None:
        return Distribution.coordinate(g.chart, g.spec.distribution_indices,
                                       walker_candidate=True, rng=rng)
    return Distribution(g.chart, _fields(g.chart, rows, "distribution"), walker_candidate=True, rng=rng)


def complement_for(doc: SpecDocument, D: Distribution) -> list[VectorField] | None:
    rows = doc.data.get("complement")
    if rows is not None:
        return _fields(D.chart, rows, "complement")
    idx = D.coordinate_indices
    if idx is None:
        return None
    return [VectorField.coordinate(D.chart, i) for i in range(D.chart.n) if i not in idx]


# Lie algebras -----------------------------------------------------------------

def _labels(d: dict, dim: int) -> list[str]:
    labels = d.get("labels") or [f"e{i + 1}" for i in range(dim)]
    if len(labels) != dim or len(set(labels)) != dim or not all(isinstance(x, str) for x in labels):
        raise SpecError(f"labels must be {dim} distinct names")
    return labels


def _dimension(doc: SpecDocument) -> int:
    dim = doc.require("dimension")
    if not isinstance(dim, int) or dim < 1:
        raise SpecError("dimension must be a positive integer")
    return dim


def parse_brackets(lines, labels: list[str], parameters: tuple[str, ...] = ()) -> dict:
    """``["[1,2] = t*e1 + (1-t)*e3", ...]`` to ``{(1, 2): {1: t, 3: 1 - t}}``.

    Indices in the brackets are 1-based numbers or labels; the right-hand
    side must be linear in the basis names ``e1..er`` (or the labels).
    Coefficients stay expressions in ``parameters``.
    """
    dim = len(labels)
    generic = [f"e{i + 1}" for i in range(dim)]
    index = {name: k for k, name in enumerate(generic)}
    index.update({name: k for k, name in enumerate(labels)})
    names = list(dict.fromkeys(list(index) + list(parameters)))
    if not isinstance(lines, list):
        raise SpecError("brackets must be a list of strings")
    out: dict = {}
    for line in lines:
        m = _BRACKET.match(line) if isinstance(line, str) else None
        if not m:
            raise SpecError(f"cannot read bracket entry {line!r}; expected '[i,j] = ...'")
        i, j = (_basis_index(x, index, dim) for x in m.group(1, 2))
        if i == j:
            raise SpecError(f"bracket [{i},{j}] of an element with itself")
        if (i, j) in out or (j, i) in out:
            raise SpecError(f"bracket [{i},{j}] given twice")
        rhs = parse(m.group(3), names)
        coeffs: dict[int, object] = {}
        rest = rhs
        for name, k in index.items():
            if name not in free_variables(rhs):
                continue
            c = simplify(differentiate(rhs, name))
            if free_variables(c) & set(index):
                raise SpecError(f"bracket [{i},{j}] is not linear in the basis")
            rest = rest - c * Var(name)
            coeffs[k + 1] = simplify(coeffs[k + 1] + c) if k + 1 in coeffs else c
        if not to_rat(rest).is_zero():
            raise SpecError(f"bracket [{i},{j}] has a term without a basis element")
        out[(i, j)] = {k: c for k, c in coeffs.items() if not to_rat(c).is_zero()}
    return out


def _basis_index(token: str, index: dict, dim: int) -> int:
    if token.isdigit():
        k = int(token)
        if not 1 <= k <= dim:
            raise SpecError(f"bracket index {k} outside 1..{dim}")
        return k
    if token in index:
        return index[token] + 1
    raise SpecError(f"unknown basis element {token!r}")


def _constant(c) -> Fraction | float:
    if not is_const(c):
        raise SpecError(f"structure constant {c} is not a number")
    return const_value(c)


def lie_algebra(doc: SpecDocument) -> LieAlgebra:
    dim = _dimension(doc)
    labels = _labels(doc.data, dim)
    brackets = parse_brackets(doc.data.get("brackets", []), labels)
    constants = {key: {k: _constant(c) for k, c in row.items()} for key, row in brackets.items()}
    L = LieAlgebra.from_brackets(dim, constants)
    return LieAlgebra(L.c, labels)


def invariant_metric(doc: SpecDocument, L: LieAlgebra) -> InvariantMetric:
    """``metric`` is a full matrix or a list of ``[i, j, value]`` entries."""
    raw = doc.require("metric")
    if isinstance(raw, list) and raw and isinstance(raw[0], list) and len(raw[0]) == L.dim \
            and len(raw) == L.dim:
        return InvariantMetric(L, [[_number(x) for x in row] for row in raw])
    if isinstance(raw, list) and all(isinstance(e, list) and len(e) == 3 for e in raw):
        entries = {}
        for i, j, v in raw:
            if not (isinstance(i, int) and isinstance(j, int) and 1 <= i <= L.dim and 1 <= j <= L.dim):
                raise SpecError(f"metric entry indices ({i},{j}) outside 1..{L.dim}")
            entries[(i, j)] = _number(v)
        return InvariantMetric.from_entries(L, entries)
    raise SpecError("metric must be a full matrix or a list of [i, j, value] entries")


def _number(x):
    if isinstance(x, bool):
        raise SpecError("metric entries must be numbers")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError:
            raise SpecError(f"cannot read number {x!r}") from None
    raise SpecError(f"cannot read number {x!r}")


def subspaces(doc: SpecDocument, L: LieAlgebra) -> list[list]:
    """Each entry is a list of 1-based basis indices or labels, or
    ``{"vectors": [[...], ...]}``. Returned as 0-based indices or vectors."""
    out = []
    for entry in doc.data.get("subspaces", []):
        if isinstance(entry, dict):
            vecs = entry.get("vectors")
            if not isinstance(vecs, list) or any(len(v) != L.dim for v in vecs):
                raise SpecError(f"subspace vectors must have {L.dim} entries")
            out.append([[_number(x) for x in v] for v in vecs])
            continue
        if not isinstance(entry, list) or not entry:
            raise SpecError("each subspace is a non-empty list of basis indices")
        idx = []
        for x in entry:
            if isinstance(x, int) and 1 <= x <= L.dim:
                idx.append(x - 1)
            elif isinstance(x, str) and x in L.labels:
                idx.append(L.labels.index(x))
            else:
                raise SpecError(f"unknown basis element {x!r} in subspace")
        out.append(idx)
    return out


def representation(doc: SpecDocument, L: LieAlgebra) -> GroupRepresentation:
    mats = doc.data.get("representation")
    if mats is None:
        return GroupRepresentation.builtin(L)
    if not isinstance(mats, list):
        raise SpecError("representation must be a list of square matrices")
    return GroupRepresentation(L, [[[_number(x) for x in row] for row in m] for m in mats])


def maurer_cartan_form(doc: SpecDocument, L: LieAlgebra, rng=None) -> MaurerCartanForm:
    raw = doc.require("form")
    if not isinstance(raw, dict) or "components" not in raw:
        raise SpecError("form needs 'components' (and optionally 'coordinates')")
    comps = raw["components"]
    names = raw.get("coordinates") or [f"x{i + 1}" for i in range(len(comps[0]) if comps else 0)]
    chart = Chart(tuple(names))
    if not isinstance(comps, list) or any(not isinstance(r, list) or len(r) != chart.n for r in comps):
        raise SpecError(f"form components must be {L.dim} rows of {chart.n} expressions")
    rows = [[_text(x, "form component") for x in row] for row in comps]
    return MaurerCartanForm(chart, rows, L, rng)


# curves and families --------------------------------------------------------------

def curves(doc: SpecDocument, chart: Chart) -> list[Curve]:
    out = []
    for entry in doc.data.get("curves", []):
        if not isinstance(entry, dict):
            raise SpecError("each curve is an object with 'polyline' or 'param'")
        if "polyline" in entry:
            try:
                verts = [[_number(x) for x in v] for v in entry["polyline"]]
                out.append(Curve(chart, vertices=verts))
            except (TypeError, ValueError) as exc:
                raise SpecError(f"bad polyline: {exc}") from None
        elif "param" in entry:
            rng_ = entry.get("range")
            try:
                exprs = [parse(_text(x, "curve component"), [PARAMETER]) for x in entry["param"]]
                out.append(Curve(chart, expressions=exprs, range_=rng_, param=PARAMETER))
            except (TypeError, ValueError) as exc:
                raise SpecError(f"bad parametric curve: {exc}") from None
        else:
            raise SpecError("each curve needs 'polyline' or 'param'")
    return out


def deformation_family(doc: SpecDocument) -> DeformationFamily:
    dim = _dimension(doc)
    labels = _labels(doc.data, dim)
    brackets = parse_brackets(doc.require("brackets"), labels, (PARAMETER,))
    return DeformationFamily(dim, brackets, PARAMETER)


def grid(doc: SpecDocument) -> list[float]:
    """An explicit list, or ``{"start", "stop", "count"}`` for evenly spaced values."""
    raw = doc.require("grid")
    if isinstance(raw, list) and raw and all(isinstance(x, (int, float)) for x in raw):
        return [float(x) for x in raw]
    if isinstance(raw, dict) and {"start", "stop", "count"} <= set(raw):
        start, stop, count = Fraction(str(raw["start"])), Fraction(str(raw["stop"])), raw["count"]
        if not isinstance(count, int) or count < 2:
            raise SpecError("grid count must be an integer of at least 2")
        return [float(start + (stop - start) * k / (count - 1)) for k in range(count)]
    raise SpecError("grid must be a list of numbers or {start, stop, count}")


def point(text: str, chart: Chart) -> dict[str, float]:
    """``"x1=0.5,x2=1"`` to a point; every coordinate must be given."""
    values = {}
    for part in text.split(","):
        name, sep, value = part.partition("=")
        name = name.strip()
        if not sep or name not in chart.names:
            raise SpecError(f"cannot read point component {part!r}")
        try:
            values[name] = float(value)
        except ValueError:
            raise SpecError(f"cannot read value in {part!r}") from None
    missing = [n for n in chart.names if n not in values]
    if missing:
        raise SpecError(f"point is missing {', '.join(missing)}")
    return values


__all__ = [
    "KINDS", "WALKER_KINDS", "SpecDocument", "load", "build_metric", "distribution_for",
    "complement_for", "lie_algebra", "invariant_metric", "subspaces", "representation",
    "maurer_cartan_form", "curves", "deformation_family", "grid", "point", "parse_brackets",
]
