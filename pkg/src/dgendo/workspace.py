"""Workspace files: a YAML document holding named algebras, modules, complexes,
maps, dg algebra dumps and stored reports.

Grammar (all keys lower case)::

    format: dgendo-workspace/1
    field: Q                      # or Fp:<p>; default for every object
    objects:
      - name: A
        kind: algebra
        quiver:
          vertices: ["1"]
          arrows: [[x, 0, 0], [y, 0, 0]]       # name, source index, target index
          relations: [{"x x": 1, "y y": -1}, {"x y": 1}]   # arrow words -> coefficient
          cap: 6
      - name: B
        kind: algebra
        structure: {labels: [...], mult: {label: matrix}, unit: [...]}
      - name: M
        kind: module
        algebra: A
        # exactly one of
        regular: true
        projective: 0             # vertex index
        simple: 0
        quotient: ["x x"]          # A / (elements) A; words or coordinate lists
        sum: [M1, M2]
        generators: {x: matrix, y: matrix}   # quiver algebras only
        action: {label: matrix}             # one matrix per basis element
      - name: Y
        kind: bimodule
        left: A
        right: A
        lam: {label: matrix}
        rho: {label: matrix}
      - name: T
        kind: complex
        algebra: A
        lo: -1
        terms: [M, {inline module}]
        diffs: [matrix]
      - name: Yc
        kind: bimodule_complex
        left: A
        right: A
        lo: -1
        terms: [Y1, Y2]
        diffs: [matrix]
      - name: f
        kind: map
        source: T
        target: {inline complex}
        degree: 0
        comps: {-1: matrix, 0: matrix}
      - name: L
        kind: dg_algebra
        field: Q
        lo: -1
        dims: [...]
        diffs: [matrix]
        mu: {"p,q": matrix}
        unit: [...]
        validity: [a, b]          # optional
      - name: r
        kind: report
        data: {...}

A matrix is ``{shape: [m, n], rows: ["1 0 -1/2", ...]}``; rationals are
written ``p/q`` and prime field elements as integers in ``[0, p)``.  A
vector is a single row string.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
import yaml

from .algebra import (
    AlgebraError,
    FDAlgebra,
    FDBimodule,
    FDModule,
    QuiverPresentation,
    build_algebra_from_quiver,
    build_algebra_from_structure_constants,
    cyclic_quotient,
    direct_sum_modules,
    module_from_generators,
    quiver_path_vector,
    regular_module,
    vertex_projective,
    vertex_simple,
)
from .complexes import BimoduleComplex, BoundedComplex, ComplexError, GradedMap
from .dg import DGAlgebra, DGError, validate
from .linalg import QQ, FieldError, FieldSpec

FORMAT = "dgendo-workspace/1"
KINDS = ("algebra", "module", "bimodule", "complex", "bimodule_complex", "map", "dg_algebra", "report")


class ParseError(ValueError):
    def __init__(self, line: int | None, message: str):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line is not None else message)


class InvariantError(ValueError):
    def __init__(self, obj: str, detail: str):
        self.object = obj
        self.detail = detail
        super().__init__(f"{obj}: {detail}")


class _Map(dict):
    line: int | None = None


class _Loader(yaml.SafeLoader):
    pass


def _construct_mapping(loader, node):
    m = _Map(loader.construct_mapping(node, deep=True))
    m.line = node.start_mark.line + 1
    return m


_Loader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)


def _line(node) -> int | None:
    return getattr(node, "line", None)


# ---------------------------------------------------------------- scalars and matrices


def format_matrix(F: FieldSpec, m: np.ndarray) -> dict:
    return {"shape": [int(m.shape[0]), int(m.shape[1])],
            "rows": [" ".join(F.fmt(x) for x in row) for row in m]}


def format_vector(F: FieldSpec, v) -> str:
    return " ".join(F.fmt(x) for x in v)


def parse_vector(F: FieldSpec, text, where=None) -> np.ndarray:
    items = text.split() if isinstance(text, str) else list(text)
    try:
        return F.vector([str(x) for x in items]) if items else F.zeros(1, 0)[0]
    except (ValueError, ZeroDivisionError, FieldError) as e:
        raise ParseError(_line(where), f"bad scalar in {text!r}: {e}") from None


def parse_matrix(F: FieldSpec, node, where=None) -> np.ndarray:
    line = _line(node) or _line(where)
    if isinstance(node, list):
        rows = [parse_vector(F, r, where) for r in node]
        if not rows:
            raise ParseError(line, "a list-form matrix needs at least one row; use {shape, rows}")
        if len({len(r) for r in rows}) > 1:
            raise ParseError(line, "ragged matrix rows")
        return np.stack(rows)
    if not isinstance(node, dict) or "shape" not in node:
        raise ParseError(line, "matrix must be {shape: [m, n], rows: [...]}")
    m, n = (int(x) for x in node["shape"])
    rows = node.get("rows", []) or []
    if len(rows) != m:
        raise ParseError(line, f"matrix declares {m} rows but lists {len(rows)}")
    out = F.zeros(m, n)
    for i, r in enumerate(rows):
        v = parse_vector(F, r, node)
        if len(v) != n:
            raise ParseError(line, f"row {i} has {len(v)} entries, expected {n}")
        out[i] = v
    return out


# ---------------------------------------------------------------- workspace


@dataclass
class Entry:
    name: str
    kind: str
    obj: object


@dataclass
class Workspace:
    field: FieldSpec = QQ
    entries: dict = dc_field(default_factory=dict)  # name -> Entry, in insertion order

    def __contains__(self, name):
        return name in self.entries

    def __getitem__(self, name):
        return self.entries[name].obj

    def names(self, kind: str | None = None) -> list:
        return [n for n, e in self.entries.items() if kind is None or e.kind == kind]

    def get(self, name: str, kind: str | tuple | None = None):
        e = self.entries.get(name)
        if e is None:
            raise KeyError(f"no object named {name!r}")
        kinds = (kind,) if isinstance(kind, str) else kind
        if kinds and e.kind not in kinds:
            raise KeyError(f"{name!r} is a {e.kind}, expected {' or '.join(kinds)}")
        return e.obj

    def add(self, name: str, obj, kind: str | None = None) -> None:
        if name in self.entries:
            raise InvariantError(name, "duplicate name")
        kind = kind or _kind_of(obj)
        self.entries[name] = Entry(name, kind, obj)

    def name_of(self, obj) -> str | None:
        for n, e in self.entries.items():
            if e.obj is obj:
                return n
        return None


def _kind_of(obj) -> str:
    for cls, k in ((FDAlgebra, "algebra"), (FDModule, "module"), (FDBimodule, "bimodule"),
                   (BoundedComplex, "complex"), (BimoduleComplex, "bimodule_complex"),
                   (GradedMap, "map"), (DGAlgebra, "dg_algebra"), (dict, "report")):
        if isinstance(obj, cls):
            return k
    raise TypeError(f"cannot store {type(obj).__name__} in a workspace")


# ---------------------------------------------------------------- parsing


def load_workspace(path) -> Workspace:
    with open(path, encoding="utf-8") as fh:
        return parse_workspace(fh.read())


def parse_workspace(text: str) -> Workspace:
    try:
        doc = yaml.load(text, Loader=_Loader)
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark or e.context_mark
        raise ParseError(mark.line + 1 if mark else None, str(e.problem or e)) from None
    except yaml.YAMLError as e:
        raise ParseError(None, str(e)) from None
    if doc is None:
        return Workspace()
    if not isinstance(doc, dict):
        raise ParseError(1, "top level must be a mapping")
    fmt = doc.get("format", FORMAT)
    if fmt != FORMAT:
        raise ParseError(_line(doc), f"unsupported format {fmt!r}")
    try:
        F = FieldSpec.parse(doc.get("field", "Q"))
    except FieldError as e:
        raise ParseError(_line(doc), str(e)) from None
    ws = Workspace(F)
    objs = doc.get("objects") or []
    if not isinstance(objs, list):
        raise ParseError(_line(doc), "objects must be a list")
    for node in objs:
        if not isinstance(node, dict):
            raise ParseError(_line(doc), "each object must be a mapping")
        name, kind = node.get("name"), node.get("kind")
        if not isinstance(name, str) or not name:
            raise ParseError(_line(node), "object without a name")
        if kind not in KINDS:
            raise ParseError(_line(node), f"{name}: unknown kind {kind!r}")
        if name in ws:
            raise ParseError(_line(node), f"duplicate name {name!r}")
        obj = _build(ws, kind, node, name)
        ws.add(name, obj, kind)
    return ws


def _ref(ws: Workspace, node, key, kind, parent):
    val = node.get(key)
    if val is None:
        raise ParseError(_line(parent), f"missing {key!r}")
    return _resolve(ws, val, kind, parent)


def _resolve(ws: Workspace, val, kind, parent):
    """A named reference or an inline definition."""
    if isinstance(val, dict):
        return _build(ws, kind, val, val.get("name", ""))
    try:
        return ws.get(str(val), kind)
    except KeyError as e:
        raise ParseError(_line(parent), str(e.args[0])) from None


def _field_for(ws, node):
    if "field" in node:
        try:
            return FieldSpec.parse(node["field"])
        except FieldError as e:
            raise ParseError(_line(node), str(e)) from None
    return ws.field


def _invariant(name, fn):
    try:
        return fn()
    except (AlgebraError, ComplexError, DGError, FieldError) as e:
        raise InvariantError(name, str(e)) from None


def _word(pres: QuiverPresentation, word: str, node) -> tuple:
    out = []
    for tok in str(word).replace("*", " ").split():
        try:
            out.append(pres.arrow_index(tok))
        except KeyError:
            raise ParseError(_line(node), f"unknown arrow {tok!r}") from None
    return tuple(out)


def _element(A: FDAlgebra, val, node) -> np.ndarray:
    F = A.field
    if isinstance(val, str) and A.presentation is not None and not _looks_numeric(val):
        if val in A.labels:
            return A.basis_vector(A.labels.index(val))
        return quiver_path_vector(A, _word(A.presentation, val, node))
    v = parse_vector(F, val, node)
    if len(v) != A.dim:
        raise ParseError(_line(node), f"element has {len(v)} coordinates, algebra has dim {A.dim}")
    return v


def _looks_numeric(s: str) -> bool:
    return all(c in "0123456789-/ " for c in s)


def _build(ws: Workspace, kind: str, node: dict, name: str):
    builder = {"algebra": _build_algebra, "module": _build_module, "bimodule": _build_bimodule,
               "complex": _build_complex, "bimodule_complex": _build_bimodule_complex,
               "map": _build_map, "dg_algebra": _build_dg, "report": _build_report}[kind]
    try:
        return builder(ws, node, name)
    except (ParseError, InvariantError):
        raise
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, (AlgebraError, ComplexError, DGError)):
            raise InvariantError(name, str(e)) from None
        raise ParseError(_line(node), f"{name}: {e}") from None


def _build_algebra(ws, node, name):
    F = _field_for(ws, node)
    if "quiver" in node:
        q = node["quiver"]
        verts = [str(v) for v in q["vertices"]]
        arrows = [(str(a[0]), int(a[1]), int(a[2])) for a in q.get("arrows", [])]
        pres = QuiverPresentation(verts, arrows, [], int(q.get("cap", 8)), F)
        pres.relations = [{_word(pres, w, q): c for w, c in rel.items()} for rel in q.get("relations", [])]
        return _invariant(name, lambda: build_algebra_from_quiver(pres, name))
    if "structure" in node:
        s = node["structure"]
        labels = [str(x) for x in s["labels"]]
        mult = np.stack([parse_matrix(F, s["mult"][lab], s) for lab in labels]) if labels else None
        unit = parse_vector(F, s["unit"], s)
        return _invariant(name, lambda: build_algebra_from_structure_constants(F, labels, mult, unit, name))
    raise ParseError(_line(node), f"{name}: algebra needs 'quiver' or 'structure'")


def _action_from_labels(A: FDAlgebra, node, key, dim, where):
    F = A.field
    acts = node[key]
    missing = [lab for lab in A.labels if lab not in acts]
    if missing:
        raise ParseError(_line(where), f"{key} lacks matrices for {missing}")
    out = F.zeros(A.dim * dim, dim).reshape(A.dim, dim, dim)
    for i, lab in enumerate(A.labels):
        m = parse_matrix(F, acts[lab], where)
        if m.shape != (dim, dim):
            raise ParseError(_line(where), f"{key}[{lab}] has shape {m.shape}, expected {(dim, dim)}")
        out[i] = m
    return out


def _build_module(ws, node, name):
    A = _ref(ws, node, "algebra", "algebra", node)
    forms = [k for k in ("regular", "projective", "simple", "quotient", "sum", "generators", "action") if k in node]
    if len(forms) != 1:
        raise ParseError(_line(node), f"{name}: module needs exactly one of regular/projective/simple/quotient/sum/generators/action")
    form = forms[0]
    if form == "regular":
        M = regular_module(A)
    elif form in ("projective", "simple"):
        v = int(node[form])
        M = (vertex_projective if form == "projective" else vertex_simple)(A, v)
    elif form == "quotient":
        M = _invariant(name, lambda: cyclic_quotient(A, [_element(A, e, node) for e in node["quotient"]], name))
    elif form == "sum":
        M = direct_sum_modules([_resolve(ws, p, "module", node) for p in node["sum"]], name)
    elif form == "generators":
        dim = int(node["dim"])
        gens = {k: parse_matrix(A.field, m, node) for k, m in node["generators"].items()}
        M = _invariant(name, lambda: module_from_generators(A, dim, gens, name, check=False))
    else:
        dim = int(node["dim"])
        M = FDModule(A, _action_from_labels(A, node, "action", dim, node), name)
    if "name" in node:
        M.name = name
    _invariant(name or "<inline module>", M.check)
    return M


def _build_bimodule(ws, node, name):
    L = _ref(ws, node, "left", "algebra", node)
    R = _ref(ws, node, "right", "algebra", node)
    dim = int(node["dim"])
    B = FDBimodule(L, R, _action_from_labels(L, node, "lam", dim, node),
                   _action_from_labels(R, node, "rho", dim, node), name)
    _invariant(name, B.check)
    return B


def _diffs(F, node, count, where):
    ds = node.get("diffs", []) or []
    if len(ds) != max(count - 1, 0):
        raise ParseError(_line(where), f"{count} terms need {max(count - 1, 0)} differentials, got {len(ds)}")
    return [parse_matrix(F, d, where) for d in ds]


def _build_complex(ws, node, name):
    A = _ref(ws, node, "algebra", "algebra", node)
    terms = [_resolve(ws, t, "module", node) for t in node.get("terms", [])]
    for t in terms:
        if t.algebra is not A:
            raise InvariantError(name, f"term {t.name} is over a different algebra")
    diffs = _diffs(A.field, node, len(terms), node)
    X = BoundedComplex(A, int(node.get("lo", 0)), terms, diffs, name)
    _invariant(name, X.check)
    return X


def _build_bimodule_complex(ws, node, name):
    L = _ref(ws, node, "left", "algebra", node)
    R = _ref(ws, node, "right", "algebra", node)
    terms = [_resolve(ws, t, "bimodule", node) for t in node.get("terms", [])]
    Y = BimoduleComplex(L, R, int(node.get("lo", 0)), terms, _diffs(R.field, node, len(terms), node), name)
    _invariant(name, Y.check)
    return Y


def _build_map(ws, node, name):
    X = _ref(ws, node, "source", "complex", node)
    Y = _ref(ws, node, "target", "complex", node)
    F = X.field
    comps = {int(k): parse_matrix(F, m, node) for k, m in (node.get("comps") or {}).items()}
    f = GradedMap(X, Y, int(node.get("degree", 0)), comps)
    _invariant(name, f.check)
    return f


def _build_dg(ws, node, name):
    F = _field_for(ws, node)
    lo = int(node["lo"])
    dims = [int(d) for d in node["dims"]]
    diffs = [parse_matrix(F, d, node) for d in node.get("diffs", [])]
    if len(diffs) != max(len(dims) - 1, 0):
        raise ParseError(_line(node), f"{name}: wrong number of differentials")
    mu = {}
    for k, m in (node.get("mu") or {}).items():
        p, q = (int(x) for x in str(k).split(","))
        mu[(p, q)] = parse_matrix(F, m, node)
    validity = tuple(int(x) for x in node["validity"]) if node.get("validity") is not None else None
    L = DGAlgebra(F, lo, dims, diffs, mu, parse_vector(F, node["unit"], node), validity, name)
    for rep in validate(L):
        if not rep.passed:
            raise InvariantError(name, f"{rep.name} fails: {rep.witness}")
    return L


def _build_report(ws, node, name):
    return _plain(node.get("data", {}))


def _plain(x):
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_plain(v) for v in x]
    return x


# ---------------------------------------------------------------- serializing


def workspace_data(ws: Workspace) -> dict:
    out, named = [], {}
    for n, e in ws.entries.items():
        out.append(_dump(ws, e.kind, e.obj, n, named))
        named[id(e.obj)] = n
    return {"format": FORMAT, "field": str(ws.field), "objects": out}


def serialize_workspace(ws: Workspace) -> str:
    return yaml.safe_dump(workspace_data(ws), sort_keys=False, default_flow_style=None, width=100)


def save_workspace(ws: Workspace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_workspace(ws))


def _refer(ws, obj, kind, named):
    n = named.get(id(obj))
    if n is not None:
        return n
    spec = _dump(ws, kind, obj, None, named)
    spec.pop("kind", None)
    return spec


def _dump(ws, kind, obj, name, named) -> dict:
    d = {"name": name} if name else ({"name": obj.name} if getattr(obj, "name", "") else {})
    d["kind"] = kind
    if kind == "algebra":
        F = obj.field
        if F != ws.field:
            d["field"] = str(F)
        if obj.presentation is not None:
            p = obj.presentation
            d["quiver"] = {"vertices": [str(v) for v in p.vertices],
                           "arrows": [[a, s, t] for a, s, t in p.arrows],
                           "relations": [{" ".join(p.arrows[i][0] for i in w): _scalar(F, c) for w, c in rel.items()}
                                         for rel in p.relations],
                           "cap": p.nilpotency_cap}
        else:
            d["structure"] = {"labels": list(obj.labels),
                              "mult": {lab: format_matrix(F, obj.mult[i]) for i, lab in enumerate(obj.labels)},
                              "unit": format_vector(F, obj.unit)}
    elif kind == "module":
        A = obj.algebra
        d["algebra"] = _refer(ws, A, "algebra", named)
        if obj.dim == A.dim and A.field.equal(obj.action.reshape(A.dim, -1), A.right_mats().reshape(A.dim, -1)):
            d["regular"] = True
            return d
        d["dim"] = obj.dim
        d["action"] = {lab: format_matrix(A.field, obj.action[i]) for i, lab in enumerate(A.labels)}
    elif kind == "bimodule":
        F = obj.field
        d["left"] = _refer(ws, obj.left, "algebra", named)
        d["right"] = _refer(ws, obj.right, "algebra", named)
        d["dim"] = obj.dim
        d["lam"] = {lab: format_matrix(F, obj.lam[i]) for i, lab in enumerate(obj.left.labels)}
        d["rho"] = {lab: format_matrix(F, obj.rho[i]) for i, lab in enumerate(obj.right.labels)}
    elif kind == "complex":
        d["algebra"] = _refer(ws, obj.algebra, "algebra", named)
        d["lo"] = obj.lo
        d["terms"] = [_refer(ws, t, "module", named) for t in obj.terms]
        d["diffs"] = [format_matrix(obj.field, m) for m in obj.diffs]
    elif kind == "bimodule_complex":
        d["left"] = _refer(ws, obj.left, "algebra", named)
        d["right"] = _refer(ws, obj.right, "algebra", named)
        d["lo"] = obj.lo
        d["terms"] = [_refer(ws, t, "bimodule", named) for t in obj.terms]
        d["diffs"] = [format_matrix(obj.field, m) for m in obj.diffs]
    elif kind == "map":
        d["source"] = _refer(ws, obj.source, "complex", named)
        d["target"] = _refer(ws, obj.target, "complex", named)
        d["degree"] = obj.degree
        d["comps"] = {int(i): format_matrix(obj.field, c) for i, c in sorted(obj.comps.items())}
    elif kind == "dg_algebra":
        F = obj.field
        d["field"] = str(F)
        d["lo"] = obj.lo
        d["dims"] = list(obj.dims)
        d["diffs"] = [format_matrix(F, m) for m in obj.diffs]
        d["mu"] = {f"{p},{q}": format_matrix(F, m) for (p, q), m in sorted(obj.mu.items())}
        d["unit"] = format_vector(F, obj.unit)
        if obj.validity is not None:
            d["validity"] = [int(obj.validity[0]), int(obj.validity[1])]
    elif kind == "report":
        d["data"] = obj
    return d


def _scalar(F, c):
    s = F.fmt(F.elem(c))
    return int(s) if "/" not in s else s
