"""Finite-dimensional algebras, their right modules and bimodules.

An algebra is a basis with structure constants ``mult[i, j, k]`` meaning
``b_i b_j = sum_k mult[i, j, k] b_k``.  A right module stores one matrix per
basis element: ``m . b_i = m @ action[i]``.  Module maps are matrices of shape
``(dim source, dim target)`` and compose left to right (``f then g`` is
``F @ G``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np

from .linalg import FieldSpec, QQ, solve_linear


class AlgebraError(ValueError):
    pass


class AssociativityViolation(AlgebraError):
    pass


class UnitViolation(AlgebraError):
    pass


class NonNilpotent(AlgebraError):
    pass


class UnsupportedRadical(AlgebraError):
    pass


class AlgebraMismatch(AlgebraError):
    pass


class ModuleLawViolation(AlgebraError):
    pass


class NotLinear(AlgebraError):
    pass


# ---------------------------------------------------------------- algebras


@dataclass
class QuiverMeta:
    vertex_names: list
    arrow_names: list
    vertices: list  # basis index of each vertex idempotent
    arrows: list  # basis index of each arrow
    length: list  # path length of each basis element
    source: list  # start vertex of each basis element
    target: list


@dataclass(eq=False)
class FDAlgebra:
    field: FieldSpec
    labels: list
    mult: np.ndarray
    unit: np.ndarray
    quiver: QuiverMeta | None = None
    name: str = ""
    presentation: "QuiverPresentation | None" = None

    def __post_init__(self):
        self._right = None
        self._left = None

    @property
    def dim(self) -> int:
        return len(self.labels)

    def __repr__(self):
        return f"FDAlgebra({self.name or '?'}, dim={self.dim}, field={self.field})"

    def basis_vector(self, i: int) -> np.ndarray:
        v = self.field.zeros(1, self.dim)
        v[0, i] = self.field.one()
        return v[0]

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def right_mats(self) -> np.ndarray:
        """Right regular representation: x @ R[j] = x b_j."""
        if self._right is None:
            self._right = np.ascontiguousarray(self.mult.transpose(1, 0, 2))
        return self._right

    def left_mats(self) -> np.ndarray:
        """Left multiplication maps: x @ L[j] = b_j x."""
        if self._left is None:
            self._left = np.ascontiguousarray(self.mult)
        return self._left

    def combine(self, mats: np.ndarray, v) -> np.ndarray:
        """sum_i v_i mats[i] for a stack of square matrices."""
        F = self.field
        d, m, n = mats.shape
        flat = F.dot(F.array([list(v)]) if not isinstance(v, np.ndarray) else v.reshape(1, d), mats.reshape(d, m * n))
        return flat.reshape(m, n)

    def multiply(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.field.dot(u.reshape(1, -1), self.combine(self.right_mats(), v))[0]

    def generators(self) -> list[int]:
        """Basis indices generating the algebra (vertices and arrows for quivers)."""
        if self.quiver is not None:
            return list(self.quiver.vertices) + list(self.quiver.arrows)
        return [i for i in range(self.dim) if not self._is_unit_vector(i)]

    def _is_unit_vector(self, i):
        return self.field.equal(self.unit.reshape(1, -1), self.basis_vector(i).reshape(1, -1))

    def check(self) -> None:
        F = self.field
        d = self.dim
        if self.mult.shape != (d, d, d):
            raise AlgebraError(f"structure constants have shape {self.mult.shape}, expected {(d, d, d)}")
        if self.unit.shape != (d,):
            raise UnitViolation("unit vector has the wrong length")
        c2 = self.mult.reshape(d * d, d)
        # (b_i b_j) b_k and b_i (b_j b_k), indexed [i, j, k, m]
        lhs = F.dot(c2, self.mult.reshape(d, d * d)).reshape(d, d, d, d)
        rhs = F.dot(c2, np.ascontiguousarray(self.mult.transpose(1, 0, 2)).reshape(d, d * d))
        rhs = rhs.reshape(d, d, d, d).transpose(2, 0, 1, 3)
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            i, j, k, _ = (int(t) for t in bad[0])
            raise AssociativityViolation(
                f"(b{i} b{j}) b{k} != b{i} (b{j} b{k}) for {self.labels[i]}, {self.labels[j]}, {self.labels[k]}"
            )
        u = self.unit.reshape(1, d)
        eye = F.eye(d)
        if d and not F.equal(F.dot(u, self.mult.reshape(d, d * d)).reshape(d, d), eye):
            raise UnitViolation("unit is not a left identity")
        if d and not F.equal(F.dot(u, self.right_mats().reshape(d, d * d)).reshape(d, d), eye):
            raise UnitViolation("unit is not a right identity")
        if self.quiver is not None:
            q = self.quiver
            total = F.zeros(1, d)[0]
            for a in q.vertices:
                e = self.basis_vector(a)
                total = F.add(total, e)
                for b in q.vertices:
                    prod = self.multiply(e, self.basis_vector(b))
                    want = e if a == b else F.zeros(1, d)[0]
                    if not F.equal(prod.reshape(1, -1), want.reshape(1, -1)):
                        raise AlgebraError("vertex idempotents are not orthogonal idempotents")
            if not F.equal(total.reshape(1, -1), u):
                raise AlgebraError("vertex idempotents do not sum to the unit")


def build_algebra_from_structure_constants(field: FieldSpec, labels, mult, unit, name: str = "") -> FDAlgebra:
    d = len(labels)
    m = field.array(np.asarray(mult, dtype=object).reshape(d * d, d)).reshape(d, d, d) if d else field.zeros(0, 0).reshape(0, 0, 0)
    u = field.array([list(unit)])[0] if d else field.zeros(1, 0)[0]
    alg = FDAlgebra(field, list(labels), m, u, name=name)
    alg.check()
    return alg


def matrix_algebra(field: FieldSpec, n: int, name: str = "") -> FDAlgebra:
    """M_n(k) on the elementary-matrix basis."""
    labels = [f"E{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    d = n * n
    mult = np.zeros((d, d, d), dtype=object)
    for i, j, k in itertools.product(range(n), repeat=3):
        mult[i * n + j, j * n + k, i * n + k] = 1
    unit = [1 if i == j else 0 for i in range(n) for j in range(n)]
    return build_algebra_from_structure_constants(field, labels, mult, unit, name or f"M{n}")


# ---------------------------------------------------------------- quivers


@dataclass
class QuiverPresentation:
    """Quiver with relations.  Paths compose left to right: for arrows a, b
    with target(a) = source(b), ``ab`` means a followed by b."""

    vertices: list
    arrows: list  # (name, source index, target index)
    relations: list  # dict {tuple of arrow indices: coefficient}
    nilpotency_cap: int = 8
    field: FieldSpec = QQ

    def arrow_index(self, name: str) -> int:
        for i, (n, _, _) in enumerate(self.arrows):
            if n == name:
                return i
        raise KeyError(name)


def _path_label(pres: QuiverPresentation, src: int, path: tuple) -> str:
    if not path:
        return "e" if len(pres.vertices) == 1 else f"e{pres.vertices[src]}"
    names = [pres.arrows[a][0] for a in path]
    out = []
    for name, grp in itertools.groupby(names):
        k = len(list(grp))
        out.append(name if k == 1 else f"{name}^{k}")
    sep = "" if all(len(n) == 1 for n in names) else "*"
    return sep.join(out)


def build_algebra_from_quiver(pres: QuiverPresentation, name: str = "") -> FDAlgebra:
    F = pres.field
    nv = len(pres.vertices)
    arrows = pres.arrows
    for rel in pres.relations:
        ends = set()
        for path, _ in rel.items():
            if len(path) < 2:
                raise AlgebraError("relations must be combinations of paths of length >= 2")
            for a, b in zip(path, path[1:]):
                if arrows[a][2] != arrows[b][1]:
                    raise AlgebraError(f"relation path {path} is not composable")
            ends.add((arrows[path[0]][1], arrows[path[-1]][2]))
        if len(ends) > 1:
            raise AlgebraError("relation mixes paths with different endpoints")
    cap = pres.nilpotency_cap
    top = cap + 1  # paths of this length or longer are truncated away
    # enumerate paths (source, arrows) of length < top
    paths = [(v, ()) for v in range(nv)]
    frontier = [(arrows[a][1], (a,)) for a in range(len(arrows))]
    while frontier:
        paths.extend(frontier)
        nxt = []
        for src, p in frontier:
            if len(p) + 1 >= top:
                continue
            end = arrows[p[-1]][2]
            for a in range(len(arrows)):
                if arrows[a][1] == end:
                    nxt.append((src, p + (a,)))
        frontier = nxt
        if len(paths) > 200000:
            raise NonNilpotent("path enumeration exceeded 200000 paths; lower the nilpotency cap")
    # columns ordered from largest to smallest so pivots are leading terms
    def key(sp):
        return (len(sp[1]), sp[1], sp[0])

    cols = sorted(paths, key=key, reverse=True)
    pos = {sp: i for i, sp in enumerate(cols)}
    N = len(cols)

    def end_of(sp):
        return sp[0] if not sp[1] else arrows[sp[1][-1]][2]

    def concat(sp, tq):
        if end_of(sp) != tq[0]:
            return None
        p = sp[1] + tq[1]
        if len(p) >= top:
            return None
        return (sp[0], p)

    # arrow multiplication as column maps
    def mult_map(a, side):
        img = []
        for sp in cols:
            t = (arrows[a][1], (a,))
            r = concat(sp, t) if side == "right" else concat(t, sp)
            img.append(pos[r] if r is not None else -1)
        return np.array(img, dtype=np.int64)

    maps = [mult_map(a, s) for a in range(len(arrows)) for s in ("right", "left")]

    def apply(rows, img):
        out = F.zeros(rows.shape[0], N)
        for j in range(N):
            t = img[j]
            if t >= 0:
                out[:, t] = F.add(out[:, t], rows[:, j])
        return out

    gens = F.zeros(len(pres.relations), N)
    for r, rel in enumerate(pres.relations):
        for path, c in rel.items():
            sp = (arrows[path[0]][1], tuple(path))
            if sp in pos:
                gens[r, pos[sp]] = F.add(gens[r, pos[sp]], F.elem(c))
    ideal = F.row_basis(gens)
    while True:
        grown = [ideal] + [apply(ideal, img) for img in maps]
        new = F.row_basis(np.concatenate(grown))
        if new.shape[0] == ideal.shape[0]:
            break
        ideal = new
    # stabilization: J^m inside I + J^(m+1) for some m <= cap
    stable = None
    for m in range(1, cap + 1):
        longer = [pos[sp] for sp in cols if len(sp[1]) > m]
        at_least = [pos[sp] for sp in cols if len(sp[1]) >= m]
        if not at_least:
            stable = m
            break
        eye_l = F.zeros(len(longer), N)
        for i, c in enumerate(longer):
            eye_l[i, c] = F.one()
        eye_m = F.zeros(len(at_least), N)
        for i, c in enumerate(at_least):
            eye_m[i, c] = F.one()
        base = np.concatenate([ideal, eye_l])
        if F.rank(np.concatenate([base, eye_m])) == F.rank(base):
            stable = m
            break
    if stable is None:
        raise NonNilpotent(f"path algebra modulo relations does not stabilize by length {cap}")
    R, piv = (F.rref(ideal) if ideal.shape[0] else (ideal, []))
    pivset = set(piv)
    normal = [c for c in range(N) if c not in pivset]
    basis = sorted((cols[c] for c in normal), key=lambda sp: (len(sp[1]) > 0, len(sp[1]), sp[1], sp[0]))
    bidx = {sp: i for i, sp in enumerate(basis)}
    d = len(basis)
    # normal form of every column as a vector in the basis
    nf = F.zeros(N, d)
    for c in range(N):
        if c not in pivset:
            nf[c, bidx[cols[c]]] = F.one()
    for i, c in enumerate(piv):
        for c2 in normal:
            if R[i, c2] != 0:
                nf[c, bidx[cols[c2]]] = F.neg(R[i, c2])
    mult = F.zeros(d * d, d).reshape(d, d, d)
    for i, sp in enumerate(basis):
        for j, tq in enumerate(basis):
            r = concat(sp, tq)
            if r is not None:
                mult[i, j] = nf[pos[r]]
    unit = F.zeros(1, d)[0]
    for v in range(nv):
        unit[bidx[(v, ())]] = F.one()
    meta = QuiverMeta(
        vertex_names=list(pres.vertices),
        arrow_names=[a[0] for a in arrows],
        vertices=[bidx[(v, ())] for v in range(nv)],
        arrows=[bidx[(arrows[a][1], (a,))] for a in range(len(arrows))],
        length=[len(sp[1]) for sp in basis],
        source=[sp[0] for sp in basis],
        target=[end_of(sp) for sp in basis],
    )
    labels = [_path_label(pres, sp[0], sp[1]) for sp in basis]
    alg = FDAlgebra(F, labels, mult, unit, quiver=meta, name=name, presentation=pres)
    alg._paths = basis
    alg._normal_form = (pos, nf, top)
    alg.check()
    return alg


def quiver_path_vector(alg: FDAlgebra, path: tuple, src: int | None = None) -> np.ndarray:
    """Basis coordinates of a path (tuple of arrow indices) in a quiver algebra."""
    pres = alg.presentation
    F = alg.field
    pos, nf, top = alg._normal_form
    if not path:
        if src is None:
            if len(pres.vertices) != 1:
                raise AlgebraError("trivial path needs a vertex")
            src = 0
        return nf[pos[(src, ())]].copy()
    if len(path) >= top:
        return F.zeros(1, alg.dim)[0]
    sp = (pres.arrows[path[0]][1], tuple(path))
    if sp not in pos:
        return F.zeros(1, alg.dim)[0]
    return nf[pos[sp]].copy()


# ---------------------------------------------------------------- modules


@dataclass(eq=False)
class FDModule:
    algebra: FDAlgebra
    action: np.ndarray  # shape (dim A, dim M, dim M)
    name: str = ""
    parts: list | None = None  # direct-sum summands, in order
    projective_vertices: list | None = None  # e_v A summands when known projective

    @property
    def field(self) -> FieldSpec:
        return self.algebra.field

    @property
    def dim(self) -> int:
        return self.action.shape[1]

    def __repr__(self):
        return f"FDModule({self.name or '?'}, dim={self.dim})"

    def act(self, v: np.ndarray, a) -> np.ndarray:
        """v . a for module rows v and an algebra element a (vector)."""
        return self.field.dot(v, self.algebra.combine(self.action, a))

    def element_matrix(self, a) -> np.ndarray:
        return self.algebra.combine(self.action, a)

    def check(self) -> None:
        A = self.algebra
        F = self.field
        d, m = A.dim, self.dim
        if self.action.shape != (d, m, m):
            raise ModuleLawViolation(f"action has shape {self.action.shape}, expected {(d, m, m)}")
        if m == 0:
            return
        if not F.equal(self.element_matrix(A.unit), F.eye(m)):
            raise ModuleLawViolation("unit does not act as the identity")
        # rho(b_i) rho(b_j) against sum_k c_ijk rho(b_k), indexed [i, a, j, b]
        lhs = F.dot(self.action.reshape(d * m, m), np.ascontiguousarray(self.action.transpose(1, 0, 2)).reshape(m, d * m))
        lhs = lhs.reshape(d, m, d, m)
        rhs = F.dot(A.mult.reshape(d * d, d), self.action.reshape(d, m * m)).reshape(d, d, m, m).transpose(0, 2, 1, 3)
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            i, _, j, _ = (int(t) for t in bad[0])
            raise ModuleLawViolation(
                f"action of {A.labels[i]} then {A.labels[j]} differs from the action of their product"
            )


@dataclass(eq=False)
class ModuleHom:
    source: FDModule
    target: FDModule
    matrix: np.ndarray

    @property
    def field(self):
        return self.source.field

    def check(self) -> None:
        F = self.field
        if self.matrix.shape != (self.source.dim, self.target.dim):
            raise NotLinear(f"map matrix has shape {self.matrix.shape}")
        for g in self.source.algebra.generators():
            if not F.equal(F.dot(self.source.action[g], self.matrix), F.dot(self.matrix, self.target.action[g])):
                raise NotLinear(f"map does not commute with the action of {self.source.algebra.labels[g]}")

    def then(self, other: "ModuleHom") -> "ModuleHom":
        return ModuleHom(self.source, other.target, self.field.dot(self.matrix, other.matrix))

    def rank(self) -> int:
        return self.field.rank(self.matrix)


def module_from_action(alg: FDAlgebra, action, name: str = "", check: bool = True) -> FDModule:
    F = alg.field
    mats = [F.array(a) for a in action]
    m = mats[0].shape[0] if mats else 0
    arr = np.stack(mats) if mats else F.zeros(0, 0).reshape(0, 0, 0)
    arr = arr.reshape(alg.dim, m, m)
    mod = FDModule(alg, arr, name)
    if check:
        mod.check()
    return mod


def module_from_generators(alg: FDAlgebra, dim: int, gens: dict, name: str = "", check: bool = True) -> FDModule:
    """Right module over a quiver algebra from vertex and arrow matrices.

    ``gens`` maps vertex names and arrow names to ``dim x dim`` matrices; a
    one-vertex quiver may omit its vertex (identity)."""
    if alg.quiver is None:
        raise AlgebraError("generator shorthand needs a quiver algebra")
    F = alg.field
    q = alg.quiver
    mats = {}
    for key, val in gens.items():
        mats[str(key)] = F.array(val, shape=(dim, dim)) if dim else F.zeros(0, 0)
    vmat = []
    for v, vn in enumerate(q.vertex_names):
        k = f"e{vn}" if f"e{vn}" in mats else str(vn)
        if k in mats:
            vmat.append(mats[k])
        elif len(q.vertex_names) == 1 or "e" in mats:
            vmat.append(mats.get("e", F.eye(dim)))
        else:
            raise AlgebraError(f"missing matrix for vertex {vn}")
    amat = []
    for an in q.arrow_names:
        if an not in mats:
            raise AlgebraError(f"missing matrix for arrow {an}")
        amat.append(mats[an])
    action = F.zeros(alg.dim * dim, dim).reshape(alg.dim, dim, dim)
    for i, (src, path) in enumerate(alg._paths):
        if not path:
            action[i] = vmat[src]
        else:
            m = vmat[src]
            for a in path:
                m = F.dot(m, amat[a])
            action[i] = m
    mod = FDModule(alg, action, name)
    if check:
        mod.check()
    return mod


def zero_module(alg: FDAlgebra) -> FDModule:
    return FDModule(alg, np.empty((alg.dim, 0, 0), dtype=alg.field.dtype), "0", parts=[], projective_vertices=[])


def regular_module(alg: FDAlgebra) -> FDModule:
    pv = list(range(len(alg.quiver.vertices))) if alg.quiver is not None else None
    mod = FDModule(alg, alg.right_mats().copy(), alg.name or "A", projective_vertices=pv)
    return mod


def vertex_projective(alg: FDAlgebra, v: int) -> FDModule:
    """e_v A: paths starting at vertex v."""
    q = alg.quiver
    idx = [i for i in range(alg.dim) if q.source[i] == v]
    R = alg.right_mats()
    action = np.ascontiguousarray(R[:, idx][:, :, idx])
    return FDModule(alg, action, f"P{q.vertex_names[v]}", projective_vertices=[v])


def vertex_simple(alg: FDAlgebra, v: int) -> FDModule:
    q = alg.quiver
    F = alg.field
    action = F.zeros(alg.dim, 1).reshape(alg.dim, 1, 1)
    action[q.vertices[v], 0, 0] = F.one()
    return FDModule(alg, action, f"S{q.vertex_names[v]}")


def _flat(mods):
    out = []
    for m in mods:
        if m.parts is not None and m.dim:
            out.extend(m.parts)
        elif m.dim:
            out.append(m)
    return out


def direct_sum_modules(mods, name: str = "") -> FDModule:
    if not mods:
        raise AlgebraError("direct sum of no modules needs an algebra; use zero_module")
    alg = mods[0].algebra
    for m in mods:
        if m.algebra is not alg:
            raise AlgebraMismatch("summands over different algebras")
    F = alg.field
    n = sum(m.dim for m in mods)
    action = F.zeros(alg.dim * n, n).reshape(alg.dim, n, n)
    off = 0
    for m in mods:
        action[:, off:off + m.dim, off:off + m.dim] = m.action
        off += m.dim
    flat = _flat(mods)
    pv = None
    if all(m.projective_vertices is not None for m in mods):
        pv = [v for m in mods for v in m.projective_vertices]
    if len(flat) == 1 and flat[0].dim == n:
        return flat[0]
    return FDModule(alg, action, name or "+".join(m.name or "?" for m in mods), parts=flat, projective_vertices=pv)


def free_module(alg: FDAlgebra, rank: int) -> FDModule:
    if rank == 0:
        return zero_module(alg)
    return direct_sum_modules([regular_module(alg)] * rank, name=f"{alg.name or 'A'}^{rank}")


def span_submodule(M: FDModule, vectors: np.ndarray) -> np.ndarray:
    """Row basis of the submodule generated by the given vectors."""
    F = M.field
    cur = F.row_basis(vectors) if vectors.shape[0] else F.zeros(0, M.dim)
    while True:
        if cur.shape[0] == 0:
            return cur
        grown = [cur] + [F.dot(cur, M.action[g]) for g in M.algebra.generators()]
        new = F.row_basis(np.concatenate(grown))
        if new.shape[0] == cur.shape[0]:
            return new
        cur = new


def submodule(M: FDModule, rows: np.ndarray, name: str = "") -> tuple[FDModule, ModuleHom]:
    """Submodule spanned by the rows (must be closed) with its inclusion."""
    F = M.field
    A = M.algebra
    k = rows.shape[0]
    if k == 0:
        Z = zero_module(A)
        return Z, ModuleHom(Z, M, F.zeros(0, M.dim))
    stacked = F.dot(rows, M.action.transpose(1, 0, 2).reshape(M.dim, A.dim * M.dim)).reshape(k, A.dim, M.dim)
    rhs = np.ascontiguousarray(stacked.transpose(1, 0, 2)).reshape(A.dim * k, M.dim)
    coeffs = F.solve_left(rows, rhs)
    if coeffs is None:
        raise ModuleLawViolation("rows do not span a submodule")
    action = coeffs.reshape(A.dim, k, k)
    S = FDModule(A, action, name)
    return S, ModuleHom(S, M, rows.copy())


def quotient_module(M: FDModule, sub_rows: np.ndarray, name: str = "") -> tuple[FDModule, ModuleHom]:
    """M / N for a submodule N given by rows, with the projection."""
    from .linalg import quotient_basis

    F = M.field
    A = M.algebra
    q = quotient_basis(F, F.eye(M.dim), sub_rows)
    n = q.dim
    action = F.zeros(A.dim * n, n).reshape(A.dim, n, n)
    for i in range(A.dim):
        action[i] = q.project(F.dot(q.reps, M.action[i]))
    Q = FDModule(A, action, name)
    return Q, ModuleHom(M, Q, q.proj)


def cyclic_quotient(alg: FDAlgebra, elements, name: str = "") -> FDModule:
    """A / (elements) A, e.g. k[x]/(x^r) from the element x^r."""
    R = regular_module(alg)
    F = alg.field
    gens = F.array([list(e) for e in elements]) if len(elements) else F.zeros(0, alg.dim)
    sub = span_submodule(R, gens)
    Q, _ = quotient_module(R, sub, name)
    return Q


def kernel(f: ModuleHom, name: str = "") -> tuple[FDModule, ModuleHom]:
    F = f.field
    rows = F.left_kernel(f.matrix)
    if rows.shape[0] == 0:
        rows = F.zeros(0, f.source.dim)
    return submodule(f.source, rows, name)


# ---------------------------------------------------------------- Hom spaces


def _hom_block(M: FDModule, N: FDModule) -> list[np.ndarray]:
    F = M.field
    cons = [(N.action[g], M.action[g]) for g in M.algebra.generators()]
    return solve_linear(F, cons, (M.dim, N.dim))


@lru_cache(maxsize=8192)
def _hom_cached(M: FDModule, N: FDModule) -> tuple:
    return tuple(_hom_block(M, N))


def hom_basis(M: FDModule, N: FDModule) -> list[np.ndarray]:
    """Basis matrices of Hom_A(M, N), computed summand by summand."""
    if M.algebra is not N.algebra:
        raise AlgebraMismatch("modules over different algebras")
    F = M.field
    if M.dim == 0 or N.dim == 0:
        return []
    mparts = M.parts if M.parts else [M]
    nparts = N.parts if N.parts else [N]
    if len(mparts) == 1 and len(nparts) == 1:
        return list(_hom_cached(mparts[0], nparts[0]))
    out = []
    moff = 0
    for mp in mparts:
        noff = 0
        for np_ in nparts:
            for blk in _hom_cached(mp, np_):
                full = F.zeros(M.dim, N.dim)
                full[moff:moff + mp.dim, noff:noff + np_.dim] = blk
                out.append(full)
            noff += np_.dim
        moff += mp.dim
    return out


def hom_space(M: FDModule, N: FDModule) -> list[ModuleHom]:
    return [ModuleHom(M, N, b) for b in hom_basis(M, N)]


def identity_hom(M: FDModule) -> ModuleHom:
    return ModuleHom(M, M, M.field.eye(M.dim))


def find_isomorphism(M: FDModule, N: FDModule, rng=None):
    """A pair (f, g) of mutually inverse module maps, or None."""
    import random

    if M.dim != N.dim:
        return None
    F = M.field
    if M.dim == 0:
        return ModuleHom(M, N, F.zeros(0, 0)), ModuleHom(N, M, F.zeros(0, 0))
    basis = hom_basis(M, N)
    if not basis:
        return None
    rng = rng or random.Random(0)
    candidates = basis + [None] * 8
    for c in candidates:
        if c is None:
            c = F.zeros(M.dim, N.dim)
            for b in basis:
                c = F.add(c, F.scale(rng.randint(-5, 5), b))
        if F.rank(c) == M.dim:
            return ModuleHom(M, N, c), ModuleHom(N, M, F.inverse(c))
    return None


# ---------------------------------------------------------------- radical, covers


def radical(alg: FDAlgebra) -> np.ndarray:
    """Row basis of the Jacobson radical in algebra coordinates."""
    F = alg.field
    d = alg.dim
    if alg.quiver is not None:
        rows = [i for i in range(d) if alg.quiver.length[i] >= 1]
        out = F.zeros(len(rows), d)
        for t, i in enumerate(rows):
            out[t, i] = F.one()
        return out
    if not F.is_rational:
        raise UnsupportedRadical("radical of a structure-constant algebra needs characteristic zero")
    R = alg.right_mats()
    traces = F.array([[sum((R[k][i, i] for i in range(d)), F.zero()) for k in range(d)]])
    gram = F.dot(alg.mult.reshape(d * d, d), traces.T).reshape(d, d)
    return F.left_kernel(gram)


def _radical_image(M: FDModule) -> np.ndarray:
    F = M.field
    A = M.algebra
    rad = radical(A)
    if rad.shape[0] == 0 or M.dim == 0:
        return F.zeros(0, M.dim)
    mats = [A.combine(M.action, r) for r in rad]
    return F.row_basis(np.concatenate(mats))


def _independent_mod(F, sub: np.ndarray, cands: np.ndarray) -> list[int]:
    """Indices of candidate rows chosen greedily, independent modulo sub."""
    s = sub.shape[0]
    if cands.shape[0] == 0:
        return []
    # sub is a row basis, so its columns all become pivots first
    stacked = np.concatenate([sub, cands]) if s else cands
    _, piv = F.rref(np.ascontiguousarray(stacked.T))
    return [p - s for p in piv if p >= s]


def top_generators(M: FDModule):
    """Elements of M lifting a basis of M / M rad, with their vertices."""
    F = M.field
    A = M.algebra
    rad_img = _radical_image(M)
    if A.quiver is not None:
        gens, verts = [], []
        for v, e in enumerate(A.quiver.vertices):
            cand = F.row_basis(M.action[e]) if M.dim else F.zeros(0, 0)
            if cand.shape[0] == 0:
                continue
            for i in _independent_mod(F, rad_img, cand):
                gens.append(cand[i])
                verts.append(v)
        return gens, verts
    idx = _independent_mod(F, rad_img, F.eye(M.dim))
    return [F.eye(M.dim)[i] for i in idx], [None] * len(idx)


def _cover_from(M: FDModule, gens, verts, name=""):
    A = M.algebra
    F = M.field
    if not gens:
        Z = zero_module(A)
        return Z, ModuleHom(Z, M, F.zeros(0, M.dim))
    summands = [vertex_projective(A, v) if v is not None else regular_module(A) for v in verts]
    P = direct_sum_modules(summands, name=name or f"P({M.name or '?'})")
    rows = []
    for g, v in zip(gens, verts):
        idx = range(A.dim) if v is None else [i for i in range(A.dim) if A.quiver.source[i] == v]
        for i in idx:
            rows.append(F.dot(g.reshape(1, -1), M.action[i])[0])
    pi = ModuleHom(P, M, F.array(rows) if rows else F.zeros(0, M.dim))
    if F.rank(pi.matrix) != M.dim:
        raise AlgebraError("projective cover map is not surjective")
    return P, pi


def projective_cover(M: FDModule, redundant: int = 0) -> tuple[FDModule, ModuleHom]:
    """Projective P with a surjection onto M.

    ``redundant`` repeats the first generator that many extra times, giving a
    non-minimal cover (used to build non-minimal resolutions)."""
    if M.dim == 0:
        raise AlgebraError("projective cover of the zero module")
    gens, verts = top_generators(M)
    gens = list(gens) + [gens[0]] * redundant
    verts = list(verts) + [verts[0]] * redundant
    return _cover_from(M, gens, verts)


def syzygy(M: FDModule, name: str = "") -> FDModule:
    _, pi = projective_cover(M)
    K, _ = kernel(pi, name or f"Omega({M.name or '?'})")
    return K


def is_projective(M: FDModule):
    """True/False for quiver or semisimple algebras, None when undecided."""
    if M.dim == 0 or M.projective_vertices is not None:
        return True
    A = M.algebra
    if A.quiver is not None:
        P, _ = projective_cover(M)
        return P.dim == M.dim
    if A.field.is_rational and radical(A).shape[0] == 0:
        return True
    return None


@dataclass
class Resolution:
    modules: list  # P^0, P^-1, ..., P^-L
    maps: list  # d^{-k}: P^{-k} -> P^{-k+1}, k = 1..L
    augmentation: ModuleHom
    minimal: bool
    length: int
    extra: dict = dc_field(default_factory=dict)


def resolve(M: FDModule, L: int, minimal: bool = True) -> Resolution:
    """Projective resolution truncated to degrees [-L, 0].

    With ``minimal=False`` the cover in degree 0 carries one redundant free
    generator, so the result is the minimal resolution plus a contractible
    pair A -> A in degrees -1, 0 (a free, non-minimal resolution)."""
    if L < 0:
        raise ValueError("resolution length must be nonnegative")
    A = M.algebra
    F = M.field
    if M.dim == 0:
        return Resolution([zero_module(A)], [], ModuleHom(zero_module(A), M, F.zeros(0, 0)), minimal, L)
    extra = 0 if minimal else 1
    P0, pi = projective_cover(M, redundant=extra if L > 0 else 0)
    mods, maps = [P0], []
    prev = pi
    for k in range(1, L + 1):
        K, inc = kernel(prev)
        if K.dim == 0:
            break
        P, cov = projective_cover(K)
        maps.append(ModuleHom(P, mods[-1], F.dot(cov.matrix, inc.matrix)))
        mods.append(P)
        prev = maps[-1]
    return Resolution(mods, maps, pi, minimal, L)


# ---------------------------------------------------------------- bimodules


@dataclass(eq=False)
class FDBimodule:
    """(left, right)-bimodule: b . m = m @ lam[b] and m . a = m @ rho[a]."""

    left: FDAlgebra
    right: FDAlgebra
    lam: np.ndarray
    rho: np.ndarray
    name: str = ""

    @property
    def field(self):
        return self.right.field

    @property
    def dim(self) -> int:
        return self.rho.shape[1]

    def right_module(self) -> FDModule:
        return FDModule(self.right, self.rho, self.name)

    def left_as_right_opposite(self) -> FDModule:
        """The left action viewed as a right module over the opposite algebra."""
        return FDModule(opposite_algebra(self.left), self.lam, self.name)

    def check(self) -> None:
        F = self.field
        self.right_module().check()
        self.left_as_right_opposite().check()
        for g in self.left.generators():
            for h in self.right.generators():
                if not F.equal(F.dot(self.lam[g], self.rho[h]), F.dot(self.rho[h], self.lam[g])):
                    raise ModuleLawViolation(
                        f"left action of {self.left.labels[g]} does not commute with right action of {self.right.labels[h]}")


def opposite_algebra(alg: FDAlgebra) -> FDAlgebra:
    op = getattr(alg, "_opposite", None)
    if op is None:
        op = FDAlgebra(alg.field, list(alg.labels), np.ascontiguousarray(alg.mult.transpose(1, 0, 2)),
                       alg.unit.copy(), name=f"{alg.name}^op")
        op._opposite = alg
        alg._opposite = op
    return op


def regular_bimodule(alg: FDAlgebra) -> FDBimodule:
    return FDBimodule(alg, alg, alg.left_mats().copy(), alg.right_mats().copy(), alg.name or "A")


def bimodule_from_actions(left: FDAlgebra, right: FDAlgebra, lam, rho, name: str = "", check: bool = True) -> FDBimodule:
    F = right.field
    lam = np.stack([F.array(m) for m in lam]) if len(lam) else None
    rho = np.stack([F.array(m) for m in rho])
    n = rho.shape[1]
    if lam is None:
        lam = np.empty((left.dim, n, n), dtype=F.dtype)
    B = FDBimodule(left, right, lam.reshape(left.dim, n, n), rho.reshape(right.dim, n, n), name)
    if check:
        B.check()
    return B
