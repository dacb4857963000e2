"""Bounded complexes of modules, graded maps, Hom complexes, cones, tensors.

Differentials raise degree: ``d^i : X^i -> X^{i+1}``.  A graded map of
degree n has components ``X^i -> Y^{i+n}``.  Composition follows the row
convention of the rest of the package: ``f.then(g)`` is g after f.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

import numpy as np

from .algebra import (
    AlgebraMismatch,
    FDAlgebra,
    FDModule,
    ModuleHom,
    direct_sum_modules,
    hom_basis,
    zero_module,
)
from .linalg import FieldSpec, Quotient, quotient_basis


class ComplexError(ValueError):
    pass


class NotChainMap(ComplexError):
    pass


class NotNullHomotopic(ComplexError):
    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


# ---------------------------------------------------------------- complexes


@dataclass(eq=False)
class BoundedComplex:
    algebra: FDAlgebra
    lo: int
    terms: list  # FDModule for degrees lo .. lo+len-1
    diffs: list  # matrices d^i for i = lo .. hi-1
    name: str = ""

    @property
    def field(self) -> FieldSpec:
        return self.algebra.field

    @property
    def hi(self) -> int:
        return self.lo + len(self.terms) - 1

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def __repr__(self):
        dims = {i: self.term(i).dim for i in self.degrees()}
        return f"BoundedComplex({self.name or '?'}, {dims})"

    def term(self, i: int) -> FDModule:
        if self.lo <= i <= self.hi:
            return self.terms[i - self.lo]
        return zero_module(self.algebra)

    def dim(self, i: int) -> int:
        return self.term(i).dim if self.lo <= i <= self.hi else 0

    def d(self, i: int) -> np.ndarray:
        if self.lo <= i < self.hi:
            return self.diffs[i - self.lo]
        return self.field.zeros(self.dim(i), self.dim(i + 1))

    def is_zero(self) -> bool:
        return all(m.dim == 0 for m in self.terms)

    def check(self) -> None:
        F = self.field
        if len(self.diffs) != max(len(self.terms) - 1, 0):
            raise ComplexError("wrong number of differentials")
        for i in range(self.lo, self.hi):
            D = self.d(i)
            if D.shape != (self.dim(i), self.dim(i + 1)):
                raise ComplexError(f"differential in degree {i} has shape {D.shape}")
            ModuleHom(self.term(i), self.term(i + 1), D).check()
        for i in range(self.lo, self.hi - 1):
            if not F.is_zero(F.dot(self.d(i), self.d(i + 1))):
                raise ComplexError(f"d o d != 0 starting in degree {i}")

    def trimmed(self) -> "BoundedComplex":
        nz = [i for i in self.degrees() if self.dim(i)]
        if not nz:
            return BoundedComplex(self.algebra, 0, [], [], self.name)
        a, b = nz[0], nz[-1]
        return BoundedComplex(self.algebra, a, [self.term(i) for i in range(a, b + 1)],
                              [self.d(i) for i in range(a, b)], self.name)

    def identity(self) -> "GradedMap":
        F = self.field
        return GradedMap(self, self, 0, {i: F.eye(self.dim(i)) for i in self.degrees() if self.dim(i)})

    def zero_map(self, other: "BoundedComplex", n: int = 0) -> "GradedMap":
        return GradedMap(self, other, n, {})

    def space(self) -> "SpaceComplex":
        """Underlying complex of vector spaces."""
        return SpaceComplex(self.field, self.lo, [self.dim(i) for i in self.degrees()],
                            [self.d(i) for i in range(self.lo, self.hi)])


def make_complex(algebra: FDAlgebra, lo: int, terms, diffs, name: str = "", check: bool = True) -> BoundedComplex:
    F = algebra.field
    diffs = [F.array(D) if not isinstance(D, np.ndarray) else D for D in diffs]
    X = BoundedComplex(algebra, lo, list(terms), diffs, name)
    if check:
        X.check()
    return X


def stalk(M: FDModule, degree: int = 0, name: str = "") -> BoundedComplex:
    return BoundedComplex(M.algebra, degree, [M], [], name or M.name)


def zero_complex(algebra: FDAlgebra) -> BoundedComplex:
    return BoundedComplex(algebra, 0, [], [], "0")


def shift(X: BoundedComplex, n: int) -> BoundedComplex:
    """X[n]^i = X^{n+i} with differential multiplied by (-1)^n."""
    F = X.field
    return BoundedComplex(X.algebra, X.lo - n, list(X.terms), [F.sign(D, n) for D in X.diffs],
                          f"{X.name}[{n}]" if n else X.name)


# ---------------------------------------------------------------- graded maps


@dataclass(eq=False)
class GradedMap:
    source: BoundedComplex
    target: BoundedComplex
    degree: int
    comps: dict  # i -> matrix X^i -> Y^{i+degree}; missing means zero

    @property
    def field(self):
        return self.source.field

    def comp(self, i: int) -> np.ndarray:
        c = self.comps.get(i)
        if c is not None:
            return c
        return self.field.zeros(self.source.dim(i), self.target.dim(i + self.degree))

    def degrees(self):
        return [i for i in self.source.degrees() if self.source.dim(i) and self.target.dim(i + self.degree)]

    def check(self) -> None:
        for i, c in self.comps.items():
            if c.shape != (self.source.dim(i), self.target.dim(i + self.degree)):
                raise ComplexError(f"component {i} has shape {c.shape}")
            ModuleHom(self.source.term(i), self.target.term(i + self.degree), c).check()

    def then(self, g: "GradedMap") -> "GradedMap":
        """g after self."""
        F = self.field
        out = {}
        for i in self.degrees():
            j = i + self.degree
            if g.target.dim(j + g.degree):
                out[i] = F.dot(self.comp(i), g.comp(j))
        return GradedMap(self.source, g.target, self.degree + g.degree, out)

    def _combine(self, other, fn):
        out = {}
        for i in set(self.degrees()) | set(other.degrees()):
            out[i] = fn(self.comp(i), other.comp(i))
        return GradedMap(self.source, self.target, self.degree, out)

    def __add__(self, other):
        return self._combine(other, self.field.add)

    def __sub__(self, other):
        return self._combine(other, self.field.sub)

    def __neg__(self):
        F = self.field
        return GradedMap(self.source, self.target, self.degree, {i: F.neg(c) for i, c in self.comps.items()})

    def scaled(self, c) -> "GradedMap":
        F = self.field
        return GradedMap(self.source, self.target, self.degree, {i: F.scale(c, m) for i, m in self.comps.items()})

    def is_zero(self) -> bool:
        F = self.field
        return all(F.is_zero(c) for c in self.comps.values())

    def equals(self, other: "GradedMap") -> bool:
        return self.degree == other.degree and (self - other).is_zero()

    def differential(self) -> "GradedMap":
        """d(f) = d_Y f + (-1)^{|f|+1} f d_X."""
        F = self.field
        X, Y, n = self.source, self.target, self.degree
        out = {}
        for i in X.degrees():
            if not X.dim(i) or not Y.dim(i + n + 1):
                continue
            a = F.dot(self.comp(i), Y.d(i + n))
            b = F.dot(X.d(i), self.comp(i + 1))
            out[i] = F.add(a, F.sign(b, n + 1))
        return GradedMap(X, Y, n + 1, out)

    def is_chain_map(self) -> bool:
        return self.differential().is_zero()

    def shifted(self, n: int) -> "GradedMap":
        """f[n] between shifted complexes (components re-indexed, sign (-1)^{n|f|})."""
        F = self.field
        X, Y = shift(self.source, n), shift(self.target, n)
        comps = {i - n: F.sign(c, n * self.degree) for i, c in self.comps.items()}
        return GradedMap(X, Y, self.degree, comps)


@dataclass
class Homotopy:
    """r with f = d(r) in the Hom complex (f = dr + rd in degree 0)."""

    f: GradedMap
    r: GradedMap

    def verify(self) -> bool:
        return self.r.differential().equals(self.f)


# ---------------------------------------------------------------- space complexes


@dataclass(eq=False)
class SpaceComplex:
    field: FieldSpec
    lo: int
    dims: list
    diffs: list  # diffs[i - lo]: dims[i] x dims[i+1]
    labels: list | None = None

    @property
    def hi(self) -> int:
        return self.lo + len(self.dims) - 1

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def dim(self, n: int) -> int:
        return self.dims[n - self.lo] if self.lo <= n <= self.hi else 0

    def d(self, n: int) -> np.ndarray:
        if self.lo <= n < self.hi:
            return self.diffs[n - self.lo]
        return self.field.zeros(self.dim(n), self.dim(n + 1))

    def check(self) -> None:
        F = self.field
        for n in range(self.lo, self.hi - 1):
            if not F.is_zero(F.dot(self.d(n), self.d(n + 1))):
                raise ComplexError(f"d o d != 0 starting in degree {n}")

    def cycles(self, n: int) -> np.ndarray:
        F = self.field
        if self.dim(n) == 0:
            return F.zeros(0, 0)
        if self.dim(n + 1) == 0:
            return F.eye(self.dim(n))
        return F.left_kernel(self.d(n))

    def boundaries(self, n: int) -> np.ndarray:
        F = self.field
        if self.dim(n - 1) == 0 or self.dim(n) == 0:
            return F.zeros(0, self.dim(n))
        return F.row_basis(self.d(n - 1))


@dataclass
class Homology:
    degree: int
    dim: int
    reps: np.ndarray  # cycle representatives, one row per class
    quotient: Quotient  # projection from ambient coordinates (cycles only)

    def classes(self, vecs: np.ndarray) -> np.ndarray:
        return self.quotient.project(vecs)


def homology(S: SpaceComplex, n: int) -> Homology:
    F = S.field
    m = S.dim(n)
    if m == 0:
        q = Quotient(F, F.zeros(0, 0), F.zeros(0, 0), F.zeros(0, 0))
        return Homology(n, 0, q.reps, q)
    Z = S.cycles(n)
    if Z.shape[0] == 0:
        Z = F.zeros(0, m)
    B = S.boundaries(n)
    q = quotient_basis(F, Z, B, check=False)
    return Homology(n, q.dim, q.reps, q)


def homology_dims(S: SpaceComplex, degrees=None) -> dict:
    degrees = S.degrees() if degrees is None else degrees
    return {n: homology(S, n).dim for n in degrees}


# ---------------------------------------------------------------- direct sums


@dataclass
class DirectSum:
    complex: BoundedComplex
    injections: list
    projections: list


def direct_sum(Xs, name: str = "") -> DirectSum:
    if not Xs:
        raise ComplexError("direct sum of no complexes")
    A = Xs[0].algebra
    for X in Xs:
        if X.algebra is not A:
            raise AlgebraMismatch("complexes over different algebras")
    F = A.field
    live = [X for X in Xs if not X.is_zero()]
    lo = min((X.lo for X in live), default=0)
    hi = max((X.hi for X in live), default=-1)
    terms, diffs = [], []
    for i in range(lo, hi + 1):
        parts = [X.term(i) for X in Xs if X.dim(i)]
        terms.append(direct_sum_modules(parts) if parts else zero_module(A))
    for i in range(lo, hi):
        D = F.zeros(sum(X.dim(i) for X in Xs), sum(X.dim(i + 1) for X in Xs))
        r = c = 0
        for X in Xs:
            D[r:r + X.dim(i), c:c + X.dim(i + 1)] = X.d(i)
            r += X.dim(i)
            c += X.dim(i + 1)
        diffs.append(D)
    S = BoundedComplex(A, lo, terms, diffs, name or " + ".join(X.name or "?" for X in Xs))
    inj, proj = [], []
    offs = {i: 0 for i in range(lo, hi + 1)}
    for X in Xs:
        ic, pc = {}, {}
        for i in X.degrees():
            k = X.dim(i)
            if not k:
                continue
            e = F.zeros(k, S.dim(i))
            e[:, offs[i]:offs[i] + k] = F.eye(k)
            ic[i] = e
            pc[i] = np.ascontiguousarray(e.T)
            offs[i] += k
        inj.append(GradedMap(X, S, 0, ic))
        proj.append(GradedMap(S, X, 0, pc))
    return DirectSum(S, inj, proj)


def map_into_sum(X: BoundedComplex, parts: list, target: DirectSum) -> GradedMap:
    """Column map X -> (+) Y_k from components X -> Y_k of equal degree."""
    total = parts[0].then(target.injections[0])
    for f, inj in zip(parts[1:], target.injections[1:]):
        total = total + f.then(inj)
    return total


# ---------------------------------------------------------------- cones


@dataclass
class Cone:
    complex: BoundedComplex
    g: GradedMap  # Y -> C
    h: GradedMap  # C -> X[1]
    r: Homotopy  # witness that g o f is null-homotopic


def cone(f: GradedMap, name: str = "") -> Cone:
    """C^n = X^{n+1} (+) Y^n with d(x, y) = (-d_X x, f(x) + d_Y y)."""
    if f.degree != 0 or not f.is_chain_map():
        raise NotChainMap("cone needs a chain map of degree 0")
    X, Y = f.source, f.target
    A = X.algebra
    F = A.field
    cands = [i - 1 for i in X.degrees() if X.dim(i)] + [i for i in Y.degrees() if Y.dim(i)]
    lo, hi = (min(cands), max(cands)) if cands else (0, -1)
    terms = []
    for n in range(lo, hi + 1):
        parts = [m for m in (X.term(n + 1), Y.term(n)) if m.dim]
        terms.append(direct_sum_modules(parts) if parts else zero_module(A))
    diffs = []
    for n in range(lo, hi):
        a, b = X.dim(n + 1), Y.dim(n)
        a2, b2 = X.dim(n + 2), Y.dim(n + 1)
        D = F.zeros(a + b, a2 + b2)
        D[:a, :a2] = F.neg(X.d(n + 1))
        D[:a, a2:] = f.comp(n + 1)
        D[a:, a2:] = Y.d(n)
        diffs.append(D)
    C = BoundedComplex(A, lo, terms, diffs, name or f"cone({X.name}->{Y.name})")
    X1 = shift(X, 1)
    gc, hc, rc = {}, {}, {}
    for n in range(lo, hi + 1):
        a, b = X.dim(n + 1), Y.dim(n)
        if b:
            g = F.zeros(b, a + b)
            g[:, a:] = F.eye(b)
            gc[n] = g
        if a:
            h = F.zeros(a + b, a)
            h[:a, :] = F.eye(a)
            hc[n] = h
    for n in X.degrees():
        # r: X^n -> C^{n-1} = X^n (+) Y^{n-1}, x -> (x, 0)
        a = X.dim(n)
        if a:
            r = F.zeros(a, C.dim(n - 1))
            r[:, :a] = F.eye(a)
            rc[n] = r
    g = GradedMap(Y, C, 0, gc)
    h = GradedMap(C, X1, 0, hc)
    r = GradedMap(X, C, -1, rc)
    return Cone(C, g, h, Homotopy(f.then(g), r))


def induced_map(f: GradedMap, n: int) -> np.ndarray:
    """H^n(f): H^n(X) -> H^{n+|f|}(Y) in homology class coordinates (f a chain map)."""
    F = f.field
    hs = homology(f.source.space(), n)
    ht = homology(f.target.space(), n + f.degree)
    if not hs.dim or not ht.dim:
        return F.zeros(hs.dim, ht.dim)
    return ht.classes(F.dot(hs.reps, f.comp(n)))


def chain_map_ranks(f: GradedMap, window=None) -> dict:
    """{n: {"source", "target", "rank"}} for H^n(f) over a degree window."""
    F = f.field
    if window is None:
        degs = [i for i in f.source.degrees()] + [i - f.degree for i in f.target.degrees()]
        window = (min(degs), max(degs)) if degs else (0, -1)
    out = {}
    for n in range(window[0], window[1] + 1):
        M = induced_map(f, n)
        out[n] = {"source": M.shape[0], "target": M.shape[1], "rank": F.rank(M) if M.size else 0}
    return out


def cone_exactness(f: GradedMap, cn: Cone | None = None) -> dict:
    """Exactness of H(X) -> H(Y) -> H(C) -> H(X[1]) -> H(Y[1]) at each middle term.

    Returns ``{n: {"Y": ok, "C": ok, "X1": ok}}`` over the degrees where any
    of the three complexes is nonzero; exactness at a spot means the
    composite vanishes and the ranks add up to the dimension there."""
    F = f.field
    cn = cn if cn is not None else cone(f)
    f1 = f.shifted(1)
    degs = set(f.source.degrees()) | set(f.target.degrees()) | set(cn.complex.degrees())
    lo, hi = min(degs) - 1, max(degs) + 1
    out = {}
    for n in range(lo, hi + 1):
        maps = [induced_map(f, n), induced_map(cn.g, n), induced_map(cn.h, n), induced_map(f1, n)]
        spots = {}
        for name, a, b in (("Y", maps[0], maps[1]), ("C", maps[1], maps[2]), ("X1", maps[2], maps[3])):
            mid = a.shape[1]
            comp_zero = F.is_zero(F.dot(a, b)) if a.size and b.size else True
            ra = F.rank(a) if a.size else 0
            rb = F.rank(b) if b.size else 0
            spots[name] = bool(comp_zero and ra + rb == mid)
        out[n] = spots
    return out


# ---------------------------------------------------------------- Hom complexes


class HomBlock:
    """Basis of Hom_A(M, N) with a coordinate extractor."""

    def __init__(self, M: FDModule, N: FDModule):
        F = M.field
        self.source, self.target = M, N
        self.basis = hom_basis(M, N)
        k = len(self.basis)
        self.size = k
        if k:
            flat = np.stack([b.reshape(-1) for b in self.basis])
            _, piv = F.rref(flat)
            self.pivots = piv
            self.inv = F.inverse(np.ascontiguousarray(flat[:, piv]))
            self.flat = flat
        else:
            self.pivots, self.inv, self.flat = [], None, F.zeros(0, M.dim * N.dim)

    def coords(self, mats: np.ndarray) -> np.ndarray:
        """Coordinates of flattened maps (rows) in the basis; rows must lie in the span."""
        F = self.source.field
        if not self.size:
            return F.zeros(mats.shape[0], 0)
        return F.dot(np.ascontiguousarray(mats[:, self.pivots]), self.inv)


_BLOCKS: dict = {}


def hom_block(M: FDModule, N: FDModule) -> HomBlock:
    key = (id(M), id(N))
    hit = _BLOCKS.get(key)
    if hit is not None and hit.source is M and hit.target is N:
        return hit
    blk = HomBlock(M, N)
    if len(_BLOCKS) > 20000:
        _BLOCKS.clear()
    _BLOCKS[key] = blk
    return blk


@dataclass(eq=False)
class HomComplex(SpaceComplex):
    source: BoundedComplex = None
    target: BoundedComplex = None
    layout: dict = dc_field(default_factory=dict)  # n -> list of (i, HomBlock, offset)

    def to_map(self, vec: np.ndarray, n: int) -> GradedMap:
        F = self.field
        comps = {}
        for i, blk, off in self.layout.get(n, []):
            c = F.zeros(blk.source.dim, blk.target.dim)
            for t in range(blk.size):
                if vec[off + t] != 0:
                    c = F.add(c, F.scale(vec[off + t], blk.basis[t]))
            comps[i] = c
        return GradedMap(self.source, self.target, n, comps)

    def from_map(self, f: GradedMap) -> np.ndarray:
        F = self.field
        n = f.degree
        out = F.zeros(1, self.dim(n))
        for i, blk, off in self.layout.get(n, []):
            if blk.size:
                out[0, off:off + blk.size] = blk.coords(f.comp(i).reshape(1, -1))[0]
        return out[0]

    def from_maps(self, fs: list) -> np.ndarray:
        F = self.field
        if not fs:
            return F.zeros(0, 0)
        return np.stack([self.from_map(f) for f in fs])


def hom_complex(X: BoundedComplex, Y: BoundedComplex) -> HomComplex:
    """Hom_A(X, Y) with d(f) = d_Y f + (-1)^{|f|+1} f d_X.

    Degree-n basis: for each source degree i in order, the hom_space basis
    of Hom_A(X^i, Y^{i+n})."""
    if X.algebra is not Y.algebra:
        raise AlgebraMismatch("complexes over different algebras")
    F = X.field
    xs = [i for i in X.degrees() if X.dim(i)]
    ys = [j for j in Y.degrees() if Y.dim(j)]
    if not xs or not ys:
        return HomComplex(F, 0, [], [], None, X, Y, {})
    lo, hi = min(ys) - max(xs), max(ys) - min(xs)
    layout, dims = {}, []
    for n in range(lo, hi + 1):
        entries, off = [], 0
        for i in xs:
            if Y.dim(i + n):
                blk = hom_block(X.term(i), Y.term(i + n))
                if blk.size:
                    entries.append((i, blk, off))
                    off += blk.size
        layout[n] = entries
        dims.append(off)
    diffs = []
    for n in range(lo, hi):
        D = F.zeros(dims[n - lo], dims[n + 1 - lo])
        tgt = {i: (blk, off) for i, blk, off in layout[n + 1]}
        for i, blk, off in layout[n]:
            # d_Y part lands in source degree i, f d_X part in source degree i-1
            if i in tgt:
                tb, toff = tgt[i]
                dy = Y.d(i + n)
                imgs = np.stack([F.dot(b, dy).reshape(-1) for b in blk.basis])
                D[off:off + blk.size, toff:toff + tb.size] = F.add(
                    D[off:off + blk.size, toff:toff + tb.size], tb.coords(imgs))
            if i - 1 in tgt:
                tb, toff = tgt[i - 1]
                dx = X.d(i - 1)
                imgs = np.stack([F.sign(F.dot(dx, b), n + 1).reshape(-1) for b in blk.basis])
                D[off:off + blk.size, toff:toff + tb.size] = F.add(
                    D[off:off + blk.size, toff:toff + tb.size], tb.coords(imgs))
        diffs.append(D)
    labels = [[(i, t) for i, blk, _ in layout[n] for t in range(blk.size)] for n in range(lo, hi + 1)]
    return HomComplex(F, lo, dims, diffs, labels, X, Y, layout)


# ---------------------------------------------------------------- homotopy category


@dataclass
class KHom:
    degree: int
    dim: int
    reps: list  # GradedMaps X -> Y of the given degree, closed
    homology: Homology
    complex: HomComplex


def homotopy_hom(X: BoundedComplex, Y: BoundedComplex, n: int, H: HomComplex | None = None) -> KHom:
    """Hom_{K(A)}(X, Y[n]) as H^n of the Hom complex."""
    H = H if H is not None else hom_complex(X, Y)
    h = homology(H, n)
    reps = [H.to_map(h.reps[t], n) for t in range(h.dim)]
    return KHom(n, h.dim, reps, h, H)


def null_homotopy_witness(f: GradedMap, H: HomComplex | None = None) -> Homotopy:
    """r with d(r) = f, or NotNullHomotopic carrying f's class in H^n."""
    if not f.is_chain_map():
        raise NotChainMap("only closed maps can be null-homotopic")
    F = f.field
    H = H if H is not None else hom_complex(f.source, f.target)
    n = f.degree
    v = H.from_map(f)
    if H.dim(n) == 0 or F.is_zero(v.reshape(1, -1)):
        return Homotopy(f, GradedMap(f.source, f.target, n - 1, {}))
    if H.dim(n - 1) == 0:
        raise NotNullHomotopic("no maps of degree one lower", homology(H, n).classes(v.reshape(1, -1)))
    sol = F.solve_left(H.d(n - 1), v.reshape(1, -1))
    if sol is None:
        raise NotNullHomotopic("map is not null-homotopic", homology(H, n).classes(v.reshape(1, -1)))
    wit = Homotopy(f, H.to_map(sol[0], n - 1))
    if not wit.verify():
        raise ComplexError("homotopy witness failed to verify")
    return wit


def is_null_homotopic(f: GradedMap, H: HomComplex | None = None) -> bool:
    try:
        null_homotopy_witness(f, H)
    except NotNullHomotopic:
        return False
    return True


def is_contractible(X: BoundedComplex) -> bool:
    return is_null_homotopic(X.identity())


@dataclass
class HomotopyEquivalence:
    u: GradedMap  # X -> Y
    v: GradedMap  # Y -> X
    vu: Homotopy  # v o u - id_X null-homotopic
    uv: Homotopy  # u o v - id_Y null-homotopic

    def verify(self) -> bool:
        return (self.vu.verify() and self.uv.verify()
                and self.vu.f.equals(self.u.then(self.v) - self.u.source.identity())
                and self.uv.f.equals(self.v.then(self.u) - self.v.source.identity()))


def homotopy_inverse(u: GradedMap) -> HomotopyEquivalence | None:
    """Inverse of u in K(A) with explicit homotopies, or None if u is not invertible."""
    F = u.field
    X, Y = u.source, u.target
    HYX = hom_complex(Y, X)
    HYY = hom_complex(Y, Y)
    k = homotopy_hom(Y, X, 0, HYX)
    hyy = homology(HYY, 0)
    idY = hyy.classes(HYY.from_map(Y.identity()).reshape(1, -1)) if HYY.dim(0) else F.zeros(1, 0)
    if k.dim == 0:
        if hyy.dim:
            return None
        v = GradedMap(Y, X, 0, {})
    else:
        imgs = np.stack([hyy.classes(HYY.from_map(rep.then(u)).reshape(1, -1))[0] for rep in k.reps]) \
            if hyy.dim else F.zeros(k.dim, 0)
        coef = F.solve_left(imgs, idY) if hyy.dim else F.zeros(1, k.dim)
        if coef is None:
            return None
        v = GradedMap(Y, X, 0, {})
        for c, rep in zip(coef[0], k.reps):
            if c != 0:
                v = v + rep.scaled(c)
    try:
        w1 = null_homotopy_witness(u.then(v) - X.identity())
        w2 = null_homotopy_witness(v.then(u) - Y.identity(), HYY)
    except NotNullHomotopic:
        return None
    return HomotopyEquivalence(u, v, w1, w2)


def find_homotopy_equivalence(X: BoundedComplex, Y: BoundedComplex, seed: int = 0, tries: int = 12):
    """Search Hom_K(X, Y) for a homotopy equivalence (seeded random combinations)."""
    k = homotopy_hom(X, Y, 0)
    rng = random.Random(seed)
    cands = list(k.reps)
    for _ in range(tries):
        if not k.reps:
            break
        m = GradedMap(X, Y, 0, {})
        for rep in k.reps:
            m = m + rep.scaled(rng.randint(-4, 4))
        cands.append(m)
    if not k.reps:
        cands = [GradedMap(X, Y, 0, {})]
    for u in cands:
        eq = homotopy_inverse(u)
        if eq is not None:
            return eq
    return None


# ---------------------------------------------------------------- bimodule complexes and tensor


@dataclass(eq=False)
class BimoduleComplex:
    """Complex of (left, right)-bimodules with bimodule-linear differentials."""

    left: FDAlgebra
    right: FDAlgebra
    lo: int
    terms: list  # FDBimodule
    diffs: list
    name: str = ""

    @property
    def field(self):
        return self.right.field

    @property
    def hi(self):
        return self.lo + len(self.terms) - 1

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def dim(self, i):
        return self.terms[i - self.lo].dim if self.lo <= i <= self.hi else 0

    def d(self, i):
        if self.lo <= i < self.hi:
            return self.diffs[i - self.lo]
        return self.field.zeros(self.dim(i), self.dim(i + 1))

    def check(self) -> None:
        F = self.field
        for t in self.terms:
            t.check()
        for i in range(self.lo, self.hi):
            D = self.d(i)
            s, t = self.terms[i - self.lo], self.terms[i + 1 - self.lo]
            for g in self.right.generators():
                if not F.equal(F.dot(s.rho[g], D), F.dot(D, t.rho[g])):
                    raise ComplexError(f"differential in degree {i} is not right linear")
            for g in self.left.generators():
                if not F.equal(F.dot(s.lam[g], D), F.dot(D, t.lam[g])):
                    raise ComplexError(f"differential in degree {i} is not left linear")
        for i in range(self.lo, self.hi - 1):
            if not F.is_zero(F.dot(self.d(i), self.d(i + 1))):
                raise ComplexError(f"d o d != 0 starting in degree {i}")

    def right_complex(self) -> BoundedComplex:
        return BoundedComplex(self.right, self.lo, [t.right_module() for t in self.terms], list(self.diffs), self.name)


@dataclass
class TensorTerm:
    i: int  # degree of the X factor
    j: int  # degree of the Y factor
    quotient: Quotient  # X^i (x)_k Y^j -> X^i (x)_A Y^j
    offset: int


@dataclass
class Tensor:
    complex: BoundedComplex
    layout: dict  # p -> list of TensorTerm


def tensor_complex(X: BoundedComplex, Y: BimoduleComplex, name: str = "") -> Tensor:
    """X (x)_A Y for a right A-complex X and an (A, B)-bimodule complex Y.

    Each term is the quotient of X^i (x)_k Y^j by the span of
    xa (x) y - x (x) ay; d(x (x) y) = dx (x) y + (-1)^{|x|} x (x) dy."""
    A = X.algebra
    if Y.left is not A:
        raise AlgebraMismatch("bimodule complex does not act on the left by the complex's algebra")
    B = Y.right
    F = A.field
    from .algebra import FDModule as _FDM

    xs = [i for i in X.degrees() if X.dim(i)]
    ys = [j for j in Y.degrees() if Y.dim(j)]
    if not xs or not ys:
        return Tensor(zero_complex(B), {})
    lo, hi = min(xs) + min(ys), max(xs) + max(ys)
    layout, terms = {}, []
    for p in range(lo, hi + 1):
        entries, off, mods = [], 0, []
        for i in xs:
            j = p - i
            if not Y.dim(j):
                continue
            a, b = X.dim(i), Y.dim(j)
            Xi, Yj = X.term(i), Y.terms[j - Y.lo]
            rels = [F.sub(F.kron(Xi.action[g], F.eye(b)), F.kron(F.eye(a), Yj.lam[g])) for g in A.generators()]
            rel = F.row_basis(np.concatenate(rels)) if rels else F.zeros(0, a * b)
            q = quotient_basis(F, F.eye(a * b), rel, check=False)
            if q.dim == 0:
                continue
            act = F.zeros(B.dim * q.dim, q.dim).reshape(B.dim, q.dim, q.dim)
            for t in range(B.dim):
                act[t] = q.project(F.dot(q.reps, F.kron(F.eye(a), Yj.rho[t])))
            mods.append(_FDM(B, act, f"{Xi.name}(x){Yj.name}"))
            entries.append(TensorTerm(i, j, q, off))
            off += q.dim
        layout[p] = entries
        terms.append(direct_sum_modules(mods) if mods else zero_module(B))
    diffs = []
    for p in range(lo, hi):
        D = F.zeros(terms[p - lo].dim, terms[p + 1 - lo].dim)
        tgt = {(e.i, e.j): e for e in layout[p + 1]}
        for e in layout[p]:
            a, b = X.dim(e.i), Y.dim(e.j)
            src_rows = e.quotient.reps
            nxt = tgt.get((e.i + 1, e.j))
            if nxt is not None:
                img = F.dot(src_rows, F.kron(X.d(e.i), F.eye(b)))
                D[e.offset:e.offset + e.quotient.dim, nxt.offset:nxt.offset + nxt.quotient.dim] = nxt.quotient.project(img)
            nxt = tgt.get((e.i, e.j + 1))
            if nxt is not None:
                img = F.sign(F.dot(src_rows, F.kron(F.eye(a), Y.d(e.j))), e.i)
                blk = D[e.offset:e.offset + e.quotient.dim, nxt.offset:nxt.offset + nxt.quotient.dim]
                D[e.offset:e.offset + e.quotient.dim, nxt.offset:nxt.offset + nxt.quotient.dim] = F.add(blk, nxt.quotient.project(img))
        diffs.append(D)
    T = BoundedComplex(B, lo, terms, diffs, name or f"{X.name}(x){Y.name}")
    return Tensor(T, layout)


def tensor_map(f: GradedMap, Y: BimoduleComplex, TX: Tensor, TZ: Tensor) -> GradedMap:
    """f (x) 1 : X (x)_A Y -> Z (x)_A Y for a graded map f: X -> Z (no sign: f sits on the left)."""
    F = f.field
    n = f.degree
    comps = {}
    for p, entries in TX.layout.items():
        tgt = {(e.i, e.j): e for e in TZ.layout.get(p + n, [])}
        C = F.zeros(TX.complex.dim(p), TZ.complex.dim(p + n))
        hit = False
        for e in entries:
            t = tgt.get((e.i + n, e.j))
            if t is None:
                continue
            img = F.dot(e.quotient.reps, F.kron(f.comp(e.i), F.eye(Y.dim(e.j))))
            C[e.offset:e.offset + e.quotient.dim, t.offset:t.offset + t.quotient.dim] = t.quotient.project(img)
            hit = True
        if hit:
            comps[p] = C
    return GradedMap(TX.complex, TZ.complex, n, comps)


def resolution_complex(R, name: str = "") -> BoundedComplex:
    """The truncated resolution P^{-L} -> ... -> P^0 as a bounded complex."""
    mods = list(reversed(R.modules))
    diffs = [m.matrix for m in reversed(R.maps)]
    A = R.augmentation.target.algebra
    return make_complex(A, -(len(mods) - 1), mods, diffs, name or f"P({R.augmentation.target.name})")
