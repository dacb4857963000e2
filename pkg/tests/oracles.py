"""Independent reference computations for the tests.

Everything here works on plain Python lists of Fractions and re-derives the
quantities from the raw action matrices, without touching the package's Hom,
homology or resolution code."""

from __future__ import annotations

from fractions import Fraction
from itertools import product


def to_frac(m) -> list[list[Fraction]]:
    return [[Fraction(int(x.numerator), int(x.denominator)) if hasattr(x, "denominator") else Fraction(int(x))
             for x in row] for row in m]


def rank(rows: list[list[Fraction]]) -> int:
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    ncol = len(rows[0])
    r = 0
    for c in range(ncol):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [v / p for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def nullspace(eqs: list[list[Fraction]], nvars: int) -> list[list[Fraction]]:
    """Basis of {v : sum_j eq[j] v_j = 0 for every equation}."""
    rows = [list(e) for e in eqs if any(e)]
    pivots, r = [], 0
    for c in range(nvars):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [v / p for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(nvars) if c not in pivots]
    out = []
    for fc in free:
        v = [Fraction(0)] * nvars
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        out.append(v)
    return out


def matmul(a, b):
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum((a[i][k] * b[k][j] for k in range(inner)), Fraction(0)) for j in range(cols)] for i in range(len(a))]


def zeros(m, n):
    return [[Fraction(0)] * n for _ in range(m)]


# ---------------------------------------------------------------- Hom spaces


def hom_basis(act_m: list, act_n: list) -> list:
    """Basis of {F : act_m[b] F = F act_n[b] for all b} as matrices (lists of rows)."""
    m = len(act_m[0]) if act_m else 0
    n = len(act_n[0]) if act_n else 0
    if m == 0 or n == 0:
        return []
    eqs = []
    for am, an in zip(act_m, act_n):
        # (am F - F an)[i][j] = sum_k am[i][k] F[k][j] - sum_k F[i][k] an[k][j]
        for i in range(m):
            for j in range(n):
                e = [Fraction(0)] * (m * n)
                for k in range(m):
                    e[k * n + j] += am[i][k]
                for k in range(n):
                    e[i * n + k] -= an[k][j]
                eqs.append(e)
    sols = nullspace(eqs, m * n)
    return [[v[i * n:(i + 1) * n] for i in range(m)] for v in sols]


def module_action(M) -> list:
    return [to_frac(M.action[i]) for i in range(len(M.action))]


def complex_data(X):
    """(lo, hi, actions per degree, differentials per degree) as Fractions."""
    acts = {i: module_action(X.term(i)) for i in X.degrees()}
    dims = {i: X.dim(i) for i in X.degrees()}
    diffs = {i: to_frac(X.d(i)) for i in range(X.lo, X.hi)}
    return X.lo, X.hi, acts, dims, diffs


def khom_dim(X, Y, n: int) -> int:
    """dim of closed degree-n graded maps X -> Y modulo null-homotopic ones.

    Closed: f^i d_Y = (-1)^n d_X f^{i+1}; homotopies: r^i d_Y + (-1)^{n} d_X r^{i+1}
    for r of degree n - 1.  Maps are parametrised by Hom-space bases computed
    from scratch."""
    xl, xh, xa, xd, xdf = complex_data(X)
    yl, yh, ya, yd, ydf = complex_data(Y)

    def ydim(j):
        return yd.get(j, 0)

    def yact(j):
        return ya.get(j)

    def dX(i):
        return xdf.get(i) or zeros(xd.get(i, 0), xd.get(i + 1, 0))

    def dY(j):
        return ydf.get(j) or zeros(ydim(j), ydim(j + 1))

    def param(deg):
        blocks = {}
        for i in range(xl, xh + 1):
            if xd[i] and ydim(i + deg):
                B = hom_basis(xa[i], yact(i + deg))
                if B:
                    blocks[i] = B
        return blocks

    def image_vectors(blocks, deg, sign):
        """Flattened d(g) for each basis element g, d(g)^i = g^i dY + sign dX g^{i+1}."""
        out_keys = [i for i in range(xl - 1, xh + 1) if xd.get(i, 0) and ydim(i + deg + 1)]
        vecs = []
        for i0, B in blocks.items():
            for g in B:
                comp = {}
                # g sits in slot i0; contributes to d(g)^{i0} via g dY and to d(g)^{i0-1} via dX g
                comp[i0] = matmul(g, dY(i0 + deg))
                prev = i0 - 1
                if xd.get(prev, 0):
                    t = matmul(dX(prev), g)
                    comp[prev] = [[sign * v for v in row] for row in t]
                flat = []
                for k in out_keys:
                    c = comp.get(k)
                    rows_k, cols_k = xd.get(k, 0), ydim(k + deg + 1)
                    if c is None or not c or (c and len(c[0]) == 0):
                        flat += [Fraction(0)] * (rows_k * cols_k)
                    else:
                        flat += [v for row in c for v in row]
                vecs.append(flat)
        return vecs

    fb = param(n)
    nf = sum(len(B) for B in fb.values())
    if nf == 0:
        return 0
    closed_imgs = image_vectors(fb, n, -((-1) ** n))
    # closed space: coefficient vectors c with sum c_k img_k = 0
    length = len(closed_imgs[0]) if closed_imgs else 0
    eqs = [[closed_imgs[k][p] for k in range(nf)] for p in range(length)]
    zdim = len(nullspace(eqs, nf))
    rb = param(n - 1)
    if not rb:
        return zdim
    # boundaries live in the same coordinates as f; express d(r) in f's Hom-basis
    bimgs = image_vectors(rb, n - 1, -((-1) ** (n - 1)))
    # convert each boundary (flat matrices) to coordinates in the f basis
    f_flat = []
    keys = [i for i in range(xl, xh + 1) if xd[i] and ydim(i + n)]
    for i0, B in fb.items():
        for g in B:
            flat = []
            for k in keys:
                if k == i0:
                    flat += [v for row in g for v in row]
                else:
                    flat += [Fraction(0)] * (xd[k] * ydim(k + n))
            f_flat.append(flat)
    # reorder boundary vectors into the same key layout
    bkeys = [i for i in range(xl - 1, xh + 1) if xd.get(i, 0) and ydim(i + n)]
    b_flat = []
    for v in bimgs:
        pos, parts = 0, {}
        for k in bkeys:
            size = xd.get(k, 0) * ydim(k + n)
            parts[k] = v[pos:pos + size]
            pos += size
        flat = []
        for k in keys:
            flat += parts.get(k, [Fraction(0)] * (xd[k] * ydim(k + n)))
        b_flat.append(flat)
    return zdim - rank(b_flat)


# ---------------------------------------------------------------- local algebras: Ext by dimension shifting


def _submodule_closure(vectors, action):
    """Row span of vectors closed under the action matrices."""
    basis = []
    todo = [list(v) for v in vectors]
    while todo:
        v = todo.pop()
        if rank(basis + [v]) > len(basis):
            basis.append(v)
            for a in action:
                todo.append(matmul([v], a)[0])
    return basis


def _basis_coords(basis, v):
    """Coordinates of v in the given independent rows."""
    n = len(basis)
    eqs = [[basis[i][j] for i in range(n)] + [-v[j]] for j in range(len(v))]
    sols = nullspace(eqs, n + 1)
    for s in sols:
        if s[n] != 0:
            return [x / s[n] for x in s[:n]]
    raise ValueError("vector not in span")


def syzygy_action(alg_mult, unit_index: int, act):
    """Kernel of a free cover A^t -> K for a module over a local algebra.

    ``alg_mult[i][j]`` is the coordinate vector of b_i b_j; the radical is
    spanned by the non-unit basis elements.  Returns the kernel's action
    matrices (one per algebra basis element) in a chosen basis."""
    d = len(alg_mult)
    m = len(act[0]) if act else 0
    if m == 0:
        return []
    rad_images = [row for i in range(d) if i != unit_index for row in act[i]]
    rad_span = rank(rad_images) if rad_images else 0
    # top generators: extend a basis of K.rad to K
    base = [r for r in rad_images]
    gens = []
    for j in range(m):
        e = [Fraction(int(j == k)) for k in range(m)]
        if rank(base + gens + [e]) > rank(base + gens):
            gens.append(e)
    t = len(gens)
    assert rad_span + t >= m
    # free module A^t: row coordinate (g, i) for generator g and basis b_i; map (g, b_i) -> gens[g] . b_i
    pi = [matmul([gens[g]], act[i])[0] for g in range(t) for i in range(d)]
    ker = nullspace([[pi[r][c] for r in range(t * d)] for c in range(m)], t * d)
    # right action on A^t: (g, b_i) . b_j = (g, b_i b_j)
    free_act = []
    for j in range(d):
        M = zeros(t * d, t * d)
        for g in range(t):
            for i in range(d):
                for k, c in enumerate(alg_mult[i][j]):
                    M[g * d + i][g * d + k] += c
        free_act.append(M)
    kb = _submodule_closure(ker, free_act)
    assert len(kb) == len(ker)
    out = []
    for j in range(d):
        rows = [_basis_coords(kb, matmul([v], free_act[j])[0]) for v in kb]
        out.append(rows)
    return out, t


def ext_dim(alg_mult, unit_index, act_m, act_n, i: int) -> int:
    """dim Ext^i(M, N) over a local algebra, by dimension shifting."""
    if i == 0:
        return len(hom_basis(act_m, act_n))
    K = act_m
    for _ in range(i - 1):
        if not K or not K[0]:
            return 0
        K, _t = syzygy_action(alg_mult, unit_index, K)
    if not K or not K[0]:
        return 0
    # Ext^1(K, N) = Hom(Omega K, N) / (restrictions of Hom(A^t, N))
    res = syzygy_action(alg_mult, unit_index, K)
    omega, t = res
    if not omega or not omega[0]:
        return 0
    hom_omega = hom_basis(omega, act_n)
    if not hom_omega:
        return 0
    # restriction map needs the embedding Omega K -> A^t; recompute it
    d = len(alg_mult)
    m = len(K[0])
    emb = _kernel_embedding(alg_mult, unit_index, K)
    free_act = []
    for j in range(d):
        M = zeros(t * d, t * d)
        for g in range(t):
            for ii in range(d):
                for k, c in enumerate(alg_mult[ii][j]):
                    M[g * d + ii][g * d + k] += c
        free_act.append(M)
    hom_free = hom_basis(free_act, act_n)
    restricted = [[v for row in matmul(emb, h) for v in row] for h in hom_free]
    del m
    total = [[v for row in h for v in row] for h in hom_omega]
    return len(total) - rank(restricted) if restricted else len(total)


def _kernel_embedding(alg_mult, unit_index, act):
    d = len(alg_mult)
    m = len(act[0])
    rad_images = [row for i in range(d) if i != unit_index for row in act[i]]
    gens = []
    for j in range(m):
        e = [Fraction(int(j == k)) for k in range(m)]
        if rank(rad_images + gens + [e]) > rank(rad_images + gens):
            gens.append(e)
    t = len(gens)
    pi = [matmul([gens[g]], act[i])[0] for g in range(t) for i in range(d)]
    ker = nullspace([[pi[r][c] for r in range(t * d)] for c in range(m)], t * d)
    free_act = []
    for j in range(d):
        M = zeros(t * d, t * d)
        for g in range(t):
            for i in range(d):
                for k, c in enumerate(alg_mult[i][j]):
                    M[g * d + i][g * d + k] += c
        free_act.append(M)
    return _submodule_closure(ker, free_act)


def algebra_tables(A):
    mult = mult_table(A)
    unit = [i for i in range(A.dim) if A.unit[i] != 0]
    assert len(unit) == 1
    return mult, unit[0]


def mult_table(A) -> list:
    return [[[Fraction(int(v.numerator), int(v.denominator)) for v in A.mult[i, j]] for j in range(A.dim)]
            for i in range(A.dim)]


def unit_vector(A) -> list:
    return [Fraction(int(v.numerator), int(v.denominator)) for v in A.unit]


# ---------------------------------------------------------------- commutative monomial quotients


def quotient_ring_dim(nvars: int, relations: list[dict], weights: tuple, max_weight: int = 40) -> int:
    """dim of k[x_1..x_v]/(relations) for relations homogeneous in the given weights.

    Relations are {exponent tuple: coeff}.  A homogeneous ideal splits by weight,
    so the quotient is computed weight by weight; once a whole band of
    max(weights) consecutive weights is killed, every higher monomial is a
    multiple of one in the band and the count is final."""
    def wt(e):
        return sum(a * w for a, w in zip(e, weights))

    for rel in relations:
        assert len({wt(e) for e in rel}) == 1, "relation not homogeneous for the weights"
    band = max(weights)
    total, zero_run = 0, 0
    for w in range(max_weight + 1):
        monos = [e for e in product(range(w + 1), repeat=nvars) if wt(e) == w]
        if not monos:
            zero_run += 1
            if zero_run >= band:
                return total
            continue
        index = {e: k for k, e in enumerate(monos)}
        gens = []
        for rel in relations:
            rw = wt(next(iter(rel)))
            for shift in product(range(w + 1), repeat=nvars):
                if wt(shift) != w - rw:
                    continue
                v = [Fraction(0)] * len(monos)
                for e, c in rel.items():
                    v[index[tuple(a + b for a, b in zip(e, shift))]] += Fraction(c)
                gens.append(v)
        q = len(monos) - rank(gens)
        total += q
        zero_run = zero_run + 1 if q == 0 else 0
        if zero_run >= band:
            return total
    raise AssertionError("quotient did not terminate below max_weight")


# ---------------------------------------------------------------- two-sided tilting complex for A2


class _FracModule:
    def __init__(self, action):
        self.action = action
        self.dim = len(action[0]) if action else 0


class FracComplex:
    """Minimal complex of right modules in Fractions, readable by ``khom_dim``."""

    def __init__(self, lo, actions, diffs):
        self.lo = lo
        self.hi = lo + len(actions) - 1
        self._terms = [_FracModule(a) for a in actions]
        self._diffs = diffs

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def term(self, i):
        return self._terms[i - self.lo]

    def dim(self, i):
        return self._terms[i - self.lo].dim if self.lo <= i <= self.hi else 0

    def d(self, i):
        return self._diffs[i - self.lo]


def _right_ideal(mult, idem):
    """Row basis of idem*A inside A and the right action matrices on it."""
    n = len(mult)
    span = []
    for j in range(n):
        v = mult[idem][j]
        if rank(span + [v]) > len(span):
            span.append(v)
    act = []
    for b in range(n):
        rows = []
        for v in span:
            w = [sum((v[i] * mult[i][b][k] for i in range(n)), Fraction(0)) for k in range(n)]
            rows.append(_basis_coords(span, w))
        act.append(rows)
    return span, act


def apr_right_complex(mult, labels):
    """(e2 A --a*--> e1 A) + e1 A in degrees -1, 0, built from the table alone."""
    e1, e2, a = labels.index("e1"), labels.index("e2"), labels.index("a")
    n = len(mult)
    s2, act2 = _right_ideal(mult, e2)
    s1, act1 = _right_ideal(mult, e1)
    d = []
    for v in s2:
        w = [sum((mult[a][i][k] * v[i] for i in range(n)), Fraction(0)) for k in range(n)]
        d.append(_basis_coords(s1, w) + [Fraction(0)] * len(s1))
    k1 = len(s1)

    def block(m):
        out = zeros(2 * k1, 2 * k1)
        for i in range(k1):
            for j in range(k1):
                out[i][j] = out[k1 + i][k1 + j] = m[i][j]
        return out
    return FracComplex(-1, [act2, [block(m) for m in act1]], [d])


def bimodule_axioms(A_mult, unit_vec, lam, rho) -> bool:
    """lam, rho: per-basis action matrices (row-vector convention); unit as coefficients."""
    n = len(A_mult)
    dim = len(lam[0])
    eye = [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]

    def comb(mats, coeffs):
        out = zeros(dim, dim)
        for c, m in zip(coeffs, mats):
            if c:
                for i in range(dim):
                    for j in range(dim):
                        out[i][j] += c * m[i][j]
        return out
    if comb(lam, unit_vec) != eye or comb(rho, unit_vec) != eye:
        return False
    for x in range(n):
        for y in range(n):
            # right: (v x) y = v (xy); left: x (y v) = (xy) v, i.e. lam[xy] = lam[y] lam[x]
            if matmul(rho[x], rho[y]) != comb(rho, A_mult[x][y]):
                return False
            if matmul(lam[y], lam[x]) != comb(lam, A_mult[x][y]):
                return False
            if matmul(lam[x], rho[y]) != matmul(rho[y], lam[x]):
                return False
    return True
