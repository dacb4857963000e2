"""Ready-made instances: the two-loop algebra k[x,y]/(x^n - y^s, xy), truncated
polynomial rings k[x]/(x^n), and a two-sided tilting complex over the A2 quiver."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .algebra import (
    FDAlgebra,
    FDModule,
    QuiverPresentation,
    bimodule_from_actions,
    build_algebra_from_quiver,
    cyclic_quotient,
    find_isomorphism,
    quiver_path_vector,
    regular_bimodule,
    regular_module,
    resolve,
    syzygy,
)
from .complexes import (
    BimoduleComplex,
    BoundedComplex,
    GradedMap,
    HomotopyEquivalence,
    cone,
    direct_sum,
    find_homotopy_equivalence,
    make_complex,
    null_homotopy_witness,
    resolution_complex,
    stalk,
)
from .equivalence import ApproxCheck, verify_approximation
from .linalg import QQ, FieldSpec


class ExampleError(ValueError):
    pass


def left_mult(A: FDAlgebra, path) -> object:
    """Matrix of a -> x a on the regular right module, for the path x."""
    return A.combine(A.left_mats(), quiver_path_vector(A, tuple(path)))


# ---------------------------------------------------------------- two-loop algebra


def dugas_algebra(n: int, s: int, field: FieldSpec = QQ) -> FDAlgebra:
    if n < 2 or s < 2:
        raise ExampleError("n and s must be at least 2")
    rel = {(0,) * n: 1, (1,) * s: -1}
    pres = QuiverPresentation(["1"], [("x", 0, 0), ("y", 0, 0)], [rel, {(0, 1): 1}, {(1, 0): 1}],
                              nilpotency_cap=n + s + 2, field=field)
    return build_algebra_from_quiver(pres, f"k[x,y]/(x^{n}-y^{s},xy)")


@dataclass
class DugasExample:
    n: int
    s: int
    A: FDAlgebra
    T1: BoundedComplex  # A in degree 0
    T2: BoundedComplex  # A -x-> A
    Ty: BoundedComplex  # A -y-> A
    Mprime: BoundedComplex  # T1[1] + T1
    f: GradedMap  # T2 -> T1[1] + T1, components (1, y)
    g: GradedMap  # T1[1] + T1 -> Ty, components (x, 1)
    cone_equivalence: HomotopyEquivalence | None
    checks: dict = dc_field(default_factory=dict)

    def objects(self) -> dict:
        return {"A": self.A, "T1": self.T1, "T2": self.T2, "Ty": self.Ty, "Mprime": self.Mprime,
                "f": self.f, "g": self.g}


def example_dugas(n: int = 2, s: int = 2, field: FieldSpec = QQ, window=(-3, 3)) -> DugasExample:
    A = dugas_algebra(n, s, field)
    F = A.field
    R = regular_module(A)
    x, y = left_mult(A, (0,)), left_mult(A, (1,))
    d = A.dim
    T1 = stalk(R, 0, "T1")
    T2 = make_complex(A, -1, [R, R], [x], "T2")
    Ty = make_complex(A, -1, [R, R], [y], "Ty")
    Mp = make_complex(A, -1, [R, R], [F.zeros(d, d)], "T1[1]+T1")
    f = GradedMap(T2, Mp, 0, {-1: F.eye(d), 0: y})
    g = GradedMap(Mp, Ty, 0, {-1: x, 0: F.eye(d)})
    checks = {"f_chain": f.is_chain_map(), "g_chain": g.is_chain_map()}
    C = cone(f)
    checks["cone_witness"] = C.r.verify()
    eq = find_homotopy_equivalence(C.complex, Ty)
    checks["cone_equiv_Ty"] = eq is not None and eq.verify()
    try:
        checks["g_after_f_null"] = null_homotopy_witness(f.then(g)).verify()
    except Exception:
        checks["g_after_f_null"] = False
    left = verify_approximation(f, T1, window, "left")
    right = verify_approximation(g, T1, window, "right")
    checks["left_approximation"] = left.passed
    checks["right_approximation"] = right.passed
    ex = DugasExample(n, s, A, T1, T2, Ty, Mp, f, g, eq, checks)
    ex.left_check: ApproxCheck = left
    ex.right_check: ApproxCheck = right
    ex.cone = C
    return ex


def dugas_tilting(ex: DugasExample) -> BoundedComplex:
    return direct_sum([ex.T1, ex.T2], name="T1+T2").complex


# ---------------------------------------------------------------- truncated polynomial rings


def truncated_polynomial(n: int, field: FieldSpec = QQ) -> FDAlgebra:
    if n < 2:
        raise ExampleError("n must be at least 2")
    pres = QuiverPresentation(["1"], [("x", 0, 0)], [{(0,) * n: 1}], nilpotency_cap=n + 1, field=field)
    return build_algebra_from_quiver(pres, f"k[x]/(x^{n})")


def x_power_module(A: FDAlgebra, r: int) -> FDModule:
    """X_r = k[x]/(x^r) as a right module over k[x]/(x^n)."""
    M = cyclic_quotient(A, [quiver_path_vector(A, (0,) * r)], f"X{r}")
    return M


def is_left_mult_by_power(A: FDAlgebra, mat, r: int) -> bool:
    """mat is a -> u x^r a for a unit u (image (x^r), not contained in (x^{r+1}))."""
    F = A.field
    target = left_mult(A, (0,) * r)
    return F.rank(mat) == F.rank(target) and F.contains(target, mat)


@dataclass
class NakayamaExample:
    n: int
    r: int
    A: FDAlgebra
    Xr: FDModule
    Xs: FDModule  # X_{n-r}
    length: int
    resolution_r: object
    resolution_s: object
    checks: dict

    def objects(self) -> dict:
        A = self.A
        R = regular_module(A)
        from .algebra import direct_sum_modules
        return {f"nak{self.n}": A, "R": R, f"X{self.r}": self.Xr, f"X{self.n - self.r}": self.Xs,
                f"AplusX{self.r}": direct_sum_modules([R, self.Xr]),
                f"AplusX{self.n - self.r}": direct_sum_modules([R, self.Xs]),
                f"P_X{self.r}": resolution_complex(self.resolution_r, f"P_X{self.r}"),
                f"P_X{self.n - self.r}": resolution_complex(self.resolution_s, f"P_X{self.n - self.r}")}


def example_nakayama(n: int = 3, r: int = 1, L: int = 4, field: FieldSpec = QQ) -> NakayamaExample:
    if not (1 <= r <= n - 1):
        raise ExampleError("need 1 <= r <= n-1")
    A = truncated_polynomial(n, field)
    Xr, Xs = x_power_module(A, r), x_power_module(A, n - r)
    Rr, Rs = resolve(Xr, L), resolve(Xs, L)
    checks = {
        "syzygy_r": find_isomorphism(syzygy(Xr), Xs) is not None,
        "syzygy_s": find_isomorphism(syzygy(Xs), Xr) is not None,
    }
    # d^{-1} multiplies by x^r, then the powers alternate
    for name, R, first, second in (("r", Rr, r, n - r), ("s", Rs, n - r, r)):
        ok = True
        for k, m in enumerate(R.maps):
            ok = ok and is_left_mult_by_power(A, m.matrix, first if k % 2 == 0 else second)
        checks[f"alternating_{name}"] = ok
    return NakayamaExample(n, r, A, Xr, Xs, L, Rr, Rs, checks)


# ---------------------------------------------------------------- A2 and its reflection tilt


def a2_algebra(field: FieldSpec = QQ) -> FDAlgebra:
    pres = QuiverPresentation(["1", "2"], [("a", 0, 1)], [], nilpotency_cap=3, field=field)
    return build_algebra_from_quiver(pres, "A2")


def regular_bimodule_complex(A: FDAlgebra) -> BimoduleComplex:
    return BimoduleComplex(A, A, 0, [regular_bimodule(A)], [], "A")


def a2_tilting_bimodule(A: FDAlgebra | None = None) -> BimoduleComplex:
    """Two-sided complex for the reflection (APR) tilt of A2 at the simple projective.

    As a right module complex it is (P2 -> P1) + P1 over B = A2; the left A2
    action identifies End of that complex with A2 again.  Basis of A2 is
    [e1, e2, a] with a: 1 -> 2; P1 = e1 A2 = span(e1, a), P2 = e2 A2 = span(e2)."""
    A = A if A is not None else a2_algebra()
    F = A.field
    idx = {lab: A.labels.index(lab) for lab in A.labels}
    e1, e2, a = idx["e1"], idx["e2"], idx["a"]

    def mats(assign, dim):
        out = [F.zeros(dim, dim) for _ in range(A.dim)]
        for k, m in assign.items():
            out[k] = F.array(m)
        return out

    # degree -1: right P2, left simple at vertex 1
    rho_m1 = mats({e2: [[1]]}, 1)
    lam_m1 = mats({e1: [[1]]}, 1)
    # degree 0: P1 + P1 with coordinates (u_e1, u_a, v_e1, v_a)
    r1 = {e1: [[1, 0], [0, 0]], e2: [[0, 0], [0, 1]], a: [[0, 1], [0, 0]]}
    rho_0 = mats({k: _blockdiag(F, F.array(m), F.array(m)) for k, m in r1.items()}, 4)
    I2, Z2 = F.eye(2), F.zeros(2, 2)
    lam_0 = mats({e1: _blocks(F, I2, Z2, Z2, Z2), e2: _blocks(F, Z2, Z2, Z2, I2),
                  a: _blocks(F, Z2, Z2, I2, Z2)}, 4)
    Ym1 = bimodule_from_actions(A, A, lam_m1, rho_m1, "P2")
    Y0 = bimodule_from_actions(A, A, lam_0, rho_0, "P1+P1")
    d = F.array([[0, 1, 0, 0]])  # e2 -> (a, 0)
    Y = BimoduleComplex(A, A, -1, [Ym1, Y0], [d], "Y_APR")
    Y.check()
    return Y


def _blockdiag(F, a, b):
    out = F.zeros(a.shape[0] + b.shape[0], a.shape[1] + b.shape[1])
    out[:a.shape[0], :a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out.tolist()


def _blocks(F, a, b, c, d):
    """[[a, b], [c, d]] as a nested list."""
    top = [list(ra) + list(rb) for ra, rb in zip(a.tolist(), b.tolist())]
    bot = [list(rc) + list(rd) for rc, rd in zip(c.tolist(), d.tolist())]
    return top + bot
