"""Acceptance checks, one group per criterion.

Each test carries ``@pytest.mark.criterion(n)``; the conftest hook prints a
``criterion n: PASS/FAIL`` line per criterion at the end of the run, and each
test also prints its own line (visible with ``-s``)."""

import random
import time

import pytest

import oracles as O
from dgendo.algebra import find_isomorphism, regular_module, resolve, syzygy, vertex_simple
from dgendo.complexes import (
    cone,
    cone_exactness,
    direct_sum,
    find_homotopy_equivalence,
    hom_complex,
    homology,
    is_null_homotopic,
    null_homotopy_witness,
    resolution_complex,
    shift,
    stalk,
)
from dgendo.dg import algebra_as_dg, end_dg_algebra, f_rho, validate
from dgendo.equivalence import (
    auslander_yoneda,
    left_approximation,
    resolution_independence,
    standard_equiv_tensor_map,
    theorem41_pipeline,
    tilting_selforthogonality,
    truncated_end,
    verify_approximation,
)
from dgendo.examples import a2_tilting_bimodule, example_dugas, regular_bimodule_complex
from dgendo.linalg import QQ
from dgendo.randomized import module_pool, random_chain_map, random_complex

criterion = pytest.mark.criterion

# every DG algebra built below is collected here and validated in criterion 6
_BUILT: list = []


def _report(n, label, ok):
    print(f"criterion {n} [{label}]: {'PASS' if ok else 'FAIL'}")
    return ok


def _bijective(verdict):
    return all(r["rank"] == r["source"] == r["target"] for r in verdict.ranks.values())


# ---------------------------------------------------------------- 1


@criterion(1)
def test_c1_hom_complex_cohomology_is_homotopy_hom(dugas, k3):
    rng = random.Random(2024)
    start = time.perf_counter()
    cases = 0
    mismatches = []
    for A in (dugas.A, k3):
        pool = module_pool(A, 6)
        for _ in range(26):
            X = random_complex(A, rng, width=4, max_dim=6, pool=pool)
            Y = random_complex(A, rng, width=4, max_dim=6, pool=pool)
            assert X.hi - X.lo + 1 <= 4 and Y.hi - Y.lo + 1 <= 4
            assert all(X.term(i).dim <= 6 for i in X.degrees())
            H = hom_complex(X, Y)
            for n in range(H.lo - 1, H.hi + 2):
                got = homology(H, n).dim if H.lo <= n <= H.hi else 0
                want = O.khom_dim(X, Y, n)
                if got != want:
                    mismatches.append((cases, n, got, want))
            cases += 1
    elapsed = time.perf_counter() - start
    ok = cases >= 50 and not mismatches and elapsed < 120
    _report(1, f"{cases} pairs, {elapsed:.1f}s", ok)
    assert cases >= 50
    assert not mismatches
    assert elapsed < 120


# ---------------------------------------------------------------- 2


@criterion(2)
def test_c2_two_loop_example():
    start = time.perf_counter()
    ex = example_dugas(2, 2)
    assert ex.A.dim == 4 == O.quotient_ring_dim(2, [{(2, 0): 1, (0, 2): -1}, {(1, 1): 1}], (2, 2))
    assert all(ex.checks.values()), ex.checks
    C = cone(ex.f)
    assert C.r.verify()
    eq = find_homotopy_equivalence(C.complex, ex.Ty)
    assert eq is not None and eq.verify()
    assert ex.cone_equivalence is not None and ex.cone_equivalence.verify()
    assert null_homotopy_witness(ex.f.then(ex.g)).verify()
    left = left_approximation(ex.T2, ex.T1, (-3, 3))
    assert left.check.passed
    assert verify_approximation(ex.f, ex.T1, (-3, 3)).passed
    assert verify_approximation(ex.g, ex.T1, (-3, 3), "right").passed
    elapsed = time.perf_counter() - start
    assert elapsed < 30
    _report(2, f"{elapsed:.1f}s", True)


# ---------------------------------------------------------------- 3


@criterion(3)
def test_c3_two_sided_certificates(dugas):
    start = time.perf_counter()
    rep = theorem41_pipeline(dugas.T2, dugas.T1, (-3, 3))
    elapsed = time.perf_counter() - start
    _BUILT.extend([rep.objects["Lambda"], rep.objects["Gamma"]])
    assert rep.left_verdict.passed and rep.right_verdict.passed
    assert all(c.passed for c in rep.left_map_checks + rep.right_map_checks)
    assert all(rep.witnesses.values())
    for v in (rep.left_verdict, rep.right_verdict):
        assert v.ranks, "empty rank table"
        assert _bijective(v), v.ranks
    assert rep.passed
    d = rep.as_dict()
    assert d["quasi_balanced_left"]["pass"] and d["quasi_balanced_right"]["pass"]
    assert elapsed < 60
    _report(3, f"{elapsed:.1f}s", True)


# ---------------------------------------------------------------- 4


@criterion(4)
@pytest.mark.parametrize("key,expected", [("AX1", (6, 1, 1, 1, 1)), ("AX2", (9, 1, 1, 1, 1))])
def test_c4_yoneda_dims(k3, k3_modules, key, expected):
    N = k3_modules[key]
    Y = auslander_yoneda(N, (0, 4), 8)
    mult, u = O.algebra_tables(k3)
    act = O.module_action(N)
    oracle = tuple(O.ext_dim(mult, u, act, act, i) for i in range(5))
    _BUILT.append(truncated_end(N, 8)[3])
    ok = Y.dims_tuple() == oracle == expected
    _report(4, f"{key} {Y.dims_tuple()}", ok)
    assert oracle == expected
    assert Y.dims_tuple() == expected


@criterion(4)
def test_c4_syzygy_swaps_the_quotients(k3_modules):
    for a, b in (("X1", "X2"), ("X2", "X1")):
        iso = find_isomorphism(syzygy(k3_modules[a]), k3_modules[b])
        assert iso is not None
        f, g = iso
        src, tgt = O.module_action(f.source), O.module_action(f.target)
        F, G = O.to_frac(f.matrix), O.to_frac(g.matrix)
        for b in range(len(src)):
            assert O.matmul(src[b], F) == O.matmul(F, tgt[b])
            assert O.matmul(tgt[b], G) == O.matmul(G, src[b])
        assert QQ.equal(QQ.dot(f.matrix, g.matrix), QQ.eye(f.matrix.shape[0]))
        assert QQ.equal(QQ.dot(g.matrix, f.matrix), QQ.eye(g.matrix.shape[0]))
    _report(4, "syzygy", True)


# ---------------------------------------------------------------- 5


@criterion(5)
def test_c5_resolution_independence(k3_modules):
    cmp = resolution_independence(k3_modules["X1"], 8)
    assert cmp.window == (-7, 7)
    assert cmp.raw_dims_minimal == cmp.raw_dims_free
    assert cmp.yoneda_minimal == cmp.yoneda_free
    assert cmp.homotopy_equivalence
    assert cmp.post_verdict.passed and cmp.pre_verdict.passed
    assert cmp.passed
    _report(5, "minimal vs free", True)


# ---------------------------------------------------------------- 6


@criterion(6)
def test_c6_f_rho_contractible(k3, dugas):
    rng = random.Random(606)
    pools = {id(A): module_pool(A, 6) for A in (k3, dugas.A)}
    for t in range(20):
        A = (k3, dugas.A)[t % 2]
        X = random_complex(A, rng, pool=pools[id(A)])
        R = f_rho(X)
        assert R.inclusion.is_chain_map() and R.projection.is_chain_map()
        assert null_homotopy_witness(R.complex.identity()).verify()
    _report(6, "f_rho x20", True)


@criterion(6)
def test_c6_cone_middle_exactness(k3, dugas):
    rng = random.Random(607)
    pools = {id(A): module_pool(A, 6) for A in (k3, dugas.A)}
    for t in range(20):
        A = (k3, dugas.A)[t % 2]
        X = random_complex(A, rng, pool=pools[id(A)])
        Y = random_complex(A, rng, pool=pools[id(A)])
        f = random_chain_map(X, Y, rng)
        assert f.is_chain_map()
        ex = cone_exactness(f)
        assert ex and all(all(v.values()) for v in ex.values()), ex
    _report(6, "cone exactness x20", True)


@criterion(6)
def test_c6_every_built_dg_algebra_validates(k3, a2, dugas):
    # algebras from earlier criteria (when run in the same session) plus fresh ones
    rng = random.Random(608)
    pools = {id(A): module_pool(A, 6) for A in (k3, dugas.A)}
    extra = [algebra_as_dg(k3), algebra_as_dg(a2), end_dg_algebra(dugas.T2),
             end_dg_algebra(direct_sum([dugas.T1, dugas.T2]).complex)]
    for t in range(20):
        A = (k3, dugas.A)[t % 2]
        extra.append(end_dg_algebra(random_complex(A, rng, pool=pools[id(A)])))
    algebras = _BUILT + extra
    bad = [(L.name, r.name) for L in algebras for r in validate(L) if not r.passed]
    _report(6, f"{len(algebras)} dg algebras", not bad)
    assert len(algebras) >= 24
    assert not bad


# ---------------------------------------------------------------- 7


@criterion(7)
def test_c7_regular_module_is_tilting(k3):
    assert tilting_selforthogonality(stalk(regular_module(k3), 0), (-3, 3)).passed
    _report(7, "T = A", True)


@criterion(7)
def test_c7_shifted_sum_fails_at_one(k3):
    A = stalk(regular_module(k3), 0)
    rep = tilting_selforthogonality(direct_sum([A, shift(A, 1)]).complex, (-3, 3))
    assert not rep.passed and 1 in rep.failing
    _report(7, "T = A + A[1]", True)


@criterion(7)
@pytest.mark.xfail(strict=True, reason="Hom_K(T2, T1[1]) = A/xA is 2-dimensional; see notes")
def test_c7_two_loop_sum_is_self_orthogonal(dugas):
    T = direct_sum([dugas.T1, dugas.T2]).complex
    rep = tilting_selforthogonality(T, (-3, 3))
    oracle = {n: O.khom_dim(T, T, n) for n in range(-3, 4) if n}
    _report(7, f"T = T1 + T2, off-degree dims {oracle}", rep.passed)
    assert all(rep.dims[n] == oracle[n] for n in oracle)
    assert rep.passed


# ---------------------------------------------------------------- 8


@criterion(8)
def test_c8_regular_bimodule_gives_isomorphism(k3, a2):
    for A in (k3, a2):
        P = stalk(regular_module(A))
        res = standard_equiv_tensor_map(regular_bimodule_complex(A), P)
        assert res.passed and res.isomorphism
        _BUILT.extend([res.map.source, res.map.target])
    P = resolution_complex(resolve(vertex_simple(a2, 0), 2))
    res = standard_equiv_tensor_map(regular_bimodule_complex(a2), P)
    assert res.passed and res.isomorphism
    _report(8, "regular bimodule", True)


@criterion(8)
def test_c8_reflection_tilt_is_quasi_iso(a2):
    mult, unit = O.mult_table(a2), O.unit_vector(a2)
    oracle_Y = O.apr_right_complex(mult, a2.labels)
    oracle_end = {n: O.khom_dim(oracle_Y, oracle_Y, n) for n in (-1, 0, 1)}
    # End_K of the tilting complex is A2 again, concentrated in degree 0
    assert oracle_end == {-1: 0, 0: a2.dim, 1: 0}

    Y = a2_tilting_bimodule(a2)
    for t in Y.terms:
        lam = [O.to_frac(m) for m in t.lam]
        rho = [O.to_frac(m) for m in t.rho]
        assert O.bimodule_axioms(mult, unit, lam, rho)
    for i in range(Y.lo, Y.hi):
        D = O.to_frac(Y.d(i))
        s, t = Y.terms[i - Y.lo], Y.terms[i + 1 - Y.lo]
        for b in range(a2.dim):
            assert O.matmul(O.to_frac(s.rho[b]), D) == O.matmul(D, O.to_frac(t.rho[b]))
            assert O.matmul(O.to_frac(s.lam[b]), D) == O.matmul(D, O.to_frac(t.lam[b]))

    res = standard_equiv_tensor_map(Y, stalk(regular_module(a2)))
    T = res.tensor.complex
    # the underlying right complex matches the oracle's up to homotopy data
    assert [T.dim(i) for i in T.degrees() if T.dim(i)] == [oracle_Y.dim(i) for i in oracle_Y.degrees()]
    assert {n: O.khom_dim(T, T, n) for n in (-1, 0, 1)} == oracle_end
    assert res.passed, res.as_dict()
    assert all(c.passed for c in res.checks)
    assert _bijective(res.verdict)
    _BUILT.extend([res.map.source, res.map.target])

    for P in (resolution_complex(resolve(vertex_simple(a2, 0), 2)), stalk(vertex_simple(a2, 1))):
        r = standard_equiv_tensor_map(Y, P)
        assert r.passed and _bijective(r.verdict)
    _report(8, "reflection tilt", True)


def test_null_homotopy_helper_sanity(k3):
    # the helper used by criteria 2 and 6 rejects a non-contractible identity
    assert not is_null_homotopic(stalk(regular_module(k3)).identity())
