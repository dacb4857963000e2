import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dgendo.linalg import QQ, DimensionError, FieldError, FieldSpec, NotContained, quotient_basis, rank_kernel, solve_linear

F2 = FieldSpec("Fp", 2)
F7 = FieldSpec("Fp", 7)


def test_field_parsing_and_validation():
    assert FieldSpec.parse("Q") == QQ
    assert FieldSpec.parse("Fp:32003").p == 32003
    with pytest.raises(FieldError):
        FieldSpec("Fp", 6)
    with pytest.raises(FieldError):
        FieldSpec.parse("R")


def test_rank_kernel_proportional_rows():
    r, k = rank_kernel(QQ, QQ.array([[1, 2], [2, 4]]))
    assert r == 1
    assert k.shape == (1, 2)
    assert QQ.equal(QQ.scale(QQ.elem(1) / k[0, 1], k), QQ.array([[-2, 1]]))


def test_rank_kernel_zero_matrix():
    r, k = rank_kernel(QQ, QQ.zeros(3, 2))
    assert r == 0 and k.shape[0] == 3


def test_rank_kernel_mod_two():
    r, k = rank_kernel(F2, F2.array([[1, 1], [1, 1]]))
    assert r == 1
    assert F2.equal(k, F2.array([[1, 1]]))


def test_rationals_stay_exact():
    m = QQ.array([["1/3", "2/7"], ["5/11", "-13/17"]])
    inv = QQ.inverse(m)
    assert QQ.equal(QQ.dot(m, inv), QQ.eye(2))


def test_solve_linear_unconstrained_and_vacuous():
    assert len(solve_linear(QQ, [], (2, 2))) == 4
    I3 = QQ.eye(3)
    assert len(solve_linear(QQ, [(I3, I3)], (3, 3))) == 9


def test_solve_linear_jordan_commutant():
    J = QQ.array([[1, 1], [0, 1]])
    sols = solve_linear(QQ, [(J, J)], (2, 2))
    assert len(sols) == 2
    for X in sols:
        assert QQ.equal(QQ.dot(X, J), QQ.dot(J, X))


def test_solve_linear_shape_mismatch():
    with pytest.raises(DimensionError):
        solve_linear(QQ, [(QQ.eye(3), QQ.eye(2))], (2, 2))


def test_quotient_examples():
    q = quotient_basis(QQ, QQ.eye(2), QQ.array([[1, 0]]))
    assert q.dim == 1
    assert QQ.is_zero(q.project(QQ.array([[1, 0]])))
    q = quotient_basis(QQ, QQ.eye(2), QQ.eye(2))
    assert q.dim == 0
    q = quotient_basis(QQ, QQ.array([[1, 0, 1], [0, 1, 1]]), QQ.array([[1, 1, 2]]))
    assert q.dim == 1


def test_quotient_requires_containment():
    with pytest.raises(NotContained):
        quotient_basis(QQ, QQ.array([[1, 0, 0]]), QQ.array([[0, 1, 0]]))


def _random(field, rng, m, n):
    if field.is_rational:
        return field.random_matrix(rng, m, n, density=0.6)
    return field.array([[rng.randrange(field.p) for _ in range(n)] for _ in range(m)])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 10 ** 6), st.sampled_from([QQ, F7]))
def test_rank_properties(m, n, seed, field):
    a = _random(field, random.Random(seed), m, n)
    r, k = rank_kernel(field, a)
    assert r == field.rank(np.ascontiguousarray(a.T))
    assert r + k.shape[0] == m
    assert field.is_zero(field.dot(k, a)) if k.shape[0] and n else True
    assert field.rank(k) == k.shape[0]


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 4), st.integers(0, 10 ** 6))
def test_quotient_dimension_formula(n, extra, seed):
    rng = random.Random(seed)
    space = _random(QQ, rng, n, n + extra)
    sub = QQ.dot(_random(QQ, rng, rng.randint(0, n), n), space) if n else space
    q = quotient_basis(QQ, space, sub)
    assert q.dim == QQ.rank(space) - (QQ.rank(sub) if sub.shape[0] else 0)
    if sub.shape[0]:
        assert QQ.is_zero(q.project(sub))


def test_operations_are_deterministic():
    rng = random.Random(3)
    a = QQ.random_matrix(rng, 6, 5)
    r1, k1 = rank_kernel(QQ, a)
    r2, k2 = rank_kernel(QQ, a.copy())
    assert r1 == r2 and QQ.equal(k1, k2)
