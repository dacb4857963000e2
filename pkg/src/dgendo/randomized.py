"""Seeded random modules, bounded complexes and chain maps for property checks."""

from __future__ import annotations

import random

import numpy as np

from .algebra import (
    FDAlgebra,
    FDModule,
    cyclic_quotient,
    direct_sum_modules,
    hom_basis,
    regular_module,
    vertex_projective,
    vertex_simple,
    zero_module,
)
from .complexes import BoundedComplex, GradedMap, hom_complex


def module_pool(A: FDAlgebra, max_dim: int = 6) -> list[FDModule]:
    """Small modules: projectives, simples and cyclic quotients of A by paths."""
    pool = []
    nv = len(A.quiver.vertices) if A.quiver is not None else 1
    if A.quiver is not None:
        pool += [vertex_projective(A, v) for v in range(nv)]
        pool += [vertex_simple(A, v) for v in range(nv)]
        for i in range(A.dim):
            if i in A.quiver.vertices:
                continue
            Q = cyclic_quotient(A, [A.basis_vector(i)], f"A/{A.labels[i]}A")
            if 0 < Q.dim < A.dim:
                pool.append(Q)
    else:
        pool.append(regular_module(A))
    seen, out = set(), []
    for M in pool:
        key = (M.dim, M.name)
        if M.dim <= max_dim and key not in seen:
            seen.add(key)
            out.append(M)
    return out


def random_module(rng: random.Random, pool: list, max_dim: int = 6) -> FDModule:
    """Direct sum of up to two pool members with total dimension at most max_dim."""
    A = pool[0].algebra
    k = rng.choice((0, 1, 1, 2))
    parts, total = [], 0
    for _ in range(k):
        M = rng.choice(pool)
        if total + M.dim <= max_dim:
            parts.append(M)
            total += M.dim
    if not parts:
        return zero_module(A)
    return parts[0] if len(parts) == 1 else direct_sum_modules(parts)


def _random_combination(F, rng, basis: list, spread: int = 2):
    if not basis:
        return None
    out = None
    for b in basis:
        c = rng.randint(-spread, spread)
        if c:
            term = F.scale(F.elem(c), b)
            out = term if out is None else F.add(out, term)
    return out if out is not None else F.scale(F.zero(), basis[0])


def _constrained(F, basis: list, prev: np.ndarray) -> list:
    """Basis of span(basis) ∩ {g : prev @ g = 0}."""
    if not basis:
        return []
    if prev.shape[0] == 0:
        return list(basis)
    rows = np.stack([F.dot(prev, b).reshape(-1) for b in basis])
    if rows.shape[1] == 0:
        return list(basis)
    ker = F.left_kernel(rows)
    out = []
    for c in ker:
        m = None
        for coef, b in zip(c, basis):
            if coef != 0:
                t = F.scale(coef, b)
                m = t if m is None else F.add(m, t)
        if m is not None:
            out.append(m)
    return out


def random_complex(A: FDAlgebra, rng: random.Random, width: int = 4, max_dim: int = 6,
                   lo: int | None = None, pool: list | None = None, name: str = "") -> BoundedComplex:
    """Bounded complex with at most ``width`` terms, each of dimension <= max_dim.

    Differentials are random module maps chosen degree by degree inside the
    subspace that keeps d o d = 0."""
    F = A.field
    pool = pool or module_pool(A, max_dim)
    width = rng.randint(1, width)
    lo = rng.randint(-2, 1) if lo is None else lo
    terms = [random_module(rng, pool, max_dim) for _ in range(width)]
    diffs = []
    prev = F.zeros(0, terms[0].dim)
    for i in range(width - 1):
        M, N = terms[i], terms[i + 1]
        basis = hom_basis(M, N) if M.dim and N.dim else []
        choices = _constrained(F, basis, prev)
        d = _random_combination(F, rng, choices) if choices and rng.random() < 0.9 else None
        if d is None:
            d = F.zeros(M.dim, N.dim)
        diffs.append(d)
        prev = d
    X = BoundedComplex(A, lo, terms, diffs, name or "rand")
    X.check()
    return X


def random_chain_map(X: BoundedComplex, Y: BoundedComplex, rng: random.Random, degree: int = 0) -> GradedMap:
    """Random closed element of Hom(X, Y) of the given degree (a chain map when degree = 0)."""
    F = X.field
    H = hom_complex(X, Y)
    Z = H.cycles(degree)
    if Z.shape[0] == 0:
        return GradedMap(X, Y, degree, {})
    coef = F.array([[rng.randint(-2, 2) for _ in range(Z.shape[0])]])
    return H.to_map(F.dot(coef, Z)[0], degree)


def random_instances(A: FDAlgebra, count: int, seed: int = 0, width: int = 4, max_dim: int = 6):
    rng = random.Random(seed)
    pool = module_pool(A, max_dim)
    for k in range(count):
        yield random_complex(A, rng, width, max_dim, pool=pool, name=f"X{k}")
