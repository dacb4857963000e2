import random

import numpy as np
import pytest
from gmpy2 import mpq

from dgendo import _pykernels, backend
from dgendo.complexes import homotopy_hom

pytestmark = pytest.mark.skipif(not backend.has_compiled(), reason="compiled kernels not built")


@pytest.fixture
def restore_backend():
    before = backend.current()
    yield
    backend.use(before)


def _random_q(rng, m, n, density=0.6):
    a = np.empty((m, n), dtype=object)
    for i in range(m):
        for j in range(n):
            a[i, j] = mpq(rng.randint(-5, 5), rng.randint(1, 4)) if rng.random() < density else mpq(0)
    return a


def _same(a, b):
    return a.shape == b.shape and all(x == y for x, y in zip(a.ravel().tolist(), b.ravel().tolist()))


def test_rref_agrees():
    from dgendo import _kernels
    rng = random.Random(1)
    for _ in range(40):
        m, n = rng.randint(0, 7), rng.randint(0, 7)
        a = _random_q(rng, m, n)
        r1, p1 = _kernels.rref_q(a.copy())
        r2, p2 = _pykernels.rref_q(a.copy())
        assert list(p1) == list(p2) and _same(r1, r2)


def test_matmul_agrees():
    from dgendo import _kernels
    rng = random.Random(2)
    for _ in range(40):
        m, k, n = rng.randint(0, 6), rng.randint(0, 6), rng.randint(0, 6)
        a, b = _random_q(rng, m, k), _random_q(rng, k, n)
        assert _same(_kernels.matmul_q(a, b), _pykernels.matmul_q(a, b))


@pytest.mark.parametrize("p", [2, 3, 7, 101])
def test_rref_modp_agrees(p):
    from dgendo import _kernels
    rng = np.random.default_rng(p)
    for _ in range(30):
        a = rng.integers(0, p, size=(rng.integers(0, 8), rng.integers(0, 8)), dtype=np.int64)
        r1, p1 = _kernels.rref_modp(a.copy(), p)
        r2, p2 = _pykernels.rref_modp(a.copy(), p)
        assert list(p1) == list(p2) and np.array_equal(np.asarray(r1), np.asarray(r2))


def test_unknown_backend_is_rejected(restore_backend):
    with pytest.raises(ValueError):
        backend.use("fortran")


def test_khom_is_backend_independent(dugas, restore_backend):
    results = {}
    for name in ("python", "compiled"):
        backend.use(name)
        assert backend.current() == name
        results[name] = [homotopy_hom(dugas.T2, dugas.T1, i).dim for i in (-1, 0, 1, 2)]
    assert results["python"] == results["compiled"] == [0, 2, 2, 0]
