"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Same signatures and bit-identical results; used when the extension is not
built or when a caller forces the Python backend.
"""

import numpy as np
from gmpy2 import mpq

_ZERO = mpq(0)


def rref_q(a):
    m, n = a.shape
    rows = [[x if type(x) is type(_ZERO) else mpq(x) for x in row] for row in a.tolist()]
    pivots = []
    r = 0
    for j in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if rows[i][j] != 0), -1)
        if piv < 0:
            continue
        rows[piv], rows[r] = rows[r], rows[piv]
        prow = rows[r]
        inv = 1 / prow[j]
        cols = []
        for k in range(j, n):
            if prow[k] != 0:
                prow[k] = prow[k] * inv
                cols.append(k)
        for i in range(m):
            if i == r:
                continue
            row = rows[i]
            f = row[j]
            if f == 0:
                continue
            for k in cols:
                row[k] = row[k] - f * prow[k]
        pivots.append(j)
        r += 1
    out = np.empty((m, n), dtype=object)
    for i in range(m):
        out[i, :] = rows[i] if n else []
    return out, pivots


def matmul_q(a, b):
    if a.shape[1] != b.shape[0]:
        raise ValueError("shape mismatch in matmul_q")
    m, n = a.shape[0], b.shape[1]
    if m == 0 or n == 0 or a.shape[1] == 0:
        out = np.empty((m, n), dtype=object)
        out.fill(_ZERO)
        return out
    return a.dot(b)


def rref_modp(a, p):
    R = np.array(a, dtype=np.int64, copy=True)
    m, n = R.shape
    pivots = []
    r = 0
    for j in range(n):
        if r == m:
            break
        nz = np.nonzero(R[r:, j])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        inv = pow(int(R[r, j]), p - 2, p)
        R[r] = (R[r] * inv) % p
        col = R[:, j].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            R[hit] = (R[hit] + (p - col[hit])[:, None] * R[r][None, :]) % p
        pivots.append(j)
        r += 1
    return R, pivots
