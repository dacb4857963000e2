# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled elimination and product kernels.

Rational entries are copied out of gmpy2 objects into GMP buffers owned by
this module and handed back as Python integers, so the two GMP copies in the
process (gmpy2 bundles its own) never share allocations.
"""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t
from gmpy2 cimport import_gmpy2, mpq as gmpq, MPQ_Check, __mpq_struct, __mpz_struct, mpq_ptr, mpz_ptr

import gmpy2

cdef extern from "gmp.h":
    void mpq_init "__gmpq_init"(mpq_ptr)
    void mpq_clear "__gmpq_clear"(mpq_ptr)
    void mpq_set_q "__gmpq_set"(mpq_ptr, const __mpq_struct*)
    void mpq_set_si "__gmpq_set_si"(mpq_ptr, long, unsigned long)
    void mpq_mul "__gmpq_mul"(mpq_ptr, const __mpq_struct*, const __mpq_struct*)
    void mpq_add "__gmpq_add"(mpq_ptr, const __mpq_struct*, const __mpq_struct*)
    void mpq_sub "__gmpq_sub"(mpq_ptr, const __mpq_struct*, const __mpq_struct*)
    void mpq_inv "__gmpq_inv"(mpq_ptr, const __mpq_struct*)
    void mpq_swap "__gmpq_swap"(mpq_ptr, mpq_ptr)
    int mpz_fits_slong_p "__gmpz_fits_slong_p"(const __mpz_struct*)
    long mpz_get_si "__gmpz_get_si"(const __mpz_struct*)
    char* mpz_get_str "__gmpz_get_str"(char*, int, const __mpz_struct*)

cdef extern from *:
    """
    #define DGENDO_MPQ_SGN(q) ((q)->_mp_num._mp_size < 0 ? -1 : (q)->_mp_num._mp_size > 0)
    """
    int MPQ_SGN "DGENDO_MPQ_SGN"(const __mpq_struct*)

import_gmpy2()

_ZERO = gmpy2.mpq(0)
_ONE = gmpy2.mpq(1)
_mpq = gmpy2.mpq


cdef __mpq_struct* _alloc(Py_ssize_t n) except NULL:
    cdef __mpq_struct* buf = <__mpq_struct*>malloc(max(n, 1) * sizeof(__mpq_struct))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        mpq_init(&buf[i])
    return buf


cdef void _release(__mpq_struct* buf, Py_ssize_t n):
    cdef Py_ssize_t i
    for i in range(n):
        mpq_clear(&buf[i])
    free(buf)


cdef int _load(__mpq_struct* dst, object x) except -1:
    if not MPQ_Check(x):
        x = _mpq(x)
    mpq_set_q(dst, &(<gmpq>x).q[0])
    return 0


cdef object _z_to_int(const __mpz_struct* z):
    if mpz_fits_slong_p(z):
        return mpz_get_si(z)
    cdef char* s = mpz_get_str(NULL, 16, z)
    try:
        return int(s.decode("ascii"), 16)
    finally:
        free(s)


cdef object _export(const __mpq_struct* q):
    cdef int sg = MPQ_SGN(q)
    if sg == 0:
        return _ZERO
    num = _z_to_int(&q._mp_num)
    if q._mp_den._mp_size == 1 and q._mp_den._mp_d[0] == 1:
        if num == 1:
            return _ONE
        return _mpq(num)
    return _mpq(num, _z_to_int(&q._mp_den))


def rref_q(cnp.ndarray a):
    """Reduced row echelon form of a rational matrix; returns (R, pivots)."""
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1]
    cdef Py_ssize_t i, j, k, r = 0, piv, nnz
    cdef __mpq_struct* buf = _alloc(m * n)
    cdef __mpq_struct tmp[1]
    cdef __mpq_struct inv[1]
    cdef Py_ssize_t* cols = <Py_ssize_t*>malloc(max(n, 1) * sizeof(Py_ssize_t))
    mpq_init(tmp)
    mpq_init(inv)
    pivots = []
    try:
        for i in range(m):
            for j in range(n):
                _load(&buf[i * n + j], a[i, j])
        for j in range(n):
            if r == m:
                break
            piv = -1
            for i in range(r, m):
                if MPQ_SGN(&buf[i * n + j]) != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for k in range(j, n):
                    mpq_swap(&buf[piv * n + k], &buf[r * n + k])
            mpq_inv(inv, &buf[r * n + j])
            nnz = 0
            for k in range(j, n):
                if MPQ_SGN(&buf[r * n + k]) != 0:
                    mpq_mul(&buf[r * n + k], &buf[r * n + k], inv)
                    cols[nnz] = k
                    nnz += 1
            for i in range(m):
                if i == r or MPQ_SGN(&buf[i * n + j]) == 0:
                    continue
                mpq_set_q(inv, &buf[i * n + j])
                for k in range(nnz):
                    mpq_mul(tmp, inv, &buf[r * n + cols[k]])
                    mpq_sub(&buf[i * n + cols[k]], &buf[i * n + cols[k]], tmp)
            pivots.append(j)
            r += 1
        out = np.empty((m, n), dtype=object)
        for i in range(m):
            for j in range(n):
                out[i, j] = _export(&buf[i * n + j])
        return out, pivots
    finally:
        mpq_clear(tmp)
        mpq_clear(inv)
        free(cols)
        _release(buf, m * n)


def matmul_q(cnp.ndarray a, cnp.ndarray b):
    """Rational matrix product, skipping zero entries of the left factor."""
    cdef Py_ssize_t m = a.shape[0], l = a.shape[1], n = b.shape[1]
    cdef Py_ssize_t i, j, k
    if b.shape[0] != l:
        raise ValueError("shape mismatch in matmul_q")
    cdef __mpq_struct* A = _alloc(m * l)
    cdef __mpq_struct* B = _alloc(l * n)
    cdef __mpq_struct* C = _alloc(m * n)
    cdef char* bnz = <char*>malloc(max(l * n, 1))
    cdef __mpq_struct tmp[1]
    mpq_init(tmp)
    try:
        for i in range(m):
            for k in range(l):
                _load(&A[i * l + k], a[i, k])
        for k in range(l):
            for j in range(n):
                _load(&B[k * n + j], b[k, j])
                bnz[k * n + j] = MPQ_SGN(&B[k * n + j]) != 0
        for i in range(m):
            for k in range(l):
                if MPQ_SGN(&A[i * l + k]) == 0:
                    continue
                for j in range(n):
                    if bnz[k * n + j]:
                        mpq_mul(tmp, &A[i * l + k], &B[k * n + j])
                        mpq_add(&C[i * n + j], &C[i * n + j], tmp)
        out = np.empty((m, n), dtype=object)
        for i in range(m):
            for j in range(n):
                out[i, j] = _export(&C[i * n + j])
        return out
    finally:
        mpq_clear(tmp)
        free(bnz)
        _release(A, m * l)
        _release(B, l * n)
        _release(C, m * n)


cdef int64_t _inv_mod(int64_t x, int64_t p):
    cdef int64_t t = 0, newt = 1, r = p, newr = x, q, tmp
    while newr != 0:
        q = r // newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += p
    return t


def rref_modp(cnp.ndarray a, long long p):
    """Reduced row echelon form over F_p of an int64 matrix with entries in [0, p)."""
    cdef cnp.ndarray[int64_t, ndim=2] R = np.ascontiguousarray(a, dtype=np.int64).copy()
    cdef int64_t[:, ::1] v = R
    cdef Py_ssize_t m = R.shape[0], n = R.shape[1]
    cdef Py_ssize_t i, j, k, r = 0, piv, nnz
    cdef int64_t inv, f, t
    cdef Py_ssize_t* cols = <Py_ssize_t*>malloc(max(n, 1) * sizeof(Py_ssize_t))
    pivots = []
    try:
        for j in range(n):
            if r == m:
                break
            piv = -1
            for i in range(r, m):
                if v[i, j] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for k in range(j, n):
                    t = v[piv, k]
                    v[piv, k] = v[r, k]
                    v[r, k] = t
            inv = _inv_mod(v[r, j], p)
            nnz = 0
            for k in range(j, n):
                if v[r, k] != 0:
                    v[r, k] = (v[r, k] * inv) % p
                    cols[nnz] = k
                    nnz += 1
            for i in range(m):
                if i == r or v[i, j] == 0:
                    continue
                f = p - v[i, j]
                for k in range(nnz):
                    v[i, cols[k]] = (v[i, cols[k]] + f * v[r, cols[k]]) % p
            pivots.append(j)
            r += 1
        return R, pivots
    finally:
        free(cols)
