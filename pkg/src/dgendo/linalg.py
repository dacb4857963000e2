"""Exact dense linear algebra over Q and F_p.

Matrices are numpy arrays: ``object`` arrays of ``gmpy2.mpq`` over Q, and
``int64`` arrays with entries in ``[0, p)`` over F_p.  Vectors are rows and
maps act on the right, so the left kernel of ``m`` is ``{v : v @ m = 0}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from gmpy2 import mpq, is_prime

from . import backend

_INT64_MAX = (1 << 63) - 1


class FieldError(ValueError):
    pass


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class FieldSpec:
    kind: str = "Q"
    p: int | None = None

    def __post_init__(self):
        if self.kind == "Q":
            if self.p is not None:
                raise FieldError("the rationals take no modulus")
        elif self.kind == "Fp":
            if self.p is None or not is_prime(self.p):
                raise FieldError(f"modulus {self.p} is not prime")
            if self.p >= 1 << 31:
                raise FieldError("prime moduli must be below 2^31")
        else:
            raise FieldError(f"unknown field kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        text = str(text).strip()
        if text in ("Q", "QQ"):
            return cls("Q")
        if text.startswith("Fp:") or text.startswith("F:"):
            try:
                p = int(text.split(":", 1)[1])
            except ValueError:
                raise FieldError(f"bad field {text!r}") from None
            return cls("Fp", p)
        raise FieldError(f"bad field {text!r}")

    def __str__(self):
        return "Q" if self.kind == "Q" else f"Fp:{self.p}"

    @property
    def is_rational(self) -> bool:
        return self.kind == "Q"

    @property
    def dtype(self):
        return object if self.is_rational else np.int64

    # scalars

    def elem(self, x):
        if isinstance(x, np.integer):
            x = int(x)
        if self.is_rational:
            if isinstance(x, str):
                return mpq(Fraction(x.strip()))
            if isinstance(x, Fraction):
                return mpq(x.numerator, x.denominator)
            return mpq(x)
        p = self.p
        if isinstance(x, str):
            x = Fraction(x.strip())
        if isinstance(x, (Fraction,)) or type(x).__name__ == "mpq":
            num, den = int(x.numerator), int(x.denominator)
            if den % p == 0:
                raise FieldError(f"denominator divisible by {p}")
            return num * pow(den, -1, p) % p
        return int(x) % p

    def fmt(self, x) -> str:
        if self.is_rational:
            x = mpq(x)
            if x.denominator == 1:
                return str(int(x.numerator))
            return f"{int(x.numerator)}/{int(x.denominator)}"
        return str(int(x) % self.p)

    def zero(self):
        return mpq(0) if self.is_rational else 0

    def one(self):
        return mpq(1) if self.is_rational else 1

    # constructors

    def array(self, rows, shape=None) -> np.ndarray:
        """Coerce nested lists / arrays into a matrix over this field."""
        if isinstance(rows, np.ndarray) and rows.dtype == self.dtype and rows.ndim == 2:
            if not self.is_rational:
                return rows % self.p
            return rows.copy()
        src = np.asarray(rows, dtype=object)
        if shape is not None:
            src = src.reshape(shape)
        if src.ndim == 1:
            src = src.reshape(1, -1) if src.size else src.reshape(0, 0)
        out = np.empty(src.shape, dtype=self.dtype)
        flat_in = src.ravel()
        flat_out = out.reshape(-1)
        for i, x in enumerate(flat_in):
            flat_out[i] = self.elem(x)
        return out

    def vector(self, values) -> np.ndarray:
        return self.array([list(values)], shape=(1, len(values)))[0]

    def zeros(self, m: int, n: int) -> np.ndarray:
        if self.is_rational:
            out = np.empty((m, n), dtype=object)
            out.fill(mpq(0))
            return out
        return np.zeros((m, n), dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros(n, n)
        for i in range(n):
            out[i, i] = self.one()
        return out

    # arithmetic

    def dot(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[1] != b.shape[0]:
            raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
        if self.is_rational:
            return backend.matmul_q(a, b)
        m, l = a.shape
        n = b.shape[1]
        if l == 0:
            return np.zeros((m, n), dtype=np.int64)
        p = self.p
        chunk = max(1, _INT64_MAX // ((p - 1) ** 2 + 1))
        if chunk >= l:
            return (a @ b) % p
        out = np.zeros((m, n), dtype=np.int64)
        for s in range(0, l, chunk):
            out = (out + (a[:, s:s + chunk] @ b[s:s + chunk]) % p) % p
        return out

    def chain(self, *mats: np.ndarray) -> np.ndarray:
        out = mats[0]
        for m in mats[1:]:
            out = self.dot(out, m)
        return out

    def add(self, a, b):
        return a + b if self.is_rational else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.is_rational else (a - b) % self.p

    def neg(self, a):
        return -a if self.is_rational else (-a) % self.p

    def scale(self, c, a):
        c = self.elem(c)
        return a * c if self.is_rational else (a * c) % self.p

    def sign(self, a, s: int):
        return a if s % 2 == 0 else self.neg(a)

    def kron(self, a, b):
        if self.is_rational:
            if a.size == 0 or b.size == 0:
                return self.zeros(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])
            return np.kron(a, b)
        return np.kron(a, b) % self.p

    def is_zero(self, a) -> bool:
        return not np.any(a != 0)

    def equal(self, a, b) -> bool:
        return a.shape == b.shape and not np.any(a != b)

    # elimination

    def rref(self, a: np.ndarray):
        if self.is_rational:
            return backend.rref_q(a)
        return backend.rref_modp(a, self.p)

    def rank(self, a: np.ndarray) -> int:
        if a.size == 0:
            return 0
        return len(self.rref(a)[1])

    def row_basis(self, a: np.ndarray) -> np.ndarray:
        """Reduced echelon basis of the row space."""
        if a.shape[0] == 0:
            return self.zeros(0, a.shape[1])
        r, piv = self.rref(a)
        return r[: len(piv)]

    def left_kernel(self, a: np.ndarray) -> np.ndarray:
        """Rows v with v @ a = 0, one per free column of rref(a^T)."""
        m, n = a.shape
        if n == 0:
            return self.eye(m)
        if m == 0:
            return self.zeros(0, 0)
        r, piv = self.rref(np.ascontiguousarray(a.T))
        pivset = set(piv)
        free = [j for j in range(m) if j not in pivset]
        k = self.zeros(len(free), m)
        for t, f in enumerate(free):
            k[t, f] = self.one()
            for i, pc in enumerate(piv):
                k[t, pc] = self.neg(r[i, f])
        return k

    def right_kernel(self, a: np.ndarray) -> np.ndarray:
        """Rows v with a @ v^T = 0."""
        return self.left_kernel(np.ascontiguousarray(a.T))

    def solve_left(self, a: np.ndarray, b: np.ndarray):
        """Some X with X @ a = b, or None if inconsistent."""
        m, n = a.shape
        k = b.shape[0]
        if b.shape[1] != n:
            raise DimensionError("right-hand side width mismatch")
        if k == 0:
            return self.zeros(0, m)
        if m == 0:
            return self.zeros(k, 0) if self.is_zero(b) else None
        aug = np.concatenate([np.ascontiguousarray(a.T), np.ascontiguousarray(b.T)], axis=1)
        r, piv = self.rref(aug)
        if piv and piv[-1] >= m:
            return None
        x = self.zeros(k, m)
        for i, pc in enumerate(piv):
            x[:, pc] = r[i, m:]
        return x

    def inverse(self, a: np.ndarray) -> np.ndarray:
        n = a.shape[0]
        if a.shape != (n, n):
            raise DimensionError("inverse of a non-square matrix")
        if n == 0:
            return self.zeros(0, 0)
        r, piv = self.rref(np.concatenate([a, self.eye(n)], axis=1))
        if piv[:n] != list(range(n)) or len(piv) > n:
            raise np.linalg.LinAlgError("singular matrix")
        return r[:, n:]

    def contains(self, space: np.ndarray, vecs: np.ndarray) -> bool:
        if vecs.shape[0] == 0:
            return True
        return self.rank(np.concatenate([space, vecs])) == self.rank(space)

    def random_matrix(self, rng, m: int, n: int, density: float = 0.5, spread: int = 3):
        out = self.zeros(m, n)
        for i in range(m):
            for j in range(n):
                if rng.random() < density:
                    out[i, j] = self.elem(rng.randint(-spread, spread))
        return out


QQ = FieldSpec("Q")


def rank_kernel(field: FieldSpec, m: np.ndarray):
    """Rank of m and a basis of its left kernel."""
    k = field.left_kernel(m)
    return m.shape[0] - k.shape[0], k


def solve_linear(field: FieldSpec, constraints, shape) -> list[np.ndarray]:
    """Basis of {X of the given shape : X @ A_i = B_i @ X for all i}.

    Row-major vec gives vec(X A) = vec(X)(I (x) A) and vec(B X) = vec(X)(B^T (x) I);
    each constraint is applied to the running solution space so the
    intermediate systems stay small.
    """
    r, c = shape
    w = field.eye(r * c)
    for a, b in constraints:
        if a.shape != (c, c) or b.shape != (r, r):
            raise DimensionError(f"constraint shapes {a.shape}, {b.shape} do not fit X of shape {shape}")
        if w.shape[0] == 0:
            break
        cm = field.sub(field.kron(field.eye(r), a), field.kron(np.ascontiguousarray(b.T), field.eye(c)))
        k = field.left_kernel(field.dot(w, cm))
        w = field.row_basis(field.dot(k, w))
    return [w[i].reshape(r, c) for i in range(w.shape[0])]


class NotContained(ValueError):
    pass


@dataclass
class Quotient:
    """A quotient space V/S presented inside an ambient coordinate space.

    ``reps`` are rows of V chosen greedily in order as a complement of S.
    ``proj`` maps ambient vectors lying in V to quotient coordinates and
    vanishes exactly on S.
    """

    field: FieldSpec
    sub: np.ndarray
    reps: np.ndarray
    proj: np.ndarray

    @property
    def dim(self) -> int:
        return self.reps.shape[0]

    def project(self, v: np.ndarray) -> np.ndarray:
        return self.field.dot(v, self.proj)


def quotient_basis(field: FieldSpec, space: np.ndarray, sub: np.ndarray, check: bool = True) -> Quotient:
    n = space.shape[1] if space.ndim == 2 else 0
    sb = field.row_basis(sub) if sub.shape[0] else field.zeros(0, n)
    if check and not field.contains(space, sb):
        raise NotContained("subspace is not contained in the space")
    s = sb.shape[0]
    if space.shape[0] == 0:
        return Quotient(field, sb, field.zeros(0, n), field.zeros(n, 0))
    stacked = np.concatenate([sb, space]) if s else space
    _, piv = field.rref(np.ascontiguousarray(stacked.T))
    chosen = [p - s for p in piv if p >= s]
    reps = space[chosen] if chosen else field.zeros(0, n)
    q = len(chosen)
    proj = field.zeros(n, q)
    if q:
        basis = np.concatenate([sb, reps]) if s else reps
        _, cols = field.rref(basis)
        inv = field.inverse(np.ascontiguousarray(basis[:, cols]))
        proj[cols, :] = inv[:, s:]
    return Quotient(field, sb, reps, proj)
