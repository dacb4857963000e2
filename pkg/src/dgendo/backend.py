"""Kernel selection: the compiled extension when importable, else pure Python.

``use("python")`` / ``use("compiled")`` switch explicitly (benchmarks and the
cross-backend tests rely on this).
"""

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_active = _compiled if _compiled is not None else _pykernels


def has_compiled():
    return _compiled is not None


def use(name):
    global _active
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        _active = _compiled
    elif name == "python":
        _active = _pykernels
    else:
        raise ValueError(f"unknown backend {name!r}")


def current():
    return "compiled" if _active is _compiled and _compiled is not None else "python"


def rref_q(a):
    return _active.rref_q(a)


def matmul_q(a, b):
    return _active.matmul_q(a, b)


def rref_modp(a, p):
    return _active.rref_modp(a, p)
