"""Exact computations with bounded complexes over finite-dimensional algebras
and their dg endomorphism algebras."""

from .linalg import QQ, FieldSpec

__version__ = "0.1.0"

__all__ = ["FieldSpec", "QQ", "__version__"]
