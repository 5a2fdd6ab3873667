"""Exact-arithmetic circular covering solvers and their geometric reductions."""

from .exactnum import Radical, Q, radical_compare, radical_normalize, bit_complexity

__all__ = ["Radical", "Q", "radical_compare", "radical_normalize", "bit_complexity"]
__version__ = "0.1.0"
