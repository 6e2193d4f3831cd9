"""Independent dense verification paths: LU factorization and brute-force wedges.

This module must stay independent of the exterior-algebra evaluation in
tensor.py: wedge_bruteforce shares only the `pair` primitive with it, and the
LU routines (LAPACK partial pivoting via scipy) share nothing. Tests assert
that separation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import SingularMatrix
from .tensor import Covector, Operator, Vector, pair

__all__ = [
    "TOL_EXACT",
    "TOL_ORACLE",
    "TOL_INVERSE",
    "LuFactorization",
    "lu_factor",
    "lu_det",
    "lu_solve",
    "lu_inverse",
    "wedge_bruteforce",
    "hadamard_scale",
]

# Tolerance policy used throughout the test suite. Relative comparisons scale
# by max(1, magnitude of the quantities involved).
TOL_EXACT = 1e-12
TOL_ORACLE = 1e-10
TOL_INVERSE = 1e-9

_PIVOT_RTOL = 1e-14
_BRUTEFORCE_MAX = 8


def _matrix_of(a) -> np.ndarray:
    entries = a.entries if isinstance(a, Operator) else np.asarray(a, dtype=float)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValueError(f"need a square matrix, got shape {entries.shape}")
    return entries


@dataclass(frozen=True)
class LuFactorization:
    """Packed LU factors with partial pivoting, P A = L U."""

    packed: np.ndarray
    pivots: np.ndarray
    sign: float

    @property
    def dim(self) -> int:
        return self.packed.shape[0]

    def permutation(self) -> np.ndarray:
        """Row permutation as an index array: A[perm] == L @ U."""
        perm = np.arange(self.dim)
        for i, p in enumerate(self.pivots):
            perm[i], perm[p] = perm[p], perm[i]
        return perm


def lu_factor(a) -> LuFactorization:
    """Partial-pivoting LU of a square matrix (Operator or array).

    Raises SingularMatrix when a pivot falls at or below 1e-14 times the
    matrix row scale, which signals exact or near-exact singularity.
    """
    entries = _matrix_of(a)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        packed, pivots = scipy.linalg.lu_factor(entries, check_finite=True)
    row_scale = float(np.max(np.abs(entries), initial=0.0))
    diag = np.abs(np.diag(packed))
    if row_scale == 0.0 or np.any(diag <= _PIVOT_RTOL * row_scale):
        raise SingularMatrix(
            f"pivot below {_PIVOT_RTOL} * row scale; matrix is numerically singular"
        )
    sign = 1.0
    for i, p in enumerate(pivots):
        if p != i:
            sign = -sign
    packed = packed.copy()
    packed.setflags(write=False)
    pivots = pivots.copy()
    pivots.setflags(write=False)
    return LuFactorization(packed=packed, pivots=pivots, sign=sign)


def lu_det(f: LuFactorization) -> float:
    """Determinant from the factorization: permutation sign times the U diagonal."""
    return float(f.sign * np.prod(np.diag(f.packed)))


def lu_solve(f: LuFactorization, rhs: np.ndarray) -> np.ndarray:
    """Solve A x = rhs (rhs may carry multiple right-hand sides as columns)."""
    return scipy.linalg.lu_solve((np.asarray(f.packed), np.asarray(f.pivots)), rhs)


def lu_inverse(f: LuFactorization) -> Operator:
    return Operator(lu_solve(f, np.eye(f.dim)))


def _parity(perm: Sequence[int]) -> int:
    inversions = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                inversions += 1
    return -1 if inversions % 2 else 1


def wedge_bruteforce(covectors: Sequence[Covector], vectors: Sequence[Vector]) -> float:
    """Signed permutation expansion of the pairing determinant.

    Cost grows like ell factorial; families longer than 8 are refused.
    """
    import itertools
    import math

    ell = len(covectors)
    if ell != len(vectors):
        raise ValueError(f"{ell} covectors paired with {len(vectors)} vectors")
    if ell == 0:
        raise ValueError("need at least one covector")
    if ell > _BRUTEFORCE_MAX:
        raise ValueError(f"brute-force expansion capped at {_BRUTEFORCE_MAX} factors")
    terms = []
    for perm in itertools.permutations(range(ell)):
        prod = float(_parity(perm))
        for a in range(ell):
            prod *= pair(covectors[a], vectors[perm[a]])
        terms.append(prod)
    return math.fsum(terms)


def hadamard_scale(matrix: np.ndarray) -> float:
    """Product of row norms: the natural magnitude scale of a determinant."""
    return float(np.prod(np.linalg.norm(np.asarray(matrix, dtype=float), axis=1)))
