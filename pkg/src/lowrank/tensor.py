"""Coordinate representations of vectors, covectors, operators and dyads.

Everything here is expressed in a fixed basis: a vector is its coordinate
array, a covector its coordinates in the dual basis, an operator a dense
matrix. The formulas built on top are basis-covariant, so the matrices are
basis-dependent representations of basis-free objects.

All values are immutable after construction (arrays are made read-only),
so they are safe to share across threads.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch

__all__ = [
    "Vector",
    "Covector",
    "Operator",
    "Dyad",
    "DyadicPerturbation",
    "GramMatrix",
    "pair",
    "dyad_to_operator",
    "gram",
    "wedge_eval",
    "principal_minor_sum",
]


def _as_coords(values, what: str) -> np.ndarray:
    coords = np.array(values, dtype=float, copy=True)
    if coords.ndim != 1:
        raise ValueError(f"{what} coordinates must be one-dimensional")
    if coords.size < 2:
        raise ValueError(f"{what} needs dimension >= 2, got {coords.size}")
    if not np.all(np.isfinite(coords)):
        raise ValueError(f"{what} coordinates must be finite")
    coords.setflags(write=False)
    return coords


def _as_square(values, what: str) -> np.ndarray:
    entries = np.array(values, dtype=float, copy=True)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValueError(f"{what} must be a square matrix, got shape {entries.shape}")
    if not np.all(np.isfinite(entries)):
        raise ValueError(f"{what} entries must be finite")
    entries.setflags(write=False)
    return entries


@dataclass(frozen=True)
class Vector:
    """Element of the primal space, as coordinates in a fixed basis."""

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _as_coords(self.coords, "vector"))

    @property
    def dim(self) -> int:
        return self.coords.size


@dataclass(frozen=True)
class Covector:
    """Linear functional on the primal space, as dual-basis coordinates."""

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _as_coords(self.coords, "covector"))

    @property
    def dim(self) -> int:
        return self.coords.size


@dataclass(frozen=True)
class Operator:
    """Dense real linear map of the primal space to itself."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_square(self.entries, "operator"))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def apply(self, v: Vector) -> Vector:
        if v.dim != self.dim:
            raise DimensionMismatch(
                f"operator of dimension {self.dim} applied to vector of dimension {v.dim}"
            )
        return Vector(self.entries @ v.coords)

    @classmethod
    def identity(cls, n: int) -> "Operator":
        return cls(np.eye(n))


@dataclass(frozen=True)
class Dyad:
    """Rank-one building block: x maps to covector(x) * vector."""

    vector: Vector
    covector: Covector

    def __post_init__(self):
        if self.vector.dim != self.covector.dim:
            raise DimensionMismatch(
                f"dyad mixes dimensions {self.vector.dim} and {self.covector.dim}"
            )

    @property
    def dim(self) -> int:
        return self.vector.dim


@dataclass(frozen=True)
class DyadicPerturbation:
    """Ordered list of dyads representing a sum of rank-one maps.

    The number of dyads k may exceed the space dimension n; the formulas
    consuming this type cap their sums at min(n, k) or min(n-1, k) as
    appropriate, so no restriction is imposed here.
    """

    dyads: tuple[Dyad, ...]

    def __post_init__(self):
        dyads = tuple(self.dyads)
        if not dyads:
            raise ValueError("a dyadic perturbation needs at least one dyad")
        dims = {d.dim for d in dyads}
        if len(dims) != 1:
            raise DimensionMismatch(f"dyads of mixed dimensions: {sorted(dims)}")
        object.__setattr__(self, "dyads", dyads)

    @property
    def dim(self) -> int:
        return self.dyads[0].dim

    @property
    def rank_bound(self) -> int:
        return len(self.dyads)

    def vector_matrix(self) -> np.ndarray:
        """n x k matrix whose columns are the dyad vectors."""
        return np.column_stack([d.vector.coords for d in self.dyads])

    def covector_matrix(self) -> np.ndarray:
        """n x k matrix whose columns are the dyad covectors."""
        return np.column_stack([d.covector.coords for d in self.dyads])

    def to_operator(self) -> Operator:
        return Operator(self.vector_matrix() @ self.covector_matrix().T)

    @classmethod
    def from_arrays(cls, vectors, covectors) -> "DyadicPerturbation":
        pairs = [Dyad(Vector(v), Covector(p)) for v, p in zip(vectors, covectors, strict=True)]
        return cls(tuple(pairs))


@dataclass(frozen=True)
class GramMatrix:
    """k x k pairing table: entry [a][b] is covector a evaluated on vector b."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_square(self.entries, "gram matrix"))

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def pair(p: Covector, v: Vector) -> float:
    """Canonical pairing: the covector evaluated on the vector."""
    if p.dim != v.dim:
        raise DimensionMismatch(f"pairing dimension {p.dim} with {v.dim}")
    return float(np.dot(p.coords, v.coords))


def dyad_to_operator(d: Dyad) -> Operator:
    """Materialize a dyad as the rank-one matrix vector[a] * covector[b]."""
    return Operator(np.outer(d.vector.coords, d.covector.coords))


def gram(dyads: DyadicPerturbation, base_images: Sequence[Vector]) -> GramMatrix:
    """Pairing table of the dyad covectors against a family of vectors.

    Row index = covector index, column index = vector index. base_images
    must have one vector per dyad, all of the dyads' dimension.
    """
    if len(base_images) != len(dyads.dyads):
        raise DimensionMismatch(
            f"{len(dyads.dyads)} dyads but {len(base_images)} base images"
        )
    n = dyads.dim
    for u in base_images:
        if u.dim != n:
            raise DimensionMismatch(f"base image of dimension {u.dim}, expected {n}")
    p_mat = dyads.covector_matrix()
    u_mat = np.column_stack([u.coords for u in base_images])
    return GramMatrix(p_mat.T @ u_mat)


def wedge_eval(covectors: Sequence[Covector], vectors: Sequence[Vector]) -> float:
    """Evaluate an exterior product of covectors on a tuple of vectors.

    Uses the determinant convention: the value is det of the pairing matrix
    M[a][b] = covectors[a](vectors[b]). A family longer than the space
    dimension always vanishes, and that case returns exactly 0.0 rather than
    relying on numerical rank deficiency.
    """
    ell = len(covectors)
    if ell == 0 or len(vectors) == 0:
        raise ValueError("wedge evaluation needs at least one covector and one vector")
    if len(vectors) != ell:
        raise DimensionMismatch(
            f"{ell} covectors paired with {len(vectors)} vectors"
        )
    n = covectors[0].dim
    for c in covectors:
        if c.dim != n:
            raise DimensionMismatch("covectors of mixed dimensions")
    for v in vectors:
        if v.dim != n:
            raise DimensionMismatch(f"vector of dimension {v.dim}, expected {n}")
    if ell > n:
        return 0.0
    m = np.stack([c.coords for c in covectors]) @ np.stack([v.coords for v in vectors]).T
    if ell == 1:
        return float(m[0, 0])
    return float(np.linalg.det(m))


def _minor_dets(entries: np.ndarray, size: int) -> np.ndarray:
    """Determinants of all size x size principal minors, in lexicographic order."""
    k = entries.shape[0]
    idx = np.array(list(itertools.combinations(range(k), size)), dtype=int)
    if size == 1:
        return entries[idx[:, 0], idx[:, 0]]
    sub = entries[idx[:, :, None], idx[:, None, :]]
    if size == 2:
        return sub[:, 0, 0] * sub[:, 1, 1] - sub[:, 0, 1] * sub[:, 1, 0]
    return np.linalg.det(sub)


def principal_minor_sum(g: GramMatrix, size: int) -> float:
    """Sum of all size x size principal minors of the pairing table.

    Each minor equals the wedge evaluation of the corresponding sub-family;
    sizes beyond the table give 0. Summation uses math.fsum, so the result
    does not depend on enumeration order.
    """
    if size < 1:
        raise ValueError("minor size must be >= 1")
    if size > g.size:
        return 0.0
    return math.fsum(_minor_dets(g.entries, size).tolist())
