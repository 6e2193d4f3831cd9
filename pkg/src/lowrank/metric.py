"""Nondegenerate bilinear metrics and inversion of perturbed maps into the dual.

A symmetric nondegenerate bilinear form identifies the space with its dual
(the musical isomorphisms). A map A from the space to its dual, perturbed by
a sum of covector dyads, is inverted by lowering it to an ordinary operator,
applying the truncated-order machinery, and composing with the inverse
identification. Indefinite metrics are allowed; only nondegeneracy matters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import oracle
from .approx import approx_inverse
from .errors import DegenerateMetric, DimensionMismatch, SingularMatrix
from .tensor import Covector, DyadicPerturbation, Operator, Vector

__all__ = ["Metric", "musical_flat", "musical_sharp", "perturbed_dual_inverse"]

_SYMMETRY_ATOL = 1e-12


@dataclass(frozen=True)
class Metric:
    """Symmetric nondegenerate bilinear form, as its coordinate matrix.

    Symmetry is checked entrywise at construction; nondegeneracy is checked
    by factorizing the matrix, and the factorization is kept for later solves.
    """

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float, copy=True)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"metric must be square, got shape {entries.shape}")
        if entries.shape[0] < 2:
            raise ValueError("metric needs dimension >= 2")
        if not np.all(np.isfinite(entries)):
            raise ValueError("metric entries must be finite")
        if float(np.max(np.abs(entries - entries.T))) > _SYMMETRY_ATOL:
            raise ValueError("metric matrix is not symmetric")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        try:
            factorization = oracle.lu_factor(entries)
        except SingularMatrix as exc:
            raise DegenerateMetric(f"metric is degenerate: {exc}") from exc
        object.__setattr__(self, "_lu", factorization)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def euclidean(cls, n: int) -> "Metric":
        return cls(np.eye(n))


def musical_flat(g: Metric, v: Vector) -> Covector:
    """Lower a vector: the covector pairing to g(v, .)."""
    if v.dim != g.dim:
        raise DimensionMismatch(f"vector of dimension {v.dim}, metric of {g.dim}")
    return Covector(g.entries @ v.coords)


def musical_sharp(g: Metric, p: Covector) -> Vector:
    """Raise a covector: the inverse of musical_flat."""
    if p.dim != g.dim:
        raise DimensionMismatch(f"covector of dimension {p.dim}, metric of {g.dim}")
    return Vector(oracle.lu_solve(g._lu, p.coords))


def perturbed_dual_inverse(
    g: Metric,
    a: np.ndarray | Operator,
    w: Sequence[tuple[Covector, Covector]],
    m: int,
) -> np.ndarray:
    """Order-m approximate inverse of a space-to-dual map perturbed by covector dyads.

    The perturbation is given as pairs (q_i, p_i) of covectors, meaning the
    map x -> sum_i p_i(x) q_i. Raising each q_i through the metric turns the
    perturbed map into an ordinary operator perturbed by vector dyads, which
    the order-m machinery inverts; composing with the raising isomorphism
    gives the dual-to-space result as a plain matrix.
    """
    a_entries = a.entries if isinstance(a, Operator) else np.asarray(a, dtype=float)
    if a_entries.shape != (g.dim, g.dim):
        raise DimensionMismatch(
            f"map of shape {a_entries.shape} does not match metric dimension {g.dim}"
        )
    if not w:
        raise ValueError("the dual perturbation needs at least one (q, p) pair")
    lowered = Operator(oracle.lu_solve(g._lu, a_entries))
    vectors = []
    covectors = []
    for q_cov, p_cov in w:
        vectors.append(musical_sharp(g, q_cov).coords)
        covectors.append(np.asarray(p_cov.coords))
    dyads = DyadicPerturbation.from_arrays(vectors, covectors)
    lowered_inverse = approx_inverse(lowered, dyads, m)
    g_inverse = oracle.lu_solve(g._lu, np.eye(g.dim))
    return lowered_inverse.entries @ g_inverse
