"""Exact determinant and inverse of an identity operator perturbed by dyads.

The central object is A = id + sum_i u_i (x) p_i. Its determinant is one plus
the sum of all principal minors of the pairing table G[a][b] = p_a(u_b), and
det(A) * A^{-1} expands into a sum of antisymmetrized rank-adjustment
operators over index subsets. Both expansions cap themselves at the space
dimension, so callers may pass more dyads than dimensions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import oracle
from .errors import DimensionMismatch, SingularBase, SingularMatrix, SingularPerturbation
from .tensor import (
    Covector,
    DyadicPerturbation,
    GramMatrix,
    Operator,
    Vector,
    gram,
    principal_minor_sum,
    wedge_eval,
)

__all__ = [
    "PerturbedIdentity",
    "ExactInverseResult",
    "osquare_apply",
    "osquare_operator",
    "det_perturbed_identity",
    "inverse_perturbed_identity",
    "pairing_form_inverse",
    "perturbed_inverse_exact",
]

# Relative singularity guard on the determinant, scaled by the minor sums.
DET_GUARD = 1e-12


@dataclass(frozen=True)
class PerturbedIdentity:
    """The operator id + sum of dyads, kept in factored (dyad list) form."""

    dyads: DyadicPerturbation

    @property
    def dim(self) -> int:
        return self.dyads.dim

    def materialize(self) -> Operator:
        n = self.dim
        return Operator(np.eye(n) + self.dyads.to_operator().entries)

    def gram_matrix(self) -> GramMatrix:
        vectors = [d.vector for d in self.dyads.dyads]
        return gram(self.dyads, vectors)


@dataclass(frozen=True)
class ExactInverseResult:
    """Inverse of a perturbed identity together with its division-free form.

    adjugate_like holds inverse * det, so inverse = adjugate_like / det_a
    entrywise.
    """

    det_a: float
    inverse: Operator
    adjugate_like: Operator


def _family_arrays(
    zs: Sequence[Vector], ps: Sequence[Covector]
) -> tuple[np.ndarray, np.ndarray, int]:
    ell = len(zs)
    if ell == 0 or len(ps) == 0:
        raise ValueError("need at least one vector and one covector")
    if len(ps) != ell:
        raise DimensionMismatch(f"{ell} vectors paired with {len(ps)} covectors")
    n = zs[0].dim
    for z in zs:
        if z.dim != n:
            raise DimensionMismatch("vectors of mixed dimensions")
    for p in ps:
        if p.dim != n:
            raise DimensionMismatch("covectors of mixed dimensions")
    if ell >= n:
        raise ValueError(
            f"family size {ell} must stay below the space dimension {n}"
        )
    z_mat = np.column_stack([z.coords for z in zs])
    p_mat = np.column_stack([p.coords for p in ps])
    return z_mat, p_mat, ell


def osquare_apply(zs: Sequence[Vector], ps: Sequence[Covector], v: Vector) -> Vector:
    """Apply the antisymmetrized rank adjustment of a (vectors, covectors) family.

    The result is v times the wedge of the covectors on the vectors, minus,
    for each slot i, the i-th vector times the wedge with v substituted into
    slot i. The family size must satisfy 1 <= len <= n-1.
    """
    zs = list(zs)
    ps = list(ps)
    _family_arrays(zs, ps)  # validates sizes and dimensions
    if v.dim != zs[0].dim:
        raise DimensionMismatch(f"argument of dimension {v.dim}, expected {zs[0].dim}")
    out = v.coords * wedge_eval(ps, zs)
    for i in range(len(zs)):
        replaced = list(zs)
        replaced[i] = v
        out = out - zs[i].coords * wedge_eval(ps, replaced)
    return Vector(out)


def osquare_operator(zs: Sequence[Vector], ps: Sequence[Covector]) -> Operator:
    """Materialize the rank adjustment as a matrix, column by column.

    Column j is osquare_apply evaluated on the j-th basis vector.
    """
    zs = list(zs)
    ps = list(ps)
    _family_arrays(zs, ps)
    n = zs[0].dim
    columns = []
    for j in range(n):
        basis = np.zeros(n)
        basis[j] = 1.0
        columns.append(osquare_apply(zs, ps, Vector(basis)).coords)
    return Operator(np.column_stack(columns))


def _alpha_values(g: GramMatrix, n: int) -> list[float]:
    """Principal minor sums of the pairing table, sizes 1 .. min(n, k)."""
    return [principal_minor_sum(g, size) for size in range(1, min(n, g.size) + 1)]


def det_perturbed_identity(a: PerturbedIdentity) -> float:
    """Determinant of id + sum of dyads via the pairing-table minor expansion."""
    alphas = _alpha_values(a.gram_matrix(), a.dim)
    return math.fsum([1.0, *alphas])


def _batched_adjugate(mats: np.ndarray) -> np.ndarray:
    """Adjugates of a stack of small square matrices via cofactor minors."""
    count, size, _ = mats.shape
    if size == 1:
        return np.ones_like(mats)
    cof = np.empty_like(mats)
    index = np.arange(size)
    stack_index = np.arange(count)
    for r in range(size):
        keep_rows = index[index != r]
        for c in range(size):
            keep_cols = index[index != c]
            sub = mats[np.ix_(stack_index, keep_rows, keep_cols)]
            dets = sub[:, 0, 0] if size == 2 else np.linalg.det(sub)
            cof[:, r, c] = ((-1.0) ** (r + c)) * dets
    return cof.transpose(0, 2, 1)


def _grouped_subset_sum(
    u_mat: np.ndarray, p_mat: np.ndarray, g_entries: np.ndarray, max_size: int
) -> np.ndarray:
    """Sum of the rank adjustments over all non-empty subsets up to max_size.

    Evaluates det(G_S) I - U_S adj(G_S) P_S^T per subset, grouped by subset
    size so the minor determinants batch into single LAPACK calls.
    """
    n, k = u_mat.shape
    total = np.zeros((n, n))
    for size in range(1, max_size + 1):
        idx = np.array(list(itertools.combinations(range(k), size)), dtype=int)
        sub = g_entries[idx[:, :, None], idx[:, None, :]]
        dets = sub[:, 0, 0] if size == 1 else np.linalg.det(sub)
        adj = _batched_adjugate(sub)
        u_sel = u_mat[:, idx].transpose(1, 0, 2)
        p_sel = p_mat[:, idx].transpose(1, 0, 2)
        total += math.fsum(dets.tolist()) * np.eye(n)
        total -= np.einsum("cai,cij,cbj->ab", u_sel, adj, p_sel)
    return total


def _literal_subset_sum(a: PerturbedIdentity, max_size: int) -> np.ndarray:
    """Reference path: sum osquare_operator over subsets, one call each."""
    dyads = a.dyads.dyads
    n = a.dim
    total = np.zeros((n, n))
    for size in range(1, max_size + 1):
        for subset in itertools.combinations(range(len(dyads)), size):
            zs = [dyads[j].vector for j in subset]
            ps = [dyads[j].covector for j in subset]
            total += osquare_operator(zs, ps).entries
    return total


def inverse_perturbed_identity(
    a: PerturbedIdentity, method: str = "grouped"
) -> ExactInverseResult:
    """Exact inverse of id + sum of dyads from the subset expansion.

    The division-free operator (identity plus the subset sum, capped at
    subset size min(n-1, k)) equals the inverse times the determinant;
    dividing by the determinant yields the inverse itself.

    method="grouped" batches the subset terms by size; method="literal"
    sums individual osquare_operator calls. Both produce the same operator
    up to roundoff.

    Raises SingularPerturbation when |det| falls at or below
    1e-12 * (1 + sum of |minor sums|).
    """
    n = a.dim
    k = a.dyads.rank_bound
    g = a.gram_matrix()
    alphas = _alpha_values(g, n)
    det_a = math.fsum([1.0, *alphas])
    guard = DET_GUARD * (1.0 + math.fsum(abs(x) for x in alphas))
    if abs(det_a) <= guard:
        raise SingularPerturbation(
            f"determinant {det_a:.3e} within guard {guard:.3e}; the perturbed "
            "identity is numerically singular"
        )
    max_size = min(n - 1, k)
    if method == "grouped":
        subset_sum = _grouped_subset_sum(
            a.dyads.vector_matrix(), a.dyads.covector_matrix(), g.entries, max_size
        )
    elif method == "literal":
        subset_sum = _literal_subset_sum(a, max_size)
    else:
        raise ValueError(f"unknown method {method!r}")
    adjugate_like = np.eye(n) + subset_sum
    return ExactInverseResult(
        det_a=det_a,
        inverse=Operator(adjugate_like / det_a),
        adjugate_like=Operator(adjugate_like),
    )


def pairing_form_inverse(a: PerturbedIdentity, x: Vector, q: Covector) -> float:
    """The scalar q(A^{-1} x) * det(A), computed without any division.

    Expands as q(x) plus wedge evaluations of q joined to each covector
    sub-family against x joined to the matching vector sub-family, over all
    subsets of size at most min(n-1, k).
    """
    if x.dim != a.dim or q.dim != a.dim:
        raise DimensionMismatch("argument dimensions do not match the operator")
    dyads = a.dyads.dyads
    terms = [float(np.dot(q.coords, x.coords))]
    for size in range(1, min(a.dim - 1, len(dyads)) + 1):
        for subset in itertools.combinations(range(len(dyads)), size):
            covs = [q] + [dyads[j].covector for j in subset]
            vecs = [x] + [dyads[j].vector for j in subset]
            terms.append(wedge_eval(covs, vecs))
    return math.fsum(terms)


def perturbed_inverse_exact(b: Operator, q: DyadicPerturbation) -> Operator:
    """Exact inverse of b plus a sum of dyads.

    Pulls the dyad vectors back through b, inverts the resulting perturbed
    identity, and composes with the inverse of b. Raises SingularBase when b
    cannot be factorized and SingularPerturbation when the perturbed operator
    itself is singular.
    """
    if b.dim != q.dim:
        raise DimensionMismatch(
            f"operator of dimension {b.dim} perturbed in dimension {q.dim}"
        )
    try:
        f = oracle.lu_factor(b)
    except SingularMatrix as exc:
        raise SingularBase(f"base operator is singular: {exc}") from exc
    u_mat = oracle.lu_solve(f, q.vector_matrix())
    lifted = DyadicPerturbation.from_arrays(u_mat.T, q.covector_matrix().T)
    result = inverse_perturbed_identity(PerturbedIdentity(lifted))
    b_inv = oracle.lu_inverse(f)
    return Operator(result.inverse.entries @ b_inv.entries)
