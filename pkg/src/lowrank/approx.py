"""Truncated-order approximations of the inverse of a dyadically perturbed operator.

The m-th order approximation keeps subset terms of size at most m and divides
by the truncated determinant 1 + alpha_1 + ... + alpha_m, where alpha_i is
the sum of all i x i principal minors of the pairing table. It reproduces the
exact inverse once m reaches the number of dyads (more precisely, the rank of
the perturbation), while the plain Taylor/Neumann truncation of the same
order never terminates exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import oracle
from .errors import (
    DimensionMismatch,
    SingularBase,
    SingularMatrix,
    TruncatedDetSingular,
)
from .exact import (
    DET_GUARD,
    PerturbedIdentity,
    _grouped_subset_sum,
    perturbed_inverse_exact,
)
from .tensor import DyadicPerturbation, GramMatrix, Operator, principal_minor_sum

__all__ = [
    "AlphaCoefficients",
    "ApproxReport",
    "alpha_coefficients",
    "truncated_det",
    "approx_inverse",
    "taylor_inverse",
    "osquare_truncated_inverse",
    "approx_report",
]


@dataclass(frozen=True)
class AlphaCoefficients:
    """Principal-minor sums of a pairing table and their running totals.

    alphas[i-1] is the sum of all i x i principal minors, for i up to
    K = min(n, k); larger sizes vanish and are omitted. partial_sums[m] is
    1 plus the first min(m, K) alphas, so partial_sums[0] == 1 and
    partial_sums[K] equals the full determinant of the perturbed identity.
    """

    alphas: tuple[float, ...]
    partial_sums: tuple[float, ...]

    @property
    def order_cap(self) -> int:
        return len(self.alphas)

    def abs_scale(self, m: int) -> float:
        """1 plus the summed magnitudes of the first min(m, K) alphas."""
        upto = min(m, len(self.alphas))
        return 1.0 + math.fsum(abs(a) for a in self.alphas[:upto])


def alpha_coefficients(g: GramMatrix, n: int, method: str = "subsets") -> AlphaCoefficients:
    """Minor sums of the k x k pairing table, capped at size min(n, k).

    method="subsets" enumerates principal minors directly (the definition);
    method="charpoly" reads the same values off the characteristic polynomial
    of the table, which costs one eigenvalue computation instead of 2^k
    minors. The two agree to roundoff and are cross-checked in the tests.
    """
    if n < 2:
        raise ValueError(f"space dimension must be >= 2, got {n}")
    cap = min(n, g.size)
    if method == "subsets":
        alphas = [principal_minor_sum(g, size) for size in range(1, cap + 1)]
    elif method == "charpoly":
        coeffs = np.poly(g.entries)
        alphas = [((-1.0) ** i) * float(coeffs[i]) for i in range(1, cap + 1)]
    else:
        raise ValueError(f"unknown method {method!r}")
    partial = [1.0]
    for i in range(1, cap + 1):
        partial.append(math.fsum([1.0, *alphas[:i]]))
    return AlphaCoefficients(alphas=tuple(alphas), partial_sums=tuple(partial))


def truncated_det(ac: AlphaCoefficients, m: int) -> float:
    """Determinant truncated at order m: 1 + alpha_1 + ... + alpha_min(m, K)."""
    if m < 0:
        raise ValueError(f"order must be >= 0, got {m}")
    return ac.partial_sums[min(m, ac.order_cap)]


def _check_truncated_det(ac: AlphaCoefficients, m: int) -> float:
    det_m = truncated_det(ac, m)
    guard = DET_GUARD * ac.abs_scale(m)
    if abs(det_m) <= guard:
        raise TruncatedDetSingular(
            f"truncated determinant {det_m:.3e} at order {m} within guard "
            f"{guard:.3e}; the approximation is undefined here"
        )
    return det_m


def _power_series(
    binv: np.ndarray,
    u_mat: np.ndarray,
    pb_mat: np.ndarray,
    g_entries: np.ndarray,
    weights: list[float],
    det_m: float,
    order: int,
    powers: str,
) -> np.ndarray:
    """binv + (1/det_m) * sum_{i=1..order} (-1)^i weights[order-i] (B^-1 Q)^i B^-1.

    powers="dyadic" reduces each power to a Gram-matrix power sandwiched
    between the lifted vectors and covectors; powers="dense" forms the n x n
    products directly. Both paths accumulate the same sum.
    """
    if powers != "dyadic":
        raise ValueError(f"unknown powers mode {powers!r}")
    if order == 0:
        return binv.copy()
    k = g_entries.shape[0]
    inner = np.zeros((k, k))
    g_power = np.eye(k)
    for i in range(1, order + 1):
        inner += ((-1.0) ** i) * weights[order - i] * g_power
        if i < order:
            g_power = g_power @ g_entries
    return binv + u_mat @ (inner / det_m) @ pb_mat


def _power_series_dense(
    binv: np.ndarray,
    biq: np.ndarray,
    weights: list[float],
    det_m: float,
    order: int,
) -> np.ndarray:
    """Dense-product evaluation of the same series, for cross-checking."""
    if order == 0:
        return binv.copy()
    total = binv.copy()
    power = np.eye(binv.shape[0])
    for i in range(1, order + 1):
        power = power @ biq
        total += ((-1.0) ** i) * (weights[order - i] / det_m) * (power @ binv)
    return total


def _lift(b: Operator, q: DyadicPerturbation):
    """Factor the base operator and pull the dyad vectors back through it."""
    if b.dim != q.dim:
        raise DimensionMismatch(
            f"operator of dimension {b.dim} perturbed in dimension {q.dim}"
        )
    try:
        f = oracle.lu_factor(b)
    except SingularMatrix as exc:
        raise SingularBase(f"base operator is singular: {exc}") from exc
    binv = oracle.lu_inverse(f).entries
    u_mat = oracle.lu_solve(f, q.vector_matrix())
    p_mat = q.covector_matrix()
    g = GramMatrix(p_mat.T @ u_mat)
    return binv, u_mat, p_mat, g


def approx_inverse(
    b: Operator, q: DyadicPerturbation, m: int, powers: str = "dyadic"
) -> Operator:
    """Order-m approximate inverse of b plus a sum of dyads.

    Order 0 returns the inverse of b unchanged. The series is evaluated at
    the effective order min(m, n, k): beyond the rank bound of the
    perturbation every order yields the exact inverse, and stopping there
    avoids accumulating large mutually-canceling powers.

    Raises SingularBase when b cannot be factorized and TruncatedDetSingular
    when the truncated determinant at the effective order is numerically zero.
    """
    if m < 0:
        raise ValueError(f"order must be >= 0, got {m}")
    binv, u_mat, p_mat, g = _lift(b, q)
    ac = alpha_coefficients(g, b.dim)
    order = min(m, b.dim, q.rank_bound)
    det_m = _check_truncated_det(ac, order)
    weights = [truncated_det(ac, j) for j in range(order + 1)]
    if powers == "dense":
        biq = u_mat @ p_mat.T
        return Operator(_power_series_dense(binv, biq, weights, det_m, order))
    pb_mat = p_mat.T @ binv
    return Operator(
        _power_series(binv, u_mat, pb_mat, g.entries, weights, det_m, order, powers)
    )


def taylor_inverse(
    b: Operator, q: DyadicPerturbation, m: int, powers: str = "dyadic"
) -> Operator:
    """Order-m Taylor (Neumann) truncation of the perturbed inverse.

    Identical to the order-m approximation with every alpha forced to zero;
    unlike it, the series genuinely changes at every order and is never
    exact, so no order clamping applies.
    """
    if m < 0:
        raise ValueError(f"order must be >= 0, got {m}")
    binv, u_mat, p_mat, g = _lift(b, q)
    weights = [1.0] * (m + 1)
    if powers == "dense":
        biq = u_mat @ p_mat.T
        return Operator(_power_series_dense(binv, biq, weights, 1.0, m))
    pb_mat = p_mat.T @ binv
    return Operator(
        _power_series(binv, u_mat, pb_mat, g.entries, weights, 1.0, m, powers)
    )


def osquare_truncated_inverse(b: Operator, q: DyadicPerturbation, m: int) -> Operator:
    """Order-m approximation in subset form.

    Keeps the rank-adjustment subset terms of size at most min(m, n-1, k) and
    divides by the truncated determinant at order m. Agrees with
    approx_inverse at every order; the two are the same object written as a
    subset sum instead of a power series.
    """
    if m < 0:
        raise ValueError(f"order must be >= 0, got {m}")
    binv, u_mat, p_mat, g = _lift(b, q)
    ac = alpha_coefficients(g, b.dim)
    order = min(m, b.dim, q.rank_bound)
    det_m = _check_truncated_det(ac, order)
    if order == 0:
        return Operator(binv.copy())
    n = b.dim
    max_size = min(order, n - 1, q.rank_bound)
    numerator = np.eye(n) + _grouped_subset_sum(u_mat, p_mat, g.entries, max_size)
    return Operator((numerator @ binv) / det_m)


@dataclass(frozen=True)
class ApproxReport:
    """Per-order comparison of the approximation against the Taylor truncation.

    Errors are relative Frobenius distances to the LU inverse of the
    materialized perturbed operator. Once the order reaches the number of
    dyads the approximation error drops to roundoff while the Taylor error
    generally does not.
    """

    order: int
    det_m: float
    approx_inverse: Operator
    taylor_inverse: Operator
    approx_error: float
    taylor_error: float


def approx_report(b: Operator, q: DyadicPerturbation, m: int) -> ApproxReport:
    """Evaluate both order-m truncations and their errors against the exact inverse."""
    perturbed = Operator(b.entries + q.to_operator().entries)
    reference = oracle.lu_inverse(oracle.lu_factor(perturbed)).entries
    ref_norm = float(np.linalg.norm(reference))
    binv, u_mat, p_mat, g = _lift(b, q)
    ac = alpha_coefficients(g, b.dim)
    order = min(m, b.dim, q.rank_bound)
    det_m = _check_truncated_det(ac, order)
    approx = approx_inverse(b, q, m)
    taylor = taylor_inverse(b, q, m)
    return ApproxReport(
        order=m,
        det_m=det_m,
        approx_inverse=approx,
        taylor_inverse=taylor,
        approx_error=float(np.linalg.norm(approx.entries - reference)) / ref_norm,
        taylor_error=float(np.linalg.norm(taylor.entries - reference)) / ref_norm,
    )
