import numpy as np
import pytest

from lowrank import Covector, Dyad, DyadicPerturbation, Operator, Vector


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)


def random_vectors(rng, count, dim):
    return [Vector(rng.standard_normal(dim)) for _ in range(count)]


def random_covectors(rng, count, dim):
    return [Covector(rng.standard_normal(dim)) for _ in range(count)]


def random_perturbation(rng, dim, k):
    return DyadicPerturbation.from_arrays(
        rng.standard_normal((k, dim)), rng.standard_normal((k, dim))
    )


def well_conditioned_operator(rng, n, cond=4.0):
    """Random operator with singular values in [1, cond]: random rotations
    around a controlled diagonal, so the condition number is bounded."""
    q1, _ = np.linalg.qr(rng.standard_normal((n, n)))
    q2, _ = np.linalg.qr(rng.standard_normal((n, n)))
    singular_values = np.exp(rng.uniform(0.0, np.log(cond), size=n))
    return Operator(q1 @ np.diag(singular_values) @ q2)


def rel_err(computed, reference):
    computed = np.asarray(computed, dtype=float)
    reference = np.asarray(reference, dtype=float)
    return float(np.linalg.norm(computed - reference) / np.linalg.norm(reference))
