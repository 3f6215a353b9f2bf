"""Shared test utilities: instance generation and error metrics."""

import numpy as np

from compart_h2.model import PlantModel


def make_feasible_instance(n, m, seed):
    """Random plant plus a strictly feasible gain for it.

    The closed loop is drawn first (strictly positive entries, column sums
    between 0.5 and 0.9), then the plant state map is backed out so the drawn
    gain is strictly feasible with comfortable margin.  The output block
    structure guarantees both standing assumptions exactly.
    """
    rng = np.random.default_rng(seed)
    a_cl = rng.uniform(0.05, 0.25, (n, n))
    a_cl *= rng.uniform(0.5, 0.9, n) / a_cl.sum(axis=0)
    b = rng.uniform(-1.0, 1.0, (n, m))
    k = rng.uniform(-0.5, 0.5, (m, n))
    a = a_cl + b @ k
    c = np.vstack([rng.uniform(-1.0, 1.0, (n, n)), np.zeros((m, n))])
    d = np.vstack([np.zeros((n, m)), np.diag(rng.uniform(0.5, 1.5, m))])
    g = rng.uniform(-1.0, 1.0, (n, n))
    plant = PlantModel(A=a, B=b, C=c, D=d, G=g, name=f"random_{n}x{m}_{seed}")
    return plant, k


def instance_grid(count=20):
    """Deterministic (n, m, seed) combinations cycling the target sizes."""
    sizes = [(2, 1), (2, 2), (3, 1), (3, 2), (4, 1), (4, 2)]
    return [(*sizes[i % len(sizes)], 1000 + i) for i in range(count)]


def rel_err(approx, ref):
    """Frobenius error relative to max(1, ||ref||)."""
    approx = np.asarray(approx, dtype=float)
    ref = np.asarray(ref, dtype=float)
    return float(np.linalg.norm(approx - ref)) / max(1.0, float(np.linalg.norm(ref)))


def random_schur(n, radius, seed):
    """Random square matrix rescaled to the requested spectral radius."""
    rng = np.random.default_rng(seed)
    f = rng.standard_normal((n, n))
    eigs = np.abs(np.linalg.eigvals(f))
    return f * (radius / eigs.max())
