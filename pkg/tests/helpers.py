"""Shared fixtures and independent oracles used across the test suite.

Oracles here must stay independent of the library code paths they check:
eigenvalues via the characteristic polynomial, projections via bisection,
covariance via explicit two-pass loops.
"""

import numpy as np

from spcakit import symmetrize


def random_psd(n, seed, scale=1.0):
    """Seeded Gram-matrix PSD instance."""
    rng = np.random.Generator(np.random.Philox(seed))
    g = rng.standard_normal((n, n))
    return symmetrize(scale * (g @ g.T) / n)


def random_unit_vector(n, seed):
    rng = np.random.Generator(np.random.Philox(seed))
    x = rng.standard_normal(n)
    return x / np.linalg.norm(x)


def charpoly_eigenvalues(entries):
    """Eigenvalues as roots of the characteristic polynomial.

    Coefficients come from the Faddeev-LeVerrier recurrence (traces of
    matrix powers only, no eigensolver), roots from the companion matrix.
    Independent of the symmetric eigensolver under test.
    """
    n = entries.shape[0]
    coeffs = [1.0]
    m = np.zeros_like(entries)
    c = 1.0
    for k in range(1, n + 1):
        m = entries @ (m + c * np.eye(n))
        c = -np.trace(m) / k
        coeffs.append(c)
    return np.sort(np.roots(coeffs).real)[::-1]


def l1_ball_projection_bisection(matrix, radius, tol=1e-12):
    """Projection onto the entrywise l1 ball by bisection on the threshold."""
    flat = np.abs(matrix).ravel()
    if flat.sum() <= radius:
        return matrix.copy()
    lo, hi = 0.0, flat.max()
    for _ in range(200):
        mid = (lo + hi) / 2.0
        if np.maximum(flat - mid, 0.0).sum() > radius:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    theta = (lo + hi) / 2.0
    return np.sign(matrix) * np.maximum(np.abs(matrix) - theta, 0.0)


def two_pass_covariance(data, center=True):
    """Naive covariance with explicit loops, for cross-checking."""
    m, n = data.shape
    mu = data.sum(axis=0) / m if center else np.zeros(n)
    cov = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for t in range(m):
                acc += (data[t, i] - mu[i]) * (data[t, j] - mu[j])
            cov[i, j] = acc / (m - 1)
    return cov
