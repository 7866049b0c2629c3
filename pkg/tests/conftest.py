"""Shared corpus generators and independent brute-force oracles.

Corpus matrices are kept well-conditioned (eigenvalues in [0.5, 2],
modest conjugations) so that acceptance-level residual bounds measure
algorithmic correctness rather than conditioning luck.  The oracles here
are deliberately independent of the library code paths they check.
"""

from __future__ import annotations

import numpy as np

from biherm import ComplexStructureJ, HermitianForm, RealForm

_CANONICAL_BLOCK = np.array([[0.0, -1.0], [1.0, 0.0]])


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diagonal(r))


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_spd(rng: np.random.Generator, n: int) -> np.ndarray:
    """Symmetric positive-definite with spectrum in [0.5, 2]."""
    q = random_orthogonal(rng, n)
    w = 0.5 + 1.5 * rng.random(n)
    m = (q * w) @ q.T
    return 0.5 * (m + m.T)

def random_hpd(rng: np.random.Generator, n: int) -> np.ndarray:
    """Hermitian positive-definite with spectrum in [0.5, 2]."""
    q = random_unitary(rng, n)
    w = 0.5 + 1.5 * rng.random(n)
    m = (q * w) @ q.conj().T
    return 0.5 * (m + m.conj().T)


def random_complex_structure(rng: np.random.Generator, m: int) -> ComplexStructureJ:
    """Conjugated canonical structure; the conjugation has singular values
    in [0.8, 1.25] so conditioning never dominates residuals."""
    assert m % 2 == 0
    j0 = np.kron(np.eye(m // 2), _CANONICAL_BLOCK)
    d = 0.8 + 0.45 * rng.random(m)
    s = (random_orthogonal(rng, m) * d) @ random_orthogonal(rng, m).T
    j = s @ j0 @ np.linalg.inv(s)
    # one Newton step toward J^2 = -1 scrubs the inversion roundoff
    j = 1.5 * j + 0.5 * (j @ j @ j)
    return ComplexStructureJ(j)


def random_admissible_pair(
    rng: np.random.Generator, m: int
) -> tuple[RealForm, ComplexStructureJ]:
    """A metric already compatible with a random complex structure."""
    j = random_complex_structure(rng, m)
    g0 = random_spd(rng, m)
    g = 0.5 * (j.mat.T @ g0 @ j.mat + g0)
    return RealForm(0.5 * (g + g.T), "symmetric"), j


def hermitian_pair_with_multiplicities(
    rng: np.random.Generator,
    multiplicities: tuple[int, ...],
    eigenvalues: np.ndarray | None = None,
    min_gap: float = 0.05,
) -> tuple[HermitianForm, HermitianForm, np.ndarray]:
    """Form pair whose connecting operator has a prescribed spectrum.

    Returns (h1, h2, cluster_eigenvalues).  The connecting operator is
    h1-unitarily diagonalized by construction, with exact eigenvalue
    repetitions according to ``multiplicities``.
    """
    k = len(multiplicities)
    n = sum(multiplicities)
    if eigenvalues is None:
        # ascending, separated by at least min_gap
        steps = min_gap + rng.random(k)
        eigenvalues = 0.5 + np.cumsum(steps)
    lam = np.repeat(np.asarray(eigenvalues, dtype=float), multiplicities)
    h1 = random_hpd(rng, n)
    chol = np.linalg.cholesky(h1)
    v = np.linalg.solve(chol.conj().T, random_unitary(rng, n))  # h1-orthonormal columns
    g = (v * lam) @ v.conj().T @ h1
    h2 = h1 @ g
    h2 = 0.5 * (h2 + h2.conj().T)
    return HermitianForm(h1), HermitianForm(h2), np.asarray(eigenvalues, dtype=float)


def random_multiplicity_pattern(rng: np.random.Generator, n: int) -> tuple[int, ...]:
    """Random composition of n with a mix of simple and degenerate parts."""
    parts = []
    left = n
    while left > 0:
        if rng.random() < 0.6:
            p = 1
        else:
            p = int(rng.integers(2, min(4, left) + 1)) if left > 1 else 1
        parts.append(min(p, left))
        left -= parts[-1]
    return tuple(parts)


# --- independent oracles -------------------------------------------------

def commutator_map(mat: np.ndarray) -> np.ndarray:
    """Matrix of X -> mat X - X mat acting on row-major vec(X)."""
    n = mat.shape[0]
    eye = np.eye(n)
    return np.kron(mat, eye) - np.kron(eye, mat.T)


def nullspace_dim(k: np.ndarray, rtol: float = 1e-8, scale: float | None = None) -> int:
    """Null-space dimension with the threshold taken relative to ``scale``
    (the natural operator norm), so a numerically-zero map has full kernel."""
    s = np.linalg.svd(k, compute_uv=False)
    if scale is None:
        scale = float(s[0]) if s.size else 0.0
    if scale == 0.0:
        return k.shape[1]
    return int(k.shape[1] - np.sum(s > rtol * scale))


def brute_commutant_basis(mat: np.ndarray, rtol: float = 1e-8) -> list[np.ndarray]:
    """Orthonormal basis of {X : [mat, X] = 0} by dense SVD."""
    n = mat.shape[0]
    k = commutator_map(mat)
    _, s, vh = np.linalg.svd(k)
    scale = float(np.linalg.norm(mat, 2))
    rank = int(np.sum(s > rtol * scale)) if scale > 0 else 0
    return [vh[i].conj().reshape(n, n) for i in range(rank, n * n)]


def brute_bicommutant_dim(mat: np.ndarray, rtol: float = 1e-8) -> int:
    """Dimension of the double commutant by stacking commutator maps.

    The commutant basis elements have unit Frobenius norm, so a unit
    scale is the right threshold reference for the stacked map.
    """
    basis = brute_commutant_basis(mat, rtol)
    stacked = np.vstack([commutator_map(x) for x in basis])
    return nullspace_dim(stacked, rtol, scale=1.0)
