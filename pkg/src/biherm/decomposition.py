"""Discrete fibered decomposition induced by a connecting operator.

The space splits into eigenvalue-indexed fibers (the eigenspaces of G,
carrying normalized weights), grouped into segments of constant fiber
dimension.  On each fiber the two Hermitian forms are proportional with
ratio equal to the eigenvalue; operators commuting with G are exactly
the ones that are block-diagonal across fibers; operators in the
bicommutant act as a scalar on each fiber; and transformations
preserving both forms are assembled from one unitary block per fiber —
a single phase per fiber when all fibers are one-dimensional.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .connecting import ConnectingOperator
from .errors import (
    DimensionMismatchError,
    InternalInconsistencyError,
    NotGenericError,
    NotInCommutantError,
)
from .forms import DEFAULT_TOLERANCES, HermitianForm, Tolerances
from .spectral import SpectralResolution, is_generic_by_commutant, spectral_resolution

__all__ = [
    "Fiber",
    "DiscreteDirectIntegral",
    "DecomposableOperator",
    "ProportionalityReport",
    "ScalarBlockReport",
    "build_decomposition",
    "check_proportionality",
    "project_to_commutant_blocks",
    "check_bicommutant_scalar",
    "check_genericity_consistency",
    "sample_biunitary",
    "phase_biunitary",
]

_TINY = np.finfo(float).tiny


def _fro(mat: np.ndarray) -> float:
    return float(np.linalg.norm(mat))


@dataclass(frozen=True, eq=False)
class Fiber:
    """One spectral fiber: eigenvalue, weight, dimension and basis.

    ``basis`` is an (n, dim) block of h1-orthonormal columns spanning the
    eigenspace.
    """

    eigenvalue: float
    weight: float
    dim: int
    basis: np.ndarray

    def __post_init__(self):
        basis = np.asarray(self.basis)
        if basis.ndim != 2 or basis.shape[1] != self.dim:
            raise ValueError("fiber basis must be an (n, dim) column block")
        if not self.weight > 0:
            raise ValueError("fiber weight must be positive")
        basis = np.array(basis, copy=True)
        basis.flags.writeable = False
        object.__setattr__(self, "basis", basis)


@dataclass(frozen=True, eq=False)
class DiscreteDirectIntegral:
    """Ordered fibers plus the segments of constant fiber dimension.

    ``segments[k]`` lists the indices of the fibers of dimension k.  The
    fiber weights form a normalized discrete measure (dimension-weighted
    counting measure, sigma_j = k_j / n).
    """

    fibers: tuple[Fiber, ...]
    segments: dict[int, tuple[int, ...]]
    connecting: ConnectingOperator = field(repr=False)

    @property
    def dim(self) -> int:
        return self.connecting.dim

    @property
    def h1(self) -> HermitianForm:
        return self.connecting.h1

    @property
    def h2(self) -> HermitianForm:
        return self.connecting.h2

    @property
    def n_fibers(self) -> int:
        return len(self.fibers)

    def basis_matrix(self) -> np.ndarray:
        """Concatenated fiber bases: an h1-orthonormal n x n matrix."""
        return np.concatenate([f.basis for f in self.fibers], axis=1)

    def fiber_slices(self) -> list[slice]:
        """Column ranges of each fiber inside :meth:`basis_matrix`."""
        out, start = [], 0
        for f in self.fibers:
            out.append(slice(start, start + f.dim))
            start += f.dim
        return out

    def to_fiber_coordinates(self, a: np.ndarray) -> np.ndarray:
        """Express an ambient operator in the concatenated fiber basis."""
        v = self.basis_matrix()
        return v.conj().T @ self.h1.gram @ a @ v

    def from_fiber_coordinates(self, a_tilde: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`to_fiber_coordinates`."""
        v = self.basis_matrix()
        return v @ a_tilde @ v.conj().T @ self.h1.gram


@dataclass(frozen=True, eq=False)
class DecomposableOperator:
    """Per-fiber blocks A(lambda_j) of an operator in the commutant."""

    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        frozen = []
        for b in self.blocks:
            b = np.asarray(b, dtype=complex)
            if b.ndim != 2 or b.shape[0] != b.shape[1]:
                raise ValueError("blocks must be square")
            b = np.array(b, copy=True)
            b.flags.writeable = False
            frozen.append(b)
        object.__setattr__(self, "blocks", tuple(frozen))

    @property
    def block_dims(self) -> tuple[int, ...]:
        return tuple(b.shape[0] for b in self.blocks)


def build_decomposition(
    g: ConnectingOperator,
    tol: Tolerances = DEFAULT_TOLERANCES,
    resolution: SpectralResolution | None = None,
) -> DiscreteDirectIntegral:
    """Fibered decomposition from the clustered spectrum of G.

    Each eigenvalue cluster becomes a fiber with weight equal to its
    dimension over the total dimension; fibers of equal dimension are
    grouped into one segment.
    """
    if resolution is None:
        resolution = spectral_resolution(g, tol)
    n = g.dim
    fibers = tuple(
        Fiber(eigenvalue=float(lam), weight=mult / n, dim=mult, basis=basis)
        for lam, mult, basis in zip(
            resolution.eigenvalues, resolution.multiplicities, resolution.bases
        )
    )
    segments: dict[int, tuple[int, ...]] = {}
    for idx, f in enumerate(fibers):
        segments[f.dim] = segments.get(f.dim, ()) + (idx,)
    return DiscreteDirectIntegral(fibers=fibers, segments=segments, connecting=g)


@dataclass(frozen=True)
class ProportionalityReport:
    """Fiberwise comparison of h2 against eigenvalue-scaled h1.

    ``max_violation[j]`` is the largest relative deviation
    |h2(x, y) - lambda_j h1(x, y)| / ||h2|| over basis pairs of fiber j.
    """

    max_violation: tuple[float, ...]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(v <= self.tolerance for v in self.max_violation)

    @property
    def worst(self) -> float:
        return max(self.max_violation)


def check_proportionality(
    dec: DiscreteDirectIntegral,
    h1: HermitianForm,
    h2: HermitianForm,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ProportionalityReport:
    """Verify h2 = lambda_j * h1 on every fiber.

    The decomposition must come from the connecting operator of
    (h1, h2); violations are reported per fiber, never raised.
    """
    if h1.dim != dec.dim or h2.dim != dec.dim:
        raise DimensionMismatchError("form and decomposition dimensions differ")
    scale = max(_fro(h2.gram), _TINY)
    violations = []
    for f in dec.fibers:
        x = f.basis
        m1 = x.conj().T @ h1.gram @ x
        m2 = x.conj().T @ h2.gram @ x
        violations.append(float(np.max(np.abs(m2 - f.eigenvalue * m1))) / scale)
    return ProportionalityReport(
        max_violation=tuple(violations), tolerance=tol.tol_resid
    )


def _commutator_residual(a: np.ndarray, g: np.ndarray) -> float:
    return _fro(g @ a - a @ g) / max(_fro(g) * _fro(a), _TINY)


def project_to_commutant_blocks(
    a: np.ndarray,
    dec: DiscreteDirectIntegral,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> DecomposableOperator:
    """Split an operator commuting with G into its per-fiber blocks.

    An operator in the commutant is block-diagonal in the fiber basis;
    the cross-fiber blocks are certified to vanish (within ten times the
    residual tolerance, relative to the operator norm) before the
    diagonal blocks are returned.

    Raises
    ------
    NotInCommutantError
        If the commutator residual exceeds ``tol.tol_resid`` relative to
        ||G||*||A||, or the cross-fiber certification fails; the residual
        is attached to the exception.
    """
    a = np.asarray(a, dtype=complex)
    if a.shape != (dec.dim, dec.dim):
        raise DimensionMismatchError("operator and decomposition dimensions differ")
    resid = _commutator_residual(a, dec.connecting.mat)
    if resid > tol.tol_resid:
        raise NotInCommutantError(
            f"operator does not commute with G (relative residual {resid:.3e})",
            residual=resid,
        )
    a_tilde = dec.to_fiber_coordinates(a)
    slices = dec.fiber_slices()
    off = a_tilde.copy()
    for s in slices:
        off[s, s] = 0.0
    off_resid = _fro(off) / max(_fro(a), _TINY)
    if off_resid > 10.0 * tol.tol_resid:
        raise NotInCommutantError(
            f"cross-fiber blocks do not vanish (relative residual {off_resid:.3e})",
            residual=off_resid,
        )
    return DecomposableOperator(blocks=tuple(a_tilde[s, s] for s in slices))


@dataclass(frozen=True)
class ScalarBlockReport:
    """Whether an operator acts as a scalar on every fiber.

    ``scalars[j]`` is the best-fit multiplier on fiber j and
    ``scalar_residual[j]`` the relative deviation of the block from that
    multiple of the identity.
    """

    in_commutant: bool
    commutator_residual: float
    scalars: tuple[complex, ...]
    scalar_residual: tuple[float, ...]
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.in_commutant and all(
            r <= self.tolerance for r in self.scalar_residual
        )


def check_bicommutant_scalar(
    b: np.ndarray,
    dec: DiscreteDirectIntegral,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ScalarBlockReport:
    """Test whether an operator is fiberwise multiplication by a number.

    Operators in the bicommutant of G act on each fiber as b_j times the
    identity; the report carries the fitted scalars and per-fiber
    residuals, and never raises on failure.
    """
    b = np.asarray(b, dtype=complex)
    if b.shape != (dec.dim, dec.dim):
        raise DimensionMismatchError("operator and decomposition dimensions differ")
    resid = _commutator_residual(b, dec.connecting.mat)
    in_commutant = resid <= tol.tol_resid
    b_tilde = dec.to_fiber_coordinates(b)
    scale = max(_fro(b), _TINY)
    scalars, dev = [], []
    for s in dec.fiber_slices():
        blk = b_tilde[s, s]
        k = blk.shape[0]
        b_j = complex(np.trace(blk) / k)
        scalars.append(b_j)
        dev.append(_fro(blk - b_j * np.eye(k)) / scale)
    return ScalarBlockReport(
        in_commutant=in_commutant,
        commutator_residual=resid,
        scalars=tuple(scalars),
        scalar_residual=tuple(dev),
        tolerance=tol.tol_resid,
    )


def check_genericity_consistency(
    dec: DiscreteDirectIntegral,
    g: ConnectingOperator,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> bool:
    """All fibers one-dimensional iff the pair is generic.

    Returns whether every fiber is one-dimensional, after asserting that
    this agrees with the commutant-based genericity test.  A disagreement
    would falsify the implementation, not the input, so it raises.

    Raises
    ------
    InternalInconsistencyError
        If the two characterizations disagree.
    """
    unidimensional = all(f.dim == 1 for f in dec.fibers)
    generic = is_generic_by_commutant(g, tol)
    if unidimensional != generic:
        raise InternalInconsistencyError(
            f"fiber dimensions say unidimensional={unidimensional} but the "
            f"commutant test says generic={generic}"
        )
    return unidimensional


def _haar_unitary(k: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed k x k unitary via phase-fixed QR of a Ginibre matrix."""
    z = (rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def sample_biunitary(dec: DiscreteDirectIntegral, seed: int) -> np.ndarray:
    """Draw a random transformation preserving both Hermitian forms.

    One independent Haar-distributed unitary block is drawn per fiber
    (in fiber order, from a generator seeded with ``seed``, so results
    are reproducible), assembled block-diagonally in the fiber basis and
    converted back to ambient coordinates.  In the generic case every
    block is 1 x 1, i.e. the sample is a diagonal of phases in the fiber
    basis.
    """
    rng = np.random.default_rng(seed)
    n = dec.dim
    u_tilde = np.zeros((n, n), dtype=complex)
    for s, f in zip(dec.fiber_slices(), dec.fibers):
        u_tilde[s, s] = _haar_unitary(f.dim, rng)
    return dec.from_fiber_coordinates(u_tilde)


def phase_biunitary(dec: DiscreteDirectIntegral, phases) -> np.ndarray:
    """Bi-unitary transformation from one phase per fiber (generic case).

    Returns sum_j e^{i phi_j} P_j with P_j the fiber projectors.
    Composing two phase transformations adds their phases modulo 2 pi.

    Raises
    ------
    NotGenericError
        If some fiber has dimension greater than one.
    """
    phases = np.asarray(phases, dtype=float)
    if any(f.dim != 1 for f in dec.fibers):
        raise NotGenericError(
            f"phase transformations need one-dimensional fibers, got dimensions "
            f"{tuple(f.dim for f in dec.fibers)}"
        )
    if phases.shape != (dec.n_fibers,):
        raise ValueError(f"need one phase per fiber ({dec.n_fibers})")
    u_tilde = np.diag(np.exp(1j * phases))
    return dec.from_fiber_coordinates(u_tilde)
