"""Admissible triples (metric, complex structure, symplectic form).

A triple (g, J, omega) is *admissible* when J is anti-Hermitian with
respect to the positive metric g, J^2 = -1, and the three are linked by
``gram_omega = gram_g @ J`` (i.e. omega(x, y) = g(x, Jy); this fixed
matrix convention is used everywhere to prevent sign drift).  Admissible
triples complexify the real space and carry a positive-definite
Hermitian structure

    h(x, y) = g(x, y) + i * g(Jx, y),

linear in the second argument.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateSymplecticError,
    NotAdmissibleError,
    NotSkewError,
)
from .forms import (
    DEFAULT_TOLERANCES,
    ComplexStructureJ,
    HermitianForm,
    RealForm,
    Tolerances,
    sqrt_positive,
    validate_positive,
)

__all__ = [
    "AdmissibleTriple",
    "ComplexificationMap",
    "symmetrize_metric",
    "omega_from_g_j",
    "triple_from_g_j",
    "triple_from_g_omega",
    "build_complexification",
    "complexification_from_j",
    "hermitian_from_triple",
]

_TINY = np.finfo(float).tiny


def _maxabs(mat: np.ndarray) -> float:
    return float(np.max(np.abs(mat))) if np.asarray(mat).size else 0.0


@dataclass(frozen=True, eq=False)
class AdmissibleTriple:
    """A compatible (g, J, omega) triple; invariants checked on construction.

    Raises
    ------
    NotAdmissibleError
        If g is not symmetric positive-definite, J is not g-anti-Hermitian,
        or omega does not equal g composed with J.
    """

    g: RealForm
    j: ComplexStructureJ
    omega: RealForm
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)

    def __post_init__(self):
        g, j, omega = self.g.gram, self.j.mat, self.omega.gram
        if not (g.shape == j.shape == omega.shape):
            raise NotAdmissibleError("g, J and omega dimensions differ")
        if self.g.symmetry_tag != "symmetric":
            raise NotAdmissibleError("g must be tagged symmetric")
        if self.omega.symmetry_tag != "antisymmetric":
            raise NotAdmissibleError("omega must be tagged antisymmetric")
        if not validate_positive(self.g, self.tol).passed:
            raise NotAdmissibleError("g is not positive-definite")
        scale = max(_maxabs(g), _TINY)
        anti = _maxabs(j.T @ g + g @ j)
        if anti > self.tol.tol_resid * scale:
            raise NotAdmissibleError(
                f"J is not g-anti-Hermitian (relative residual {anti / scale:.3e})"
            )
        link = _maxabs(omega - g @ j)
        if link > self.tol.tol_resid * scale:
            raise NotAdmissibleError(
                f"omega != g o J (relative residual {link / scale:.3e})"
            )

    @property
    def dim(self) -> int:
        return self.g.dim


def symmetrize_metric(
    g: RealForm,
    j: ComplexStructureJ,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> RealForm:
    """Average a positive metric with its J-pullback.

    Returns g_s with Gram matrix ``(J.T @ g @ J + g) / 2``.  The result is
    symmetric positive-definite whenever g is, J is g_s-anti-Hermitian by
    construction, and the operation is idempotent.
    """
    if g.dim != j.dim:
        raise NotAdmissibleError("metric and complex structure dimensions differ")
    if not validate_positive(g, tol).passed:
        raise NotAdmissibleError("metric is not symmetric positive-definite")
    gram = 0.5 * (j.mat.T @ g.gram @ j.mat + g.gram)
    gram = 0.5 * (gram + gram.T)
    return RealForm(gram, "symmetric", tol)


def omega_from_g_j(
    g: RealForm,
    j: ComplexStructureJ,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> RealForm:
    """Symplectic form of an admissible couple: ``gram_omega = gram_g @ J``.

    Requires J to already be g-anti-Hermitian (apply
    :func:`symmetrize_metric` first otherwise).
    """
    if g.dim != j.dim:
        raise NotAdmissibleError("metric and complex structure dimensions differ")
    scale = max(_maxabs(g.gram), _TINY)
    anti = _maxabs(j.mat.T @ g.gram + g.gram @ j.mat)
    if anti > tol.tol_resid * scale:
        raise NotAdmissibleError(
            f"J is not g-anti-Hermitian (relative residual {anti / scale:.3e}); "
            "symmetrize the metric first"
        )
    gram = g.gram @ j.mat
    gram = 0.5 * (gram - gram.T)
    return RealForm(gram, "antisymmetric", tol)


def triple_from_g_j(
    g: RealForm,
    j: ComplexStructureJ,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> AdmissibleTriple:
    """Admissible triple from a metric and a complex structure.

    Symmetrizes the metric, then completes with the induced symplectic
    form.
    """
    g_s = symmetrize_metric(g, j, tol)
    omega = omega_from_g_j(g_s, j, tol)
    return AdmissibleTriple(g_s, j, omega, tol)


def triple_from_g_omega(
    g: RealForm,
    omega: RealForm,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> AdmissibleTriple:
    """Admissible triple from a metric and a nondegenerate symplectic form.

    The operator B with omega(x, y) = g(x, By) (matrix form
    ``B = gram_g^{-1} @ gram_omega``) is g-skew, so -B^2 is g-self-adjoint
    and positive.  Its positive square root R (the polar factorization
    B = J R — the only reading that makes R symmetric non-negative with
    J^2 = -1) yields

        J = B R^{-1},   gram_{g_omega} = gram_g @ R,

    and the returned triple (g_omega, J, omega) satisfies every
    admissibility invariant.  When g and omega already come from an
    admissible couple, R = 1 and the original metric and complex
    structure are recovered.

    Raises
    ------
    DegenerateSymplecticError
        If B is singular (smallest singular value at most ``tol.tol_eig``
        relative to the largest); in particular for odd dimension.
    NotSkewError
        If B fails g-skewness, i.e. the inputs were not a symmetric
        positive metric and an antisymmetric form.
    """
    if g.dim != omega.dim:
        raise NotAdmissibleError("metric and symplectic form dimensions differ")
    if not validate_positive(g, tol).passed:
        raise NotAdmissibleError("metric is not symmetric positive-definite")
    b = np.linalg.solve(g.gram, omega.gram)
    svals = np.linalg.svd(b, compute_uv=False)
    if svals[-1] <= tol.tol_eig * max(svals[0], _TINY):
        raise DegenerateSymplecticError(
            f"symplectic form is degenerate (relative smallest singular value "
            f"{svals[-1] / max(svals[0], _TINY):.3e})"
        )
    skew = g.gram @ b
    skew_resid = _maxabs(skew + skew.T)
    if skew_resid > tol.tol_resid * max(_maxabs(skew), _TINY):
        raise NotSkewError(
            f"B is not g-skew (relative residual {skew_resid / max(_maxabs(skew), _TINY):.3e})"
        )
    r = sqrt_positive(-(b @ b), g.gram, tol)
    j_mat = b @ np.linalg.inv(r)
    gram_w = g.gram @ r
    gram_w = 0.5 * (gram_w + gram_w.T)
    g_omega = RealForm(gram_w, "symmetric", tol)
    j = ComplexStructureJ(j_mat, tol)
    return AdmissibleTriple(g_omega, j, omega, tol)


@dataclass(frozen=True, eq=False)
class ComplexificationMap:
    """Identification of R^{2n} with C^n through a J-adapted basis.

    ``basis`` holds the ordered real basis (u_1..u_n, J u_1..J u_n) as
    columns; a real vector with coordinates (a, b) in this basis maps to
    the complex vector a + i b.  The map satisfies
    ``to_real(1j * z) = J @ to_real(z)`` and round-trips exactly.
    """

    basis: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)
    _basis_inv: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim != 2 or basis.shape[0] != basis.shape[1] or basis.shape[0] % 2:
            raise ValueError("basis must be a square matrix of even dimension")
        basis = np.array(basis, copy=True)
        basis.flags.writeable = False
        inv = np.linalg.inv(basis)
        inv.flags.writeable = False
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "_basis_inv", inv)

    @property
    def real_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def complex_dim(self) -> int:
        return self.basis.shape[0] // 2

    def to_complex(self, x: np.ndarray) -> np.ndarray:
        """Complex coordinates of a real vector."""
        c = self._basis_inv @ np.asarray(x, dtype=float)
        n = self.complex_dim
        return c[:n] + 1j * c[n:]

    def to_real(self, z: np.ndarray) -> np.ndarray:
        """Real vector represented by complex coordinates."""
        z = np.asarray(z, dtype=complex)
        return self.basis @ np.concatenate([z.real, z.imag])


def _j_adapted_residual(basis: np.ndarray, j_mat: np.ndarray) -> float:
    n = basis.shape[0] // 2
    return _maxabs(basis[:, n:] - j_mat @ basis[:, :n]) / max(_maxabs(basis), _TINY)


def build_complexification(
    triple: AdmissibleTriple,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ComplexificationMap:
    """Deterministic J-adapted g-orthonormal basis for an admissible triple.

    Greedy construction: take the first standard basis vector outside the
    current span, g-orthonormalize it into u_k, adjoin J u_k (which is
    automatically g-orthonormal to everything so far), and repeat.  The
    second block of the result equals J applied to the first block
    exactly.
    """
    g, j = triple.g.gram, triple.j.mat
    m = triple.dim
    n = m // 2
    us: list[np.ndarray] = []
    span: list[np.ndarray] = []  # g-orthonormal: u_1, Ju_1, u_2, Ju_2, ...
    for i in range(m):
        if len(us) == n:
            break
        w = np.zeros(m)
        w[i] = 1.0
        ref = float(np.sqrt(w @ g @ w))
        for _ in range(2):
            for c in span:
                w = w - c * (c @ g @ w)
        nrm = float(np.sqrt(max(w @ g @ w, 0.0)))
        if nrm <= tol.tol_eig * ref:
            continue
        u = w / nrm
        ju = j @ u
        us.append(u)
        span.extend([u, ju])
    if len(us) != n:
        raise NotAdmissibleError("failed to build a J-adapted basis (structure degenerate)")
    basis = np.column_stack(us + [j @ u for u in us])
    return ComplexificationMap(basis, tol)


def complexification_from_j(
    j: ComplexStructureJ,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ComplexificationMap:
    """Canonical J-adapted basis depending on J alone.

    Greedily keeps the first standard basis vectors e_i not contained in
    the span accumulated so far and pairs each with J e_i, without any
    rescaling.  Because the construction does not involve a metric, every
    structure sharing the same J gets expressed in the same complex
    coordinates, which is what makes Hermitian forms built from different
    compatible triples directly comparable.
    """
    m = j.dim
    n = m // 2
    eye = np.eye(m)
    picks: list[int] = []
    scratch: list[np.ndarray] = []  # Euclidean-orthonormal, for the span test only

    def leftover(vec: np.ndarray) -> np.ndarray:
        w = vec.astype(float)
        for _ in range(2):
            for c in scratch:
                w = w - c * (c @ w)
        return w

    for i in range(m):
        if len(picks) == n:
            break
        w = leftover(eye[:, i])
        nrm = float(np.linalg.norm(w))
        if nrm <= tol.tol_eig:
            continue  # e_i already in span
        picks.append(i)
        scratch.append(w / nrm)
        # J e_i is always independent of a J-invariant span plus e_i
        w = leftover(j.mat[:, i])
        nrm = float(np.linalg.norm(w))
        if nrm <= tol.tol_eig * max(float(np.linalg.norm(j.mat[:, i])), _TINY):
            raise NotAdmissibleError("complex structure is numerically degenerate")
        scratch.append(w / nrm)
    if len(picks) != n:
        raise NotAdmissibleError("failed to build a J-adapted basis")
    us = [eye[:, i] for i in picks]
    basis = np.column_stack(us + [j.mat @ u for u in us])
    return ComplexificationMap(basis, tol)


def hermitian_from_triple(
    triple: AdmissibleTriple,
    cmap: ComplexificationMap,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> HermitianForm:
    """Hermitian structure of an admissible triple in complex coordinates.

    The Gram matrix is H_{kl} = g(u_k, u_l) + i g(J u_k, u_l) over the
    first-block basis vectors u_k of ``cmap``, so that for all real
    vectors x, y

        to_complex(x)† H to_complex(y) = g(x, y) + i g(Jx, y).

    ``cmap`` must be adapted to the triple's complex structure (its second
    block must equal J applied to its first block); it need not be
    g-orthonormal.  In the triple's own g-orthonormal adapted basis the
    Gram matrix is the identity; nontrivial Gram matrices arise in shared
    coordinates such as :func:`complexification_from_j`.

    Raises
    ------
    NotAdmissibleError
        If the map is not adapted to the triple's J or the resulting form
        fails Hermitian positive-definiteness.
    """
    if cmap.real_dim != triple.dim:
        raise NotAdmissibleError("complexification and triple dimensions differ")
    resid = _j_adapted_residual(cmap.basis, triple.j.mat)
    if resid > tol.tol_resid:
        raise NotAdmissibleError(
            f"complexification is not adapted to the triple's complex structure "
            f"(relative residual {resid:.3e})"
        )
    n = cmap.complex_dim
    u = cmap.basis[:, :n]
    ju = cmap.basis[:, n:]
    g = triple.g.gram
    h = u.T @ g @ u + 1j * (ju.T @ g @ u)
    h = 0.5 * (h + h.conj().T)
    try:
        return HermitianForm(h, tol)
    except ValueError as exc:
        raise NotAdmissibleError(f"resulting form is not Hermitian positive-definite: {exc}") from exc
