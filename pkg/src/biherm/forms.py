"""Validated matrix-backed forms and the shared dense-algebra kernel.

Everything downstream (triple construction, connecting operators, spectral
analysis, fibered decompositions) is built on the five operations in this
module: positivity validation, the metric generalized eigensolver, the
positive operator square root, form-orthonormalization, and the Krylov
rank test.  All types are immutable after construction and all operations
are pure functions, so values can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    NegativeSpectrumError,
    NonFiniteError,
    NotSelfAdjointError,
    SingularMetricError,
    ZeroVectorError,
)

__all__ = [
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "RealForm",
    "ComplexStructureJ",
    "HermitianForm",
    "ValidationReport",
    "validate_positive",
    "generalized_eig",
    "sqrt_positive",
    "orthonormalize",
    "krylov_rank",
]

_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class Tolerances:
    """Tolerance bundle used by every validation and residual check.

    Defaults are calibrated for double-precision dense algebra at
    dimensions up to a few hundred.

    Attributes
    ----------
    tol_sym : float
        Relative symmetry/hermiticity tolerance.
    tol_j : float
        Residual allowed in the complex-structure identity J^2 = -1.
    tol_eig : float
        Relative eigenvalue-cluster gap and rank threshold, measured
        against the spectral radius / largest singular value.
    tol_resid : float
        Relative residual allowed in operator identities.
    """

    tol_sym: float = 1e-10
    tol_j: float = 1e-9
    tol_eig: float = 1e-8
    tol_resid: float = 1e-10

    def __post_init__(self):
        for name in ("tol_sym", "tol_j", "tol_eig", "tol_resid"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOLERANCES = Tolerances()


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, copy=True)
    out.flags.writeable = False
    return out


def _require_square(mat: np.ndarray, what: str) -> np.ndarray:
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{what} must be a square matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise NonFiniteError(f"{what} contains non-finite entries")
    return mat


def _maxabs(mat: np.ndarray) -> float:
    return float(np.max(np.abs(mat))) if mat.size else 0.0


@dataclass(frozen=True, eq=False)
class RealForm:
    """A real bilinear form on R^m given by its Gram matrix.

    Evaluation convention: ``form(x, y) = x @ gram @ y``.
    """

    gram: np.ndarray
    symmetry_tag: str = "general"
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)

    def __post_init__(self):
        mat = _require_square(self.gram, "gram")
        if np.iscomplexobj(mat):
            raise ValueError("RealForm gram must be real")
        mat = mat.astype(float, copy=True)
        scale = max(_maxabs(mat), _TINY)
        if self.symmetry_tag == "symmetric":
            if _maxabs(mat - mat.T) > self.tol.tol_sym * scale:
                raise ValueError("gram is not symmetric within tolerance")
        elif self.symmetry_tag == "antisymmetric":
            if _maxabs(mat + mat.T) > self.tol.tol_sym * scale:
                raise ValueError("gram is not antisymmetric within tolerance")
        elif self.symmetry_tag != "general":
            raise ValueError(f"unknown symmetry_tag {self.symmetry_tag!r}")
        object.__setattr__(self, "gram", _freeze(mat))

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def __call__(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(np.asarray(x) @ self.gram @ np.asarray(y))


@dataclass(frozen=True, eq=False)
class ComplexStructureJ:
    """A real linear operator J with J^2 = -1 on an even-dimensional space."""

    mat: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)

    def __post_init__(self):
        mat = _require_square(self.mat, "mat")
        if np.iscomplexobj(mat):
            raise ValueError("complex structure matrix must be real")
        mat = mat.astype(float, copy=True)
        if mat.shape[0] % 2 != 0:
            raise ValueError("complex structure requires even dimension")
        resid = _maxabs(mat @ mat + np.eye(mat.shape[0]))
        if resid > self.tol.tol_j:
            raise ValueError(f"J^2 = -1 violated: residual {resid:.3e} exceeds {self.tol.tol_j:.3e}")
        object.__setattr__(self, "mat", _freeze(mat))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True, eq=False)
class HermitianForm:
    """A positive-definite Hermitian form on C^n given by its Gram matrix.

    Evaluation convention: ``form(x, y) = x.conj() @ gram @ y``, linear in
    the second argument.
    """

    gram: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)

    def __post_init__(self):
        mat = _require_square(self.gram, "gram").astype(complex, copy=True)
        scale = max(_maxabs(mat), _TINY)
        if _maxabs(mat - mat.conj().T) > self.tol.tol_sym * scale:
            raise ValueError("gram is not Hermitian within tolerance")
        w = np.linalg.eigvalsh(mat)
        if w[0] <= 0.0:
            raise ValueError(f"gram is not positive-definite (min eigenvalue {w[0]:.3e})")
        object.__setattr__(self, "gram", _freeze(mat))

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def __call__(self, x: np.ndarray, y: np.ndarray) -> complex:
        return complex(np.asarray(x).conj() @ self.gram @ np.asarray(y))


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a positivity/symmetry validation.

    ``passed`` is true exactly when the symmetry residual is within
    tolerance and the smallest eigenvalue is strictly positive.
    """

    dim: int
    min_eigenvalue: float
    symmetry_residual: float
    symmetry_ok: bool
    positive_ok: bool

    @property
    def passed(self) -> bool:
        return self.symmetry_ok and self.positive_ok


def validate_positive(form, tol: Tolerances = DEFAULT_TOLERANCES) -> ValidationReport:
    """Check that a form is symmetric/Hermitian and positive-definite.

    Parameters
    ----------
    form : RealForm, HermitianForm or array_like
        The form (or a bare Gram matrix) to validate.
    tol : Tolerances
        Symmetry tolerance to apply.

    Returns
    -------
    ValidationReport
        Smallest eigenvalue, relative symmetry residual and pass flags.

    Raises
    ------
    NonFiniteError
        If any entry is NaN or infinite.
    """
    if isinstance(form, (RealForm, HermitianForm)):
        mat = form.gram
    else:
        mat = np.asarray(form)
    mat = _require_square(mat, "form")
    scale = max(_maxabs(mat), _TINY)
    sym_resid = _maxabs(mat - mat.conj().T) / scale
    sym_ok = sym_resid <= tol.tol_sym
    herm = 0.5 * (mat + mat.conj().T)
    w_min = float(np.linalg.eigvalsh(herm)[0])
    return ValidationReport(
        dim=mat.shape[0],
        min_eigenvalue=w_min,
        symmetry_residual=sym_resid,
        symmetry_ok=sym_ok,
        positive_ok=bool(sym_ok and w_min > 0.0),
    )


def _check_metric(metric: np.ndarray, tol: Tolerances) -> np.ndarray:
    metric = _require_square(metric, "metric")
    scale = max(_maxabs(metric), _TINY)
    if _maxabs(metric - metric.conj().T) > tol.tol_sym * scale:
        raise SingularMetricError("metric is not Hermitian within tolerance")
    try:
        np.linalg.cholesky(0.5 * (metric + metric.conj().T))
    except np.linalg.LinAlgError:
        raise SingularMetricError("metric is not positive-definite") from None
    return metric


def generalized_eig(
    a: np.ndarray,
    metric: np.ndarray,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a metric-self-adjoint operator.

    Solves ``a @ v = lam * v`` for an operator that is self-adjoint with
    respect to the positive-definite ``metric`` M (that is, M·a = a†·M).
    The problem is reduced by Cholesky congruence of M to a standard
    Hermitian one, which keeps the eigenvectors exactly M-orthonormal.

    Returns
    -------
    eigenvalues : ndarray, shape (n,)
        Real, sorted ascending.
    eigenvectors : ndarray, shape (n, n)
        Columns satisfy ``V.conj().T @ metric @ V = I``.

    Raises
    ------
    NotSelfAdjointError
        If ``metric @ a`` is not Hermitian within ``tol.tol_resid``.
    SingularMetricError
        If ``metric`` fails positivity.
    """
    a = _require_square(a, "operator")
    metric = _check_metric(metric, tol)
    if a.shape != metric.shape:
        raise ValueError("operator and metric dimensions differ")
    k = metric @ a
    resid = _maxabs(k - k.conj().T)
    if resid > tol.tol_resid * max(_maxabs(k), _TINY):
        raise NotSelfAdjointError(
            f"operator is not metric-self-adjoint (relative residual "
            f"{resid / max(_maxabs(k), _TINY):.3e})"
        )
    k = 0.5 * (k + k.conj().T)
    w, v = scipy.linalg.eigh(k, 0.5 * (metric + metric.conj().T))
    if not (np.iscomplexobj(a) or np.iscomplexobj(metric)):
        v = np.real_if_close(v)
    return w, v


def sqrt_positive(
    mat: np.ndarray,
    metric: np.ndarray | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    """Positive square root of a metric-self-adjoint non-negative operator.

    Computed through the spectral decomposition (deterministic, and the
    result is metric-self-adjoint by construction): R = V sqrt(w) V^{-1}
    with V^{-1} = V† M.

    Raises
    ------
    NegativeSpectrumError
        If an eigenvalue is below ``-tol.tol_eig`` relative to the
        spectral radius.
    """
    mat = _require_square(mat, "operator")
    if metric is None:
        metric = np.eye(mat.shape[0])
    w, v = generalized_eig(mat, metric, tol)
    radius = max(float(np.max(np.abs(w))), _TINY)
    if w[0] < -tol.tol_eig * radius:
        raise NegativeSpectrumError(
            f"operator has negative eigenvalue {w[0]:.6e} (spectral radius {radius:.6e})"
        )
    root = np.sqrt(np.clip(w, 0.0, None))
    vinv = v.conj().T @ metric
    r = (v * root) @ vinv
    if not (np.iscomplexobj(mat) or np.iscomplexobj(metric)):
        r = np.real_if_close(r)
    return r


def orthonormalize(
    vectors,
    form: HermitianForm | RealForm,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[np.ndarray]:
    """Gram-Schmidt orthonormalization with respect to a form.

    Processes the vectors in input order (deterministic) and drops any
    vector whose residual norm after projection is at most
    ``tol.tol_eig`` times the largest input norm, so a rank-deficient
    family simply yields fewer output vectors.  Two projection passes are
    used for numerical stability.
    """
    gram = form.gram
    vecs = [np.asarray(v) for v in vectors]
    for v in vecs:
        if v.ndim != 1 or v.shape[0] != gram.shape[0]:
            raise ValueError("vectors must be 1-D and match the form dimension")
        if not np.all(np.isfinite(v)):
            raise NonFiniteError("vector contains non-finite entries")

    def norm(v):
        return float(np.sqrt(np.real(v.conj() @ gram @ v)))

    max_norm = max((norm(v) for v in vecs), default=0.0)
    threshold = tol.tol_eig * max_norm
    basis: list[np.ndarray] = []
    for v in vecs:
        w = v.astype(complex if np.iscomplexobj(gram) or np.iscomplexobj(v) else float)
        for _ in range(2):
            for b in basis:
                w = w - b * (b.conj() @ gram @ w)
        nrm = norm(w)
        if nrm <= threshold:
            continue
        basis.append(w / nrm)
    return basis


def krylov_rank(
    g: np.ndarray,
    x0: np.ndarray,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> int:
    """Rank of the Krylov matrix [x0, G·x0, ..., G^{n-1}·x0].

    The rank is revealed by orthogonalizing the Krylov sequence
    incrementally (each new direction is G applied to the latest
    orthonormal vector, then projected against the basis).  The monomial
    columns themselves are far too ill-conditioned to survive a plain
    SVD threshold beyond n ~ 15, while the incremental factorization has
    the same exact-arithmetic rank and stays well-scaled.  A new
    direction counts as dependent when its residual is at most
    ``tol.tol_eig`` relative to its pre-projection norm.

    Raises
    ------
    ZeroVectorError
        If ``x0`` has zero norm.
    """
    g = _require_square(g, "operator")
    x0 = np.asarray(x0)
    if x0.ndim != 1 or x0.shape[0] != g.shape[0]:
        raise ValueError("x0 must be 1-D and match the operator dimension")
    if not np.all(np.isfinite(x0)):
        raise NonFiniteError("x0 contains non-finite entries")
    nrm = float(np.linalg.norm(x0))
    if nrm == 0.0:
        raise ZeroVectorError("x0 has zero norm")

    n = g.shape[0]
    complex_case = np.iscomplexobj(g) or np.iscomplexobj(x0)
    q = (x0 / nrm).astype(complex if complex_case else float)
    basis = [q]
    for _ in range(n - 1):
        w = g @ basis[-1]
        scale = float(np.linalg.norm(w))
        for _ in range(2):
            for b in basis:
                w = w - b * (b.conj() @ w)
        resid = float(np.linalg.norm(w))
        if resid <= tol.tol_eig * max(scale, _TINY):
            break
        basis.append(w / resid)
    return len(basis)
