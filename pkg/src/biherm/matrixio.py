"""Matrix and triple file formats.

A matrix file is a JSON object with an explicit ``kind`` tag so symmetry
can be validated at the boundary, before any numerics run:

    {"kind": "real_symmetric", "dim": 2, "data": [1.0, 0.0, 0.0, 1.0]}

``data`` is the row-major matrix; real kinds carry dim^2 numbers,
complex kinds dim^2 ``[re, im]`` pairs.  A triple file bundles three
matrix sections under ``g``, ``j`` and ``omega``.  Writers may add a
``meta`` section (residuals and the like); readers ignore unknown keys,
so every emitted artifact reloads as a valid input.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import FileFormatError
from .forms import DEFAULT_TOLERANCES, ComplexStructureJ, RealForm, Tolerances
from .report import canonical_json
from .triples import AdmissibleTriple

__all__ = [
    "REAL_KINDS",
    "COMPLEX_KINDS",
    "MATRIX_KINDS",
    "load_matrix",
    "save_matrix",
    "load_triple",
    "save_triple",
    "matrix_payload",
]

REAL_KINDS = ("real_symmetric", "real_antisymmetric", "real_general")
COMPLEX_KINDS = ("complex_hermitian", "complex_general")
MATRIX_KINDS = REAL_KINDS + COMPLEX_KINDS

_TINY = np.finfo(float).tiny


def _load_json(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FileFormatError(f"{path}: cannot read file: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(obj, dict):
        raise FileFormatError(f"{path}: top level must be a JSON object")
    return obj


def _parse_matrix_section(obj: dict, where: str, tol: Tolerances) -> tuple[str, np.ndarray]:
    kind = obj.get("kind")
    if kind not in MATRIX_KINDS:
        raise FileFormatError(
            f"{where}: field 'kind' must be one of {', '.join(MATRIX_KINDS)}, got {kind!r}"
        )
    dim = obj.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise FileFormatError(f"{where}: field 'dim' must be a positive integer, got {dim!r}")
    data = obj.get("data")
    if not isinstance(data, list) or len(data) != dim * dim:
        got = len(data) if isinstance(data, list) else type(data).__name__
        raise FileFormatError(
            f"{where}: field 'data' must be a list of {dim * dim} entries, got {got}"
        )

    def bad(i, msg):
        return FileFormatError(f"{where}: data[{i}]: {msg}")

    if kind in REAL_KINDS:
        entries = []
        for i, v in enumerate(data):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise bad(i, f"expected a real number, got {v!r}")
            if not np.isfinite(v):
                raise bad(i, f"non-finite entry {v!r}")
            entries.append(float(v))
        mat = np.array(entries, dtype=float).reshape(dim, dim)
    else:
        entries = []
        for i, v in enumerate(data):
            if (
                not isinstance(v, list)
                or len(v) != 2
                or any(isinstance(p, bool) or not isinstance(p, (int, float)) for p in v)
            ):
                raise bad(i, f"expected a [re, im] pair, got {v!r}")
            if not all(np.isfinite(p) for p in v):
                raise bad(i, f"non-finite entry {v!r}")
            entries.append(complex(v[0], v[1]))
        mat = np.array(entries, dtype=complex).reshape(dim, dim)

    scale = max(float(np.max(np.abs(mat))), _TINY)
    if kind == "real_symmetric" and np.max(np.abs(mat - mat.T)) > tol.tol_sym * scale:
        raise FileFormatError(f"{where}: matrix is not symmetric within tolerance")
    if kind == "real_antisymmetric" and np.max(np.abs(mat + mat.T)) > tol.tol_sym * scale:
        raise FileFormatError(f"{where}: matrix is not antisymmetric within tolerance")
    if kind == "complex_hermitian" and np.max(np.abs(mat - mat.conj().T)) > tol.tol_sym * scale:
        raise FileFormatError(f"{where}: matrix is not Hermitian within tolerance")
    return kind, mat


def load_matrix(
    path,
    expect_kinds: tuple[str, ...] | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[str, np.ndarray]:
    """Load and validate a matrix file.

    Returns the declared kind and the matrix.  ``expect_kinds`` restricts
    the accepted kinds; a mismatch is a format error, not a math error.

    Raises
    ------
    FileFormatError
        On unreadable files, malformed JSON, schema violations,
        non-finite entries, or kind/symmetry mismatches.
    """
    obj = _load_json(path)
    kind, mat = _parse_matrix_section(obj, str(path), tol)
    if expect_kinds is not None and kind not in expect_kinds:
        raise FileFormatError(
            f"{path}: expected kind {' or '.join(expect_kinds)}, got {kind}"
        )
    return kind, mat


def matrix_payload(mat: np.ndarray, kind: str) -> dict:
    """MatrixFile JSON object for a matrix."""
    mat = np.asarray(mat)
    if kind in REAL_KINDS:
        data = [float(v) for v in np.real(mat).ravel()]
    elif kind in COMPLEX_KINDS:
        data = [[float(v.real), float(v.imag)] for v in mat.astype(complex).ravel()]
    else:
        raise ValueError(f"unknown matrix kind {kind!r}")
    return {"kind": kind, "dim": int(mat.shape[0]), "data": data}


def save_matrix(path, mat: np.ndarray, kind: str, meta: dict | None = None) -> None:
    """Write a matrix file (canonical JSON, optional meta section)."""
    payload = matrix_payload(mat, kind)
    if meta is not None:
        payload["meta"] = meta
    Path(path).write_text(canonical_json(payload) + "\n", encoding="utf-8")


def load_triple(path, tol: Tolerances = DEFAULT_TOLERANCES) -> AdmissibleTriple:
    """Load a triple bundle and rebuild the validated admissible triple.

    Format errors raise :class:`FileFormatError`; a well-formed bundle
    whose matrices fail admissibility raises the corresponding
    mathematical error from the constructors instead.
    """
    obj = _load_json(path)
    sections = {}
    for key, kinds in (("g", ("real_symmetric",)), ("j", ("real_general",)),
                       ("omega", ("real_antisymmetric",))):
        sec = obj.get(key)
        if not isinstance(sec, dict):
            raise FileFormatError(f"{path}: missing or invalid section '{key}'")
        kind, mat = _parse_matrix_section(sec, f"{path}:{key}", tol)
        if kind not in kinds:
            raise FileFormatError(
                f"{path}:{key}: expected kind {' or '.join(kinds)}, got {kind}"
            )
        sections[key] = mat
    g = RealForm(sections["g"], "symmetric", tol)
    j = ComplexStructureJ(sections["j"], tol)
    omega = RealForm(sections["omega"], "antisymmetric", tol)
    return AdmissibleTriple(g, j, omega, tol)


def save_triple(path, triple: AdmissibleTriple, meta: dict | None = None) -> None:
    """Write an admissible triple as a bundle of three matrix sections."""
    payload = {
        "g": matrix_payload(triple.g.gram, "real_symmetric"),
        "j": matrix_payload(triple.j.mat, "real_general"),
        "omega": matrix_payload(triple.omega.gram, "real_antisymmetric"),
    }
    if meta is not None:
        payload["meta"] = meta
    Path(path).write_text(canonical_json(payload) + "\n", encoding="utf-8")
