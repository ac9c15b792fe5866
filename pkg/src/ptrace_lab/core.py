"""Dense complex matrix substrate.

Decompositions delegate to numpy.linalg; this module owns validation,
tolerance policy, seeded generators, and the JSON wire format used by the
command line tools.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass

import numpy as np

DEFAULT_ABS_TOL = 1e-9
DEFAULT_REL_TOL = 1e-12

TOL_ENV_VAR = "PTRACE_LAB_TOL"


class MatrixFormatError(ValueError):
    """A matrix payload violates the wire format."""


class DecompositionError(RuntimeError):
    """A dense decomposition failed to converge."""


def fingerprint(m: np.ndarray) -> str:
    """Short content hash identifying a matrix in error messages."""
    return hashlib.sha256(np.ascontiguousarray(m).tobytes()).hexdigest()[:12]


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative threshold pair for rank and residual decisions.

    The effective threshold at scale s is max(abs, rel * s).
    """

    abs: float = DEFAULT_ABS_TOL
    rel: float = DEFAULT_REL_TOL

    def __post_init__(self) -> None:
        if self.abs < 0 or self.rel < 0:
            raise ValueError("tolerance components must be non-negative")
        if self.abs == 0 and self.rel == 0:
            raise ValueError("abs and rel tolerance cannot both be zero")

    def threshold(self, scale: float) -> float:
        return max(self.abs, self.rel * scale)


def default_tolerance() -> Tolerance:
    """Library default; PTRACE_LAB_TOL overrides the absolute part."""
    env = os.environ.get(TOL_ENV_VAR)
    if env is not None:
        return Tolerance(abs=float(env), rel=DEFAULT_REL_TOL)
    return Tolerance()


def as_matrix(m, *, square: bool = False) -> np.ndarray:
    """Coerce input to a finite complex 2-d array, validating shape."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or min(a.shape) < 1:
        raise ValueError(f"expected a non-empty 2-d matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    if square and a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def singular_values(m) -> np.ndarray:
    """Singular values in decreasing order."""
    a = as_matrix(m)
    try:
        return np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - backend dependent
        raise DecompositionError(
            f"svd failed to converge on matrix {fingerprint(a)}"
        ) from exc


def rank_tol(m, tol: Tolerance | None = None) -> int:
    """Numerical rank: number of singular values above max(abs, rel*sigma1)."""
    tol = tol or default_tolerance()
    s = singular_values(m)
    if s.size == 0 or s[0] <= 0:
        return 0
    return int(np.count_nonzero(s > tol.threshold(float(s[0]))))


def hermitian_defect(m) -> float:
    """Frobenius distance to the Hermitian part, ||m - m*||_F."""
    a = as_matrix(m, square=True)
    return float(np.linalg.norm(a - a.conj().T))


def eig_hermitian(m, tol: Tolerance | None = None) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, decreasing.

    Rejects inputs whose anti-Hermitian part exceeds the tolerance at the
    scale of ||m||_F.
    """
    tol = tol or default_tolerance()
    a = as_matrix(m, square=True)
    scale = float(np.linalg.norm(a))
    defect = hermitian_defect(a)
    if defect > tol.threshold(scale):
        raise ValueError(
            f"matrix is not Hermitian within tolerance "
            f"(defect {defect:.3e}, matrix {fingerprint(a)})"
        )
    try:
        w = np.linalg.eigvalsh((a + a.conj().T) / 2.0)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise DecompositionError(
            f"eigh failed to converge on matrix {fingerprint(a)}"
        ) from exc
    return w[::-1]


RANDOM_KINDS = ("ginibre", "hermitian", "positive", "normal", "fixed_rank", "unit_vector")


@dataclass(frozen=True)
class RandomSpec:
    """Deterministic description of one random matrix draw.

    kind: one of ginibre, hermitian, positive, normal, fixed_rank, unit_vector.
    rank is required for fixed_rank and ignored otherwise.
    """

    seed: int
    kind: str
    shape: tuple[int, int]
    rank: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in RANDOM_KINDS:
            raise ValueError(f"unknown random kind {self.kind!r}")
        rows, cols = self.shape
        if rows < 1 or cols < 1:
            raise ValueError("shape components must be positive")
        if self.kind in ("hermitian", "positive", "normal") and rows != cols:
            raise ValueError(f"kind {self.kind!r} requires a square shape")
        if self.kind == "fixed_rank":
            if self.rank is None or not 1 <= self.rank <= min(rows, cols):
                raise ValueError("fixed_rank requires 1 <= rank <= min(shape)")
        if self.kind == "unit_vector" and cols != 1:
            raise ValueError("unit_vector requires shape (rows, 1)")


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    g = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    return g / np.sqrt(2.0)


def generate(spec: RandomSpec) -> np.ndarray:
    """Draw the matrix described by spec; same spec, same bits."""
    rng = np.random.default_rng(spec.seed)
    rows, cols = spec.shape
    if spec.kind == "ginibre":
        return _ginibre(rng, rows, cols)
    if spec.kind == "hermitian":
        g = _ginibre(rng, rows, cols)
        return (g + g.conj().T) / 2.0
    if spec.kind == "positive":
        g = _ginibre(rng, rows, cols)
        return g @ g.conj().T / cols
    if spec.kind == "normal":
        g = _ginibre(rng, rows, cols)
        q, r = np.linalg.qr(g)
        # fix the phase convention so the draw is well defined
        q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
        z = rng.standard_normal(rows) + 1j * rng.standard_normal(rows)
        return (q * z) @ q.conj().T
    if spec.kind == "fixed_rank":
        x = _ginibre(rng, rows, spec.rank)
        y = _ginibre(rng, cols, spec.rank)
        return x @ y.conj().T / np.sqrt(spec.rank)
    if spec.kind == "unit_vector":
        v = _ginibre(rng, rows, 1)
        return v / np.linalg.norm(v)
    raise AssertionError(spec.kind)


def matrix_to_payload(m, dims: tuple[int, ...] | None = None) -> dict:
    """Serialize a matrix to the wire dict {rows, cols, re, im[, dims]}."""
    a = as_matrix(m)
    payload = {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "re": a.real.tolist(),
        "im": a.imag.tolist(),
    }
    if dims is not None:
        payload["dims"] = [int(d) for d in dims]
    return payload


def matrix_from_payload(obj) -> tuple[np.ndarray, tuple[int, ...] | None]:
    """Parse the wire dict back to (matrix, dims or None).

    Raises MatrixFormatError on any malformed payload.
    """
    if not isinstance(obj, dict):
        raise MatrixFormatError("matrix payload must be a JSON object")
    for key in ("rows", "cols", "re", "im"):
        if key not in obj:
            raise MatrixFormatError(f"matrix payload missing key {key!r}")
    rows, cols = obj["rows"], obj["cols"]
    if not isinstance(rows, int) or not isinstance(cols, int) or rows < 1 or cols < 1:
        raise MatrixFormatError("rows and cols must be positive integers")
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise MatrixFormatError("re/im must be numeric arrays") from exc
    if re.shape != (rows, cols) or im.shape != (rows, cols):
        raise MatrixFormatError(
            f"re/im shape mismatch: expected {(rows, cols)}, "
            f"got {re.shape} and {im.shape}"
        )
    if not (np.isfinite(re).all() and np.isfinite(im).all()):
        raise MatrixFormatError("matrix entries must be finite")
    dims = None
    if "dims" in obj:
        dims_raw = obj["dims"]
        if (
            not isinstance(dims_raw, list)
            or not dims_raw
            or not all(isinstance(d, int) and d >= 1 for d in dims_raw)
        ):
            raise MatrixFormatError("dims must be a list of positive integers")
        dims = tuple(dims_raw)
        total = int(np.prod(dims))
        if total != rows or total != cols:
            raise MatrixFormatError(
                f"dims product {total} does not match matrix size {rows}x{cols}"
            )
    return re + 1j * im, dims
