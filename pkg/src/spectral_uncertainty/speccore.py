"""Dense symmetric spectral engine.

Eigendecomposition, half-open spectral projectors E([0, lam)), functional
calculus, Moore-Penrose powers and the p = 1 couple norms on a counting-measure
space (1->inf, inf->1, 1->2).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels

__all__ = [
    "SymmetryError",
    "EigenConvergenceError",
    "DomainError",
    "PositivityError",
    "SymmetricOperator",
    "SpectralDecomposition",
    "CoupleNormValue",
    "eigendecompose",
    "spectral_projector",
    "band_projector",
    "apply_function",
    "pseudo_power",
    "kernel_basis",
    "norm_1_to_inf",
    "norm_inf_to_1",
    "norm_1_to_2",
    "norm_2_to_2",
    "format_number",
    "matrix_to_csv",
    "matrix_from_csv",
    "matrix_to_json",
    "matrix_from_json",
]

#: dimension above which ``eigendecompose(method="auto")`` switches to LAPACK
JACOBI_MAX_DIM = 256
DEFAULT_TIE_TOL = 1e-9
DEFAULT_KERNEL_TOL = 1e-9
DEFAULT_EXACT_CUTOFF = 20
_SIGN_THRESHOLD = 1e-8


class SymmetryError(ValueError):
    pass


class EigenConvergenceError(RuntimeError):
    def __init__(self, sweeps, off_norm):
        self.sweeps = sweeps
        self.off_norm = off_norm
        super().__init__(
            f"Jacobi eigensolver did not converge after {sweeps} sweeps "
            f"(off-diagonal norm {off_norm:.3e})"
        )


class DomainError(ValueError):
    pass


class PositivityError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SymmetricOperator:
    """Dense real symmetric matrix; stored symmetrized and read-only."""

    entries: np.ndarray
    symmetry_tol: float = 1e-12

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise SymmetryError(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise SymmetryError("matrix has non-finite entries")
        scale = np.max(np.abs(a))
        asym = np.max(np.abs(a - a.T))
        if asym > self.symmetry_tol * scale:
            raise SymmetryError(
                f"matrix is not symmetric: max |A - A^T| = {asym:.3e} "
                f"exceeds {self.symmetry_tol:.1e} * {scale:.3e}"
            )
        a = 0.5 * (a + a.T)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues (nondecreasing) and orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source_norm: float = field(default=None)

    def __post_init__(self):
        w = np.array(self.eigenvalues, dtype=float)
        q = np.array(self.eigenvectors, dtype=float)
        if np.any(np.diff(w) < 0):
            raise ValueError("eigenvalues must be sorted nondecreasing")
        if q.shape != (w.size, w.size):
            raise ValueError("eigenvector matrix shape does not match eigenvalues")
        w.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "eigenvalues", w)
        object.__setattr__(self, "eigenvectors", q)
        if self.source_norm is None:
            object.__setattr__(self, "source_norm", float(np.max(np.abs(w))) if w.size else 0.0)

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def shifted(self, b: float) -> "SpectralDecomposition":
        """Decomposition of A - b I (same eigenvectors)."""
        return SpectralDecomposition(self.eigenvalues - b, self.eigenvectors)

    def matrix(self) -> np.ndarray:
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.T

    def kernel_mask(self, kernel_tol: float = DEFAULT_KERNEL_TOL) -> np.ndarray:
        return np.abs(self.eigenvalues) <= kernel_tol * self.source_norm


@dataclass(frozen=True, eq=False)
class CoupleNormValue:
    value: float
    exact: bool

    def __float__(self):
        return float(self.value)


def _entries(a) -> np.ndarray:
    if isinstance(a, SymmetricOperator):
        return a.entries
    return np.asarray(a, dtype=float)


def _fix_signs(q: np.ndarray) -> np.ndarray:
    # first coordinate above threshold made positive
    big = np.abs(q) > _SIGN_THRESHOLD
    first = np.argmax(big, axis=0)
    signs = np.sign(q[first, np.arange(q.shape[1])])
    signs[signs == 0] = 1.0
    return q * signs


def eigendecompose(
    a,
    method: str = "auto",
    tol: float = 1e-12,
    max_sweeps: int = 100,
) -> SpectralDecomposition:
    """Eigendecomposition of a symmetric operator.

    Parameters
    ----------
    a : SymmetricOperator or array_like
    method : {"auto", "jacobi", "lapack"}
        ``auto`` uses cyclic Jacobi up to ``JACOBI_MAX_DIM`` and LAPACK beyond.
    tol : float
        Jacobi stops once the off-diagonal Frobenius norm is below
        ``tol * ||A||_F``.
    max_sweeps : int

    Returns
    -------
    SpectralDecomposition
        Eigenvalues ascending; each eigenvector has its first nonzero
        coordinate positive.

    Raises
    ------
    EigenConvergenceError
        If Jacobi exhausts ``max_sweeps``.
    """
    op = a if isinstance(a, SymmetricOperator) else SymmetricOperator(a)
    m = op.entries
    n = op.dim
    if method == "auto":
        method = "jacobi" if n <= JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        work = np.array(m, dtype=float, order="C")
        vt = np.eye(n)
        fro = float(np.linalg.norm(m))
        sweeps = kernels.jacobi_sweeps(work, vt, tol * fro, int(max_sweeps))
        if sweeps < 0:
            off = float(np.linalg.norm(work - np.diag(np.diag(work))))
            raise EigenConvergenceError(max_sweeps, off)
        w = np.diag(work).copy()
        q = vt.T.copy()
    elif method == "lapack":
        try:
            w, q = np.linalg.eigh(m)
        except np.linalg.LinAlgError as exc:
            raise EigenConvergenceError(0, float("nan")) from exc
    else:
        raise ValueError(f"unknown method {method!r}")
    order = np.argsort(w, kind="stable")
    w = w[order]
    q = _fix_signs(q[:, order])
    return SpectralDecomposition(w, q)


def band_projector(
    dec: SpectralDecomposition,
    upper: float,
    lower: float | None = None,
    tie_tol: float = DEFAULT_TIE_TOL,
) -> SymmetricOperator:
    """Projector onto eigenvalues in (lower, upper), ties resolved by ``tie_tol``.

    ``lower=None`` means no lower cut, i.e. E([0, upper)) for a positive operator.
    """
    slack = tie_tol * dec.source_norm
    mask = dec.eigenvalues < upper - slack
    if lower is not None:
        mask &= dec.eigenvalues > lower + slack
    q = dec.eigenvectors[:, mask]
    return SymmetricOperator(q @ q.T)


def spectral_projector(
    dec: SpectralDecomposition, lam: float, tie_tol: float = DEFAULT_TIE_TOL
) -> SymmetricOperator:
    """Half-open spectral projector E([0, lam)).

    Eigenvalues within ``tie_tol * source_norm`` below ``lam`` are excluded.
    """
    if lam < 0:
        raise DomainError(f"spectral projector needs lam >= 0, got {lam}")
    return band_projector(dec, lam, tie_tol=tie_tol)


def apply_function(dec: SpectralDecomposition, g: Callable) -> SymmetricOperator:
    """g(A) = Q diag(g(lambda)) Q^T."""
    w = dec.eigenvalues
    try:
        with np.errstate(all="ignore"):
            vals = np.asarray(g(w), dtype=float)
        if vals.shape != w.shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.array([float(g(x)) for x in w])
    bad = ~np.isfinite(vals)
    if np.any(bad):
        lam = w[np.argmax(bad)]
        raise DomainError(f"function is not finite at eigenvalue {lam!r}")
    q = dec.eigenvectors
    return SymmetricOperator((q * vals) @ q.T, symmetry_tol=1e-9)


def pseudo_power(
    dec: SpectralDecomposition, gamma: float, kernel_tol: float = DEFAULT_KERNEL_TOL
) -> tuple[SymmetricOperator, int]:
    """A^gamma on (ker A)^perp, 0 on ker A (Moore-Penrose convention).

    Returns the operator and the detected kernel dimension.
    """
    w = dec.eigenvalues
    thr = kernel_tol * dec.source_norm
    if w.size and w[0] < -thr:
        raise PositivityError(
            f"operator is not positive semidefinite: eigenvalue {w[0]!r} < -{thr:.3e}"
        )
    ker = np.abs(w) <= thr
    vals = np.zeros_like(w)
    vals[~ker] = w[~ker] ** gamma
    q = dec.eigenvectors
    return SymmetricOperator((q * vals) @ q.T, symmetry_tol=1e-9), int(ker.sum())


def kernel_basis(dec: SpectralDecomposition, kernel_tol: float = DEFAULT_KERNEL_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel."""
    return dec.eigenvectors[:, dec.kernel_mask(kernel_tol)]


def norm_1_to_inf(a) -> CoupleNormValue:
    """||A||_{1->inf} = max |A_ij| on a counting-measure space."""
    m = _entries(a)
    return CoupleNormValue(float(np.max(np.abs(m))) if m.size else 0.0, True)


def norm_inf_to_1(a, exact_cutoff: int = DEFAULT_EXACT_CUTOFF) -> CoupleNormValue:
    """||A||_{inf->1} = max over sign vectors e of ||A e||_1.

    Exact by enumeration up to ``exact_cutoff`` columns; beyond that the entry
    sum, an upper bound that is attained when A is entrywise nonnegative.
    """
    m = _entries(a)
    if m.size == 0:
        return CoupleNormValue(0.0, True)
    if np.all(m >= 0):
        return CoupleNormValue(float(m.sum()), True)
    if m.shape[1] <= exact_cutoff:
        at = np.ascontiguousarray(m.T, dtype=float)
        return CoupleNormValue(float(kernels.inf_to_one_exact(at)), True)
    return CoupleNormValue(float(np.abs(m).sum()), False)


def norm_1_to_2(a) -> float:
    """Largest Euclidean column norm."""
    m = _entries(a)
    if m.size == 0:
        return 0.0
    return float(np.sqrt(np.max(np.sum(m * m, axis=0))))


def norm_2_to_2(a) -> float:
    m = _entries(a)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def format_number(x: float) -> str:
    return f"{x:.15g}"


def matrix_to_csv(a) -> str:
    m = _entries(a)
    buf = io.StringIO()
    buf.write(f"dim={m.shape[0]}\n")
    writer = csv.writer(buf, lineterminator="\n")
    for row in m:
        writer.writerow(format_number(x) for x in row)
    return buf.getvalue()


def matrix_from_csv(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("dim="):
        raise ValueError("matrix CSV must start with a 'dim=N' header")
    n = int(lines[0][4:])
    rows = [[float(x) for x in r] for r in csv.reader(lines[1:])]
    m = np.array(rows, dtype=float)
    if m.shape != (n, n):
        raise ValueError(f"header says dim={n} but body has shape {m.shape}")
    return m


def matrix_to_json(a) -> str:
    return json.dumps(_entries(a).tolist())


def matrix_from_json(text: str) -> np.ndarray:
    m = np.array(json.loads(text), dtype=float)
    if m.ndim != 2:
        raise ValueError("matrix JSON must be a list of rows")
    return m
