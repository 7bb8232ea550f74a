"""Hypotheses, constants and inequality checks for an operator pair (L, T).

Notation follows the usual one for spectral projectors: E_lam = E([0, lam))
for L and F_r = F([0, r)) for T, both half-open.

Local inequality, for t in A:

    ||E_{1/t} f|| <= C t^(-gamma delta) ||T^gamma f||,
    C = eta^(-gamma) (1 + K sqrt(1 + 2 gamma M)),

under ||F_r||_{V°->V} <= Phi(r) on B, ||E_{1/t}||_{V->V°} Phi(eta t^delta) <= K^2
on A and the admissibility bound with constant M for alpha = 2 gamma.

Global inequality:

    ||f|| <= D ||T^alpha f||^(beta/(alpha+beta)) ||L^(beta delta) f||^(alpha/(alpha+beta)).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
import scipy.integrate
import scipy.linalg

from . import growth
from .speccore import (
    DEFAULT_KERNEL_TOL,
    DEFAULT_TIE_TOL,
    DomainError,
    PositivityError,
    SpectralDecomposition,
    format_number,
    norm_1_to_inf,
    norm_inf_to_1,
)

__all__ = [
    "RESTRICTIONS",
    "COUPLES",
    "RATIO_TOL",
    "HypothesisError",
    "OperatorPair",
    "HypothesisBundle",
    "ReportRow",
    "InequalityReport",
    "SandwichResult",
    "default_t_grid",
    "default_r_grid",
    "generate_test_vectors",
    "projector_norm_profile",
    "ip0_profile",
    "verify_hypotheses",
    "local_constant",
    "sharp_constants",
    "verify_local",
    "global_constants",
    "derived_global_constant",
    "verify_interpolation",
    "verify_global",
    "semigroup_sandwich",
    "semigroup_sandwich_batch",
    "exp_constant",
    "stieltjes_identity",
    "tail_estimate",
    "report_to_csv",
    "summary_dict",
]

RESTRICTIONS = (
    "full_space",
    "complement_of_kernel_T",
    "complement_of_kernel_L",
    "complement_of_both_kernels",
)
COUPLES = ("l1", "linf")
RATIO_TOL = 1e-9
T_GRID_POINTS = 40
R_GRID_POINTS = 200
HYPOTHESIS_REFINE = 4


class HypothesisError(ValueError):
    """A hypothesis of the local inequality fails; ``name`` is ip0, ip1 or ip2."""

    def __init__(self, name: str, message: str, where=None, value=None, bound=None):
        super().__init__(f"{name}: {message}")
        self.name = name
        self.where = where
        self.value = value
        self.bound = bound


# ---------------------------------------------------------------- the pair


def _nonneg(dec: SpectralDecomposition, tol: float, label: str):
    w = dec.eigenvalues
    thr = tol * max(dec.source_norm, 1.0)
    if w.size and w[0] < -thr:
        raise PositivityError(f"{label} has eigenvalue {w[0]:.6g} below -{thr:.3g}")


@dataclass(frozen=True, eq=False)
class OperatorPair:
    """Positive operators L, T on a common space, plus the test subspace H0.

    ``shift_b`` is subtracted from L and ``shift_T`` from T before use.
    """

    L: SpectralDecomposition
    T: SpectralDecomposition
    shift_b: float = 0.0
    restriction: str = "full_space"
    shift_T: float = 0.0
    kernel_tol: float = DEFAULT_KERNEL_TOL

    def __post_init__(self):
        if self.L.dim != self.T.dim:
            raise ValueError("L and T must act on the same space")
        if self.restriction not in RESTRICTIONS:
            raise ValueError(f"unknown restriction {self.restriction!r}")
        if self.shift_b < 0 or self.shift_T < 0:
            raise ValueError("shifts must be nonnegative")
        lt = self.L.shifted(self.shift_b) if self.shift_b else self.L
        tt = self.T.shifted(self.shift_T) if self.shift_T else self.T
        _nonneg(lt, 1e-9, "L - b")
        _nonneg(tt, 1e-9, "T")
        object.__setattr__(self, "L_eff", _clip(lt, self.kernel_tol))
        object.__setattr__(self, "T_eff", _clip(tt, self.kernel_tol))
        object.__setattr__(self, "_h0", None)

    @property
    def dim(self) -> int:
        return self.L.dim

    @property
    def excludes_ker_T(self) -> bool:
        return self.restriction in ("complement_of_kernel_T", "complement_of_both_kernels")

    @property
    def excludes_ker_L(self) -> bool:
        return self.restriction in ("complement_of_kernel_L", "complement_of_both_kernels")

    def kernel_dims(self) -> tuple[int, int]:
        return int(self.L_eff.kernel_mask(self.kernel_tol).sum()), int(
            self.T_eff.kernel_mask(self.kernel_tol).sum()
        )

    def h0_basis(self) -> np.ndarray:
        """Orthonormal basis (columns) of the test subspace H0."""
        if self._h0 is not None:
            return self._h0
        blocks = []
        if self.excludes_ker_T:
            blocks.append(self.T_eff.eigenvectors[:, self.T_eff.kernel_mask(self.kernel_tol)])
        if self.excludes_ker_L:
            blocks.append(self.L_eff.eigenvectors[:, self.L_eff.kernel_mask(self.kernel_tol)])
        n = self.dim
        if not blocks or sum(b.shape[1] for b in blocks) == 0:
            basis = np.eye(n)
        else:
            basis = scipy.linalg.null_space(np.hstack(blocks).T, rcond=1e-10)
        basis.setflags(write=False)
        object.__setattr__(self, "_h0", basis)
        return basis

    def project(self, vectors: np.ndarray) -> np.ndarray:
        """Orthogonal projection of the columns of ``vectors`` onto H0."""
        b = self.h0_basis()
        if b.shape[1] == self.dim:
            return np.array(vectors, dtype=float)
        return b @ (b.T @ vectors)


def _clip(dec: SpectralDecomposition, tol: float) -> SpectralDecomposition:
    # Round-off below zero would make fractional powers NaN.
    w = np.array(dec.eigenvalues)
    thr = tol * max(dec.source_norm, 1.0)
    w[(w < 0) & (w >= -thr)] = 0.0
    w[np.abs(w) <= tol * dec.source_norm] = 0.0
    return SpectralDecomposition(w, dec.eigenvectors, dec.source_norm)


# ---------------------------------------------------------------- grids and vectors


def _positive_min(dec: SpectralDecomposition, tol: float) -> float:
    w = dec.eigenvalues[~dec.kernel_mask(tol)]
    w = w[w > 0]
    if not w.size:
        raise DomainError("operator has no positive eigenvalue")
    return float(w.min())


def default_t_grid(
    L: SpectralDecomposition,
    points: int = T_GRID_POINTS,
    interval_A=None,
    kernel_tol: float = DEFAULT_KERNEL_TOL,
) -> np.ndarray:
    """Geometric grid from 0.5/lam_max to 2/lam+_min (40 points), clipped to A."""
    lo = 0.5 / float(L.eigenvalues.max())
    hi = 2.0 / _positive_min(L, kernel_tol)
    if interval_A is not None:
        a, b = interval_A
        lo = max(lo, a * (1 + 1e-12)) if a > 0 else lo
        hi = min(hi, b * (1 - 1e-12))
        if lo >= hi:
            raise DomainError("interval A does not meet the spectral range of L")
    return np.geomspace(lo, hi, points)


def default_r_grid(
    T: SpectralDecomposition, upper: float = math.inf, points: int = R_GRID_POINTS,
    kernel_tol: float = DEFAULT_KERNEL_TOL,
) -> np.ndarray:
    lo = 0.25 * _positive_min(T, kernel_tol)
    hi = min(4.0 * float(T.eigenvalues.max()), upper * (1 - 1e-12))
    if lo >= hi:
        lo = hi / 4.0
    return np.geomspace(lo, hi, points)


def generate_test_vectors(
    pair: OperatorPair, n_random: int = 100, seed: int = 42
) -> tuple[list[str], np.ndarray]:
    """Unit vectors in H0: both eigenbases projected to H0, then seeded normals.

    Projections shorter than 1e-8 (eigenvectors orthogonal to H0) are dropped.
    Returns (ids, matrix with one vector per column).
    """
    ids: list[str] = []
    cols = []
    for label, dec in (("L_eig", pair.L_eff), ("T_eig", pair.T_eff)):
        proj = pair.project(dec.eigenvectors)
        norms = np.linalg.norm(proj, axis=0)
        for k in np.flatnonzero(norms > 1e-8):
            ids.append(f"{label}_{k}")
            cols.append(proj[:, k] / norms[k])
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((n_random, pair.dim)).T
    proj = pair.project(raw)
    norms = np.linalg.norm(proj, axis=0)
    for k in range(n_random):
        if norms[k] > 1e-12:
            ids.append(f"rand_{k}")
            cols.append(proj[:, k] / norms[k])
    return ids, np.column_stack(cols) if cols else np.zeros((pair.dim, 0))


# ---------------------------------------------------------------- projector norms


def projector_norm_profile(
    dec: SpectralDecomposition, kind: str, skip_kernel: bool, kernel_tol: float = DEFAULT_KERNEL_TOL
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Norms of spectral projectors, built one eigenvector at a time.

    Returns (counts, values, exact) where values[i] is the ``kind`` norm
    ("1->inf" or "inf->1") of the projector onto eigenvectors k0 .. counts[i]-1,
    k0 being the kernel dimension when ``skip_kernel`` else 0. counts starts
    at k0 (the zero projector).
    """
    if kind not in ("1->inf", "inf->1"):
        raise ValueError(f"unknown norm {kind!r}")
    n = dec.dim
    k0 = int(dec.kernel_mask(kernel_tol).sum()) if skip_kernel else 0
    q = dec.eigenvectors
    p = np.zeros((n, n))
    counts = np.arange(k0, n + 1)
    values = np.zeros(counts.size)
    exact = np.ones(counts.size, dtype=bool)
    diag_basis = np.all(np.count_nonzero(np.abs(q) > 1e-14, axis=0) == 1)
    for i, m in enumerate(counts[1:], start=1):
        v = q[:, m - 1]
        if diag_basis:
            j = int(np.argmax(np.abs(v)))
            p[j, j] += v[j] * v[j]
        else:
            p += np.outer(v, v)
        if kind == "1->inf":
            values[i] = norm_1_to_inf(p).value
        else:
            nv = norm_inf_to_1(p)
            values[i] = nv.value
            exact[i] = nv.exact
    return counts, values, exact


def _count_below(dec: SpectralDecomposition, lam, tie_tol: float = DEFAULT_TIE_TOL) -> np.ndarray:
    slack = tie_tol * dec.source_norm
    return np.searchsorted(dec.eigenvalues, np.asarray(lam, dtype=float) - slack, side="left")


def _profile_at(counts, values, m):
    # projector on eigenvectors k0..m-1; m below k0 means the zero projector
    idx = np.clip(np.asarray(m) - counts[0], 0, counts.size - 1)
    return values[idx]


# ---------------------------------------------------------------- hypotheses


def _norm_kinds(couple):
    return ("inf->1", "1->inf") if couple == "l1" else ("1->inf", "inf->1")


def ip0_profile(pair: OperatorPair, couple: str = "l1", b_sup: float = math.inf):
    """Eigenvalue jumps c_k of T in (0, b_sup) and ||F_r|| for r just above each.

    F_r is piecewise constant and right-continuous in this sense, so for a
    nondecreasing Phi the hypothesis ||F_r|| <= Phi(r) on B reduces to
    ||F_{c_k+}|| <= Phi(c_k) at every jump. Returns (jumps, norms, exact).
    """
    T = pair.T_eff
    f_kind, _ = _norm_kinds(couple)
    counts, vals, exact = projector_norm_profile(T, f_kind, pair.excludes_ker_T, pair.kernel_tol)
    w = T.eigenvalues
    jumps = np.unique(w[(w > 0) & (w < b_sup) & ~T.kernel_mask(pair.kernel_tol)])
    if jumps.size:
        # collapse clusters closer than the tie tolerance
        keep = np.concatenate([[True], np.diff(jumps) > 2 * DEFAULT_TIE_TOL * T.source_norm])
        jumps = jumps[keep]
    above = jumps + 2 * DEFAULT_TIE_TOL * T.source_norm + 1e-12 * jumps
    norms = _profile_at(counts, vals, _count_below(T, above))
    return jumps, norms, bool(np.all(exact))


@dataclass(frozen=True, eq=False)
class HypothesisBundle:
    phi: growth.GrowthFunction
    eta: float
    delta: float
    gamma: float
    interval_A: tuple
    K: float
    M: float
    couple: str = "l1"
    certificate: growth.AdmissibilityCertificate | None = None
    hypothesis_margin: float = 1.0
    ip0_worst_ratio: float = 0.0
    ip0_worst_r: float = math.nan
    ip0_exact: bool = True
    t_grid: np.ndarray = field(default=None, repr=False)
    ip2_values: np.ndarray = field(default=None, repr=False)


def verify_hypotheses(
    pair: OperatorPair,
    phi: growth.GrowthFunction,
    eta: float,
    delta: float,
    gamma: float,
    interval_A,
    t_grid=None,
    r_grid=None,
    couple: str = "l1",
) -> HypothesisBundle:
    """Certify ip0 and ip1 and measure K from ip2.

    couple "l1": ip0 uses ||F_r||_{inf->1}, ip2 uses ||E_{1/t}||_{1->inf}.
    couple "linf" swaps the two norms (dual couple, used when the roles of the
    distance and the Laplacian are exchanged).

    ip0 is checked at the right limit of every eigenvalue jump of T inside B
    (valid for nondecreasing Phi) and on ``r_grid``; when H0 excludes ker T the
    projector is F((0, r)), and likewise E((0, 1/t)) when H0 excludes ker L.
    """
    if couple not in COUPLES:
        raise ValueError(f"unknown couple {couple!r}")
    if not (eta > 0 and delta > 0 and gamma > 0):
        raise DomainError("eta, delta and gamma must be positive")
    a, b = float(interval_A[0]), float(interval_A[1])
    if not (0 <= a < b):
        raise DomainError("interval A must satisfy 0 <= a < b")
    try:
        phi.validate()
    except growth.GrowthError as exc:
        raise HypothesisError("ip0", f"invalid growth function: {exc}") from None
    T, L = pair.T_eff, pair.L_eff
    b_sup = eta * b**delta if math.isfinite(b) else math.inf
    if t_grid is None:
        t_grid = default_t_grid(L, interval_A=(a, b), kernel_tol=pair.kernel_tol)
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid <= a) or np.any(t_grid >= b):
        raise DomainError("t_grid must lie inside A")
    if r_grid is None:
        r_grid = default_r_grid(T, b_sup, kernel_tol=pair.kernel_tol)
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(r_grid >= b_sup) or np.any(r_grid < 0):
        raise DomainError("r_grid must lie inside B = [0, eta b^delta)")

    f_kind, e_kind = _norm_kinds(couple)

    # ip0
    jumps, jump_norms, exact = ip0_profile(pair, couple, b_sup)
    counts, vals, _ = projector_norm_profile(T, f_kind, pair.excludes_ker_T, pair.kernel_tol)
    grid_norms = _profile_at(counts, vals, _count_below(T, r_grid))
    r_all = np.concatenate([jumps, r_grid])
    lhs0 = np.concatenate([jump_norms, grid_norms])
    rhs0 = phi(r_all)
    ratio0 = _ratio(lhs0, rhs0)
    worst = int(np.argmax(ratio0)) if ratio0.size else 0
    if ratio0.size and ratio0[worst] > 1 + RATIO_TOL:
        raise HypothesisError(
            "ip0",
            f"||F_r|| = {lhs0[worst]:.15g} exceeds Phi(r) = {rhs0[worst]:.15g} at r = {r_all[worst]:.15g}",
            float(r_all[worst]),
            float(lhs0[worst]),
            float(rhs0[worst]),
        )

    # ip1
    alpha = 2.0 * gamma
    lo_I = eta * a**delta
    hi_I = eta * b**delta if math.isfinite(b) else math.inf
    cert = growth.check_admissibility(phi, alpha, (lo_I, hi_I), extra_points=eta * t_grid**delta)
    if cert.verdict != "holds":
        raise HypothesisError(
            "ip1", f"admissibility {cert.verdict} for alpha = {alpha:.15g} on ({lo_I:.6g}, {hi_I:.6g})"
        )

    # ip2
    ecounts, evals, _ = projector_norm_profile(L, e_kind, pair.excludes_ker_L, pair.kernel_tol)

    def ip2(ts):
        return _profile_at(ecounts, evals, _count_below(L, 1.0 / ts)) * phi(eta * ts**delta)

    ip2_vals = ip2(t_grid)
    k2 = float(ip2_vals.max()) if ip2_vals.size else 0.0
    fine = np.geomspace(t_grid[0], t_grid[-1], HYPOTHESIS_REFINE * (t_grid.size - 1) + 1)
    sup_fine = float(ip2(fine).max())
    if k2 > 0:
        margin = 1.0 - sup_fine / k2
    else:
        margin = 1.0 if sup_fine == 0 else -math.inf
    return HypothesisBundle(
        phi,
        float(eta),
        float(delta),
        float(gamma),
        (a, b),
        math.sqrt(k2),
        float(cert.constant),
        couple,
        cert,
        float(margin),
        float(ratio0[worst]) if ratio0.size else 0.0,
        float(r_all[worst]) if ratio0.size else math.nan,
        exact,
        t_grid,
        ip2_vals,
    )


def local_constant(gamma: float, eta: float, K: float, M: float) -> float:
    """eta^(-gamma) (1 + K sqrt(1 + 2 gamma M))."""
    if gamma <= 0 or eta <= 0 or K < 0 or M < 0:
        raise DomainError("local_constant needs gamma, eta > 0 and K, M >= 0")
    return eta ** (-gamma) * (1.0 + K * math.sqrt(1.0 + 2.0 * gamma * M))


# ---------------------------------------------------------------- reports


class ReportRow(NamedTuple):
    t: object
    vector_id: str
    lhs: float
    rhs: float
    ratio: float
    sharp_constant: float


@dataclass(eq=False)
class InequalityReport:
    kind: str
    rows: list
    paper_constant: float
    sharp_constant: float
    all_pass: bool
    hypothesis_margin: float = math.nan
    K: float = math.nan
    M: float = math.nan
    extra: dict = field(default_factory=dict)

    @property
    def max_ratio(self) -> float:
        r = [row.ratio for row in self.rows]
        return float(max(r)) if r else 0.0

    @property
    def violations(self) -> list:
        return [row for row in self.rows if not row.ratio <= 1 + RATIO_TOL]


def _ratio(lhs, rhs):
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    out = np.zeros(np.broadcast(lhs, rhs).shape)
    pos = lhs > 0
    with np.errstate(divide="ignore"):
        out[pos] = np.where(rhs[pos] > 0, lhs[pos] / rhs[pos], math.inf)
    return out


def _rows_from_arrays(ts, ids, lhs, rhs, sharp):
    ratio = _ratio(lhs, rhs)
    rows = []
    for i, t in enumerate(ts):
        for j, vid in enumerate(ids):
            rows.append(
                ReportRow(t, vid, float(lhs[i, j]), float(rhs[i, j]), float(ratio[i, j]), float(sharp[i]))
            )
    return rows, ratio


def _powered(dec: SpectralDecomposition, gamma: float, kernel_tol: float) -> np.ndarray:
    w = dec.eigenvalues
    vals = np.zeros_like(w)
    nz = ~dec.kernel_mask(kernel_tol)
    vals[nz] = w[nz] ** gamma
    return vals


def sharp_constants(pair: OperatorPair, gamma: float, lam_values) -> np.ndarray:
    """sup over f in H0 of ||E_lam f|| / ||T^gamma f|| for each lam.

    Uses a QR factorisation T^gamma B = Q R of an H0 basis B, so the value is
    ||E_lam B R^-1||_2; infinite when T^gamma is singular on H0.
    """
    L, T = pair.L_eff, pair.T_eff
    basis = pair.h0_basis()
    tg = T.eigenvectors @ (_powered(T, gamma, pair.kernel_tol)[:, None] * (T.eigenvectors.T @ basis))
    r = np.linalg.qr(tg, mode="r")
    d = np.abs(np.diag(r))
    m = np.asarray(_count_below(L, lam_values))
    out = np.zeros(m.shape, dtype=float)
    if d.size and d.min() <= 1e-12 * max(d.max(), 1.0):
        sing = True
    else:
        sing = False
        w_mat = scipy.linalg.solve_triangular(r, basis.T, trans="T").T  # B R^-1
        coeff = L.eigenvectors.T @ w_mat  # rows indexed by L eigenvectors
    cache: dict[int, float] = {}
    for idx, k in np.ndenumerate(m):
        k = int(k)
        if k not in cache:
            if k == 0:
                cache[k] = 0.0
            elif sing:
                cache[k] = _sharp_singular(pair, gamma, k)
            else:
                cache[k] = float(np.linalg.norm(coeff[:k], 2))
        out[idx] = cache[k]
    return out


def _sharp_singular(pair, gamma, k):
    # E_lam B has a component T^gamma cannot see: infinite unless it vanishes.
    L, T = pair.L_eff, pair.T_eff
    basis = pair.h0_basis()
    tg = T.eigenvectors @ (_powered(T, gamma, pair.kernel_tol)[:, None] * (T.eigenvectors.T @ basis))
    null = scipy.linalg.null_space(tg, rcond=1e-10)
    e_null = L.eigenvectors[:, :k].T @ (basis @ null)
    return math.inf if np.linalg.norm(e_null) > 1e-10 else float("nan")


def verify_local(
    pair: OperatorPair,
    bundle: HypothesisBundle,
    t_grid=None,
    test_vectors=None,
    ids: Sequence[str] | None = None,
    n_random: int = 100,
    seed: int = 42,
) -> InequalityReport:
    """Check ||E_{1/t} f|| <= C t^(-gamma delta) ||T^gamma f|| for every t and f."""
    L, T = pair.L_eff, pair.T_eff
    gamma, delta = bundle.gamma, bundle.delta
    C = local_constant(gamma, bundle.eta, bundle.K, bundle.M)
    ts = np.asarray(bundle.t_grid if t_grid is None else t_grid, dtype=float)
    if test_vectors is None:
        ids, test_vectors = generate_test_vectors(pair, n_random, seed)
    F = np.asarray(test_vectors, dtype=float)
    if ids is None:
        ids = [f"v_{j}" for j in range(F.shape[1])]
    coef = L.eigenvectors.T @ F
    cum = np.vstack([np.zeros(F.shape[1]), np.cumsum(coef**2, axis=0)])
    m = _count_below(L, 1.0 / ts)
    lhs = np.sqrt(np.maximum(cum[m], 0.0))
    tnorm = np.linalg.norm(_powered(T, gamma, pair.kernel_tol)[:, None] * (T.eigenvectors.T @ F), axis=0)
    rhs = C * ts[:, None] ** (-gamma * delta) * tnorm[None, :]
    sharp = sharp_constants(pair, gamma, 1.0 / ts)
    rows, ratio = _rows_from_arrays(ts, ids, lhs, rhs, sharp)
    scaled = sharp * ts ** (gamma * delta)
    sharp_max = float(np.max(scaled)) if scaled.size else 0.0
    ok = bool(np.all(ratio <= 1 + RATIO_TOL)) and sharp_max <= C * (1 + RATIO_TOL)
    # Supremum over all t > 0: the projector is constant between eigenvalues of
    # L, so the worst t is the left limit at each jump t = 1/lam.
    lam = np.unique(L.eigenvalues[L.eigenvalues > 0])
    left = sharp_constants(pair, gamma, lam * (1 + 4 * DEFAULT_TIE_TOL) + 4 * DEFAULT_TIE_TOL * L.source_norm)
    sup_all = float(np.max(left * lam ** (-gamma * delta))) if lam.size else 0.0
    # As t -> inf only ker L survives; if it is visible from H0 the sup is infinite.
    k_part = sharp_constants(pair, gamma, np.array([2 * DEFAULT_TIE_TOL * max(L.source_norm, 1.0)]))[0]
    if k_part > 1e-8 * max(1.0, float(np.max(left)) if lam.size else 1.0):
        sup_all = math.inf
    return InequalityReport(
        "local",
        rows,
        C,
        sharp_max,
        ok,
        bundle.hypothesis_margin,
        bundle.K,
        bundle.M,
        {
            "sharp_scaled": scaled,
            "t_grid": ts,
            "sharp_sup_all_t": sup_all,
            "gamma": gamma,
            "delta": delta,
        },
    )


# ---------------------------------------------------------------- global


def global_constants(alpha: float, beta: float, gamma: float, delta: float, C: float) -> tuple[float, float]:
    """(D_{alpha,beta}, K_{alpha,gamma}) by the closed-form composition formulas.

    D_{gamma,beta} = (1+C) (gamma/beta)^((beta-gamma)/(gamma+beta));
    K_{alpha,gamma} = (alpha/gamma - 1)^((2gamma-alpha)/alpha);
    D_{alpha,beta} = D_{gamma,beta}^(a/g (g+b)/(a+b)) K^(a/g b/(a+b)).
    ``delta`` does not enter the constants.
    """
    if not (gamma > 0 and beta > 0 and C > 0):
        raise DomainError("global_constants needs gamma, beta, C > 0")
    if alpha < gamma:
        raise DomainError(f"alpha = {alpha} < gamma = {gamma}; the global step needs alpha >= gamma")
    d_gb = (1.0 + C) * (gamma / beta) ** ((beta - gamma) / (gamma + beta))
    if alpha == gamma:
        return d_gb, 1.0
    k = (alpha / gamma - 1.0) ** ((2.0 * gamma - alpha) / alpha)
    d = d_gb ** (alpha / gamma * (gamma + beta) / (alpha + beta)) * k ** (alpha / gamma * beta / (alpha + beta))
    return d, k


def derived_global_constant(alpha: float, beta: float, gamma: float, C: float) -> float:
    """Constant obtained by optimising (1+C)(s^-gamma X + s^beta Y) exactly.

    With p = beta/(beta+gamma), q = gamma/(beta+gamma) that minimum is
    (1+C) p^-p q^-q X^p Y^q. For alpha > gamma the moment inequality with
    constant 1 is composed on top.
    """
    if not (gamma > 0 and beta > 0 and C > 0) or alpha < gamma:
        raise DomainError("derived_global_constant needs alpha >= gamma > 0, beta, C > 0")
    p = beta / (beta + gamma)
    q = gamma / (beta + gamma)
    d_gb = (1.0 + C) * p ** (-p) * q ** (-q)
    return d_gb ** (alpha / gamma * (gamma + beta) / (alpha + beta))


def verify_interpolation(
    T: SpectralDecomposition,
    alpha: float,
    gamma: float,
    test_vectors,
    ids: Sequence[str] | None = None,
    constant: float | None = None,
    kernel_tol: float = DEFAULT_KERNEL_TOL,
) -> InequalityReport:
    """Check ||T^gamma f|| <= K ||f||^(1-gamma/alpha) ||T^alpha f||^(gamma/alpha).

    K defaults to the closed-form K_{alpha,gamma} of :func:`global_constants`.
    """
    if not 0 < gamma < alpha:
        raise DomainError("verify_interpolation needs 0 < gamma < alpha")
    k = (alpha / gamma - 1.0) ** ((2.0 * gamma - alpha) / alpha) if constant is None else constant
    F = np.asarray(test_vectors, dtype=float)
    if F.ndim == 1:
        F = F[:, None]
    if ids is None:
        ids = [f"v_{j}" for j in range(F.shape[1])]
    coef = T.eigenvectors.T @ F
    g_norm = np.linalg.norm(_powered(T, gamma, kernel_tol)[:, None] * coef, axis=0)
    a_norm = np.linalg.norm(_powered(T, alpha, kernel_tol)[:, None] * coef, axis=0)
    f_norm = np.linalg.norm(F, axis=0)
    with np.errstate(divide="ignore"):
        log_mix = (1 - gamma / alpha) * np.log(f_norm) + (gamma / alpha) * np.log(a_norm)
    mix = np.exp(log_mix)
    rhs = k * mix
    ratio = _ratio(g_norm, rhs)
    needed = _ratio(g_norm, mix)
    rows = [
        ReportRow(f"alpha={alpha:.15g};gamma={gamma:.15g}", vid, float(g_norm[j]), float(rhs[j]), float(ratio[j]), float(needed[j]))
        for j, vid in enumerate(ids)
    ]
    return InequalityReport(
        "interpolation",
        rows,
        float(k),
        float(needed.max()) if needed.size else 0.0,
        bool(np.all(ratio <= 1 + RATIO_TOL)),
    )


def verify_global(
    pair: OperatorPair,
    alpha: float,
    beta: float,
    gamma: float,
    delta: float,
    C: float,
    test_vectors,
    ids: Sequence[str] | None = None,
) -> InequalityReport:
    """Check ||f|| <= D ||T^alpha f||^(b/(a+b)) ||L^(beta delta) f||^(a/(a+b)).

    D comes from :func:`global_constants`. The right side is formed in log
    space. The per-row sharp column is the constant that row needs,
    ||f|| / (geometric mean), which is what D must dominate.
    """
    D, K = global_constants(alpha, beta, gamma, delta, C)
    L, T = pair.L_eff, pair.T_eff
    F = np.asarray(test_vectors, dtype=float)
    if ids is None:
        ids = [f"v_{j}" for j in range(F.shape[1])]
    ta = np.linalg.norm(_powered(T, alpha, pair.kernel_tol)[:, None] * (T.eigenvectors.T @ F), axis=0)
    lb = np.linalg.norm(_powered(L, beta * delta, pair.kernel_tol)[:, None] * (L.eigenvectors.T @ F), axis=0)
    fn = np.linalg.norm(F, axis=0)
    p, q = beta / (alpha + beta), alpha / (alpha + beta)
    with np.errstate(divide="ignore"):
        log_mean = p * np.log(ta) + q * np.log(lb)
    mean = np.exp(log_mean)
    rhs = D * mean
    ratio = _ratio(fn, rhs)
    needed = _ratio(fn, mean)
    label = f"alpha={alpha:.15g};beta={beta:.15g}"
    rows = [
        ReportRow(label, vid, float(fn[j]), float(rhs[j]), float(ratio[j]), float(needed[j]))
        for j, vid in enumerate(ids)
    ]
    return InequalityReport(
        "global",
        rows,
        float(D),
        float(needed.max()) if needed.size else 0.0,
        bool(np.all(ratio <= 1 + RATIO_TOL)),
        extra={
            "K_alpha_gamma": K,
            "derived_global_constant": derived_global_constant(alpha, beta, gamma, C),
            "alpha": alpha,
            "beta": beta,
            "gamma": gamma,
            "local_constant": C,
        },
    )


# ---------------------------------------------------------------- semigroup


class SandwichResult(NamedTuple):
    lower_ok: bool
    upper_ok: bool
    tail_bound: float
    lower: float
    middle: float
    upper: float


def _sandwich_core(w, coef, t, J, slack, tol):
    # coef: eigen-coefficients, shape (n, V); returns arrays over V
    sq = coef**2
    fn = np.sqrt(sq.sum(axis=0))
    order_cum = np.vstack([np.zeros(coef.shape[1]), np.cumsum(sq, axis=0)])
    def proj_norm(lam):
        m = np.searchsorted(w, lam - slack, side="left")
        return np.sqrt(np.maximum(order_cum[m], 0.0))
    mid = np.sqrt(np.sum(np.exp(-2.0 * w / t)[:, None] * sq, axis=0))
    low = math.exp(-1.0) * proj_norm(t)
    js = np.arange(1, J + 1)
    series = sum(math.exp(-j) * proj_norm(j * t) for j in js)
    tail = (math.e - 1.0) * math.exp(-J) / (1.0 - math.exp(-1.0)) * fn
    up = (math.e - 1.0) * series + tail
    return low <= mid + tol, mid <= up + tol, tail, low, mid, up


def semigroup_sandwich(L: SpectralDecomposition, t: float, f, J: int = 40, tie_tol: float = DEFAULT_TIE_TOL) -> SandwichResult:
    """e^-1 ||E_t f|| <= ||e^(-L/t) f|| <= (e-1) sum_{j<=J} e^-j ||E_{jt} f|| + tail."""
    if not t > 0 or J < 1:
        raise DomainError("semigroup_sandwich needs t > 0 and J >= 1")
    f = np.asarray(f, dtype=float).reshape(-1, 1)
    coef = L.eigenvectors.T @ f
    lo, hi, tail, a, b, c = _sandwich_core(L.eigenvalues, coef, t, J, tie_tol * L.source_norm, 1e-12)
    return SandwichResult(bool(lo[0]), bool(hi[0]), float(tail[0]), float(a[0]), float(b[0]), float(c[0]))


def semigroup_sandwich_batch(L: SpectralDecomposition, t_values, F, J: int = 40, tie_tol: float = DEFAULT_TIE_TOL):
    """Vectorised sandwich over all (t, column of F); returns (lower_ok, upper_ok) arrays."""
    F = np.asarray(F, dtype=float)
    coef = L.eigenvectors.T @ F
    scale = np.linalg.norm(F, axis=0)
    lows, ups = [], []
    for t in np.asarray(t_values, dtype=float):
        lo, hi, *_ = _sandwich_core(L.eigenvalues, coef, t, J, tie_tol * L.source_norm, 1e-12 * np.maximum(scale, 1.0))
        lows.append(lo)
        ups.append(hi)
    return np.array(lows), np.array(ups)


def exp_constant(C: float, gamma: float, delta: float, tol: float = 1e-15) -> float:
    """C (e-1) sum_j e^-j j^(gamma delta), truncated once the ratio-test bound on
    the remainder drops below ``tol`` times the partial sum."""
    if not (C > 0 and gamma > 0 and delta > 0):
        raise DomainError("exp_constant needs C, gamma, delta > 0")
    s = gamma * delta
    total = 0.0
    j = 1
    while True:
        total += math.exp(-j + s * math.log(j))
        nxt = math.exp(-(j + 1) + s * math.log(j + 1))
        q = math.exp(-1.0) * (1.0 + 1.0 / (j + 1)) ** s
        if q < 1 and nxt / (1 - q) <= tol * total:
            break
        j += 1
    return C * (math.e - 1.0) * total


# ---------------------------------------------------------------- identity checks


def stieltjes_identity(lams, weights, gamma: float, r: float) -> tuple[float, float]:
    """Both sides of the integration by parts for nu = sum_i w_i delta_{lam_i}.

    left  = sum_{lam_i < r} w_i lam_i^(-2 gamma)        (exact sum)
    right = r^(-2gamma) nu([0,r)) + 2 gamma int_0^r s^(-2gamma-1) nu([0,s)) ds
            (piecewise adaptive quadrature between atoms)
    Atoms must be positive.
    """
    lams = np.asarray(lams, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if np.any(lams <= 0):
        raise DomainError("atoms must be positive")
    order = np.argsort(lams)
    lams, weights = lams[order], weights[order]
    inside = lams < r
    left = float(np.sum(weights[inside] * lams[inside] ** (-2.0 * gamma)))
    mass = np.cumsum(weights)
    right = r ** (-2.0 * gamma) * float(np.sum(weights[inside]))
    edges = np.concatenate([lams[inside], [r]])
    integral = 0.0
    for k in range(edges.size - 1):
        lo, hi = edges[k], edges[k + 1]
        if hi <= lo:
            continue
        val, _ = scipy.integrate.quad(lambda s: s ** (-2.0 * gamma - 1.0), lo, hi, epsabs=0.0, epsrel=1e-12, limit=200)
        integral += mass[k] * val
    right += 2.0 * gamma * integral
    return left, right


def tail_estimate(T: SpectralDecomposition, gamma: float, r: float, kernel_tol: float = DEFAULT_KERNEL_TOL) -> float:
    """||(I - F_r) T^-gamma||_2 (pseudo-inverse power on ker T)."""
    w = T.eigenvalues
    keep = (w >= r - DEFAULT_TIE_TOL * T.source_norm) & ~T.kernel_mask(kernel_tol)
    if not np.any(keep):
        return 0.0
    return float(np.max(w[keep] ** (-gamma)))


# ---------------------------------------------------------------- output


def _cell(x):
    if isinstance(x, str):
        return x
    return format_number(float(x))


def report_to_csv(report: InequalityReport | None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "vector_id", "lhs", "rhs", "ratio", "sharp_constant"])
    if report is not None:
        for row in report.rows:
            w.writerow([_cell(row.t), row.vector_id, _cell(row.lhs), _cell(row.rhs), _cell(row.ratio), _cell(row.sharp_constant)])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def summary_dict(report: InequalityReport) -> dict:
    return {
        "paper_constant": _jsonable(float(report.paper_constant)),
        "max_ratio": _jsonable(report.max_ratio),
        "all_pass": bool(report.all_pass),
        "K": _jsonable(float(report.K)),
        "M": _jsonable(float(report.M)),
        "hypothesis_margin": _jsonable(float(report.hypothesis_margin)),
        "sharp_constant": _jsonable(float(report.sharp_constant)),
    }


def summary_json(reports: dict) -> str:
    return json.dumps({k: summary_dict(v) for k, v in reports.items()}, indent=2, sort_keys=True)
