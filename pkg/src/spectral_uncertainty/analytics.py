"""Closed-form and quadrature oracles: the lattice symbol measure, tree spectra
and volumes, and log-log exponent fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels
from .speccore import DomainError, eigendecompose, norm_1_to_inf, spectral_projector
from .structures import (
    adjacency_laplacian,
    build_cycle_torus,
    build_tree_ball,
    tree_ball_size,
)

__all__ = [
    "AsymptoticFit",
    "DEFAULT_RESOLUTION",
    "lattice_projector_measure",
    "lattice_projector_measure_with_error",
    "cycle_vs_symbol_check",
    "cycle_eigenvalue_levels",
    "tree_gap",
    "tree_truncation_convergence",
    "tree_dirichlet_gap_trend",
    "transformed_volume_check",
    "fit_exponent",
    "lattice_ball_volume",
]

DEFAULT_RESOLUTION = 1 << 12
MAX_GRID_DIMS = 3


@dataclass(frozen=True)
class AsymptoticFit:
    samples: tuple
    fitted_exponent: float
    residual: float
    claimed_exponent: float
    constant: float = math.nan

    def __post_init__(self):
        if len(self.samples) < 5:
            raise DomainError("an exponent fit needs at least 5 samples")

    def within(self, tol: float) -> bool:
        return abs(self.fitted_exponent - self.claimed_exponent) <= tol

    def to_dict(self) -> dict:
        return {
            "fitted_exponent": self.fitted_exponent,
            "claimed_exponent": self.claimed_exponent,
            "residual": self.residual,
            "constant": self.constant,
            "samples": len(self.samples),
        }


def fit_exponent(samples: Sequence, claimed: float) -> AsymptoticFit:
    """Least-squares slope of log y against log x; residual is the RMS misfit."""
    pts = [(float(x), float(y)) for x, y in samples]
    if len(pts) < 5:
        raise DomainError("an exponent fit needs at least 5 samples")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise DomainError("exponent fits need positive samples")
    lx = np.log([p[0] for p in pts])
    ly = np.log([p[1] for p in pts])
    slope, icpt = np.polyfit(lx, ly, 1)
    resid = float(np.sqrt(np.mean((ly - (slope * lx + icpt)) ** 2)))
    return AsymptoticFit(tuple(pts), float(slope), resid, float(claimed), float(math.exp(icpt)))


# ---------------------------------------------------------------- lattice symbol


def _symbol_levels(resolution: int) -> np.ndarray:
    x = (np.arange(resolution) + 0.5) / resolution - 0.5
    return np.sort(1.0 - np.cos(2.0 * np.pi * x))


def _grid_measure(n: int, r: float, resolution: int) -> float:
    g = np.ascontiguousarray(_symbol_levels(resolution))
    return kernels.sublevel_count(g, 0.5 * r, n) / float(resolution) ** n


def lattice_projector_measure(
    n: int, r: float, resolution: int | None = None, method: str = "auto"
) -> float:
    """Lebesgue measure of {x in [-1/2,1/2]^n : sum_i (1 - cos 2 pi x_i) < r/2}.

    n = 1 uses (1/pi) arccos(1 - r/2) unless ``method="grid"``; otherwise a
    midpoint tensor grid with ``resolution`` points per axis (n <= 3).
    """
    if n < 1:
        raise DomainError("dimension must be >= 1")
    if r <= 0:
        return 0.0
    if r >= 4 * n:
        return 1.0
    if method not in ("auto", "closed", "grid"):
        raise ValueError(f"unknown method {method!r}")
    if n == 1 and method != "grid":
        return float(np.arccos(np.clip(1.0 - r / 2.0, -1.0, 1.0)) / np.pi)
    if method == "closed":
        raise DomainError("closed form exists only for n = 1")
    if n > MAX_GRID_DIMS:
        raise DomainError(f"grid quadrature supports n <= {MAX_GRID_DIMS}")
    return _grid_measure(n, r, resolution or DEFAULT_RESOLUTION)


def lattice_projector_measure_with_error(n: int, r: float, resolution: int | None = None):
    """(grid value, |value - value at half resolution|)."""
    res = resolution or DEFAULT_RESOLUTION
    v = lattice_projector_measure(n, r, res, method="grid")
    v_half = lattice_projector_measure(n, r, max(1, res // 2), method="grid")
    return v, abs(v - v_half)


def cycle_eigenvalue_levels(side: int) -> np.ndarray:
    """Distinct eigenvalues 2 - 2 cos(2 pi k / N) of the N-cycle Laplacian."""
    k = np.arange(side // 2 + 1)
    return 2.0 - 2.0 * np.cos(2.0 * np.pi * k / side)


class SymbolComparison(NamedTuple):
    max_relative_deviation: float
    r_grid: np.ndarray
    projector_norms: np.ndarray
    symbol_measures: np.ndarray


def cycle_vs_symbol_check(side: int, dims: int, r_grid, resolution: int | None = None) -> SymbolComparison:
    """Compare ||E_r||_{1->inf} on the torus (Z/NZ)^n with the symbol measure.

    Agreement is O(1/N) away from level crossings, so small N mostly serves
    exact hand checks.
    """
    s = build_cycle_torus(dims, side)
    dec = eigendecompose(adjacency_laplacian(s))
    r_grid = np.asarray(r_grid, dtype=float)
    norms = np.array([norm_1_to_inf(spectral_projector(dec, float(r))).value for r in r_grid])
    meas = np.array([lattice_projector_measure(dims, float(r), resolution) for r in r_grid])
    with np.errstate(divide="ignore", invalid="ignore"):
        dev = np.where(meas > 0, np.abs(norms - meas) / meas, np.where(norms > 0, np.inf, 0.0))
    return SymbolComparison(float(dev.max()) if dev.size else 0.0, r_grid, norms, meas)


# ---------------------------------------------------------------- trees


def tree_gap(n: int) -> float:
    """b = n - 2 sqrt(n - 1), the bottom of the spectrum of D - A on the n-regular tree."""
    if n <= 2:
        raise DomainError("the homogeneous tree needs degree n > 2")
    return n - 2.0 * math.sqrt(n - 1.0)


class TruncationRow(NamedTuple):
    radius: int
    lambda_max: float
    gap_to_edge: float


def _adjacency_lambda_max(n: int, R: int) -> float:
    s = build_tree_ball(n, R)
    return float(eigendecompose(s.adjacency.astype(float)).eigenvalues[-1])


def tree_truncation_convergence(n: int, radii: Sequence[int]) -> list[TruncationRow]:
    """Largest adjacency eigenvalue of the radius-R ball against 2 sqrt(n-1)."""
    if n <= 2:
        raise DomainError("the homogeneous tree needs degree n > 2")
    edge = 2.0 * math.sqrt(n - 1.0)
    rows = []
    for R in radii:
        lam = _adjacency_lambda_max(n, int(R))
        rows.append(TruncationRow(int(R), lam, edge - lam))
    return rows


def tree_dirichlet_gap_trend(n: int, radii: Sequence[int]) -> list[tuple[int, float]]:
    """(R, min eigenvalue of n I - A_ball); decreases toward tree_gap(n) from above."""
    out = []
    for R in radii:
        s = build_tree_ball(n, int(R))
        w = eigendecompose(adjacency_laplacian(s, boundary="dirichlet")).eigenvalues
        out.append((int(R), float(w[0])))
    return out


def transformed_volume_check(n: int, R_max: int = 20) -> AsymptoticFit:
    """Volume |{rho <= R}| of tree balls against r = e^(kappa R / 3), kappa = log(n-1).

    The volume is the closed-form ball size, so R_max is not limited by memory.
    Fitted constant is max volume / r^3 over the samples.
    """
    if n <= 2:
        raise DomainError("the homogeneous tree needs degree n > 2")
    kappa = math.log(n - 1.0)
    rs = range(1, R_max + 1)
    samples = [(math.exp(kappa * R / 3.0), float(tree_ball_size(n, R))) for R in rs]
    fit = fit_exponent(samples, 3.0)
    c = max(v / r**3 for r, v in samples)
    return AsymptoticFit(fit.samples, fit.fitted_exponent, fit.residual, 3.0, c)


# ---------------------------------------------------------------- lattice balls


def lattice_ball_volume(n: int, r: float) -> int:
    """#{x in Z^n : ||x||_1 < r} by exhaustive enumeration of the bounding box."""
    if r <= 0:
        return 0
    w = int(math.ceil(r))
    axis = np.abs(np.arange(-w, w + 1))
    total = axis
    for _ in range(n - 1):
        total = (total[:, None] + axis[None, :]).ravel()
        total = total[total < r]
    return int(np.count_nonzero(total < r))
