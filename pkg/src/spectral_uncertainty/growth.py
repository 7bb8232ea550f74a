"""Growth functions and numerical certificates for the admissibility inequality

    int_0^r s^(-alpha) Phi(s) ds/s  <=  C r^(-alpha) Phi(r),   r in I.

After the substitution s = r e^(-u) the left side divided by r^(-alpha) Phi(r)
becomes

    ratio(r) = int_0^inf e^(alpha u) Phi(r e^(-u)) / Phi(r) du,

which is integrated over panels of width log 2 (dyadic in s) with an adaptive
Gauss-Kronrod 7/15 rule on each panel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

__all__ = [
    "GrowthError",
    "DegenerateDenominatorError",
    "MisdeclaredExponentError",
    "GrowthFunction",
    "AdmissibilityCertificate",
    "power_growth",
    "glued_exp_growth",
    "log_density_growth",
    "capped_power_growth",
    "table_growth",
    "growth_from_dict",
    "admissibility_ratio",
    "admissibility_grid",
    "check_admissibility",
    "monotone_density_criterion",
    "necessary_lower_bound_check",
    "alpha_monotonicity_check",
    "POINTS_PER_DECADE",
]

POINTS_PER_DECADE = 64
GRID_FLOOR = 1e-6
GRID_CEILING = 1e6
TAIL_REL_TOL = 1e-12
SLOPE_TOL = 0.05
_PANEL_REL_TOL = 1e-14
_MAX_BISECTIONS = 40
_U_HARD_CAP = 700.0


class GrowthError(ValueError):
    pass


class DegenerateDenominatorError(GrowthError):
    def __init__(self, r):
        super().__init__(f"Phi vanishes at grid point r = {r:.15g}")
        self.r = r


class MisdeclaredExponentError(GrowthError):
    pass


@dataclass(frozen=True, eq=False)
class GrowthFunction:
    """Nonnegative function on [0, inf) with declared behaviour s^d0 near 0.

    ``evaluator`` must act elementwise on float arrays. ``breakpoints`` lists
    points where Phi is not smooth; the quadrature splits panels there.
    """

    evaluator: Callable
    local_exponent_at_zero: float
    description: str
    breakpoints: tuple = ()
    spec: dict | None = None
    log_evaluator: Callable | None = None

    def __post_init__(self):
        if not self.local_exponent_at_zero > 0:
            raise GrowthError("declared local exponent d0 must be positive")

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return np.asarray(self.evaluator(s), dtype=float)

    def log(self, s):
        """log Phi(s), overflow-free when a log evaluator is supplied."""
        s = np.asarray(s, dtype=float)
        if self.log_evaluator is not None:
            return np.asarray(self.log_evaluator(s), dtype=float)
        with np.errstate(divide="ignore"):
            return np.log(self(s))

    def scaled(self, c: float) -> "GrowthFunction":
        if not c > 0:
            raise GrowthError("scale factor must be positive")
        f = self.evaluator
        lf = self.log_evaluator
        spec = None
        if self.spec is not None:
            spec = dict(self.spec)
            spec["scale"] = spec.get("scale", 1.0) * c
        return GrowthFunction(
            lambda s: c * f(s),
            self.local_exponent_at_zero,
            f"{c:.15g} * ({self.description})",
            self.breakpoints,
            spec,
            None if lf is None else (lambda s: math.log(c) + lf(s)),
        )

    def validate(self, grid=None) -> None:
        if grid is None:
            grid = np.logspace(-8, 8, 16 * POINTS_PER_DECADE + 1)
        vals = self(grid)
        if not np.all(np.isfinite(vals)):
            bad = np.asarray(grid)[~np.isfinite(vals)][0]
            raise GrowthError(f"Phi is not finite at s = {bad:.6g}")
        if np.any(vals < 0):
            bad = np.asarray(grid)[vals < 0][0]
            raise GrowthError(f"Phi is negative at s = {bad:.6g}")
        if not np.any(vals > 0):
            raise GrowthError("Phi vanishes identically on the sample grid")

    def to_dict(self) -> dict:
        if self.spec is None:
            raise GrowthError("this growth function was not built from a config")
        return dict(self.spec)


# ---------------------------------------------------------------- library


def _safe_log(s):
    with np.errstate(divide="ignore"):
        return np.log(s)


def power_growth(d: float, c: float = 1.0) -> GrowthFunction:
    """Phi(s) = c s^d."""
    d, c = float(d), float(c)
    if c <= 0:
        raise GrowthError("power growth needs c > 0")
    return GrowthFunction(
        lambda s: c * np.power(s, d),
        d,
        f"{c:.15g} s^{d:.15g}",
        (),
        {"kind": "power", "d": d, "c": c},
        lambda s: math.log(c) + d * _safe_log(s),
    )


def glued_exp_growth(delta: float, kappa: float) -> GrowthFunction:
    """s^delta on [0, 1], e^(kappa (s - 1)) beyond."""
    delta, kappa = float(delta), float(kappa)

    def f(s):
        with np.errstate(over="ignore"):
            return np.where(s <= 1.0, np.power(s, delta), np.exp(kappa * (np.maximum(s, 1.0) - 1.0)))

    def logf(s):
        with np.errstate(divide="ignore"):
            return np.where(s <= 1.0, delta * np.log(np.minimum(s, 1.0)), kappa * (s - 1.0))

    return GrowthFunction(
        f,
        delta,
        f"s^{delta:.15g} glued to exp({kappa:.15g}(s-1)) at 1",
        (1.0,),
        {"kind": "glued_exp", "delta": delta, "kappa": kappa},
        logf,
    )


_GL_X, _GL_W = np.polynomial.legendre.leggauss(48)


def log_density_growth(delta: float, d0: float = 2.0) -> GrowthFunction:
    """Phi with density (log s)^delta for s > e and e (s/e)^d0 on [0, e].

    For r > e, Phi(r) = e + int_e^r (log s)^delta ds, evaluated through
    s = e^w as int_1^(log r) w^delta e^w dw by 48-point Gauss-Legendre.
    """
    delta, d0 = float(delta), float(d0)
    knee = math.e

    def upper(r):
        v = np.log(r)
        half = 0.5 * (v - 1.0)
        w = 1.0 + half[..., None] * (_GL_X + 1.0)
        return knee + half * ((w**delta * np.exp(w)) @ _GL_W)

    def f(s):
        out = knee * np.power(np.minimum(s, knee) / knee, d0)
        big = s > knee
        if np.any(big):
            out = np.array(out, dtype=float)
            with np.errstate(over="ignore"):
                out[big] = upper(s[big])
        return out

    def logf(s):
        out = 1.0 + d0 * (_safe_log(np.minimum(s, knee)) - 1.0)
        big = s > knee
        if np.any(big):
            out = np.array(out, dtype=float)
            out[big] = np.log(upper(s[big]))
        return out

    return GrowthFunction(
        f,
        d0,
        f"density (log s)^{delta:.15g} beyond e, e(s/e)^{d0:.15g} below",
        (knee,),
        {"kind": "log_density", "delta": delta, "d0": d0},
        logf,
    )


def capped_power_growth(d: float, knee: float = 1.0) -> GrowthFunction:
    """s^d up to ``knee`` and constant knee^d beyond."""
    d, knee = float(d), float(knee)
    return GrowthFunction(
        lambda s: np.power(np.minimum(s, knee), d),
        d,
        f"min(s, {knee:.15g})^{d:.15g}",
        (knee,),
        {"kind": "capped_power", "d": d, "knee": knee},
        lambda s: d * _safe_log(np.minimum(s, knee)),
    )


def table_growth(points, values, d0: float | None = None) -> GrowthFunction:
    """Piecewise power law through the samples (linear in log-log coordinates).

    Outside the table the first and last segments are extended. The declared
    exponent at zero defaults to the slope of the first segment.
    """
    x = np.asarray(points, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.size < 2 or x.shape != y.shape:
        raise GrowthError("table needs at least two (point, value) pairs")
    if np.any(x <= 0) or np.any(y <= 0) or np.any(np.diff(x) <= 0):
        raise GrowthError("table points must be increasing and positive with positive values")
    lx, ly = np.log(x), np.log(y)
    first = (ly[1] - ly[0]) / (lx[1] - lx[0])
    last = (ly[-1] - ly[-2]) / (lx[-1] - lx[-2])
    if d0 is None:
        d0 = first

    def logf(s):
        s = np.asarray(s, dtype=float)
        out = np.full(s.shape, -np.inf)
        pos = s > 0
        ls = np.log(s[pos])
        v = np.interp(ls, lx, ly)
        v = np.where(ls < lx[0], ly[0] + first * (ls - lx[0]), v)
        out[pos] = np.where(ls > lx[-1], ly[-1] + last * (ls - lx[-1]), v)
        return out

    def f(s):
        with np.errstate(over="ignore"):
            return np.exp(logf(s))

    return GrowthFunction(
        f,
        float(d0),
        f"log-log table with {x.size} samples",
        tuple(float(p) for p in x),
        {"kind": "table", "points": x.tolist(), "values": y.tolist(), "d0": float(d0)},
        logf,
    )


def growth_from_dict(spec: dict) -> GrowthFunction:
    """Build from {kind: power|glued_exp|log_density|capped_power|table, ...}."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise GrowthError("growth spec must be an object with a 'kind' field")
    kind = spec["kind"]
    try:
        if kind == "power":
            g = power_growth(spec["d"], spec.get("c", 1.0) * spec.get("scale", 1.0))
        elif kind == "glued_exp":
            g = glued_exp_growth(spec["delta"], spec["kappa"])
        elif kind == "log_density":
            g = log_density_growth(spec["delta"], spec.get("d0", 2.0))
        elif kind == "capped_power":
            g = capped_power_growth(spec["d"], spec.get("knee", 1.0))
        elif kind == "table":
            g = table_growth(spec["points"], spec["values"], spec.get("d0"))
        else:
            raise GrowthError(f"unknown growth kind {kind!r}")
    except KeyError as exc:
        raise GrowthError(f"growth spec of kind {kind!r} is missing {exc}") from None
    scale = spec.get("scale", 1.0)
    if scale != 1.0 and kind != "power":
        g = g.scaled(scale)
    return g


# ---------------------------------------------------------------- quadrature

_XK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.0,
    ]
)
_WK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_WG = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)
_NODES = np.concatenate([-_XK[:7], _XK[::-1]])
_WK15 = np.concatenate([_WK[:7], _WK[::-1]])
_WG15 = np.zeros(15)
_WG15[1:7:2] = _WG[:3]
_WG15[7] = _WG[3]
_WG15[9:15:2] = _WG[2::-1]


class _RatioIntegrand:
    def __init__(self, phi: GrowthFunction, alpha: float, r: float):
        self.phi = phi
        self.alpha = alpha
        self.log_r = math.log(r)
        lp = float(phi.log(np.array([r]))[0])
        if not math.isfinite(lp):
            raise DegenerateDenominatorError(r)
        self.log_phi_r = lp

    def __call__(self, u):
        s = np.exp(self.log_r - u)
        with np.errstate(divide="ignore", over="ignore", under="ignore"):
            return np.exp(self.alpha * u + self.phi.log(s) - self.log_phi_r)


def _gk15(f, a, b):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    vals = f(mid[:, None] + half[:, None] * _NODES[None, :])
    k = half * (vals @ _WK15)
    g = half * (vals @ _WG15)
    return k, np.abs(k - g)


def _integrate_panels(f, edges, scale_hint):
    """Adaptive GK15 on consecutive panels given by ``edges``."""
    a, b = edges[:-1], edges[1:]
    total = 0.0
    err = 0.0
    for _ in range(_MAX_BISECTIONS):
        k, e = _gk15(f, a, b)
        ref = max(scale_hint, float(np.abs(k).sum()) + total)
        bad = e > _PANEL_REL_TOL * ref
        total += float(k[~bad].sum())
        err += float(e[~bad].sum())
        if not np.any(bad):
            return total, err
        mid = 0.5 * (a[bad] + b[bad])
        a, b = np.concatenate([a[bad], mid]), np.concatenate([mid, b[bad]])
    k, e = _gk15(f, a, b)
    return total + float(k.sum()), err + float(e.sum())


def admissibility_ratio(
    phi: GrowthFunction, alpha: float, r: float, panel_width: float = math.log(2.0)
) -> tuple[float, float]:
    """(ratio(r), absolute error estimate); ratio as in the module docstring."""
    d0 = phi.local_exponent_at_zero
    if d0 <= alpha:
        return math.inf, 0.0
    f = _RatioIntegrand(phi, alpha, r)
    u_cap = max(_U_HARD_CAP + f.log_r - 10.0, 8 * panel_width)
    kinks = [math.log(r / p) for p in phi.breakpoints if 0 < p < r]
    # Steep Phi (exponential growth at large r) makes the integrand collapse on
    # a u-scale of 1/(local log-slope); grade the panels toward u = 0 to match.
    lp = phi.log(np.array([r * (1 - 1e-6), r * (1 + 1e-6)]))
    rate = float(lp[1] - lp[0]) / 2e-6 - alpha
    if math.isfinite(rate) and rate * panel_width > 4.0:
        h = 0.125 / rate
        while h < panel_width:
            kinks.append(h)
            h *= 2.0
    kinks = np.array(kinks, dtype=float)
    total = 0.0
    err = 0.0
    u0 = 0.0
    chunk = 32
    while True:
        u1 = min(u0 + chunk * panel_width, u_cap)
        edges = np.linspace(u0, u1, max(2, int(round((u1 - u0) / panel_width)) + 1))
        inside = kinks[(kinks > u0) & (kinks < u1)]
        if inside.size:
            edges = np.unique(np.concatenate([edges, inside]))
        part, e = _integrate_panels(f, edges, total)
        total += part
        err += e
        tail_head = float(f(np.array([u1]))[0])
        tail = tail_head / (d0 - alpha)
        if tail <= TAIL_REL_TOL * total:
            err += tail
            return total, err
        if u1 >= u_cap:
            # Phi is a pure power s^d0 this close to 0, so the rest is analytic.
            total += tail
            err += TAIL_REL_TOL * total
            return total, err
        u0 = u1
        chunk *= 2


# ---------------------------------------------------------------- certificates


@dataclass(frozen=True, eq=False)
class AdmissibilityCertificate:
    alpha: float
    interval: tuple
    constant: float
    grid_points: int
    quadrature_error_estimate: float
    verdict: str
    grid: np.ndarray = field(repr=False, default=None)
    ratios: np.ndarray = field(repr=False, default=None)
    tail_slope: float = 0.0

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "interval": [self.interval[0], _json_float(self.interval[1])],
            "constant": _json_float(self.constant),
            "grid_points": self.grid_points,
            "quadrature_error_estimate": self.quadrature_error_estimate,
            "verdict": self.verdict,
        }


def _json_float(x):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def admissibility_grid(
    interval, points_per_decade: int = POINTS_PER_DECADE, extra_points=None
) -> np.ndarray:
    """Log grid over I with one point of margin on either side."""
    a, b = float(interval[0]), float(interval[1])
    if not (0 <= a < b):
        raise GrowthError("interval must satisfy 0 <= a < b")
    lo = a if a > 0 else GRID_FLOOR
    hi = b if math.isfinite(b) else GRID_CEILING
    if hi <= lo:
        hi = lo * 10.0
    step = 10.0 ** (1.0 / points_per_decade)
    n = max(2, int(math.ceil(math.log10(hi / lo) * points_per_decade)) + 1)
    pts = np.geomspace(lo, hi, n)
    pts = np.concatenate([[lo / step], pts, [hi * step]])
    if extra_points is not None:
        extra = np.asarray(extra_points, dtype=float).ravel()
        pts = np.concatenate([pts, extra[extra > 0]])
    return np.unique(pts)


def _probe_exponent(phi: GrowthFunction) -> None:
    d0 = phi.local_exponent_at_zero
    s = np.array([1e-8, 1e-6])
    v = phi(s)
    if not np.all(v > 0):
        raise MisdeclaredExponentError(
            f"Phi vanishes near 0 (values {v[0]:.3g}, {v[1]:.3g}); declared d0 = {d0:.6g}"
        )
    q = v / s**d0
    ratio = q[1] / q[0]
    if not 0.1 <= ratio <= 10.0:
        raise MisdeclaredExponentError(
            f"Phi(s)/s^d0 changes by a factor {ratio:.4g} between 1e-8 and 1e-6; "
            f"declared d0 = {d0:.6g} looks wrong"
        )


def check_admissibility(
    phi: GrowthFunction,
    alpha: float,
    interval,
    grid=None,
    *,
    points_per_decade: int = POINTS_PER_DECADE,
    extra_points=None,
    panel_width: float = math.log(2.0),
) -> AdmissibilityCertificate:
    """Measure C_{I,alpha} as the largest ratio over a logarithmic grid."""
    if not alpha > 0:
        raise GrowthError("alpha must be positive")
    a, b = float(interval[0]), float(interval[1])
    _probe_exponent(phi)
    if grid is None:
        grid = admissibility_grid((a, b), points_per_decade, extra_points)
    grid = np.asarray(grid, dtype=float)
    if phi.local_exponent_at_zero <= alpha:
        return AdmissibilityCertificate(
            alpha, (a, b), math.inf, int(grid.size), 0.0, "divergent_at_zero", grid, None
        )
    ratios = np.empty(grid.size)
    rel_err = 0.0
    for i, r in enumerate(grid):
        val, e = admissibility_ratio(phi, alpha, float(r), panel_width)
        ratios[i] = val
        if val > 0:
            rel_err = max(rel_err, e / val)
    slope = 0.0
    verdict = "holds"
    if not np.all(np.isfinite(ratios)):
        verdict = "fails"
    elif math.isinf(b):
        top = grid >= grid[-1] / 10.0
        if np.count_nonzero(top) >= 2:
            x, y = np.log(grid[top]), np.log(np.maximum(ratios[top], 1e-300))
            slope = float(np.polyfit(x, y, 1)[0])
        if slope > SLOPE_TOL:
            verdict = "fails"
    constant = float(ratios.max()) if verdict == "holds" else math.inf
    if verdict == "fails" and np.all(np.isfinite(ratios)):
        constant = math.inf
    return AdmissibilityCertificate(
        float(alpha), (a, b), constant, int(grid.size), rel_err, verdict, grid, ratios, slope
    )


class MonotoneDensityResult(NamedTuple):
    holds: bool
    constant_bound: float


def monotone_density_criterion(f: Callable, alpha: float, r0: float, grid) -> MonotoneDensityResult:
    """Is f(s) s^-alpha nondecreasing on the grid points beyond r0?"""
    s = np.asarray(grid, dtype=float)
    s = np.sort(s[s > r0])
    g = np.asarray(f(s), dtype=float) * s ** (-alpha)
    if np.any(np.asarray(f(s)) < 0):
        raise GrowthError("density must be nonnegative")
    drops = np.diff(g) < -1e-12 * np.abs(g[1:])
    return MonotoneDensityResult(bool(not np.any(drops)), 2.0 ** (alpha + 1.0))


class LowerBoundCheck(NamedTuple):
    satisfied: bool
    witness_constant: float
    infimum: float


def necessary_lower_bound_check(
    phi: GrowthFunction,
    alpha: float,
    r_prime: float,
    certificate: AdmissibilityCertificate,
    r_max: float = GRID_CEILING,
    points_per_decade: int = POINTS_PER_DECADE,
) -> LowerBoundCheck:
    """Test Phi(r)/r^alpha >= J(r')/C on [r', r_max], J(r') = int_0^r' s^(-alpha-1) Phi.

    A certificate claiming C on an unbounded interval forces this bound; a
    failure exposes an inconsistent claim.
    """
    if not math.isinf(certificate.interval[1]):
        raise GrowthError("the lower bound needs a certificate on an interval with sup = inf")
    c = certificate.constant
    if not (math.isfinite(c) and c > 0):
        return LowerBoundCheck(False, 0.0, math.nan)
    ratio, _ = admissibility_ratio(phi, alpha, r_prime)
    j = ratio * float(np.exp(phi.log(np.array([r_prime]))[0])) * r_prime ** (-alpha)
    witness = j / c
    n = max(2, int(math.ceil(math.log10(r_max / r_prime) * points_per_decade)) + 1)
    grid = np.geomspace(r_prime, r_max, n)
    inf_val = float(np.exp(np.min(phi.log(grid) - alpha * np.log(grid))))
    ok = witness > 0 and inf_val >= witness * (1.0 - 1e-9)
    return LowerBoundCheck(bool(ok), float(witness), inf_val)


def alpha_monotonicity_check(
    phi: GrowthFunction, alpha: float, alpha_prime: float, interval, grid=None
) -> bool:
    """Measured constant at alpha' <= measured constant at alpha on one grid."""
    if alpha_prime > alpha:
        raise GrowthError("alpha' must not exceed alpha")
    if grid is None:
        grid = admissibility_grid(interval)
    hi = check_admissibility(phi, alpha, interval, grid)
    lo = check_admissibility(phi, alpha_prime, interval, grid)
    return bool(lo.constant <= hi.constant * (1.0 + 1e-9))
