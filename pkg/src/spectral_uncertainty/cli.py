"""Scenario runner and command line.

    spectral-uncertainty verify CONFIG.json [--output-dir DIR]
    spectral-uncertainty oracle lattice --n N --r R [--resolution K]
    spectral-uncertainty oracle tree-gap --n N
    spectral-uncertainty admissible --phi SPEC --alpha A --interval a b

Exit codes: 0 pass, 1 inequality violation, 2 hypothesis failure,
3 capacity exceeded, 4 config error, 5 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analytics, growth, structures, uncertainty
from .speccore import (
    DomainError,
    PositivityError,
    SymmetricOperator,
    SymmetryError,
    eigendecompose,
    format_number,
)

__all__ = [
    "EXIT_PASS",
    "EXIT_VIOLATION",
    "EXIT_HYPOTHESIS",
    "EXIT_CAPACITY",
    "EXIT_CONFIG",
    "EXIT_IO",
    "OUTPUT_DIR_ENV",
    "SCHEMA_VERSION",
    "ConfigError",
    "ScenarioConfig",
    "ScenarioResult",
    "load_config",
    "build_pair",
    "run_scenario",
    "emit_plotdata",
    "main",
]

EXIT_PASS = 0
EXIT_VIOLATION = 1
EXIT_HYPOTHESIS = 2
EXIT_CAPACITY = 3
EXIT_CONFIG = 4
EXIT_IO = 5

OUTPUT_DIR_ENV = "SPECTRAL_UNCERTAINTY_OUTPUT_DIR"
SCHEMA_VERSION = 1
SCENARIOS = ("lattice", "tree", "cycle_compact", "custom")
AUTO_SLACK = 1e-9


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- config


def _pos(name, value):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}") from None
    if not v > 0 or not math.isfinite(v):
        raise ConfigError(f"{name} must be positive and finite, got {value!r}")
    return v


def _bound(name, value):
    if isinstance(value, str) and value.lower() in ("inf", "infinity"):
        return math.inf
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number or 'inf', got {value!r}") from None
    if math.isnan(v) or v < 0:
        raise ConfigError(f"{name} must be nonnegative")
    return v


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    structure: dict
    transform: dict | None
    gamma: float
    delta: float
    alpha: float
    beta: float
    phi: dict
    eta: float
    interval_A: tuple
    t_points: int = uncertainty.T_GRID_POINTS
    r_points: int = uncertainty.R_GRID_POINTS
    n_random: int = 100
    semigroup_J: int = 40
    seed: int = 42
    output_dir: str | None = None
    restriction: str | None = None
    couple: str | None = None
    matrices: dict | None = None
    base_dir: str = "."
    name: str = ""

    @classmethod
    def from_dict(cls, doc: dict, base_dir: str = ".") -> "ScenarioConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ConfigError(f"schema_version must be {SCHEMA_VERSION}")
        scenario = doc.get("scenario")
        if scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}, got {scenario!r}")
        known = {
            "schema_version", "scenario", "name", "structure", "transform", "exponents",
            "phi", "eta", "interval_A", "grids", "semigroup", "seed", "output_dir",
            "restriction", "couple", "matrices",
        }
        extra = set(doc) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        ex = doc.get("exponents", {})
        if not isinstance(ex, dict):
            raise ConfigError("exponents must be an object")
        defaults = _scenario_defaults(scenario, doc.get("structure", {}))
        gamma = _pos("exponents.gamma", ex.get("gamma", defaults.get("gamma")))
        delta = _pos("exponents.delta", ex.get("delta", defaults["delta"]))
        alpha = _pos("exponents.alpha", ex.get("alpha", 1.0))
        beta = _pos("exponents.beta", ex.get("beta", 1.0))
        eta = _pos("eta", doc.get("eta", 1.0))
        ia = doc.get("interval_A", [0, "inf"])
        if not isinstance(ia, (list, tuple)) or len(ia) != 2:
            raise ConfigError("interval_A must be a two-element list")
        a, b = _bound("interval_A[0]", ia[0]), _bound("interval_A[1]", ia[1])
        if not a < b:
            raise ConfigError("interval_A needs a < b")
        grids = doc.get("grids", {})
        sg = doc.get("semigroup", {})
        try:
            t_points = int(grids.get("t_points", uncertainty.T_GRID_POINTS))
            r_points = int(grids.get("r_points", uncertainty.R_GRID_POINTS))
            n_random = int(grids.get("n_random", 100))
            J = int(sg.get("J", 40))
            seed = int(doc.get("seed", 42))
        except (TypeError, ValueError, AttributeError) as exc:
            raise ConfigError(f"grid, semigroup and seed settings must be integers: {exc}") from None
        if t_points < 2 or r_points < 2 or n_random < 0 or J < 1:
            raise ConfigError("need t_points, r_points >= 2, n_random >= 0, J >= 1")
        phi = doc.get("phi", defaults.get("phi"))
        if not isinstance(phi, dict):
            raise ConfigError("phi must be an object {kind: ..., ...}")
        structure = doc.get("structure", {})
        if not isinstance(structure, dict):
            raise ConfigError("structure must be an object")
        matrices = doc.get("matrices")
        if scenario == "custom":
            if matrices is None and "adjacency" not in structure and "adjacency_file" not in structure:
                raise ConfigError("custom scenario needs 'matrices' or a structure adjacency")
            for key in ("L_file", "T_file"):
                if matrices and key in matrices:
                    if not (Path(base_dir) / matrices[key]).is_file():
                        raise ConfigError(f"referenced file {matrices[key]!r} does not exist")
            if "adjacency_file" in structure and not (Path(base_dir) / structure["adjacency_file"]).is_file():
                raise ConfigError(f"referenced file {structure['adjacency_file']!r} does not exist")
        restriction = doc.get("restriction")
        if restriction is not None and restriction not in uncertainty.RESTRICTIONS:
            raise ConfigError(f"restriction must be one of {uncertainty.RESTRICTIONS}")
        couple = doc.get("couple")
        if couple is not None and couple not in uncertainty.COUPLES:
            raise ConfigError(f"couple must be one of {uncertainty.COUPLES}")
        out = doc.get("output_dir")
        if out is not None and not isinstance(out, str):
            raise ConfigError("output_dir must be a string")
        return cls(
            scenario, structure, doc.get("transform"), gamma, delta, alpha, beta, phi, eta,
            (a, b), t_points, r_points, n_random, J, seed, out, restriction, couple, matrices,
            base_dir, str(doc.get("name", scenario)),
        )


def _scenario_defaults(scenario, structure):
    if scenario == "lattice":
        n = structure.get("dims", 1) if isinstance(structure, dict) else 1
        c = 0.5 if n == 1 else "auto"
        return {"delta": 2.0, "phi": {"kind": "power", "d": n / 2.0, "c": c}}
    if scenario == "tree":
        return {"delta": 2.0, "phi": {"kind": "power", "d": 1.5, "c": "auto"}}
    if scenario == "cycle_compact":
        return {"delta": 1.0, "gamma": 0.5, "phi": {"kind": "power", "d": 2.0, "c": "auto"}}
    return {"delta": 1.0}


def load_config(path: str | os.PathLike) -> ScenarioConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(p)!r}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return ScenarioConfig.from_dict(doc, str(p.parent))


# ---------------------------------------------------------------- assembly


@dataclass
class Assembly:
    """The operator pair plus the exponents it is actually checked with."""

    pair: uncertainty.OperatorPair
    couple: str
    gamma: float
    delta: float
    alpha: float
    beta: float
    structure: structures.StructureModel | None
    swapped: bool
    notes: list = field(default_factory=list)


def _matrix(cfg, spec, key):
    if key + "_file" in spec:
        path = Path(cfg.base_dir) / spec[key + "_file"]
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {str(path)!r}: {exc}") from None
        from .speccore import matrix_from_csv, matrix_from_json

        return matrix_from_json(text) if path.suffix == ".json" else matrix_from_csv(text)
    if key not in spec:
        raise ConfigError(f"matrices.{key} missing")
    return np.asarray(spec[key], dtype=float)


def _custom_structure(cfg):
    st = cfg.structure
    if "adjacency_file" in st:
        path = Path(cfg.base_dir) / st["adjacency_file"]
        adj = structures.structure_from_json(path.read_text()).adjacency
    else:
        adj = np.asarray(st["adjacency"])
    return structures.build_custom(adj, int(st.get("root", 0)))


def build_pair(cfg: ScenarioConfig) -> Assembly:
    """Structure -> (L, T) in the orientation the local inequality is checked in.

    lattice and tree run with the roles exchanged: L is the distance
    multiplier and T the Laplacian, with the dual couple. Config exponents
    describe the Laplacian/distance form and are mapped as
    gamma' = gamma/2, alpha' = beta/2, beta' = alpha/2 with delta = 2.
    """
    st = cfg.structure
    sc = cfg.scenario
    try:
        if sc == "lattice":
            s = structures.build_cycle_torus(int(st.get("dims", 1)), int(st.get("side", 64)))
            tr = structures.transform_from_dict(cfg.transform)
            lap = eigendecompose(structures.adjacency_laplacian(s))
            dist = eigendecompose(structures.distance_operator(s, tr))
            pair = uncertainty.OperatorPair(dist, lap, restriction=cfg.restriction or "complement_of_both_kernels")
            return Assembly(pair, cfg.couple or "linf", cfg.gamma / 2, cfg.delta, cfg.beta / 2, cfg.alpha / 2, s, True)
        if sc == "tree":
            n = int(st.get("branching_degree", 3))
            s = structures.build_tree_ball(n, int(st.get("radius", 8)))
            b = analytics.tree_gap(n)
            tr = cfg.transform
            transform = (
                structures.exp_scaled_transform(structures.kappa(n) / 3.0, 0)
                if tr is None
                else structures.transform_from_dict(tr)
            )
            lap = eigendecompose(structures.adjacency_laplacian(s, boundary="dirichlet"))
            dist = eigendecompose(structures.distance_operator(s, transform))
            pair = uncertainty.OperatorPair(dist, lap, restriction=cfg.restriction or "full_space", shift_T=b)
            return Assembly(
                pair, cfg.couple or "linf", cfg.gamma / 2, cfg.delta, cfg.beta / 2, cfg.alpha / 2, s, True,
                [f"T is the Dirichlet compression n I - A of the ball shifted by b = {format_number(b)}"],
            )
        if sc == "cycle_compact":
            s = structures.build_cycle_torus(int(st.get("dims", 1)), int(st.get("side", 16)))
            tr = structures.transform_from_dict(cfg.transform)
            lap = eigendecompose(structures.adjacency_laplacian(s))
            dist = eigendecompose(structures.distance_operator(s, tr))
            pair = uncertainty.OperatorPair(lap, dist, restriction=cfg.restriction or "complement_of_both_kernels")
            return Assembly(pair, cfg.couple or "l1", cfg.gamma, cfg.delta, cfg.alpha, cfg.beta, s, False)
        # custom
        if cfg.matrices is not None:
            Lm = SymmetricOperator(_matrix(cfg, cfg.matrices, "L"), symmetry_tol=1e-9)
            Tm = SymmetricOperator(_matrix(cfg, cfg.matrices, "T"), symmetry_tol=1e-9)
            s = None
        else:
            s = _custom_structure(cfg)
            lap_kind = st.get("laplacian", "adjacency")
            Lm = (
                structures.adjacency_laplacian(s)
                if lap_kind == "adjacency"
                else structures.transition_laplacian(s)
            )
            Tm = structures.distance_operator(s, structures.transform_from_dict(cfg.transform))
        pair = uncertainty.OperatorPair(
            eigendecompose(Lm), eigendecompose(Tm), restriction=cfg.restriction or "complement_of_kernel_T"
        )
        return Assembly(pair, cfg.couple or "l1", cfg.gamma, cfg.delta, cfg.alpha, cfg.beta, s, False)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad structure parameters: {exc}") from None
    except (
        structures.StructureError,
        structures.TransformError,
        structures.DegreeError,
        SymmetryError,
        PositivityError,
        DomainError,
    ) as exc:
        raise ConfigError(str(exc)) from None


def _resolve_phi(cfg: ScenarioConfig, asm: Assembly) -> tuple[growth.GrowthFunction, list]:
    spec = dict(cfg.phi)
    notes = []
    if spec.get("c") == "auto":
        if spec.get("kind") != "power":
            raise ConfigError("c = 'auto' is only supported for power growth")
        d = _pos("phi.d", spec.get("d"))
        jumps, norms, _ = uncertainty.ip0_profile(asm.pair, asm.couple)
        c = float(np.max(norms / jumps**d)) if jumps.size else 1.0
        c *= 1.0 + AUTO_SLACK
        spec["c"] = c
        notes.append(
            f"Phi constant c = {format_number(c)} measured on this truncation; "
            "it is not certified for the infinite structure"
        )
    try:
        return growth.growth_from_dict(spec), notes
    except growth.GrowthError as exc:
        raise ConfigError(f"phi: {exc}") from None


# ---------------------------------------------------------------- running


@dataclass
class ScenarioResult:
    exit_code: int
    summary: dict
    local: uncertainty.InequalityReport | None = None
    global_: uncertainty.InequalityReport | None = None
    bundle: uncertainty.HypothesisBundle | None = None
    files: list = field(default_factory=list)
    message: str = ""
    pair: uncertainty.OperatorPair | None = None


def _clean(x):
    """JSON-ready value with floats rounded to 15 significant digits."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if not math.isfinite(x):
            return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
        return float(format_number(x))
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else format_number(float(v)) for v in row])
    return buf.getvalue()


def _sandwich(pair: uncertainty.OperatorPair, t_grid, J: int, n_random: int, seed: int) -> dict:
    L = pair.L_eff
    rng = np.random.default_rng(seed)
    rand = rng.standard_normal((n_random, pair.dim)).T
    F = np.hstack([L.eigenvectors, rand / np.linalg.norm(rand, axis=0)]) if n_random else L.eigenvectors
    ts = np.asarray(t_grid, dtype=float)
    # the sandwich is parametrised by E_t; add reciprocals so both ends of the spectrum are hit
    ts = np.unique(np.concatenate([ts, 1.0 / ts]))
    lo, hi = uncertainty.semigroup_sandwich_batch(L, ts, F, J)
    return {
        "J": J,
        "t_values": int(ts.size),
        "vectors": int(F.shape[1]),
        "lower_violations": int(np.count_nonzero(~lo)),
        "upper_violations": int(np.count_nonzero(~hi)),
        "all_pass": bool(lo.all() and hi.all()),
    }


def run_scenario(cfg: ScenarioConfig, output_dir: str | os.PathLike | None = None) -> ScenarioResult:
    """Build, verify hypotheses, run local, global and semigroup checks, write files."""
    out = output_dir or os.environ.get(OUTPUT_DIR_ENV) or cfg.output_dir or "."
    out = Path(out)
    try:
        asm = build_pair(cfg)
    except structures.CapacityError as exc:
        return ScenarioResult(EXIT_CAPACITY, {"error": str(exc)}, message=str(exc))
    pair = asm.pair
    phi, notes = _resolve_phi(cfg, asm)
    notes = asm.notes + notes
    base = {
        "scenario": cfg.scenario,
        "name": cfg.name,
        "couple": asm.couple,
        "restriction": pair.restriction,
        "swapped_roles": asm.swapped,
        "operator_exponents": {"gamma": asm.gamma, "delta": asm.delta, "alpha": asm.alpha, "beta": asm.beta},
        "eta": cfg.eta,
        "interval_A": [cfg.interval_A[0], cfg.interval_A[1]],
        "phi": phi.spec,
        "dimension": pair.dim,
        "notes": notes,
    }
    try:
        t_grid = uncertainty.default_t_grid(pair.L_eff, cfg.t_points, cfg.interval_A, pair.kernel_tol)
        b_sup = cfg.eta * cfg.interval_A[1] ** cfg.delta if math.isfinite(cfg.interval_A[1]) else math.inf
        r_grid = uncertainty.default_r_grid(pair.T_eff, b_sup, cfg.r_points, pair.kernel_tol)
        bundle = uncertainty.verify_hypotheses(
            pair, phi, cfg.eta, asm.delta, asm.gamma, cfg.interval_A, t_grid, r_grid, asm.couple
        )
    except uncertainty.HypothesisError as exc:
        summary = dict(base, all_pass=False, hypothesis_failure={"name": exc.name, "message": str(exc)})
        res = ScenarioResult(EXIT_HYPOTHESIS, _clean(summary), message=str(exc))
        try:
            _write_files(out, res, None, None, None, [])
        except OSError as io_exc:
            res.exit_code = EXIT_IO
            res.message = f"cannot write outputs: {io_exc}"
        return res
    ids, vecs = uncertainty.generate_test_vectors(pair, cfg.n_random, cfg.seed)
    local = uncertainty.verify_local(pair, bundle, t_grid, vecs, ids)

    # The global step needs alpha >= gamma; a smaller alpha uses the local inequality
    # at gamma' = alpha, which holds with the same K and M.
    g_eff = min(asm.gamma, asm.alpha)
    local_eff = local
    if g_eff < asm.gamma:
        bundle_eff = dataclasses.replace(bundle, gamma=g_eff)
        local_eff = uncertainty.verify_local(pair, bundle_eff, t_grid, vecs, ids)
        notes.append(
            f"global step uses the local inequality at gamma' = {format_number(g_eff)} < gamma; "
            "admissibility at 2 gamma' inherits the constant M"
        )
    glob = uncertainty.verify_global(
        pair, asm.alpha, asm.beta, g_eff, asm.delta, local_eff.paper_constant, vecs, ids
    )
    sandwich = _sandwich(pair, t_grid, cfg.semigroup_J, cfg.n_random, cfg.seed)
    c_prime = uncertainty.exp_constant(local.paper_constant, asm.gamma, asm.delta)
    all_pass = local.all_pass and local_eff.all_pass and glob.all_pass and sandwich["all_pass"]
    summary = dict(
        base,
        paper_constant=local.paper_constant,
        max_ratio=max(local.max_ratio, local_eff.max_ratio, glob.max_ratio),
        all_pass=all_pass,
        K=bundle.K,
        M=bundle.M,
        hypothesis_margin=bundle.hypothesis_margin,
        sharp_constant=local.sharp_constant,
        ip0_worst_ratio=bundle.ip0_worst_ratio,
        ip0_norms_exact=bundle.ip0_exact,
        admissibility=bundle.certificate.to_dict(),
        local=dict(
            uncertainty.summary_dict(local),
            rows=len(local.rows),
            sharp_sup_all_t=local.extra["sharp_sup_all_t"],
            semigroup_constant=c_prime,
        ),
        global_=dict(
            {k: v for k, v in uncertainty.summary_dict(glob).items() if k not in ("K", "M", "hypothesis_margin")},
            rows=len(glob.rows),
            gamma_used=g_eff,
            local_constant_used=local_eff.paper_constant,
            local_at_gamma_used_pass=local_eff.all_pass,
            K_alpha_gamma=glob.extra["K_alpha_gamma"],
            derived_global_constant=glob.extra["derived_global_constant"],
        ),
        semigroup=sandwich,
    )
    summary["global"] = summary.pop("global_")
    code = EXIT_PASS if all_pass else EXIT_VIOLATION
    res = ScenarioResult(code, _clean(summary), local, glob, bundle, pair=pair)
    try:
        _write_files(out, res, local, glob, bundle, r_grid)
    except OSError as exc:
        res.exit_code = EXIT_IO
        res.message = f"cannot write outputs: {exc}"
    return res


def _ip0_rows(pair, couple, phi, r_grid):
    if not len(r_grid):
        return []
    f_kind, _ = uncertainty._norm_kinds(couple)
    counts, vals, _ = uncertainty.projector_norm_profile(pair.T_eff, f_kind, pair.excludes_ker_T, pair.kernel_tol)
    norms = uncertainty._profile_at(counts, vals, uncertainty._count_below(pair.T_eff, r_grid))
    return [(r, v, p) for r, v, p in zip(r_grid, norms, phi(r_grid))]


def emit_plotdata(
    report: uncertainty.InequalityReport | None,
    out_dir: str | os.PathLike,
    bundle: uncertainty.HypothesisBundle | None = None,
    pair: uncertainty.OperatorPair | None = None,
    r_grid=(),
) -> list[Path]:
    """Write plot_t_ratio.csv, plot_t_sharp.csv and plot_r_volume.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ratio_rows, sharp_rows, vol_rows = [], [], []
    if report is not None and report.rows:
        by_t: dict = {}
        for row in report.rows:
            by_t[row.t] = max(by_t.get(row.t, 0.0), row.ratio)
        ratio_rows = [(t, m) for t, m in by_t.items()]
        ts = report.extra.get("t_grid", [])
        sharp_rows = [(t, s, report.paper_constant) for t, s in zip(ts, report.extra.get("sharp_scaled", []))]
    if bundle is not None and pair is not None:
        vol_rows = _ip0_rows(pair, bundle.couple, bundle.phi, np.asarray(r_grid, dtype=float))
    files = []
    for name, header, rows in (
        ("plot_t_ratio.csv", ["t", "max_ratio"], ratio_rows),
        ("plot_t_sharp.csv", ["t", "sharp_constant_scaled", "paper_constant"], sharp_rows),
        ("plot_r_volume.csv", ["r", "projector_norm", "phi"], vol_rows),
    ):
        path = out / name
        path.write_text(_csv_text(header, rows))
        files.append(path)
    return files


def _write_files(out: Path, res: ScenarioResult, local, glob, bundle, r_grid):
    out.mkdir(parents=True, exist_ok=True)
    files = []
    p = out / "report_local.csv"
    p.write_text(uncertainty.report_to_csv(local))
    files.append(p)
    p = out / "report_global.csv"
    p.write_text(uncertainty.report_to_csv(glob))
    files.append(p)
    files += emit_plotdata(local, out, bundle, res.pair, r_grid)
    p = out / "summary.json"
    p.write_text(json.dumps(res.summary, indent=2, sort_keys=True) + "\n")
    files.append(p)
    res.files = [str(f) for f in files]


# ---------------------------------------------------------------- command line


def _parse_phi(text: str) -> dict:
    text = text.strip()
    if text.startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--phi is not valid JSON: {exc}") from None
    kind, _, rest = text.partition(":")
    spec: dict = {"kind": kind}
    for item in filter(None, rest.split(",")):
        key, _, val = item.partition("=")
        try:
            spec[key.strip()] = float(val)
        except ValueError:
            raise ConfigError(f"--phi parameter {item!r} is not key=number") from None
    return spec


def _cmd_verify(args) -> int:
    try:
        cfg = load_config(args.config)
        res = run_scenario(cfg, args.output_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except structures.CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    s = res.summary
    if res.exit_code == EXIT_HYPOTHESIS:
        print(f"hypothesis failure: {res.message}", file=sys.stderr)
    elif res.exit_code == EXIT_IO:
        print(res.message, file=sys.stderr)
    elif res.exit_code == EXIT_CAPACITY:
        print(f"capacity error: {res.message}", file=sys.stderr)
    else:
        print(
            f"{cfg.name}: all_pass={s['all_pass']} C={format_number(s['paper_constant'])} "
            f"max_ratio={format_number(s['max_ratio'])} K={format_number(s['K'])} M={format_number(s['M'])}"
        )
    return res.exit_code


def _cmd_oracle(args) -> int:
    if args.which == "lattice":
        v = analytics.lattice_projector_measure(args.n, args.r, args.resolution)
        print(format_number(v))
        return EXIT_PASS
    try:
        print(format_number(analytics.tree_gap(args.n)))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_PASS


def _cmd_admissible(args) -> int:
    try:
        phi = growth.growth_from_dict(_parse_phi(args.phi))
        a, b = _bound("interval a", args.interval[0]), _bound("interval b", args.interval[1])
        cert = growth.check_admissibility(phi, args.alpha, (a, b))
    except (ConfigError, growth.GrowthError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps(_clean(cert.to_dict()), sort_keys=True))
    return EXIT_PASS if cert.verdict == "holds" else EXIT_VIOLATION


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spectral-uncertainty", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run a scenario config")
    v.add_argument("config")
    v.add_argument("--output-dir", default=None)
    v.set_defaults(func=_cmd_verify)
    o = sub.add_parser("oracle", help="closed-form oracles")
    osub = o.add_subparsers(dest="which", required=True)
    ol = osub.add_parser("lattice", help="symbol sublevel measure")
    ol.add_argument("--n", type=int, required=True)
    ol.add_argument("--r", type=float, required=True)
    ol.add_argument("--resolution", type=int, default=None)
    ot = osub.add_parser("tree-gap", help="n - 2 sqrt(n - 1)")
    ot.add_argument("--n", type=int, required=True)
    o.set_defaults(func=_cmd_oracle)
    a = sub.add_parser("admissible", help="admissibility certificate for a growth function")
    a.add_argument("--phi", required=True, help='JSON spec or shorthand such as "power:d=2"')
    a.add_argument("--alpha", type=float, required=True)
    a.add_argument("--interval", nargs=2, required=True, metavar=("A", "B"))
    a.set_defaults(func=_cmd_admissible)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_PASS
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
