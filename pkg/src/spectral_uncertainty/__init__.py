"""Numerical verification of spectral uncertainty inequalities for pairs of
positive operators on graphs (Laplacians against distance multipliers)."""

from .kernels import BACKEND
from .speccore import (
    SpectralDecomposition,
    SymmetricOperator,
    eigendecompose,
    norm_1_to_2,
    norm_1_to_inf,
    norm_inf_to_1,
    spectral_projector,
)
from .structures import (
    StructureModel,
    adjacency_laplacian,
    build_cycle_torus,
    build_tree_ball,
    distance_operator,
)
from .growth import GrowthFunction, check_admissibility, growth_from_dict, power_growth
from .uncertainty import (
    OperatorPair,
    global_constants,
    local_constant,
    verify_global,
    verify_hypotheses,
    verify_local,
)
from .cli import ScenarioConfig, load_config, run_scenario

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "GrowthFunction",
    "OperatorPair",
    "ScenarioConfig",
    "SpectralDecomposition",
    "StructureModel",
    "SymmetricOperator",
    "adjacency_laplacian",
    "build_cycle_torus",
    "build_tree_ball",
    "check_admissibility",
    "distance_operator",
    "eigendecompose",
    "global_constants",
    "growth_from_dict",
    "load_config",
    "local_constant",
    "norm_1_to_2",
    "norm_1_to_inf",
    "norm_inf_to_1",
    "power_growth",
    "run_scenario",
    "spectral_projector",
    "verify_global",
    "verify_hypotheses",
    "verify_local",
]
