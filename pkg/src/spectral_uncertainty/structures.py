"""Finite graphs rooted at a vertex: tori, tree balls, paths, lattice boxes.

Each builder returns an immutable :class:`StructureModel` carrying the
adjacency matrix, graph distances from the root and vertex degrees.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .speccore import SymmetricOperator

__all__ = [
    "CapacityError",
    "StructureError",
    "DegreeError",
    "TransformError",
    "StructureModel",
    "DistanceTransform",
    "DEFAULT_SIZE_CAP",
    "build_cycle_torus",
    "build_tree_ball",
    "build_path",
    "build_lattice_box",
    "build_custom",
    "tree_ball_size",
    "bfs_distances",
    "adjacency_laplacian",
    "transition_laplacian",
    "distance_operator",
    "ball_volume",
    "identity_transform",
    "power_shift_transform",
    "exp_scaled_transform",
    "symmetric_space_transform",
    "structure_to_json",
    "structure_from_json",
]

DEFAULT_SIZE_CAP = 4096
KINDS = ("cycle_torus", "tree_ball", "path", "lattice_box", "custom")


class CapacityError(ValueError):
    pass


class StructureError(ValueError):
    pass


class DegreeError(ValueError):
    pass


class TransformError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class StructureModel:
    kind: str
    adjacency: np.ndarray
    root_index: int
    distance: np.ndarray
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise StructureError(f"unknown structure kind {self.kind!r}")
        adj = np.array(self.adjacency, dtype=np.int64)
        dist = np.array(self.distance, dtype=np.int64)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] < 1:
            raise StructureError("adjacency must be a non-empty square matrix")
        if np.any(adj < 0) or np.any(adj != adj.T):
            raise StructureError("adjacency must be symmetric and nonnegative")
        if dist.shape != (adj.shape[0],) or dist[self.root_index] != 0:
            raise StructureError("distance vector must have distance[root] = 0")
        adj.setflags(write=False)
        dist.setflags(write=False)
        deg = adj.sum(axis=1)
        deg.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "distance", dist)
        object.__setattr__(self, "degree", deg)

    @property
    def vertex_count(self) -> int:
        return self.adjacency.shape[0]

    @property
    def is_homogeneous(self) -> bool:
        return bool(np.all(self.degree == self.degree[0]))


def _check_cap(count, size_cap):
    if count > size_cap:
        raise CapacityError(f"structure needs {count} vertices, size cap is {size_cap}")


def bfs_distances(adjacency: np.ndarray, root: int) -> np.ndarray:
    """Graph distance from ``root``; raises StructureError if disconnected."""
    n = adjacency.shape[0]
    nbrs = [np.flatnonzero(adjacency[u]) for u in range(n)]
    dist = np.full(n, -1, dtype=np.int64)
    dist[root] = 0
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in nbrs[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    if np.any(dist < 0):
        raise StructureError("graph is not connected to the root")
    return dist


def build_cycle_torus(dims: int, side: int, size_cap: int = DEFAULT_SIZE_CAP) -> StructureModel:
    """(Z/NZ)^n with nearest-neighbour edges, rooted at the origin."""
    if dims < 1 or side < 3:
        raise StructureError("torus needs dims >= 1 and side >= 3")
    count = side**dims
    _check_cap(count, size_cap)
    coords = np.array(list(itertools.product(range(side), repeat=dims)), dtype=np.int64)
    strides = side ** np.arange(dims - 1, -1, -1)
    adj = np.zeros((count, count), dtype=np.int64)
    for axis in range(dims):
        for step in (1, -1):
            nb = coords.copy()
            nb[:, axis] = (nb[:, axis] + step) % side
            adj[np.arange(count), nb @ strides] = 1
    wrap = np.minimum(coords, side - coords)
    return StructureModel(
        "cycle_torus", adj, 0, wrap.sum(axis=1), {"dims": dims, "side": side}
    )


def tree_ball_size(branching_degree: int, radius: int) -> int:
    n = branching_degree
    if radius == 0:
        return 1
    return 1 + n * ((n - 1) ** radius - 1) // (n - 2)


def build_tree_ball(
    branching_degree: int, radius: int, size_cap: int = DEFAULT_SIZE_CAP
) -> StructureModel:
    """Ball of radius R about a vertex of the n-regular tree (n >= 3).

    Vertices are numbered level by level; leaves have degree 1.
    """
    n = branching_degree
    if n < 3 or radius < 0:
        raise StructureError("tree ball needs branching degree >= 3 and radius >= 0")
    count = tree_ball_size(n, radius)
    _check_cap(count, size_cap)
    adj = np.zeros((count, count), dtype=np.int64)
    dist = np.zeros(count, dtype=np.int64)
    level = [0]
    nxt = 1
    for depth in range(1, radius + 1):
        new_level = []
        for u in level:
            for _ in range(n if u == 0 else n - 1):
                adj[u, nxt] = adj[nxt, u] = 1
                dist[nxt] = depth
                new_level.append(nxt)
                nxt += 1
        level = new_level
    return StructureModel(
        "tree_ball", adj, 0, dist, {"branching_degree": n, "radius": radius}
    )


def build_path(length: int, root: int = 0, size_cap: int = DEFAULT_SIZE_CAP) -> StructureModel:
    """Path graph on ``length`` vertices."""
    if length < 1:
        raise StructureError("path needs at least one vertex")
    _check_cap(length, size_cap)
    adj = np.zeros((length, length), dtype=np.int64)
    idx = np.arange(length - 1)
    adj[idx, idx + 1] = adj[idx + 1, idx] = 1
    return StructureModel(
        "path", adj, root, np.abs(np.arange(length) - root), {"length": length, "root": root}
    )


def build_lattice_box(
    dims: int, half_width: int, size_cap: int = DEFAULT_SIZE_CAP
) -> StructureModel:
    """Box [-W, W]^n of Z^n with nearest-neighbour edges, rooted at the origin."""
    if dims < 1 or half_width < 0:
        raise StructureError("lattice box needs dims >= 1 and half_width >= 0")
    side = 2 * half_width + 1
    count = side**dims
    _check_cap(count, size_cap)
    coords = np.array(list(itertools.product(range(side), repeat=dims)), dtype=np.int64)
    strides = side ** np.arange(dims - 1, -1, -1)
    adj = np.zeros((count, count), dtype=np.int64)
    for axis in range(dims):
        inner = coords[:, axis] < side - 1
        src = np.flatnonzero(inner)
        nb = coords[inner].copy()
        nb[:, axis] += 1
        dst = nb @ strides
        adj[src, dst] = adj[dst, src] = 1
    root = int(np.full(dims, half_width) @ strides)
    dist = np.abs(coords - half_width).sum(axis=1)
    return StructureModel(
        "lattice_box", adj, root, dist, {"dims": dims, "half_width": half_width}
    )


def build_custom(adjacency, root: int = 0, size_cap: int = DEFAULT_SIZE_CAP) -> StructureModel:
    adj = np.asarray(adjacency)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise StructureError("adjacency must be square")
    if not np.all(adj == np.round(adj)):
        raise StructureError("adjacency must have integer entries")
    adj = adj.astype(np.int64)
    _check_cap(adj.shape[0], size_cap)
    return StructureModel("custom", adj, root, bfs_distances(adj, root), {"root": root})


def adjacency_laplacian(s: StructureModel, boundary: str = "free") -> SymmetricOperator:
    """D - A.

    ``boundary="dirichlet"`` replaces D by deg(G) I, where deg(G) is the
    largest degree: the compression to the vertex set of the Laplacian of the
    ambient homogeneous graph (for a tree ball, n I - A).
    """
    a = s.adjacency.astype(float)
    if boundary == "free":
        d = s.degree.astype(float)
    elif boundary == "dirichlet":
        d = np.full(s.vertex_count, float(_ambient_degree(s)))
    else:
        raise ValueError(f"unknown boundary {boundary!r}")
    return SymmetricOperator(np.diag(d) - a)


def _ambient_degree(s):
    if s.kind == "tree_ball":
        return s.parameters["branching_degree"]
    return int(s.degree.max())


def transition_laplacian(s: StructureModel) -> SymmetricOperator:
    """I - P, symmetrized as I - D^{-1/2} A D^{-1/2} when degrees vary."""
    if np.any(s.degree == 0):
        bad = int(np.flatnonzero(s.degree == 0)[0])
        raise DegreeError(f"vertex {bad} is isolated; transition matrix undefined")
    a = s.adjacency.astype(float)
    n = s.vertex_count
    if s.is_homogeneous:
        return SymmetricOperator(np.eye(n) - a / float(s.degree[0]))
    inv = 1.0 / np.sqrt(s.degree.astype(float))
    return SymmetricOperator(np.eye(n) - inv[:, None] * a * inv[None, :])


@dataclass(frozen=True, eq=False)
class DistanceTransform:
    """Nondecreasing, nonnegative map applied to root distances."""

    kind: str
    parameters: tuple = ()
    func: Callable | None = None

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.kind == "identity":
            return rho.copy()
        if self.kind == "power_shift":
            (sigma,) = self.parameters
            return rho * (1.0 + rho) ** sigma
        if self.kind == "exp_scaled":
            c, shift = self.parameters
            return np.exp(c * rho) - shift
        if self.kind == "general":
            return np.asarray(self.func(rho), dtype=float)
        raise TransformError(f"unknown transform kind {self.kind!r}")

    def validate(self, rho_max: float = 64.0, samples: int = 1025) -> None:
        """Check monotonicity and nonnegativity on a sample grid of [0, rho_max]."""
        grid = np.linspace(0.0, rho_max, samples)
        vals = self(grid)
        if np.any(vals < 0):
            raise TransformError(
                f"transform is negative at rho = {grid[np.argmax(vals < 0)]:.6g}"
            )
        drop = np.diff(vals) < -1e-12 * np.maximum(1.0, np.abs(vals[1:]))
        if np.any(drop):
            raise TransformError(
                f"transform decreases near rho = {grid[1:][np.argmax(drop)]:.6g}"
            )

    def to_dict(self) -> dict:
        if self.kind == "general":
            raise TransformError("general transforms are not serializable")
        return {"kind": self.kind, "parameters": list(self.parameters)}


def identity_transform() -> DistanceTransform:
    return DistanceTransform("identity")


def power_shift_transform(sigma: float) -> DistanceTransform:
    """rho (1 + rho)^sigma."""
    return DistanceTransform("power_shift", (float(sigma),))


def exp_scaled_transform(c: float, shift: int = 0) -> DistanceTransform:
    """exp(c rho) - shift, shift in {0, 1}."""
    if shift not in (0, 1):
        raise TransformError("exp_scaled shift must be 0 or 1")
    return DistanceTransform("exp_scaled", (float(c), shift))


def symmetric_space_transform(rank: int, indivisible: int, root_sum_norm: float) -> DistanceTransform:
    """(1 + rho)^{(k-1)/(2(k+2s))} exp(l rho / (k+2s)) - 1."""
    k, s, l = rank, indivisible, root_sum_norm
    e1 = (k - 1) / (2.0 * (k + 2 * s))
    e2 = l / (k + 2 * s)

    def f(rho):
        return (1.0 + rho) ** e1 * np.exp(e2 * rho) - 1.0

    return DistanceTransform("general", (k, s, l), f)


def transform_from_dict(spec: dict | None) -> DistanceTransform:
    if spec is None:
        return identity_transform()
    kind = spec.get("kind", "identity")
    params = spec.get("parameters", [])
    if kind == "identity":
        return identity_transform()
    if kind == "power_shift":
        return power_shift_transform(*params)
    if kind == "exp_scaled":
        return exp_scaled_transform(*params)
    raise TransformError(f"transform kind {kind!r} cannot be built from a config")


def distance_operator(s: StructureModel, transform: DistanceTransform | None = None) -> SymmetricOperator:
    """diag(transform(distance))."""
    transform = transform or identity_transform()
    vals = transform(s.distance.astype(float))
    if np.any(vals < 0):
        v = int(np.flatnonzero(vals < 0)[0])
        raise TransformError(
            f"transform is negative ({vals[v]:.6g}) at distance {int(s.distance[v])}"
        )
    return SymmetricOperator(np.diag(vals))


def ball_volume(s: StructureModel, r: float, transform: DistanceTransform | None = None) -> int:
    """Number of vertices with (transformed) distance < r."""
    d = s.distance.astype(float) if transform is None else transform(s.distance.astype(float))
    return int(np.count_nonzero(d < r))


def structure_to_json(s: StructureModel) -> str:
    i, j = np.nonzero(s.adjacency)
    triplets = [[int(a), int(b), int(w)] for a, b, w in zip(i, j, s.adjacency[i, j])]
    doc = {
        "kind": s.kind,
        "parameters": s.parameters,
        "adjacency": triplets,
        "vertex_count": s.vertex_count,
        "root": int(s.root_index),
        "distances": s.distance.tolist(),
    }
    return json.dumps(doc, sort_keys=True)


def structure_from_json(text: str) -> StructureModel:
    doc = json.loads(text)
    n = int(doc["vertex_count"])
    adj = np.zeros((n, n), dtype=np.int64)
    for a, b, w in doc["adjacency"]:
        adj[a, b] = w
    dist = doc.get("distances")
    if dist is None:
        dist = bfs_distances(adj, int(doc["root"]))
    return StructureModel(doc["kind"], adj, int(doc["root"]), dist, doc.get("parameters", {}))


def kappa(branching_degree: int) -> float:
    """log(n - 1), the exponential volume growth rate of the n-regular tree."""
    return math.log(branching_degree - 1)
