"""Brute-force staggered walk on the actual subset graph.

The graph has vertices (S, y) with S an r-subset of {1..n} and y outside
S; two vertices are adjacent iff they share S or share the union S + {y}.
Grouping by S gives the alpha tessellation (cliques of size n-r); grouping
by the union gives the beta tessellation (cliques of size r+1).  One walk
step reflects the state about the uniform superposition of every alpha
polygon, then of every beta polygon.  This simulator is dense and only
meant for small n, where it serves as the independent check of the
reduced model.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .combinatorics import (
    KDistinctnessInstance,
    ProblemParams,
    binomial,
    count_k_collisions,
    unique_colliding_set,
    vertex_count,
)

DEFAULT_CAP = 10**7
STATE_DUMP_VERSION = 1


def enumerate_vertices(params: ProblemParams, cap: int = DEFAULT_CAP):
    """Vertex table in lexicographic (S, y) order plus the reverse lookup."""
    total = vertex_count(params)
    if total > cap:
        raise MemoryError(f"vertex count {total} exceeds cap {cap}")
    n, r = params.n, params.r
    vertices: list[tuple[tuple[int, ...], int]] = []
    for s in combinations(range(1, n + 1), r):
        s_set = set(s)
        for y in range(1, n + 1):
            if y not in s_set:
                vertices.append((s, y))
    index = {v: i for i, v in enumerate(vertices)}
    return vertices, index


def build_tessellations(params: ProblemParams, vertices, index):
    """Polygon membership tables: one row of vertex ids per clique.

    Alpha rows are keyed by S (vertices are S-major contiguous in the
    table); beta rows are keyed by the (r+1)-element union, with members
    ordered by the position of the outgoing element within the sorted
    union.  That member order is relied on by the two-register simulator.
    """
    n, r = params.n, params.r
    n_alpha = binomial(n, r)
    alpha = np.arange(len(vertices), dtype=np.int64).reshape(n_alpha, n - r)
    beta_rows = []
    for t in combinations(range(1, n + 1), r + 1):
        row = [index[(t[:p] + t[p + 1 :], t[p])] for p in range(r + 1)]
        beta_rows.append(row)
    beta = np.array(beta_rows, dtype=np.int64)
    return alpha, beta


@dataclass
class WalkSpace:
    """Vertex table and both tessellations for one parameter set."""

    params: ProblemParams
    vertices: list[tuple[tuple[int, ...], int]]
    index: dict[tuple[tuple[int, ...], int], int]
    alpha_polygons: np.ndarray
    beta_polygons: np.ndarray

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def uniform_state(self) -> np.ndarray:
        state = np.full(self.n_vertices, 1.0 / np.sqrt(self.n_vertices), dtype=complex)
        return state


def build_walk_space(params: ProblemParams, cap: int = DEFAULT_CAP) -> WalkSpace:
    vertices, index = enumerate_vertices(params, cap)
    alpha, beta = build_tessellations(params, vertices, index)
    return WalkSpace(params, vertices, index, alpha, beta)


def apply_polygon_reflection(state: np.ndarray, polygons: np.ndarray) -> np.ndarray:
    """Reflect about the uniform superposition within every polygon.

    Equivalent to 2 * sum(|c><c|) - I over the polygon-uniform vectors;
    each amplitude becomes twice its polygon mean minus itself.
    """
    out = state.copy()
    vals = state[polygons]
    means = vals.mean(axis=1, keepdims=True)
    out[polygons] = 2.0 * means - vals
    return out


def subset_has_collision(values: tuple[int, ...], subset, k: int) -> bool:
    counts = Counter(values[i - 1] for i in subset)
    return any(c >= k for c in counts.values())


def marked_mask(space: WalkSpace, instance: KDistinctnessInstance) -> np.ndarray:
    """True at vertices whose subset contains any k equal values."""
    params = space.params
    n_alpha, width = space.alpha_polygons.shape
    mask = np.zeros(space.n_vertices, dtype=bool)
    for row in range(n_alpha):
        s = space.vertices[row * width][0]
        if subset_has_collision(instance.values, s, params.k):
            mask[row * width : (row + 1) * width] = True
    return mask


def apply_phase_flip(
    space: WalkSpace, state: np.ndarray, instance: KDistinctnessInstance
) -> np.ndarray:
    out = state.copy()
    out[marked_mask(space, instance)] *= -1.0
    return out


@dataclass
class FullRunResult:
    state: np.ndarray
    marked_probability: float
    t1: int
    t2: int


def run_full_algorithm(
    space: WalkSpace, instance: KDistinctnessInstance, t1: int, t2: int
) -> FullRunResult:
    """Evolve the uniform state by ((U_beta U_alpha)^t2 R)^t1 and score it."""
    if count_k_collisions(instance.values, space.params.k) == 0:
        raise ValueError("instance has no k-collision; nothing to search for")
    mask = marked_mask(space, instance)
    state = space.uniform_state()
    for _ in range(t1):
        state = state.copy()
        state[mask] *= -1.0
        for _ in range(t2):
            state = apply_polygon_reflection(state, space.alpha_polygons)
            state = apply_polygon_reflection(state, space.beta_polygons)
    p = float(np.sum(np.abs(state[mask]) ** 2))
    return FullRunResult(state=state, marked_probability=p, t1=t1, t2=t2)


def class_positions_for(space: WalkSpace, instance: KDistinctnessInstance) -> np.ndarray:
    """Overlap-class basis position of every vertex, for the unique collision."""
    k = space.params.k
    kset = set(unique_colliding_set(instance.values, k))
    pos = np.empty(space.n_vertices, dtype=np.int64)
    for i, (s, y) in enumerate(space.vertices):
        ell = len(kset.intersection(s))
        j = 1 if y in kset else 0
        pos[i] = 2 * ell + j  # (k, 0) lands at 2k, matching class_basis
    return pos


def project_onto_classes(
    space: WalkSpace, state: np.ndarray, instance: KDistinctnessInstance
):
    """Coefficients of the state on the class-uniform vectors, plus residual.

    Returns (coeffs, residual): coeffs[p] = <class p|state> with the
    class-uniform unit vectors, zero for an empty class; residual is the
    norm of the component outside the invariant subspace, computed from
    the explicit reconstruction.
    """
    k = space.params.k
    pos = class_positions_for(space, instance)
    dim = 2 * k + 1
    sums = np.zeros(dim, dtype=complex)
    np.add.at(sums, pos, state)
    counts = np.bincount(pos, minlength=dim).astype(float)
    scale = np.sqrt(np.where(counts > 0, counts, 1.0))
    coeffs = np.where(counts > 0, sums / scale, 0.0)
    # empty classes hold no vertices, so indexing by pos never reaches them
    recon = (coeffs / scale)[pos]
    residual = float(np.linalg.norm(state - recon))
    return coeffs, residual


def sample_measurement(
    space: WalkSpace, state: np.ndarray, instance: KDistinctnessInstance, seed: int
):
    """Draw one vertex from |amplitude|^2 and check its subset classically."""
    rng = np.random.default_rng(seed)
    probs = np.abs(state) ** 2
    cum = np.cumsum(probs)
    i = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    s, y = space.vertices[i]
    success = subset_has_collision(instance.values, s, space.params.k)
    return (s, y), success


def sample_success_count(
    space: WalkSpace,
    state: np.ndarray,
    instance: KDistinctnessInstance,
    seed: int,
    n_samples: int,
) -> int:
    """Number of successful draws among n_samples seeded measurements."""
    if n_samples == 0:
        return 0
    rng = np.random.default_rng(seed)
    probs = np.abs(state) ** 2
    cum = np.cumsum(probs)
    draws = np.searchsorted(cum, rng.random(n_samples) * cum[-1], side="right")
    mask = marked_mask(space, instance)
    return int(np.count_nonzero(mask[draws]))


def query_accounting(params: ProblemParams, t1: int, t2: int) -> tuple[int, int]:
    """(quantum, classical) query counts: r setup queries, two per walk
    step inside the main block, and r classical checks after measuring."""
    return params.r + 2 * t1 * t2, params.r


def dump_state(path, space: WalkSpace, state: np.ndarray) -> None:
    """JSON state dump: header plus (re, im) pairs in canonical vertex order."""
    payload = {
        "n": space.params.n,
        "k": space.params.k,
        "r": space.params.r,
        "format_version": STATE_DUMP_VERSION,
        "amplitudes": [[float(a.real), float(a.imag)] for a in state],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_state(path):
    """Inverse of dump_state: (header dict, complex amplitude vector)."""
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("format_version") != STATE_DUMP_VERSION:
        raise ValueError(f"unsupported state dump version {payload.get('format_version')}")
    amps = np.array([complex(re, im) for re, im in payload["amplitudes"]])
    header = {key: payload[key] for key in ("n", "k", "r", "format_version")}
    return header, amps


def vertices_adjacent(v1, v2) -> bool:
    s1, y1 = v1
    s2, y2 = v2
    if v1 == v2:
        return False
    return s1 == s2 or set(s1) | {y1} == set(s2) | {y2}


def tessellations_cover_edges(space: WalkSpace) -> bool:
    """Every graph edge lies inside an alpha or a beta polygon.

    Quadratic in the vertex count; intended for n <= 7 validation runs.
    """
    poly_alpha = {}
    poly_beta = {}
    for row in range(space.alpha_polygons.shape[0]):
        for v in space.alpha_polygons[row]:
            poly_alpha[int(v)] = row
    for row in range(space.beta_polygons.shape[0]):
        for v in space.beta_polygons[row]:
            poly_beta[int(v)] = row
    nv = space.n_vertices
    for i in range(nv):
        for jdx in range(i + 1, nv):
            if vertices_adjacent(space.vertices[i], space.vertices[jdx]):
                if poly_alpha[i] != poly_alpha[jdx] and poly_beta[i] != poly_beta[jdx]:
                    return False
            else:
                # polygons are cliques: co-members must be adjacent
                if poly_alpha[i] == poly_alpha[jdx] or poly_beta[i] == poly_beta[jdx]:
                    return False
    return True


def reduced_full_deviation(
    space: WalkSpace, instance: KDistinctnessInstance, t1: int, t2: int
) -> float:
    """Max componentwise gap between projected full and reduced states.

    Runs the full algorithm and the reduced one side by side, comparing
    after every single operator application (phase flip, alpha
    reflection, beta reflection), and folds the subspace residual into
    the reported deviation.
    """
    from .reduced import build_reduced_walk, initial_reduced_state

    walk = build_reduced_walk(space.params)
    red = initial_reduced_state(space.params)
    full = space.uniform_state()
    mask = marked_mask(space, instance)

    worst = 0.0

    def compare(f, v):
        coeffs, residual = project_onto_classes(space, f, instance)
        return max(float(np.max(np.abs(coeffs - v))), residual)

    worst = max(worst, compare(full, red))
    for _ in range(t1):
        full = full.copy()
        full[mask] *= -1.0
        red = walk.r_matrix @ red
        worst = max(worst, compare(full, red))
        for _ in range(t2):
            full = apply_polygon_reflection(full, space.alpha_polygons)
            red = walk.u_alpha @ red
            worst = max(worst, compare(full, red))
            full = apply_polygon_reflection(full, space.beta_polygons)
            red = walk.u_beta @ red
            worst = max(worst, compare(full, red))
    return worst
