"""
Seeded synthetic source networks.

Three families cover the analytical cases the sampler is checked against:
Poisson degrees (``erdos_renyi``), a truncated power law wired by the
configuration model (``powerlaw_config``), and a high-clustering ring lattice
with random rewiring (``ring_rewire``). Every generator is a pure function of
its spec, seed included.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import GenerationFailed
from .graph import Graph, build_graph, degree_stats

FAMILIES = ("erdos_renyi", "powerlaw_config", "ring_rewire")
MAX_REPAIR_ATTEMPTS = 100


@dataclass(frozen=True)
class GeneratorSpec:
    """
    Generator family, size, parameters and seed.

    ``params`` keys by family:

    * ``erdos_renyi``: ``mean_degree``
    * ``powerlaw_config``: ``gamma``, ``k_min``, optional ``k_max``
      (defaults to the structural cutoff ``sqrt(n * k_min)``)
    * ``ring_rewire``: ``k`` (even), ``beta``
    """

    family: str
    node_count: int
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        validate_spec(self)

    def to_dict(self) -> dict:
        return asdict(self)


def validate_spec(spec: GeneratorSpec) -> None:
    n, p = spec.node_count, spec.params
    if spec.family not in FAMILIES:
        raise ValueError(f"unknown family {spec.family!r}; expected one of {FAMILIES}")
    if n < 1:
        raise ValueError("node_count must be positive")
    if spec.family == "erdos_renyi":
        if not p.get("mean_degree", 0) > 0:
            raise ValueError("erdos_renyi needs mean_degree > 0")
    elif spec.family == "powerlaw_config":
        gamma, k_min = p.get("gamma"), p.get("k_min", 1)
        k_max = powerlaw_kmax(n, p)
        if gamma is None or gamma <= 1:
            raise ValueError("powerlaw_config needs gamma > 1")
        if not 1 <= k_min <= k_max < n:
            raise ValueError("powerlaw_config needs 1 <= k_min <= k_max < node_count")
    else:
        k, beta = p.get("k"), p.get("beta", 0.0)
        if k is None or k % 2 or k <= 0 or k >= n:
            raise ValueError("ring_rewire needs an even k with 0 < k < node_count")
        if not 0 <= beta <= 1:
            raise ValueError("ring_rewire needs 0 <= beta <= 1")


def powerlaw_kmax(n: int, params: dict) -> int:
    k_max = params.get("k_max")
    if k_max is None:
        k_max = int(math.sqrt(n * params.get("k_min", 1)))
    return int(k_max)


def truncated_powerlaw_pmf(gamma: float, k_min: int, k_max: int) -> np.ndarray:
    """``p(k) ∝ k**-gamma`` on ``k_min..k_max``, as an array indexed by degree."""
    if gamma <= 1:
        raise ValueError("gamma must exceed 1")
    if k_min > k_max or k_min < 1:
        raise ValueError("need 1 <= k_min <= k_max")
    k = np.arange(k_min, k_max + 1, dtype=np.float64)
    w = k ** -gamma
    pmf = np.zeros(k_max + 1)
    pmf[k_min:] = w / w.sum()
    return pmf


def truncated_powerlaw_moments(gamma: float, k_min: int, k_max: int) -> tuple[float, float]:
    """First and second moments of the truncated power law by direct summation."""
    pmf = truncated_powerlaw_pmf(gamma, k_min, k_max)
    k = np.arange(len(pmf), dtype=np.float64)
    return float(np.dot(pmf, k)), float(np.dot(pmf, k * k))


def generate(spec: GeneratorSpec) -> Graph:
    rng = np.random.default_rng(spec.seed)
    if spec.family == "erdos_renyi":
        return _erdos_renyi(spec.node_count, spec.params["mean_degree"], rng)
    if spec.family == "powerlaw_config":
        p = spec.params
        return _powerlaw_config(spec.node_count, p["gamma"], p.get("k_min", 1),
                                powerlaw_kmax(spec.node_count, p), rng)
    return _ring_rewire(spec.node_count, spec.params["k"], spec.params.get("beta", 0.0), rng)


def _erdos_renyi(n: int, mean_degree: float, rng: np.random.Generator) -> Graph:
    # G(n, p): draw the binomial edge count, then that many distinct pairs
    pairs_total = n * (n - 1) // 2
    p = min(1.0, mean_degree / (n - 1)) if n > 1 else 0.0
    m = int(rng.binomial(pairs_total, p)) if n > 1 else 0
    chosen = np.empty(0, dtype=np.int64)
    while len(chosen) < m:
        need = m - len(chosen)
        draw = rng.integers(0, pairs_total, size=need + need // 10 + 16)
        merged = np.concatenate([chosen, draw])
        _, first = np.unique(merged, return_index=True)
        # keep first occurrences in draw order so the result depends only on the seed
        chosen = merged[np.sort(first)][:m]
    u, v = _pair_from_index(chosen, n)
    return build_graph(np.column_stack([u, v]), directed=False, node_count=n)


def _pair_from_index(idx: np.ndarray, n: int):
    """Invert the row-major enumeration of pairs ``u < v`` over ``n`` nodes."""
    idx = idx.astype(np.int64)
    # row u starts at offset u*n - u*(u+1)/2
    b = 2 * n - 1
    u = np.floor((b - np.sqrt(b * b - 8.0 * idx)) / 2).astype(np.int64)
    start = u * n - u * (u + 1) // 2
    # floating-point guard on the row estimate
    too_far = start > idx
    u[too_far] -= 1
    start = u * n - u * (u + 1) // 2
    next_start = (u + 1) * n - (u + 1) * (u + 2) // 2
    short = idx >= next_start
    u[short] += 1
    start = u * n - u * (u + 1) // 2
    v = idx - start + u + 1
    return u, v


def _powerlaw_config(n, gamma, k_min, k_max, rng) -> Graph:
    pmf = truncated_powerlaw_pmf(gamma, k_min, k_max)
    support = np.arange(len(pmf))
    degrees = rng.choice(support, size=n, p=pmf)
    for _ in range(MAX_REPAIR_ATTEMPTS):
        if degrees.sum() % 2 == 0:
            break
        i = rng.integers(n)
        degrees[i] = rng.choice(support, p=pmf)
    else:
        raise GenerationFailed("could not reach an even degree sum")
    stubs = np.repeat(np.arange(n, dtype=np.int64), degrees)
    rng.shuffle(stubs)
    pairs = stubs.reshape(-1, 2)
    # self-loops and multi-edges are erased by build_graph
    return build_graph(pairs, directed=False, node_count=n)


def _ring_rewire(n, k, beta, rng) -> Graph:
    half = k // 2
    u = np.repeat(np.arange(n, dtype=np.int64), half)
    v = (u + np.tile(np.arange(1, half + 1), n)) % n
    rewire = rng.random(len(u)) < beta
    if not rewire.any():
        return build_graph(np.column_stack([u, v]), directed=False, node_count=n)

    def key(a, b):
        return (min(a, b), max(a, b))

    present = {key(a, b) for a, b in zip(u.tolist(), v.tolist())}
    v = v.copy()
    for e in np.flatnonzero(rewire):
        a, b = int(u[e]), int(v[e])
        for _ in range(MAX_REPAIR_ATTEMPTS):
            c = int(rng.integers(n))
            if c != a and key(a, c) not in present:
                break
        else:
            continue  # saturated neighbourhood; keep the lattice edge
        present.discard(key(a, b))
        present.add(key(a, c))
        v[e] = c
    return build_graph(np.column_stack([u, v]), directed=False, node_count=n)


def realized_summary(g: Graph) -> dict:
    ds = degree_stats(g)
    return {
        "node_count": g.node_count,
        "edge_count": g.edge_count,
        "mean_k": ds.mean_k,
        "mean_k2": ds.mean_k2,
        "max_degree": int(len(ds.out_pmf) - 1),
    }
