"""Graph instance sets: enumeration, isomorphism-free sampling, edge weights, persistence.

Graphs are simple, undirected, 0-indexed. A graph on n vertices is encoded as an
upper-triangular adjacency bitmask: pair (u, v) with u < v occupies bit
``pair_index(u, v)``, pairs ordered (0,1), (0,2), ..., (0,n-1), (1,2), ...
Isomorphism classes are identified by the minimum bitmask over all vertex
relabelings (the canonical key).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_VERTICES = 16
MAX_CANONICAL_VERTICES = 10  # canonical key searches all n! relabelings
MAX_ENUMERATION_VERTICES = 7

GRAPH_SET_HEADER = "# graph-set v1"


class GraphFormatError(ValueError):
    """Raised when a graph-set file cannot be parsed; message carries the line number."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: vertex count and a frozenset of (u, v) pairs with u < v."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_VERTICES:
            raise ValueError(f"vertex count must be in 1..{MAX_VERTICES}, got {self.n}")
        object.__setattr__(self, "edges", frozenset(self.edges))
        for e in self.edges:
            u, v = e
            if not (0 <= u < v < self.n):
                raise ValueError(f"edge {e} is not a valid pair with u < v < n={self.n}")

    @property
    def m(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


@dataclass(frozen=True)
class WeightedGraph:
    """Graph with a strictly positive weight per edge (all 1.0 in the unweighted case)."""

    graph: Graph
    weights: dict[tuple[int, int], float]

    def __post_init__(self):
        if set(self.weights) != self.graph.edges:
            raise ValueError("weights must have exactly one entry per edge")
        for e, w in self.weights.items():
            if not (w > 0 and np.isfinite(w)):
                raise ValueError(f"weight of edge {e} must be a finite positive real, got {w}")

    @property
    def total_weight(self) -> float:
        return float(sum(self.weights.values()))

    def weight_list(self) -> list[float]:
        """Weights in sorted-edge order."""
        return [self.weights[e] for e in self.graph.sorted_edges()]


@dataclass(frozen=True, order=True)
class CanonicalKey:
    """Isomorphism-class identifier: minimal adjacency bitmask over all relabelings."""

    n: int
    bits: int

    def id_string(self) -> str:
        # fixed widths so lexicographic order matches (n, bits) order
        return f"n{self.n:02d}k{self.bits:012x}"


def unit_weights(g: Graph) -> WeightedGraph:
    return WeightedGraph(g, {e: 1.0 for e in g.edges})


@lru_cache(maxsize=None)
def _pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((u, v) for u in range(n) for v in range(u + 1, n))


@lru_cache(maxsize=None)
def _pair_index(n: int) -> dict[tuple[int, int], int]:
    return {uv: k for k, uv in enumerate(_pairs(n))}


def graph_to_mask(g: Graph) -> int:
    idx = _pair_index(g.n)
    mask = 0
    for e in g.edges:
        mask |= 1 << idx[e]
    return mask


def graph_from_mask(n: int, mask: int) -> Graph:
    pairs = _pairs(n)
    return Graph(n, frozenset(pairs[k] for k in range(len(pairs)) if (mask >> k) & 1))


def is_connected(g: Graph) -> bool:
    """True iff every vertex is reachable from vertex 0."""
    adj = [0] * g.n
    for u, v in g.edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    reach = 1
    frontier = 1
    while frontier:
        nxt = 0
        while frontier:
            v = (frontier & -frontier).bit_length() - 1
            frontier &= frontier - 1
            nxt |= adj[v]
        frontier = nxt & ~reach
        reach |= frontier
    return reach == (1 << g.n) - 1


@lru_cache(maxsize=8)
def _perm_bit_weights(n: int) -> np.ndarray:
    """(n!, C(n,2)) table: entry [p, k] is the destination bit of pair k under permutation p."""
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    pairs = _pairs(n)
    pair_idx = np.zeros((n, n), dtype=np.int64)
    for k, (u, v) in enumerate(pairs):
        pair_idx[u, v] = pair_idx[v, u] = k
    weights = np.empty((len(perms), len(pairs)), dtype=np.uint64)
    for k, (u, v) in enumerate(pairs):
        dest = pair_idx[perms[:, u], perms[:, v]]
        weights[:, k] = np.uint64(1) << dest.astype(np.uint64)
    return weights


def _orbit_masks(n: int, mask: int) -> np.ndarray:
    """All n! relabelings of `mask` as a uint64 vector (with repeats for automorphisms)."""
    weights = _perm_bit_weights(n)
    acc = np.zeros(weights.shape[0], dtype=np.uint64)
    k = 0
    m = mask
    while m:
        if m & 1:
            acc |= weights[:, k]
        m >>= 1
        k += 1
    return acc


def canonical_key(g: Graph) -> CanonicalKey:
    """Minimum adjacency bitmask over all n! relabelings; equal keys iff isomorphic."""
    if g.n > MAX_CANONICAL_VERTICES:
        raise ValueError(
            f"canonical key supports at most {MAX_CANONICAL_VERTICES} vertices, got {g.n}"
        )
    mask = graph_to_mask(g)
    if g.n <= 8:
        return CanonicalKey(g.n, int(_orbit_masks(g.n, mask).min()))
    # n = 9, 10: too large to cache the full table; sweep permutations in chunks
    pairs = _pairs(g.n)
    pair_idx = _pair_index(g.n)
    best = mask
    for perm in itertools.permutations(range(g.n)):
        permuted = 0
        m = mask
        k = 0
        while m:
            if m & 1:
                u, v = pairs[k]
                pu, pv = perm[u], perm[v]
                permuted |= 1 << pair_idx[(pu, pv) if pu < pv else (pv, pu)]
            m >>= 1
            k += 1
        if permuted < best:
            best = permuted
    return CanonicalKey(g.n, best)


def _connected_masks(n: int) -> np.ndarray:
    """All edge bitmasks of connected n-vertex graphs, ascending (vectorized BFS)."""
    npairs = n * (n - 1) // 2
    masks = np.arange(1 << npairs, dtype=np.uint32)
    adj = np.zeros((n, masks.size), dtype=np.uint16)
    for k, (u, v) in enumerate(_pairs(n)):
        bit = ((masks >> np.uint32(k)) & np.uint32(1)).astype(np.uint16)
        adj[u] |= bit << np.uint16(v)
        adj[v] |= bit << np.uint16(u)
    reach = np.ones(masks.size, dtype=np.uint16)
    for _ in range(n - 1):
        grown = reach.copy()
        for v in range(n):
            sel = (reach >> np.uint16(v)) & np.uint16(1)
            grown |= adj[v] * sel
        if np.array_equal(grown, reach):
            break
        reach = grown
    return masks[reach == np.uint16((1 << n) - 1)]


@lru_cache(maxsize=None)
def _enumerate_cached(n: int) -> tuple[int, ...]:
    conn = _connected_masks(n)
    weights = _perm_bit_weights(n)
    seen = np.zeros(1 << (n * (n - 1) // 2), dtype=bool)
    reps: list[int] = []
    for m in conn:
        m = int(m)
        if seen[m]:
            continue
        # ascending sweep: the smallest unseen mask is the minimum of its orbit,
        # i.e. the canonical key of its isomorphism class
        orbit = np.zeros(weights.shape[0], dtype=np.uint64)
        k = 0
        rest = m
        while rest:
            if rest & 1:
                orbit |= weights[:, k]
            rest >>= 1
            k += 1
        seen[orbit.astype(np.int64)] = True
        reps.append(m)
    return tuple(reps)


def enumerate_connected_nonisomorphic(n: int) -> list[Graph]:
    """One representative per isomorphism class of connected n-vertex graphs.

    Representatives are the canonical-key masks themselves, returned in ascending
    key order. Exhaustive over all 2^C(n,2) edge sets, so n is capped at
    MAX_ENUMERATION_VERTICES.
    """
    if not 2 <= n <= MAX_ENUMERATION_VERTICES:
        raise ValueError(f"enumeration supports 2..{MAX_ENUMERATION_VERTICES} vertices, got {n}")
    return [graph_from_mask(n, m) for m in _enumerate_cached(n)]


def sample_connected_nonisomorphic(
    n: int, count: int, seed: int, attempt_budget: int | None = None
) -> list[Graph]:
    """`count` pairwise non-isomorphic connected n-vertex graphs via rejection sampling.

    Uniform random edge masks are filtered to connected graphs and deduplicated by
    canonical key, so the distribution is labeled-uniform, not uniform over
    isomorphism classes. Deterministic given `seed`. Raises if `count` distinct
    classes are not found within the attempt budget.
    """
    if not 2 <= n <= MAX_CANONICAL_VERTICES:
        raise ValueError(f"sampling supports 2..{MAX_CANONICAL_VERTICES} vertices, got {n}")
    if count < 1:
        raise ValueError("count must be >= 1")
    if attempt_budget is None:
        attempt_budget = max(10_000, 200 * count)
    npairs = n * (n - 1) // 2
    rng = np.random.default_rng(seed)
    found: dict[int, int] = {}  # canonical bits -> first sampled mask
    attempts = 0
    while len(found) < count and attempts < attempt_budget:
        mask = int(rng.integers(0, 1 << npairs))
        attempts += 1
        g = graph_from_mask(n, mask)
        if not is_connected(g):
            continue
        key = canonical_key(g)
        if key.bits not in found:
            found[key.bits] = key.bits
    if len(found) < count:
        raise ValueError(
            f"found only {len(found)} of {count} connected non-isomorphic graphs on "
            f"{n} vertices within {attempt_budget} attempts"
        )
    chosen = list(found.values())[:count]
    return [graph_from_mask(n, m) for m in chosen]


def assign_random_weights(g: Graph, seed: int) -> WeightedGraph:
    """Independent uniform weights on (0, 1] per edge, in sorted-edge order; pure in (g, seed)."""
    rng = np.random.default_rng(seed)
    draws = 1.0 - rng.random(g.m)  # rng.random is [0, 1), so weights land in (0, 1]
    return WeightedGraph(g, {e: float(w) for e, w in zip(g.sorted_edges(), draws)})


def save_graph_set(path, graphs: list[WeightedGraph], timestamp: str | None = None) -> None:
    """Write a graph set as line-oriented text; see `load_graph_set` for the format."""
    lines = [GRAPH_SET_HEADER]
    if timestamp:
        lines.append(f"# generated {timestamp}")
    for wg in graphs:
        lines.append("")
        lines.append(f"{wg.graph.n} {wg.graph.m}")
        for u, v in wg.graph.sorted_edges():
            lines.append(f"{u} {v} {wg.weights[(u, v)]!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_graph_set(path) -> list[WeightedGraph]:
    """Parse a graph-set file: records of `n m` then m lines `u v w`, blank-line
    separated, `#` comments allowed. Raises GraphFormatError naming the offending line."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.read().splitlines()

    graphs: list[WeightedGraph] = []
    i = 0

    def fail(lineno: int, msg: str):
        raise GraphFormatError(f"{path}:{lineno}: {msg}")

    while i < len(raw):
        line = raw[i].strip()
        if not line or line.startswith("#"):
            i += 1
            continue
        header = line.split()
        if len(header) != 2:
            fail(i + 1, f"expected record header 'n m', got {raw[i]!r}")
        try:
            n, m = int(header[0]), int(header[1])
        except ValueError:
            fail(i + 1, f"expected integers in record header, got {raw[i]!r}")
        i += 1
        edges: dict[tuple[int, int], float] = {}
        while len(edges) < m:
            if i >= len(raw):
                fail(len(raw), f"unexpected end of file: expected {m} edges, got {len(edges)}")
            line = raw[i].strip()
            if not line or line.startswith("#"):
                i += 1
                continue
            parts = line.split()
            if len(parts) != 3:
                fail(i + 1, f"expected edge line 'u v w', got {raw[i]!r}")
            try:
                u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                fail(i + 1, f"could not parse edge line {raw[i]!r}")
            if not 0 <= u < v < n:
                fail(i + 1, f"edge ({u}, {v}) is not a valid pair with u < v < n={n}")
            if (u, v) in edges:
                fail(i + 1, f"duplicate edge ({u}, {v})")
            if not (w > 0 and np.isfinite(w)):
                fail(i + 1, f"edge weight must be a finite positive real, got {parts[2]}")
            edges[(u, v)] = w
            i += 1
        try:
            graphs.append(WeightedGraph(Graph(n, frozenset(edges)), edges))
        except ValueError as exc:
            fail(i, str(exc))
    return graphs
