"""Maximum-clique estimation through the quadratic program on the simplex.

For a simple graph with adjacency matrix A and clique number omega, the
maximum of p'Ap over the simplex equals 1 - 1/omega, attained at the
uniform distribution over a maximum clique. Running the discrete
multiplicative map on the shifted objective from many random starts
climbs p'Ap monotonically; the best value reached inverts to an integer
clique-number estimate and the support of the best point, pruned to a
clique if the maximiser is a spurious mixture, yields the clique itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionError,
    GraphParseError,
    ParameterError,
    PositivityError,
    SizeError,
)

__all__ = [
    "GraphSpec",
    "parse_graph_text",
    "parse_graph_file",
    "brute_force_clique_number",
    "CliqueReport",
    "motzkin_straus_clique",
    "BRUTE_FORCE_MAX_N",
]

BRUTE_FORCE_MAX_N = 20
SUPPORT_FACTOR = 0.5  # support cut at SUPPORT_FACTOR / n


@dataclass(frozen=True)
class GraphSpec:
    """Simple undirected graph on vertices 0..n-1."""

    n: int
    edges: tuple

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError(f"graph needs at least one vertex, got n={self.n}")
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise DimensionError(f"edge ({u}, {v}) out of range for n={self.n}")
            if u == v:
                raise DimensionError(f"self-loop at vertex {u} is not allowed")
            seen.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(seen)))

    @property
    def m(self) -> int:
        return len(self.edges)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for u, v in self.edges:
            a[u, v] = 1.0
            a[v, u] = 1.0
        return a

    def neighbor_masks(self) -> list:
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return masks


def parse_graph_text(text: str) -> GraphSpec:
    """Parse the edge-list format: optional 'p n m' header, one 'u v' per line.

    Vertices are 0-indexed; blank lines and lines starting with '#' or 'c'
    are ignored. Without a header the vertex count is max index + 1.
    """
    n_declared = None
    edges = []
    max_seen = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n_declared is not None:
                raise GraphParseError(f"line {lineno}: duplicate header")
            if len(parts) != 3:
                raise GraphParseError(f"line {lineno}: header must be 'p <n> <m>', got {line!r}")
            try:
                n_declared = int(parts[1])
                int(parts[2])
            except ValueError:
                raise GraphParseError(f"line {lineno}: header fields must be integers, got {line!r}") from None
            if n_declared < 1:
                raise GraphParseError(f"line {lineno}: vertex count must be >= 1, got {n_declared}")
            continue
        if len(parts) != 2:
            raise GraphParseError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(f"line {lineno}: vertex ids must be integers, got {line!r}") from None
        if u < 0 or v < 0:
            raise GraphParseError(f"line {lineno}: vertex ids must be >= 0, got {line!r}")
        if u == v:
            raise GraphParseError(f"line {lineno}: self-loop at vertex {u}")
        edges.append((u, v))
        max_seen = max(max_seen, u, v)
    if n_declared is None:
        if max_seen < 0:
            raise GraphParseError("no header and no edges: cannot infer the vertex count")
        n = max_seen + 1
    else:
        if max_seen >= n_declared:
            raise GraphParseError(f"edge endpoint {max_seen} exceeds declared vertex count {n_declared}")
        n = n_declared
    return GraphSpec(n, tuple(edges))


def parse_graph_file(path) -> GraphSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph_text(fh.read())


# ── Exact reference ─────────────────────────────────────────────────────────


def brute_force_clique_number(graph: GraphSpec) -> int:
    """Exact clique number by branch and bound over vertex bitsets, n <= 20."""
    if graph.n > BRUTE_FORCE_MAX_N:
        raise SizeError(f"brute force supports n <= {BRUTE_FORCE_MAX_N}, got {graph.n}")
    masks = graph.neighbor_masks()
    best = 1 if graph.n >= 1 else 0

    def popcount(x: int) -> int:
        return bin(x).count("1")

    def expand(size: int, candidates: int):
        nonlocal best
        if size + popcount(candidates) <= best:
            return
        while candidates:
            if size + popcount(candidates) <= best:
                return
            v = (candidates & -candidates).bit_length() - 1
            candidates &= candidates - 1
            if size + 1 > best:
                best = size + 1
            expand(size + 1, candidates & masks[v])

    expand(0, (1 << graph.n) - 1)
    return best


# ── Multiplicative-map search ───────────────────────────────────────────────


@dataclass
class CliqueReport:
    """Best objective value found, the inverted clique-number estimate, and the clique."""

    omega: int
    value: float
    clique: list
    support: list
    best_point: np.ndarray
    restarts: int
    lam: float
    iterations: int


def _batched_iterate(a: np.ndarray, starts: np.ndarray, lam: float,
                     max_iters: int, conv_tol: float):
    """Run the discrete map on all starts at once; returns finals and iterations."""
    p = starts.copy()
    it = 0
    for it in range(1, max_iters + 1):
        shifted = p @ a + lam
        if shifted.min() <= 0.0:
            raise PositivityError("discrete map needs f_i + lam > 0; raise lam")
        w = p * shifted
        p_next = w / w.sum(axis=1, keepdims=True)
        delta = np.abs(p_next - p).max()
        p = p_next
        if delta < conv_tol:
            break
    return p, it


def _prune_to_clique(graph: GraphSpec, support: list, point: np.ndarray) -> list:
    """Drop low-connectivity vertices until the remaining set is a clique."""
    masks = graph.neighbor_masks()
    current = list(support)
    while len(current) > 1:
        member = set(current)
        deficits = []
        for v in current:
            inside = sum(1 for u in current if u != v and (masks[v] >> u) & 1)
            deficits.append((inside, point[v], -v))
        worst = min(range(len(current)), key=lambda idx: deficits[idx])
        inside_worst = deficits[worst][0]
        if inside_worst == len(current) - 1:
            break
        current.pop(worst)
    return sorted(current)


def motzkin_straus_clique(graph: GraphSpec, restarts: int = 50, lam: float = 0.5,
                          seed: int = 0, max_iters: int = 3000,
                          conv_tol: float = 1e-13) -> CliqueReport:
    """Estimate the clique number from the best multiplicative-map fixed point.

    All restarts are iterated as one batch (the map is applied rowwise, so
    batching changes nothing but speed). Ties in the best value are broken
    towards the lexicographically smallest support.
    """
    if restarts < 1:
        raise ParameterError(f"restarts must be >= 1, got {restarts!r}")
    if not lam >= 0.0:
        raise ParameterError(f"lam must be >= 0, got {lam!r}")
    if graph.n == 1:
        return CliqueReport(1, 0.0, [0], [0], np.array([1.0]), restarts, lam, 0)

    a = graph.adjacency()
    rng = np.random.default_rng(seed)
    starts = rng.standard_exponential((restarts, graph.n))
    starts /= starts.sum(axis=1, keepdims=True)
    finals, iterations = _batched_iterate(a, starts, lam, max_iters, conv_tol)
    values = ((finals @ a) * finals).sum(axis=1)

    cut = SUPPORT_FACTOR / graph.n
    best_idx = 0
    best_key = None
    for r in range(restarts):
        support = tuple(int(i) for i in np.flatnonzero(finals[r] > cut))
        key = (-values[r], support)
        if best_key is None or key < best_key:
            best_key = key
            best_idx = r
    best_point = finals[best_idx]
    best_value = float(values[best_idx])
    support = [int(i) for i in np.flatnonzero(best_point > cut)]

    clique = _prune_to_clique(graph, support, best_point)
    omega = int(round(1.0 / (1.0 - best_value))) if best_value < 1.0 else graph.n
    omega = max(1, min(graph.n, omega))
    return CliqueReport(omega, best_value, clique, support, best_point,
                        restarts, lam, iterations)
