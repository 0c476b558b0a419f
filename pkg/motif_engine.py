"""
Cascade Motif Toolkit - Motif Engine
Canonical codes for small undirected graphs, the connected-pattern catalog,
and ESU / RAND-ESU enumeration of connected k-vertex induced subgraphs.
"""

import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from cascade_model import WindowGraph

logger = logging.getLogger(__name__)

MAX_ORDER = 8


@lru_cache(maxsize=None)
def pair_list(k: int) -> Tuple[Tuple[int, int], ...]:
    """Vertex pairs (i, j), i < j, in bit order"""
    return tuple(combinations(range(k), 2))


@lru_cache(maxsize=None)
def _pair_index(k: int) -> Dict[Tuple[int, int], int]:
    return {pair: q for q, pair in enumerate(pair_list(k))}


@lru_cache(maxsize=None)
def _bit_weights(k: int) -> np.ndarray:
    m = len(pair_list(k))
    return np.array([1 << (m - 1 - q) for q in range(m)], dtype=np.int64)


@lru_cache(maxsize=None)
def _permutation_table(k: int) -> np.ndarray:
    """
    Row per vertex permutation p: entry q is the pair index of (p[i], p[j])
    for the q-th pair (i, j). Gathering bits through a row relabels a graph.
    """
    index = _pair_index(k)
    pairs = pair_list(k)
    rows = []
    for p in permutations(range(k)):
        row = []
        for i, j in pairs:
            a, b = p[i], p[j]
            row.append(index[(a, b) if a < b else (b, a)])
        rows.append(row)
    return np.array(rows, dtype=np.int64).reshape(len(rows), len(pairs))


def _bits_to_vector(k: int, bits: int) -> np.ndarray:
    m = len(pair_list(k))
    return np.array([(bits >> (m - 1 - q)) & 1 for q in range(m)], dtype=np.int64)


@lru_cache(maxsize=1 << 16)
def _canonical_from_bits(k: int, bits: int) -> int:
    if k < 2 or bits == 0:
        return 0
    vec = _bits_to_vector(k, bits)
    codes = vec[_permutation_table(k)] @ _bit_weights(k)
    return int(codes.min())


@dataclass(frozen=True)
class SmallGraph:
    """Undirected graph on k <= 8 vertices stored as an upper-triangular bit string"""
    order: int
    bits: int

    @classmethod
    def from_edges(cls, order: int, edges) -> "SmallGraph":
        if order > MAX_ORDER:
            raise ValueError(f"Small graphs hold at most {MAX_ORDER} vertices, got {order}")
        index = _pair_index(order)
        m = len(pair_list(order))
        bits = 0
        for u, v in edges:
            if u == v:
                continue
            q = index[(u, v) if u < v else (v, u)]
            bits |= 1 << (m - 1 - q)
        return cls(order=order, bits=bits)

    def edges(self) -> List[Tuple[int, int]]:
        m = len(pair_list(self.order))
        return [pair for q, pair in enumerate(pair_list(self.order)) if (self.bits >> (m - 1 - q)) & 1]

    @property
    def edge_count(self) -> int:
        return bin(self.bits).count("1")

    def is_connected(self) -> bool:
        if self.order <= 1:
            return True
        adj = [set() for _ in range(self.order)]
        for u, v in self.edges():
            adj[u].add(v)
            adj[v].add(u)
        seen = {0}
        stack = [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.order


def canonical_code(g: SmallGraph) -> int:
    """Minimum adjacency bit string over all vertex relabelings"""
    if g.order > MAX_ORDER:
        raise ValueError(f"Canonical codes support at most {MAX_ORDER} vertices")
    return _canonical_from_bits(g.order, g.bits)


@dataclass(frozen=True)
class MotifPattern:
    code: int
    k: int
    edge_count: int
    catalog_index: int

    @property
    def graph(self) -> SmallGraph:
        return SmallGraph(order=self.k, bits=self.code)

    @property
    def edge_list(self) -> List[Tuple[int, int]]:
        """Edges of the canonical representative"""
        return self.graph.edges()

    @property
    def has_triangle(self) -> bool:
        edges = set(self.edge_list)
        return any(
            (a, b) in edges and (a, c) in edges and (b, c) in edges
            for a, b, c in combinations(range(self.k), 3)
        )

    def to_dict(self) -> Dict:
        return {
            "catalog_index": self.catalog_index,
            "k": self.k,
            "edge_count": self.edge_count,
            "code": self.code,
            "edge_list": [list(e) for e in self.edge_list]
        }


@dataclass(frozen=True)
class MotifInstance:
    vertices: Tuple[int, ...]
    pattern: MotifPattern


def _trees(k: int) -> set:
    """Canonical codes of all non-isomorphic trees on k vertices"""
    level = {(1, 0)}
    for order in range(2, k + 1):
        grown = set()
        for prev_order, code in level:
            parent_edges = SmallGraph(order=prev_order, bits=code).edges()
            for attach in range(prev_order):
                g = SmallGraph.from_edges(order, parent_edges + [(attach, order - 1)])
                grown.add((order, canonical_code(g)))
        level = grown
    return {code for _, code in level}


@lru_cache(maxsize=None)
def build_catalog(k: int) -> Tuple[MotifPattern, ...]:
    """
    All connected isomorphism classes on k vertices, ordered by
    (edge_count, code)
    """
    if not 3 <= k <= MAX_ORDER:
        raise ValueError(f"Catalog order must be in [3, {MAX_ORDER}], got {k}")

    m = len(pair_list(k))
    frontier = _trees(k)
    classes = set(frontier)
    # every connected graph with a cycle loses a non-bridge edge and stays connected
    while frontier:
        grown = set()
        for code in frontier:
            for q in range(m):
                bit = 1 << (m - 1 - q)
                if code & bit:
                    continue
                c = _canonical_from_bits(k, code | bit)
                if c not in classes:
                    grown.add(c)
        classes |= grown
        frontier = grown

    ordered = sorted(classes, key=lambda c: (bin(c).count("1"), c))
    catalog = tuple(
        MotifPattern(code=c, k=k, edge_count=bin(c).count("1"), catalog_index=i)
        for i, c in enumerate(ordered)
    )
    logger.debug(f"Catalog k={k}: {len(catalog)} connected patterns")
    return catalog


@lru_cache(maxsize=None)
def _catalog_by_code(k: int) -> Dict[int, MotifPattern]:
    return {p.code: p for p in build_catalog(k)}


def pattern_for_code(k: int, code: int) -> MotifPattern:
    try:
        return _catalog_by_code(k)[code]
    except KeyError:
        raise ValueError(f"Code {code} is not a connected {k}-vertex pattern") from None


def catalog_to_json(k: int) -> str:
    return json.dumps([p.to_dict() for p in build_catalog(k)], indent=2)


def classify(graph: WindowGraph, vertices: Sequence[int]) -> MotifPattern:
    """Pattern of the subgraph induced by `vertices`"""
    k = len(vertices)
    m = len(pair_list(k))
    adjacency = graph.adjacency
    bits = 0
    for q, (i, j) in enumerate(pair_list(k)):
        if vertices[j] in adjacency[vertices[i]]:
            bits |= 1 << (m - 1 - q)
    return pattern_for_code(k, _canonical_from_bits(k, bits))


def _esu(graph: WindowGraph, k: int, probabilities: Optional[Sequence[float]], rng) -> Iterator[Tuple[int, ...]]:
    adjacency = graph.adjacency

    def keep(depth: int) -> bool:
        if probabilities is None:
            return True
        p = probabilities[depth - 1]
        return p >= 1.0 or rng.random() < p

    def extend(sub: List[int], ext: List[int], closed: frozenset, root: int):
        if len(sub) == k:
            yield tuple(sorted(sub))
            return
        ext = list(ext)
        while ext:
            w = ext.pop()
            exclusive = [u for u in adjacency[w] if u > root and u not in closed]
            if not keep(len(sub) + 1):
                continue
            yield from extend(sub + [w], ext + exclusive, closed | adjacency[w], root)

    for v in graph.vertices:
        if not keep(1):
            continue
        ext = sorted(u for u in adjacency[v] if u > v)
        yield from extend([v], ext, adjacency[v] | {v}, v)


def esu_enumerate(graph: WindowGraph, k: int = 5) -> Iterator[MotifInstance]:
    """
    Every connected k-vertex induced subgraph exactly once (ESU)

    Streams instances; each is classified through its canonical code.
    """
    if k < 3:
        raise ValueError(f"Motif size must be at least 3, got {k}")
    for vertices in _esu(graph, k, None, None):
        yield MotifInstance(vertices=vertices, pattern=classify(graph, vertices))


def rand_esu(graph: WindowGraph, k: int, depth_probabilities: Sequence[float], rng_seed=None) -> Iterator[MotifInstance]:
    """
    RAND-ESU: each extension at depth d survives with probability p_d

    With all p_d = 1 this yields exactly what esu_enumerate yields, in the
    same order.
    """
    if k < 3:
        raise ValueError(f"Motif size must be at least 3, got {k}")
    if len(depth_probabilities) != k:
        raise ValueError(f"Need {k} depth probabilities, got {len(depth_probabilities)}")
    if any(not 0.0 < p <= 1.0 for p in depth_probabilities):
        raise ValueError(f"Depth probabilities must lie in (0, 1]: {list(depth_probabilities)}")

    rng = np.random.default_rng(rng_seed)
    for vertices in _esu(graph, k, tuple(depth_probabilities), rng):
        yield MotifInstance(vertices=vertices, pattern=classify(graph, vertices))


def instances_by_pattern(
    graph: WindowGraph,
    k: int = 5,
    depth_probabilities: Optional[Sequence[float]] = None,
    rng_seed=None
) -> Dict[MotifPattern, List[MotifInstance]]:
    """Group enumerated instances by pattern; absent patterns are absent keys"""
    if depth_probabilities is None:
        stream = esu_enumerate(graph, k)
    else:
        stream = rand_esu(graph, k, depth_probabilities, rng_seed)

    grouped: Dict[MotifPattern, List[MotifInstance]] = {}
    for instance in stream:
        grouped.setdefault(instance.pattern, []).append(instance)
    return dict(sorted(grouped.items(), key=lambda item: item[0].catalog_index))
