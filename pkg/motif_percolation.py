"""
Cascade Motif Toolkit - Motif Percolation
Grows a covered structure from a seed instance through chains of instances
sharing k-1 vertices, and measures the share of window edges it reaches
(network coverage, NC).
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from cascade_model import WindowGraph
from motif_engine import MotifInstance, MotifPattern, instances_by_pattern

logger = logging.getLogger(__name__)


class NoInstancesError(ValueError):
    """Seed selection over an empty instance list"""


class MixedPatternError(ValueError):
    """Percolation was handed instances of more than one pattern"""


@dataclass(frozen=True)
class PassRecord:
    """One sweep over the instances: who was admitted, and the merged totals"""
    admitted: Tuple[Tuple[int, int], ...]  # (instance index, k_cov)
    covered_edges: int
    covered_vertices: int


@dataclass(frozen=True)
class CoverageResult:
    pattern: MotifPattern
    covered_edges: FrozenSet[Tuple[int, int]]
    covered_vertices: FrozenSet[int]
    total_edges: int
    instances: int
    seed: Optional[MotifInstance]
    iterations: int
    restart_id: int = 0
    empty: bool = False
    trace: Tuple[PassRecord, ...] = field(default=(), compare=False, repr=False)

    @property
    def nc(self) -> float:
        return len(self.covered_edges) / self.total_edges if self.total_edges else 0.0


def seed_sequence(rng_seed) -> np.random.SeedSequence:
    """
    Accept an int, None or an existing SeedSequence

    A SeedSequence is copied with its spawn counter reset, so spawning from
    the result never advances the caller's object.
    """
    if isinstance(rng_seed, np.random.SeedSequence):
        return np.random.SeedSequence(rng_seed.entropy, spawn_key=rng_seed.spawn_key, pool_size=rng_seed.pool_size)
    return np.random.SeedSequence(rng_seed)


def instance_edges(graph: WindowGraph, instance: MotifInstance) -> List[Tuple[int, int]]:
    """Induced edges of an instance"""
    return [(u, v) for u, v in combinations(instance.vertices, 2) if graph.has_edge(u, v)]


def degree_sum(graph: WindowGraph, instance: MotifInstance) -> int:
    return sum(graph.degree(v) for v in instance.vertices)


@dataclass(frozen=True)
class InstanceIncidence:
    """
    Instances of one pattern as arrays: `vertices` is m x k, `edges` is
    m x e window-edge ids into `edge_list`.
    """
    vertices: np.ndarray
    edges: np.ndarray
    edge_list: Tuple[Tuple[int, int], ...]

    @classmethod
    def build(cls, graph: WindowGraph, instances: Sequence[MotifInstance]) -> "InstanceIncidence":
        edge_list = tuple(sorted(graph.edges))
        n = graph.order
        edge_id = np.full((n, n), -1, dtype=np.int64)
        if edge_list:
            ends = np.array(edge_list, dtype=np.int64)
            ids = np.arange(len(edge_list))
            edge_id[ends[:, 0], ends[:, 1]] = ids
            edge_id[ends[:, 1], ends[:, 0]] = ids

        vertices = np.array([m.vertices for m in instances], dtype=np.int64)
        k = vertices.shape[1]
        left, right = np.array(list(combinations(range(k), 2)), dtype=np.int64).T
        pair_ids = edge_id[vertices[:, left], vertices[:, right]]
        # one pattern, so every row holds the same number of edges
        edges = pair_ids[pair_ids >= 0].reshape(len(instances), -1)
        return cls(vertices=vertices, edges=edges, edge_list=edge_list)


def select_seed(instances: Sequence[MotifInstance], graph: WindowGraph, rng_seed=None) -> MotifInstance:
    """
    Instance with the highest window-graph degree sum; ties are broken
    uniformly at random from a seeded generator.
    """
    if not instances:
        raise NoInstancesError("Cannot pick a seed from an empty instance list")

    sums = [degree_sum(graph, m) for m in instances]
    best = max(sums)
    tied = [i for i, s in enumerate(sums) if s == best]
    if len(tied) == 1:
        return instances[tied[0]]

    rng = np.random.default_rng(rng_seed)
    return instances[tied[int(rng.integers(len(tied)))]]


def percolate(
    graph: WindowGraph,
    instances: Sequence[MotifInstance],
    seed: MotifInstance,
    strict_pseudocode: bool = False,
    restart_id: int = 0,
    record_trace: bool = False,
    incidence: Optional[InstanceIncidence] = None
) -> CoverageResult:
    """
    Motif percolation from `seed`

    Each pass admits every instance sharing exactly k-1 vertices with the
    covered vertex set (and, unless `strict_pseudocode`, instances already
    fully inside it, which can only complete edges). Admitted edges and
    vertices are merged after the pass; the loop stops on the first pass
    that adds no edge.

    Args:
        incidence: Prebuilt arrays for `instances`, shared across restarts
    """
    if not instances:
        raise NoInstancesError("Percolation needs at least one instance")
    patterns = {m.pattern for m in instances}
    if len(patterns) > 1:
        raise MixedPatternError(f"Instances span {len(patterns)} patterns")
    pattern = instances[0].pattern
    if seed.pattern != pattern:
        raise MixedPatternError("Seed pattern differs from the instance pattern")

    k = pattern.k
    incidence = incidence or InstanceIncidence.build(graph, instances)
    edge_index = {e: i for i, e in enumerate(incidence.edge_list)}

    covered_vertices = np.zeros(graph.order, dtype=bool)
    covered_vertices[list(seed.vertices)] = True
    covered_edges = np.zeros(len(incidence.edge_list), dtype=bool)
    covered_edges[[edge_index[e] for e in instance_edges(graph, seed)]] = True

    trace = []
    iterations = 0
    while True:
        iterations += 1
        k_cov = covered_vertices[incidence.vertices].sum(axis=1)
        admit = k_cov == k - 1
        if not strict_pseudocode:
            admit |= k_cov == k

        new_edges = np.zeros_like(covered_edges)
        new_edges[incidence.edges[admit].ravel()] = True
        added = new_edges & ~covered_edges
        covered_edges |= new_edges
        covered_vertices[incidence.vertices[admit].ravel()] = True

        if record_trace:
            admitted = np.flatnonzero(admit)
            trace.append(PassRecord(
                admitted=tuple((int(i), int(k_cov[i])) for i in admitted),
                covered_edges=int(covered_edges.sum()),
                covered_vertices=int(covered_vertices.sum())
            ))
        if not added.any():
            break

    return CoverageResult(
        pattern=pattern,
        covered_edges=frozenset(incidence.edge_list[i] for i in np.flatnonzero(covered_edges)),
        covered_vertices=frozenset(int(v) for v in np.flatnonzero(covered_vertices)),
        total_edges=len(graph.edges),
        instances=len(instances),
        seed=seed,
        iterations=iterations,
        restart_id=restart_id,
        trace=tuple(trace)
    )


def empty_coverage(graph: WindowGraph, pattern: MotifPattern) -> CoverageResult:
    return CoverageResult(
        pattern=pattern,
        covered_edges=frozenset(),
        covered_vertices=frozenset(),
        total_edges=len(graph.edges),
        instances=0,
        seed=None,
        iterations=0,
        empty=True
    )


def coverage(
    graph: WindowGraph,
    pattern: MotifPattern,
    instances: Sequence[MotifInstance],
    restarts: int = 1,
    rng_seed=None,
    strict_pseudocode: bool = False
) -> CoverageResult:
    """
    Best of one heuristic-seeded run and `restarts - 1` runs from distinct
    random seeds; ties go to the earliest restart.
    """
    if restarts < 1:
        raise ValueError(f"Restarts must be at least 1, got {restarts}")
    if not instances:
        return empty_coverage(graph, pattern)

    tie_stream, restart_stream = seed_sequence(rng_seed).spawn(2)

    incidence = InstanceIncidence.build(graph, instances)
    heuristic = select_seed(instances, graph, np.random.default_rng(tie_stream))
    best = percolate(graph, instances, heuristic, strict_pseudocode, restart_id=0, incidence=incidence)

    if restarts > 1:
        others = [m for m in instances if m != heuristic]
        order = np.random.default_rng(restart_stream).permutation(len(others))
        for restart_id, j in enumerate(order[:restarts - 1], start=1):
            result = percolate(
                graph, instances, others[int(j)], strict_pseudocode, restart_id=restart_id, incidence=incidence
            )
            if len(result.covered_edges) > len(best.covered_edges):
                best = result

    return best


def coverage_table(
    graph: WindowGraph,
    k: int = 5,
    restarts: int = 1,
    rng_seed=None,
    strict_pseudocode: bool = False,
    depth_probabilities: Optional[Sequence[float]] = None
) -> Dict[MotifPattern, CoverageResult]:
    """Coverage for every pattern that has instances in the graph"""
    grouped = instances_by_pattern(graph, k, depth_probabilities, rng_seed)
    if not grouped:
        return {}

    streams = seed_sequence(rng_seed).spawn(len(grouped))
    table = {}
    for (pattern, instances), stream in zip(grouped.items(), streams):
        table[pattern] = coverage(graph, pattern, instances, restarts, stream, strict_pseudocode)
        logger.debug(
            f"Pattern {pattern.catalog_index}: {len(instances)} instances, "
            f"NC={table[pattern].nc:.3f}"
        )
    return table
