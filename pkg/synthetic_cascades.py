"""
Cascade Motif Toolkit - Synthetic Cascades
Seeded generator of burst-then-tail reshare cascades with planted
historical edges, for desk-scale validation against known ground truth.
"""

import csv
import json
import logging
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from cascade_model import CSV_HEADER, DEFAULT_WINDOW_SIZE

logger = logging.getLogger(__name__)

CASCADES_FILE = "cascades.csv"
SOCIAL_FILE = "social_edges.txt"
GROUND_TRUTH_FILE = "ground_truth.json"


@dataclass(frozen=True)
class BurstProfile:
    """
    Inter-event gaps: mean `base_gap` before the burst, `base_gap / ratio`
    inside the burst window, then growing by `tail_growth` per event.
    """
    burst_window: int = 1
    ratio: float = 10.0
    base_gap: float = 60.0
    tail_growth: float = 1.01

    def __post_init__(self):
        if self.burst_window < 0:
            raise ValueError(f"Burst window must be non-negative, got {self.burst_window}")
        if not self.ratio > 0 or not self.base_gap > 0 or not self.tail_growth > 0:
            raise ValueError("Burst ratio, base gap and tail growth must be positive")


@dataclass
class SyntheticCorpus:
    records: List[Tuple[str, str, str, float]] = field(default_factory=list)
    social_edges: List[Tuple[str, str]] = field(default_factory=list)
    ground_truth: Dict = field(default_factory=dict)

    @property
    def cascade_ids(self) -> List[str]:
        return list(self.ground_truth.get("cascades", {}))


def _clamp_density(density: float, name: str) -> float:
    if density < 0:
        raise ValueError(f"{name} density must be non-negative, got {density}")
    if density > 1:
        logger.warning(f"{name} density {density} exceeds a complete graph, clamped to 1.0")
        return 1.0
    return density


def _gap_means(n_events: int, window_size: int, profile: BurstProfile) -> np.ndarray:
    """Mean gap before each activation 1..n_events"""
    means = np.empty(n_events)
    tail_start = (profile.burst_window + 1) * window_size
    for a in range(1, n_events + 1):
        q = a // window_size
        if q < profile.burst_window:
            means[a - 1] = profile.base_gap
        elif q == profile.burst_window:
            means[a - 1] = profile.base_gap / profile.ratio
        else:
            means[a - 1] = profile.base_gap * profile.tail_growth ** (a - tail_start + 1)
    return means


def _parents(n_nodes: int, window_size: int, locality: float, rng) -> List[int]:
    """Random recursive tree over activation order; parents[a] for a >= 1"""
    parents = [-1]
    for a in range(1, n_nodes):
        start = (a // window_size) * window_size
        if a == start or rng.random() >= locality:
            parents.append(int(rng.integers(a)))
        else:
            parents.append(int(rng.integers(start, a)))
    return parents


def _plant(members: List[int], tree_edges: List[Tuple[int, int]], density: float, rng) -> List[Tuple[int, int]]:
    """
    Historical pairs covering `density` of the window's node pairs,
    wedge-closing pairs of the reshare tree first
    """
    pairs = list(combinations(members, 2))
    target = int(round(density * len(pairs)))
    if target == 0:
        return []

    neighbours = {v: set() for v in members}
    for u, v in tree_edges:
        neighbours[u].add(v)
        neighbours[v].add(u)
    existing = {tuple(sorted(e)) for e in tree_edges}

    wedges = set()
    for centre in members:
        for u, v in combinations(sorted(neighbours[centre]), 2):
            if (u, v) not in existing:
                wedges.add((u, v))
    rest = [p for p in pairs if p not in wedges]
    wedges = sorted(wedges)

    ordered = [wedges[i] for i in rng.permutation(len(wedges))] + [rest[i] for i in rng.permutation(len(rest))]
    return ordered[:target]


def generate_cascade(
    cascade_id: str,
    n_nodes: int,
    window_size: int,
    profile: BurstProfile,
    steep_density: float,
    inhib_density: float,
    locality: float,
    rng
) -> Tuple[List[Tuple[str, str, str, float]], List[Tuple[str, str]], Dict]:
    """One cascade's reshare records, planted social edges and ground truth"""
    names = [f"{cascade_id}_u{a}" for a in range(n_nodes)]
    parents = _parents(n_nodes, window_size, locality, rng)
    gaps = rng.exponential(_gap_means(n_nodes - 1, window_size, profile))
    times = np.concatenate([[0.0], np.cumsum(gaps)])

    records = [
        (cascade_id, names[parents[a]], names[a], float(times[a]))
        for a in range(1, n_nodes)
    ]

    social = []
    planted = []
    for q in range(n_nodes // window_size):
        members = list(range(q * window_size, (q + 1) * window_size))
        inside = set(members)
        tree_edges = [(parents[a], a) for a in members if parents[a] in inside]
        density = steep_density if q <= profile.burst_window else inhib_density
        pairs = _plant(members, tree_edges, density, rng)
        planted.append(len(pairs))
        social.extend((names[u], names[v]) for u, v in pairs)

    truth = {
        "burst_window": profile.burst_window,
        "windows": n_nodes // window_size,
        "planted_edges": planted,
        "duration": float(times[-1])
    }
    return records, social, truth


def generate_synthetic(
    n_cascades: int,
    nodes_per_cascade: int,
    profile: Optional[BurstProfile] = None,
    steep_density: float = 0.02,
    inhib_density: float = 0.06,
    seed: int = 0,
    window_size: int = DEFAULT_WINDOW_SIZE,
    locality: float = 1.0,
    output_dir=None
) -> SyntheticCorpus:
    """
    Generate a seeded synthetic corpus

    Args:
        n_cascades: Number of cascades
        nodes_per_cascade: Activations per cascade, original poster included
        profile: Gap schedule (burst window, rate ratio, tail growth)
        steep_density: Planted pair fraction in windows up to the burst
        inhib_density: Planted pair fraction in later windows
        seed: Master seed; cascade i uses the i-th spawned stream
        window_size: Window size W the densities refer to
        locality: Chance a non-first window node attaches inside its window
        output_dir: When given, the corpus is also written there

    Returns:
        SyntheticCorpus with records, social edges and ground truth
    """
    profile = profile or BurstProfile()
    if nodes_per_cascade < 2 * window_size:
        raise ValueError(f"Need at least {2 * window_size} nodes per cascade, got {nodes_per_cascade}")
    if profile.burst_window >= nodes_per_cascade // window_size:
        raise ValueError(f"Burst window {profile.burst_window} beyond the last full window")
    if not 0 <= locality <= 1:
        raise ValueError(f"Locality must be in [0, 1], got {locality}")
    steep_density = _clamp_density(steep_density, "Steep")
    inhib_density = _clamp_density(inhib_density, "Inhibition")

    corpus = SyntheticCorpus(ground_truth={
        "seed": seed,
        "window_size": window_size,
        "nodes_per_cascade": nodes_per_cascade,
        "steep_density": steep_density,
        "inhib_density": inhib_density,
        "burst_ratio": profile.ratio,
        "base_gap": profile.base_gap,
        "tail_growth": profile.tail_growth,
        "locality": locality,
        "cascades": {}
    })

    streams = np.random.SeedSequence(seed).spawn(n_cascades)
    width = len(str(max(n_cascades - 1, 0)))
    for i, stream in enumerate(streams):
        cascade_id = f"c{i:0{width}d}"
        records, social, truth = generate_cascade(
            cascade_id, nodes_per_cascade, window_size, profile,
            steep_density, inhib_density, locality, np.random.default_rng(stream)
        )
        corpus.records.extend(records)
        corpus.social_edges.extend(social)
        corpus.ground_truth["cascades"][cascade_id] = truth

    if output_dir is not None:
        write_synthetic(corpus, output_dir)
    return corpus


def write_synthetic(corpus: SyntheticCorpus, output_dir) -> Dict[str, Path]:
    """Write cascades.csv, social_edges.txt and ground_truth.json"""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "events": out / CASCADES_FILE,
        "social": out / SOCIAL_FILE,
        "ground_truth": out / GROUND_TRUTH_FILE
    }

    with paths["events"].open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for cascade_id, source, target, time in corpus.records:
            writer.writerow([cascade_id, source, target, repr(time)])

    with paths["social"].open("w", encoding="utf-8") as f:
        for u, v in corpus.social_edges:
            f.write(f"{u} {v}\n")

    with paths["ground_truth"].open("w", encoding="utf-8") as f:
        json.dump(corpus.ground_truth, f, indent=2, sort_keys=True)

    logger.debug(f"Synthetic corpus written to {out}")
    return paths
