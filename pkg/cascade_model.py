"""
Cascade Motif Toolkit - Cascade Model
Reshare events, cascades, the historical social network, fixed-size
activation windows and the per-window graphs the motif analysis runs on.
"""

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

logger = logging.getLogger(__name__)

DEFAULT_WINDOW_SIZE = 80
DEFAULT_MIN_CASCADE_SIZE = 300

CSV_HEADER = ("cascade_id", "source", "target", "time")


class CascadeDataError(ValueError):
    """Base class for problems with cascade or social network input"""


class EmptyCascadeError(CascadeDataError):
    """A cascade has no usable reshare events"""


class CascadeTooSmallError(CascadeDataError):
    """A cascade has fewer activations than one window needs"""


def edge_key(u, v) -> Tuple:
    """Unordered pair as a sorted tuple"""
    return (u, v) if u <= v else (v, u)


def event_time(raw) -> float:
    """Parse a reshare time; NaN and infinities are rejected"""
    t = float(raw)
    if not math.isfinite(t):
        raise ValueError(f"Non-finite time {raw!r}")
    return t


def _read_lines(path: Path) -> List[str]:
    try:
        with path.open("r", encoding="utf-8") as f:
            return [line for line in f if line.strip()]
    except UnicodeDecodeError as e:
        raise CascadeDataError(f"{path.name}: not valid UTF-8 ({e.reason} at byte {e.start})") from e


@dataclass(frozen=True)
class ReshareEvent:
    source: str
    target: str
    time: float


@dataclass(frozen=True)
class Cascade:
    """Time-ordered reshare events of one post; the root is the original poster."""
    id: str
    root: str
    events: Tuple[ReshareEvent, ...]

    @property
    def duration(self) -> float:
        return self.events[-1].time if self.events else 0.0

    @property
    def activations(self) -> Tuple[str, ...]:
        """Activated users in activation order, original poster first"""
        return (self.root,) + tuple(e.target for e in self.events)

    @property
    def activation_times(self) -> Tuple[float, ...]:
        return (0.0,) + tuple(e.time for e in self.events)

    @property
    def event_times(self) -> Tuple[float, ...]:
        return tuple(e.time for e in self.events)

    def __len__(self) -> int:
        return len(self.events) + 1


@dataclass(frozen=True)
class SocialNetwork:
    """Undirected historical-interaction edges E_D"""
    edges: FrozenSet[Tuple[str, str]] = frozenset()
    malformed: int = 0

    def __contains__(self, pair) -> bool:
        u, v = pair
        return edge_key(u, v) in self.edges

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class Window:
    index: int
    nodes: FrozenSet[str]
    members: Tuple[str, ...]
    start_time: float
    end_time: float


@dataclass(frozen=True)
class WindowGraph:
    """
    Simple undirected graph of one window.

    Vertices are dense integer indices 0..n-1 in activation order; `labels`
    maps them back to user ids. `reshare_edges` and `historical_edges`
    record where every edge came from.
    """
    labels: Tuple
    edges: FrozenSet[Tuple[int, int]]
    adjacency: Tuple[FrozenSet[int], ...]
    window: Optional[Window] = None
    reshare_edges: FrozenSet[Tuple[int, int]] = frozenset()
    historical_edges: FrozenSet[Tuple[int, int]] = frozenset()
    index_of: Dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_edges(
        cls,
        labels: Sequence,
        edges: Iterable[Tuple[int, int]],
        window: Optional[Window] = None,
        reshare_edges: Iterable[Tuple[int, int]] = (),
        historical_edges: Iterable[Tuple[int, int]] = ()
    ) -> "WindowGraph":
        """Build from dense-index edges; self-loops and duplicates collapse."""
        n = len(labels)
        clean = set()
        for u, v in edges:
            if u == v:
                continue
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"Edge ({u}, {v}) outside vertex range 0..{n - 1}")
            clean.add(edge_key(u, v))

        neighbours: List[set] = [set() for _ in range(n)]
        for u, v in clean:
            neighbours[u].add(v)
            neighbours[v].add(u)

        return cls(
            labels=tuple(labels),
            edges=frozenset(clean),
            adjacency=tuple(frozenset(s) for s in neighbours),
            window=window,
            reshare_edges=frozenset(edge_key(u, v) for u, v in reshare_edges),
            historical_edges=frozenset(edge_key(u, v) for u, v in historical_edges),
            index_of={label: i for i, label in enumerate(labels)}
        )

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> "WindowGraph":
        labels = list(g.nodes())
        index = {label: i for i, label in enumerate(labels)}
        return cls.from_edges(labels, [(index[u], index[v]) for u, v in g.edges()])

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.labels)
        g.add_edges_from((self.labels[u], self.labels[v]) for u, v in self.edges)
        return g

    @property
    def vertices(self) -> range:
        return range(len(self.labels))

    @property
    def order(self) -> int:
        return len(self.labels)

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(len(nbrs) for nbrs in self.adjacency)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]


def ingest_cascade(raw_events: Sequence[Tuple], cascade_id: str = "") -> Cascade:
    """
    Normalize raw (source, target, time) records into a Cascade

    Events are ordered by (time, target, source) so the result does not
    depend on input order. Times are shifted so the earliest event is at 0.
    Self-loops and repeat activations of an already active user are dropped.
    """
    valid = []
    for source, target, time in raw_events:
        if source == target:
            continue
        try:
            t = event_time(time)
        except (TypeError, ValueError) as e:
            raise CascadeDataError(f"Cascade '{cascade_id}': {e}") from e
        valid.append((t, str(target), str(source)))

    if not valid:
        raise EmptyCascadeError(f"Cascade '{cascade_id}' has no reshare events")

    valid.sort()
    t0 = valid[0][0]
    root = valid[0][2]

    active = {root}
    events = []
    for time, target, source in valid:
        if target in active:
            continue
        active.add(target)
        events.append(ReshareEvent(source=source, target=target, time=time - t0))

    dropped = len(valid) - len(events)
    if dropped:
        logger.debug(f"Cascade {cascade_id}: dropped {dropped} repeat activations")

    return Cascade(id=str(cascade_id), root=root, events=tuple(events))


def build_social_network(edge_lines: Iterable) -> SocialNetwork:
    """
    Deduplicated undirected historical network

    Accepts (u, v) pairs or whitespace-separated strings; anything that does
    not split into exactly two ids is counted as malformed and skipped.
    """
    edges = set()
    malformed = 0
    for item in edge_lines:
        parts = item.split() if isinstance(item, str) else list(item)
        if len(parts) != 2:
            malformed += 1
            continue
        u, v = str(parts[0]), str(parts[1])
        if u == v:
            continue
        edges.add(edge_key(u, v))

    if malformed:
        logger.warning(f"Social network: skipped {malformed} malformed lines")

    return SocialNetwork(edges=frozenset(edges), malformed=malformed)


def segment(cascade: Cascade, window_size: int = DEFAULT_WINDOW_SIZE, motif_size: int = 5) -> List[Window]:
    """
    Partition activations into consecutive windows of exactly `window_size`
    users; a trailing partial window is discarded.
    """
    if window_size < motif_size:
        raise ValueError(f"Window size {window_size} is smaller than motif size {motif_size}")

    users = cascade.activations
    times = cascade.activation_times
    if len(users) < window_size:
        raise CascadeTooSmallError(
            f"Cascade '{cascade.id}' has {len(users)} activations, window needs {window_size}"
        )

    windows = []
    for q in range(len(users) // window_size):
        lo, hi = q * window_size, (q + 1) * window_size
        members = users[lo:hi]
        windows.append(Window(
            index=q,
            nodes=frozenset(members),
            members=tuple(members),
            start_time=times[lo],
            end_time=times[hi - 1]
        ))
    return windows


def build_window_graph(cascade: Cascade, window: Window, social: Optional[SocialNetwork] = None) -> WindowGraph:
    """
    Window graph: in-window reshares plus historical edges among window users
    """
    index = {user: i for i, user in enumerate(window.members)}

    reshares = []
    for event in cascade.events:
        if event.time < window.start_time or event.time > window.end_time:
            continue
        if event.source in index and event.target in index:
            reshares.append((index[event.source], index[event.target]))

    historical = []
    if social is not None and len(social):
        members = window.members
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                if edge_key(members[i], members[j]) in social.edges:
                    historical.append((i, j))

    return WindowGraph.from_edges(
        window.members,
        reshares + historical,
        window=window,
        reshare_edges=reshares,
        historical_edges=historical
    )


def window_statistics(graph: WindowGraph) -> Dict:
    """Topology summary of a window graph"""
    g = graph.to_networkx()
    n = graph.order
    return {
        "nodes": n,
        "edges": len(graph.edges),
        "reshare_edges": len(graph.reshare_edges),
        "historical_edges": len(graph.historical_edges),
        "triangles": sum(nx.triangles(g).values()) // 3 if n else 0,
        "density": round(nx.density(g), 6) if n > 1 else 0.0,
        "transitivity": round(nx.transitivity(g), 6) if n else 0.0
    }


def read_cascade_records(path) -> Tuple[Dict[str, List[Tuple[str, str, float]]], int]:
    """
    Read reshare records grouped by cascade id

    Supports `cascade_id,source,target,time` CSV (optional header) and JSON
    lines `{"cascade": ..., "src": ..., "dst": ..., "t": ...}`.

    Returns:
        (records per cascade id in file order, malformed line count)
    """
    path = Path(path)
    records: Dict[str, List[Tuple[str, str, float]]] = {}
    malformed = 0

    lines = _read_lines(path)

    is_jsonl = bool(lines) and lines[0].lstrip().startswith("{")

    if is_jsonl:
        for line in lines:
            try:
                obj = json.loads(line)
                row = (str(obj["cascade"]), str(obj["src"]), str(obj["dst"]), event_time(obj["t"]))
            except (ValueError, KeyError, TypeError):
                malformed += 1
                continue
            records.setdefault(row[0], []).append(row[1:])
    else:
        for i, parts in enumerate(csv.reader(lines)):
            parts = [p.strip() for p in parts]
            if i == 0 and tuple(parts) == CSV_HEADER:
                continue
            try:
                cascade_id, source, target, time = parts
                row = (cascade_id, source, target, event_time(time))
            except ValueError:
                malformed += 1
                continue
            records.setdefault(row[0], []).append(row[1:])

    if malformed:
        logger.warning(f"{path.name}: skipped {malformed} malformed records")

    return records, malformed


def read_social_edges(path) -> SocialNetwork:
    """Read a whitespace-separated `u v` edge file"""
    return build_social_network(_read_lines(Path(path)))
