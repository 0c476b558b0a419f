"""
Cascade Motif Toolkit - Cascade Pipeline
End-to-end run over a cascade corpus: ingest, size filter, segment, phase
detection, motif coverage per phase window, and the phase comparison.
"""

import hashlib
import logging
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from cascade_model import (
    Cascade,
    CascadeDataError,
    SocialNetwork,
    Window,
    build_social_network,
    build_window_graph,
    ingest_cascade,
    read_cascade_records,
    read_social_edges,
    segment,
    window_statistics,
)
from motif_engine import build_catalog
from motif_percolation import coverage_table
from phase_comparison import TTestResult, compare_phases
from phase_detector import KernelParams, PhaseDetection, detect_phases, fit_bandwidth, override_phases
from pipeline_config import PipelineConfig, config_hash

logger = logging.getLogger(__name__)

COVERAGE_COLUMNS = [
    "cascade_id", "window", "phase", "catalog_index", "instances",
    "covered_edges", "total_edges", "nc", "iterations", "restart_id"
]

WINDOW_STAT_COLUMNS = [
    "cascade_id", "window", "phase", "nodes", "edges", "reshare_edges",
    "historical_edges", "triangles", "density", "transitivity"
]


class NoRetainedCascadesError(CascadeDataError):
    """No cascade survived ingestion and the size filter"""


def cascade_seed(master_seed: int, cascade_id: str) -> int:
    """Master seed XOR the first 8 bytes of BLAKE2b(cascade id)"""
    digest = hashlib.blake2b(str(cascade_id).encode("utf-8"), digest_size=8).digest()
    return (int(master_seed) & 0xFFFFFFFFFFFFFFFF) ^ int.from_bytes(digest, "big")


@dataclass
class CascadeAnalysis:
    cascade_id: str
    success: bool = True
    error: Optional[str] = None
    phases: Optional[PhaseDetection] = None
    steep: Dict[int, float] = field(default_factory=dict)  # catalog index -> NC
    inhib: Dict[int, float] = field(default_factory=dict)
    coverage_rows: List[Dict] = field(default_factory=list)
    window_rows: List[Dict] = field(default_factory=list)


@dataclass
class CorpusReport:
    config: PipelineConfig
    phases: List[PhaseDetection] = field(default_factory=list)
    coverage_rows: List[Dict] = field(default_factory=list)
    tests: List[TTestResult] = field(default_factory=list)
    window_rows: List[Dict] = field(default_factory=list)
    metadata: Dict = field(default_factory=dict)

    @property
    def significant(self) -> List[TTestResult]:
        return [t for t in self.tests if t.significant]


def _window_labels(phases: PhaseDetection, n_windows: int, all_windows: bool) -> List[Tuple[int, str]]:
    labels = [(phases.steep_window, "steep"), (phases.inhib_window, "inhib")]
    if all_windows:
        used = {phases.steep_window, phases.inhib_window}
        labels += [(q, "other") for q in range(n_windows) if q not in used]
    return sorted(labels)


def phases_for(cascade: Cascade, windows: Sequence[Window], config: PipelineConfig) -> PhaseDetection:
    """Configured phase windows, or detected ones with a fixed or fitted bandwidth"""
    if config.overrides_phases:
        return override_phases(cascade, windows, config.steep_window, config.inhib_window)
    bandwidth = config.bandwidth or fit_bandwidth(cascade, config.bandwidth_grid)
    params = KernelParams(bandwidth=bandwidth, resolution=config.grid_resolution)
    return detect_phases(cascade, windows, params, config.quiescence, config.smooth_width)


def analyze_cascade(cascade: Cascade, social: Optional[SocialNetwork], config: PipelineConfig) -> CascadeAnalysis:
    """
    Phases and per-window coverage tables for one cascade

    Data problems are reported on the result rather than raised.
    """
    try:
        windows = segment(cascade, config.window_size, config.k)
        phases = phases_for(cascade, windows, config)
    except ValueError as e:
        logger.warning(f"Cascade {cascade.id}: {e}")
        return CascadeAnalysis(cascade_id=cascade.id, success=False, error=str(e))

    result = CascadeAnalysis(cascade_id=cascade.id, phases=phases)
    base = cascade_seed(config.seed, cascade.id)
    tables = {}
    for q, phase in _window_labels(phases, len(windows), config.all_windows):
        graph = build_window_graph(cascade, windows[q], social)
        if q not in tables:
            tables[q] = coverage_table(
                graph,
                k=config.k,
                restarts=config.restarts,
                rng_seed=np.random.SeedSequence([base, q]),
                strict_pseudocode=config.strict_pseudocode,
                depth_probabilities=config.depth_probabilities
            )
        table = tables[q]

        if phase == "steep":
            result.steep = {p.catalog_index: r.nc for p, r in table.items()}
        elif phase == "inhib":
            result.inhib = {p.catalog_index: r.nc for p, r in table.items()}

        for pattern, cov in table.items():
            result.coverage_rows.append({
                "cascade_id": cascade.id,
                "window": q,
                "phase": phase,
                "catalog_index": pattern.catalog_index,
                "instances": cov.instances,
                "covered_edges": len(cov.covered_edges),
                "total_edges": cov.total_edges,
                "nc": cov.nc,
                "iterations": cov.iterations,
                "restart_id": cov.restart_id
            })
        stats = window_statistics(graph)
        result.window_rows.append({"cascade_id": cascade.id, "window": q, "phase": phase, **stats})

    return result


_worker_social: Optional[SocialNetwork] = None
_worker_config: Optional[PipelineConfig] = None


def _init_worker(social: Optional[SocialNetwork], config: PipelineConfig):
    global _worker_social, _worker_config
    _worker_social = social
    _worker_config = config


def _analyze_in_worker(cascade: Cascade) -> CascadeAnalysis:
    return analyze_cascade(cascade, _worker_social, _worker_config)


class CascadeMotifPipeline:
    """Runs the corpus analysis with step-by-step progress output"""

    def __init__(self, config: PipelineConfig, verbose: bool = False):
        self.config = config
        self.verbose = verbose

    def _say(self, message: str = ""):
        if self.verbose:
            print(message)

    def load_cascades(self, records: Dict[str, Sequence[Tuple]]) -> Tuple[List[Cascade], Dict]:
        """Ingest every cascade and apply the size filter"""
        retained = []
        counts = {"cascades_read": len(records), "empty": 0, "too_small": 0}
        for cascade_id in sorted(records):
            try:
                cascade = ingest_cascade(records[cascade_id], cascade_id)
            except CascadeDataError as e:
                logger.warning(str(e))
                counts["empty"] += 1
                continue
            if len(cascade) < self.config.min_cascade:
                counts["too_small"] += 1
                continue
            retained.append(cascade)
        counts["retained"] = len(retained)
        return retained, counts

    def analyze(self, cascades: List[Cascade], social: Optional[SocialNetwork]) -> List[CascadeAnalysis]:
        """Per-cascade work, inline or across a worker pool; results in cascade-id order"""
        show_bar = self.verbose and len(cascades) > 1
        if self.config.workers == 1:
            iterator = tqdm(cascades, desc="Cascades", disable=not show_bar)
            results = [analyze_cascade(c, social, self.config) for c in iterator]
        else:
            with Pool(self.config.workers, initializer=_init_worker, initargs=(social, self.config)) as pool:
                stream = pool.imap_unordered(_analyze_in_worker, cascades, chunksize=1)
                results = list(tqdm(stream, total=len(cascades), desc="Cascades", disable=not show_bar))
        return sorted(results, key=lambda r: r.cascade_id)

    def run(self, records: Optional[Dict] = None, social: Optional[SocialNetwork] = None) -> CorpusReport:
        """
        Run the full analysis

        Args:
            records: Raw (source, target, time) records per cascade id;
                read from `config.events_path` when omitted
            social: Historical network; read from `config.social_path`
                when omitted (none if that is unset too)

        Returns:
            CorpusReport
        """
        config = self.config
        timings = {}
        started = time.perf_counter()

        self._say("\n" + "=" * 80)
        self._say("🌊 CASCADE MOTIF COVERAGE - Phase Comparison Run")
        self._say("=" * 80 + "\n")

        self._say("📥 STEP 1: INGESTING CASCADES")
        self._say("-" * 80)
        malformed = {"records": 0, "social": 0}
        if records is None:
            if not config.events_path:
                raise CascadeDataError("No cascade records given and no events path configured")
            try:
                records, malformed["records"] = read_cascade_records(config.events_path)
            except OSError as e:
                raise CascadeDataError(f"Cannot read events file: {e}") from e
        if social is None and config.social_path:
            try:
                social = read_social_edges(config.social_path)
            except OSError as e:
                raise CascadeDataError(f"Cannot read social network file: {e}") from e
        if social is None:
            social = build_social_network([])
        malformed["social"] = social.malformed

        cascades, counts = self.load_cascades(records)
        timings["ingest"] = time.perf_counter() - started
        self._say(f"✅ Read {counts['cascades_read']} cascades, kept {counts['retained']} "
                  f"(≥ {config.min_cascade} activations)")
        self._say(f"🕸️  Social network: {len(social)} historical edges\n")
        if not cascades:
            raise NoRetainedCascadesError(
                f"No cascade has at least {config.min_cascade} activations "
                f"({counts['cascades_read']} read)"
            )

        self._say(f"🔬 STEP 2: PHASES AND MOTIF COVERAGE (k={config.k}, W={config.window_size})")
        self._say("-" * 80)
        stage = time.perf_counter()
        analyses = self.analyze(cascades, social)
        timings["analyze"] = time.perf_counter() - stage

        report = CorpusReport(config=config)
        failures = []
        corpus = []
        catalog = build_catalog(config.k)
        for analysis in analyses:
            if not analysis.success:
                failures.append({"cascade_id": analysis.cascade_id, "success": False, "error": analysis.error})
                continue
            report.phases.append(analysis.phases)
            report.coverage_rows.extend(analysis.coverage_rows)
            report.window_rows.extend(analysis.window_rows)
            corpus.append((
                {catalog[i]: nc for i, nc in analysis.steep.items()},
                {catalog[i]: nc for i, nc in analysis.inhib.items()}
            ))

        fallbacks = sum(1 for p in report.phases if p.fallback)
        self._say(f"✅ Analyzed {len(corpus)} cascades ({len(failures)} failed, {fallbacks} with fallback inhibition)\n")

        self._say(f"📊 STEP 3: PHASE COMPARISON (Welch t-test, α={config.alpha})")
        self._say("-" * 80)
        stage = time.perf_counter()
        report.tests = compare_phases(corpus, config.alpha, config.absent_as_zero)
        timings["compare"] = time.perf_counter() - stage
        for t in report.tests:
            if t.skipped:
                continue
            marker = "🔥" if t.significant else "  "
            self._say(f"{marker} pattern {t.catalog_index:>3}: steep {t.means[0]:.3f} | "
                      f"inhib {t.means[1]:.3f} | p={t.p:.4g}")

        timings["total"] = time.perf_counter() - started
        report.metadata = {
            "config_hash": config_hash(config),
            "config": config.to_dict(),
            "counts": {
                **counts,
                "analyzed": len(corpus),
                "failed": len(failures),
                "fallback_phases": fallbacks,
                "patterns_tested": sum(1 for t in report.tests if not t.skipped),
                "patterns_significant": len(report.significant),
                "malformed_records": malformed["records"],
                "malformed_social": malformed["social"]
            },
            "failures": failures,
            "timings": {k: round(v, 3) for k, v in timings.items()}
        }

        self._say(f"\n{'=' * 80}")
        self._say(f"📊 {len(report.significant)} of {report.metadata['counts']['patterns_tested']} patterns differ significantly")
        self._say(f"{'=' * 80}\n")
        return report


def run_pipeline(config: PipelineConfig, records: Optional[Dict] = None,
                 social: Optional[SocialNetwork] = None, verbose: bool = False) -> CorpusReport:
    return CascadeMotifPipeline(config, verbose=verbose).run(records, social)
