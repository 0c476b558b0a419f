"""
Acceptance experiments for the Cascade Motif Toolkit

Corpus-scale checks on synthetic data with a planted ground truth:
  planted      - denser triad-closing edges after the burst must show up as
                 a significant triad pattern with higher inhibition coverage
  null         - equal densities must flag nothing in at least 95% of runs
  determinism  - the same seed must give byte-identical report CSVs
"""

import os
import sys
import tempfile
import time
from pathlib import Path
from typing import List, Optional

from cascade_pipeline import CorpusReport, run_pipeline
from phase_comparison import TTestResult
from pipeline_config import PipelineConfig
from report_writer import SCHEMAS, emit_report
from synthetic_cascades import generate_synthetic

N_CASCADES = 200
NODES = 320
STEEP_DENSITY = 0.02
PLANTED_RATIO = 3.0
CSV_TABLES = tuple(SCHEMAS)


def corpus_report(seed: int, steep_density: float, inhib_density: float, n_cascades: int = N_CASCADES,
                  workdir: Optional[Path] = None, workers: Optional[int] = None) -> CorpusReport:
    """Generate a corpus and run the full pipeline over it"""
    workdir = Path(workdir or tempfile.mkdtemp(prefix="cascades_"))
    generate_synthetic(
        n_cascades=n_cascades,
        nodes_per_cascade=NODES,
        steep_density=steep_density,
        inhib_density=inhib_density,
        seed=seed,
        output_dir=workdir
    )
    config = PipelineConfig(
        seed=seed,
        min_cascade=NODES,
        workers=workers or os.cpu_count() or 1,
        events_path=str(workdir / "cascades.csv"),
        social_path=str(workdir / "social_edges.txt"),
        output_dir=str(workdir / "report")
    )
    return run_pipeline(config)


def familywise_significant(report: CorpusReport) -> List[TTestResult]:
    """Tests still significant after the Bonferroni correction over all tested patterns"""
    alpha = report.config.alpha
    return [t for t in report.tests if not t.skipped and t.p_bonferroni is not None and t.p_bonferroni < alpha]


def planted_hits(report: CorpusReport) -> List[TTestResult]:
    """Familywise-significant triad patterns whose inhibition mean exceeds the steep mean"""
    return [
        t for t in familywise_significant(report)
        if t.pattern.has_triangle and t.means[1] > t.means[0]
    ]


def check_planted(seed: int = 7, n_cascades: int = N_CASCADES) -> bool:
    print("\n" + "=" * 80)
    print("TEST 1: Planted triad difference")
    print("=" * 80)
    started = time.perf_counter()
    report = corpus_report(seed, STEEP_DENSITY, STEEP_DENSITY * PLANTED_RATIO, n_cascades)
    hits = planted_hits(report)
    for t in report.tests:
        if not t.skipped:
            marker = "🔥" if t in hits else "  "
            print(f"{marker} pattern {t.catalog_index:>3}: steep {t.means[0]:.3f} | inhib {t.means[1]:.3f} | p={t.p:.3g}")
    elapsed = time.perf_counter() - started
    ok = bool(hits)
    print(f"\n{'✅' if ok else '❌'} {len(hits)} triad patterns significant with higher inhibition coverage ({elapsed:.0f}s)\n")
    return ok


def check_null(replications: int = 20, n_cascades: int = N_CASCADES) -> bool:
    print("\n" + "=" * 80)
    print("TEST 2: Null corpus (equal densities)")
    print("=" * 80)
    clean = 0
    for r in range(replications):
        report = corpus_report(1000 + r, STEEP_DENSITY, STEEP_DENSITY, n_cascades)
        flagged = [t.catalog_index for t in familywise_significant(report)]
        clean += not flagged
        print(f"  replication {r:>2}: {'clean' if not flagged else f'flagged {flagged}'}")
    rate = clean / replications
    ok = rate >= 0.95
    print(f"\n{'✅' if ok else '❌'} {clean}/{replications} replications flagged nothing\n")
    return ok


def check_determinism(seed: int = 7, n_cascades: int = N_CASCADES) -> bool:
    print("\n" + "=" * 80)
    print("TEST 3: Determinism")
    print("=" * 80)
    outputs = []
    for _ in range(2):
        workdir = Path(tempfile.mkdtemp(prefix="cascades_"))
        report = corpus_report(seed, STEEP_DENSITY, STEEP_DENSITY * PLANTED_RATIO, n_cascades, workdir)
        paths = emit_report(report)
        outputs.append({name: paths[name].read_bytes() for name in CSV_TABLES})
    ok = outputs[0] == outputs[1]
    print(f"{'✅' if ok else '❌'} report CSVs {'identical' if ok else 'differ'} across runs\n")
    return ok


if __name__ == "__main__":
    sys.stdout.reconfigure(encoding='utf-8')

    checks = {"planted": check_planted, "null": check_null, "determinism": check_determinism}
    if len(sys.argv) > 1:
        name = sys.argv[1]
        if name not in checks:
            print("Usage: python acceptance_check.py [planted|null|determinism]")
            sys.exit(1)
        sys.exit(0 if checks[name]() else 1)
    else:
        results = [check() for check in checks.values()]
        sys.exit(0 if all(results) else 1)
