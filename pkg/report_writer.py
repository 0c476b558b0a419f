"""
Cascade Motif Toolkit - Report Writer
Writes a corpus report as CSV/JSON files, parses them back, and prints a
console summary.
"""

import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

import pandas as pd

from cascade_pipeline import COVERAGE_COLUMNS, WINDOW_STAT_COLUMNS, CorpusReport
from motif_engine import build_catalog
from phase_comparison import PHASES, TEST_COLUMNS, phase_means_table

logger = logging.getLogger(__name__)

REPORT_FILES = {
    "phase_tests": "phase_tests.csv",
    "window_coverage": "window_coverage.csv",
    "coverage_plot": "coverage_plot.csv",
    "window_stats": "window_stats.csv",
    "phases": "phases.json",
    "metadata": "run_metadata.json"
}

PLOT_COLUMNS = ["phase", "catalog_index", "n", "mean_nc"]

SCHEMAS = {
    "phase_tests": dict(zip(TEST_COLUMNS, [
        "int64", "int64", "int64", "float64", "float64",
        "float64", "float64", "float64", "bool", "float64"
    ])),
    "window_coverage": dict(zip(COVERAGE_COLUMNS, [
        "object", "int64", "object", "int64", "int64",
        "int64", "int64", "float64", "int64", "int64"
    ])),
    "coverage_plot": dict(zip(PLOT_COLUMNS, ["object", "int64", "int64", "float64"])),
    "window_stats": dict(zip(WINDOW_STAT_COLUMNS, [
        "object", "int64", "object", "int64", "int64", "int64",
        "int64", "int64", "float64", "float64"
    ]))
}


def _typed(rows: List[Dict], table: str) -> pd.DataFrame:
    schema = SCHEMAS[table]
    frame = pd.DataFrame(rows, columns=list(schema)) if rows else pd.DataFrame(columns=list(schema))
    return frame.astype(schema)


def report_tables(report: CorpusReport) -> Dict[str, pd.DataFrame]:
    """The report's tables as typed DataFrames"""
    return {
        "phase_tests": _typed([t.to_row() for t in report.tests], "phase_tests"),
        "window_coverage": _typed(report.coverage_rows, "window_coverage"),
        "coverage_plot": _typed(phase_means_table(report.tests), "coverage_plot"),
        "window_stats": _typed(report.window_rows, "window_stats")
    }


def emit_report(report: CorpusReport, output_dir=None) -> Dict[str, Path]:
    """
    Write every report file into `output_dir` (default: the config's)

    Returns:
        Table name to written path
    """
    out = Path(output_dir or report.config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    paths = {name: out / filename for name, filename in REPORT_FILES.items()}
    for name, frame in report_tables(report).items():
        frame.to_csv(paths[name], index=False, lineterminator="\n")

    with paths["phases"].open("w", encoding="utf-8") as f:
        json.dump([p.to_dict() for p in report.phases], f, indent=2)
    with paths["metadata"].open("w", encoding="utf-8") as f:
        json.dump(report.metadata, f, indent=2, sort_keys=True)

    logger.info(f"Report written to {out}")
    return paths


def load_report(report_dir) -> Dict:
    """
    Parse a report directory back into typed tables

    Returns:
        Dict with one DataFrame per CSV table plus `phases` and `metadata`
    """
    base = Path(report_dir)
    loaded = {}
    for name, schema in SCHEMAS.items():
        path = base / REPORT_FILES[name]
        text_columns = {c: str for c, kind in schema.items() if kind == "object"}
        frame = pd.read_csv(path, dtype=text_columns, float_precision="round_trip", keep_default_na=False,
                            na_values=[""])
        loaded[name] = frame.reindex(columns=list(schema)).astype(schema)

    with (base / REPORT_FILES["phases"]).open("r", encoding="utf-8") as f:
        loaded["phases"] = json.load(f)
    with (base / REPORT_FILES["metadata"]).open("r", encoding="utf-8") as f:
        loaded["metadata"] = json.load(f)
    return loaded


def print_report(tests: pd.DataFrame, metadata: Optional[Dict] = None, alpha: Optional[float] = None):
    """Console table of the phase tests"""
    print("\n" + "=" * 80)
    print("📊 PHASE COMPARISON - mean network coverage per pattern")
    print("=" * 80)
    if metadata:
        counts = metadata.get("counts", {})
        print(f"Cascades analyzed: {counts.get('analyzed', '?')} | "
              f"failed: {counts.get('failed', 0)} | "
              f"fallback phases: {counts.get('fallback_phases', 0)}")
        print(f"Config hash: {metadata.get('config_hash', '')[:16]}")
        if alpha is None:
            alpha = metadata.get("config", {}).get("alpha")
    print("-" * 80)
    print(f"{'pattern':>8} {'n':>9} {'steep':>8} {'inhib':>8} {'t':>9} {'dof':>8} {'p':>10}  sig")
    for row in tests.itertuples(index=False):
        if pd.isna(row.p):
            stat = f"{'-':>9} {'-':>8} {'skipped':>10}"
        else:
            stat = f"{row.t:>9.3f} {row.dof:>8.1f} {row.p:>10.4g}"
        flag = "🔥" if row.significant else ""
        print(f"{row.catalog_index:>8} {row.n_steep:>4}/{row.n_inhib:<4} "
              f"{row.mean_steep:>8.3f} {row.mean_inhib:>8.3f} {stat}  {flag}")
    if alpha is not None:
        print(f"\nSignificance: p < {alpha}")
    print("=" * 80 + "\n")


def coverage_corpus(coverage: pd.DataFrame, k: int, cascade_ids: Optional[Iterable[str]] = None) -> List[Tuple[Dict, Dict]]:
    """
    Rebuild per-cascade (steep, inhibition) NC tables from a saved
    window_coverage table, cascades in id order

    Args:
        coverage: window_coverage table
        k: Motif size the table was computed with
        cascade_ids: Every analyzed cascade (from phases.json); cascades
            without coverage rows get empty tables

    Returns:
        One (steep, inhibition) pair of pattern -> NC dicts per cascade
    """
    catalog = build_catalog(k)
    grouped = dict(tuple(coverage.groupby("cascade_id", sort=True)))
    ids = set(grouped) | set(cascade_ids or ())
    corpus = []
    for cascade_id in sorted(ids):
        rows = grouped.get(cascade_id)
        tables = {phase: {} for phase in PHASES}
        if rows is not None:
            for phase in PHASES:
                picked = rows[rows["phase"] == phase]
                tables[phase] = {catalog[int(i)]: float(nc) for i, nc in zip(picked["catalog_index"], picked["nc"])}
        corpus.append((tables["steep"], tables["inhib"]))
    return corpus


def analyzed_cascade_ids(coverage_path) -> Optional[List[str]]:
    """Cascade ids from the phases.json beside a coverage CSV, if present"""
    path = Path(coverage_path).with_name(REPORT_FILES["phases"])
    if not path.exists():
        return None
    with path.open("r", encoding="utf-8") as f:
        return [str(p["cascade_id"]) for p in json.load(f)]
