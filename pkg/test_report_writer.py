"""
Tests for writing, reading and printing corpus reports
"""

import json
import math

import pandas as pd
import pytest
from pandas.testing import assert_frame_equal

from cascade_pipeline import CorpusReport, run_pipeline
from cascade_model import build_social_network
from phase_comparison import compare_phases
from pipeline_config import PipelineConfig
from report_writer import (
    REPORT_FILES,
    SCHEMAS,
    analyzed_cascade_ids,
    coverage_corpus,
    emit_report,
    load_report,
    print_report,
    report_tables,
)
from synthetic_cascades import generate_synthetic


@pytest.fixture(scope="module")
def synthetic_report():
    corpus = generate_synthetic(n_cascades=4, nodes_per_cascade=80, window_size=20, seed=21)
    records = {}
    for cid, source, target, t in corpus.records:
        records.setdefault(cid, []).append((source, target, t))
    config = PipelineConfig(window_size=20, k=4, min_cascade=80, bandwidth=30.0, all_windows=True)
    return run_pipeline(config, records, build_social_network(corpus.social_edges))


def one_cascade_report():
    records = {"a": [(f"u{i}", f"u{i + 1}", float(i + 1)) for i in range(11)]}
    config = PipelineConfig(window_size=6, k=5, min_cascade=12, steep_window=0, inhib_window=1)
    return run_pipeline(config, records)


def test_emit_writes_every_file(tmp_path, synthetic_report):
    paths = emit_report(synthetic_report, tmp_path / "out")
    assert set(paths) == set(REPORT_FILES)
    for path in paths.values():
        assert path.exists()
    header = paths["phase_tests"].read_text().splitlines()[0]
    assert header == ",".join(SCHEMAS["phase_tests"])


def test_tables_read_back_unchanged(tmp_path, synthetic_report):
    emit_report(synthetic_report, tmp_path)
    loaded = load_report(tmp_path)
    for name, frame in report_tables(synthetic_report).items():
        assert_frame_equal(loaded[name], frame)
    assert loaded["metadata"] == synthetic_report.metadata
    assert loaded["phases"] == [p.to_dict() for p in synthetic_report.phases]


def test_saved_coverage_reproduces_tests(tmp_path, synthetic_report):
    emit_report(synthetic_report, tmp_path)
    coverage = load_report(tmp_path)["window_coverage"]
    retested = compare_phases(coverage_corpus(coverage, 4), synthetic_report.config.alpha)
    assert [t.to_row() for t in retested] == [t.to_row() for t in synthetic_report.tests]


def test_coverage_table_carries_other_windows(synthetic_report):
    coverage = report_tables(synthetic_report)["window_coverage"]
    assert set(coverage["phase"]) == {"steep", "inhib", "other"}
    assert coverage["nc"].between(0.0, 1.0).all()


def test_skipped_tests_are_blank(tmp_path):
    report = one_cascade_report()
    assert all(t.skipped for t in report.tests)
    emit_report(report, tmp_path)
    tests = load_report(tmp_path)["phase_tests"]
    assert tests["p"].isna().all()
    assert tests["t"].isna().all()
    assert not tests["significant"].any()
    assert (tests["n_steep"] == 1).all()


def test_empty_report_writes_headers_only(tmp_path):
    report = CorpusReport(config=PipelineConfig())
    paths = emit_report(report, tmp_path)
    for name in SCHEMAS:
        assert paths[name].read_text().strip() == ",".join(SCHEMAS[name])
    loaded = load_report(tmp_path)
    for name, schema in SCHEMAS.items():
        assert list(loaded[name].columns) == list(schema)
        assert len(loaded[name]) == 0
        assert dict(loaded[name].dtypes.astype(str)) == schema


def test_infinite_statistics_survive(tmp_path):
    frame = pd.DataFrame([{
        "catalog_index": 0, "n_steep": 2, "n_inhib": 2, "mean_steep": 0.5, "mean_inhib": 0.7,
        "t": -math.inf, "dof": 2.0, "p": 0.0, "significant": True, "p_bonferroni": 0.0
    }]).astype(SCHEMAS["phase_tests"])
    frame.to_csv(tmp_path / REPORT_FILES["phase_tests"], index=False, lineterminator="\n")
    parsed = pd.read_csv(tmp_path / REPORT_FILES["phase_tests"]).astype(SCHEMAS["phase_tests"])
    assert parsed["t"].iloc[0] == -math.inf


def test_print_report(capsys, tmp_path, synthetic_report):
    emit_report(synthetic_report, tmp_path)
    loaded = load_report(tmp_path)
    print_report(loaded["phase_tests"], loaded["metadata"])
    out = capsys.readouterr().out
    assert "PHASE COMPARISON" in out
    assert f"Cascades analyzed: {synthetic_report.metadata['counts']['analyzed']}" in out
    assert "Significance: p < 0.01" in out


def test_print_report_marks_skipped(capsys, tmp_path):
    emit_report(one_cascade_report(), tmp_path)
    print_report(load_report(tmp_path)["phase_tests"], alpha=0.05)
    out = capsys.readouterr().out
    assert "skipped" in out
    assert "p < 0.05" in out


def test_reruns_write_identical_tables(tmp_path, synthetic_report):
    corpus = generate_synthetic(n_cascades=4, nodes_per_cascade=80, window_size=20, seed=21)
    records = {}
    for cid, source, target, t in corpus.records:
        records.setdefault(cid, []).append((source, target, t))
    rerun = run_pipeline(synthetic_report.config, records, build_social_network(corpus.social_edges))
    first = emit_report(synthetic_report, tmp_path / "first")
    second = emit_report(rerun, tmp_path / "second")
    for name in ("phase_tests", "window_coverage", "coverage_plot", "window_stats", "phases"):
        assert first[name].read_bytes() == second[name].read_bytes()


def test_cascades_without_coverage_rows_count_as_zero(tmp_path):
    coverage = pd.DataFrame({
        "cascade_id": ["a", "a", "c", "c"],
        "phase": ["steep", "inhib", "steep", "inhib"],
        "catalog_index": [0, 0, 0, 0],
        "nc": [0.5, 0.7, 0.4, 0.9]
    })
    (tmp_path / "phases.json").write_text(json.dumps([{"cascade_id": c} for c in ("a", "b", "c")]))
    ids = analyzed_cascade_ids(tmp_path / "window_coverage.csv")
    assert ids == ["a", "b", "c"]

    corpus = coverage_corpus(coverage, 3, ids)
    assert len(corpus) == 3
    assert corpus[1] == ({}, {})
    (test,) = compare_phases(corpus, 0.05)
    assert tuple(test.n) == (3, 3)
    assert test.means[0] == pytest.approx(0.3)


def test_no_phases_file_means_no_extra_cascades(tmp_path):
    assert analyzed_cascade_ids(tmp_path / "window_coverage.csv") is None
