"""
Cascade Motif Toolkit - Command Line
Subcommands for each pipeline stage plus the full run.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import networkx as nx
import pandas as pd

from cascade_model import (
    CascadeDataError,
    WindowGraph,
    build_social_network,
    build_window_graph,
    ingest_cascade,
    read_cascade_records,
    read_social_edges,
    segment,
    window_statistics,
)
from cascade_pipeline import CascadeMotifPipeline, phases_for
from motif_engine import catalog_to_json, instances_by_pattern
from motif_percolation import coverage_table
from phase_comparison import compare_phases
from pipeline_config import ConfigError, PipelineConfig, load_config
from report_writer import analyzed_cascade_ids, coverage_corpus, emit_report, load_report, print_report, report_tables
from sheets_export import save_report_to_google_sheets
from synthetic_cascades import BurstProfile, generate_synthetic

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class CliParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str):
    return tuple(float(x) for x in text.replace(",", " ").split())


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group('pipeline settings (override the config file)')
    g.add_argument('--config', help='key=value config file')
    g.add_argument('--events', dest='events_path', help='Cascade records (CSV or JSON lines)')
    g.add_argument('--social', dest='social_path', help='Historical edges, one "u v" pair per line')
    g.add_argument('--output-dir', help='Report directory')
    g.add_argument('--window-size', type=int, help='Activations per window W (default: 80)')
    g.add_argument('--k', type=int, help='Motif size (default: 5)')
    g.add_argument('--min-cascade', type=int, help='Minimum activations per cascade (default: 300)')
    g.add_argument('--alpha', type=float, help='Significance level (default: 0.01)')
    g.add_argument('--restarts', type=int, help='Percolation restarts per pattern (default: 1)')
    g.add_argument('--seed', type=int, help='Master random seed (default: 0)')
    g.add_argument('--strict-pseudocode', action='store_true', default=None,
                   help='Admit only instances sharing exactly k-1 covered vertices')
    g.add_argument('--steep-window', type=int, help='Use this steep window instead of detecting it')
    g.add_argument('--inhib-window', type=int, help='Use this inhibition window instead of detecting it')
    g.add_argument('--bandwidth', type=float, help='Fixed kernel bandwidth in seconds (default: fitted)')
    g.add_argument('--bandwidth-grid', type=_floats, help='Candidate bandwidths, comma separated')
    g.add_argument('--quiescence', type=float, help='Inhibition threshold as a fraction of the peak (default: 0.05)')
    g.add_argument('--depth-probabilities', type=_floats, help='RAND-ESU keep probabilities, one per depth')
    g.add_argument('--workers', type=int, help='Worker processes (default: 1)')
    g.add_argument('--all-windows', action='store_true', default=None, help='Also cover every non-phase window')
    g.add_argument('--log-level', default='WARNING', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    g.add_argument('-v', '--verbose', action='store_true', help='Print step-by-step progress')
    return common


CONFIG_FLAGS = (
    'events_path', 'social_path', 'output_dir', 'window_size', 'k', 'min_cascade', 'alpha',
    'restarts', 'seed', 'strict_pseudocode', 'steep_window', 'inhib_window', 'bandwidth',
    'bandwidth_grid', 'quiescence', 'depth_probabilities', 'workers', 'all_windows'
)


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = CliParser(
        prog='motif_coverage.py',
        description='Cascade Motif Toolkit - motif coverage of steep vs inhibition cascade phases',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Generate a planted-difference corpus
  python motif_coverage.py simulate --n-cascades 200 --nodes 320 --out data/

  # Full run with a report
  python motif_coverage.py run --events data/cascades.csv --social data/social_edges.txt --output-dir report/ -v

  # Phases only, with a fixed bandwidth
  python motif_coverage.py detect-phases --events data/cascades.csv --bandwidth 60

  # Re-test a saved coverage table at a different alpha
  python motif_coverage.py compare --coverage report/window_coverage.csv --alpha 0.05

  # Pattern catalog for k=4
  python motif_coverage.py motifs --catalog --k 4

Pipeline:
  1. ingest   - group records per cascade, drop repeats, size filter
  2. segment  - windows of W activations
  3. phases   - steep and inhibition windows from the reshare intensity
  4. motifs   - connected k-vertex patterns in each phase window
  5. coverage - motif percolation NC per pattern
  6. compare  - Welch t-test per pattern, steep vs inhibition
        """
    )
    sub = parser.add_subparsers(dest='command', metavar='command', parser_class=CliParser)
    sub.required = True

    sub.add_parser('ingest', parents=[common], help='Summarize cascades after ingestion')
    p = sub.add_parser('segment', parents=[common], help='List windows and their graph statistics')
    p.add_argument('--cascade', help='Only this cascade id')
    p = sub.add_parser('detect-phases', parents=[common], help='Steep and inhibition windows per cascade (JSON lines)')
    p.add_argument('--cascade', help='Only this cascade id')
    p = sub.add_parser('motifs', parents=[common], help='Pattern catalog or per-pattern instance counts')
    p.add_argument('--catalog', action='store_true', help='Print the connected-pattern catalog as JSON')
    p.add_argument('--edges', help='Graph as "u v" edge lines')
    p = sub.add_parser('percolate', parents=[common], help='Coverage table of an edge-list graph')
    p.add_argument('--edges', required=True, help='Graph as "u v" edge lines')
    p = sub.add_parser('compare', parents=[common], help='Phase tests from a saved window_coverage.csv')
    p.add_argument('--coverage', required=True, help='window_coverage.csv from an earlier run')
    p.add_argument('--save', help='Write the test table to this CSV')
    p = sub.add_parser('simulate', parents=[common], help='Generate a synthetic corpus')
    p.add_argument('--n-cascades', type=int, default=200)
    p.add_argument('--nodes', type=int, default=320, help='Activations per cascade')
    p.add_argument('--burst-window', type=int, default=1)
    p.add_argument('--burst-ratio', type=float, default=10.0)
    p.add_argument('--base-gap', type=float, default=60.0, help='Mean gap before the burst, seconds')
    p.add_argument('--tail-growth', type=float, default=1.01, help='Per-event gap growth after the burst')
    p.add_argument('--steep-density', type=float, default=0.02)
    p.add_argument('--inhib-density', type=float, default=0.06)
    p.add_argument('--locality', type=float, default=1.0)
    p.add_argument('--out', required=True, help='Output directory')
    p = sub.add_parser('report', parents=[common], help='Print (and optionally export) a saved report')
    p.add_argument('--report-dir', required=True)
    p.add_argument('--to-sheets', action='store_true', help='Append the test table to Google Sheets')
    p = sub.add_parser('run', parents=[common], help='Full pipeline with report files')
    p.add_argument('--to-sheets', action='store_true', help='Append the test table to Google Sheets')
    return parser


def config_from_args(args) -> PipelineConfig:
    overrides = {name: getattr(args, name, None) for name in CONFIG_FLAGS}
    return load_config(args.config, **overrides)


def _load_records(config: PipelineConfig):
    if not config.events_path:
        raise UsageError("--events is required for this command")
    records, _ = read_cascade_records(config.events_path)
    return records


def _load_social(config: PipelineConfig):
    return read_social_edges(config.social_path) if config.social_path else build_social_network([])


def _load_graph(path) -> WindowGraph:
    with Path(path).open("r", encoding="utf-8") as f:
        pairs = build_social_network(line for line in f if line.strip()).edges
    g = nx.Graph()
    g.add_edges_from(sorted(pairs))
    return WindowGraph.from_networkx(g)


def _cascades(config: PipelineConfig, only: Optional[str] = None):
    records = _load_records(config)
    for cascade_id in sorted(records):
        if only is not None and cascade_id != only:
            continue
        try:
            yield ingest_cascade(records[cascade_id], cascade_id)
        except CascadeDataError as e:
            logging.getLogger(__name__).warning(str(e))


def cmd_ingest(args, config):
    kept = 0
    print(f"{'cascade':<16} {'activations':>11} {'duration':>12}  kept")
    for cascade in _cascades(config):
        ok = len(cascade) >= config.min_cascade
        kept += ok
        print(f"{cascade.id:<16} {len(cascade):>11} {cascade.duration:>12.1f}  {'✅' if ok else '-'}")
    print(f"\n{kept} cascades with at least {config.min_cascade} activations")
    return EXIT_OK


def cmd_segment(args, config):
    social = _load_social(config)
    for cascade in _cascades(config, args.cascade):
        try:
            windows = segment(cascade, config.window_size, config.k)
        except CascadeDataError as e:
            print(f"⏭️  {e}")
            continue
        print(f"\n📋 {cascade.id}: {len(windows)} windows")
        for w in windows:
            stats = window_statistics(build_window_graph(cascade, w, social))
            print(f"  window {w.index:>3}: t=[{w.start_time:.1f}, {w.end_time:.1f}] "
                  f"edges={stats['edges']} (reshare {stats['reshare_edges']}, historical {stats['historical_edges']}) "
                  f"triangles={stats['triangles']}")
    return EXIT_OK


def cmd_detect_phases(args, config):
    for cascade in _cascades(config, args.cascade):
        try:
            windows = segment(cascade, config.window_size, config.k)
            phases = phases_for(cascade, windows, config)
        except ValueError as e:
            print(json.dumps({"cascade_id": cascade.id, "success": False, "error": str(e)}))
            continue
        print(json.dumps(phases.to_dict()))
    return EXIT_OK


def cmd_motifs(args, config):
    if args.catalog:
        print(catalog_to_json(config.k))
        return EXIT_OK
    if not args.edges:
        raise UsageError("motifs needs --catalog or --edges")
    graph = _load_graph(args.edges)
    grouped = instances_by_pattern(graph, config.k, config.depth_probabilities, config.seed)
    print(f"{'pattern':>8} {'edges':>6} {'instances':>10}")
    for pattern, instances in grouped.items():
        print(f"{pattern.catalog_index:>8} {pattern.edge_count:>6} {len(instances):>10}")
    return EXIT_OK


def cmd_percolate(args, config):
    graph = _load_graph(args.edges)
    table = coverage_table(graph, config.k, config.restarts, config.seed,
                           config.strict_pseudocode, config.depth_probabilities)
    print(f"{'pattern':>8} {'instances':>10} {'covered':>8} {'total':>6} {'nc':>7} {'passes':>7}")
    for pattern, cov in table.items():
        print(f"{pattern.catalog_index:>8} {cov.instances:>10} {len(cov.covered_edges):>8} "
              f"{cov.total_edges:>6} {cov.nc:>7.3f} {cov.iterations:>7}")
    return EXIT_OK


def cmd_compare(args, config):
    frame = pd.read_csv(args.coverage, dtype={"cascade_id": str, "phase": str})
    corpus = coverage_corpus(frame, config.k, analyzed_cascade_ids(args.coverage))
    tests = compare_phases(corpus, config.alpha, config.absent_as_zero)
    table = pd.DataFrame([t.to_row() for t in tests])
    if args.save:
        table.to_csv(args.save, index=False, lineterminator="\n")
    print_report(table, alpha=config.alpha)
    return EXIT_OK


def cmd_simulate(args, config):
    profile = BurstProfile(
        burst_window=args.burst_window,
        ratio=args.burst_ratio,
        base_gap=args.base_gap,
        tail_growth=args.tail_growth
    )
    corpus = generate_synthetic(
        n_cascades=args.n_cascades,
        nodes_per_cascade=args.nodes,
        profile=profile,
        steep_density=args.steep_density,
        inhib_density=args.inhib_density,
        seed=config.seed,
        window_size=config.window_size,
        locality=args.locality,
        output_dir=args.out
    )
    print(f"✅ {len(corpus.cascade_ids)} cascades, {len(corpus.records)} reshares, "
          f"{len(corpus.social_edges)} historical edges written to {args.out}")
    return EXIT_OK


def _export(tests: pd.DataFrame, metadata):
    result = save_report_to_google_sheets(tests.to_dict('records'), metadata)
    if result.get('success'):
        print(f"📤 Google Sheets: {result['rows_added']} rows added - {result['sheet_url']}")
    else:
        print(f"❌ Google Sheets export failed: {result.get('error')}")


def cmd_report(args, config):
    loaded = load_report(args.report_dir)
    print_report(loaded["phase_tests"], loaded["metadata"])
    if args.to_sheets:
        _export(loaded["phase_tests"], loaded["metadata"])
    return EXIT_OK


def cmd_run(args, config):
    report = CascadeMotifPipeline(config, verbose=args.verbose).run()
    paths = emit_report(report)
    tests = report_tables(report)["phase_tests"]
    print_report(tests, report.metadata)
    print(f"💾 Report saved to: {paths['phase_tests'].parent}")
    if args.to_sheets:
        _export(tests, report.metadata)
    return EXIT_OK


COMMANDS = {
    'ingest': cmd_ingest,
    'segment': cmd_segment,
    'detect-phases': cmd_detect_phases,
    'motifs': cmd_motifs,
    'percolate': cmd_percolate,
    'compare': cmd_compare,
    'simulate': cmd_simulate,
    'report': cmd_report,
    'run': cmd_run
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(levelname)s %(name)s: %(message)s")

    try:
        config = config_from_args(args)
        return COMMANDS[args.command](args, config)
    except (CascadeDataError, OSError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_DATA
    except (ConfigError, UsageError, ValueError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.stdout.reconfigure(encoding='utf-8')
    sys.exit(main())
