"""
Cascade Motif Toolkit - Web Application
Flask JSON API over the motif catalog, coverage and full pipeline runs
"""

import math
import os
from datetime import datetime

import networkx as nx
from flask import Flask, jsonify, request
from dotenv import load_dotenv

from cascade_model import CascadeDataError, WindowGraph
from cascade_pipeline import run_pipeline
from motif_engine import build_catalog
from motif_percolation import coverage_table
from pipeline_config import GOOGLE_CREDENTIALS_FILE, ConfigError, load_config
from report_writer import emit_report
from sheets_export import save_report_to_google_sheets

# Load environment variables
load_dotenv()

app = Flask(__name__)


def _finite(value):
    """JSON has no inf/nan"""
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else str(value)
    return value


def _graph_from_edges(edges) -> WindowGraph:
    g = nx.Graph()
    for edge in edges:
        if len(edge) != 2:
            raise ValueError(f"Edge must be a pair, got {edge}")
        u, v = edge
        if u != v:
            g.add_edge(u, v)
    return WindowGraph.from_networkx(g)


@app.route('/health')
def health_check():
    """Health check endpoint for deployment monitoring"""
    return jsonify({
        'status': 'healthy',
        'timestamp': datetime.now().isoformat(),
        'google_sheets_configured': os.path.exists(GOOGLE_CREDENTIALS_FILE)
    })


@app.route('/api/catalog')
def api_catalog():
    """Connected pattern catalog for ?k= (default 5)"""
    try:
        k = request.args.get('k', 5, type=int)
        catalog = build_catalog(k)
        return jsonify({'k': k, 'count': len(catalog), 'patterns': [p.to_dict() for p in catalog]})
    except ValueError as e:
        return jsonify({'error': str(e)}), 400


@app.route('/api/coverage', methods=['POST'])
def api_coverage():
    """Coverage table of a posted edge list"""
    try:
        data = request.get_json(silent=True)
        if not data or 'edges' not in data:
            return jsonify({'error': 'edges is required'}), 400

        graph = _graph_from_edges(data['edges'])
        table = coverage_table(
            graph,
            k=int(data.get('k', 5)),
            restarts=int(data.get('restarts', 1)),
            rng_seed=data.get('seed', 0),
            strict_pseudocode=bool(data.get('strict_pseudocode', False))
        )
        return jsonify({
            'nodes': graph.order,
            'edges': len(graph.edges),
            'patterns': [
                {
                    'catalog_index': pattern.catalog_index,
                    'edge_count': pattern.edge_count,
                    'instances': cov.instances,
                    'covered_edges': len(cov.covered_edges),
                    'nc': cov.nc,
                    'iterations': cov.iterations
                }
                for pattern, cov in table.items()
            ]
        })

    except (ValueError, TypeError) as e:
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        return jsonify({'error': str(e)}), 500


@app.route('/api/run', methods=['POST'])
def api_run():
    """Full pipeline run; the body holds config overrides"""
    try:
        data = request.get_json(silent=True) or {}
        overrides = {k: v for k, v in data.items() if k not in ('config_file', 'save_to_sheets', 'spreadsheet_id')}
        for key in ('bandwidth_grid', 'depth_probabilities'):
            if overrides.get(key) is not None:
                overrides[key] = tuple(overrides[key])
        config = load_config(data.get('config_file'), **overrides)

        report = run_pipeline(config)
        emit_report(report)

        tests = [{k: _finite(v) for k, v in t.to_row().items()} for t in report.tests]
        response = {
            'success': True,
            'output_dir': config.output_dir,
            'metadata': report.metadata,
            'tests': tests
        }
        if data.get('save_to_sheets', False):
            response['sheet_info'] = save_report_to_google_sheets(
                [t.to_row() for t in report.tests], report.metadata, data.get('spreadsheet_id')
            )
        return jsonify(response)

    except (ConfigError, CascadeDataError) as e:
        return jsonify({'success': False, 'error': str(e)}), 400
    except Exception as e:
        return jsonify({'success': False, 'error': str(e)}), 500


if __name__ == '__main__':
    port = int(os.environ.get('PORT', 5000))
    app.run(host='0.0.0.0', port=port, debug=False)
