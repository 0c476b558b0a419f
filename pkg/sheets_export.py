"""
Cascade Motif Toolkit - Google Sheets Export
Appends phase-test tables to a shared Google Sheet, one block per run.
"""

import logging
from datetime import datetime
from typing import Dict, List, Optional

import gspread
from google.oauth2.service_account import Credentials

from pipeline_config import GOOGLE_CREDENTIALS_FILE, GOOGLE_SHEET_ID

logger = logging.getLogger(__name__)

SCOPES = ['https://www.googleapis.com/auth/spreadsheets', 'https://www.googleapis.com/auth/drive']
WORKSHEET_NAME = "Phase Tests"

HEADERS = [
    'Date Exported',     # 1
    'Config Hash',       # 2
    'Cascades',          # 3
    'Window Size',       # 4
    'Motif Size',        # 5
    'Alpha',             # 6
    'Pattern',           # 7
    'N Steep',           # 8
    'N Inhib',           # 9
    'Mean NC Steep',     # 10
    'Mean NC Inhib',     # 11
    't',                 # 12
    'dof',               # 13
    'p',                 # 14
    'Significant',       # 15
    'p (Bonferroni)'     # 16
]
HASH_COLUMN = 1


def get_google_sheets_client(credentials_file: Optional[str] = None):
    """Authorized gspread client from a service-account file, or None"""
    try:
        creds = Credentials.from_service_account_file(
            credentials_file or GOOGLE_CREDENTIALS_FILE,
            scopes=SCOPES
        )
        return gspread.authorize(creds)
    except Exception as e:
        logger.warning(f"Error connecting to Google Sheets: {e}")
        return None


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, float) and value != value:
        return ''
    if isinstance(value, float) and value in (float('inf'), float('-inf')):
        return str(value)
    return value


def report_rows(tests: List[Dict], metadata: Dict, timestamp: str) -> List[List]:
    """One sheet row per tested pattern"""
    config = metadata.get('config', {})
    analyzed = metadata.get('counts', {}).get('analyzed', 0)
    rows = []
    for test in tests:
        rows.append([_cell(v) for v in (
            timestamp,
            metadata.get('config_hash', ''),
            analyzed,
            config.get('window_size'),
            config.get('k'),
            config.get('alpha'),
            test['catalog_index'],
            test['n_steep'],
            test['n_inhib'],
            test['mean_steep'],
            test['mean_inhib'],
            test['t'],
            test['dof'],
            test['p'],
            'YES' if test['significant'] else 'no',
            test['p_bonferroni']
        )])
    return rows


def init_worksheet(worksheet, clear: bool = False):
    """Write (or reset) the header row"""
    if clear:
        worksheet.clear()
    worksheet.update('A1', [HEADERS])
    worksheet.format('A1:P1', {
        'textFormat': {'bold': True},
        'backgroundColor': {'red': 0.2, 'green': 0.4, 'blue': 0.6}
    })


def save_report_to_google_sheets(tests: List[Dict], metadata: Dict, spreadsheet_id: Optional[str] = None,
                                 client=None) -> Dict:
    """
    Append a run's phase tests to the sheet

    Runs whose config hash is already in the sheet are not added again.

    Args:
        tests: Phase-test rows (the phase_tests table as records)
        metadata: Run metadata with `config_hash`, `config` and `counts`
        spreadsheet_id: Sheet ID (uses GOOGLE_SHEET_ID if not provided)
        client: Authorized gspread client (created from credentials if omitted)

    Returns:
        Dict with success, rows_added and sheet_url, or an error
    """
    try:
        client = client or get_google_sheets_client()
        if not client:
            return {'success': False, 'error': 'Could not connect to Google Sheets'}

        sheet_id = spreadsheet_id or GOOGLE_SHEET_ID
        if sheet_id:
            spreadsheet = client.open_by_key(sheet_id)
        else:
            spreadsheet = client.create('Cascade Motif Coverage Results')
            sheet_id = spreadsheet.id

        try:
            worksheet = spreadsheet.worksheet(WORKSHEET_NAME)
        except gspread.exceptions.WorksheetNotFound:
            worksheet = spreadsheet.add_worksheet(title=WORKSHEET_NAME, rows=1000, cols=len(HEADERS))

        existing = worksheet.get_all_values()
        if not existing or not existing[0]:
            init_worksheet(worksheet)
            existing = [HEADERS]

        run_hash = metadata.get('config_hash', '')
        exported = {row[HASH_COLUMN] for row in existing[1:] if len(row) > HASH_COLUMN}
        sheet_url = f"https://docs.google.com/spreadsheets/d/{sheet_id}"
        if run_hash and run_hash in exported:
            logger.info(f"Run {run_hash[:12]} already exported, skipping")
            return {'success': True, 'rows_added': 0, 'skipped': True, 'sheet_url': sheet_url}

        rows = report_rows(tests, metadata, datetime.now().strftime("%Y-%m-%d %H:%M"))
        if rows:
            worksheet.append_rows(rows, value_input_option='USER_ENTERED')

        return {'success': True, 'rows_added': len(rows), 'skipped': False, 'sheet_url': sheet_url}

    except Exception as e:
        return {'success': False, 'error': str(e)}
