"""
Тесты пакетного прогона: статусы проверок, запись результатов и возобновление.
"""

import asyncio

from data_validator import DEFAULT_BUDGETS, DataValidator
from resume_manager import ResumeManager
from sweep_processor import STATUS_ERROR, STATUS_FAILED, STATUS_PASSED, SweepProcessor, run_check

SMALL_SPEC = {
    'n': [0, 2], 'a': [1, 2], 'b': [1, 2], 'regime': 'PF',
    'checks': ['pf-check', 'roots'], 'budgets': {'window': 5, 'max_order': 2},
}


def test_run_check_statuses():
    budgets = dict(DEFAULT_BUDGETS)
    assert run_check('pf-check', (4, 1, 1, 2), budgets)['status'] == STATUS_PASSED
    assert run_check('pf-check', (0, 0, 2, 1), budgets)['status'] == STATUS_FAILED

    error = run_check('roots', (0, 0, 2, 1), budgets)
    assert error['status'] == STATUS_ERROR
    assert error['error_type'] == 'InvalidParamsError'

    over = run_check('pf-check', (4, 1, 1, 2), dict(budgets, minor_cap=5))
    assert over['status'] == STATUS_ERROR
    assert over['error_type'] == 'BudgetExceededError'


def test_check_results_carry_details():
    budgets = dict(DEFAULT_BUDGETS, jmax=30)
    gen = run_check('gen', (4, 1, 1, 2), dict(budgets, length=5))
    assert gen['sequence']['values'] == [4, 10, 6, 1, 0]

    roots = run_check('roots', (4, 1, 1, 2), budgets)
    assert roots['certificate']['log_concave'] and roots['certificate']['unimodal']

    classify = run_check('classify', (3, 1, 2, 1), budgets)
    assert classify['status'] == STATUS_PASSED
    assert classify['log_convex_band']['passed']

    coupling = run_check('coupling', (0, 0, 2, 1), budgets)
    assert coupling['passed'] and coupling['x_star'] is None


def test_sweep_runs_and_resumes(tmp_path):
    spec = DataValidator().parse_sweep_spec(SMALL_SPEC)
    results_file = tmp_path / 'sweep.jsonl'
    processor = SweepProcessor({'show_progress': False, 'batch_size': 3})
    batches = []

    summary = asyncio.run(processor.run(spec, str(results_file), on_batch=batches.append))
    assert summary['jobs'] == 10
    assert summary['computed'] == 10
    assert summary[STATUS_PASSED] == 10
    assert summary['failures'] == []
    assert summary['resume']['recorded'] == 0
    assert batches == [3, 6, 9, 10]
    content = results_file.read_text(encoding='utf-8')
    assert len(content.splitlines()) == 10

    again = asyncio.run(processor.run(spec, str(results_file)))
    assert again['computed'] == 0
    assert again['skipped'] == 10
    assert again['resume']['recorded'] == 10
    assert again['resume']['failed'] == 0
    assert results_file.read_text(encoding='utf-8') == content

    records = asyncio.run(ResumeManager(results_file).load_results())
    assert records[0]['key']['check'] == 'pf-check'
    assert records[0]['key']['budgets']['window'] == 5


def test_budget_override_changes_keys_and_reports_errors(tmp_path):
    spec = DataValidator().parse_sweep_spec(dict(SMALL_SPEC, checks=['pf-check']))
    results_file = tmp_path / 'sweep.jsonl'
    processor = SweepProcessor({'show_progress': False}, budget_override=1)
    assert processor.effective_budgets(spec)['minor_cap'] == 1

    summary = asyncio.run(processor.run(spec, str(results_file)))
    assert summary['computed'] == 5
    assert summary[STATUS_ERROR] == 5
    assert all(f['status'] == STATUS_ERROR for f in summary['failures'])
