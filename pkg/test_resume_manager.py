"""
Тесты файла результатов: дописывание, повторная загрузка, пропуск записанных ключей.
"""

import asyncio
import json

from exact_core import RayParams
from resume_manager import ResumeManager, key_token, record_key

BUDGETS = {'window': 8, 'max_order': 4}


def _records(quadruples):
    return [
        {'key': record_key('pf-check', RayParams(*q), BUDGETS), 'result': {'passed': True}}
        for q in quadruples
    ]


def test_record_key_is_canonical():
    key = record_key('roots', RayParams(4, 1, 1, 2), {'b': 2, 'a': 1})
    assert list(key['budgets']) == ['a', 'b']
    assert key_token(key) == key_token(record_key('roots', RayParams(4, 1, 1, 2), {'a': 1, 'b': 2}))
    assert key_token(key) != key_token(record_key('roots', RayParams(4, 1, 1, 2), {'a': 1, 'b': 3}))


def test_append_and_reload(tmp_path):
    results_file = tmp_path / 'out' / 'results.jsonl'

    async def scenario():
        manager = ResumeManager(results_file)
        written = await manager.append_batch(_records([(4, 1, 1, 2), (3, 0, 1, 2)]))
        again = await manager.append_batch(_records([(4, 1, 1, 2)]))

        fresh = ResumeManager(results_file)
        recorded = await fresh.load_recorded_keys()
        is_known = await fresh.is_recorded(record_key('pf-check', RayParams(3, 0, 1, 2), BUDGETS))
        is_new = await fresh.is_recorded(record_key('roots', RayParams(3, 0, 1, 2), BUDGETS))
        info = await fresh.get_resume_info()
        return written, again, recorded, is_known, is_new, info

    written, again, recorded, is_known, is_new, info = asyncio.run(scenario())
    assert written == 2
    assert again == 0
    assert len(recorded) == 2
    assert is_known and not is_new
    assert info['recorded'] == 2 and info['failed'] == 0

    lines = results_file.read_text(encoding='utf-8').splitlines()
    assert len(lines) == 2
    first = json.loads(lines[0])
    assert set(first) == {'key', 'result', 'meta'}
    assert 'recorded_at' in first['meta']


def test_corrupt_line_is_ignored(tmp_path):
    results_file = tmp_path / 'results.jsonl'
    good = json.dumps({'key': _records([(4, 1, 1, 2)])[0]['key'], 'result': {'passed': False}})
    results_file.write_text(good + '\n{"key": {"check"\n', encoding='utf-8')

    async def scenario():
        manager = ResumeManager(results_file)
        return await manager.load_recorded_keys(), await manager.get_resume_info()

    recorded, info = asyncio.run(scenario())
    assert len(recorded) == 1
    assert info['recorded'] == 1
    assert info['failed'] == 1
