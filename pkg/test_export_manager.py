"""
Тесты форматов вывода: последовательности, JSON-отчёты, таблицы для графиков.
"""

import asyncio
import json
import math

import pytest

from errors import InvalidParamsError
from exact_core import RayParams, ray_sequence
from export_manager import ExportManager

FIG_SEQ = ray_sequence(RayParams(4, 1, 1, 2), 5)


def test_render_sequence_formats(tmp_path):
    exporter = ExportManager(str(tmp_path))
    assert exporter.render_sequence(FIG_SEQ, 'csv') == "j,value\n0,4\n1,10\n2,6\n3,1\n4,0\n"
    assert exporter.render_sequence(FIG_SEQ, 'row') == "4,10,6,1,0\n"
    data = json.loads(exporter.render_sequence(FIG_SEQ, 'json'))
    assert data['values'] == [4, 10, 6, 1, 0]
    assert data['params']['regime'] == 'PF'
    with pytest.raises(InvalidParamsError):
        exporter.render_sequence(FIG_SEQ, 'xml')


def test_big_integers_stay_exact(tmp_path):
    exporter = ExportManager(str(tmp_path))
    seq = ray_sequence(RayParams(0, 0, 3, 1), 40)
    last = seq.values[-1]
    assert last > 2 ** 64
    assert exporter.render_sequence(seq, 'csv').splitlines()[-1] == f"39,{last}"
    assert json.loads(exporter.render_sequence(seq, 'json'))['values'][-1] == last


def test_render_json_floats_and_non_finite(tmp_path):
    exporter = ExportManager(str(tmp_path))
    text = exporter.render_json({'b': 0.1, 'a': math.inf, 'c': [math.nan, 1]})
    assert text.endswith('\n')
    data = json.loads(text)
    assert data == {'a': 'inf', 'b': 0.1, 'c': ['nan', 1]}
    assert list(data) == ['a', 'b', 'c']

    value = 0.1 + 0.2
    assert json.loads(exporter.render_json({'x': value}))['x'] == value
    assert float(format(value, '.17g')) == value


def test_render_csv_table(tmp_path):
    exporter = ExportManager(str(tmp_path))
    text = exporter.render_csv([{'x': 0.1, 'y': 1.0}], ['x', 'y'])
    assert text.splitlines() == ['x,y', '0.10000000000000001,1']
    with pytest.raises(InvalidParamsError):
        exporter.render_csv([])


def test_write_files(tmp_path):
    exporter = ExportManager(str(tmp_path / 'results'))

    async def scenario():
        seq_path = await exporter.export_sequence(FIG_SEQ, 'seq.csv')
        dot_path = await exporter.export_dot('digraph g {\n}\n', tmp_path / 'g.dot')
        return seq_path, dot_path

    seq_path, dot_path = asyncio.run(scenario())
    assert open(seq_path, encoding='utf-8').read() == exporter.render_sequence(FIG_SEQ, 'csv')
    assert open(dot_path, encoding='utf-8').read().startswith('digraph')
    with pytest.raises(InvalidParamsError):
        asyncio.run(exporter.export_dot('graph g {}', 'bad.dot'))
