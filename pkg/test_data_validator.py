"""
Тесты валидации четвёрок и раскрытия спецификаций прогонов.
"""

import json
from fractions import Fraction

import pytest

from data_validator import DataValidator, SweepSpec
from errors import InvalidParamsError
from exact_core import Regime


def test_validate_params_cases():
    validator = DataValidator()
    test_cases = [
        ({'n': 4, 'k': 1, 'a': 1, 'b': 2}, None),
        ({'n': 0, 'k': 0, 'a': 2, 'b': 1}, None),
        ({'n': 3, 'k': 2, 'a': 1, 'b': 2}, "PF: k >= b"),
        ({'n': 3, 'k': 1, 'a': 2, 'b': 2}, "a = b"),
        ({'n': 1, 'k': 2, 'a': 1, 'b': 3}, "k > n"),
        ({'n': 1, 'k': 0, 'a': 0, 'b': 3}, "a или b <= 0"),
        ({'n': 1, 'k': 0, 'a': 1}, "Отсутствует обязательное поле: b"),
    ]
    for raw, expected in test_cases:
        params, reason = validator.validate_params(raw)
        assert reason == expected, raw
        assert (params is None) == (expected is not None)


def test_validate_params_regime_filter():
    validator = DataValidator()
    params, reason = validator.validate_params({'n': 0, 'k': 0, 'a': 2, 'b': 1}, Regime.PF)
    assert params is None
    assert 'Transition' in reason


def test_expand_counts_and_reasons():
    """n в [0, 2], a и b в [1, 2]: 11 допустимых четвёрок, 13 отклонённых."""
    validator = DataValidator()
    spec = validator.parse_sweep_spec({'n': [0, 2], 'a': [1, 2], 'b': [1, 2]})
    valid, invalid = validator.expand_spec(spec)
    assert len(valid) == 11
    assert len(invalid) == 13
    assert valid[0].quadruple == (0, 0, 1, 2)
    stats = validator.get_validation_stats(len(valid) + len(invalid), valid, invalid)
    assert stats['error_reasons'] == {"a = b": 12, "PF: k >= b": 1}

    pf_only = validator.parse_sweep_spec({'n': [0, 2], 'a': [1, 2], 'b': [1, 2], 'regime': 'PF'})
    valid, _ = validator.expand_spec(pf_only)
    assert len(valid) == 5
    assert all(p.regime is Regime.PF for p in valid)


def test_expand_u_range_filter():
    validator = DataValidator()
    spec = validator.parse_sweep_spec({
        'n': [0, 4], 'a': [2, 3], 'b': [1, 2], 'regime': 'Transition', 'u_range': ['-1', '0'],
    })
    assert spec.u_range == (Fraction(-1), Fraction(0))
    valid, invalid = validator.expand_spec(spec)
    assert valid
    assert all(-1 <= p.u <= 0 for p in valid)
    assert any(item['error'] == "u вне u_range" for item in invalid)


def test_parse_sweep_spec_rejects_bad_input():
    validator = DataValidator()
    test_cases = [
        [],
        {'a': [1, 2], 'b': [1, 2]},
        {'n': [3, 1], 'a': 1, 'b': 2},
        {'n': 1, 'a': 1, 'b': 2, 'regime': 'Other'},
        {'n': 1, 'a': 1, 'b': 2, 'checks': ['nope']},
        {'n': 1, 'a': 1, 'b': 2, 'checks': []},
        {'n': 1, 'a': 1, 'b': 2, 'budgets': {'unknown': 1}},
        {'n': 1, 'a': 1, 'b': 2, 'u_range': [0]},
        {'n': 1, 'a': 1, 'b': 2, 'extra': True},
    ]
    for data in test_cases:
        with pytest.raises(InvalidParamsError):
            validator.parse_sweep_spec(data)


def test_max_quadruples_limit():
    validator = DataValidator({'max_quadruples': 3})
    spec = SweepSpec(n=(0, 5), a=(1, 1), b=(2, 2))
    with pytest.raises(InvalidParamsError):
        validator.expand_spec(spec)


def test_load_spec_and_report(tmp_path):
    validator = DataValidator()
    spec_file = tmp_path / 'spec.json'
    spec_file.write_text(json.dumps({'n': 2, 'k': [0, 1], 'a': 1, 'b': 3, 'checks': ['roots']}), encoding='utf-8')
    spec = validator.load_sweep_spec(spec_file)
    assert spec.n == (2, 2) and spec.k == (0, 1)
    valid, invalid = validator.expand_spec(spec)
    assert [p.quadruple for p in valid] == [(2, 0, 1, 3), (2, 1, 1, 3)]

    report_file = tmp_path / 'report' / 'validation.json'
    validator.export_validation_report(spec, validator.get_validation_stats(2, valid, invalid), report_file)
    report = json.loads(report_file.read_text(encoding='utf-8'))
    assert report['statistics']['valid_count'] == 2
    assert report['spec']['checks'] == ['roots']

    with pytest.raises(InvalidParamsError):
        validator.load_sweep_spec(tmp_path / 'missing.json')
    broken = tmp_path / 'broken.json'
    broken.write_text('{', encoding='utf-8')
    with pytest.raises(InvalidParamsError):
        validator.load_sweep_spec(broken)
