"""
Тесты командной строки: вывод подкоманд, коды завершения, переменная RAYPF_BUDGET.
"""

import json

import pytest

import raypf
import transition_analysis as ta

FIG_ARGS = ['--n', '4', '--k', '1', '--a', '1', '--b', '2']


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(raypf.BUDGET_ENV, raising=False)
    return tmp_path


def _run(capsys, argv):
    code = raypf.run(argv)
    return code, capsys.readouterr().out


def test_gen_formats(capsys):
    code, out = _run(capsys, ['gen', *FIG_ARGS, '--len', '5', '--format', 'row'])
    assert code == raypf.EXIT_OK
    assert out == "4,10,6,1,0\n"

    code, out = _run(capsys, ['gen', *FIG_ARGS, '--len', '5'])
    assert out == "j,value\n0,4\n1,10\n2,6\n3,1\n4,0\n"

    code, out = _run(capsys, ['gen', *FIG_ARGS, '--len', '5', '--kind', 'delannoy', '--format', 'row'])
    assert out == "7,25,11,1,0\n"


def test_gen_default_length(capsys):
    """Без --len: весь носитель в режиме PF, defaults.length в режиме Transition."""
    code, out = _run(capsys, ['gen', *FIG_ARGS, '--format', 'row'])
    assert code == raypf.EXIT_OK
    assert out == "4,10,6,1\n"

    code, out = _run(capsys, ['gen', '--n', '0', '--k', '0', '--a', '2', '--b', '1', '--format', 'row'])
    assert code == raypf.EXIT_OK
    values = out.strip().split(',')
    assert len(values) == 64
    assert values[:4] == ['1', '2', '6', '20']


def test_gen_to_file(capsys, workdir):
    code, out = _run(capsys, ['gen', *FIG_ARGS, '--len', '5', '--format', 'row', '--out', 'fig.txt'])
    assert code == raypf.EXIT_OK
    assert out == ''
    assert (workdir / 'results' / 'fig.txt').read_text(encoding='utf-8') == "4,10,6,1,0\n"


def test_check_commands_exit_codes(capsys):
    code, out = _run(capsys, ['pf-check', *FIG_ARGS])
    assert code == raypf.EXIT_OK
    assert json.loads(out)['passed'] is True

    code, out = _run(capsys, ['pf-check', '--n', '0', '--k', '0', '--a', '2', '--b', '1'])
    assert code == raypf.EXIT_CHECK_FAILED
    assert json.loads(out)['verdict']['witness'] is not None

    code, out = _run(capsys, ['roots', *FIG_ARGS])
    assert code == raypf.EXIT_OK

    code, out = _run(capsys, ['lgv', *FIG_ARGS, '--dot', 'fig.dot'])
    assert code == raypf.EXIT_OK
    assert json.loads(out)['path_matrix']['entries'][0] == [4, 10, 6, 1, 0]


def test_classify_output(capsys):
    code, out = _run(capsys, ['classify', '--n', '3', '--k', '1', '--a', '2', '--b', '1', '--jmax', '40'])
    assert code == raypf.EXIT_OK
    data = json.loads(out)
    assert data['m'] == 0
    assert data['monotoneOK'] is True


def test_usage_errors(capsys, monkeypatch):
    assert raypf.run(['gen', '--n', '1', '--k', '2', '--a', '1', '--b', '3']) == raypf.EXIT_USAGE
    assert raypf.run(['roots', '--n', '0', '--k', '0', '--a', '2', '--b', '1']) == raypf.EXIT_USAGE
    assert raypf.run(['gen', *FIG_ARGS, '--bogus']) == raypf.EXIT_USAGE
    assert raypf.run([]) == raypf.EXIT_USAGE

    monkeypatch.setenv(raypf.BUDGET_ENV, 'abc')
    assert raypf.run(['gen', *FIG_ARGS]) == raypf.EXIT_USAGE
    monkeypatch.setenv(raypf.BUDGET_ENV, '5')
    assert raypf.run(['pf-check', *FIG_ARGS]) == raypf.EXIT_USAGE
    capsys.readouterr()


def test_budget_from_env():
    assert raypf.budget_from_env({}) is None
    assert raypf.budget_from_env({raypf.BUDGET_ENV: '12'}) == 12
    for raw in ['0', '-3', 'x']:
        with pytest.raises(raypf.InvalidParamsError):
            raypf.budget_from_env({raypf.BUDGET_ENV: raw})


def test_load_config_merges_sections(workdir):
    (workdir / 'custom.yaml').write_text("defaults:\n  window: 6\nlogging:\n  file: null\n", encoding='utf-8')
    config = raypf.load_config('custom.yaml')
    assert config['defaults']['window'] == 6
    assert config['defaults']['max_order'] == 4
    assert raypf.base_budgets(config)['window'] == 6
    assert raypf.base_budgets(config, 7)['minor_cap'] == 7
    assert raypf.load_config('missing.yaml')['sweep']['batch_size'] == 32


def test_output_is_deterministic(capsys):
    argv = ['classify', '--n', '10', '--k', '0', '--a', '3', '--b', '1', '--jmax', '30']
    _, first = _run(capsys, argv)
    _, second = _run(capsys, argv)
    assert first == second


def test_sweep_command(capsys, workdir):
    spec = {'n': [0, 2], 'a': 1, 'b': 2, 'checks': ['pf-check'], 'output': 'out.jsonl'}
    (workdir / 'spec.json').write_text(json.dumps(spec), encoding='utf-8')
    code, out = _run(capsys, ['sweep', 'spec.json', '--no-progress'])
    assert code == raypf.EXIT_OK
    summary = json.loads(out)
    assert summary['computed'] == 5
    assert (workdir / 'out.validation.json').exists()

    code, out = _run(capsys, ['sweep', 'spec.json', '--no-progress'])
    assert json.loads(out)['skipped'] == 5


def test_analytic_exit_code_follows_method_agreement(capsys, monkeypatch):
    argv = ['analytic', '--n', '10', '--k', '0', '--a', '3', '--b', '1', '--x', '1.0']
    code, out = _run(capsys, argv)
    report = json.loads(out)
    assert code == raypf.EXIT_OK
    assert report['passed'] is True
    assert report['max_rel_diff'] <= ta.AGREEMENT_TOL

    original = ta.g_second_quadrature
    monkeypatch.setattr(ta, 'g_second_quadrature', lambda params, x, *args, **kwargs: 2 * original(params, x))
    code, out = _run(capsys, argv)
    report = json.loads(out)
    assert code == raypf.EXIT_CHECK_FAILED
    assert report['passed'] is False
    assert report['variation']['passed'] is True
    assert report['max_rel_diff'] == pytest.approx(1.0, rel=1e-6)
