"""
raypf - лаборатория лучей треугольника Паскаля: генерация последовательностей,
проверки PF и вещественности корней, модель LGV, классификация перехода
и аналитика g'' из командной строки.
"""

import argparse
import asyncio
import logging
import os
import sys
from pathlib import Path
from typing import Dict, Any, List, Mapping, Optional

import yaml
from rich.console import Console
from rich.logging import RichHandler

from data_validator import DEFAULT_BUDGETS, DataValidator
from errors import BudgetExceededError, InvalidParamsError, NumericalFaultError, QuadratureError
from exact_core import RayParams, SequenceKind, ray_sequence
from export_manager import SEQUENCE_FORMATS, ExportManager
from lgv_network import build_network, export_dot
from sweep_processor import CHECKS, SweepProcessor
import transition_analysis as ta

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

BUDGET_ENV = 'RAYPF_BUDGET'

DEFAULT_CONFIG: Dict[str, Any] = {
    'logging': {
        'level': 'INFO',
        'file': 'logs/raypf.log',
        'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    },
    'budgets': {'minor_cap': 10 ** 6, 'enumeration_cap': 10 ** 7},
    'defaults': {'length': 64, 'window': 8, 'max_order': 4, 'lgv_window': 5, 'lgv_order': 2, 'jmax': 64},
    'analytic': {'x_max': 200.0, 't_max': 100.0, 'points': 2000, 'watson_x': 1000.0,
                 'xs': [0.0, 0.5, 1.0, 2.0, 5.0, 10.0]},
    'sweep': {'batch_size': 32, 'max_workers': 1, 'results': 'results/sweep.jsonl', 'show_progress': True},
    'output': {'directory': 'results'},
}

# Логи и панели - в stderr; stdout только для основного вывода
console = Console(stderr=True)
logger = logging.getLogger('raypf')


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """Загружает конфигурацию из YAML файла поверх встроенных значений."""
    config = {section: dict(values) for section, values in DEFAULT_CONFIG.items()}
    path = Path(config_path or 'config.yaml')
    try:
        with open(path, 'r', encoding='utf-8') as f:
            loaded = yaml.safe_load(f) or {}
    except FileNotFoundError:
        logger.warning(f"Файл конфигурации {path} не найден, использую настройки по умолчанию")
        return config
    except yaml.YAMLError as e:
        raise InvalidParamsError(f"Конфигурация {path} не разбирается: {e}")
    if not isinstance(loaded, dict):
        raise InvalidParamsError(f"Конфигурация {path} должна быть словарём секций")
    for section, values in loaded.items():
        if isinstance(values, dict) and isinstance(config.get(section), dict):
            config[section].update(values)
        else:
            config[section] = values
    return config


def setup_logging(config: Dict[str, Any], level_override: Optional[str] = None) -> logging.Logger:
    """Настройка логирования на основе конфигурации."""
    log_config = config.get('logging', {})
    level_name = (level_override or log_config.get('level', 'INFO')).upper()
    log_level = getattr(logging, level_name, None)
    if not isinstance(log_level, int):
        raise InvalidParamsError(f"Неизвестный уровень логирования: {level_name}")

    handlers: List[logging.Handler] = [RichHandler(console=console, rich_tracebacks=True, show_path=False)]
    if log_config.get('file'):
        log_file = Path(log_config['file'])
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(logging.Formatter(log_config.get('format', DEFAULT_CONFIG['logging']['format'])))
        handlers.append(file_handler)

    logging.basicConfig(level=log_level, format='%(message)s', handlers=handlers, force=True)
    return logging.getLogger('raypf')


def budget_from_env(environ: Mapping[str, str] = os.environ) -> Optional[int]:
    """RAYPF_BUDGET - положительное целое, заменяет оба комбинаторных лимита."""
    raw = environ.get(BUDGET_ENV)
    if raw is None or raw.strip() == '':
        return None
    try:
        value = int(raw)
    except ValueError:
        raise InvalidParamsError(f"{BUDGET_ENV} должен быть целым, получено {raw!r}")
    if value <= 0:
        raise InvalidParamsError(f"{BUDGET_ENV} должен быть положительным, получено {value}")
    return value


def base_budgets(config: Dict[str, Any], override: Optional[int] = None) -> Dict[str, Any]:
    """Бюджеты из встроенных значений, секций budgets/defaults/analytic и переменной окружения."""
    budgets = dict(DEFAULT_BUDGETS)
    for section in ('budgets', 'defaults', 'analytic'):
        budgets.update({k: v for k, v in config.get(section, {}).items() if k in DEFAULT_BUDGETS})
    if override is not None:
        budgets['minor_cap'] = override
        budgets['enumeration_cap'] = override
    return budgets


def _add_quadruple(parser: argparse.ArgumentParser) -> None:
    for name in ('n', 'k', 'a', 'b'):
        parser.add_argument(f"--{name}", type=int, required=True, metavar=name.upper())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='raypf',
        description="Лаборатория лучей треугольника Паскаля",
        formatter_class=argparse.RawTextHelpFormatter
    )
    parser.add_argument("--config", metavar="PATH", help="Путь к конфигурационному файлу")
    parser.add_argument("--log-level", metavar="LEVEL", help="Уровень логирования (DEBUG, INFO, ...)")
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('gen', help="Первые члены C_j или D_j")
    _add_quadruple(gen)
    gen.add_argument("--len", dest='length', type=int, metavar="N", help="Число членов")
    gen.add_argument("--kind", choices=[k.value for k in SequenceKind], default='binomial')
    gen.add_argument("--format", dest='fmt', choices=SEQUENCE_FORMATS, default='csv')
    gen.add_argument("--out", metavar="FILE", help="Записать в файл вместо stdout")

    pf = sub.add_parser('pf-check', help="Миноры тёплицева окна до заданного порядка")
    _add_quadruple(pf)
    pf.add_argument("--window", type=int)
    pf.add_argument("--order", dest='max_order', type=int)
    pf.add_argument("--kind", choices=[k.value for k in SequenceKind], default='binomial')

    roots = sub.add_parser('roots', help="Вещественность корней производящего многочлена (режим PF)")
    _add_quadruple(roots)
    roots.add_argument("--kind", choices=[k.value for k in SequenceKind], default='binomial')

    lgv = sub.add_parser('lgv', help="Проверка модели путей на решётке")
    _add_quadruple(lgv)
    lgv.add_argument("--window", dest='lgv_window', type=int)
    lgv.add_argument("--order", dest='lgv_order', type=int)
    lgv.add_argument("--delannoy", action="store_true", help="Добавить диагональные рёбра (1,1)")
    lgv.add_argument("--dot", metavar="FILE", help="Сохранить граф в формате DOT")
    lgv.add_argument("--json", dest='json_file', metavar="FILE", help="Сохранить отчёт в JSON")

    classify = sub.add_parser('classify', help="Точные знаки log-вогнутости в режиме Transition")
    _add_quadruple(classify)
    classify.add_argument("--jmax", type=int)
    classify.add_argument("--analytic", action="store_true", help="Добавить x* и отношение Ватсона")

    analytic = sub.add_parser('analytic', help="g'' двумя методами, x*, Ватсон, диагностика h")
    _add_quadruple(analytic)
    analytic.add_argument("--x", dest='xs', type=float, nargs='+', metavar="X")
    analytic.add_argument("--xmax", dest='x_max', type=float)
    analytic.add_argument("--tmax", dest='t_max', type=float)
    analytic.add_argument("--csv", dest='csv_file', metavar="FILE", help="Таблица x, g'' для графика")

    sub.add_parser('aux', help="Численные проверки вспомогательных функций f, l, h")

    sweep = sub.add_parser('sweep', help="Прогон спецификации SweepSpec из JSON-файла")
    sweep.add_argument("spec", metavar="SPEC.json")
    sweep.add_argument("--results", metavar="FILE", help="Файл результатов JSONL")
    sweep.add_argument("--workers", type=int, help="Число процессов")
    sweep.add_argument("--batch", type=int, help="Размер пакета")
    sweep.add_argument("--no-progress", action="store_true")
    return parser


def _params(args: argparse.Namespace) -> RayParams:
    return RayParams(args.n, args.k, args.a, args.b)


def _with_args(budgets: Dict[str, Any], args: argparse.Namespace) -> Dict[str, Any]:
    merged = dict(budgets)
    for key in DEFAULT_BUDGETS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if getattr(args, 'kind', None) == SequenceKind.DELANNOY.value:
        merged['delannoy'] = True
    return merged


def _gen_length(params: RayParams, args: argparse.Namespace, budgets: Dict[str, Any]) -> int:
    """--len, иначе весь носитель в режиме PF и defaults.length в режиме Transition."""
    if args.length is not None:
        return args.length
    if params.support_bound is not None:
        return params.support_bound + 1
    return budgets['length']


def _emit(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


def _status(passed: bool) -> int:
    return EXIT_OK if passed else EXIT_CHECK_FAILED


async def dispatch(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    """Выполняет подкоманду и возвращает код завершения."""
    exporter = ExportManager(config.get('output', {}).get('directory', 'results'))
    override = budget_from_env()
    budgets = _with_args(base_budgets(config, override), args)
    command = args.command

    if command == 'gen':
        params = _params(args)
        seq = ray_sequence(params, _gen_length(params, args, budgets), SequenceKind(args.kind))
        if args.out:
            await exporter.export_sequence(seq, args.out, args.fmt)
        else:
            _emit(exporter.render_sequence(seq, args.fmt))
        return EXIT_OK

    if command in ('pf-check', 'roots'):
        result = CHECKS[command](_params(args), budgets)
        _emit(exporter.render_json(result))
        return _status(result['passed'])

    if command == 'lgv':
        params = _params(args)
        budgets['delannoy'] = args.delannoy
        result = CHECKS['lgv'](params, budgets)
        if args.dot:
            net = build_network(params, budgets['lgv_window'], args.delannoy)
            await exporter.export_dot(export_dot(net), args.dot)
        if args.json_file:
            await exporter.export_json(result['report'], args.json_file)
        _emit(exporter.render_json(result['report']))
        return _status(result['passed'])

    if command == 'classify':
        params = _params(args)
        profile = ta.classify(params, budgets['jmax'])
        if args.analytic:
            analytic_cfg = config.get('analytic', {})
            profile.x_star = ta.predict_transition(params, budgets['x_max'], budgets['points'])
            profile.watson_ratio = ta.watson_ratio(params, analytic_cfg.get('watson_x', 1000.0))
        _emit(exporter.render_json(profile.to_dict()))
        return _status(profile.monotone_ok)

    if command == 'analytic':
        analytic_cfg = config.get('analytic', {})
        xs = args.xs or analytic_cfg.get('xs', DEFAULT_CONFIG['analytic']['xs'])
        report = ta.analytic_report(
            _params(args), xs=xs, x_max=budgets['x_max'], t_max=budgets['t_max'],
            watson_x=analytic_cfg.get('watson_x', 1000.0), points=budgets['points'],
        )
        if args.csv_file:
            await exporter.write_text(args.csv_file, exporter.render_csv(report['g_second'], ['x', 'trigamma', 'quadrature', 'rel_diff']))
        passed = ta.analytic_verdict(report)
        _emit(exporter.render_json(report))
        return _status(passed)

    if command == 'aux':
        try:
            reports = ta.aux_monotone_checks() + ta.h_property_checks()
        except NumericalFaultError as e:
            logger.error(f"Вспомогательная проверка провалена: {e}")
            _emit(exporter.render_json({'passed': False, 'error': str(e), 'location': e.location}))
            return EXIT_CHECK_FAILED
        passed = all(r.passed for r in reports)
        _emit(exporter.render_json({'passed': passed, 'checks': [r.to_dict() for r in reports]}))
        return _status(passed)

    if command == 'sweep':
        sweep_cfg = dict(config.get('sweep', {}))
        if args.workers is not None:
            sweep_cfg['max_workers'] = args.workers
        if args.batch is not None:
            sweep_cfg['batch_size'] = args.batch
        if args.no_progress:
            sweep_cfg['show_progress'] = False
        validator = DataValidator(sweep_cfg.get('validation', {}))
        spec = validator.load_sweep_spec(args.spec)
        results_file = args.results or spec.output or sweep_cfg.get('results', 'results/sweep.jsonl')
        processor = SweepProcessor(sweep_cfg, budget_override=override)
        summary = await processor.run(spec, results_file, defaults=base_budgets(config))
        validator.export_validation_report(spec, summary['validation'], Path(results_file).with_suffix('.validation.json'))
        _emit(exporter.render_json(summary))
        if summary['failed']:
            return EXIT_CHECK_FAILED
        return EXIT_USAGE if summary['error'] else EXIT_OK

    raise InvalidParamsError(f"Неизвестная команда {command}")


def run(argv: Optional[List[str]] = None) -> int:
    """Точка входа: разбор аргументов, конфигурация, логирование, выполнение."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        config = load_config(args.config)
        setup_logging(config, args.log_level)
        return asyncio.run(dispatch(args, config))
    except (InvalidParamsError, BudgetExceededError) as e:
        logger.error(f"Ошибка параметров: {e}")
        return EXIT_USAGE
    except (NumericalFaultError, QuadratureError) as e:
        logger.error(f"Численная проверка не прошла: {e}")
        return EXIT_CHECK_FAILED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
