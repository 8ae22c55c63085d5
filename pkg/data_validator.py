"""
Модуль для валидации параметров лучей и спецификаций прогонов.
Раскрывает диапазоны SweepSpec в список допустимых четвёрок и собирает
статистику отказов по причинам.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Any, List, Optional, Tuple, Union

from errors import InvalidParamsError
from exact_core import RayParams, Regime

SWEEP_CHECKS = ('gen', 'pf-check', 'roots', 'lgv', 'classify', 'analytic', 'coupling')

# Бюджеты по умолчанию; ключи входят в ключ записи результатов
DEFAULT_BUDGETS: Dict[str, Any] = {
    'length': 64,
    'window': 8,
    'max_order': 4,
    'lgv_window': 5,
    'lgv_order': 2,
    'jmax': 64,
    'delannoy': False,
    'minor_cap': 10 ** 6,
    'enumeration_cap': 10 ** 7,
    'x_max': 200.0,
    't_max': 100.0,
    'points': 2000,
}


@dataclass
class SweepSpec:
    """Диапазоны n, k, a, b (включительно), фильтр режима, проверки, бюджеты, файл результатов."""
    n: Tuple[int, int]
    a: Tuple[int, int]
    b: Tuple[int, int]
    k: Optional[Tuple[int, int]] = None
    regime: Optional[Regime] = None
    u_range: Optional[Tuple[Fraction, Fraction]] = None
    checks: List[str] = field(default_factory=lambda: ['pf-check'])
    budgets: Dict[str, Any] = field(default_factory=dict)
    output: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n': list(self.n),
            'k': list(self.k) if self.k else None,
            'a': list(self.a),
            'b': list(self.b),
            'regime': self.regime.value if self.regime else None,
            'u_range': [str(x) for x in self.u_range] if self.u_range else None,
            'checks': list(self.checks),
            'budgets': dict(self.budgets),
            'output': self.output,
        }


class DataValidator:
    """Валидация четвёрок и спецификаций прогонов."""

    def __init__(self, config: Dict[str, Any] = None):
        self.config = config or {}
        self.logger = logging.getLogger('raypf.validator')

        # Настройки валидации
        self.max_quadruples = self.config.get('max_quadruples', 100000)
        self.log_rejections = self.config.get('log_rejections', False)

    def validate_params(
        self,
        raw: Dict[str, Any],
        regime: Optional[Regime] = None
    ) -> Tuple[Optional[RayParams], Optional[str]]:
        """Валидирует одну четвёрку; возвращает (параметры, None) или (None, причина)."""
        for name in ('n', 'k', 'a', 'b'):
            if name not in raw:
                return None, f"Отсутствует обязательное поле: {name}"
        try:
            params = RayParams(raw['n'], raw['k'], raw['a'], raw['b'])
        except InvalidParamsError as e:
            return None, self._reason(e, raw)
        if regime is not None and params.regime is not regime:
            return None, f"Режим {params.regime.value} отфильтрован"
        return params, None

    @staticmethod
    def _reason(error: InvalidParamsError, raw: Dict[str, Any]) -> str:
        # причина без конкретных чисел, чтобы статистика группировалась
        text = str(error)
        if 'k < b' in text:
            return "PF: k >= b"
        if 'a = b' in text:
            return "a = b"
        if 'n >= k' in text:
            return "k > n"
        if 'a > 0' in text:
            return "a или b <= 0"
        return text

    def parse_sweep_spec(self, data: Dict[str, Any]) -> SweepSpec:
        """Разбирает словарь спецификации; ошибки формата - InvalidParamsError."""
        if not isinstance(data, dict):
            raise InvalidParamsError("Спецификация прогона должна быть JSON-объектом")
        unknown = set(data) - {'n', 'k', 'a', 'b', 'regime', 'u_range', 'checks', 'budgets', 'output'}
        if unknown:
            raise InvalidParamsError(f"Неизвестные поля спецификации: {sorted(unknown)}")

        def int_range(name: str, required: bool = True) -> Optional[Tuple[int, int]]:
            value = data.get(name)
            if value is None:
                if required:
                    raise InvalidParamsError(f"Отсутствует диапазон '{name}'")
                return None
            if isinstance(value, int) and not isinstance(value, bool):
                return (value, value)
            if (isinstance(value, list) and len(value) == 2
                    and all(isinstance(v, int) and not isinstance(v, bool) for v in value)
                    and value[0] <= value[1]):
                return (value[0], value[1])
            raise InvalidParamsError(f"Диапазон '{name}' должен быть целым или [min, max], получено {value!r}")

        regime = data.get('regime')
        try:
            regime = Regime(regime) if regime is not None else None
        except ValueError:
            raise InvalidParamsError(f"Неизвестный режим: {regime!r}")

        u_range = data.get('u_range')
        if u_range is not None:
            if not isinstance(u_range, list) or len(u_range) != 2:
                raise InvalidParamsError(f"u_range должен быть [min, max], получено {u_range!r}")
            try:
                u_range = (Fraction(str(u_range[0])), Fraction(str(u_range[1])))
            except (ValueError, ZeroDivisionError):
                raise InvalidParamsError(f"u_range не разбирается: {data['u_range']!r}")

        checks = data.get('checks', ['pf-check'])
        if not isinstance(checks, list) or not checks:
            raise InvalidParamsError("checks должен быть непустым списком")
        bad = [c for c in checks if c not in SWEEP_CHECKS]
        if bad:
            raise InvalidParamsError(f"Неизвестные проверки: {bad}")

        budgets = data.get('budgets', {})
        if not isinstance(budgets, dict):
            raise InvalidParamsError("budgets должен быть объектом")
        unknown = set(budgets) - set(DEFAULT_BUDGETS)
        if unknown:
            raise InvalidParamsError(f"Неизвестные бюджеты: {sorted(unknown)}")

        output = data.get('output')
        if output is not None and not isinstance(output, str):
            raise InvalidParamsError("output должен быть строкой")

        return SweepSpec(
            n=int_range('n'), k=int_range('k', required=False), a=int_range('a'), b=int_range('b'),
            regime=regime, u_range=u_range, checks=checks, budgets=budgets, output=output,
        )

    def load_sweep_spec(self, path: Union[str, Path]) -> SweepSpec:
        """Читает спецификацию из JSON-файла."""
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except FileNotFoundError:
            raise InvalidParamsError(f"Файл спецификации не найден: {path}")
        except json.JSONDecodeError as e:
            raise InvalidParamsError(f"Файл спецификации {path} не является JSON: {e}")
        return self.parse_sweep_spec(data)

    def expand_spec(self, spec: SweepSpec) -> Tuple[List[RayParams], List[Dict[str, Any]]]:
        """Раскрывает диапазоны в порядке (n, k, a, b); возвращает допустимые и отклонённые."""
        valid: List[RayParams] = []
        invalid: List[Dict[str, Any]] = []

        for n in range(spec.n[0], spec.n[1] + 1):
            k_lo, k_hi = spec.k if spec.k else (0, n)
            for k in range(k_lo, k_hi + 1):
                for a in range(spec.a[0], spec.a[1] + 1):
                    for b in range(spec.b[0], spec.b[1] + 1):
                        raw = {'n': n, 'k': k, 'a': a, 'b': b}
                        params, error = self.validate_params(raw, spec.regime)
                        if params is not None and spec.u_range is not None:
                            if params.regime is not Regime.TRANSITION:
                                params, error = None, "u_range задан вне режима Transition"
                            elif not spec.u_range[0] <= params.u <= spec.u_range[1]:
                                params, error = None, "u вне u_range"
                        if params is None:
                            invalid.append({'quadruple': [n, k, a, b], 'error': error})
                            if self.log_rejections:
                                self.logger.debug(f"Четвёрка {(n, k, a, b)} отклонена: {error}")
                        else:
                            valid.append(params)
                        if len(valid) > self.max_quadruples:
                            raise InvalidParamsError(
                                f"Спецификация раскрывается более чем в {self.max_quadruples} четвёрок"
                            )

        self.logger.info(f"Раскрыто четвёрок: {len(valid)} допустимых, {len(invalid)} отклонено")
        return valid, invalid

    def get_validation_stats(
        self,
        original_count: int,
        valid: List[RayParams],
        invalid: List[Dict[str, Any]]
    ) -> Dict[str, Any]:
        """Возвращает статистику валидации."""
        valid_count = len(valid)
        invalid_count = len(invalid)

        # Анализ причин отказа
        error_reasons: Dict[str, int] = {}
        for item in invalid:
            error = item['error']
            error_reasons[error] = error_reasons.get(error, 0) + 1

        return {
            'original_count': original_count,
            'valid_count': valid_count,
            'invalid_count': invalid_count,
            'valid_percentage': (valid_count / original_count * 100) if original_count > 0 else 0,
            'error_reasons': error_reasons,
        }

    def export_validation_report(
        self,
        spec: SweepSpec,
        stats: Dict[str, Any],
        output_file: Union[str, Path]
    ) -> None:
        """Экспортирует отчет о валидации (без отметок времени: файл детерминирован)."""
        report = {
            'spec': spec.to_dict(),
            'statistics': stats,
        }
        Path(output_file).parent.mkdir(parents=True, exist_ok=True)
        with open(output_file, 'w', encoding='utf-8') as f:
            json.dump(report, f, indent=2, ensure_ascii=False, sort_keys=True)

        self.logger.info(f"Отчет о валидации сохранен: {output_file}")
