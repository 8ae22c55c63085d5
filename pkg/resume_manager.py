"""
Модуль для возобновления прерванных прогонов.
Результаты хранятся в одном JSONL-файле, только дописыванием; ключ записи -
(проверка, n, k, a, b, бюджеты). Повторный запуск пропускает записанные ключи.
"""

import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Any, List, Optional, Set, Union

import aiofiles

from exact_core import RayParams


def record_key(check: str, params: RayParams, budgets: Dict[str, Any]) -> Dict[str, Any]:
    """Ключ записи результатов."""
    return {
        'check': check,
        'n': params.n,
        'k': params.k,
        'a': params.a,
        'b': params.b,
        'budgets': dict(sorted(budgets.items())),
    }


def key_token(key: Dict[str, Any]) -> str:
    """Каноническая строка ключа для множеств и сравнения."""
    return json.dumps(key, sort_keys=True, separators=(',', ':'))


class ResumeManager:
    """Управляет файлом результатов прогона и множеством уже посчитанных ключей."""

    def __init__(self, results_file: Union[str, Path] = "results/sweep.jsonl"):
        self.results_file = Path(results_file)
        self.results_file.parent.mkdir(parents=True, exist_ok=True)
        self.logger = logging.getLogger('raypf.resume')
        self._recorded: Optional[Set[str]] = None

    async def load_recorded_keys(self) -> Set[str]:
        """Читает ключи уже записанных результатов; битая последняя строка игнорируется."""
        recorded: Set[str] = set()
        if self.results_file.exists():
            async with aiofiles.open(self.results_file, 'r', encoding='utf-8') as f:
                async for line in f:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        recorded.add(key_token(json.loads(line)['key']))
                    except (json.JSONDecodeError, KeyError) as e:
                        self.logger.warning(f"Пропущена повреждённая строка результатов: {e}")
        self._recorded = recorded
        self.logger.info(f"Записанных результатов в {self.results_file}: {len(recorded)}")
        return recorded

    async def is_recorded(self, key: Dict[str, Any]) -> bool:
        if self._recorded is None:
            await self.load_recorded_keys()
        return key_token(key) in self._recorded

    async def append_batch(self, records: List[Dict[str, Any]]) -> int:
        """
        Дописывает пакет записей {'key', 'result'} одной операцией.
        Время записи попадает только в поле meta.
        """
        if self._recorded is None:
            await self.load_recorded_keys()
        lines = []
        for record in records:
            token = key_token(record['key'])
            if token in self._recorded:
                continue
            self._recorded.add(token)
            line = {
                'key': record['key'],
                'result': record['result'],
                'meta': {'recorded_at': datetime.now(timezone.utc).isoformat()},
            }
            lines.append(json.dumps(line, sort_keys=True, ensure_ascii=False, default=str))
        if lines:
            async with aiofiles.open(self.results_file, 'a', encoding='utf-8') as f:
                await f.write('\n'.join(lines) + '\n')
        self.logger.debug(f"Дописано записей: {len(lines)}")
        return len(lines)

    async def load_results(self) -> List[Dict[str, Any]]:
        """Все записи файла в порядке записи."""
        results = []
        if not self.results_file.exists():
            return results
        async with aiofiles.open(self.results_file, 'r', encoding='utf-8') as f:
            async for line in f:
                line = line.strip()
                if not line:
                    continue
                try:
                    results.append(json.loads(line))
                except json.JSONDecodeError:
                    continue
        return results

    async def get_resume_info(self) -> Dict[str, Any]:
        """Сводка для журнала: сколько записано и сколько проверок провалено."""
        results = await self.load_results()
        failed = sum(1 for r in results if not r.get('result', {}).get('passed', True))
        return {'results_file': str(self.results_file), 'recorded': len(results), 'failed': failed}
