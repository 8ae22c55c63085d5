"""
Модуль для экспорта результатов: последовательности (CSV/JSON/строка),
отчёты проверок (JSON), таблицы для графиков (CSV) и граф решётки (DOT).
Выход детерминирован: никаких отметок времени в основных файлах.
"""

import json
import logging
import math
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Dict, Any, List, Optional, Sequence, Union

import aiofiles
import pandas as pd

from errors import InvalidParamsError
from exact_core import RaySequence

FLOAT_FORMAT = '%.17g'
SEQUENCE_FORMATS = ('csv', 'json', 'row')


class ExportManager:
    """Управляет экспортом данных в различные форматы."""

    def __init__(self, output_dir: str = "results"):
        self.output_dir = Path(output_dir)
        self.logger = logging.getLogger('raypf.export')

    def _get_output_path(self, filename: Union[str, Path]) -> Path:
        """Относительные имена кладутся в output_dir, абсолютные - как есть."""
        path = Path(filename)
        if not path.is_absolute() and path.parent == Path('.'):
            path = self.output_dir / path
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def sequence_frame(self, seq: RaySequence) -> pd.DataFrame:
        """Таблица j, value; value хранится как object, чтобы большие целые не теряли разряды."""
        return pd.DataFrame({
            'j': range(len(seq.values)),
            'value': pd.Series(list(seq.values), dtype=object),
        })

    def render_sequence(self, seq: RaySequence, fmt: str = 'csv') -> str:
        """Последовательность в формате csv (с заголовком j,value), json или row."""
        if fmt == 'csv':
            return self.sequence_frame(seq).to_csv(index=False, lineterminator='\n')
        if fmt == 'json':
            return self.render_json(seq.to_dict())
        if fmt == 'row':
            return ','.join(str(v) for v in seq.values) + '\n'
        raise InvalidParamsError(f"Неизвестный формат {fmt!r}, допустимы {SEQUENCE_FORMATS}")

    def render_json(self, data: Any) -> str:
        """JSON с сортировкой ключей; float - кратчайшее точное представление, не-конечные - строками."""
        return json.dumps(
            self._sanitize(data),
            indent=2,
            ensure_ascii=False,
            sort_keys=True,
            default=self._json_serializer
        ) + '\n'

    def render_csv(self, rows: List[Dict[str, Any]], columns: Optional[Sequence[str]] = None) -> str:
        """Таблица для графиков; float с 17 значащими цифрами."""
        if not rows:
            raise InvalidParamsError("Нет данных для экспорта")
        df = pd.DataFrame(rows, columns=list(columns) if columns else None)
        return df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')

    def _sanitize(self, obj: Any) -> Any:
        if isinstance(obj, float) and not math.isfinite(obj):
            return str(obj)
        if isinstance(obj, dict):
            return {str(k): self._sanitize(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [self._sanitize(v) for v in obj]
        return obj

    def _json_serializer(self, obj):
        """Сериализатор для JSON."""
        if isinstance(obj, Enum):
            return obj.value
        if isinstance(obj, Fraction):
            return str(obj)
        if hasattr(obj, 'to_dict'):
            return obj.to_dict()
        return str(obj)

    async def write_text(self, filename: Union[str, Path], text: str) -> str:
        """Асинхронная запись готового текста."""
        output_path = self._get_output_path(filename)
        async with aiofiles.open(output_path, 'w', encoding='utf-8', newline='') as f:
            await f.write(text)
        self.logger.info(f"Сохранено: {output_path}")
        return str(output_path)

    async def export_sequence(self, seq: RaySequence, filename: Union[str, Path], fmt: str = 'csv') -> str:
        """Экспорт последовательности в файл."""
        return await self.write_text(filename, self.render_sequence(seq, fmt))

    async def export_json(self, data: Any, filename: Union[str, Path]) -> str:
        """Экспорт отчёта в JSON."""
        return await self.write_text(filename, self.render_json(data))

    async def export_dot(self, dot_text: str, filename: Union[str, Path]) -> str:
        """Экспорт графа решётки в DOT."""
        if not dot_text.startswith('digraph'):
            raise InvalidParamsError("Ожидался текст графа DOT")
        return await self.write_text(filename, dot_text)
