"""
Проверка PF-свойства перебором миноров тёплицевой матрицы (u_{j-i}).
Для бесконечной матрицы конечный перебор ничего не доказывает, поэтому каждый
вердикт помечен как "до (порядок, окно)". Точный дополнительный сертификат
для конечных последовательностей даёт real_roots.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, Any, List, Optional, Sequence, Tuple, Union

from errors import BudgetExceededError, InvalidParamsError
from exact_core import RaySequence

logger = logging.getLogger('raypf.tp')

DEFAULT_MINOR_CAP = 10 ** 6


@dataclass(frozen=True)
class ToeplitzWindow:
    """Окно size x size бесконечной матрицы с элементами u_{j-i}."""
    source: Tuple[int, ...]
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise InvalidParamsError(f"Размер окна должен быть >= 1, получено {self.size}")
        negative = [i for i, v in enumerate(self.source) if v < 0]
        if negative:
            raise InvalidParamsError(f"Отрицательные элементы последовательности в позициях {negative}")

    def entry(self, i: int, j: int) -> int:
        d = j - i
        if d < 0 or d >= len(self.source):
            return 0
        return self.source[d]

    def rows(self) -> List[List[int]]:
        return [[self.entry(i, j) for j in range(self.size)] for i in range(self.size)]


@dataclass(frozen=True)
class MinorSpec:
    """Строки I и столбцы J минора (индексы с нуля, строго возрастают)."""
    rows: Tuple[int, ...]
    cols: Tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.rows)

    def validate(self, size: int) -> None:
        if len(self.rows) != len(self.cols) or not self.rows:
            raise InvalidParamsError(f"Нужно |I| = |J| >= 1, получено I={self.rows}, J={self.cols}")
        for label, idx in (('I', self.rows), ('J', self.cols)):
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise InvalidParamsError(f"Индексы {label}={idx} не возрастают строго")
            if idx[0] < 0 or idx[-1] >= size:
                raise InvalidParamsError(f"Индексы {label}={idx} вне окна размера {size}")

    def to_dict(self) -> Dict[str, Any]:
        return {'I': list(self.rows), 'J': list(self.cols)}


@dataclass
class PFVerdict:
    """Итог is_pf_upto; при провале - лексикографически первый отрицательный минор."""
    passed: bool
    max_order: int
    window: int
    minors_checked: int
    witness: Optional[MinorSpec] = None
    witness_value: Optional[int] = None

    @property
    def label(self) -> str:
        return f"до (порядок {self.max_order}, окно {self.window})"

    def to_dict(self) -> Dict[str, Any]:
        return {
            'passed': self.passed,
            'scope': {'max_order': self.max_order, 'window': self.window},
            'minors_checked': self.minors_checked,
            'witness': self.witness.to_dict() if self.witness else None,
            'witness_value': self.witness_value,
        }


def toeplitz_window(values: Union[RaySequence, Sequence[int]], size: int) -> ToeplitzWindow:
    """Строит окно по последовательности (для RaySequence - по её значениям)."""
    source = values.values if isinstance(values, RaySequence) else tuple(values)
    return ToeplitzWindow(source=tuple(source), size=size)


def bareiss_determinant(matrix: List[List[int]]) -> int:
    """Определитель бесдробным исключением Бареисса; все промежуточные значения целые."""
    m = [row[:] for row in matrix]
    size = len(m)
    if size == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(size - 1):
        if m[k][k] == 0:
            pivot = next((i for i in range(k + 1, size) if m[i][k] != 0), None)
            if pivot is None:
                return 0
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                # деление точное (тождество Сильвестра)
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[-1][-1]


def minor(window: ToeplitzWindow, spec: MinorSpec) -> int:
    """Точный (I, J)-минор окна."""
    spec.validate(window.size)
    sub = [[window.entry(i, j) for j in spec.cols] for i in spec.rows]
    return bareiss_determinant(sub)


def count_minors(size: int, max_order: int) -> int:
    """Число миноров порядка <= max_order в окне size x size."""
    return sum(math.comb(size, r) ** 2 for r in range(1, max_order + 1))


def is_pf_upto(
    seq: Union[RaySequence, Sequence[int]],
    max_order: int,
    window: int,
    minor_cap: int = DEFAULT_MINOR_CAP
) -> PFVerdict:
    """
    Перебирает все миноры порядка <= max_order ведущего окна window x window.
    Порядок перебора: порядок по возрастанию, затем I и J лексикографически.
    """
    if max_order < 1 or max_order > window:
        raise InvalidParamsError(f"Нужно 1 <= max_order <= window, получено {max_order}, {window}")
    total = count_minors(window, max_order)
    if total > minor_cap:
        raise BudgetExceededError('minor_cap', minor_cap, total)

    win = toeplitz_window(seq, window)
    checked = 0
    for order in range(1, max_order + 1):
        for rows in itertools.combinations(range(window), order):
            for cols in itertools.combinations(range(window), order):
                value = bareiss_determinant([[win.entry(i, j) for j in cols] for i in rows])
                checked += 1
                if value < 0:
                    spec = MinorSpec(rows=rows, cols=cols)
                    logger.info(f"Отрицательный минор I={rows}, J={cols}: {value}")
                    return PFVerdict(False, max_order, window, checked, spec, value)

    logger.debug(f"Все {checked} миноров неотрицательны {PFVerdict(True, max_order, window, checked).label}")
    return PFVerdict(True, max_order, window, checked)
