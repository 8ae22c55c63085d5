"""
Точная арифметика и генерация последовательностей на лучах треугольника Паскаля.
Все значения - целые произвольной точности: при a > b члены C_j растут
сверхэкспоненциально и переполняют любой тип фиксированной ширины уже при j ~ 10.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Any, Optional, Sequence, Tuple

from errors import InvalidParamsError

logger = logging.getLogger('raypf.core')


class Regime(str, Enum):
    """Режим луча."""
    PF = "PF"                  # b > a: конечная PF-последовательность
    TRANSITION = "Transition"  # a > b: один переход log-вогнутость -> log-выпуклость


class SequenceKind(str, Enum):
    """Тип членов последовательности."""
    BINOMIAL = "binomial"
    DELANNOY = "delannoy"


@dataclass(frozen=True)
class RayParams:
    """Четвёрка (n, k, a, b) и режим, который она определяет."""
    n: int
    k: int
    a: int
    b: int
    regime: Optional[Regime] = None

    def __post_init__(self):
        for name in ('n', 'k', 'a', 'b'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise InvalidParamsError(f"Параметр {name} должен быть целым, получено {value!r}")
        if not self.n >= self.k >= 0:
            raise InvalidParamsError(f"Нужно n >= k >= 0, получено n={self.n}, k={self.k}")
        if self.a <= 0 or self.b <= 0:
            raise InvalidParamsError(f"Нужно a > 0 и b > 0, получено a={self.a}, b={self.b}")
        if self.a == self.b:
            raise InvalidParamsError(f"При a = b = {self.a} луч не принадлежит ни одному режиму")

        inferred = Regime.PF if self.b > self.a else Regime.TRANSITION
        if self.regime is not None and Regime(self.regime) != inferred:
            raise InvalidParamsError(
                f"Режим {Regime(self.regime).value} не соответствует (a, b) = ({self.a}, {self.b})"
            )
        if inferred is Regime.PF and self.k >= self.b:
            raise InvalidParamsError(f"В режиме PF нужно k < b, получено k={self.k}, b={self.b}")
        object.__setattr__(self, 'regime', inferred)

    @property
    def quadruple(self) -> Tuple[int, int, int, int]:
        return (self.n, self.k, self.a, self.b)

    @property
    def support_bound(self) -> Optional[int]:
        """floor((n-k)/(b-a)) - последний индекс ненулевого члена в режиме PF."""
        if self.regime is not Regime.PF:
            return None
        return (self.n - self.k) // (self.b - self.a)

    @property
    def u(self) -> Fraction:
        """Точное u = k - (n+1)b/a."""
        return self.k - Fraction((self.n + 1) * self.b, self.a)

    def require(self, regime: Regime) -> None:
        """Отклоняет параметры чужого режима."""
        if self.regime is not regime:
            raise InvalidParamsError(
                f"Операция требует режима {regime.value}, а {self.quadruple} - режим {self.regime.value}"
            )

    def to_dict(self) -> Dict[str, Any]:
        return {'n': self.n, 'k': self.k, 'a': self.a, 'b': self.b, 'regime': self.regime.value}


@dataclass(frozen=True)
class RaySequence:
    """Точная последовательность C_j (или D_j) и метаданные усечения."""
    params: RayParams
    values: Tuple[int, ...]
    kind: SequenceKind = SequenceKind.BINOMIAL
    last_nonzero: Optional[int] = None

    @property
    def is_complete(self) -> bool:
        """Содержит ли окно весь носитель конечной последовательности."""
        return self.last_nonzero is not None and len(self.values) > self.last_nonzero

    def nonzero_prefix(self) -> Tuple[int, ...]:
        if self.last_nonzero is None:
            return self.values
        return self.values[:self.last_nonzero + 1]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'params': self.params.to_dict(),
            'kind': self.kind.value,
            'length': len(self.values),
            'last_nonzero': self.last_nonzero,
            'values': list(self.values),
        }


def binomial(n: int, k: int) -> int:
    """C(n, k); ноль при k < 0 или k > n."""
    if n < 0:
        raise InvalidParamsError(f"binomial: нужно n >= 0, получено {n}")
    if k < 0 or k > n:
        return 0
    # math.comb - мультипликативная схема с точным делением, без факториалов
    return math.comb(n, k)


class DelannoyTable:
    """
    Мемо-таблица чисел Деланнуа, ключ (min, max).
    Живёт в пределах одной цепочки вызовов (например, одной ray_sequence).
    """

    def __init__(self):
        self._memo: Dict[Tuple[int, int], int] = {}

    def __len__(self) -> int:
        return len(self._memo)

    def value(self, n: int, k: int) -> int:
        """D(n, k) по рекурсии D(n,k) = D(n-1,k) + D(n,k-1) + D(n-1,k-1)."""
        if n < 0 or k < 0:
            raise InvalidParamsError(f"delannoy: нужно n, k >= 0, получено ({n}, {k})")
        lo, hi = (n, k) if n <= k else (k, n)
        if lo == 0:
            return 1
        cached = self._memo.get((lo, hi))
        if cached is not None:
            return cached

        # Заполнение по строкам снизу вверх: глубина рекурсии не растёт с аргументами
        prev = [1] * (hi + 1)
        for r in range(1, lo + 1):
            row = [1] * (hi + 1)
            for c in range(1, hi + 1):
                row[c] = prev[c] + row[c - 1] + prev[c - 1]
                key = (r, c) if r <= c else (c, r)
                self._memo.setdefault(key, row[c])
            prev = row
        return self._memo[(lo, hi)]


def delannoy(n: int, k: int, table: Optional[DelannoyTable] = None) -> int:
    """Число Деланнуа D(n, k)."""
    return (table or DelannoyTable()).value(n, k)


def delannoy_closed_form(n: int, k: int) -> int:
    """D(n, k) = sum_i C(n,i) C(k,i) 2^i - независимый оракул для рекурсии."""
    if n < 0 or k < 0:
        raise InvalidParamsError(f"delannoy: нужно n, k >= 0, получено ({n}, {k})")
    return sum(binomial(n, i) * binomial(k, i) * 2 ** i for i in range(min(n, k) + 1))


def ray_sequence(
    params: RayParams,
    length: int,
    kind: SequenceKind = SequenceKind.BINOMIAL
) -> RaySequence:
    """Первые length членов C_j = C(n+ja, k+jb) или D_j = D(n-k+(a-b)j, k+bj)."""
    if length < 1:
        raise InvalidParamsError(f"Длина последовательности должна быть >= 1, получено {length}")
    kind = SequenceKind(kind)
    n, k, a, b = params.quadruple

    if kind is SequenceKind.BINOMIAL:
        values = tuple(binomial(n + j * a, k + j * b) for j in range(length))
    else:
        params.require(Regime.PF)
        table = DelannoyTable()
        values = tuple(
            table.value(n - k + (a - b) * j, k + b * j) if n - k + (a - b) * j >= 0 else 0
            for j in range(length)
        )

    last_nonzero = params.support_bound
    logger.debug(f"Луч {params.quadruple} ({kind.value}): {length} членов, последний ненулевой {last_nonzero}")
    return RaySequence(params=params, values=values, kind=kind, last_nonzero=last_nonzero)


def has_no_internal_zeros(values: Sequence[int]) -> bool:
    """Нет индексов i < j < l с u_i u_l != 0 и u_j = 0."""
    support = [i for i, v in enumerate(values) if v != 0]
    if not support:
        return True
    return all(values[i] != 0 for i in range(support[0], support[-1] + 1))


def is_log_concave(values: Sequence[int]) -> bool:
    """u_{i+1}^2 >= u_i u_{i+2} для всех i (точно)."""
    return all(values[i + 1] ** 2 >= values[i] * values[i + 2] for i in range(len(values) - 2))


def is_unimodal(values: Sequence[int]) -> bool:
    """u_0 <= ... <= u_m >= u_{m+1} >= ... для некоторого m."""
    i = 0
    while i + 1 < len(values) and values[i] <= values[i + 1]:
        i += 1
    while i + 1 < len(values) and values[i] >= values[i + 1]:
        i += 1
    return i == len(values) - 1 if values else True
