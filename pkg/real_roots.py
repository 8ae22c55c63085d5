"""
Точная проверка вещественности корней целочисленного многочлена.
Квадратосвободная часть через НОД над целыми, затем цепочка Штурма на (-B, B],
где B - граница Коши. Коэффициенты многочленов лучей огромны, поэтому никаких
чисел с плавающей точкой: только примитивные псевдоостатки.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Dict, Any, List, Sequence, Tuple, Union

from errors import InvalidParamsError
from exact_core import RaySequence, Regime

logger = logging.getLogger('raypf.roots')

Number = Union[int, Fraction]


@dataclass(frozen=True)
class IntPolynomial:
    """Многочлен с целыми коэффициентами; coefficients[i] - коэффициент при x^i."""
    coefficients: Tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coefficients)
        while coeffs and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, 'coefficients', coeffs)

    @classmethod
    def of(cls, *coefficients: int) -> 'IntPolynomial':
        return cls(tuple(coefficients))

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def degree(self) -> int:
        """Степень; у нулевого многочлена -1."""
        return len(self.coefficients) - 1

    @property
    def leading(self) -> int:
        return self.coefficients[-1] if self.coefficients else 0

    def __neg__(self) -> 'IntPolynomial':
        return IntPolynomial(tuple(-c for c in self.coefficients))

    def __mul__(self, other: 'IntPolynomial') -> 'IntPolynomial':
        if self.is_zero or other.is_zero:
            return IntPolynomial(())
        out = [0] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, x in enumerate(self.coefficients):
            for j, y in enumerate(other.coefficients):
                out[i + j] += x * y
        return IntPolynomial(tuple(out))

    def derivative(self) -> 'IntPolynomial':
        return IntPolynomial(tuple(i * c for i, c in enumerate(self.coefficients) if i > 0))

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = [f"{c}x^{i}" if i else str(c) for i, c in enumerate(self.coefficients) if c]
        return " + ".join(terms)

    def to_dict(self) -> Dict[str, Any]:
        return {'degree': self.degree, 'coefficients': list(self.coefficients)}


def from_sequence(seq: Union[RaySequence, Sequence[int]]) -> IntPolynomial:
    """Производящий многочлен sum_j C_j x^j конечной последовательности."""
    if isinstance(seq, RaySequence):
        if seq.params.regime is not Regime.PF:
            raise InvalidParamsError("Последовательность режима Transition бесконечна: многочлена нет")
        if not seq.is_complete:
            raise InvalidParamsError(
                f"Окно длины {len(seq.values)} не покрывает носитель (последний ненулевой {seq.last_nonzero})"
            )
        return IntPolynomial(seq.nonzero_prefix())
    return IntPolynomial(tuple(seq))


def evaluate(p: IntPolynomial, x: Number) -> Number:
    """Значение по схеме Горнера (точно для int и Fraction)."""
    acc: Number = 0
    for c in reversed(p.coefficients):
        acc = acc * x + c
    return acc


def content(p: IntPolynomial) -> int:
    return reduce(gcd, (abs(c) for c in p.coefficients), 0)


def primitive_part(p: IntPolynomial) -> IntPolynomial:
    """Делит на положительное содержание; знак сохраняется."""
    c = content(p)
    if c <= 1:
        return p
    return IntPolynomial(tuple(x // c for x in p.coefficients))


def pseudo_remainder(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """
    Остаток от m*a по модулю b, где m = |lc(b)|^s > 0.
    Множитель положителен, поэтому знак остатка совпадает со знаком обычного остатка.
    """
    if b.is_zero:
        raise ZeroDivisionError("Псевдоделение на нулевой многочлен")
    lc = b.leading
    mult = abs(lc)
    sgn = 1 if lc > 0 else -1
    r = list(a.coefficients)
    db = b.degree
    while len(r) - 1 >= db and r:
        shift = len(r) - 1 - db
        coef = r[-1]
        r = [mult * c for c in r]
        for i, c in enumerate(b.coefficients):
            r[shift + i] -= sgn * coef * c
        # старший член сокращён
        r.pop()
        while r and r[-1] == 0:
            r.pop()
    return IntPolynomial(tuple(r))


def poly_gcd(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """НОД над Z[x] (примитивный, старший коэффициент положителен)."""
    a, b = primitive_part(a), primitive_part(b)
    while not b.is_zero:
        a, b = b, primitive_part(pseudo_remainder(a, b))
    if a.is_zero:
        return a
    return a if a.leading > 0 else -a


def exact_divide(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """
    Частное a / b при нулевом остатке, приведённое к целым коэффициентам
    положительным рациональным множителем (корни не меняются).
    """
    r = [Fraction(c) for c in a.coefficients]
    q = [Fraction(0)] * max(a.degree - b.degree + 1, 0)
    lc = b.leading
    while len(r) - 1 >= b.degree and any(r):
        shift = len(r) - 1 - b.degree
        coef = r[-1] / lc
        q[shift] = coef
        for i, c in enumerate(b.coefficients):
            r[shift + i] -= coef * c
        r.pop()
    if any(r):
        raise ArithmeticError(f"Деление {a} на {b} не точное")
    denom = reduce(lcm, (c.denominator for c in q), 1)
    return primitive_part(IntPolynomial(tuple(int(c * denom) for c in q)))


def square_free_part(p: IntPolynomial) -> IntPolynomial:
    """q = p / gcd(p, p'): те же корни, все простые."""
    if p.degree <= 0:
        return p
    g = poly_gcd(p, p.derivative())
    if g.degree <= 0:
        return p
    return exact_divide(p, g)


def sturm_chain(p: IntPolynomial) -> List[IntPolynomial]:
    """p0 = p, p1 = p', p_{i+1} = -prem(p_{i-1}, p_i) с примитивной нормировкой."""
    if p.is_zero:
        raise InvalidParamsError("Цепочка Штурма нулевого многочлена не определена")
    chain = [p]
    d = p.derivative()
    if d.is_zero:
        return chain
    chain.append(d)
    while True:
        r = pseudo_remainder(chain[-2], chain[-1])
        if r.is_zero:
            break
        chain.append(-primitive_part(r))
    return chain


def sign_variations(values: Sequence[Number]) -> int:
    """Число перемен знака, нули пропускаются."""
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for x, y in zip(signs, signs[1:]) if x != y)


def cauchy_bound(p: IntPolynomial) -> int:
    """Целое B = 1 + ceil(max|c_i| / |c_deg|): все корни лежат в (-B, B)."""
    if p.degree <= 0:
        return 1
    top = max(abs(c) for c in p.coefficients[:-1])
    lead = abs(p.leading)
    return 1 + -(-top // lead)


def count_real_roots(p: IntPolynomial) -> int:
    """Число различных вещественных корней (теорема Штурма на (-B, B])."""
    q = square_free_part(p)
    if q.degree <= 0:
        return 0
    chain = sturm_chain(q)
    bound = cauchy_bound(q)
    v_low = sign_variations([evaluate(f, -bound) for f in chain])
    v_high = sign_variations([evaluate(f, bound) for f in chain])
    return v_low - v_high


def all_roots_real(p: IntPolynomial) -> bool:
    """Все комплексные корни p вещественны (с учётом кратности)."""
    if p.is_zero:
        raise InvalidParamsError("Нулевой многочлен: вопрос о корнях не определён")
    q = square_free_part(p)
    if q.degree <= 0:
        return True
    real = count_real_roots(q)
    logger.debug(f"Квадратосвободная часть степени {q.degree}: вещественных корней {real}")
    return real == q.degree


def pf_certificate(seq: Union[RaySequence, Sequence[int]]) -> Dict[str, Any]:
    """
    Мост между многочленами и PF: неотрицательная конечная последовательность
    является PF тогда и только тогда, когда её многочлен имеет только вещественные корни.
    """
    p = from_sequence(seq)
    nonnegative = all(c >= 0 for c in p.coefficients)
    if p.is_zero:
        return {'polynomial': p.to_dict(), 'nonnegative': True, 'real_rooted': True, 'pf': True}
    real = all_roots_real(p)
    return {
        'polynomial': p.to_dict(),
        'nonnegative': nonnegative,
        'real_rooted': real,
        'distinct_real_roots': count_real_roots(p),
        'pf': nonnegative and real,
    }
