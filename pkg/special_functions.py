"""
Численные ядра для анализа перехода: тригамма, вспомогательные f(s), l(s),
функция h(t, u) и её производные. Двойная точность; все формы записаны так,
чтобы не терять знаки на сокращениях (expm1, ряд Тейлора у нуля).
"""

import math
from typing import Tuple

from errors import InvalidParamsError

TRIGAMMA_SHIFT = 10.0
# B_2, B_4, ..., B_10: члены асимптотического ряда до x^-11
_TRIGAMMA_BERNOULLI = (1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0)

H_SERIES_SWITCH = 1e-3
_EXP_LIMIT = 700.0


def trigamma(x: float) -> float:
    """psi_1(x): рекуррентный сдвиг до x >= 10, затем асимптотический ряд."""
    if not x > 0:
        raise InvalidParamsError(f"trigamma определена при x > 0, получено {x}")
    acc = 0.0
    while x < TRIGAMMA_SHIFT:
        acc += 1.0 / (x * x)
        x += 1.0
    r = 1.0 / (x * x)
    tail = 0.0
    for coef in reversed(_TRIGAMMA_BERNOULLI):
        tail = tail * r + coef
    return acc + 1.0 / x + 0.5 * r + tail * r / x


def f_aux(s: float) -> float:
    """f(s) = s e^{-s} / (1 - e^{-s}) = s / (e^s - 1)."""
    if s > _EXP_LIMIT:
        return s * math.exp(-s)
    return s / math.expm1(s)


def l_aux(s: float) -> float:
    """l(s) = s^2 e^{-s} / (1 - e^{-s})^2 = (s/2 / sinh(s/2))^2."""
    if s < H_SERIES_SWITCH:
        s2 = s * s
        return 1.0 - s2 / 12.0 + s2 * s2 / 240.0
    if s > 1400.0:
        return s * s * math.exp(-s)
    half = 0.5 * s
    ratio = half / math.sinh(half)
    return ratio * ratio


def _bernoulli_poly(m: int, x: float) -> float:
    if m == 1:
        return x - 0.5
    if m == 2:
        return x * x - x + 1.0 / 6.0
    if m == 3:
        return x * x * x - 1.5 * x * x + 0.5 * x
    if m == 4:
        return x ** 4 - 2.0 * x ** 3 + x * x - 1.0 / 30.0
    raise ValueError(m)


def _h_series(t: float, u: float, p: float, q: float) -> float:
    # e^{-cs}/(1-e^{-s}) = (1/s) sum_m B_m(1-c) s^m / m!; член m = 0 сокращается (1/p + 1/q = 1)
    total = 0.0
    for m in range(1, 5):
        coef = _bernoulli_poly(m, 1.0) - p ** (m - 1) * _bernoulli_poly(m, -u) - q ** (m - 1) * _bernoulli_poly(m, 1.0 + u)
        total += coef * t ** (m - 1) / math.factorial(m)
    return total


def _series_applies(t: float, u: float, p: float, q: float) -> bool:
    return t * max(p, q) * (1.0 + abs(u)) < H_SERIES_SWITCH


def h_value(t: float, u: float, p: float, q: float) -> float:
    """
    h(t, u) = 1/(1-e^{-t}) - e^{-(u+1)pt}/(1-e^{-pt}) - e^{uqt}/(1-e^{-qt}).
    Возвращает -inf, когда экспонента переполняется (h уходит в минус бесконечность).
    """
    if t <= 0:
        raise InvalidParamsError(f"h определена при t > 0, получено {t}")
    if _series_applies(t, u, p, q):
        return _h_series(t, u, p, q)
    alpha = -(u + 1.0) * p * t
    beta = u * q * t
    if max(alpha, beta) > _EXP_LIMIT:
        return -math.inf
    # 1 - e^alpha - e^beta: expm1 берётся от большей экспоненты, иначе 1 - 1 съедает всё
    if alpha >= beta:
        head = -math.expm1(alpha) - math.exp(beta)
    else:
        head = -math.expm1(beta) - math.exp(alpha)
    rest = (
        math.exp(-t) / -math.expm1(-t)
        - math.exp(alpha - p * t) / -math.expm1(-p * t)
        - math.exp(beta - q * t) / -math.expm1(-q * t)
    )
    return head + rest


def h_weighted(t: float, n: int, u: float, p: float, q: float) -> float:
    """
    e^{-(n+1)t} h(t, u) = F(t, n+1) - F(pt, k+1) - F(qt, n-k+1), F(s, c) = e^{-cs}/(1-e^{-s}).
    Все три экспоненты убывают, поэтому переполнения нет при любом t.
    """
    if _series_applies(t, u, p, q):
        return math.exp(-(n + 1) * t) * _h_series(t, u, p, q)
    c1 = n + 1.0
    c2 = (u + 1.0) + c1 / p          # (k+1) = u + 1 + (n+1)b/a
    c3 = c1 / q - u                  # (n-k+1) = (n+1)(a-b)/a - u

    def term(s: float, c: float) -> float:
        return math.exp(-c * s) / -math.expm1(-s)

    return term(t, c1) - term(p * t, c2) - term(q * t, c3)


def h_dt(t: float, u: float, p: float, q: float) -> float:
    """Замкнутая форма dh/dt."""
    alpha = -(u + 1.0) * p * t
    beta = u * q * t
    if max(alpha, beta) > _EXP_LIMIT:
        return -math.inf
    d1 = -math.exp(-t) / math.expm1(-t) ** 2
    t2 = math.exp(alpha) / -math.expm1(-p * t)
    d2 = t2 * (-(u + 1.0) * p - p * math.exp(-p * t) / -math.expm1(-p * t))
    t3 = math.exp(beta) / -math.expm1(-q * t)
    d3 = t3 * (u * q - q * math.exp(-q * t) / -math.expm1(-q * t))
    return d1 - d2 - d3


def h_mixed_partial(t: float, u: float, p: float, q: float) -> float:
    """Замкнутая форма d^2 h / (dt du)."""
    alpha = -(u + 1.0) * p * t
    beta = u * q * t
    if max(alpha, beta) > _EXP_LIMIT:
        return -math.inf
    one_minus_p = -math.expm1(-p * t)
    one_minus_q = -math.expm1(-q * t)
    second = p * ((one_minus_p - p * t) - p * t * u * one_minus_p) * math.exp(alpha) / one_minus_p ** 2
    third = q * ((math.expm1(-q * t) + q * t * math.exp(-q * t)) - u * q * t * one_minus_q) * math.exp(beta) / one_minus_q ** 2
    return second + third


def h_mixed_partial_fd(t: float, u: float, p: float, q: float, step: float = 1e-4) -> float:
    """Центральная конечная разность для d^2 h / (dt du)."""
    return (
        h_value(t + step, u + step, p, q)
        - h_value(t + step, u - step, p, q)
        - h_value(t - step, u + step, p, q)
        + h_value(t - step, u - step, p, q)
    ) / (4.0 * step * step)


def h_zero_identities(t: float, p: float, q: float) -> Tuple[float, float]:
    """
    Невязки двух тождеств при u = 0:
    h(t,0) = (f(t)-f(pt))/(pt) + (f(t)-f(qt))/(qt),
    dh(t,0)/dt = (l(pt)-l(t))/(pt^2) + (l(qt)-l(t))/(qt^2).
    """
    via_f = (f_aux(t) - f_aux(p * t)) / (p * t) + (f_aux(t) - f_aux(q * t)) / (q * t)
    via_l = (l_aux(p * t) - l_aux(t)) / (p * t * t) + (l_aux(q * t) - l_aux(t)) / (q * t * t)
    return h_value(t, 0.0, p, q) - via_f, h_dt(t, 0.0, p, q) - via_l
