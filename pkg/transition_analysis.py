"""
Режим a > b: точная классификация перехода log-вогнутость -> log-выпуклость
и аналитическая часть (g'' через тригамму и через квадратуру лапласовского
представления, корни h(t, u), асимптотика Ватсона).
"""

import logging
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Any, Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize

from errors import InvalidParamsError, NumericalFaultError, QuadratureError
from exact_core import RayParams, Regime, ray_sequence
import special_functions as sf

logger = logging.getLogger('raypf.transition')

QUAD_REL_TOL = 1e-9
QUAD_ABS_FLOOR = 1e-13
TAIL_TOL = 1e-12
ROOT_XTOL = 1e-10
AGREEMENT_TOL = 1e-8


@dataclass(frozen=True)
class AnalyticParams:
    """u = k - (n+1)b/a, p = a/b, q = a/(a-b); точные дроби."""
    u: Fraction
    p: Fraction
    q: Fraction

    def __post_init__(self):
        if 1 / self.p + 1 / self.q != 1:
            raise InvalidParamsError(f"Нужно 1/p + 1/q = 1, получено p={self.p}, q={self.q}")

    @classmethod
    def from_params(cls, params: RayParams) -> 'AnalyticParams':
        params.require(Regime.TRANSITION)
        a, b = params.a, params.b
        return cls(u=params.u, p=Fraction(a, b), q=Fraction(a, a - b))

    @classmethod
    def from_pq(cls, u: float, p: float) -> 'AnalyticParams':
        """Свободные (u, p) для сеточных проверок; q = p/(p-1)."""
        p_frac = Fraction(p).limit_denominator(10 ** 6)
        return cls(u=Fraction(u).limit_denominator(10 ** 6), p=p_frac, q=p_frac / (p_frac - 1))

    def floats(self) -> Tuple[float, float, float]:
        return float(self.u), float(self.p), float(self.q)

    def to_dict(self) -> Dict[str, Any]:
        return {'u': str(self.u), 'p': str(self.p), 'q': str(self.q)}


def analytic_params(params: RayParams) -> AnalyticParams:
    return AnalyticParams.from_params(params)


@dataclass
class TransitionProfile:
    """Точные знаки Q_j = C_{j+1}^2 - C_j C_{j+2} для j = 0..jMax и индекс перехода m."""
    params: RayParams
    j_max: int
    signs: List[int]
    m: int
    monotone_ok: bool
    x_star: Optional[float] = None
    watson_ratio: Optional[float] = None

    def run_length_signs(self) -> List[List[int]]:
        runs: List[List[int]] = []
        for s in self.signs:
            if runs and runs[-1][0] == s:
                runs[-1][1] += 1
            else:
                runs.append([s, 1])
        return runs

    def to_dict(self) -> Dict[str, Any]:
        return {
            'params': self.params.to_dict(),
            'jMax': self.j_max,
            'signs': self.run_length_signs(),
            'm': self.m,
            'monotoneOK': self.monotone_ok,
            'x_star': self.x_star,
            'watson_ratio': self.watson_ratio,
        }


def _sign(value: int) -> int:
    return (value > 0) - (value < 0)


def log_concavity_signs(values: Sequence[int], count: int) -> List[int]:
    """Знаки c_{j+1}^2 - c_j c_{j+2} для j = 0..count-1."""
    return [_sign(values[j + 1] * values[j + 1] - values[j] * values[j + 2]) for j in range(count)]


def classify(params: RayParams, j_max: int) -> TransitionProfile:
    """
    Точные знаки вторых разностей log C_j на окне j = 0..j_max.
    m - первый индекс со знаком <= 0 (j_max + 1, если все знаки положительны).
    """
    params.require(Regime.TRANSITION)
    if j_max < 3:
        raise InvalidParamsError(f"Нужно jMax >= 3, получено {j_max}")
    c = ray_sequence(params, j_max + 3).values
    signs = log_concavity_signs(c, j_max + 1)
    m = next((j for j, s in enumerate(signs) if s <= 0), j_max + 1)
    monotone = all(x >= y for x, y in zip(signs, signs[1:]))
    if not monotone:
        logger.warning(f"Луч {params.quadruple}: знаки не монотонны на окне {j_max}")
    return TransitionProfile(params=params, j_max=j_max, signs=signs, m=m, monotone_ok=monotone)


def log_convex_band_applicable(params: RayParams) -> bool:
    """-1 <= u <= 0 (точное сравнение дробей)."""
    return params.regime is Regime.TRANSITION and -1 <= params.u <= 0


@dataclass
class LogConvexBandVerdict:
    params: RayParams
    j_max: int
    passed: bool
    first_positive: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'params': self.params.to_dict(),
            'u': str(self.params.u),
            'jMax': self.j_max,
            'passed': self.passed,
            'first_positive': self.first_positive,
        }


def log_convex_band_check(params: RayParams, j_max: int) -> LogConvexBandVerdict:
    """При -1 <= u <= 0 последовательность log-выпукла: все знаки <= 0."""
    params.require(Regime.TRANSITION)
    if not log_convex_band_applicable(params):
        raise InvalidParamsError(f"regime not applicable: u = {params.u} вне [-1, 0]")
    profile = classify(params, j_max)
    first_positive = next((j for j, s in enumerate(profile.signs) if s > 0), None)
    return LogConvexBandVerdict(params, j_max, first_positive is None, first_positive)


def g_second(params: RayParams, x: float) -> float:
    """g''(x) = a^2 psi1(n+ax+1) - b^2 psi1(k+bx+1) - (a-b)^2 psi1(n-k+(a-b)x+1)."""
    params.require(Regime.TRANSITION)
    n, k, a, b = params.quadruple
    if x < 0:
        raise InvalidParamsError(f"g'' определена при x >= 0, получено {x}")
    return (
        a * a * sf.trigamma(n + a * x + 1)
        - b * b * sf.trigamma(k + b * x + 1)
        - (a - b) ** 2 * sf.trigamma(n - k + (a - b) * x + 1)
    )


def _tail_cutoff(params: RayParams, x: float) -> float:
    """
    T, при котором хвост интеграла за T меньше TAIL_TOL.
    При t >= 1 |e^{-(n+1)t} h| <= 3/(1-e^{-1}) e^{-rho t}, rho - наименьшая из трёх скоростей.
    """
    n, k, a, b = params.quadruple
    ap = AnalyticParams.from_params(params)
    rho = min(n + 1.0, (k + 1) * float(ap.p), (n - k + 1) * float(ap.q))
    lam = a * x + rho
    scale = a * a * 3.0 / (1.0 - math.exp(-1.0))
    t = 1.0
    while scale * math.exp(-lam * t) * (t / lam + 1.0 / lam ** 2) > TAIL_TOL:
        t *= 1.25
    return t


def g_second_quadrature(params: RayParams, x: float, limit: int = 500) -> float:
    """g''(x) = int_0^inf a^2 t e^{-axt-(n+1)t} h(t, u) dt адаптивной квадратурой."""
    params.require(Regime.TRANSITION)
    if x < 0:
        raise InvalidParamsError(f"g'' определена при x >= 0, получено {x}")
    n, _, a, _ = params.quadruple
    u, p, q = AnalyticParams.from_params(params).floats()
    upper = _tail_cutoff(params, x)

    def integrand(t: float) -> float:
        if t <= 0.0:
            return 0.0
        return a * a * t * math.exp(-a * x * t) * sf.h_weighted(t, n, u, p, q)

    with warnings.catch_warnings():
        warnings.simplefilter('ignore', integrate.IntegrationWarning)
        value, abserr = integrate.quad(integrand, 0.0, upper, epsabs=QUAD_ABS_FLOOR * 1e-2,
                                       epsrel=QUAD_REL_TOL * 1e-1, limit=limit)
    accepted = max(QUAD_ABS_FLOOR, QUAD_REL_TOL * abs(value))
    if abserr > accepted:
        raise QuadratureError(f"Квадратура g''({x}) для {params.quadruple} не сошлась", abserr)
    return value


def h_eval(ap: AnalyticParams, t: float) -> float:
    """h(t, u) для параметров ap."""
    u, p, q = ap.floats()
    return sf.h_value(t, u, p, q)


def sign_changes(values: Iterable[float]) -> int:
    """Число перемен знака в числовом ряду (нули и nan пропускаются)."""
    signs = [v > 0 for v in values if v != 0 and not math.isnan(v)]
    return sum(1 for x, y in zip(signs, signs[1:]) if x != y)


def _bracket_root(func: Callable[[float], float], grid: Sequence[float], values: Sequence[float]) -> Optional[float]:
    changes = [
        i for i in range(len(values) - 1)
        if values[i] != 0 and values[i + 1] != 0 and (values[i] > 0) != (values[i + 1] > 0)
    ]
    exact = [grid[i] for i, v in enumerate(values) if v == 0]
    if exact:
        return exact[0]
    if not changes:
        return None
    i = changes[0]

    def clipped(t: float) -> float:
        return max(func(t), -1e300)

    return optimize.bisect(clipped, grid[i], grid[i + 1], xtol=ROOT_XTOL)


def h_root(ap: AnalyticParams, t_max: float, points: int = 2000) -> Optional[float]:
    """Единственный корень h(., u) на (0, t_max] или None; второй смены знака быть не должно."""
    if t_max <= 0:
        raise InvalidParamsError(f"Нужно tMax > 0, получено {t_max}")
    grid = np.geomspace(min(1e-6, t_max / 2), t_max, points)
    values = [h_eval(ap, float(t)) for t in grid]
    # h(0+) = 1/2 > 0
    changes = sign_changes([0.5] + values)
    if changes > 1:
        raise NumericalFaultError(f"multiple sign changes detected: {changes} у h(., {ap.u})", location=float(ap.u))
    if changes == 0:
        return None
    if values[0] < 0:
        # корень левее первой точки сетки
        return optimize.bisect(lambda t: h_eval(ap, t), 1e-12, float(grid[0]), xtol=ROOT_XTOL)
    return _bracket_root(lambda t: h_eval(ap, t), [float(t) for t in grid], values)


def predict_transition(params: RayParams, x_max: float, points: int = 2000) -> Optional[float]:
    """Точка x*, где g'' меняет знак с минуса на плюс, или None."""
    params.require(Regime.TRANSITION)
    grid = [float(x) for x in np.linspace(0.0, x_max, points + 1)]
    values = [g_second(params, x) for x in grid]
    changes = sign_changes(values)
    if changes > 1:
        raise NumericalFaultError(f"g'' меняет знак {changes} раз(а) для {params.quadruple}", location=x_max)
    if changes == 0:
        return None
    first = next(v for v in values if v != 0)
    if first > 0:
        raise NumericalFaultError(f"g'' меняет знак с плюса на минус для {params.quadruple}")
    return _bracket_root(lambda x: g_second(params, x), grid, values)


def variation_check(params: RayParams, x_max: float = 100.0, t_max: float = 100.0, points: int = 2000) -> Dict[str, Any]:
    """Перемен знака у g'' на (0, x_max] не больше, чем у h(., u) на (0, t_max]."""
    ap = AnalyticParams.from_params(params)
    xs = np.linspace(x_max / points, x_max, points)
    ts = np.geomspace(1e-6, t_max, points)
    g_changes = sign_changes(g_second(params, float(x)) for x in xs)
    h_changes = sign_changes([0.5] + [h_eval(ap, float(t)) for t in ts])
    return {'g_sign_changes': g_changes, 'h_sign_changes': h_changes, 'passed': g_changes <= h_changes}


def watson_ratio(params: RayParams, x: float) -> float:
    """g''(x) / (a^2 / (2(ax+n+1)^2)); стремится к 1."""
    n, _, a, _ = params.quadruple
    return g_second(params, x) * 2.0 * (a * x + n + 1) ** 2 / (a * a)


def watson_second_order(params: RayParams) -> Fraction:
    """
    Точный kappa: watson_ratio(x) = 1 + kappa/x + O(x^-2).
    Показывает, при каких x окно 1 % вообще достижимо.
    """
    params.require(Regime.TRANSITION)
    n, k, a, b = params.quadruple
    sixth = Fraction(1, 6)

    def cubic(c: int, alpha: int) -> Fraction:
        return (c * c - c + sixth) / alpha

    g3 = cubic(n + 1, a) - cubic(k + 1, b) - cubic(n - k + 1, a - b)
    return 2 * (g3 + Fraction(n + 1, a))


def _grid_p_values() -> List[float]:
    return [1.25, 1.5, 2.0, 3.0, 5.0]


@dataclass
class CheckReport:
    """Сводка численной проверки: имя, итог, запас и место худшей точки."""
    name: str
    passed: bool
    samples: int
    margin: float
    worst_at: Optional[Tuple[float, ...]] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'passed': self.passed,
            'samples': self.samples,
            'margin': self.margin,
            'worst_at': list(self.worst_at) if self.worst_at else None,
            'details': self.details,
        }


def _strictly_decreasing(name: str, func: Callable[[float], float], grid: Sequence[float]) -> CheckReport:
    values = [func(float(s)) for s in grid]
    gaps = [values[i] - values[i + 1] for i in range(len(values) - 1)]
    worst = min(range(len(gaps)), key=gaps.__getitem__)
    report = CheckReport(name, gaps[worst] > 0, len(values), gaps[worst], (float(grid[worst]),),
                         {'first': values[0], 'last': values[-1]})
    if not report.passed:
        raise NumericalFaultError(f"{name}: убывание нарушено", location=float(grid[worst]))
    return report


def aux_monotone_checks(points: int = 1000) -> List[CheckReport]:
    """
    f(s) и l(s) строго убывают на логарифмической сетке [1e-6, 50];
    d^2 h/(dt du) < 0 при u >= 0 (конечные разности, сверка с замкнутой формой).
    """
    grid = np.geomspace(1e-6, 50.0, points)
    reports = [
        _strictly_decreasing('f_decreasing', sf.f_aux, grid),
        _strictly_decreasing('l_decreasing', sf.l_aux, grid),
    ]

    worst_value = -math.inf
    worst_at = None
    worst_rel = 0.0
    samples = 0
    for p in _grid_p_values():
        q = p / (p - 1.0)
        for t in np.geomspace(0.05, 8.0, 40):
            for u in np.linspace(0.0, 2.0, 9):
                fd = sf.h_mixed_partial_fd(float(t), float(u), p, q)
                closed = sf.h_mixed_partial(float(t), float(u), p, q)
                samples += 1
                if not fd < 0:
                    raise NumericalFaultError("d2h/dtdu >= 0", location=(p, float(t), float(u)))
                worst_rel = max(worst_rel, abs(fd - closed) / abs(closed))
                if fd > worst_value:
                    worst_value, worst_at = fd, (p, float(t), float(u))
    reports.append(CheckReport('mixed_partial_negative', True, samples, worst_value, worst_at,
                               {'max_rel_diff_closed_form': worst_rel}))
    logger.info(f"Вспомогательные проверки: {sum(r.samples for r in reports)} точек, нарушений нет")
    return reports


def h_property_checks(points: int = 60) -> List[CheckReport]:
    """
    h > 0 при -1 <= u <= 0; dh/dt < 0 при u >= 0 и u <= -1; h вогнута по u;
    тождества h(t,0) через f и dh(t,0)/dt через l.
    """
    t_grid = [float(t) for t in np.geomspace(1e-3, 30.0, points)]
    reports: List[CheckReport] = []

    def scan(name: str, predicate: Callable[[float, float, float, float], float], u_values: Sequence[float]) -> CheckReport:
        worst, where, count = math.inf, None, 0
        for p in _grid_p_values():
            q = p / (p - 1.0)
            for u in u_values:
                for t in t_grid:
                    margin = predicate(t, float(u), p, q)
                    count += 1
                    if margin < worst:
                        worst, where = margin, (p, t, float(u))
                    if not margin > 0:
                        raise NumericalFaultError(f"{name} нарушено", location=(p, t, float(u)))
        return CheckReport(name, True, count, worst, where)

    reports.append(scan('h_positive_u_in_[-1,0]', lambda t, u, p, q: sf.h_value(t, u, p, q),
                        np.linspace(-1.0, 0.0, 11)))

    def decreasing(t: float, u: float, p: float, q: float) -> float:
        step = t * 1e-3
        fd = sf.h_value(t, u, p, q) - sf.h_value(t + step, u, p, q)
        return min(-sf.h_dt(t, u, p, q), fd / step)

    reports.append(scan('h_decreasing_u_ge_0', decreasing, np.linspace(0.0, 3.0, 13)))
    reports.append(scan('h_decreasing_u_le_-1', decreasing, [-1.0, -1.25, -1.5, -2.0, -3.0, -4.0]))

    def concave(t: float, u: float, p: float, q: float) -> float:
        d = 0.05
        return -(sf.h_value(t, u + d, p, q) - 2.0 * sf.h_value(t, u, p, q) + sf.h_value(t, u - d, p, q))

    reports.append(scan('h_concave_in_u', concave, np.linspace(-1.5, 0.5, 9)))

    worst_f = worst_l = 0.0
    for p in _grid_p_values():
        q = p / (p - 1.0)
        for t in t_grid:
            rf, rl = sf.h_zero_identities(t, p, q)
            scale = max(abs(sf.h_dt(t, 0.0, p, q)), 1e-300)
            worst_f = max(worst_f, abs(rf) / max(abs(sf.h_value(t, 0.0, p, q)), 1e-300))
            worst_l = max(worst_l, abs(rl) / scale)
    identities_ok = worst_f < 1e-6 and worst_l < 1e-6
    reports.append(CheckReport('h_zero_identities', identities_ok, 2 * len(t_grid) * len(_grid_p_values()),
                               max(worst_f, worst_l), None, {'max_rel_f': worst_f, 'max_rel_l': worst_l}))
    return reports


def analytic_report(
    params: RayParams,
    xs: Sequence[float] = (0.0, 0.5, 1.0, 2.0, 5.0, 10.0),
    x_max: float = 200.0,
    t_max: float = 100.0,
    watson_x: float = 1e3,
    points: int = 2000
) -> Dict[str, Any]:
    """Сводка для команды analytic: g'' двумя методами, x*, Ватсон, диагностика h."""
    ap = AnalyticParams.from_params(params)
    rows = []
    for x in xs:
        trig = g_second(params, x)
        quad = g_second_quadrature(params, x)
        rows.append({'x': x, 'trigamma': trig, 'quadrature': quad,
                     'rel_diff': abs(trig - quad) / abs(trig) if trig else None})
    kappa = watson_second_order(params)
    return {
        'params': params.to_dict(),
        'analytic_params': ap.to_dict(),
        'log_convex_band_applicable': log_convex_band_applicable(params),
        'g_second': rows,
        'x_star': predict_transition(params, x_max, points),
        'watson_x': watson_x,
        'watson_ratio': watson_ratio(params, watson_x),
        'watson_kappa': str(kappa),
        'watson_kappa_float': float(kappa),
        'h_limit_at_1e-4': h_eval(ap, 1e-4),
        'h_root': h_root(ap, t_max, points),
        'variation': variation_check(params, min(x_max, 100.0), t_max, points),
    }


def analytic_verdict(report: Dict[str, Any]) -> bool:
    """Итог сводки: вариация не нарушена и два метода g'' согласны до AGREEMENT_TOL."""
    worst = 0.0
    for row in report['g_second']:
        if row['trigamma']:
            diff = row['rel_diff']
        else:
            diff = 0.0 if abs(row['quadrature']) <= QUAD_ABS_FLOOR else math.inf
        worst = max(worst, diff)
    report['max_rel_diff'] = worst
    report['passed'] = bool(report['variation']['passed'] and worst <= AGREEMENT_TOL)
    return report['passed']
