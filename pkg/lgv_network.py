"""
Плоская сеть для луча режима PF и проверка тождеств Линдстрёма-Гесселя-Вьенно.

Вершины V = {(x, y): x >= 0, 0 <= (b-a)x + by <= bn - ak}, рёбра (x,y)->(x+1,y)
и (x,y)->(x,y+1), в режиме Деланнуа ещё диагональ (x,y)->(x+1,y+1).
Источники s_i = (bi, (a-b)i), стоки t_i = (k+bi, n-k+(a-b)i).
Ось x рисуется горизонтально, ось y - вертикально.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Any, FrozenSet, List, Optional, Sequence, Tuple

from errors import BudgetExceededError, InvalidParamsError
from exact_core import RayParams, Regime, SequenceKind, ray_sequence
from total_positivity import DEFAULT_MINOR_CAP, count_minors, bareiss_determinant, toeplitz_window

logger = logging.getLogger('raypf.lgv')

DEFAULT_ENUMERATION_CAP = 10 ** 7

Vertex = Tuple[int, int]


def contains(params: RayParams, x: int, y: int) -> bool:
    """Точная проверка принадлежности (x, y) множеству V."""
    n, k, a, b = params.quadruple
    level = (b - a) * x + b * y
    return x >= 0 and 0 <= level <= b * n - a * k


@dataclass(frozen=True)
class LatticeNetwork:
    """Материализованная часть сети: вершины в топологическом порядке (x+y, x)."""
    params: RayParams
    source_count: int
    delannoy_mode: bool
    order: Tuple[Vertex, ...]
    sources: Tuple[Vertex, ...]
    sinks: Tuple[Vertex, ...]
    vertex_set: FrozenSet[Vertex] = field(repr=False, default=frozenset())

    def steps(self) -> Tuple[Vertex, ...]:
        return ((1, 0), (0, 1), (1, 1)) if self.delannoy_mode else ((1, 0), (0, 1))

    def successors(self, v: Vertex) -> List[Vertex]:
        out = []
        for dx, dy in self.steps():
            w = (v[0] + dx, v[1] + dy)
            if w in self.vertex_set:
                out.append(w)
        return out

    def predecessors(self, v: Vertex) -> List[Vertex]:
        out = []
        for dx, dy in self.steps():
            w = (v[0] - dx, v[1] - dy)
            if w in self.vertex_set:
                out.append(w)
        return out

    def edges(self) -> List[Tuple[Vertex, Vertex]]:
        return [(v, w) for v in self.order for w in self.successors(v)]


@dataclass(frozen=True)
class PathMatrixWindow:
    """w(i, j) = число путей s_i -> t_j для i, j < size."""
    entries: Tuple[Tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.entries)

    def to_dict(self) -> Dict[str, Any]:
        return {'size': self.size, 'entries': [list(row) for row in self.entries]}


@dataclass
class LGVReport:
    """Отчёт verify_lgv: по одной записи на проверку, плюс список расхождений."""
    params: RayParams
    window: int
    max_order: int
    delannoy_mode: bool
    checks: List[Dict[str, Any]] = field(default_factory=list)
    path_matrix: Optional[PathMatrixWindow] = None

    @property
    def passed(self) -> bool:
        return all(c['passed'] for c in self.checks)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'params': self.params.to_dict(),
            'window': self.window,
            'max_order': self.max_order,
            'delannoy_mode': self.delannoy_mode,
            'passed': self.passed,
            'checks': self.checks,
            'path_matrix': self.path_matrix.to_dict() if self.path_matrix else None,
        }


def build_network(params: RayParams, source_count: int, delannoy_mode: bool = False) -> LatticeNetwork:
    """
    Материализует V для источников s_0..s_{c-1} и стоков t_0..t_{c-1}.
    Рёбра не уменьшают координат, поэтому x правее последнего стока не нужен.
    """
    params.require(Regime.PF)
    if source_count < 0:
        raise InvalidParamsError(f"Число источников должно быть >= 0, получено {source_count}")
    n, k, a, b = params.quadruple
    top = b * n - a * k

    sources = tuple((b * i, (a - b) * i) for i in range(source_count))
    sinks = tuple((k + b * i, n - k + (a - b) * i) for i in range(source_count))

    vertices: List[Vertex] = []
    if source_count:
        max_x = max(x for x, _ in sources + sinks)
        for x in range(max_x + 1):
            # 0 <= (b-a)x + by <= top  =>  y в [ceil(-(b-a)x/b), floor((top-(b-a)x)/b)]
            y_lo = -((b - a) * x // b)
            y_hi = (top - (b - a) * x) // b
            vertices.extend((x, y) for y in range(y_lo, y_hi + 1))

    order = tuple(sorted(vertices, key=lambda v: (v[0] + v[1], v[0])))
    vertex_set = frozenset(order)
    for v in sources + sinks:
        if v not in vertex_set:
            raise AssertionError(f"Концевая вершина {v} вне V для {params.quadruple}")

    logger.debug(
        f"Сеть {params.quadruple}: {len(order)} вершин, {source_count} источников, "
        f"Деланнуа={'да' if delannoy_mode else 'нет'}"
    )
    return LatticeNetwork(
        params=params,
        source_count=source_count,
        delannoy_mode=delannoy_mode,
        order=order,
        sources=sources,
        sinks=sinks,
        vertex_set=vertex_set,
    )


def _check_index(net: LatticeNetwork, index: int, what: str) -> None:
    if not 0 <= index < net.source_count:
        raise InvalidParamsError(f"Индекс {what} {index} вне диапазона 0..{net.source_count - 1}")


def _in_box(v: Vertex, start: Vertex, end: Vertex) -> bool:
    return start[0] <= v[0] <= end[0] and start[1] <= v[1] <= end[1]


def _level(v: Vertex) -> int:
    return v[0] + v[1]


def _box_vertices(net: LatticeNetwork, start: Vertex, end: Vertex) -> List[Vertex]:
    """Вершины V в прямоугольнике start..end, порядок (x, y) топологический."""
    return [
        (x, y)
        for x in range(start[0], end[0] + 1)
        for y in range(start[1], end[1] + 1)
        if (x, y) in net.vertex_set
    ]


def _count_between(
    net: LatticeNetwork,
    start: Vertex,
    end: Vertex,
    blocked: FrozenSet[Vertex] = frozenset(),
    box: Optional[Sequence[Vertex]] = None
) -> int:
    """ДП только по прямоугольнику start..end; пути не заходят в blocked."""
    if start in blocked or end in blocked or end[0] < start[0] or end[1] < start[1]:
        return 0
    counts: Dict[Vertex, int] = {}
    for v in (box if box is not None else _box_vertices(net, start, end)):
        if v in blocked:
            continue
        if v == start:
            counts[v] = 1
        else:
            counts[v] = sum(counts.get(w, 0) for w in net.predecessors(v))
    return counts.get(end, 0)


def path_counts_from(net: LatticeNetwork, i: int) -> Dict[Vertex, int]:
    """Число путей из s_i в каждую вершину сети."""
    _check_index(net, i, 'источника')
    counts: Dict[Vertex, int] = {net.sources[i]: 1}
    for v in net.order:
        c = counts.get(v)
        if c:
            for w in net.successors(v):
                counts[w] = counts.get(w, 0) + c
    return counts


def path_count(net: LatticeNetwork, i: int, j: int) -> int:
    """Число направленных путей s_i -> t_j."""
    _check_index(net, i, 'источника')
    _check_index(net, j, 'стока')
    return _count_between(net, net.sources[i], net.sinks[j])


def path_count_reverse(net: LatticeNetwork, i: int, j: int) -> int:
    """То же число путей, но ДП идёт от стока к источнику по обратным рёбрам."""
    _check_index(net, i, 'источника')
    _check_index(net, j, 'стока')
    start, end = net.sources[i], net.sinks[j]
    if end[0] < start[0] or end[1] < start[1]:
        return 0
    counts: Dict[Vertex, int] = {end: 1}
    for v in reversed(net.order):
        c = counts.get(v)
        if not c:
            continue
        for w in net.predecessors(v):
            if _in_box(w, start, end):
                counts[w] = counts.get(w, 0) + c
    return counts.get(start, 0)


def path_matrix(net: LatticeNetwork, size: Optional[int] = None) -> PathMatrixWindow:
    """Окно матрицы путей size x size."""
    size = net.source_count if size is None else size
    if size > net.source_count:
        raise InvalidParamsError(f"Окно {size} больше числа источников {net.source_count}")
    rows = []
    for i in range(size):
        counts = path_counts_from(net, i)
        rows.append(tuple(counts.get(net.sinks[j], 0) for j in range(size)))
    return PathMatrixWindow(tuple(rows))


class _FamilyCounter:
    """
    Точный подсчёт семейств вершинно-непересекающихся путей.
    Все пути продвигаются синхронно по уровням x + y: состояние - кортеж текущих
    вершин (None - путь ещё не начался). Общая вершина двух путей означает, что
    в момент её уровня оба пути стоят в ней, поэтому достаточно требовать
    попарно различных текущих вершин в каждом состоянии.
    """

    def __init__(self, net: LatticeNetwork, pairs: Sequence[Tuple[Vertex, Vertex]], cap: int):
        self.net = net
        self.pairs = pairs
        self.cap = cap
        self.nodes = 0

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.cap:
            raise BudgetExceededError('enumeration_cap', self.cap, self.nodes)

    def _options(self, r: int, pos: Optional[Vertex], level: int) -> List[Optional[Vertex]]:
        start, end = self.pairs[r]
        if pos is None:
            return [start] if _level(start) == level + 1 else [None]
        if pos == end or _level(pos) > level:
            return [pos]
        return [w for w in self.net.successors(pos) if w[0] <= end[0] and w[1] <= end[1]]

    def count(self) -> int:
        first = min(_level(s) for s, _ in self.pairs)
        last = max(_level(t) for _, t in self.pairs)
        initial = tuple(s if _level(s) == first else None for s, _ in self.pairs)
        states: Dict[Tuple[Optional[Vertex], ...], int] = {initial: 1}
        self._tick()
        for level in range(first, last):
            advanced: Dict[Tuple[Optional[Vertex], ...], int] = {}
            for state, ways in states.items():
                options = [self._options(r, pos, level) for r, pos in enumerate(state)]
                for nxt in itertools.product(*options):
                    placed = [v for v in nxt if v is not None]
                    if len(placed) != len(set(placed)):
                        continue
                    self._tick()
                    advanced[nxt] = advanced.get(nxt, 0) + ways
            states = advanced
            if not states:
                return 0
        return states.get(tuple(t for _, t in self.pairs), 0)


def disjoint_families(
    net: LatticeNetwork,
    rows: Sequence[int],
    cols: Sequence[int],
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
) -> int:
    """
    Число семейств попарно вершинно-непересекающихся путей s_{I_r} -> t_{J_r}.
    Учитывается только сохраняющее порядок сопоставление I_r <-> J_r.
    """
    if len(rows) != len(cols) or not rows:
        raise InvalidParamsError(f"Нужно |I| = |J| >= 1, получено I={tuple(rows)}, J={tuple(cols)}")
    for i in rows:
        _check_index(net, i, 'источника')
    for j in cols:
        _check_index(net, j, 'стока')
    pairs = [(net.sources[i], net.sinks[j]) for i, j in zip(rows, cols)]
    if any(_count_between(net, s, t) == 0 for s, t in pairs):
        return 0
    return _FamilyCounter(net, pairs, enumeration_cap).count()


def verify_lgv(
    params: RayParams,
    window_size: int,
    max_order: int,
    delannoy_mode: bool = False,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
    minor_cap: int = DEFAULT_MINOR_CAP
) -> LGVReport:
    """
    Три проверки: (i) окно матрицы путей равно тёплицеву окну C_j (или D_j);
    (ii) каждый минор порядка <= max_order равен числу непересекающихся семейств;
    (iii) все эти миноры неотрицательны.
    """
    params.require(Regime.PF)
    if window_size < 1 or not 1 <= max_order <= window_size:
        raise InvalidParamsError(f"Нужно 1 <= max_order <= window, получено {max_order}, {window_size}")
    total = count_minors(window_size, max_order)
    if total > minor_cap:
        raise BudgetExceededError('minor_cap', minor_cap, total)

    kind = SequenceKind.DELANNOY if delannoy_mode else SequenceKind.BINOMIAL
    net = build_network(params, window_size, delannoy_mode)
    report = LGVReport(params=params, window=window_size, max_order=max_order, delannoy_mode=delannoy_mode)

    matrix = path_matrix(net)
    report.path_matrix = matrix
    toeplitz = toeplitz_window(ray_sequence(params, window_size, kind), window_size)
    mismatches = [
        {'i': i, 'j': j, 'paths': matrix.entries[i][j], 'toeplitz': toeplitz.entry(i, j)}
        for i in range(window_size) for j in range(window_size)
        if matrix.entries[i][j] != toeplitz.entry(i, j)
    ]
    report.checks.append({
        'check': 'path_matrix_equals_toeplitz',
        'passed': not mismatches,
        'sequence': kind.value,
        'mismatches': mismatches,
    })

    family_mismatch: Optional[Dict[str, Any]] = None
    negative: Optional[Dict[str, Any]] = None
    compared = 0
    for order in range(1, max_order + 1):
        for rows in itertools.combinations(range(window_size), order):
            for cols in itertools.combinations(range(window_size), order):
                value = bareiss_determinant([[matrix.entries[i][j] for j in cols] for i in rows])
                compared += 1
                if value < 0 and negative is None:
                    negative = {'I': list(rows), 'J': list(cols), 'minor': value}
                if family_mismatch is None:
                    families = disjoint_families(net, rows, cols, enumeration_cap)
                    if families != value:
                        family_mismatch = {'I': list(rows), 'J': list(cols), 'minor': value, 'families': families}
                        logger.error(f"Минор I={rows}, J={cols} = {value}, а семейств {families}")

    report.checks.append({
        'check': 'minors_equal_disjoint_families',
        'passed': family_mismatch is None,
        'minors_compared': compared,
        'witness': family_mismatch,
    })
    report.checks.append({
        'check': 'minors_nonnegative',
        'passed': negative is None,
        'witness': negative,
    })
    logger.info(
        f"LGV {params.quadruple} окно {window_size} порядок {max_order}: "
        f"{'пройдено' if report.passed else 'ПРОВАЛ'}"
    )
    return report


def export_dot(net: LatticeNetwork) -> str:
    """Детерминированное DOT-описание сети; вершина (x, y) рисуется в точке (x, y)."""
    labels: Dict[Vertex, str] = {}
    for i, v in enumerate(net.sources):
        labels[v] = f"s{i}"
    for i, v in enumerate(net.sinks):
        labels[v] = f"{labels[v]}/t{i}" if v in labels else f"t{i}"

    def name(v: Vertex) -> str:
        return f'"v_{v[0]}_{v[1]}"'

    n, k, a, b = net.params.quadruple
    lines = [
        f'digraph lattice_{n}_{k}_{a}_{b} {{',
        '  graph [splines=false];',
        '  node [shape=circle, width=0.15, fixedsize=true, label=""];',
    ]
    for v in net.order:
        attrs = [f'pos="{v[0]},{v[1]}!"']
        if v in labels:
            attrs.append(f'label="{labels[v]}"')
            attrs.append('shape=box')
        lines.append(f'  {name(v)} [{", ".join(attrs)}];')
    for v, w in net.edges():
        style = ' [style=dashed]' if (w[0] - v[0], w[1] - v[1]) == (1, 1) else ''
        lines.append(f'  {name(v)} -> {name(w)}{style};')
    lines.append('}')
    return "\n".join(lines) + "\n"
