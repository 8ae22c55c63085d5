"""
Тесты точной арифметики: биномиальные коэффициенты, числа Деланнуа,
последовательности лучей и параметры RayParams.
"""

import math

import pytest

from errors import InvalidParamsError
from exact_core import (
    DelannoyTable, RayParams, Regime, SequenceKind, binomial, delannoy, delannoy_closed_form,
    has_no_internal_zeros, is_log_concave, is_unimodal, ray_sequence
)


def test_binomial_cases():
    """Значения и соглашение о нуле вне 0 <= k <= n."""
    test_cases = [
        (4, 1, 4),
        (7, 7, 1),
        (8, 9, 0),
        (5, -1, 0),
        (0, 0, 1),
        (60, 30, 118264581564861424),
    ]
    for n, k, expected in test_cases:
        assert binomial(n, k) == expected, (n, k)


def test_binomial_symmetry_and_factorial_oracle():
    for n in range(61):
        for k in range(n + 1):
            value = binomial(n, k)
            assert value == binomial(n, n - k)
            assert value == math.factorial(n) // (math.factorial(k) * math.factorial(n - k))


def test_binomial_rejects_negative_n():
    with pytest.raises(InvalidParamsError):
        binomial(-1, 0)


def test_delannoy_values():
    assert delannoy(0, 5) == 1
    assert delannoy(1, 1) == 3
    assert delannoy(3, 3) == 63
    assert delannoy(2, 3) == 25


def test_delannoy_matches_closed_form_and_is_symmetric():
    table = DelannoyTable()
    for n in range(12):
        for k in range(12):
            assert table.value(n, k) == delannoy_closed_form(n, k)
            assert table.value(n, k) == table.value(k, n)
    assert len(table) > 0


def test_delannoy_rejects_negative():
    with pytest.raises(InvalidParamsError):
        delannoy(-1, 2)


def test_ray_sequence_examples():
    """Первые члены лучей, включая обрыв носителя."""
    seq = ray_sequence(RayParams(4, 1, 1, 2), 5)
    assert seq.values == (4, 10, 6, 1, 0)
    assert seq.last_nonzero == 3
    assert seq.is_complete
    assert seq.nonzero_prefix() == (4, 10, 6, 1)

    assert ray_sequence(RayParams(0, 0, 2, 1), 5).values == (1, 2, 6, 20, 70)
    assert ray_sequence(RayParams(3, 0, 1, 2), 1).values == (1,)


def test_ray_sequence_pf_support_is_zero_beyond_bound():
    for n in range(9):
        for b in range(2, 5):
            for a in range(1, b):
                for k in range(min(n, b - 1) + 1):
                    params = RayParams(n, k, a, b)
                    seq = ray_sequence(params, params.support_bound + 4)
                    assert all(v > 0 for v in seq.values[:params.support_bound + 1])
                    assert all(v == 0 for v in seq.values[params.support_bound + 1:])


def test_ray_sequence_delannoy():
    seq = ray_sequence(RayParams(4, 1, 1, 2), 5, SequenceKind.DELANNOY)
    assert seq.values == (7, 25, 11, 1, 0)
    assert seq.kind is SequenceKind.DELANNOY


def test_ray_sequence_transition_has_no_support_bound():
    seq = ray_sequence(RayParams(0, 0, 2, 1), 3)
    assert seq.last_nonzero is None
    assert not seq.is_complete
    with pytest.raises(InvalidParamsError):
        ray_sequence(RayParams(0, 0, 2, 1), 3, SequenceKind.DELANNOY)
    with pytest.raises(InvalidParamsError):
        ray_sequence(RayParams(0, 0, 2, 1), 0)


def test_ray_params_regime_and_u():
    assert RayParams(4, 1, 1, 2).regime is Regime.PF
    params = RayParams(0, 0, 2, 1)
    assert params.regime is Regime.TRANSITION
    assert str(params.u) == '-1/2'
    assert RayParams(3, 1, 2, 1).u == -1
    assert params.to_dict() == {'n': 0, 'k': 0, 'a': 2, 'b': 1, 'regime': 'Transition'}


@pytest.mark.parametrize('args', [
    (2, 3, 1, 2),            # k > n
    (4, 1, 2, 2),            # a = b
    (4, 2, 1, 2),            # PF с k >= b
    (4, 1, 0, 2),            # a = 0
    (4.0, 1, 1, 2),          # не целое
    (True, 0, 2, 1),         # bool не считается целым
])
def test_ray_params_rejects_invalid(args):
    with pytest.raises(InvalidParamsError):
        RayParams(*args)


def test_ray_params_rejects_wrong_explicit_regime():
    with pytest.raises(InvalidParamsError):
        RayParams(4, 1, 1, 2, Regime.TRANSITION)
    assert RayParams(4, 1, 1, 2, Regime.PF).regime is Regime.PF
    with pytest.raises(InvalidParamsError):
        RayParams(4, 1, 1, 2).require(Regime.TRANSITION)


def test_sequence_predicates():
    assert is_log_concave([4, 10, 6, 1, 0])
    assert not is_log_concave([1, 0, 1])
    assert has_no_internal_zeros([0, 0, 3, 1, 0])
    assert not has_no_internal_zeros([1, 0, 1])
    assert is_unimodal([1, 3, 2, 2, 1])
    assert not is_unimodal([1, 2, 1, 2])
    assert is_unimodal([])


def test_pascal_rule():
    for n in range(1, 61):
        for k in range(1, n + 1):
            assert binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k)
