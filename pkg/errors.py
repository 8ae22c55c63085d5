"""
Исключения лаборатории raypf.
Провал математической проверки исключением не является: это значение
(вердикт со свидетелем). Исключения зарезервированы для неверных входных
данных, исчерпания бюджета и численных сбоев.
"""

from typing import Any, Optional


class RayPFError(Exception):
    """Базовое исключение проекта."""


class InvalidParamsError(RayPFError, ValueError):
    """Параметры не удовлетворяют инвариантам (луч, минор, спецификация прогона)."""


class BudgetExceededError(RayPFError):
    """Превышен комбинаторный бюджет (число миноров или узлов перебора)."""

    def __init__(self, what: str, limit: int, used: int):
        self.what = what
        self.limit = limit
        self.used = used
        super().__init__(f"Превышен бюджет '{what}': {used} > {limit}")


class QuadratureError(RayPFError):
    """Квадратура не сошлась; хранит достигнутую оценку ошибки."""

    def __init__(self, message: str, error_estimate: float):
        self.error_estimate = error_estimate
        super().__init__(f"{message} (оценка ошибки {error_estimate:.3e})")


class NumericalFaultError(RayPFError):
    """Численная проверка нарушена: лишняя смена знака, немонотонность и т.п."""

    def __init__(self, message: str, location: Optional[Any] = None):
        self.location = location
        suffix = f" в точке {location}" if location is not None else ""
        super().__init__(f"{message}{suffix}")
