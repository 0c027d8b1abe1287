# core/exceptions.py
"""Иерархия ошибок SandwichLab. CLI переводит их в коды выхода."""


class SandwichLabError(Exception):
    """Базовая ошибка пакета."""

    exit_code = 2


class PresentationError(SandwichLabError):
    """Нарушение инвариантов pc-презентации (индексы, правые части)."""


class PresentationSyntaxError(PresentationError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class FuelExhausted(SandwichLabError):
    """Сборка (collection) не уложилась в лимит шагов."""

    exit_code = 3

    def __init__(self, steps: int, partial: str):
        self.steps = steps
        self.partial = partial
        super().__init__(f"fuel exhausted after {steps} steps; partial word: {partial}")


class CapExceeded(SandwichLabError):
    exit_code = 3


class PolicyError(SandwichLabError):
    """Невалидная SamplingPolicy."""


class PreconditionViolation(SandwichLabError):
    pass


class UnsupportedOperation(SandwichLabError):
    pass


class ClassBoundExceeded(SandwichLabError):
    """Нижний центральный ряд длиннее max_class; last_term - последний посчитанный член."""

    exit_code = 3

    def __init__(self, bound: int, last_term):
        self.bound = bound
        self.last_term = last_term
        super().__init__(f"nilpotency class exceeds {bound}")


class NotNilpotent(SandwichLabError):
    exit_code = 1


class UnknownCatalogKey(SandwichLabError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class LieAlgebraError(SandwichLabError):
    """Формат файла алгебры, несовпадение размерностей."""


class ExpressionSyntaxError(SandwichLabError):
    pass
