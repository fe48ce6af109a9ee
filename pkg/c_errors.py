from typing import *


class ToolkitError(Exception):
    """Базовое исключение пакета. Всё, что от него наследуется, пробрасывается логгером дальше."""


class DomainError(ToolkitError, ValueError):
    """Нарушено предусловие операции (genus, длины, показатели, ...)."""


class WordParseError(DomainError):
    def __init__(self, token: str, position: int, reason: str = "unknown letter"):
        self.token = token
        self.position = position
        self.reason = reason
        super().__init__(f"bad token {token!r} at position {position}: {reason}")


class NotHyperbolic(ToolkitError, ArithmeticError):
    def __init__(self, trace_abs: float):
        self.trace_abs = trace_abs
        super().__init__(f"|tr| = {trace_abs!r} <= 2, element is not hyperbolic")


class NumericError(ToolkitError, ArithmeticError):
    """Неконечные элементы матрицы."""


class BoundaryEscape(ToolkitError):
    def __init__(self, cuff: int, length: float, rate: float, message: str = ""):
        self.cuff = cuff
        self.length = length
        self.rate = rate
        super().__init__(
            message or f"cuff {cuff} escaped to the boundary: length={length:.3e}, decrease rate={rate:.3e}"
        )


class NonConvergence(ToolkitError):
    def __init__(self, spread: float, evaluations: int, message: str = ""):
        self.spread = spread
        self.evaluations = evaluations
        super().__init__(
            message or f"no convergence: spread={spread:.3e} after {evaluations} evaluations"
        )


class AcceptanceFailure(ToolkitError):
    def __init__(self, failed: List[str]):
        self.failed = list(failed)
        super().__init__("acceptance checks failed: " + ", ".join(self.failed))


# коды выхода CLI -- стабильный контракт
EXIT_OK: int = 0
EXIT_CODES: Dict[type, int] = {
    WordParseError: 2,
    BoundaryEscape: 3,
    NonConvergence: 4,
    AcceptanceFailure: 5,
}


def exit_code_for(ex: BaseException) -> int:
    for cls, code in EXIT_CODES.items():
        if isinstance(ex, cls):
            return code
    return 1
