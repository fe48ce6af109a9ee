from typing import List, Any, Optional, Sequence
import math
import numpy as np
from a_config import SIG_DIGITS
from c_errors import DomainError


def fmt_float(value: Any, digits: int = SIG_DIGITS) -> str:
    """Единый формат чисел во всём выводе: 12 значащих цифр."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    x = float(value)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{digits}g}"

def float_to_hex(value: float) -> str:
    return float(value).hex()

def float_from_hex(text: str) -> float:
    return float.fromhex(text)

def parse_range(spec: Any) -> List[int]:
    """
    "1..20" -> [1..20], "1,3,7" -> [1,3,7], "4" / 4 -> [4].
    """
    if isinstance(spec, int):
        return [spec]
    if isinstance(spec, (list, tuple)):
        return [int(v) for v in spec]
    text = str(spec).strip()
    if not text:
        raise DomainError("empty range")
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo_i, hi_i = int(lo), int(hi)
            if hi_i < lo_i:
                raise DomainError(f"empty range {text!r}")
            return list(range(lo_i, hi_i + 1))
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as ex:
        raise DomainError(f"bad range {text!r}: {ex}") from None

def spawn_seeds(seed: int, count: int) -> List[int]:
    """Независимые сиды для задач: SeedSequence.spawn, как отдельные _rnd на каждый вызов."""
    children = np.random.SeedSequence(int(seed)).spawn(count)
    return [int(child.generate_state(1)[0]) for child in children]

def make_rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(seed)

def safe_float(value: Any, default: float = 0.0) -> float:
    """Преобразует значение в float, если не удалось -- возвращает default"""
    try:
        return float(value)
    except (TypeError, ValueError):
        return default

def max_abs(values: Sequence[float]) -> float:
    return max((abs(float(v)) for v in values), default=0.0)
