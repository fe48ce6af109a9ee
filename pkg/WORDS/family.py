"""
Двухпараметрическое семейство gamma_{m,n} = eta^m * gamma0^n, формулы пересечений,
скручивания Дена вдоль образующих и eta, подсчёт орбит разделяющих кривых.
"""
import math
from typing import Callable, List, Tuple

from b_context import canonical_data
from c_errors import DomainError
from WORDS.words import (
    CurveWord, Letters, class_key, inverse_letters, normalize, parse_word,
)
from WORDS.intersect import self_intersection_oracle


def _genus_record(g: int) -> dict:
    data = canonical_data()
    record = data.get(str(g))
    if record is None:
        raise DomainError(f"no canonical gamma0/eta words frozen for genus {g} (available: {sorted(data)})")
    return record

def canonical_genera() -> List[int]:
    return sorted(int(g) for g in canonical_data())

def gamma0(g: int) -> CurveWord:
    return parse_word(_genus_record(g)["gamma0"], genus=g)

def eta(g: int) -> CurveWord:
    return parse_word(_genus_record(g)["eta"], genus=g)


def family_word(g: int, m: int, n: int) -> CurveWord:
    """Нормализованное слово eta^m gamma0^n."""
    if m < 0 or n < 0:
        raise DomainError("m and n must be nonnegative")
    if m == 0 and n == 0:
        raise DomainError("m = n = 0 gives the trivial curve")
    letters = eta(g).letters * m + gamma0(g).letters * n
    return normalize(CurveWord(g, letters))


def self_intersection_formula(g: int, m: int, n: int) -> int:
    if g < 2:
        raise DomainError("genus must be >= 2")
    return n * n * (2 * g - 1) + 2 * m * n - m


def family_intersection_count(g: int, m: int, n: int) -> int:
    """
    Замкнутая форма, сверенная с оракулом:
      n = 0:  m - 1                   (степень простой eta)
      m = 0:  n^2 i0 + n - 1          (степень gamma0)
      m >= 1: n^2 i0 + m n p - m - (n - 1)
    где i0 = i(gamma0, gamma0), p = i(gamma0, eta). Для eta = a, gamma0 = b
    на торе с дыркой это (m - 1)(n - 1).
    """
    if m < 0 or n < 0 or (m == 0 and n == 0):
        raise DomainError("need m, n >= 0, not both 0")
    record = _genus_record(g)
    i0, p = int(record["i_gamma0"]), int(record["i_gamma0_eta"])
    if n == 0:
        return m - 1
    if m == 0:
        return n * n * i0 + n - 1
    return n * n * i0 + m * n * p - m - (n - 1)


def separating_orbit_count(g: int, n: int) -> int:
    """Число MCG-орбит существенных разделяющих простых кривых на поверхности рода g с n проколами."""
    if g < 0 or n < 0 or 2 - 2 * g - n >= 0:
        raise DomainError(f"need 2 - 2g - n < 0, got g={g}, n={n}")
    if n == 0:
        return g // 2
    if g == 0:
        return n // 2 - 1
    return (n - 1) + (g // 2) * (n + 1)


# ============================================================
#  DEHN TWISTS
# ============================================================

def _twist_map(axis: CurveWord) -> Tuple[Callable[[int], Letters], str]:
    """Автоморфизм на образующих для скручивания вдоль axis в положительную сторону."""
    g = axis.genus
    key = class_key(axis.letters)
    for i in range(1, g + 1):
        a, b = 2 * i - 1, 2 * i
        if key == class_key((a,)):
            return (lambda x, b=b, a=a: (b, a) if x == b else (x,)), f"a{i}"
        if key == class_key((b,)):
            return (lambda x, b=b, a=a: (a, b) if x == a else (x,)), f"b{i}"
    eta_letters = eta(g).letters if str(g) in canonical_data() else (1, 2, -1, -2)
    if key == class_key(eta_letters):
        eta_inv = inverse_letters(eta_letters)
        return (lambda x: eta_inv + (x,) + eta_letters if x > 2 else (x,)), "eta"
    raise DomainError(f"twists are supported only along a_i, b_i and eta, not along {axis}")


def apply_dehn_twist(w: CurveWord, along: CurveWord, power: int) -> CurveWord:
    """
    Скручивание вдоль простой кривой along в степени power.
    a_i: b_i -> b_i a_i;  b_i: a_i -> a_i b_i;  eta: x -> eta^-1 x eta для образующих второй стороны.
    Отрицательная степень -- обратный автоморфизм.
    """
    if along.genus != w.genus:
        raise DomainError("word and twist axis live on different genera")
    axis = normalize(along)
    if axis.is_identity:
        raise DomainError("twist axis is the identity")
    if self_intersection_oracle(axis) != 0:
        raise DomainError(f"twist axis {along} is not simple")
    image, _ = _twist_map(axis)
    if power == 0:
        return normalize(w)
    step = image
    if power < 0:
        step = _inverse_map(image, axis)
    letters: Letters = w.letters
    for _ in range(abs(power)):
        out: List[int] = []
        for x in letters:
            img = step(abs(x))
            out.extend(img if x > 0 else inverse_letters(img))
        letters = tuple(out)
    return normalize(CurveWord(w.genus, letters))


def _inverse_map(image: Callable[[int], Letters], axis: CurveWord) -> Callable[[int], Letters]:
    g = axis.genus
    key = class_key(axis.letters)
    for i in range(1, g + 1):
        a, b = 2 * i - 1, 2 * i
        if key == class_key((a,)):
            return lambda x, b=b, a=a: (b, -a) if x == b else (x,)
        if key == class_key((b,)):
            return lambda x, b=b, a=a: (a, -b) if x == a else (x,)
    eta_letters = eta(g).letters
    eta_inv = inverse_letters(eta_letters)
    return lambda x: eta_letters + (x,) + eta_inv if x > 2 else (x,)


# ============================================================
#  PAIRS alpha_k / beta_k
# ============================================================

def pair_index_set(g: int, n_max: int) -> List[int]:
    """K = {(2g-1) n^2 + 2n - 1 : n = 1..n_max}."""
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    return [(2 * g - 1) * n * n + 2 * n - 1 for n in range(1, n_max + 1)]

def pair_index_n(g: int, k: int) -> int:
    """n = (-1 + sqrt(2g + (2g-1)k)) / (2g-1); для k вне K -- DomainError."""
    disc = 2 * g + (2 * g - 1) * k
    root = math.isqrt(disc) if disc >= 0 else -1
    if root * root != disc or (root - 1) % (2 * g - 1) or root <= 1:
        raise DomainError(f"k={k} is not in the pair index set for genus {g}")
    return (root - 1) // (2 * g - 1)

def pair_m_of_k(g: int, k: int) -> int:
    return k - 2 * g + 1

def alpha_word(g: int, k: int) -> CurveWord:
    pair_index_n(g, k)
    return family_word(g, pair_m_of_k(g, k), 1)

def beta_word(g: int, k: int) -> CurveWord:
    return family_word(g, 1, pair_index_n(g, k))
