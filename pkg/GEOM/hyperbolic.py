"""
Специальные функции гиперболической геометрии и арифметика изометрий 2x2.

Все функции чистые: без состояния, можно звать из любых воркеров.
"""
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Tuple, Union

import mpmath
from mpmath import mp

from a_config import ACOSH_LOG_BRANCH, RENORM_BOUND, MP_DPS
from c_errors import DomainError, NotHyperbolic, NumericError

LN2 = math.log(2.0)
Real = Union[float, mpmath.mpf]
Entries = Tuple[Real, Real, Real, Real]


def _require_positive(name: str, value: float):
    if not (value > 0) or not math.isfinite(float(value)):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")


# ============================================================
#  COLLAR / WINDING
# ============================================================

def collar_width(x: float) -> float:
    """r(x) = arcsinh(1 / sinh x), полуширина стандартного воротника геодезической длины 2x."""
    _require_positive("x", x)
    x = float(x)
    if x > 20.0:
        # 1/sinh x без переполнения
        return math.asinh(2.0 * math.exp(-x) / -math.expm1(-2.0 * x))
    return math.asinh(1.0 / math.sinh(x))


@dataclass(frozen=True)
class CollarParams:
    core_length: float
    width: float

    def __post_init__(self):
        _require_positive("core_length", self.core_length)
        _require_positive("width", self.width)


def collar_params(core_length: float) -> CollarParams:
    return CollarParams(core_length=float(core_length), width=collar_width(float(core_length) / 2.0))


def _log_cosh(z: float) -> float:
    z = abs(z)
    return z + math.log1p(math.exp(-2.0 * z)) - LN2


def _log_coth_half(x: float) -> float:
    e = math.exp(-x)
    return math.log1p(e) - math.log(-math.expm1(-x))


def acosh_from_log(log_y: float) -> float:
    """arccosh(y) по ln y: ln(2y) + ln(1/2 + sqrt(1/4 - 1/(4y^2)))."""
    if log_y < 0.0:
        raise DomainError("arccosh argument below 1")
    if log_y <= math.log(ACOSH_LOG_BRANCH):
        return math.acosh(math.exp(log_y))
    tail = math.exp(-2.0 * log_y)
    return log_y + LN2 + math.log(0.5 + math.sqrt(0.25 - 0.25 * tail))


def winding_length(m: int, x: float) -> float:
    """f_m(x) = 2 arccosh[coth(x/2) cosh(mx/2)] -- длина дуги, пересекающей воротник с m оборотами."""
    if int(m) != m or m < 0:
        raise DomainError(f"m must be a nonnegative integer, got {m!r}")
    _require_positive("x", x)
    x = float(x)
    if m == 0:
        return 2.0 * collar_width(x / 2.0)
    half = m * x / 2.0
    if half < 300.0 and x > 1e-6:
        y = math.cosh(half) / math.tanh(x / 2.0)
        if y <= ACOSH_LOG_BRANCH:
            return 2.0 * math.acosh(y)
    return 2.0 * acosh_from_log(_log_coth_half(x) + _log_cosh(half))


def collar_crossing_length(core_length: float, displacement: float) -> float:
    """
    Дуга через стандартный воротник от края до края со сдвигом displacement вдоль ядра.
    Два прямоугольных треугольника в развёрнутом цилиндре: cosh(a/2) = cosh(h/2) cosh(x/2),
    cosh(h/2) = coth(l/2).
    """
    _require_positive("core_length", core_length)
    if displacement < 0:
        raise DomainError("displacement must be nonnegative")
    half = float(displacement) / 2.0
    log_y = _log_coth_half(float(core_length)) + _log_cosh(half)
    return 2.0 * acosh_from_log(max(log_y, 0.0))


def winding_difference_bound(m: int, s: int, x_max: float) -> float:
    """C(s, x_max) = 2 ln 2 + 2 ln[cosh(s x_max/2) + sinh(s x_max/2)], f_{m+s} - f_m <= C при x <= x_max."""
    if int(m) != m or m < 0:
        raise DomainError(f"m must be a nonnegative integer, got {m!r}")
    if int(s) != s or s < 0:
        raise DomainError(f"s must be a nonnegative integer, got {s!r}")
    _require_positive("x_max", x_max)
    h = s * float(x_max) / 2.0
    # cosh h + sinh h = e^h
    return 2.0 * LN2 + 2.0 * h


def collar_plus_linear(b: float, x: float) -> float:
    _require_positive("x", x)
    return 2.0 * collar_width(x / 2.0) + b * x


def min_collar_plus_linear(b: float) -> Tuple[float, float]:
    """Минимум 2 r(x/2) + b x: x* = 2 arcsinh(1/b), f* = 2[arcsinh b + b arcsinh(1/b)]."""
    _require_positive("b", b)
    b = float(b)
    x_star = 2.0 * math.asinh(1.0 / b)
    f_star = 2.0 * (math.asinh(b) + b * math.asinh(1.0 / b))
    return x_star, f_star


def golden_section_min(
    func: Callable[[mpmath.mpf], mpmath.mpf],
    lo: Real,
    hi: Real,
    tol: float = 1e-13,
    dps: int = MP_DPS,
    max_iter: int = 400,
) -> Tuple[float, float]:
    """Золотое сечение в арифметике mpmath -- медленно, но даёт минимум намного точнее 1e-8."""
    with mp.workdps(dps):
        a, b = mpmath.mpf(lo), mpmath.mpf(hi)
        invphi = (mpmath.sqrt(5) - 1) / 2
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        fc, fd = func(c), func(d)
        for _ in range(max_iter):
            if b - a < tol:
                break
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = func(c)
            else:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = func(d)
        x = (a + b) / 2
        return float(x), float(func(x))


def numeric_min_collar_plus_linear(b: float, lo: float = 1e-9, hi: float = 10.0, dps: int = MP_DPS) -> Tuple[float, float]:
    """Численный оракул для min_collar_plus_linear на (lo, hi]."""
    _require_positive("b", b)
    with mp.workdps(dps):
        bb = mpmath.mpf(b)
        func = lambda x: 2 * mpmath.asinh(1 / mpmath.sinh(x / 2)) + bb * x
        return golden_section_min(func, lo, hi, dps=dps)


# ============================================================
#  CLOSED FORMS
# ============================================================

def minimal_filling_closed_form(g: int) -> float:
    """(4g-2) arccosh(2 cos[pi/(4g-2)] + 1) -- inf-инвариант явно известной минимальной заполняющей кривой."""
    if g < 2:
        raise DomainError("genus must be >= 2")
    k = 4 * g - 2
    return k * math.acosh(2.0 * math.cos(math.pi / k) + 1.0)


def length_floor_from_intersections(i: int) -> float:
    """l_gamma(X_gamma) >= 1/2 ln(i/2) для заполняющей кривой."""
    if i <= 0:
        raise DomainError("self-intersection count must be positive")
    return 0.5 * math.log(i / 2.0)


def intersection_ceiling_for_length(L: float) -> float:
    """Заполняющая кривая с m_gamma <= L имеет не больше 2 e^{2L} самопересечений."""
    return 2.0 * math.exp(2.0 * float(L))


# ============================================================
#  SCALED ISOMETRY
# ============================================================

def _is_mp(x: Real) -> bool:
    # mpf любого контекста mpmath, не только глобального mp
    return hasattr(x, "_mpf_")


def _finite(x: Real) -> bool:
    if _is_mp(x):
        return bool(x.context.isfinite(x))
    return math.isfinite(x)


def _log(x: Real) -> float:
    if _is_mp(x):
        return float(x.context.log(x))
    return math.log(x)


@dataclass(frozen=True)
class ScaledIsometry:
    """
    Матрица 2x2 из SL(2,R) в виде e^{log_scale} * entries.
    Элементы -- float или mpmath.mpf; арифметика одна и та же.
    """
    entries: Entries
    log_scale: float = 0.0

    @classmethod
    def identity(cls, one: Real = 1.0) -> "ScaledIsometry":
        zero = one - one
        return cls((one, zero, zero, one), 0.0)

    @classmethod
    def from_matrix(cls, a: Real, b: Real, c: Real, d: Real) -> "ScaledIsometry":
        for v in (a, b, c, d):
            if not _finite(v):
                raise NumericError(f"non-finite matrix entry {v!r}")
        return cls((a, b, c, d), 0.0).renormalized()

    def inverse(self) -> "ScaledIsometry":
        # (e^s E)^{-1} = e^s adj(E) при det(e^s E) = 1
        a, b, c, d = self.entries
        return ScaledIsometry((d, -b, -c, a), self.log_scale)

    def renormalized(self) -> "ScaledIsometry":
        a, b, c, d = self.entries
        big = max(abs(a), abs(b), abs(c), abs(d))
        if big > RENORM_BOUND:
            return ScaledIsometry((a / big, b / big, c / big, d / big), self.log_scale + _log(big))
        return self

    def trace_abs(self) -> Real:
        a, _, _, d = self.entries
        return abs(a + d)

    def det_defect(self) -> float:
        """|det(e^s E) - 1| (в лог-форме, без переполнения)."""
        a, b, c, d = self.entries
        det = a * d - b * c
        if det <= 0:
            return math.inf
        return abs(math.expm1(_log(det) + 2.0 * self.log_scale))

    def matrix(self) -> Entries:
        factor = math.exp(self.log_scale)
        return tuple(v * factor for v in self.entries)

    def length(self) -> float:
        return trace_to_length(self.trace_abs(), self.log_scale)


def compose(a: ScaledIsometry, b: ScaledIsometry) -> ScaledIsometry:
    """Произведение a*b; масштабы складываются, при выходе за RENORM_BOUND -- перенормировка."""
    a0, a1, a2, a3 = a.entries
    b0, b1, b2, b3 = b.entries
    out = (
        a0 * b0 + a1 * b2,
        a0 * b1 + a1 * b3,
        a2 * b0 + a3 * b2,
        a2 * b1 + a3 * b3,
    )
    for v in out:
        if not _finite(v):
            raise NumericError("non-finite entry in product")
    prod = ScaledIsometry(out, a.log_scale + b.log_scale)
    return prod.renormalized()


def compose_word(factors: Iterable[ScaledIsometry], one: Real = 1.0) -> ScaledIsometry:
    acc = ScaledIsometry.identity(one)
    for f in factors:
        acc = compose(acc, f)
    return acc


def trace_to_length(tr_abs: Real, log_scale: float = 0.0) -> float:
    """l = 2 arccosh(e^{log_scale} |tr| / 2); при больших аргументах -- в логарифмической форме."""
    if _is_mp(tr_abs):
        ctx = tr_abs.context
        y = abs(tr_abs) * ctx.exp(log_scale) / 2
        if y <= 1:
            raise NotHyperbolic(float(2 * y))
        return float(2 * ctx.acosh(y))
    tr_abs = abs(float(tr_abs))
    if not math.isfinite(tr_abs):
        raise NumericError("non-finite trace")
    if tr_abs == 0.0:
        raise NotHyperbolic(0.0)
    log_y = log_scale + math.log(tr_abs) - LN2
    if log_y <= 0.0:
        raise NotHyperbolic(tr_abs * math.exp(log_scale))
    if log_scale == 0.0 and tr_abs / 2.0 <= ACOSH_LOG_BRANCH:
        return 2.0 * math.acosh(tr_abs / 2.0)
    return 2.0 * acosh_from_log(log_y)


# ============================================================
#  EXTENDED PRECISION REFERENCES
# ============================================================

def hp_acosh(y: Real, dps: int = MP_DPS) -> mpmath.mpf:
    with mp.workdps(dps):
        return mpmath.acosh(mpmath.mpf(y))


def hp_word_trace(mats: Sequence[Entries], dps: int = MP_DPS) -> mpmath.mpf:
    """След произведения, посчитанный в mpmath с dps знаками -- эталон для проверок."""
    with mp.workdps(dps):
        acc = [mpmath.mpf(1), mpmath.mpf(0), mpmath.mpf(0), mpmath.mpf(1)]
        for m in mats:
            x0, x1, x2, x3 = (mpmath.mpf(v) for v in m)
            acc = [
                acc[0] * x0 + acc[1] * x2,
                acc[0] * x1 + acc[1] * x3,
                acc[2] * x0 + acc[3] * x2,
                acc[2] * x1 + acc[3] * x3,
            ]
        return acc[0] + acc[3]
