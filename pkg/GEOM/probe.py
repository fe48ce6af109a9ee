"""
Диагностика на фиксированной структуре: систолы, систолы сторон eta, толстая часть,
нижняя оценка через воротники и аффинный рост остатков.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from a_config import HYPERBOLIC_MARGIN, RENORM_BOUND, SYSTOLE_DEPTH, SYSTOLE_WORD_BUDGET
from c_errors import BoundaryEscape, DomainError, NumericError
from GEOM.hyperbolic import collar_width, trace_to_length, winding_length
from GEOM.representation import SurfaceRep, eta_length, geodesic_length, word_isometry
from WORDS.words import CurveWord, Letters, class_key, dehn_reduce, primitive_root
from WORDS.family import family_word


@dataclass(frozen=True)
class SystoleReport:
    value: float
    witness: CurveWord
    search_depth: int # ------------ # наибольшая полностью перебранная длина слова
    certified: bool
    evaluated: int = 0

    def to_record(self) -> dict:
        return {
            "value": self.value,
            "witness": str(self.witness),
            "certified": self.certified,
            "depth": self.search_depth,
        }


class _BudgetExhausted(Exception):
    pass


class _WordSearch:
    """
    Перебор циклических слов по одному на класс (поворот/обращение) с накоплением
    произведения по префиксу. Слово w берём, только если w -- минимальный поворот,
    поэтому буквы меньше w[0] сразу отсекаются.
    """

    def __init__(self, rep: SurfaceRep, alphabet: Sequence[int], excluded: Iterable[Letters], budget: int):
        self.rep = rep
        self.alphabet = sorted(alphabet)
        self.excluded: FrozenSet[Letters] = frozenset(excluded)
        self.budget = budget
        self.visited = 0
        self.best_value = math.inf
        self.best_word: Letters = ()
        self.level_rate = math.inf
        self.word: List[int] = []

    def run(self, depth: int) -> Tuple[int, float]:
        """(наибольшая полностью пройденная длина, мин. длина/буква на ней)."""
        complete, rate = 0, math.inf
        one = self.rep._one
        start = (one, one - one, one - one, one, 0.0)
        for length in range(1, depth + 1):
            self.level_rate = math.inf
            try:
                self._dfs(start, length)
            except _BudgetExhausted:
                break
            complete, rate = length, self.level_rate
        return complete, rate

    def _dfs(self, prod, length: int):
        word = self.word
        if len(word) == length:
            self._leaf(prod)
            return
        table = self.rep._table
        for x in self.alphabet:
            if word and (word[-1] == -x or x < word[0]):
                continue
            if self.visited >= self.budget:
                raise _BudgetExhausted()
            self.visited += 1
            a, b, c, d, s = prod
            p, q, r, t = table[x]
            a, b, c, d = a * p + b * r, a * q + b * t, c * p + d * r, c * q + d * t
            big = max(abs(a), abs(b), abs(c), abs(d))
            if big > RENORM_BOUND:
                a, b, c, d = a / big, b / big, c / big, d / big
                s += math.log(float(big))
            word.append(x)
            try:
                self._dfs((a, b, c, d, s), length)
            finally:
                word.pop()

    def _leaf(self, prod):
        w = tuple(self.word)
        if len(w) > 1 and w[-1] == -w[0]:
            return
        if class_key(w) != w:
            return
        if self.excluded and class_key(primitive_root(w)[0]) in self.excluded:
            return
        a, _, _, d, s = prod
        tr_abs = abs(a + d)
        if float(tr_abs) * math.exp(s) <= 2.0 + HYPERBOLIC_MARGIN:
            if not dehn_reduce(w, self.rep.genus):
                return
            # существенное слово с |tr| <= 2: структура вышла на границу
            lengths = self.rep.fn.lengths
            cuff = int(np.argmin(lengths))
            raise BoundaryEscape(
                cuff, float(lengths[cuff]), 0.0,
                f"essential word {CurveWord(self.rep.genus, w)} is not hyperbolic (|tr|={float(tr_abs) * math.exp(s):.6g})",
            )
        value = trace_to_length(tr_abs, s)
        self.level_rate = min(self.level_rate, value / len(w))
        if value < self.best_value:
            self.best_value, self.best_word = value, w


def _shortest(rep: SurfaceRep, alphabet: Sequence[int], excluded: Iterable[Letters], depth: int, budget: int) -> SystoleReport:
    if depth < 4:
        raise DomainError(f"systole search depth must be >= 4, got {depth}")
    search = _WordSearch(rep, alphabet, excluded, budget)
    complete, rate = search.run(depth)
    if not search.best_word:
        raise NumericError("no essential word found within the search budget")
    # эвристика: слова длиннее complete не короче (complete + 1) * rate
    certified = complete >= 1 and (complete + 1) * rate > search.best_value
    return SystoleReport(
        value=search.best_value,
        witness=CurveWord(rep.genus, search.best_word),
        search_depth=complete,
        certified=bool(certified),
        evaluated=search.visited,
    )


def _side_alphabet(genus: int, side: int) -> List[int]:
    handles = [1] if side == 1 else range(2, genus + 1)
    out: List[int] = []
    for k in handles:
        out.extend((2 * k - 1, -(2 * k - 1), 2 * k, -2 * k))
    return out


def side_boundary(genus: int, side: int) -> Letters:
    """eta, записанная буквами стороны side."""
    handles = [1] if side == 1 else range(2, genus + 1)
    letters: List[int] = []
    for k in handles:
        a, b = 2 * k - 1, 2 * k
        letters.extend((a, b, -a, -b))
    return tuple(letters)


def systole(rep: SurfaceRep, depth: int = SYSTOLE_DEPTH, budget: int = SYSTOLE_WORD_BUDGET) -> SystoleReport:
    full = [x for k in range(1, 2 * rep.genus + 1) for x in (k, -k)]
    return _shortest(rep, full, (), depth, budget)


def subsurface_systole(rep: SurfaceRep, side: int, depth: int = SYSTOLE_DEPTH, budget: int = SYSTOLE_WORD_BUDGET) -> SystoleReport:
    """Систола стороны side дополнения eta (1 -- ручка a1,b1), без степеней eta."""
    if side not in (1, 2):
        raise DomainError(f"side must be 1 or 2, got {side}")
    boundary = side_boundary(rep.genus, side)
    return _shortest(rep, _side_alphabet(rep.genus, side), (class_key(boundary),), depth, budget)


def systole_upper_bound(g: int) -> float:
    """sys(X) <= 2 ln(4g - 2) для любой замкнутой поверхности рода g."""
    if g < 2:
        raise DomainError("genus must be >= 2")
    return 2.0 * math.log(4 * g - 2)


def in_thick_part(rep: SurfaceRep, epsilon: float, depth: int = SYSTOLE_DEPTH) -> bool:
    """l_eta <= 1 и систолы обеих сторон >= epsilon."""
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    if eta_length(rep.fn) > 1.0:
        return False
    for side in (1, 2):
        if subsurface_systole(rep, side, depth).value < epsilon:
            return False
    return True


def axis_distance(rep: SurfaceRep, w1: CurveWord, w2: CurveWord) -> float:
    """
    Расстояние между непересекающимися осями:
    tr[A,B] = 2 + 4 sinh^2(lA/2) sinh^2(lB/2) sinh^2(d). Пересекающиеся оси -- 0.
    """
    a = word_isometry(rep, w1)
    b = word_isometry(rep, w2)
    la, lb = a.length(), b.length()
    ma, mb = a.matrix(), b.matrix()
    ia = (ma[3], -ma[1], -ma[2], ma[0])
    ib = (mb[3], -mb[1], -mb[2], mb[0])
    prod = ma
    for m in (mb, ia, ib):
        prod = (
            prod[0] * m[0] + prod[1] * m[2], prod[0] * m[1] + prod[1] * m[3],
            prod[2] * m[0] + prod[3] * m[2], prod[2] * m[1] + prod[3] * m[3],
        )
    excess = float(prod[0] + prod[3]) - 2.0
    if excess <= 0.0:
        return 0.0
    s2 = excess / (4.0 * math.sinh(la / 2.0) ** 2 * math.sinh(lb / 2.0) ** 2)
    return math.asinh(math.sqrt(s2))


# ============================================================
#  BOUNDS
# ============================================================

@dataclass(frozen=True)
class CollarBound:
    value: float
    sys1: float
    sys2: float
    eta: float
    terms: Dict[str, float] = field(default_factory=dict)


def collar_lower_bound_terms(g: int, m: int, n: int, rep: SurfaceRep, depth: int = SYSTOLE_DEPTH) -> CollarBound:
    if m < 2:
        raise DomainError(f"the collar lower bound needs m >= 2, got {m}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if rep.genus != g:
        raise DomainError("structure genus differs from g")
    s1 = subsurface_systole(rep, 1, depth).value
    s2 = subsurface_systole(rep, 2, depth).value
    x = eta_length(rep.fn)
    terms = {
        "systole_collars": 2.0 * n * (collar_width(s1 / 2.0) + collar_width(s2 / 2.0)),
        "eta_collars": (4 * n - 2) * collar_width(x / 2.0),
        "winding": winding_length(m - 2, x),
    }
    return CollarBound(sum(terms.values()), s1, s2, x, terms)


def collar_lower_bound(g: int, m: int, n: int, rep: SurfaceRep, depth: int = SYSTOLE_DEPTH) -> float:
    """2n[r(sys1/2) + r(sys2/2)] + (4n-2) r(l_eta/2) + f_{m-2}(l_eta) <= l(gamma_{m,n})."""
    return collar_lower_bound_terms(g, m, n, rep, depth).value


def beta_lower_bound(g: int, k: int, c: float) -> float:
    return 4.0 * math.sqrt(k / (2 * g - 1)) * c - 2.0 * c / (2 * g - 1)


def alpha_upper_bound(k: int, g: int, c_star: float) -> float:
    m = k - 2 * g + 1
    if m < 1:
        raise DomainError(f"k={k} too small for genus {g}")
    return c_star + 6.0 * math.log(m)


@dataclass(frozen=True)
class GrowthResidual:
    slope_n: float # ------------- # A
    offset: float # -------------- # B
    max_violation: float
    m_slope: float # ------------- # наибольший наклон остатка по m на проверочной сетке
    residuals: Dict[Tuple[int, int], float] = field(default_factory=dict, repr=False)


def affine_growth_residual(
    g: int,
    rep: SurfaceRep,
    epsilon: float,
    fit_range: Sequence[int] = range(1, 6),
    validate_range: Sequence[int] = range(6, 11),
    depth: int = SYSTOLE_DEPTH,
) -> GrowthResidual:
    """
    R(m,n) = l(gamma_{m,n}) - f_{m+1}(l_eta). Верхняя огибающая R <= A n + B по сетке fit_range^2
    (линейная программа), проверка на validate_range^2.
    """
    if not in_thick_part(rep, epsilon, depth):
        raise DomainError(f"structure is not in the thick part for epsilon={epsilon}")
    x = eta_length(rep.fn)
    grid = sorted(set(fit_range) | set(validate_range))
    residuals: Dict[Tuple[int, int], float] = {}
    for m in grid:
        for n in grid:
            length = geodesic_length(rep, family_word(g, m, n))
            residuals[(m, n)] = length - winding_length(m + 1, x)

    fit = [(n, residuals[(m, n)]) for m in fit_range for n in fit_range]
    ns = np.array([p[0] for p in fit], dtype=float)
    rs = np.array([p[1] for p in fit], dtype=float)
    # min sum(A n + B) при A n + B >= R
    res = linprog(
        c=[ns.sum(), float(len(ns))],
        A_ub=np.column_stack([-ns, -np.ones_like(ns)]),
        b_ub=-rs,
        bounds=[(None, None), (None, None)],
        method="highs",
    )
    if not res.success:
        raise NumericError(f"envelope fit failed: {res.message}")
    A, B = float(res.x[0]), float(res.x[1])

    violation = max(residuals[(m, n)] - (A * n + B) for m in validate_range for n in validate_range)
    ms = np.array(list(validate_range), dtype=float)
    m_slope = -math.inf
    for n in validate_range:
        ys = np.array([residuals[(m, n)] for m in validate_range])
        m_slope = max(m_slope, float(np.polyfit(ms, ys, 1)[0]))
    return GrowthResidual(A, B, float(violation), m_slope, residuals)
