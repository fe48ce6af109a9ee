"""
Координаты Фенхеля-Нильсена над фиксированным разбиением на штаны и голономия поверхности.

Разбиение (3g-3 манжеты), манжета 0 -- разделяющая eta = [a1, b1]:
  c1, a1..ag, c2..cg (g >= 3), d2..d_{g-2}
Ручка k -- тор с дыркой (a_k, b_k) и границей c_k; при g >= 3 ручки 2..g-1 висят на
штанах (d_{k-1}, c_k, d_k) с d_1 = c1 и d_{g-1} = c_g.

Голономия строится и перемножается в своём контексте mpmath для любого рода.
"""
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np

from a_config import (
    MAX_CUFF_LENGTH, MP_DPS, OPT_LENGTH_BOX, RELATOR_TOL, RENORM_BOUND,
)
from c_errors import DomainError, NumericError
from c_utils import float_from_hex, float_to_hex
from GEOM.hyperbolic import Entries, Real, ScaledIsometry
from WORDS.words import CurveWord, Letters, free_reduce


def pants_layout(genus: int) -> List[str]:
    if genus < 2:
        raise DomainError(f"genus must be >= 2, got {genus}")
    names = ["c1"] + [f"a{i}" for i in range(1, genus + 1)]
    if genus >= 3:
        names += [f"c{i}" for i in range(2, genus + 1)]
    names += [f"d{i}" for i in range(2, genus - 1)]
    return names


def _commutator_letters(k: int) -> Letters:
    a, b = 2 * k - 1, 2 * k
    return (a, b, -a, -b)


def cuff_word(genus: int, cuff: Union[int, str]) -> CurveWord:
    """Слово, чья геодезическая -- манжета cuff."""
    name = pants_layout(genus)[cuff] if isinstance(cuff, int) else cuff
    kind, k = name[0], int(name[1:])
    if kind == "a":
        return CurveWord(genus, (2 * k - 1,))
    if kind == "c":
        return CurveWord(genus, _commutator_letters(k))
    letters: List[int] = []
    for j in range(1, k + 1):
        letters.extend(_commutator_letters(j))
    return CurveWord(genus, tuple(letters))


# ============================================================
#  FN COORDINATES
# ============================================================

@dataclass(frozen=True)
class FNCoords:
    genus: int
    lengths: Tuple[float, ...]
    twists: Tuple[float, ...]

    def __post_init__(self):
        if self.genus < 2:
            raise DomainError(f"genus must be >= 2, got {self.genus}")
        size = 3 * self.genus - 3
        if len(self.lengths) != size or len(self.twists) != size:
            raise DomainError(f"genus {self.genus} needs {size} lengths and {size} twists")
        for i, value in enumerate(self.lengths):
            if not (value > 0) or not math.isfinite(value):
                raise DomainError(f"cuff {i} length must be positive and finite, got {value!r}")
        for i, value in enumerate(self.twists):
            if not math.isfinite(value):
                raise DomainError(f"cuff {i} twist must be finite, got {value!r}")
        object.__setattr__(self, "lengths", tuple(float(v) for v in self.lengths))
        object.__setattr__(self, "twists", tuple(float(v) for v in self.twists))

    @property
    def size(self) -> int:
        return 3 * self.genus - 3

    @property
    def names(self) -> List[str]:
        return pants_layout(self.genus)

    def index(self, cuff: Union[int, str]) -> int:
        if isinstance(cuff, str):
            try:
                return self.names.index(cuff)
            except ValueError:
                raise DomainError(f"no cuff named {cuff!r} in genus {self.genus}") from None
        if not 0 <= cuff < self.size:
            raise DomainError(f"cuff index {cuff} out of range")
        return int(cuff)

    def with_length(self, cuff: Union[int, str], value: float) -> "FNCoords":
        i = self.index(cuff)
        lengths = list(self.lengths)
        lengths[i] = value
        return replace(self, lengths=tuple(lengths))

    def with_twist(self, cuff: Union[int, str], value: float) -> "FNCoords":
        i = self.index(cuff)
        twists = list(self.twists)
        twists[i] = value
        return replace(self, twists=tuple(twists))

    def twist_residues(self) -> Tuple[float, ...]:
        """Твисты по модулю полных твистов, в [0, length)."""
        return tuple(t % l for t, l in zip(self.twists, self.lengths))

    def to_vector(self) -> np.ndarray:
        """Переменные оптимизатора: (ln lengths, twists)."""
        return np.concatenate([np.log(self.lengths), np.asarray(self.twists, dtype=float)])

    @classmethod
    def from_vector(cls, genus: int, vec: Sequence[float]) -> "FNCoords":
        size = 3 * genus - 3
        vec = np.asarray(vec, dtype=float)
        return cls(genus, tuple(np.exp(vec[:size])), tuple(vec[size:]))

    @classmethod
    def symmetric(cls, genus: int, length: float = 2.0) -> "FNCoords":
        size = 3 * genus - 3
        return cls(genus, (float(length),) * size, (0.0,) * size)

    def to_record(self) -> Dict[str, Any]:
        return {
            "genus": self.genus,
            "names": self.names,
            "lengths": [float_to_hex(v) for v in self.lengths],
            "twists": [float_to_hex(v) for v in self.twists],
        }

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> "FNCoords":
        try:
            genus = int(record["genus"])
            lengths = tuple(float_from_hex(v) if isinstance(v, str) else float(v) for v in record["lengths"])
            twists = tuple(float_from_hex(v) if isinstance(v, str) else float(v) for v in record["twists"])
        except (KeyError, TypeError, ValueError) as ex:
            raise DomainError(f"bad FN record: {ex}") from None
        return cls(genus, lengths, twists)


def eta_length(fn: FNCoords) -> float:
    return fn.lengths[0]


def random_fn_coords(
    genus: int,
    rng: np.random.Generator,
    length_box: Tuple[float, float] = OPT_LENGTH_BOX,
    twist_mode: str = "period",
) -> FNCoords:
    """
    Длины лог-равномерно в length_box.
    twist_mode: "period" -- [0, length), "zero" -- нули, "symmetric" -- [-length, length].
    """
    lo, hi = length_box
    if not 0 < lo <= hi:
        raise DomainError(f"bad length box {length_box!r}")
    size = 3 * genus - 3
    lengths = np.exp(rng.uniform(math.log(lo), math.log(hi), size))
    if twist_mode == "period":
        twists = rng.uniform(0.0, 1.0, size) * lengths
    elif twist_mode == "zero":
        twists = np.zeros(size)
    elif twist_mode == "symmetric":
        twists = rng.uniform(-1.0, 1.0, size) * lengths
    else:
        raise DomainError(f"unknown twist mode {twist_mode!r}")
    return FNCoords(genus, tuple(lengths), tuple(twists))


def apply_full_twist(fn: FNCoords, cuff: Union[int, str], power: int = 1) -> FNCoords:
    """
    twists[cuff] += power * lengths[cuff].
    На словах: манжета a_i -- b_i -> b_i a_i; манжета eta -- x -> eta^-1 x eta на второй стороне.
    """
    i = fn.index(cuff)
    return fn.with_twist(i, fn.twists[i] + power * fn.lengths[i])


# ============================================================
#  2x2 BUILDING BLOCKS (элементы mpf)
# ============================================================

_R: Entries = (0, -1, 1, 0)


def _mul(x: Entries, y: Entries) -> Entries:
    return (
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    )

def _inv(x: Entries) -> Entries:
    return (x[3], -x[1], -x[2], x[0])

def _conj(m: Entries, x: Entries) -> Entries:
    return _mul(m, _mul(x, _inv(m)))

def _comm(a: Entries, b: Entries) -> Entries:
    return _mul(_mul(a, b), _mul(_inv(a), _inv(b)))


class _Builder:
    """Склейка штанов и торов с дыркой; lib -- контекст mpmath."""

    def __init__(self, lib: Any, num):
        self.lib = lib
        self.num = num

    def diag(self, l: Real) -> Entries:
        e = self.lib.exp(l / 2)
        return (e, 0 * e, 0 * e, 1 / e)

    def eig(self, x: Entries) -> Entries:
        """Репер P (det 1): P^-1 X P = diag(lam, 1/lam), lam > 1."""
        lib = self.lib
        m = x if x[0] + x[3] >= 0 else tuple(-v for v in x)
        t = m[0] + m[3]
        disc = lib.sqrt(t * t - 4)
        lam, mu = (t + disc) / 2, (t - disc) / 2

        def vec(e):
            v1, v2 = (m[1], e - m[0]), (e - m[3], m[2])
            n1 = lib.sqrt(v1[0] * v1[0] + v1[1] * v1[1])
            n2 = lib.sqrt(v2[0] * v2[0] + v2[1] * v2[1])
            return v1 if n1 > n2 else v2

        vp, vm = vec(lam), vec(mu)
        det = vp[0] * vm[1] - vm[0] * vp[1]
        if det < 0:
            vm = (-vm[0], -vm[1])
            det = -det
        s = 1 / lib.sqrt(det)
        return (vp[0] * s, vm[0] * s, vp[1] * s, vm[1] * s)

    def frame_at_foot(self, x: Entries, y: Entries) -> Entries:
        """Репер оси X в основании общего перпендикуляра с осью Y."""
        p = self.eig(x)
        m = _mul(_inv(p), _mul(y, p))
        if m[2] == 0:
            raise NumericError("axes share an endpoint")
        h = self.lib.sqrt(abs(m[1] / m[2]))
        sh = self.lib.sqrt(h)
        return _mul(p, (sh, 0 * sh, 0 * sh, 1 / sh))

    def transl(self, p: Entries, t: Real) -> Entries:
        return _mul(p, _mul(self.diag(t), _inv(p)))

    def pants(self, l1: Real, l2: Real, l3: Real) -> Tuple[Entries, Entries]:
        lib = self.lib
        h1, h2, h3 = l1 / 2, l2 / 2, l3 / 2
        cd = (lib.cosh(h3) + lib.cosh(h1) * lib.cosh(h2)) / (lib.sinh(h1) * lib.sinh(h2))
        e = lib.exp(lib.acosh(cd) / 2)
        x = (lib.cosh(h1), lib.sinh(h1) / e, lib.sinh(h1) * e, lib.cosh(h1))
        y = (lib.cosh(h2), -lib.sinh(h2) * e, -lib.sinh(h2) / e, lib.cosh(h2))
        return x, y

    def torus(self, la: Real, ta: Real, lc: Real) -> Tuple[Entries, Entries]:
        x, y = self.pants(la, la, lc)
        fx, fy = self.frame_at_foot(x, y), self.frame_at_foot(y, x)
        t0 = _mul(fy, _inv(_mul(fx, _R)))
        return x, _mul(t0, self.transl(fx, ta))

    def gluer(self, p_from: Entries, p_to: Entries, twist: Real) -> Entries:
        return _mul(self.transl(p_to, twist), _mul(p_to, _inv(p_from)))

    def generators(self, fn: FNCoords) -> List[Entries]:
        g = fn.genus
        index = {name: i for i, name in enumerate(fn.names)}
        L = lambda name: self.num(fn.lengths[index[name]])
        T = lambda name: self.num(fn.twists[index[name]])
        cname = lambda k: "c1" if k == 1 or g == 2 else f"c{k}"
        dname = lambda k: "c1" if k == 1 else (f"c{g}" if k == g - 1 else f"d{k}")
        tor = lambda k: self.torus(L(f"a{k}"), T(f"a{k}"), L(cname(k)))

        gens: List[Optional[Entries]] = [None] * (2 * g)
        a1, b1 = tor(1)
        gens[0], gens[1] = a1, b1
        d = _comm(a1, b1)
        pd = self.frame_at_foot(d, a1)

        for k in range(2, g):
            x, y = self.pants(L(dname(k - 1)), L(f"c{k}"), L(dname(k)))
            px, py = self.frame_at_foot(x, y), self.frame_at_foot(y, x)
            mq = self.gluer(px, pd, T(dname(k - 1)))
            y_glued, py_glued = _conj(mq, y), _mul(mq, py)
            ak, bk = tor(k)
            pc = self.frame_at_foot(_comm(ak, bk), ak)
            mt = self.gluer(pc, py_glued, T(f"c{k}"))
            gens[2 * k - 2], gens[2 * k - 1] = _conj(mt, ak), _conj(mt, bk)
            d = _conj(mq, _mul(x, y))
            pd = self.frame_at_foot(d, y_glued)

        ag, bg = tor(g)
        pc = self.frame_at_foot(_comm(ag, bg), ag)
        m = self.gluer(pc, _mul(pd, _R), T(f"c{g}" if g > 2 else "c1"))
        gens[2 * g - 2], gens[2 * g - 1] = _conj(m, ag), _conj(m, bg)

        # центрируем: середина eta-оси у точки i
        d1 = _comm(gens[0], gens[1])
        pd1 = self.frame_at_foot(d1, gens[0])
        p = _mul(self.transl(_mul(pd1, _R), -T("c1") / 2), pd1)
        p_inv = _inv(p)
        return [_conj(p_inv, gm) for gm in gens]


# ============================================================
#  SURFACE REPRESENTATION
# ============================================================

@dataclass(frozen=True)
class SurfaceRep:
    genus: int
    fn: FNCoords
    generators: Tuple[ScaledIsometry, ...]
    dps: int = MP_DPS
    _table: Dict[int, Entries] = field(default_factory=dict, repr=False, compare=False)
    _one: Real = field(default=1.0, repr=False, compare=False)

    def word_product(self, letters: Sequence[int]) -> ScaledIsometry:
        """rho(w) слева направо, с перенормировкой при росте элементов."""
        one = self._one
        zero = one - one
        a, b, c, d = one, zero, zero, one
        log_scale = 0.0
        table = self._table
        for x in letters:
            p, q, r, s = table[x]
            a, b, c, d = a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s
            big = max(abs(a), abs(b), abs(c), abs(d))
            if big > RENORM_BOUND:
                a, b, c, d = a / big, b / big, c / big, d / big
                log_scale += float(one.context.log(big))
        return ScaledIsometry((a, b, c, d), log_scale)


def build_representation(fn: FNCoords, dps: Optional[int] = None) -> SurfaceRep:
    for i, value in enumerate(fn.lengths):
        if value > MAX_CUFF_LENGTH:
            raise DomainError(f"cuff {fn.names[i]} length {value} exceeds the cap {MAX_CUFF_LENGTH}")
    # свой контекст на представление -- глобальный mp не трогаем (потоки)
    ctx = mpmath.MPContext()
    ctx.dps = dps or MP_DPS
    builder, one, used_dps = _Builder(ctx, ctx.mpf), ctx.mpf(1), ctx.dps
    mats = builder.generators(fn)
    gens = tuple(ScaledIsometry.from_matrix(*m) for m in mats)
    table: Dict[int, Entries] = {}
    for k, m in enumerate(mats, start=1):
        table[k] = m
        table[-k] = _inv(m)
    return SurfaceRep(fn.genus, fn, gens, used_dps, table, one)


def word_isometry(rep: SurfaceRep, w: CurveWord) -> ScaledIsometry:
    if w.genus != rep.genus:
        raise DomainError(f"word of genus {w.genus} on a genus-{rep.genus} structure")
    return rep.word_product(w.letters)


def geodesic_length(rep: SurfaceRep, w: CurveWord) -> float:
    """l = 2 arccosh(|tr rho(w)| / 2); |tr| <= 2 -- NotHyperbolic."""
    letters = free_reduce(w.letters)
    if not letters:
        raise DomainError("geodesic length of the identity word")
    if w.genus != rep.genus:
        raise DomainError(f"word of genus {w.genus} on a genus-{rep.genus} structure")
    return rep.word_product(letters).length()


def geodesic_length_at(fn: FNCoords, w: CurveWord) -> float:
    return geodesic_length(build_representation(fn), w)


@dataclass(frozen=True)
class HolonomyReport:
    commutator_traces: Tuple[float, ...]
    relator_defect: float
    det_defect: float

    @property
    def ok(self) -> bool:
        return all(t < -2.0 for t in self.commutator_traces) and self.relator_defect <= RELATOR_TOL


def relator_defect(rep: SurfaceRep) -> float:
    """max |rho(R) -+ I| по элементам."""
    letters: List[int] = []
    for k in range(1, rep.genus + 1):
        letters.extend(_commutator_letters(k))
    a, b, c, d = rep.word_product(letters).matrix()
    sign = 1.0 if float(a + d) >= 0 else -1.0
    return max(abs(float(a) - sign), abs(float(b)), abs(float(c)), abs(float(d) - sign))


def holonomy_check(rep: SurfaceRep) -> HolonomyReport:
    """a_i и b_i пересекаются один раз -- оси пересекаются: tr[rho(a_i), rho(b_i)] < -2."""
    traces = []
    for k in range(1, rep.genus + 1):
        p = rep.word_product(_commutator_letters(k))
        traces.append(float(p.entries[0] + p.entries[3]) * math.exp(p.log_scale))
    det = max(g.det_defect() for g in rep.generators)
    return HolonomyReport(tuple(traces), relator_defect(rep), det)


def cuff_lengths(rep: SurfaceRep) -> Tuple[float, ...]:
    """Длины манжет, прочитанные из голономии (для сверки с координатами)."""
    return tuple(geodesic_length(rep, cuff_word(rep.genus, i)) for i in range(rep.fn.size))


def eta_word(genus: int) -> CurveWord:
    return cuff_word(genus, 0)
