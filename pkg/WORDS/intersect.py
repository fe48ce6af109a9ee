"""
Комбинаторный оракул пересечений на циклических словах.

Схема:
  - link_count: подсчёт зацепленных пар на одновершинном ленточном графе
    (поверхность с проколом);
  - shortest_representatives: кратчайшие представители на замкнутой поверхности
    с точностью до замены половины релятора;
  - минимум по представителям даёт i(.,.) на замкнутой поверхности;
  - is_filling: рисунок кривой в минимальном положении и подсчёт граней.
"""
import math
from collections import deque
from fractions import Fraction
from functools import cmp_to_key
from typing import Dict, List, Sequence, Tuple

import numpy as np

from a_config import REPS_CAP, DRAWING_MAX_ITERS, DRAWING_SEED
from c_errors import DomainError, ToolkitError
from WORDS.words import (
    CurveWord, Letters, canonical_rotation, ccw, cyclic_reduce, dehn_reduce, exponent_sums,
    inverse_letters, primitive_root, relator, slot_positions,
)


# ============================================================
#  LINKED PAIRS
# ============================================================

def link_count(u: Sequence[int], v: Sequence[int], g: int, self_pair: bool) -> int:
    """
    Число зацепленных пар между циклическими словами u и v (для u = v и self_pair -- пополам).
    Случай A: пересечение в вершине, случай B: общий отрезок с расхождением на концах.
    """
    pos = slot_positions(g)
    n_slots = 4 * g
    n, k = len(u), len(v)
    if n == 0 or k == 0:
        return 0
    lim = 2 * (n + k) + 2

    def between(p: int, q: int, r: int) -> bool:
        t = (r - p) % n_slots
        s = (q - p) % n_slots
        return 0 < t < s

    case_a = 0
    for i in range(n):
        x1, y1 = -u[i - 1], u[i]
        for j in range(k):
            x2, y2 = -v[j - 1], v[j]
            if x1 != x2 and x1 != y2 and y1 != x2 and y1 != y2:
                a, b = pos[x1], pos[y1]
                if between(a, b, pos[x2]) != between(a, b, pos[y2]):
                    case_a += 1

    case_b = 0
    for w in (tuple(v), inverse_letters(v)):
        for i in range(n):
            for j in range(k):
                if u[i] != w[j] or u[i - 1] == w[j - 1]:
                    continue
                s = 1
                while s < lim and u[(i + s) % n] == w[(j + s) % k]:
                    s += 1
                if s >= lim:
                    continue
                c, x, y = u[i], -u[i - 1], -w[j - 1]
                cp, uu, vv = -u[(i + s - 1) % n], u[(i + s) % n], w[(j + s) % k]
                if ccw(pos, n_slots, c, x, y) == ccw(pos, n_slots, cp, uu, vv):
                    case_b += 1

    total = case_a + case_b
    return total // 2 if self_pair else total


# ============================================================
#  CLOSED-SURFACE REPRESENTATIVES
# ============================================================

def half_swaps(letters: Letters, g: int) -> List[Letters]:
    """Замены куска ровно из 2g букв поворота релятора на обратное к дополнению."""
    rel = relator(g)
    n_rel, half = len(rel), 2 * g
    n = len(letters)
    out: List[Letters] = []
    if n < half:
        return out
    for rr in (rel, inverse_letters(rel)):
        for s in range(n_rel):
            for i in range(n):
                if all(letters[(i + t) % n] == rr[(s + t) % n_rel] for t in range(half)):
                    comp = [rr[(s + t) % n_rel] for t in range(half, n_rel)]
                    rest = [letters[(i + t) % n] for t in range(half, n)]
                    out.append(cyclic_reduce(list(inverse_letters(comp)) + rest))
    return out


def shortest_representatives(letters: Sequence[int], g: int, cap: int = REPS_CAP) -> List[Letters]:
    """
    Кратчайшие циклические слова класса: BFS по заменам половины релятора.
    Нашли короче -- начинаем заново от него. Больше cap слов -- возвращаем найденное.
    """
    current = dehn_reduce(letters, g)
    while True:
        seen: Dict[Letters, Letters] = {canonical_rotation(current): current}
        queue = deque([current])
        restart = False
        while queue and not restart:
            x = queue.popleft()
            for y in half_swaps(x, g):
                z = dehn_reduce(y, g)
                if len(z) < len(current):
                    current = z
                    restart = True
                    break
                key = canonical_rotation(z)
                if key not in seen:
                    seen[key] = z
                    queue.append(z)
                    if len(seen) >= cap:
                        queue.clear()
                        break
        if not restart:
            return list(seen.values())


def _require_essential(w: CurveWord) -> Letters:
    reduced = dehn_reduce(w.letters, w.genus)
    if not reduced:
        raise DomainError(f"word {w} is the identity in the surface group")
    return reduced


def minimal_representative(w: CurveWord) -> Tuple[Letters, int, int]:
    """(корень-представитель с минимальным числом пересечений, степень, это число)."""
    root, power = primitive_root(_require_essential(w))
    best, best_count = root, None
    for rep in shortest_representatives(root, w.genus):
        count = link_count(rep, rep, w.genus, True)
        if best_count is None or count < best_count:
            best, best_count = rep, count
    return best, power, int(best_count)


def self_intersection_oracle(w: CurveWord) -> int:
    """
    i(w, w) на замкнутой поверхности. Для w = root^p: p^2 * i(root) + p - 1,
    сдвинутые копии корня дают ещё p - 1 точек.
    """
    _, power, count = minimal_representative(w)
    return power * power * count + power - 1


def pair_intersection_oracle(w1: CurveWord, w2: CurveWord) -> int:
    if w1.genus != w2.genus:
        raise DomainError("words live on different genera")
    g = w1.genus
    root1, p = primitive_root(_require_essential(w1))
    root2, q = primitive_root(_require_essential(w2))
    best = None
    reps2 = shortest_representatives(root2, g)
    for a in shortest_representatives(root1, g):
        for b in reps2:
            count = link_count(a, b, g, False)
            if best is None or count < best:
                best = count
    return p * q * int(best)


def is_separating(w: CurveWord) -> bool:
    """Для простой кривой: разделяет iff гомологически тривиальна."""
    if self_intersection_oracle(w) != 0:
        raise DomainError(f"word {w} is not simple")
    return all(s == 0 for s in exponent_sums(w))


# ============================================================
#  DRAWING / FILLING
# ============================================================

class CurveDrawing:
    """
    Рисунок кривой в многоугольнике: на каждой паре сторон x -- полоса из проходов по букве x,
    хорда t соединяет приход прохода t-1 с уходом прохода t.
    """

    def __init__(self, letters: Letters, g: int):
        self.letters = letters
        self.g = g
        self.n = len(letters)
        self.pos = slot_positions(g)
        self.n_slots = 4 * g
        self.bands: Dict[int, List[int]] = {}
        for t, x in enumerate(letters):
            self.bands.setdefault(abs(x), []).append(t)
        for x, strands in self.bands.items():
            strands.sort(key=cmp_to_key(lambda s, t: -1 if self._below(s, t) else 1))
        self.rank = [0] * self.n
        self._reset_rank()

    def _reset_rank(self):
        for strands in self.bands.values():
            for r, t in enumerate(strands):
                self.rank[t] = r

    def _line(self, t: int, k: int) -> int:
        w, n = self.letters, self.n
        return w[(t + k) % n] if w[t] > 0 else -w[(t - k) % n]

    def _below(self, s: int, t: int) -> bool:
        lim = 2 * self.n + 2
        line = self._line
        kf = 1
        while kf < lim and line(s, kf) == line(t, kf):
            kf += 1
        kb = 1
        while kb < lim and line(s, -kb) == line(t, -kb):
            kb += 1
        if kf >= lim:
            return s < t
        seq = [line(s, j) for j in range(-(kb - 1), kf)]
        rev = [-x for x in reversed(seq)]
        forward = True
        for a, b in zip(seq, rev):
            if a != b:
                forward = a < b
                break
        if forward:
            c = -line(s, kf - 1)
            return ccw(self.pos, self.n_slots, c, line(s, kf), line(t, kf))
        back = lambda u, k: -line(u, -k)
        c = -back(s, kb - 1)
        return not ccw(self.pos, self.n_slots, c, back(s, kb), back(t, kb))

    def coord(self, t: int, slot_letter: int) -> Fraction:
        k = len(self.bands[abs(self.letters[t])])
        r = self.rank[t]
        idx = r if slot_letter > 0 else k - 1 - r
        return self.pos[slot_letter] + Fraction(idx + 1, k + 1)

    def chords(self) -> List[Tuple[Fraction, Fraction]]:
        w = self.letters
        out = []
        for t in range(self.n):
            tp = (t - 1) % self.n
            out.append((self.coord(tp, -w[tp]), self.coord(t, w[t])))
        return out

    def _inside(self, p: Fraction, a: Fraction, b: Fraction) -> bool:
        span = (b - a) % self.n_slots
        q = (p - a) % self.n_slots
        return 0 < q < span

    def crossings(self) -> int:
        ch = self.chords()
        count = 0
        for i in range(len(ch)):
            a, b = ch[i]
            for j in range(i + 1, len(ch)):
                c, d = ch[j]
                if self._inside(c, a, b) != self._inside(d, a, b):
                    count += 1
        return count

    def _swap(self, x: int, r: int):
        strands = self.bands[x]
        a, b = strands[r], strands[r + 1]
        strands[r], strands[r + 1] = b, a
        self.rank[a], self.rank[b] = r + 1, r

    def repair(self, target: int, max_iters: int = DRAWING_MAX_ITERS, seed: int = DRAWING_SEED) -> int:
        """Соседние перестановки внутри полос, пока число пересечений не станет target."""
        rng = np.random.default_rng(seed)
        current = self.crossings()
        moves = [(x, r) for x, strands in sorted(self.bands.items()) for r in range(len(strands) - 1)]
        it = 0
        while current > target and it < max_iters:
            it += 1
            best, best_x, plateau = None, None, []
            for x, r in moves:
                self._swap(x, r)
                value = self.crossings()
                self._swap(x, r)
                if best_x is None or value < best_x:
                    best, best_x = (x, r), value
                if value == current:
                    plateau.append((x, r))
            if best_x is not None and best_x < current:
                move = best
            elif plateau:
                move = plateau[int(rng.integers(len(plateau)))]
            else:
                break
            self._swap(*move)
            current = self.crossings()
        return current

    def face_count(self, crossings: int) -> int:
        """Число граней на замкнутой поверхности (угол многоугольника -- одна точка)."""
        chords = self.chords()
        pts = sorted(p for chord in chords for p in chord)
        m = len(pts)
        N = self.n_slots

        def arc_end(i: int) -> Fraction:
            return pts[i + 1] if i + 1 < m else pts[0] + N

        mids = [((pts[i] + arc_end(i)) / 2) % N for i in range(m)]
        parent = list(range(m + 1))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        def union(a: int, b: int):
            parent[find(a)] = find(b)

        cls = list(range(m))

        def cfind(a: int) -> int:
            while cls[a] != a:
                cls[a] = cls[cls[a]]
                a = cls[a]
            return a

        for i in range(m):
            for j in range(i + 1, m):
                separated = any(self._inside(mids[i], a, b) != self._inside(mids[j], a, b) for a, b in chords)
                if not separated:
                    cls[cfind(i)] = cfind(j)
                    union(i, j)
        n_classes = len({cfind(i) for i in range(m)})

        cap = m
        for i in range(m):
            a, b = pts[i], arc_end(i)
            if math.floor(a) != math.floor(b) or b - a >= 1:
                union(i, cap)

        index_of = {p: i for i, p in enumerate(pts)}
        for x, strands in self.bands.items():
            k = len(strands)
            for r in range(k - 1):
                s1 = self.pos[x] + Fraction(r + 1, k + 1)
                s2 = self.pos[-x] + Fraction(k - 1 - r, k + 1)
                union(index_of[s1], index_of[s2])

        components = len({find(i) for i in range(m + 1)})
        interior = (1 + self.n + crossings) - n_classes
        return components + interior


def minimal_drawing(letters: Letters, g: int) -> Tuple[CurveDrawing, int]:
    target = link_count(letters, letters, g, True)
    drawing = CurveDrawing(letters, g)
    reached = drawing.repair(target)
    if reached != target:
        raise ToolkitError(f"no minimal drawing found for {letters} (crossings {reached}, target {target})")
    return drawing, target


def is_filling(w: CurveWord) -> bool:
    """Все грани дополнения -- диски: F - X = 2 - 2g на рисунке в минимальном положении."""
    reduced = dehn_reduce(w.letters, w.genus)
    if not reduced:
        return False
    rep, _, _ = minimal_representative(w)
    drawing, crossings = minimal_drawing(rep, w.genus)
    if crossings == 0:
        return False
    faces = drawing.face_count(crossings)
    return faces - crossings == 2 - 2 * w.genus
