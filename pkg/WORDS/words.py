"""
Циклические слова в фундаментальной группе замкнутой поверхности рода g.

Буквы кодируются целыми: a_i -> 2(i-1)+1, b_i -> 2(i-1)+2, обратные -- со знаком минус.
Текстовый вид: a1 b1 a2 ..., обратные заглавными: A1 B1 ...
"""
import re
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from c_errors import DomainError, WordParseError

Letters = Tuple[int, ...]
TOKEN_RE = re.compile(r"^([aAbB])(\d+)$")


def letter(kind: str, index: int) -> int:
    code = 2 * (index - 1) + (1 if kind.lower() == "a" else 2)
    return code if kind.islower() else -code

def letter_name(x: int) -> str:
    k = abs(x) - 1
    kind = "a" if k % 2 == 0 else "b"
    return (kind if x > 0 else kind.upper()) + str(k // 2 + 1)

def letter_handle(x: int) -> int:
    return (abs(x) - 1) // 2 + 1


@dataclass(frozen=True)
class CurveWord:
    genus: int
    letters: Letters

    def __post_init__(self):
        if self.genus < 2:
            raise DomainError(f"genus must be >= 2, got {self.genus}")
        for x in self.letters:
            if x == 0 or letter_handle(x) > self.genus:
                raise DomainError(f"letter {x} outside the genus-{self.genus} alphabet")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return " ".join(letter_name(x) for x in self.letters) if self.letters else "1"

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def inverse(self) -> "CurveWord":
        return CurveWord(self.genus, inverse_letters(self.letters))

    def with_letters(self, letters: Sequence[int]) -> "CurveWord":
        return CurveWord(self.genus, tuple(letters))


def parse_word(text: str, genus: Optional[int] = None) -> CurveWord:
    """
    Разбор "a1 b1 A1 B1". Род -- по максимальному индексу (не меньше 2), если не задан явно.
    Пустая строка или "1" -- тождественное слово.
    """
    tokens = text.replace(",", " ").split()
    if tokens == ["1"]:
        tokens = []
    parsed: List[int] = []
    max_index = 0
    for pos, token in enumerate(tokens, start=1):
        match = TOKEN_RE.match(token)
        if not match:
            raise WordParseError(token, pos)
        index = int(match.group(2))
        if index < 1:
            raise WordParseError(token, pos, "handle index must be >= 1")
        if genus is not None and index > genus:
            raise WordParseError(token, pos, f"handle index exceeds genus {genus}")
        max_index = max(max_index, index)
        parsed.append(letter(match.group(1), index))
    g = genus if genus is not None else max(2, max_index)
    return CurveWord(g, tuple(parsed))


# ============================================================
#  FREE / CYCLIC REDUCTION
# ============================================================

def inverse_letters(letters: Sequence[int]) -> Letters:
    return tuple(-x for x in reversed(letters))

def free_reduce(letters: Sequence[int]) -> Letters:
    out: List[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)

def cyclic_reduce(letters: Sequence[int]) -> Letters:
    w = free_reduce(letters)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return w[i:j + 1]

def rotations(letters: Sequence[int]) -> Iterator[Letters]:
    w = tuple(letters)
    for k in range(len(w)):
        yield w[k:] + w[:k]

def canonical_rotation(letters: Sequence[int]) -> Letters:
    return min(rotations(letters), default=())

def class_key(letters: Sequence[int]) -> Letters:
    """Ключ класса слова с точностью до поворота и обращения."""
    return min(canonical_rotation(letters), canonical_rotation(inverse_letters(letters)))

def primitive_root(letters: Sequence[int]) -> Tuple[Letters, int]:
    w = tuple(letters)
    n = len(w)
    for d in range(1, n + 1):
        if n % d:
            continue
        if all(w[i] == w[i % d] for i in range(n)):
            return w[:d], n // d
    return w, 1


# ============================================================
#  SURFACE RELATOR
# ============================================================

def relator(g: int) -> Letters:
    r: List[int] = []
    for i in range(g):
        a, b = 2 * i + 1, 2 * i + 2
        r.extend((a, b, -a, -b))
    return tuple(r)

def slot_positions(g: int) -> Dict[int, int]:
    """Циклический порядок полуребер у единственной вершины: a_i, B_i, A_i, b_i."""
    pos: Dict[int, int] = {}
    for i in range(g):
        a, b = 2 * i + 1, 2 * i + 2
        pos[a] = 4 * i
        pos[-b] = 4 * i + 1
        pos[-a] = 4 * i + 2
        pos[b] = 4 * i + 3
    return pos

def ccw(pos: Dict[int, int], n_slots: int, c: int, x: int, y: int) -> bool:
    pc = pos[c]
    return (pos[x] - pc) % n_slots < (pos[y] - pc) % n_slots

def dehn_reduce(letters: Sequence[int], g: int) -> Letters:
    """
    Алгоритм Дэна: кусок циклического слова длиной больше 2g из поворота релятора
    заменяется обратным к дополнению. Полный релятор -> пустое слово.
    """
    rel = relator(g)
    n_rel = len(rel)
    variants = (rel, inverse_letters(rel))
    w = cyclic_reduce(letters)
    changed = True
    while changed and w:
        changed = False
        n = len(w)
        for rr in variants:
            for s in range(n_rel):
                for i in range(n):
                    length = 0
                    while length < n and length < n_rel and w[(i + length) % n] == rr[(s + length) % n_rel]:
                        length += 1
                    if length > 2 * g:
                        if length == n_rel and n == n_rel:
                            w = ()
                        else:
                            comp = [rr[(s + t) % n_rel] for t in range(length, n_rel)]
                            rest = [w[(i + t) % n] for t in range(length, n)]
                            w = cyclic_reduce(list(inverse_letters(comp)) + rest)
                        changed = True
                        break
                if changed:
                    break
            if changed:
                break
    return w

def exponent_sums(w: CurveWord) -> Tuple[int, ...]:
    sums = [0] * (2 * w.genus)
    for x in w.letters:
        sums[abs(x) - 1] += 1 if x > 0 else -1
    return tuple(sums)


# ============================================================
#  PUBLIC OPERATIONS
# ============================================================

def normalize(w: CurveWord) -> CurveWord:
    """Циклически редуцированный (и Дэн-редуцированный) представитель того же класса."""
    return w.with_letters(dehn_reduce(w.letters, w.genus))

def concat_power(base: CurveWord, exponent: int) -> CurveWord:
    if int(exponent) != exponent or exponent < 1:
        raise DomainError(f"exponent must be an integer >= 1, got {exponent!r}")
    if base.is_identity:
        raise DomainError("base word is the identity")
    return normalize(base.with_letters(base.letters * int(exponent)))

def concat(*words: CurveWord) -> CurveWord:
    if not words:
        raise DomainError("nothing to concatenate")
    g = words[0].genus
    if any(w.genus != g for w in words):
        raise DomainError("words live on different genera")
    letters: List[int] = []
    for w in words:
        letters.extend(w.letters)
    return normalize(CurveWord(g, tuple(letters)))

def alphabet(g: int) -> Letters:
    out: List[int] = []
    for code in range(1, 2 * g + 1):
        out.extend((code, -code))
    return tuple(out)

def enumerate_reduced_words(g: int, max_len: int, min_len: int = 1) -> Iterator[CurveWord]:
    """
    Все циклически редуцированные слова длины min_len..max_len, по одному на класс
    поворот/обращение, в порядке (длина, ключ).
    """
    letters = alphabet(g)
    for length in range(min_len, max_len + 1):
        found: List[Letters] = []
        word: List[int] = []

        def extend():
            if len(word) == length:
                if length > 1 and word[-1] == -word[0]:
                    return
                w = tuple(word)
                if class_key(w) == w:
                    found.append(w)
                return
            for x in letters:
                if word and word[-1] == -x:
                    continue
                word.append(x)
                extend()
                word.pop()

        extend()
        for w in sorted(found):
            yield CurveWord(g, w)
