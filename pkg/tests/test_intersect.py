import itertools

import pytest

from c_errors import DomainError
from WORDS.family import eta, family_word, gamma0
from WORDS.intersect import (
    is_filling, is_separating, link_count, minimal_representative, pair_intersection_oracle,
    self_intersection_oracle, shortest_representatives,
)
from WORDS.words import CurveWord, class_key, cyclic_reduce, parse_word

# род 2, подсчёт вручную: i(w,w), заполняет ли
G2_CASES = [
    ("a1", 0, False),
    ("a1 b1 A1 B1", 0, False),
    ("a1 a2 b1 b2", 3, True),
    ("a1 a1", 1, False),
    ("a1 a1 a1", 2, False),
    ("a1 b1", 0, False),
    ("a1 b1 a2 b2", 0, False),
    ("a1 b1 a1 b1", 1, False),
    ("a1 a2", 0, False),
]


@pytest.mark.parametrize("text, count, filling", G2_CASES)
def test_genus2_reference_words(text, count, filling):
    w = parse_word(text, genus=2)
    assert self_intersection_oracle(w) == count
    assert is_filling(w) is filling


def test_corpus_matches_reference(word_corpus):
    assert len(word_corpus) == 50
    for w, count, filling in word_corpus:
        assert self_intersection_oracle(w) == count, str(w)
        assert is_filling(w) is filling, str(w)


def test_filling_words_need_2g_minus_1_points(word_corpus):
    filling = [count for _, count, flag in word_corpus if flag]
    assert filling and min(filling) >= 3
    assert self_intersection_oracle(gamma0(2)) == 3
    assert self_intersection_oracle(gamma0(3)) == 5


def test_pair_counts():
    a1, b1 = parse_word("a1", genus=2), parse_word("b1", genus=2)
    assert pair_intersection_oracle(a1, b1) == 1
    assert pair_intersection_oracle(a1, a1) == 0
    assert pair_intersection_oracle(gamma0(2), eta(2)) == 4
    assert pair_intersection_oracle(gamma0(3), eta(3)) == 2


def test_pair_symmetric_and_power_scaling():
    u, v = parse_word("a1 a2 b1 b2"), parse_word("a1 b2")
    assert pair_intersection_oracle(u, v) == pair_intersection_oracle(v, u)
    u2 = parse_word("a1 a2 b1 b2 a1 a2 b1 b2")
    assert pair_intersection_oracle(u2, v) == 2 * pair_intersection_oracle(u, v)


@pytest.mark.parametrize("root, p", [("a1 a2 b1 b2", 2), ("a1 a2 b1 b2", 3), ("a1 b1 A2", 2), ("b2", 4)])
def test_self_intersection_of_power(root, p):
    # i(w^p) = p^2 i(w) + p - 1: сдвинутые копии корня пересекаются p - 1 раз
    w = parse_word(root, genus=2)
    count = self_intersection_oracle(w)
    power = parse_word(" ".join([root] * p), genus=2)
    assert self_intersection_oracle(power) == p * p * count + p - 1


def test_self_intersection_of_gamma0_powers():
    assert self_intersection_oracle(family_word(2, 0, 2)) == 13
    assert self_intersection_oracle(family_word(2, 0, 3)) == 29


@pytest.mark.parametrize("m, n", list(itertools.product(range(1, 5), repeat=2)))
def test_handle_words_follow_torus_law(m, n):
    # a^m b^n внутри ручки: (m - 1)(n - 1)
    w = parse_word(" ".join(["a1"] * m + ["b1"] * n), genus=2)
    assert self_intersection_oracle(w) == (m - 1) * (n - 1)


def test_invariant_under_rotation_and_inverse():
    w = parse_word("a1 a2 b1 b2 B1")
    rotated = w.with_letters(w.letters[2:] + w.letters[:2])
    count = self_intersection_oracle(w)
    assert self_intersection_oracle(rotated) == count
    assert self_intersection_oracle(w.inverse()) == count


def test_identity_rejected():
    with pytest.raises(DomainError):
        self_intersection_oracle(parse_word("a1 b1 A1 B1 a2 b2 A2 B2"))
    with pytest.raises(DomainError):
        pair_intersection_oracle(parse_word("a1"), parse_word("a1", genus=3))
    assert is_filling(parse_word("a1 A1")) is False


def test_separating():
    assert is_separating(eta(2)) is True
    assert is_separating(parse_word("a1")) is False
    with pytest.raises(DomainError):
        is_separating(gamma0(2))
    # степень простой кривой уже не простая
    with pytest.raises(DomainError):
        is_separating(parse_word("a1 a1"))


def test_genus3_canonical_words():
    g0 = gamma0(3)
    assert self_intersection_oracle(g0) == 5
    assert is_filling(g0) is True
    assert is_filling(eta(3)) is False


def test_shortest_representatives_contain_reduced_word():
    w = parse_word("a1 a2 b1 b2")
    reps = shortest_representatives(w.letters, 2)
    assert all(len(r) == 4 for r in reps)
    assert class_key(w.letters) in {class_key(r) for r in reps}


def test_minimal_representative_power():
    _, power, count = minimal_representative(family_word(2, 0, 2))
    assert (power, count) == (2, 3)


def test_link_count_empty():
    assert link_count((), (1,), 2, False) == 0


def test_pair_of_equal_curves():
    # две параллельные копии: каждая точка самопересечения даёт две
    w = parse_word("a1 a2 b1 b2")
    assert pair_intersection_oracle(w, w) == 2 * self_intersection_oracle(w)
    w2 = parse_word("a1 a2 b1 b2 a1 a2 b1 b2")
    assert pair_intersection_oracle(w2, w) == 4 * self_intersection_oracle(w)


def test_genus2_separating_pair_needs_four_points():
    # кривая, пересекающая eta дважды, -- дуга в каждом торе с дыркой;
    # заполняющая дуга там имеет не меньше двух самопересечений
    w = parse_word("a1 a1 b1 a2 a2 b2")
    assert pair_intersection_oracle(w, eta(2)) == 2
    assert is_filling(w) is True
    assert self_intersection_oracle(w) == 4


def _handle_syllables(first: int, max_len: int):
    gens = (first, first + 1, -first, -first - 1)
    for size in range(1, max_len + 1):
        for letters in itertools.product(gens, repeat=size):
            if all(letters[t] != -letters[t + 1] for t in range(size - 1)):
                yield letters


@pytest.mark.slow
def test_genus2_no_three_point_filling_curve_meets_eta_twice():
    seen = set()
    for x in _handle_syllables(1, 3):
        for y in _handle_syllables(3, 3):
            letters = cyclic_reduce(x + y)
            if len(letters) != len(x) + len(y) or class_key(letters) in seen:
                continue
            seen.add(class_key(letters))
            w = CurveWord(2, letters)
            if pair_intersection_oracle(w, eta(2)) == 2 and is_filling(w):
                assert self_intersection_oracle(w) >= 4, str(w)
